//! Text and JSON forms of vectors and matrices.
//!
//! Text: nested brackets with scalar entries, `[[1,1/2],[0,1-r]]`. JSON: the
//! same nesting with string (or integer) entries, `[["1","1/2"],["0","1"]]`.
//! Parse errors carry the byte offset into the input.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{parse_scalar_at, Field, Scalar};
use crate::linalg::{MatrixK, Subspace, VectorK};

/// A bracketed list node with the byte offset where it starts.
enum Node<'a> {
    Leaf(&'a str, usize),
    List(Vec<Node<'a>>, usize),
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.s[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn node(&mut self) -> Result<Node<'a>> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                self.skip_ws();
                if self.peek() == Some(']') {
                    self.pos += 1;
                    return Ok(Node::List(items, start));
                }
                loop {
                    items.push(self.node()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            return Ok(Node::List(items, start));
                        }
                        Some(c) => return Err(Error::parse(self.pos, format!("expected ',' or ']', found '{c}'"))),
                        None => return Err(Error::parse(self.pos, "unterminated '['")),
                    }
                }
            }
            Some(']') | Some(',') | None => Err(Error::parse(start, "expected a value")),
            Some(_) => {
                let end = self.s[start..].find([',', ']', '[']).map_or(self.s.len(), |i| start + i);
                self.pos = end;
                Ok(Node::Leaf(&self.s[start..end], start))
            }
        }
    }
}

fn parse_tree(s: &str) -> Result<Node<'_>> {
    let mut p = Parser { s, pos: 0 };
    let node = p.node()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(Error::parse(p.pos, "trailing input"));
    }
    Ok(node)
}

fn scalar_of(field: &Field, node: &Node<'_>) -> Result<Scalar> {
    match node {
        Node::Leaf(text, at) => parse_scalar_at(field, text, *at),
        Node::List(_, at) => Err(Error::parse(*at, "expected a scalar, found a list")),
    }
}

fn row_of(field: &Field, node: &Node<'_>) -> Result<(Vec<Scalar>, usize)> {
    match node {
        Node::List(items, at) => Ok((items.iter().map(|x| scalar_of(field, x)).collect::<Result<_>>()?, *at)),
        Node::Leaf(_, at) => Err(Error::parse(*at, "expected a list")),
    }
}

fn rows_of(field: &Field, node: &Node<'_>) -> Result<Vec<(Vec<Scalar>, usize)>> {
    match node {
        Node::List(items, _) => items.iter().map(|r| row_of(field, r)).collect(),
        Node::Leaf(_, at) => Err(Error::parse(*at, "expected a list of lists")),
    }
}

fn looks_like_json(s: &str) -> bool {
    s.contains('"')
}

fn json_tree(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| {
        let offset: usize = s.lines().take(e.line().saturating_sub(1)).map(|l| l.len() + 1).sum();
        Error::parse(offset + e.column().saturating_sub(1), e.to_string())
    })
}

fn json_scalar(field: &Field, v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar_at(field, s, 0),
        Value::Number(n) if n.is_i64() => Ok(Scalar::from_int(n.as_i64().unwrap())),
        _ => Err(Error::parse(0, format!("expected a string or integer entry, found {v}"))),
    }
}

fn json_rows(field: &Field, v: &Value) -> Result<Vec<Vec<Scalar>>> {
    let rows = v.as_array().ok_or_else(|| Error::parse(0, "expected a JSON array"))?;
    rows.iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::parse(0, "expected a JSON array of arrays"))?
                .iter()
                .map(|x| json_scalar(field, x))
                .collect()
        })
        .collect()
}

pub fn parse_vector(field: Field, s: &str) -> Result<VectorK> {
    let entries = if looks_like_json(s) {
        let v = json_tree(s)?;
        let items = v.as_array().ok_or_else(|| Error::parse(0, "expected a JSON array"))?;
        items.iter().map(|x| json_scalar(&field, x)).collect::<Result<Vec<_>>>()?
    } else {
        row_of(&field, &parse_tree(s)?)?.0
    };
    if entries.is_empty() {
        return Err(Error::parse(0, "empty vector"));
    }
    Ok(VectorK::new(entries))
}

fn check_rows(rows: &[(Vec<Scalar>, usize)], square: bool) -> Result<()> {
    let Some((first, _)) = rows.first() else {
        return Err(Error::parse(0, "empty list"));
    };
    let n = first.len();
    for (r, at) in rows {
        if r.len() != n || n == 0 {
            return Err(Error::parse(*at, format!("row has {} entries, expected {n}", r.len())));
        }
    }
    if square && rows.len() != n {
        return Err(Error::parse(0, format!("matrix has {} rows and {n} columns", rows.len())));
    }
    Ok(())
}

fn rows_any(field: Field, s: &str) -> Result<Vec<(Vec<Scalar>, usize)>> {
    if looks_like_json(s) {
        Ok(json_rows(&field, &json_tree(s)?)?.into_iter().map(|r| (r, 0)).collect())
    } else {
        rows_of(&field, &parse_tree(s)?)
    }
}

pub fn parse_matrix(field: Field, s: &str) -> Result<MatrixK> {
    let rows = rows_any(field, s)?;
    check_rows(&rows, true)?;
    MatrixK::from_rows(rows.into_iter().map(|(r, _)| r).collect())
}

/// A subspace given by a list of spanning vectors, which must be independent.
pub fn parse_subspace(field: Field, s: &str) -> Result<Subspace> {
    let rows = rows_any(field, s)?;
    check_rows(&rows, false)?;
    let n = rows[0].0.len();
    Subspace::new(n, rows.into_iter().map(|(r, _)| VectorK::new(r)).collect())
}

pub fn vector_to_json(x: &VectorK) -> Value {
    Value::Array(x.entries().iter().map(|c| Value::String(c.to_string())).collect())
}

pub fn matrix_to_json(t: &MatrixK) -> Value {
    Value::Array((0..t.dim()).map(|i| vector_to_json(&t.row(i))).collect())
}
