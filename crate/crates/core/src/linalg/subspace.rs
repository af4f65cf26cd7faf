//! Subspaces of `K^n` and their Plücker coordinates.
//!
//! Coordinates are the `ℓ×ℓ` minors of the basis matrix (basis vectors as
//! rows), indexed by column subsets in lexicographic order.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::matrix::{determinant, MatrixK, VectorK};

#[derive(Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<VectorK>,
    plucker: OnceLock<VectorK>,
}

impl Clone for Subspace {
    fn clone(&self) -> Self {
        Subspace { ambient: self.ambient, basis: self.basis.clone(), plucker: self.plucker.clone() }
    }
}

impl Subspace {
    /// Fails if the vectors are dependent, empty, or of the wrong length.
    pub fn new(ambient: usize, basis: Vec<VectorK>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::invalid("a subspace needs at least one basis vector"));
        }
        if basis.iter().any(|b| b.dim() != ambient) {
            return Err(Error::invalid("basis vectors must lie in the ambient space"));
        }
        let rows: Vec<Vec<Scalar>> = basis.iter().map(|b| b.entries().to_vec()).collect();
        if MatrixK::rref(&rows, ambient).1.len() != basis.len() {
            return Err(Error::invalid("basis vectors are linearly dependent"));
        }
        Ok(Subspace { ambient, basis, plucker: OnceLock::new() })
    }

    /// `span(vectors)`; dependent vectors are dropped.
    pub fn span(ambient: usize, vectors: &[VectorK]) -> Option<Self> {
        let rows: Vec<Vec<Scalar>> = vectors.iter().map(|b| b.entries().to_vec()).collect();
        let (red, pivots) = MatrixK::rref(&rows, ambient);
        if pivots.is_empty() {
            return None;
        }
        let basis = red.into_iter().take(pivots.len()).map(VectorK::new).collect();
        Some(Subspace { ambient, basis, plucker: OnceLock::new() })
    }

    pub fn whole(n: usize) -> Self {
        Subspace::new(n, (0..n).map(|i| VectorK::unit(n, i)).collect()).unwrap()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[VectorK] {
        &self.basis
    }

    pub fn contains(&self, y: &VectorK) -> bool {
        let mut rows: Vec<Vec<Scalar>> = self.basis.iter().map(|b| b.entries().to_vec()).collect();
        rows.push(y.entries().to_vec());
        MatrixK::rref(&rows, self.ambient).1.len() == self.dim()
    }

    /// `⟨X, y⟩`; errors when `y ∈ X`.
    pub fn extend(&self, y: &VectorK) -> Result<Subspace> {
        let mut basis = self.basis.clone();
        basis.push(y.clone());
        Subspace::new(self.ambient, basis).map_err(|_| Error::Degenerate("vector lies in the subspace".into()))
    }

    /// The Plücker vector reduced to a primitive representative (see
    /// [`VectorK::primitive`]). Computed once and cached.
    pub fn plucker(&self) -> VectorK {
        self.plucker.get_or_init(|| plucker_raw(&self.basis).primitive()).clone()
    }

    /// Same subspace: proportional Plücker vectors.
    pub fn same_as(&self, o: &Subspace) -> bool {
        if self.ambient != o.ambient || self.dim() != o.dim() {
            return false;
        }
        o.basis.iter().all(|b| self.contains(b))
    }
}

/// All `ℓ`-subsets of `0..n` in lexicographic order.
pub fn lex_subsets(n: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..l).collect();
    if l > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = l;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - l + i {
                cur[i] += 1;
                for j in i + 1..l {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Maximal minors of the matrix whose rows are `rows`, without any
/// normalisation; the wedge product of the rows.
pub fn plucker_raw(rows: &[VectorK]) -> VectorK {
    let l = rows.len();
    let n = rows[0].dim();
    let coords = lex_subsets(n, l)
        .into_iter()
        .map(|cols| {
            let sub: Vec<Vec<Scalar>> = rows
                .iter()
                .map(|r| cols.iter().map(|&c| r.entries()[c].clone()).collect())
                .collect();
            determinant(sub)
        })
        .collect();
    VectorK::new(coords)
}
