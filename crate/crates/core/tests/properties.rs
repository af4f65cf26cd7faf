use heightlab::exec::Exec;
use heightlab::heights::height_vector;
use heightlab::io::{parse_matrix, parse_vector};
use heightlab::linalg::{bits_budget, power_stripped};
use heightlab::northcott::enum_projective_points;
use heightlab::{Field, MatrixK, Scalar, VectorK};
use num_rational::BigRational;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rational), Just(Field::Quadratic(-1)), Just(Field::Quadratic(2)), Just(Field::Quadratic(-5))]
}

fn rat() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn scalar(m: i64) -> impl Strategy<Value = Scalar> {
    (rat(), rat(), any::<bool>()).prop_map(move |(a, b, irr)| {
        if m == 0 || !irr {
            Scalar::rational(a)
        } else {
            Scalar::new(a, b, m)
        }
    })
}

fn field_and_matrix() -> impl Strategy<Value = (Field, MatrixK)> {
    (field(), 1usize..=3).prop_flat_map(|(f, n)| {
        proptest::collection::vec(scalar(f.radicand()), n * n).prop_map(move |e| (f, MatrixK::new(n, e).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_print_parse_roundtrip((f, t) in field_and_matrix()) {
        prop_assert_eq!(parse_matrix(f, &t.to_string()).unwrap(), t);
    }

    #[test]
    fn vector_print_parse_roundtrip(f in field(), xs in proptest::collection::vec(rat(), 1..5)) {
        let x = VectorK::new(xs.into_iter().map(Scalar::rational).collect());
        prop_assert_eq!(parse_vector(f, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn stripped_power_reassembles((_f, t) in field_and_matrix(), k in 1u64..6) {
        let (m, c) = power_stripped(&t, k, bits_budget()).unwrap();
        prop_assert_eq!(m.scale(&c), t.pow(k as u32));
    }

    #[test]
    fn height_is_projective(
        xs in proptest::collection::vec(-30i64..=30, 2..5),
        (n, d) in (1i64..=20, 1i64..=20),
    ) {
        let x = VectorK::from_ints(&xs);
        let lam = Scalar::from_ratio(n, d);
        let a = height_vector(Field::Rational, &x, None).unwrap();
        let b = height_vector(Field::Rational, &x.scale(&lam), None).unwrap();
        prop_assert!(a.value_close(&b, 1e-12));
        prop_assert!(a.ln() >= -1e-12);
    }
}

#[test]
fn enumeration_independent_of_workers() {
    for b in [1.0, 2.5, 4.0] {
        let seq = enum_projective_points(3, b, Exec::Sequential);
        assert_eq!(seq, enum_projective_points(3, b, Exec::Parallel { workers: 3 }));
    }
}
