//! Exact arithmetic: sparse polynomials over ℚ, reduced rational functions,
//! finite products of rational function fields, and matrices over them.
//!
//! Every value is kept in canonical form, so equality of elements is
//! structural equality. Canonical text lists terms in descending graded-lex
//! order over the declared generator order, e.g. `3/2*x^2*y - 1`; elements of
//! a product ring print as `(e1, e2)`.

mod elem;
mod gcd;
mod matrix;
mod poly;
mod ratfunc;

use std::sync::Arc;

use thiserror::Error;

pub use elem::{ArithOp, Ring, RingElem, RingMap};
pub use gcd::gcd;
pub use matrix::Matrix;
pub use poly::{scalar_sqrt, Monomial, Poly};
pub use ratfunc::RatFunc;

/// Coefficient field ℚ.
pub type Scalar = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: String, right: String },
    #[error("division by an element with a zero component")]
    DivisionByZero,
    #[error("generator index {index} out of range for {count} generators")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("substitution produced a zero denominator")]
    ZeroDenominator,
    #[error("invalid unit image: {0}")]
    InvalidUnit(String),
    #[error("element components do not match the ring layout")]
    ComponentShape,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Canonical element `num / den` of a ring; both must live in `ring`.
pub fn normalize(ring: &Arc<Ring>, num: &RingElem, den: &RingElem) -> Result<RingElem, RingError> {
    if **num.ring() != **ring || **den.ring() != **ring {
        return Err(RingError::RingMismatch {
            left: ring.to_string(),
            right: if **num.ring() != **ring {
                num.ring()
            } else {
                den.ring()
            }
            .to_string(),
        });
    }
    if den.has_zero_component() {
        return Err(RingError::ZeroDenominator);
    }
    num.try_div(den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Arc<Ring> {
        Ring::new(["x", "y"])
    }

    fn gens(r: &Arc<Ring>) -> (RingElem, RingElem) {
        (r.generator(0).unwrap(), r.generator(1).unwrap())
    }

    #[test]
    fn arith_examples() {
        let r = xy();
        let (x, y) = gens(&r);
        assert_eq!((&x * &y).to_string(), "x*y");
        assert!(x.try_div(&x).unwrap().is_one());

        let p = Ring::product(vec![vec!["x".into()], vec!["y".into()]]);
        let e1 = p.component_unit(0);
        let e2 = p.component_unit(1);
        assert_eq!(e1.to_string(), "(1, 0)");
        assert!((&e1 * &e2).is_zero());
        assert_eq!((&e1 * &e2).to_string(), "(0, 0)");
    }

    #[test]
    fn arith_errors() {
        let r = xy();
        let other = Ring::new(["u", "v"]);
        let (x, _) = gens(&r);
        let u = other.generator(0).unwrap();
        assert!(matches!(x.try_add(&u), Err(RingError::RingMismatch { .. })));
        assert_eq!(x.try_div(&r.zero()), Err(RingError::DivisionByZero));

        let p = Ring::product(vec![vec!["x".into()], vec!["y".into()]]);
        let e1 = p.component_unit(0);
        assert_eq!(p.one().try_div(&e1), Err(RingError::DivisionByZero));
    }

    #[test]
    fn partial_examples() {
        let r = xy();
        let (x, y) = gens(&r);
        let x2y = &(&x * &x) * &y;
        assert_eq!(x2y.partial(0).unwrap().to_string(), "2*x*y");
        assert_eq!(x2y.partial(1).unwrap().to_string(), "x^2");
        let inv = x.recip().unwrap();
        assert_eq!(inv.partial(0).unwrap().to_string(), "-1/x^2");
        assert!(matches!(
            x.partial(2),
            Err(RingError::IndexOutOfRange { index: 2, count: 2 })
        ));
    }

    #[test]
    fn substitute_examples() {
        let src = Ring::new(["x"]);
        let tgt = Ring::new(["u", "v"]);
        let (u, v) = gens(&tgt);
        let x = src.generator(0).unwrap();
        let map = RingMap::new(&src, &tgt, vec![&u + &v]).unwrap();
        assert_eq!(
            (&x * &x).substitute(&map).unwrap().to_string(),
            "u^2 + 2*u*v + v^2"
        );

        let ys = Ring::new(["y1", "y2"]);
        let (y1, y2) = gens(&ys);
        let half = Scalar::new(1.into(), 2.into());
        let map = RingMap::new(&src, &ys, vec![(&y1 + &y2).scale(&half)]).unwrap();
        assert_eq!(x.substitute(&map).unwrap().to_string(), "1/2*y1 + 1/2*y2");

        let r = xy();
        let (a, b) = gens(&r);
        let e = (&a * &a - &b).try_div(&(&a + &r.int(3))).unwrap();
        assert_eq!(e.substitute(&RingMap::identity(&r)).unwrap(), e);
    }

    #[test]
    fn substitute_errors() {
        let src = Ring::new(["x"]);
        let tgt = xy();
        assert_eq!(
            RingMap::new(&src, &tgt, vec![]).unwrap_err(),
            RingError::ImageCount {
                expected: 1,
                got: 0
            }
        );
        let x = src.generator(0).unwrap();
        let inv = x.recip().unwrap();
        let map = RingMap::new(&src, &tgt, vec![tgt.zero()]).unwrap();
        assert_eq!(inv.substitute(&map), Err(RingError::ZeroDenominator));
    }

    #[test]
    fn normalize_examples() {
        let r = xy();
        let (x, _) = gens(&r);
        let n = normalize(&r, &x.scale(&Scalar::from_integer(2.into())), &r.int(4)).unwrap();
        assert_eq!(n, x.scale(&Scalar::new(1.into(), 2.into())));
        let one = r.one();
        let n = normalize(&r, &(&(&x * &x) - &one), &(&x - &one)).unwrap();
        assert_eq!(n, &x + &one);
        assert!(normalize(&r, &r.zero(), &x).unwrap().is_zero());
        assert_eq!(
            normalize(&r, &x, &r.zero()),
            Err(RingError::ZeroDenominator)
        );
    }

    #[test]
    fn non_unital_embedding() {
        // c ↦ (c, 0)
        let src = Ring::new(["x"]);
        let tgt = Ring::product(vec![vec!["x".into()], vec!["y".into()]]);
        let map = RingMap::with_units(
            &src,
            &tgt,
            vec![tgt.generator(0).unwrap()],
            vec![tgt.component_unit(0)],
        )
        .unwrap();
        let x = src.generator(0).unwrap();
        let e = (&x + &src.one()).recip().unwrap();
        assert_eq!(e.substitute(&map).unwrap().to_string(), "(1/(x + 1), 0)");
        assert_eq!(src.one().substitute(&map).unwrap().to_string(), "(1, 0)");
    }
}
