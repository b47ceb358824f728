use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::{RingError, Scalar};

/// A base ring: a finite product of rational function fields, each over its
/// own list of generators. A plain ring has one component.
///
/// Generators are numbered globally across components in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    components: Vec<Vec<String>>,
}

impl Ring {
    pub fn new<S: Into<String>>(generators: impl IntoIterator<Item = S>) -> Arc<Ring> {
        Arc::new(Ring {
            components: vec![generators.into_iter().map(Into::into).collect()],
        })
    }

    pub fn product(components: Vec<Vec<String>>) -> Arc<Ring> {
        assert!(
            !components.is_empty(),
            "a ring needs at least one component"
        );
        Arc::new(Ring { components })
    }

    pub fn components(&self) -> &[Vec<String>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_product(&self) -> bool {
        self.components.len() > 1
    }

    pub fn num_generators(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn generator_names(&self) -> impl Iterator<Item = &str> {
        self.components.iter().flatten().map(String::as_str)
    }

    pub fn generator_name(&self, i: usize) -> Option<&str> {
        self.generator_names().nth(i)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generator_names().position(|n| n == name)
    }

    /// Component and local index of global generator `i`.
    pub fn locate(&self, mut i: usize) -> Option<(usize, usize)> {
        for (c, gens) in self.components.iter().enumerate() {
            if i < gens.len() {
                return Some((c, i));
            }
            i -= gens.len();
        }
        None
    }

    /// Global index of the first generator of component `c`.
    pub fn offset(&self, c: usize) -> usize {
        self.components[..c].iter().map(Vec::len).sum()
    }

    pub fn zero(self: &Arc<Self>) -> RingElem {
        self.constant(Scalar::zero())
    }

    pub fn one(self: &Arc<Self>) -> RingElem {
        self.constant(Scalar::from_integer(1.into()))
    }

    pub fn int(self: &Arc<Self>, n: i64) -> RingElem {
        self.constant(Scalar::from_integer(n.into()))
    }

    pub fn constant(self: &Arc<Self>, c: Scalar) -> RingElem {
        RingElem {
            ring: self.clone(),
            parts: self
                .components
                .iter()
                .map(|g| RatFunc::constant(g.len(), c.clone()))
                .collect(),
        }
    }

    /// The generator with global index `i`; in a product ring it is zero in
    /// every other component.
    pub fn generator(self: &Arc<Self>, i: usize) -> Result<RingElem, RingError> {
        let (c, local) = self.locate(i).ok_or(RingError::IndexOutOfRange {
            index: i,
            count: self.num_generators(),
        })?;
        let mut e = self.zero();
        e.parts[c] = RatFunc::from_poly(Poly::var(self.components[c].len(), local));
        Ok(e)
    }

    pub fn generators(self: &Arc<Self>) -> Vec<RingElem> {
        (0..self.num_generators())
            .map(|i| self.generator(i).expect("index in range"))
            .collect()
    }

    /// The idempotent that is one on component `c` and zero elsewhere.
    pub fn component_unit(self: &Arc<Self>, c: usize) -> RingElem {
        let mut e = self.zero();
        e.parts[c] = RatFunc::one(self.components[c].len());
        e
    }

    /// Element with the given per-component values.
    pub fn element(self: &Arc<Self>, parts: Vec<RatFunc>) -> Result<RingElem, RingError> {
        if parts.len() != self.components.len()
            || parts
                .iter()
                .zip(&self.components)
                .any(|(p, g)| p.nvars() != g.len())
        {
            return Err(RingError::ComponentShape);
        }
        Ok(RingElem {
            ring: self.clone(),
            parts,
        })
    }

    /// Lifts a plain element of a single component ring into component `c`
    /// of this product ring, zero elsewhere.
    pub fn lift(self: &Arc<Self>, c: usize, part: RatFunc) -> RingElem {
        let mut e = self.zero();
        assert_eq!(part.nvars(), self.components[c].len());
        e.parts[c] = part;
        e
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self.components.iter().map(|g| g.join(", ")).collect();
        write!(f, "[{}]", comps.join(" | "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Exact element of a [`Ring`]: one reduced rational function per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    ring: Arc<Ring>,
    parts: Vec<RatFunc>,
}

impl RingElem {
    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn parts(&self) -> &[RatFunc] {
        &self.parts
    }

    pub fn part(&self, c: usize) -> &RatFunc {
        &self.parts[c]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(RatFunc::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.parts.iter().all(RatFunc::is_one)
    }

    /// True when some component vanishes (the element is a zero divisor or zero).
    pub fn has_zero_component(&self) -> bool {
        self.parts.iter().any(RatFunc::is_zero)
    }

    /// True when every component is a polynomial.
    pub fn is_poly(&self) -> bool {
        self.parts.iter().all(RatFunc::is_poly)
    }

    pub fn same_ring(&self, other: &RingElem) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring
    }

    fn check_ring(&self, other: &RingElem) -> Result<(), RingError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(RingError::RingMismatch {
                left: self.ring.to_string(),
                right: other.ring.to_string(),
            })
        }
    }

    fn zip(&self, other: &RingElem, f: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> RingElem {
        RingElem {
            ring: self.ring.clone(),
            parts: self
                .parts
                .iter()
                .zip(&other.parts)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn arith(op: ArithOp, a: &RingElem, b: &RingElem) -> Result<RingElem, RingError> {
        a.check_ring(b)?;
        Ok(match op {
            ArithOp::Add => a.zip(b, RatFunc::add),
            ArithOp::Sub => a.zip(b, RatFunc::sub),
            ArithOp::Mul => a.zip(b, RatFunc::mul),
            ArithOp::Div => {
                if b.has_zero_component() {
                    return Err(RingError::DivisionByZero);
                }
                a.zip(b, |x, y| x.div(y).expect("nonzero divisor"))
            }
        })
    }

    pub fn try_add(&self, other: &RingElem) -> Result<RingElem, RingError> {
        Self::arith(ArithOp::Add, self, other)
    }

    pub fn try_sub(&self, other: &RingElem) -> Result<RingElem, RingError> {
        Self::arith(ArithOp::Sub, self, other)
    }

    pub fn try_mul(&self, other: &RingElem) -> Result<RingElem, RingError> {
        Self::arith(ArithOp::Mul, self, other)
    }

    pub fn try_div(&self, other: &RingElem) -> Result<RingElem, RingError> {
        Self::arith(ArithOp::Div, self, other)
    }

    pub fn recip(&self) -> Result<RingElem, RingError> {
        self.ring.one().try_div(self)
    }

    pub fn pow(&self, e: i32) -> Result<RingElem, RingError> {
        let parts = self
            .parts
            .iter()
            .map(|p| p.pow(e).ok_or(RingError::DivisionByZero))
            .collect::<Result<_, _>>()?;
        Ok(RingElem {
            ring: self.ring.clone(),
            parts,
        })
    }

    pub fn scale(&self, c: &Scalar) -> RingElem {
        RingElem {
            ring: self.ring.clone(),
            parts: self.parts.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Formal partial derivative with respect to global generator `i`.
    pub fn partial(&self, i: usize) -> Result<RingElem, RingError> {
        let (c, local) = self.ring.locate(i).ok_or(RingError::IndexOutOfRange {
            index: i,
            count: self.ring.num_generators(),
        })?;
        let mut out = self.ring.zero();
        out.parts[c] = self.parts[c].partial(local);
        Ok(out)
    }

    /// The scalar value when every component is the same constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        let first = self.parts.first()?.as_constant()?;
        self.parts
            .iter()
            .skip(1)
            .all(|p| p.as_constant().as_ref() == Some(&first))
            .then_some(first)
    }

    /// Square root of a single-component element, choosing the root whose
    /// numerator has a positive leading coefficient.
    pub fn sqrt(&self) -> Option<RingElem> {
        if self.ring.is_product() {
            return None;
        }
        let root = self.parts[0].sqrt()?;
        Some(RingElem {
            ring: self.ring.clone(),
            parts: vec![root],
        })
    }

    pub fn substitute(&self, map: &RingMap) -> Result<RingElem, RingError> {
        map.apply(self)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let texts: Vec<String> = self
            .parts
            .iter()
            .zip(self.ring.components())
            .map(|(p, names)| p.to_string_with(names))
            .collect();
        if texts.len() == 1 {
            f.write_str(&texts[0])
        } else {
            write!(f, "({})", texts.join(", "))
        }
    }
}

// Operator forms panic on ring mismatch; use `arith`/`try_*` at API boundaries.
macro_rules! binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl $trait<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &RingElem) -> RingElem {
                RingElem::arith($op, self, rhs).expect("ring arithmetic")
            }
        }
        impl $trait<RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: RingElem) -> RingElem {
                RingElem::arith($op, &self, &rhs).expect("ring arithmetic")
            }
        }
        impl $trait<&RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &RingElem) -> RingElem {
                RingElem::arith($op, &self, rhs).expect("ring arithmetic")
            }
        }
    };
}

binop!(Add, add, ArithOp::Add);
binop!(Sub, sub, ArithOp::Sub);
binop!(Mul, mul, ArithOp::Mul);

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            ring: self.ring.clone(),
            parts: self.parts.iter().map(RatFunc::neg).collect(),
        }
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

/// A ring map given by generator images. `units[c]` is the image of the unit
/// of source component `c`; it must be an idempotent of the target, i.e. each
/// of its components is 0 or 1. For a plain source the default unit image is
/// the target's one, which makes the map unital.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMap {
    source: Arc<Ring>,
    target: Arc<Ring>,
    images: Vec<RingElem>,
    units: Vec<RingElem>,
}

impl RingMap {
    /// Map with default unit images: the target's one for a plain source, and
    /// the matching component idempotents when source and target have the
    /// same component layout.
    pub fn new(
        source: &Arc<Ring>,
        target: &Arc<Ring>,
        images: Vec<RingElem>,
    ) -> Result<RingMap, RingError> {
        let units = if !source.is_product() {
            vec![target.one()]
        } else if source.num_components() == target.num_components() {
            (0..source.num_components())
                .map(|c| target.component_unit(c))
                .collect()
        } else {
            return Err(RingError::InvalidUnit(
                "a product source needs explicit unit images".into(),
            ));
        };
        Self::with_units(source, target, images, units)
    }

    pub fn with_units(
        source: &Arc<Ring>,
        target: &Arc<Ring>,
        images: Vec<RingElem>,
        units: Vec<RingElem>,
    ) -> Result<RingMap, RingError> {
        if images.len() != source.num_generators() {
            return Err(RingError::ImageCount {
                expected: source.num_generators(),
                got: images.len(),
            });
        }
        if units.len() != source.num_components() {
            return Err(RingError::InvalidUnit(format!(
                "expected {} unit images, got {}",
                source.num_components(),
                units.len()
            )));
        }
        for e in images.iter().chain(&units) {
            if **e.ring() != **target {
                return Err(RingError::RingMismatch {
                    left: target.to_string(),
                    right: e.ring().to_string(),
                });
            }
        }
        for u in &units {
            if !u.parts().iter().all(|p| p.is_zero() || p.is_one()) {
                return Err(RingError::InvalidUnit(format!("{u} is not an idempotent")));
            }
        }
        Ok(RingMap {
            source: source.clone(),
            target: target.clone(),
            images,
            units,
        })
    }

    pub fn identity(ring: &Arc<Ring>) -> RingMap {
        Self::new(ring, ring, ring.generators()).expect("identity map")
    }

    pub fn source(&self) -> &Arc<Ring> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Ring> {
        &self.target
    }

    pub fn images(&self) -> &[RingElem] {
        &self.images
    }

    pub fn units(&self) -> &[RingElem] {
        &self.units
    }

    /// Applies the map: each source component is evaluated at its generators'
    /// images on every target component where that component's unit lands.
    pub fn apply(&self, a: &RingElem) -> Result<RingElem, RingError> {
        if **a.ring() != *self.source {
            return Err(RingError::RingMismatch {
                left: self.source.to_string(),
                right: a.ring().to_string(),
            });
        }
        let mut out = self.target.zero();
        for (c, part) in a.parts().iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            let offset = self.source.offset(c);
            let n = self.source.components()[c].len();
            let unit = &self.units[c];
            for (t, live) in unit.parts().iter().enumerate() {
                if live.is_zero() {
                    continue;
                }
                let values: Vec<&RatFunc> = self.images[offset..offset + n]
                    .iter()
                    .map(|e| e.part(t))
                    .collect();
                let nv = self.target.components()[t].len();
                let num = eval_poly(part.num(), &values, nv);
                let den = eval_poly(part.den(), &values, nv);
                let v = num.div(&den).ok_or(RingError::ZeroDenominator)?;
                out.parts[t] = out.parts[t].add(&v);
            }
        }
        Ok(out)
    }

    /// `other ∘ self`: first this map, then `other`.
    pub fn then(&self, other: &RingMap) -> Result<RingMap, RingError> {
        if *self.target != *other.source {
            return Err(RingError::RingMismatch {
                left: self.target.to_string(),
                right: other.source.to_string(),
            });
        }
        let images = self
            .images
            .iter()
            .map(|e| other.apply(e))
            .collect::<Result<_, _>>()?;
        let units = self
            .units
            .iter()
            .map(|e| other.apply(e))
            .collect::<Result<_, _>>()?;
        RingMap::with_units(&self.source, &other.target, images, units)
    }
}

fn eval_poly(p: &Poly, values: &[&RatFunc], nvars: usize) -> RatFunc {
    let owned: Vec<RatFunc> = values.iter().map(|v| (*v).clone()).collect();
    p.eval_with(
        &owned,
        RatFunc::zero(nvars),
        |c| RatFunc::constant(nvars, c.clone()),
        RatFunc::add,
        RatFunc::mul,
    )
}
