//! Reduced rational functions over ℚ.

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::Poly;
use super::Scalar;

/// `num / den` with `gcd(num, den) = 1` and `den` monic. A polynomial has
/// `den = 1`, and zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Reduces `num / den` to canonical form. `None` when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(Self::zero(num.nvars()));
        }
        if let Some(c) = den.as_constant() {
            return Some(RatFunc {
                num: num.scale(&c.recip()),
                den: Poly::one(num.nvars()),
            });
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            Some(RatFunc { num, den })
        } else {
            let inv = lc.recip();
            Some(RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            })
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        let nvars = p.nvars();
        RatFunc {
            num: p,
            den: Poly::one(nvars),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Poly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::from_poly(Poly::constant(nvars, c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return Self::from_poly(num);
            }
            return Self::new(num, self.den.clone()).expect("nonzero denominator");
        }
        let g = gcd(&self.den, &other.den);
        let d1 = self.den.div_exact(&g).expect("gcd divides");
        let d2 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d2).add(&other.num.mul(&d1));
        if num.is_zero() {
            return Self::zero(self.nvars());
        }
        let g2 = gcd(&num, &g);
        let num = num.div_exact(&g2).expect("gcd divides");
        let den = d1.mul(&other.den.div_exact(&g2).expect("gcd divides"));
        let inv = den.leading_coeff().recip();
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.nvars());
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // cross-cancel before multiplying so the final gcd stays small
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        let lc = den.leading_coeff();
        let inv = lc.recip();
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn recip(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&other.recip()?))
    }

    pub fn scale(&self, c: &Scalar) -> RatFunc {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i32) -> Option<RatFunc> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let e = e as u32;
        Some(RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        })
    }

    /// Quotient rule: `(den·∂num − num·∂den) / den²`.
    pub fn partial(&self, i: usize) -> RatFunc {
        if self.den.is_one() {
            return Self::from_poly(self.num.partial(i));
        }
        let dn = self.num.partial(i);
        let dd = self.den.partial(i);
        if dd.is_zero() {
            return Self::new(dn, self.den.clone()).expect("nonzero denominator");
        }
        let num = self.den.mul(&dn).sub(&self.num.mul(&dd));
        Self::new(num, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn embed(&self, offset: usize, nvars: usize) -> RatFunc {
        RatFunc {
            num: self.num.embed(offset, nvars),
            den: self.den.embed(offset, nvars),
        }
    }

    /// Square root with positive leading numerator coefficient, if one exists
    /// in the field of rational functions.
    pub fn sqrt(&self) -> Option<RatFunc> {
        // den is monic, so a root's denominator is the monic root of den
        let den_root = self.den.sqrt()?;
        let num_root = self.num.sqrt()?;
        Some(RatFunc {
            num: num_root,
            den: den_root,
        })
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let num = self.num.to_string_with(names);
        if self.den.is_one() {
            return num;
        }
        let num = if self.num.num_terms() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = self.den.to_string_with(names);
        let den = if self.den.num_terms() == 1 && is_single_power(&self.den) {
            den
        } else {
            format!("({den})")
        };
        format!("{num}/{den}")
    }
}

fn is_single_power(p: &Poly) -> bool {
    p.terms()
        .all(|(m, c)| c.is_one() && m.exponents().iter().filter(|&&e| e > 0).count() <= 1)
}
