//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic over the generator order. The map never stores a zero
//! coefficient, so structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::Scalar;

/// Exponent vector. Ordered by total degree first, then lexicographically with
/// the first generator most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `self / other` if `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out.into_boxed_slice()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), Scalar::one());
        p
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(m.0.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from arbitrary `(exponents, coefficient)` pairs,
    /// merging duplicates and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial::from_exponents(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Constant coefficient when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_zero() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Scalar {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let (mut big, small) = if self.terms.len() >= other.terms.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Scalar) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Formal partial derivative with respect to generator `i`.
    pub fn partial(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut d = m.0.clone();
            d[i] -= 1;
            out.add_term(Monomial(d), c * Scalar::from_integer(e.into()));
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = rm.div(&lm)?;
            let c = rc / &lc;
            rem = rem.sub(&divisor.mul_term(&m, &c));
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Evaluates with one value per generator, using the caller's arithmetic.
    pub fn eval_with<T, FAdd, FMul, FConst>(
        &self,
        values: &[T],
        zero: T,
        konst: FConst,
        add: FAdd,
        mul: FMul,
    ) -> T
    where
        T: Clone,
        FConst: Fn(&Scalar) -> T,
        FAdd: Fn(&T, &T) -> T,
        FMul: Fn(&T, &T) -> T,
    {
        // cache powers per generator
        let mut powers: Vec<Vec<T>> = values.iter().map(|v| vec![v.clone()]).collect();
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut term = konst(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() < e as usize {
                    let next = mul(powers[i].last().expect("seeded"), &values[i]);
                    powers[i].push(next);
                }
                term = mul(&term, &powers[i][e as usize - 1]);
            }
            acc = add(&acc, &term);
        }
        acc
    }

    /// Re-embeds into a ring with `nvars` generators, placing this
    /// polynomial's generators starting at `offset`.
    pub fn embed(&self, offset: usize, nvars: usize) -> Poly {
        assert!(offset + self.nvars <= nvars);
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            e[offset..offset + self.nvars].copy_from_slice(&m.0);
            out.terms.insert(Monomial(e.into_boxed_slice()), c.clone());
        }
        out
    }

    /// Coefficients of powers of generator `v`; the coefficient polynomials
    /// do not involve `v`.
    pub(crate) fn to_univariate(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut coeffs = vec![Poly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut e = m.0.clone();
            e[v] = 0;
            coeffs[k].terms.insert(Monomial(e), c.clone());
        }
        coeffs
    }

    pub(crate) fn from_univariate(coeffs: &[Poly], v: usize, nvars: usize) -> Poly {
        let mut out = Poly::zero(nvars);
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                let mut e = m.0.clone();
                e[v] += k as u32;
                out.add_term(Monomial(e), c.clone());
            }
        }
        out
    }

    /// Integer square root of a polynomial, if one exists, with positive
    /// leading coefficient.
    pub fn sqrt(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading()?;
        if lc.is_negative() {
            return None;
        }
        let root_c = scalar_sqrt(lc)?;
        let mut half = Vec::with_capacity(self.nvars);
        for &e in lm.0.iter() {
            if e % 2 != 0 {
                return None;
            }
            half.push(e / 2);
        }
        let lead = Monomial(half.into_boxed_slice());
        let mut root = Poly::monomial(lead.clone(), root_c.clone());
        let two_lead_c = &root_c + &root_c;
        loop {
            let rem = self.sub(&root.mul(&root));
            let Some((rm, rc)) = rem.leading() else {
                return Some(root);
            };
            // every remaining term of the root is below `lead`, so the next one
            // is forced by the remainder's leading term
            let m = rm.div(&lead)?;
            if m >= lead {
                return None;
            }
            if let Some((smallest, _)) = root.terms.iter().next() {
                if &m >= smallest {
                    return None;
                }
            }
            root.add_term(m, rc / &two_lead_c);
        }
    }

    /// Canonical text with the given generator names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = monomial_text(m, names);
            if mono.is_empty() {
                write!(out, "{abs}").expect("string write");
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                write!(out, "{abs}*{mono}").expect("string write");
            }
        }
        out
    }
}

fn monomial_text(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Square root of a non-negative rational, if it is a rational square.
pub fn scalar_sqrt(c: &Scalar) -> Option<Scalar> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    if &(&n * &n) == c.numer() && &(&d * &d) == c.denom() {
        Some(Scalar::new(n, d))
    } else {
        None
    }
}
