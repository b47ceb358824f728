//! Multivariate gcd over ℚ by recursion on the generators: split off the
//! content with respect to the first generator in play, then run a primitive
//! pseudo-remainder sequence on the primitive parts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::Scalar;

/// Monic gcd of two polynomials. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let nvars = a.nvars();
    if a.is_constant() || b.is_constant() {
        return Poly::one(nvars);
    }
    if a == b {
        return a.monic();
    }
    let shared: Vec<usize> = (0..nvars)
        .filter(|&v| a.degree_in(v) > 0 && b.degree_in(v) > 0)
        .collect();
    if shared.iter().all(|&v| coprime_in(a, b, v)) {
        return Poly::one(nvars);
    }
    if let Some(h) = heuristic(a, b) {
        return h.monic();
    }
    let Some(v) = (0..nvars).find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0) else {
        return Poly::one(nvars);
    };

    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd(&ca, &cb);

    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let g = if pa.degree_in(v) == 0 || pb.degree_in(v) == 0 {
        Poly::one(nvars)
    } else {
        primitive_prs(pa, pb, v)
    };
    c.mul(&g).monic()
}

/// Bit budget for evaluation points before the heuristic gives up.
const HEURISTIC_BITS: u64 = 1 << 16;

/// gcd by evaluation at large integers and ξ-adic reconstruction, accepted
/// only after trial division. `None` sends the caller to the PRS.
fn heuristic(a: &Poly, b: &Poly) -> Option<Poly> {
    heu(&to_integer(a), &to_integer(b))
}

/// Integer multiple of `p` with coprime integer coefficients.
fn to_integer(p: &Poly) -> Poly {
    let l = p.terms().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let q = p.scale(&Scalar::from_integer(l));
    let c = int_content(&q);
    q.scale(&Scalar::from_integer(c).recip())
}

fn int_content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |g, (_, c)| g.gcd(c.numer()))
}

fn max_norm(p: &Poly) -> BigInt {
    p.terms()
        .map(|(_, c)| c.numer().abs())
        .max()
        .unwrap_or_default()
}

fn heu(a: &Poly, b: &Poly) -> Option<Poly> {
    let nvars = a.nvars();
    let ca = int_content(a);
    let cb = int_content(b);
    let c = ca.gcd(&cb);
    let Some(v) = (0..nvars)
        .rev()
        .find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0)
    else {
        return Some(Poly::constant(nvars, Scalar::from_integer(c)));
    };
    let a = a.scale(&Scalar::from_integer(ca).recip());
    let b = b.scale(&Scalar::from_integer(cb).recip());
    let deg = u64::from(a.degree_in(v).max(b.degree_in(v)));
    let mut xi: BigInt = 2 * max_norm(&a).min(max_norm(&b)) + 29;
    for _ in 0..6 {
        if xi.bits() * deg > HEURISTIC_BITS {
            return None;
        }
        let ea = eval_at(&a, v, &xi);
        let eb = eval_at(&b, v, &xi);
        if !ea.is_zero() && !eb.is_zero() {
            if let Some(h) = heu(&ea, &eb) {
                let cand = reconstruct(&h, v, &xi);
                if !cand.is_zero() {
                    let cand = primitive_signed(&cand);
                    if a.div_exact(&cand).is_some() && b.div_exact(&cand).is_some() {
                        return Some(cand.scale(&Scalar::from_integer(c)));
                    }
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    None
}

fn eval_at(p: &Poly, v: usize, xi: &BigInt) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms().map(|(m, c)| {
            let mut e = m.exponents().to_vec();
            let k = std::mem::take(&mut e[v]);
            (
                e,
                c * Scalar::from_integer(num_traits::pow(xi.clone(), k as usize)),
            )
        }),
    )
}

fn symmetric_mod(c: &BigInt, xi: &BigInt) -> BigInt {
    let r = c.mod_floor(xi);
    if &r * 2 > *xi {
        r - xi
    } else {
        r
    }
}

/// Reads the coefficients of `h` as balanced base-ξ digits in generator `v`.
fn reconstruct(h: &Poly, v: usize, xi: &BigInt) -> Poly {
    let nvars = h.nvars();
    let mut terms = Vec::new();
    let mut rest: Vec<(Vec<u32>, BigInt)> = h
        .terms()
        .map(|(m, c)| (m.exponents().to_vec(), c.numer().clone()))
        .collect();
    let mut power = 0u32;
    while !rest.is_empty() {
        let mut next = Vec::new();
        for (e, c) in rest {
            let d = symmetric_mod(&c, xi);
            let mut ev = e.clone();
            ev[v] = power;
            if !d.is_zero() {
                terms.push((ev, Scalar::from_integer(d.clone())));
            }
            let q = (c - d) / xi;
            if !q.is_zero() {
                next.push((e, q));
            }
        }
        rest = next;
        power += 1;
    }
    Poly::from_terms(nvars, terms)
}

fn primitive_signed(p: &Poly) -> Poly {
    let c = int_content(p);
    let c = if p.leading_coeff().is_negative() {
        -c
    } else {
        c
    };
    p.scale(&Scalar::from_integer(c).recip())
}

/// True when some specialization of the other generators keeps both degrees
/// in `v` and leaves coprime univariate images, which bounds the degree of
/// the gcd in `v` by zero.
fn coprime_in(a: &Poly, b: &Poly, v: usize) -> bool {
    for attempt in 0..3i64 {
        let point: Vec<Scalar> = (0..a.nvars())
            .map(|u| {
                let k = (2 + 3 * u as i64 + 5 * attempt) * if u % 2 == 0 { 1 } else { -1 };
                Scalar::from_integer(k.into())
            })
            .collect();
        let ua = specialize(a, v, &point);
        let ub = specialize(b, v, &point);
        if ua.len() != a.degree_in(v) as usize + 1 || ub.len() != b.degree_in(v) as usize + 1 {
            continue;
        }
        return univariate_gcd_degree(ua, ub) == 0;
    }
    false
}

/// Coefficients in `v`, low to high, with every other generator evaluated at
/// `point`; trailing zeros removed.
fn specialize(p: &Poly, v: usize, point: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (u, &e) in m.exponents().iter().enumerate() {
            if u != v && e > 0 {
                t *= num_traits::pow(point[u].clone(), e as usize);
            }
        }
        out[m.exponents()[v] as usize] += t;
    }
    while out.len() > 1 && out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    out
}

fn univariate_gcd_degree(mut a: Vec<Scalar>, mut b: Vec<Scalar>) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 && b[0].is_zero() {
            return a.len() - 1;
        }
        if b.len() == 1 {
            return 0;
        }
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() {
            let q = a.last().unwrap().clone() / &lb;
            let shift = a.len() - b.len();
            for (k, bk) in b.iter().enumerate() {
                a[k + shift] -= &q * bk;
            }
            a.pop();
            while a.len() > 1 && a.last().is_some_and(Zero::is_zero) {
                a.pop();
            }
            if a.len() == 1 && a[0].is_zero() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// gcd of the coefficients of a univariate view.
fn content(coeffs: &[Poly]) -> Poly {
    let mut acc = Poly::zero(coeffs.first().map(Poly::nvars).unwrap_or(0));
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        acc = gcd(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn primitive_part(p: &Poly, v: usize) -> Poly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content(&p.to_univariate(v));
    p.div_exact(&c).expect("content divides").monic()
}

fn primitive_prs(a: Poly, b: Poly, v: usize) -> Poly {
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            return primitive_part(&b, v);
        }
        if r.degree_in(v) == 0 {
            return Poly::one(a.nvars());
        }
        a = b;
        b = primitive_part(&r, v);
    }
}

/// Pseudo-remainder of `a` by `b` as polynomials in generator `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let nvars = a.nvars();
    let ub = b.to_univariate(v);
    let db = ub.len() - 1;
    let lcb = &ub[db];
    let mut r = a.to_univariate(v);
    while r.len() > db && !r.iter().all(Poly::is_zero) {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(lcb)).collect();
        for (k, bk) in ub.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&lcr.mul(bk));
        }
        while next.len() > 1 && next.last().is_some_and(Poly::is_zero) {
            next.pop();
        }
        if next.len() == 1 && next[0].is_zero() {
            return Poly::zero(nvars);
        }
        r = next;
    }
    Poly::from_univariate(&r, v, nvars)
}
