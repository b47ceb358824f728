//! Random instances for experiments and property checks.
//!
//! Structures are drawn from families that satisfy the Jacobi identity by
//! construction: any bracket in two generators, and the Nambu form
//! `{x^i, x^j} = ε_ijk ∂_k C` in three.

use std::sync::Arc;

use rand::Rng;

use crate::kp::{KPAlgebra, Metric};
use crate::morphism::{pullback_metric, Hom};
use crate::poisson::PoissonStructure;
use crate::ring::{Matrix, Ring, RingElem, RingMap, Scalar};

fn small_scalar<R: Rng>(rng: &mut R) -> Scalar {
    let n: i64 = rng.gen_range(-3..=3);
    let d: i64 = if rng.gen_bool(0.2) { 2 } else { 1 };
    Scalar::new(n.into(), d.into())
}

fn nonzero_scalar<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let s = small_scalar(rng);
        if s != Scalar::from_integer(0.into()) {
            return s;
        }
    }
}

/// Polynomial with at most `terms` terms, each of total degree `≤ degree`.
pub fn poly<R: Rng>(rng: &mut R, ring: &Arc<Ring>, degree: u32, terms: usize) -> RingElem {
    let gens = ring.generators();
    let mut acc = ring.zero();
    for _ in 0..terms {
        let mut t = ring.constant(nonzero_scalar(rng));
        let mut budget = rng.gen_range(0..=degree);
        while budget > 0 && !gens.is_empty() {
            t = t * &gens[rng.gen_range(0..gens.len())];
            budget -= 1;
        }
        acc = acc + t;
    }
    acc
}

/// Nonzero polynomial.
pub fn nonzero_poly<R: Rng>(rng: &mut R, ring: &Arc<Ring>, degree: u32, terms: usize) -> RingElem {
    loop {
        let p = poly(rng, ring, degree, terms.max(1));
        if !p.is_zero() {
            return p;
        }
    }
}

/// Polynomial, or with probability ¼ a quotient by `1 + q` for a random `q`.
pub fn element<R: Rng>(rng: &mut R, ring: &Arc<Ring>, degree: u32) -> RingElem {
    let p = poly(rng, ring, degree, 3);
    if rng.gen_bool(0.25) {
        let d = ring.one() + poly(rng, ring, degree.min(1), 2);
        if let Ok(q) = p.try_div(&d) {
            return q;
        }
    }
    p
}

/// Symmetric matrix with small rational entries and nonzero determinant.
pub fn scalar_metric<R: Rng>(rng: &mut R, ring: &Arc<Ring>) -> Metric {
    let m = ring.num_generators();
    loop {
        let mut g = Matrix::zeros(ring, m, m);
        for i in 0..m {
            for j in i..m {
                let v = ring.constant(small_scalar(rng));
                g.set(i, j, v.clone());
                g.set(j, i, v);
            }
        }
        if !g.det().map(|d| d.is_zero()).unwrap_or(true) {
            return Metric::new(g).expect("symmetric by construction");
        }
    }
}

/// `Mᵀ M` for a random nonsingular scalar `M`, so `det` is a nonzero square.
pub fn square_det_metric<R: Rng>(rng: &mut R, ring: &Arc<Ring>) -> Metric {
    let m = ring.num_generators();
    loop {
        let a = Matrix::from_fn(ring, m, m, |_, _| ring.constant(small_scalar(rng)));
        if a.det().map(|d| d.is_zero()).unwrap_or(true) {
            continue;
        }
        let g = a.transpose().mul(&a).expect("square");
        return Metric::new(g).expect("symmetric by construction");
    }
}

/// Random Poisson structure: zero for one generator, an arbitrary bracket of
/// degree `≤ degree` for two, and a Nambu structure with entries of degree
/// `≤ degree` for three. Always nonzero when `m ≥ 2`.
pub fn structure<R: Rng>(rng: &mut R, ring: &Arc<Ring>, degree: u32) -> PoissonStructure {
    match ring.num_generators() {
        2 => {
            let p = nonzero_poly(rng, ring, degree, 3);
            PoissonStructure::from_brackets(ring, &[(0, 1, p)]).expect("two generators")
        }
        3 => loop {
            let c = poly(rng, ring, degree + 1, 3);
            let d: Vec<RingElem> = (0..3).map(|k| c.partial(k).expect("index")).collect();
            if d.iter().all(RingElem::is_zero) {
                continue;
            }
            let b = [
                (0, 1, d[2].clone()),
                (1, 2, d[0].clone()),
                (2, 0, d[1].clone()),
            ];
            break PoissonStructure::from_brackets(ring, &b)
                .expect("Nambu brackets satisfy Jacobi");
        },
        _ => PoissonStructure::zero(ring),
    }
}

fn names(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("{prefix}{i}")).collect()
}

/// Verified Kähler–Poisson algebra on `m ≤ 3` generators named
/// `{prefix}1, …` with a scalar metric.
pub fn kp_algebra<R: Rng>(rng: &mut R, prefix: &str, m: usize, degree: u32) -> KPAlgebra {
    let ring = Ring::new(names(prefix, m));
    loop {
        let s = structure(rng, &ring, degree);
        let g = scalar_metric(rng, &ring);
        if let Ok(k) = KPAlgebra::solved(s, g) {
            return k;
        }
    }
}

/// Verified algebra whose η is a perfect square: two generators with a
/// `Mᵀ M` metric, so `η = (p·det M)⁻²`; or one generator, where η = 1.
pub fn square_eta_algebra<R: Rng>(rng: &mut R, prefix: &str, m: usize, degree: u32) -> KPAlgebra {
    let ring = Ring::new(names(prefix, m));
    let s = structure(rng, &ring, degree);
    let g = square_det_metric(rng, &ring);
    KPAlgebra::solved(s, g).expect("two generators always admit eta")
}

/// Triangular change of generators `x1 ↦ y1 + q(y2)`, `x2 ↦ c·y2 + d` from a
/// two-generator algebra to the transported algebra on `{prefix}1, {prefix}2`.
/// The inverse is polynomial, the target bracket is `φ({ψ(y^α), ψ(y^β)})`
/// and the target metric is the pullback `Aᵀ φ(g) A`, so the map is an
/// isomorphism of Kähler–Poisson algebras.
pub fn triangular_iso<R: Rng>(rng: &mut R, source: Arc<KPAlgebra>, prefix: &str) -> Hom {
    assert_eq!(source.dim(), 2, "triangular changes are two-dimensional");
    let src = source.ring().clone();
    let tgt = Ring::new(names(prefix, 2));
    let (y1, y2) = (tgt.generator(0).unwrap(), tgt.generator(1).unwrap());
    let (x1, x2) = (src.generator(0).unwrap(), src.generator(1).unwrap());

    let y2_only = Ring::new(["t"]);
    let q = poly(rng, &y2_only, 2, 2);
    let c = nonzero_scalar(rng);
    let d = small_scalar(rng);
    let at = |v: &RingElem, ring: &Arc<Ring>| {
        RingMap::new(&y2_only, ring, vec![v.clone()])
            .unwrap()
            .apply(&q)
            .unwrap()
    };

    let forward = vec![
        &y1 + &at(&y2, &tgt),
        &y2.scale(&c) + &tgt.constant(d.clone()),
    ];
    let back_y2 = (&x2 - &src.constant(d)).scale(&(Scalar::from_integer(1.into()) / &c));
    let backward = vec![&x1 - &at(&back_y2, &src), back_y2];

    let phi = RingMap::new(&src, &tgt, forward.clone()).unwrap();
    let s = source.structure();
    let p_t = phi
        .apply(&s.bracket(&backward[0], &backward[1]).unwrap())
        .unwrap();
    let ts = PoissonStructure::from_brackets(&tgt, &[(0, 1, p_t)]).unwrap();
    let placeholder = Arc::new(KPAlgebra::raw(ts.clone(), Metric::identity(&tgt), None).unwrap());
    let pre = Hom::new(source.clone(), placeholder, forward.clone()).unwrap();
    let h = Metric::new(pullback_metric(&pre).unwrap()).unwrap();
    let target = Arc::new(KPAlgebra::solved(ts, h).expect("transported algebra admits eta"));
    Hom::new(source, target, forward)
        .unwrap()
        .with_inverse(backward)
        .unwrap()
}
