//! Direct sums, tensor products and subalgebras.
//!
//! A direct sum lives in the product ring of the two factors, whose elements
//! are pairs `(a, a')`. A tensor product of two algebras over free generators
//! is realized as the single ring on the disjoint union of the generators.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::kp::{verify_kp, KPAlgebra, KpError, Metric};
use crate::morphism::{check_poisson_hom, metric_condition, Hom, MorphismError};
use crate::poisson::{PoissonError, PoissonStructure};
use crate::ring::{Matrix, Ring, RingElem, RingError, RingMap};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("{} factor is not a verified Kähler–Poisson algebra: {reason}", side.name())]
    Unverified { side: Side, reason: String },
    #[error("no square root of eta = {eta} in the {} factor", side.name())]
    NoSquareRoot { side: Side, eta: String },
    #[error("rho^2 differs from eta in the {} factor", side.name())]
    RhoMismatch { side: Side },
    #[error("tensor products need factors over a single ring, not a product")]
    ProductFactor,
    #[error("inclusion is not valid: {0}")]
    Inclusion(String),
    #[error("inclusion does not preserve brackets {0}")]
    NotPoissonSubalgebra(Witness),
    #[error(transparent)]
    Kp(#[from] KpError),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn require_verified(k: &KPAlgebra, side: Side) -> Result<(), ConstructionError> {
    let unverified = |reason: String| ConstructionError::Unverified { side, reason };
    match verify_kp(k) {
        Ok(Verdict::Pass) => Ok(()),
        Ok(Verdict::Fail(w)) => Err(unverified(format!("condition fails {w}"))),
        Err(e) => Err(unverified(e.to_string())),
    }
}

/// Renames right-hand names that clash with the left by appending `_2`,
/// `_3`, ... until unique.
pub fn disjoint_names(left: &[String], right: &[String]) -> Vec<String> {
    let mut taken: HashSet<String> = left.iter().cloned().collect();
    right
        .iter()
        .map(|n| {
            let mut name = n.clone();
            let mut k = 2;
            while taken.contains(&name) {
                name = format!("{n}_{k}");
                k += 1;
            }
            taken.insert(name.clone());
            name
        })
        .collect()
}

fn block_diag(ring: &Arc<Ring>, a: &Matrix, b: &Matrix) -> Matrix {
    let (m, n) = (a.rows(), b.rows());
    Matrix::from_fn(ring, m + n, m + n, |i, j| match (i < m, j < m) {
        (true, true) => a.get(i, j).clone(),
        (false, false) => b.get(i - m, j - m).clone(),
        _ => ring.zero(),
    })
}

fn structure_like(p: Matrix, assumed: bool) -> Result<PoissonStructure, PoissonError> {
    if assumed {
        PoissonStructure::assume_poisson(p)
    } else {
        PoissonStructure::new(p)
    }
}

/// Two verified factors of a direct sum.
#[derive(Clone, Debug)]
pub struct SumSpec {
    left: Arc<KPAlgebra>,
    right: Arc<KPAlgebra>,
}

impl SumSpec {
    pub fn new(left: Arc<KPAlgebra>, right: Arc<KPAlgebra>) -> Result<Self, ConstructionError> {
        require_verified(&left, Side::Left)?;
        require_verified(&right, Side::Right)?;
        Ok(SumSpec { left, right })
    }
}

/// `K ⊕ K'` together with its factors and their embeddings `c ↦ (c, 0)` and
/// `c' ↦ (0, c')`.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub algebra: Arc<KPAlgebra>,
    pub left: Arc<KPAlgebra>,
    pub right: Arc<KPAlgebra>,
    left_map: RingMap,
    right_map: RingMap,
}

impl DirectSum {
    pub fn factor(&self, side: Side) -> &Arc<KPAlgebra> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn embedding_map(&self, side: Side) -> &RingMap {
        match side {
            Side::Left => &self.left_map,
            Side::Right => &self.right_map,
        }
    }
}

fn factor_embedding(
    factor: &Arc<Ring>,
    sum: &Arc<Ring>,
    first_component: usize,
) -> Result<RingMap, RingError> {
    let offset = sum.offset(first_component);
    let images = (0..factor.num_generators())
        .map(|i| sum.generator(offset + i))
        .collect::<Result<_, _>>()?;
    let units = (0..factor.num_components())
        .map(|c| sum.component_unit(first_component + c))
        .collect();
    RingMap::with_units(factor, sum, images, units)
}

/// Block-diagonal structure and metric on the product ring, `η = (η₁, η₂)`.
pub fn direct_sum(spec: &SumSpec) -> Result<DirectSum, ConstructionError> {
    let (l, r) = (&spec.left, &spec.right);
    let left_names: Vec<String> = l.ring().generator_names().map(String::from).collect();
    let right_names: Vec<String> = r.ring().generator_names().map(String::from).collect();
    let renamed = disjoint_names(&left_names, &right_names);
    let mut comps: Vec<Vec<String>> = l.ring().components().to_vec();
    let mut it = renamed.into_iter();
    for c in r.ring().components() {
        comps.push(it.by_ref().take(c.len()).collect());
    }
    let ring = Ring::product(comps);
    let left_map = factor_embedding(l.ring(), &ring, 0)?;
    let right_map = factor_embedding(r.ring(), &ring, l.ring().num_components())?;

    let p = block_diag(&ring, &l.p().map(&left_map)?, &r.p().map(&right_map)?);
    let g = block_diag(&ring, &l.g().map(&left_map)?, &r.g().map(&right_map)?);
    let eta = left_map.apply(l.require_eta()?)? + right_map.apply(r.require_eta()?)?;
    let assumed = l.structure().jacobi_assumed() || r.structure().jacobi_assumed();
    let algebra = KPAlgebra::certified(structure_like(p, assumed)?, Metric::new(g)?, eta)?;
    Ok(DirectSum {
        algebra: Arc::new(algebra),
        left: l.clone(),
        right: r.clone(),
        left_map,
        right_map,
    })
}

/// The embedding of one factor into the sum, as a morphism.
pub fn embed_factor(sum: &DirectSum, side: Side) -> Result<Hom, ConstructionError> {
    Ok(Hom::from_map(
        sum.factor(side).clone(),
        sum.algebra.clone(),
        sum.embedding_map(side).clone(),
    )?)
}

/// Square root with positive leading numerator coefficient, if one exists.
pub fn sqrt_ratfunc(f: &RingElem) -> Option<RingElem> {
    f.sqrt()
}

/// Two verified factors with square roots `ρ² = η`, `ρ'² = η'`.
#[derive(Clone, Debug)]
pub struct TensorSpec {
    left: Arc<KPAlgebra>,
    right: Arc<KPAlgebra>,
    rho_left: RingElem,
    rho_right: RingElem,
}

impl TensorSpec {
    /// Extracts both roots with [`sqrt_ratfunc`].
    pub fn new(left: Arc<KPAlgebra>, right: Arc<KPAlgebra>) -> Result<Self, ConstructionError> {
        let root = |k: &KPAlgebra, side| -> Result<RingElem, ConstructionError> {
            let eta = k.require_eta()?;
            sqrt_ratfunc(eta).ok_or(ConstructionError::NoSquareRoot {
                side,
                eta: eta.to_string(),
            })
        };
        let rho_left = root(&left, Side::Left)?;
        let rho_right = root(&right, Side::Right)?;
        Self::with_roots(left, right, rho_left, rho_right)
    }

    pub fn with_roots(
        left: Arc<KPAlgebra>,
        right: Arc<KPAlgebra>,
        rho_left: RingElem,
        rho_right: RingElem,
    ) -> Result<Self, ConstructionError> {
        for (k, rho, side) in [
            (&left, &rho_left, Side::Left),
            (&right, &rho_right, Side::Right),
        ] {
            if k.ring().is_product() {
                return Err(ConstructionError::ProductFactor);
            }
            require_verified(k, side)?;
            if rho.try_mul(rho)? != *k.require_eta()? {
                return Err(ConstructionError::RhoMismatch { side });
            }
        }
        Ok(TensorSpec {
            left,
            right,
            rho_left,
            rho_right,
        })
    }

    pub fn rho(&self, side: Side) -> &RingElem {
        match side {
            Side::Left => &self.rho_left,
            Side::Right => &self.rho_right,
        }
    }
}

/// `K ⊗ K'` on the union of generators: block-diagonal structure, metric
/// blocks `ρ·g` and `ρ'·g'`, and `η = 1`.
pub fn tensor_product(spec: &TensorSpec) -> Result<KPAlgebra, ConstructionError> {
    let (l, r) = (&spec.left, &spec.right);
    let left_names: Vec<String> = l.ring().generator_names().map(String::from).collect();
    let right_names: Vec<String> = r.ring().generator_names().map(String::from).collect();
    let mut names = left_names.clone();
    names.extend(disjoint_names(&left_names, &right_names));
    let ring = Ring::new(names);
    let m = l.dim();
    let lm = RingMap::new(
        l.ring(),
        &ring,
        (0..m)
            .map(|i| ring.generator(i))
            .collect::<Result<_, _>>()?,
    )?;
    let rm = RingMap::new(
        r.ring(),
        &ring,
        (0..r.dim())
            .map(|i| ring.generator(m + i))
            .collect::<Result<_, _>>()?,
    )?;
    let p = block_diag(&ring, &l.p().map(&lm)?, &r.p().map(&rm)?);
    let gl = l.g().map(&lm)?.scale(&lm.apply(&spec.rho_left)?);
    let gr = r.g().map(&rm)?.scale(&rm.apply(&spec.rho_right)?);
    let g = block_diag(&ring, &gl, &gr);
    let assumed = l.structure().jacobi_assumed() || r.structure().jacobi_assumed();
    Ok(KPAlgebra::certified(
        structure_like(p, assumed)?,
        Metric::new(g)?,
        ring.one(),
    )?)
}

/// Subalgebra check along a ring map: the map must preserve brackets
/// (otherwise an error), and the verdict is the metric condition
/// `φ(g(α, β)) = g'(α, β)` on basis derivations.
pub fn check_subalgebra_along(
    sub: &KPAlgebra,
    sup: &KPAlgebra,
    map: &RingMap,
) -> Result<Verdict, ConstructionError> {
    let h = Hom::from_map(Arc::new(sub.clone()), Arc::new(sup.clone()), map.clone())?;
    if let Verdict::Fail(w) = check_poisson_hom(&h)? {
        return Err(ConstructionError::NotPoissonSubalgebra(w));
    }
    Ok(metric_condition(sub, sup, map)?)
}

/// Subalgebra check for an inclusion of generators: sub generator `i` is
/// super generator `inclusion[i]`.
pub fn check_subalgebra(
    sub: &KPAlgebra,
    sup: &KPAlgebra,
    inclusion: &[usize],
) -> Result<Verdict, ConstructionError> {
    if sub.ring().is_product() {
        return Err(ConstructionError::Inclusion(
            "sub algebra over a product ring".into(),
        ));
    }
    if inclusion.len() != sub.dim() {
        return Err(ConstructionError::Inclusion(format!(
            "{} indices for {} generators",
            inclusion.len(),
            sub.dim()
        )));
    }
    let mut seen = HashSet::new();
    for &k in inclusion {
        if k >= sup.dim() || !seen.insert(k) {
            return Err(ConstructionError::Inclusion(format!(
                "index {k} is out of range or repeated"
            )));
        }
    }
    let locs: Vec<usize> = inclusion
        .iter()
        .map(|&k| sup.ring().locate(k).unwrap().0)
        .collect();
    if locs.iter().any(|&c| c != locs[0]) && !locs.is_empty() {
        return Err(ConstructionError::Inclusion(
            "generators span several components".into(),
        ));
    }
    let sr = sup.ring();
    let images = inclusion
        .iter()
        .map(|&k| sr.generator(k))
        .collect::<Result<_, _>>()?;
    let units = vec![locs
        .first()
        .map_or_else(|| sr.one(), |&c| sr.component_unit(c))];
    let map = RingMap::with_units(sub.ring(), sr, images, units)?;
    check_subalgebra_along(sub, sup, &map)
}
