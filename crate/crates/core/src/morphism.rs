//! Morphisms of Kähler–Poisson algebras.
//!
//! A morphism is given by the generator images of its algebra map `φ`. The
//! derivation map is never stored: it is induced as
//! `ψ(a_i {b^i, ·}) = φ(a_i) {φ(b^i), ·}'`, for which the compatibility
//! conditions `ψ(aα) = φ(a)ψ(α)` and `φ(α(a)) = ψ(α)(φ(a))` hold by
//! construction once `φ` is a Poisson map. The metric condition is checked on
//! the basis derivations `γ_i = {x^i, ·}`; it extends to all of the module
//! because both sides are bilinear over `φ`.

use std::sync::Arc;

use thiserror::Error;

use crate::kp::{KPAlgebra, KpError};
use crate::poisson::PoissonError;
use crate::ring::{Matrix, RingElem, RingError, RingMap};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("image of generator {index} is not a polynomial: {image}")]
    NotPolynomial { index: usize, image: String },
    #[error("no inverse images given")]
    MissingInverse,
    #[error("inverse does not undo the map on {side} generator {index}: got {got}")]
    InverseMismatch {
        side: &'static str,
        index: usize,
        got: String,
    },
    #[error("preimage {index} maps to {got}, not to the generator")]
    PreimageMismatch { index: usize, got: String },
    #[error("algebras do not match: {0}")]
    AlgebraMismatch(String),
    #[error(transparent)]
    Kp(#[from] KpError),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Algebra map between two Kähler–Poisson algebras, with optional inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hom {
    source: Arc<KPAlgebra>,
    target: Arc<KPAlgebra>,
    map: RingMap,
    inverse: Option<RingMap>,
}

impl Hom {
    pub fn new(
        source: Arc<KPAlgebra>,
        target: Arc<KPAlgebra>,
        images: Vec<RingElem>,
    ) -> Result<Self, MorphismError> {
        let map = RingMap::new(source.ring(), target.ring(), images)?;
        Self::from_map(source, target, map)
    }

    /// Uses a prepared ring map, e.g. a non-unital embedding into a product.
    pub fn from_map(
        source: Arc<KPAlgebra>,
        target: Arc<KPAlgebra>,
        map: RingMap,
    ) -> Result<Self, MorphismError> {
        if **map.source() != **source.ring() || **map.target() != **target.ring() {
            return Err(MorphismError::AlgebraMismatch(format!(
                "map goes {} -> {}, algebras live over {} and {}",
                map.source(),
                map.target(),
                source.ring(),
                target.ring()
            )));
        }
        Ok(Hom {
            source,
            target,
            map,
            inverse: None,
        })
    }

    pub fn identity(k: Arc<KPAlgebra>) -> Self {
        let map = RingMap::identity(k.ring());
        Hom {
            source: k.clone(),
            target: k,
            inverse: Some(map.clone()),
            map,
        }
    }

    /// Attaches inverse images `φ⁻¹(y^α)`, checking both round trips on
    /// generators.
    pub fn with_inverse(self, inverse_images: Vec<RingElem>) -> Result<Self, MorphismError> {
        let inv = RingMap::new(self.target.ring(), self.source.ring(), inverse_images)?;
        self.with_inverse_map(inv)
    }

    pub fn with_inverse_map(mut self, inv: RingMap) -> Result<Self, MorphismError> {
        for (side, there, back, ring) in [
            ("source", &self.map, &inv, self.source.ring()),
            ("target", &inv, &self.map, self.target.ring()),
        ] {
            let round = there.then(back)?;
            for (i, (img, gen)) in round.images().iter().zip(ring.generators()).enumerate() {
                if *img != gen {
                    return Err(MorphismError::InverseMismatch {
                        side,
                        index: i,
                        got: img.to_string(),
                    });
                }
            }
        }
        self.inverse = Some(inv);
        Ok(self)
    }

    pub fn source(&self) -> &Arc<KPAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<KPAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &RingMap {
        &self.map
    }

    pub fn images(&self) -> &[RingElem] {
        self.map.images()
    }

    pub fn inverse(&self) -> Option<&RingMap> {
        self.inverse.as_ref()
    }

    pub fn apply(&self, a: &RingElem) -> Result<RingElem, RingError> {
        self.map.apply(a)
    }
}

/// Pass iff `{φx^i, φx^j}' = φ({x^i, x^j})` for all `i < j`; the residual is
/// the left side minus the right.
pub fn check_poisson_hom(h: &Hom) -> Result<Verdict, MorphismError> {
    let p = h.source.p();
    let tgt = h.target.structure();
    let img = h.images();
    for i in 0..p.rows() {
        for j in i + 1..p.cols() {
            let lhs = tgt.bracket(&img[i], &img[j])?;
            let rhs = h.apply(p.get(i, j))?;
            let r = lhs - rhs;
            if !r.is_zero() {
                return Ok(Verdict::Fail(Witness::at([i, j], r)));
            }
        }
    }
    Ok(Verdict::Pass)
}

fn polynomial_images(map: &RingMap) -> Result<(), MorphismError> {
    match map.images().iter().position(|e| !e.is_poly()) {
        None => Ok(()),
        Some(index) => Err(MorphismError::NotPolynomial {
            index,
            image: map.images()[index].to_string(),
        }),
    }
}

fn map_jacobian(map: &RingMap) -> Result<Matrix, MorphismError> {
    polynomial_images(map)?;
    let m = map.images().len();
    let n = map.target().num_generators();
    let mut a = Matrix::zeros(map.target(), m, n);
    for (i, img) in map.images().iter().enumerate() {
        for al in 0..n {
            a.set(i, al, img.partial(al)?);
        }
    }
    Ok(a)
}

/// `A^i_α = ∂φ(x^i)/∂y^α`; only defined when every image is a polynomial.
pub fn jacobian(h: &Hom) -> Result<Matrix, MorphismError> {
    map_jacobian(&h.map)
}

/// `C_iα = {φx^i, y^α}'`, the coefficients of `ψ(γ_i)` on target generators.
fn induced_on_generators(h_map: &RingMap, target: &KPAlgebra) -> Result<Matrix, MorphismError> {
    let s = target.structure();
    let rows = h_map
        .images()
        .iter()
        .map(|img| {
            s.hamiltonian(img)
                .map(|v| v.into_iter().map(|e| -e).collect())
        })
        .collect::<Result<Vec<Vec<RingElem>>, _>>()?;
    let n = target.dim();
    Ok(Matrix::from_fn(target.ring(), rows.len(), n, |i, a| {
        rows[i][a].clone()
    }))
}

/// The metric condition on basis derivations: pass iff
/// `φ(P^ik g_kl P^jl) = {φx^i, y^α}' g'_αβ {φx^j, y^β}'` for all `i, j`.
pub fn metric_condition(
    source: &KPAlgebra,
    target: &KPAlgebra,
    map: &RingMap,
) -> Result<Verdict, MorphismError> {
    let p = source.p();
    let lhs = p.mul(source.g())?.mul(&p.transpose())?.map(map)?;
    let c = induced_on_generators(map, target)?;
    let rhs = c.mul(target.g())?.mul(&c.transpose())?;
    Ok(Verdict::zero_matrix(lhs.sub(&rhs)?))
}

/// Condition-by-condition outcome of [`check_kp_morphism`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismReport {
    pub poisson_hom: Verdict,
    /// Metric condition; not evaluated when `φ` is not a Poisson map.
    pub metric: Option<Verdict>,
    /// Generator images are polynomials in the target generators; a failure
    /// names the first offending generator and its image.
    pub finite: Verdict,
}

impl MorphismReport {
    pub fn is_pass(&self) -> bool {
        self.poisson_hom.is_pass()
            && self.metric.as_ref().is_some_and(Verdict::is_pass)
            && self.finite.is_pass()
    }

    /// First failing condition, in the order Poisson map, metric, finiteness.
    pub fn first_failure(&self) -> Option<(&'static str, &Witness)> {
        [
            ("poisson-hom", Some(&self.poisson_hom)),
            ("metric", self.metric.as_ref()),
            ("finite", Some(&self.finite)),
        ]
        .into_iter()
        .find_map(|(name, v)| v.and_then(Verdict::witness).map(|w| (name, w)))
    }
}

pub fn check_kp_morphism(h: &Hom) -> Result<MorphismReport, MorphismError> {
    let poisson_hom = check_poisson_hom(h)?;
    let metric = if poisson_hom.is_pass() {
        Some(metric_condition(&h.source, &h.target, &h.map)?)
    } else {
        None
    };
    let finite = match h.images().iter().position(|e| !e.is_poly()) {
        None => Verdict::Pass,
        Some(i) => Verdict::Fail(Witness::at([i], h.images()[i].clone())),
    };
    Ok(MorphismReport {
        poisson_hom,
        metric,
        finite,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub poisson_hom: Verdict,
    /// `Σ P'^{γα} (A^k_α φ(g_kl) A^l_β − g'_αβ) P'^{δβ}`, zero iff the
    /// metrics correspond; evaluated only for Poisson maps.
    pub criterion: Option<Verdict>,
}

impl IsoReport {
    pub fn is_pass(&self) -> bool {
        self.poisson_hom.is_pass() && self.criterion.as_ref().is_some_and(Verdict::is_pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.poisson_hom
            .witness()
            .or(self.criterion.as_ref().and_then(Verdict::witness))
    }
}

/// Pulled-back metric `h = Aᵀ φ(g) A`.
pub fn pullback_metric(h: &Hom) -> Result<Matrix, MorphismError> {
    let a = jacobian(h)?;
    let phi_g = h.source.g().map(&h.map)?;
    Ok(a.transpose().mul(&phi_g)?.mul(&a)?)
}

/// Isomorphism criterion for a map with verified inverse; both directions
/// must have polynomial images.
pub fn check_iso(h: &Hom) -> Result<IsoReport, MorphismError> {
    let inv = h.inverse.as_ref().ok_or(MorphismError::MissingInverse)?;
    polynomial_images(&h.map)?;
    polynomial_images(inv)?;
    let poisson_hom = check_poisson_hom(h)?;
    if !poisson_hom.is_pass() {
        return Ok(IsoReport {
            poisson_hom,
            criterion: None,
        });
    }
    let pp = h.target.p();
    let diff = pullback_metric(h)?.sub(h.target.g())?;
    let r = pp.mul(&diff)?.mul(&pp.transpose())?;
    Ok(IsoReport {
        poisson_hom,
        criterion: Some(Verdict::zero_matrix(r)),
    })
}

/// `h2 ∘ h1`.
pub fn compose(h2: &Hom, h1: &Hom) -> Result<Hom, MorphismError> {
    if *h1.target != *h2.source {
        return Err(MorphismError::AlgebraMismatch(
            "target of the first map is not the source of the second".into(),
        ));
    }
    let map = h1.map.then(&h2.map)?;
    let inverse = match (&h2.inverse, &h1.inverse) {
        (Some(i2), Some(i1)) => Some(i2.then(i1)?),
        _ => None,
    };
    Ok(Hom {
        source: h1.source.clone(),
        target: h2.target.clone(),
        map,
        inverse,
    })
}

/// Pass iff `(φ(η) − η') P'^{αβ} = 0` for all `α, β`.
pub fn eta_transport_check(h: &Hom) -> Result<Verdict, MorphismError> {
    let eta = h.source.require_eta()?;
    let eta_t = h.target.require_eta()?;
    let d = h.apply(eta)? - eta_t;
    Ok(Verdict::zero_matrix(h.target.p().scale(&d)))
}

/// The image `(φ(A), g̃, {φ(x^1), …, φ(x^m)})`, presented over the source
/// ring: the returned algebra has the source structure and the metric
/// `g̃` written through preimages `ŷ^J` of the target generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSubalgebra {
    pub algebra: KPAlgebra,
    /// `φ(g̃)`, the metric as elements of the target.
    pub metric_in_target: Matrix,
    pub map: RingMap,
}

/// `g̃_kl = φ(η P_km) {φx^m, y^J}' g'_JM φ(η P_ln) {φx^n, y^M}'` with
/// `P_km = g_ka P^ab g_bm`. With `φ(ŷ^J) = y^J` this is the image of
/// `η² (P_low C G Cᵀ P_lowᵀ)` where `C_mJ = {x^m, ŷ^J}` and `G = g'(ŷ)`.
pub fn image_subalgebra(h: &Hom, preimages: &[RingElem]) -> Result<ImageSubalgebra, MorphismError> {
    let src = &h.source;
    let tgt = &h.target;
    if preimages.len() != tgt.dim() {
        return Err(RingError::ImageCount {
            expected: tgt.dim(),
            got: preimages.len(),
        }
        .into());
    }
    let gens = tgt.ring().generators();
    for (j, (pre, gen)) in preimages.iter().zip(&gens).enumerate() {
        let got = h.apply(pre)?;
        if got != *gen {
            return Err(MorphismError::PreimageMismatch {
                index: j,
                got: got.to_string(),
            });
        }
    }
    let eta = src.require_eta()?;
    let back = RingMap::new(tgt.ring(), src.ring(), preimages.to_vec())?;
    let g_pulled = tgt.g().map(&back)?;
    let s = src.structure();
    let c_rows = (0..src.dim())
        .map(|m| {
            let xm = src.ring().generator(m)?;
            preimages
                .iter()
                .map(|y| s.bracket(&xm, y))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, RingError>>()?;
    let c = Matrix::from_fn(src.ring(), src.dim(), tgt.dim(), |m, j| {
        c_rows[m][j].clone()
    });
    let p_low = src.g().mul(src.p())?.mul(src.g())?;
    let left = p_low.mul(&c)?;
    let eta2 = eta * eta;
    let g_tilde = left.mul(&g_pulled)?.mul(&left.transpose())?.scale(&eta2);
    let metric_in_target = g_tilde.map(&h.map)?;
    let metric = crate::kp::Metric::new(g_tilde)?;
    let mut algebra = KPAlgebra::raw(s.clone(), metric, None)?;
    algebra = match crate::kp::solve_eta(algebra.structure(), algebra.metric())? {
        crate::kp::EtaSolution::NotProportional(_) => algebra,
        sol => algebra.with_eta(sol.eta().cloned())?,
    };
    Ok(ImageSubalgebra {
        algebra,
        metric_in_target,
        map: h.map.clone(),
    })
}
