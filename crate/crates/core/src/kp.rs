//! Kähler–Poisson algebras: a Poisson structure `P` with a symmetric metric
//! `g` and an element `η` satisfying `η·PgPgP = −P`.
//!
//! Since the algebra is generated by its distinguished generators and the
//! bracket extends by the Leibniz rule, the condition for all elements
//! reduces to this matrix identity.

use std::sync::Arc;

use thiserror::Error;

use crate::poisson::{PoissonError, PoissonStructure};
use crate::ring::{Matrix, Ring, RingElem, RingError};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("metric is not symmetric {0}")]
    NotSymmetric(Witness),
    #[error("no eta given")]
    MissingEta,
    #[error("Kähler–Poisson condition fails {0}")]
    Condition(Witness),
    #[error("no eta exists: PgPgP is not proportional to P {0}")]
    NotProportional(Witness),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Symmetric matrix `g_ij` over a structure's ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    matrix: Matrix,
}

impl Metric {
    pub fn new(matrix: Matrix) -> Result<Self, KpError> {
        if !matrix.is_square() {
            return Err(KpError::Dimension(format!(
                "metric is {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        for i in 0..matrix.rows() {
            for j in i + 1..matrix.cols() {
                let r = matrix.get(i, j) - matrix.get(j, i);
                if !r.is_zero() {
                    return Err(KpError::NotSymmetric(Witness::at([i, j], r)));
                }
            }
        }
        Ok(Metric { matrix })
    }

    pub fn identity(ring: &Arc<Ring>) -> Self {
        Metric {
            matrix: Matrix::identity(ring, ring.num_generators()),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        self.matrix.get(i, j)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.matrix.ring()
    }
}

/// Inner derivation `α = Σ a_i {x^i, ·}` in the generator basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    coeffs: Vec<RingElem>,
}

impl Derivation {
    pub fn new(coeffs: Vec<RingElem>) -> Self {
        Derivation { coeffs }
    }

    /// `γ_i = {x^i, ·}`.
    pub fn basis(ring: &Arc<Ring>, i: usize) -> Self {
        let coeffs = (0..ring.num_generators())
            .map(|k| if k == i { ring.one() } else { ring.zero() })
            .collect();
        Derivation { coeffs }
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    /// `α(x^i) = Σ_k a_k P^ki` for every generator.
    pub fn on_generators(&self, s: &PoissonStructure) -> Result<Vec<RingElem>, KpError> {
        if self.coeffs.len() != s.dim() {
            return Err(KpError::Dimension(format!(
                "derivation has {} coefficients, structure has {} generators",
                self.coeffs.len(),
                s.dim()
            )));
        }
        Ok((0..s.dim())
            .map(|i| {
                self.coeffs
                    .iter()
                    .enumerate()
                    .filter(|(k, a)| !a.is_zero() && !s.entry(*k, i).is_zero())
                    .fold(s.ring().zero(), |acc, (k, a)| acc + a * s.entry(k, i))
            })
            .collect())
    }

    /// `α(b) = Σ_k a_k {x^k, b}`.
    pub fn apply(&self, s: &PoissonStructure, b: &RingElem) -> Result<RingElem, KpError> {
        let ham = s.hamiltonian(b)?;
        if self.coeffs.len() != ham.len() {
            return Err(KpError::Dimension("derivation length".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&ham)
            .fold(s.ring().zero(), |acc, (a, h)| acc + a * h))
    }
}

/// Result of solving for η.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaSolution {
    Solved(RingElem),
    /// `P = 0`: the condition is vacuous and η is set to 1.
    Degenerate(RingElem),
    NotProportional(Witness),
}

impl EtaSolution {
    pub fn eta(&self) -> Option<&RingElem> {
        match self {
            EtaSolution::Solved(e) | EtaSolution::Degenerate(e) => Some(e),
            EtaSolution::NotProportional(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPAlgebra {
    structure: PoissonStructure,
    metric: Metric,
    eta: Option<RingElem>,
}

impl KPAlgebra {
    /// Checks shapes and rings only; the condition is not verified.
    pub fn raw(
        structure: PoissonStructure,
        metric: Metric,
        eta: Option<RingElem>,
    ) -> Result<Self, KpError> {
        if metric.dim() != structure.dim() {
            return Err(KpError::Dimension(format!(
                "metric is {0}x{0}, structure has {1} generators",
                metric.dim(),
                structure.dim()
            )));
        }
        let ring = structure.ring();
        let foreign = if **metric.ring() != **ring {
            Some(metric.ring().clone())
        } else {
            eta.as_ref()
                .filter(|e| **e.ring() != **ring)
                .map(|e| e.ring().clone())
        };
        if let Some(r) = foreign {
            return Err(RingError::RingMismatch {
                left: ring.to_string(),
                right: r.to_string(),
            }
            .into());
        }
        Ok(KPAlgebra {
            structure,
            metric,
            eta,
        })
    }

    /// Requires η and a passing [`verify_kp`].
    pub fn certified(
        structure: PoissonStructure,
        metric: Metric,
        eta: RingElem,
    ) -> Result<Self, KpError> {
        let k = Self::raw(structure, metric, Some(eta))?;
        match verify_kp(&k)? {
            Verdict::Pass => Ok(k),
            Verdict::Fail(w) => Err(KpError::Condition(w)),
        }
    }

    /// Solves for η; fails when no η exists.
    pub fn solved(structure: PoissonStructure, metric: Metric) -> Result<Self, KpError> {
        let k = Self::raw(structure, metric, None)?;
        match solve_eta(&k.structure, &k.metric)? {
            EtaSolution::NotProportional(w) => Err(KpError::NotProportional(w)),
            sol => Ok(KPAlgebra {
                eta: sol.eta().cloned(),
                ..k
            }),
        }
    }

    pub fn with_eta(self, eta: Option<RingElem>) -> Result<Self, KpError> {
        Self::raw(self.structure, self.metric, eta)
    }

    pub fn structure(&self) -> &PoissonStructure {
        &self.structure
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn eta(&self) -> Option<&RingElem> {
        self.eta.as_ref()
    }

    pub fn require_eta(&self) -> Result<&RingElem, KpError> {
        self.eta.as_ref().ok_or(KpError::MissingEta)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.structure.ring()
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn p(&self) -> &Matrix {
        self.structure.matrix()
    }

    pub fn g(&self) -> &Matrix {
        self.metric.matrix()
    }

    /// `P^i(a) = {x^i, a}`.
    pub fn p_vector(&self, a: &RingElem) -> Result<Vec<RingElem>, KpError> {
        Ok(self.structure.hamiltonian(a)?)
    }

    /// `D^k(a) = η {x^l, a} g_lm {x^m, x^k}`.
    pub fn d_vector(&self, a: &RingElem) -> Result<Vec<RingElem>, KpError> {
        let eta = self.require_eta()?;
        let pa = self.p_vector(a)?;
        let row = Matrix::from_rows(self.ring(), vec![pa])?;
        let d = row.mul(self.g())?.mul(self.p())?;
        Ok(d.row(0).iter().map(|v| eta * v).collect())
    }

    /// Lowers an index with the metric: `v_j = g_jk v^k`.
    pub fn lower(&self, v: &[RingElem]) -> Result<Vec<RingElem>, KpError> {
        let col = Matrix::from_fn(self.ring(), v.len(), 1, |i, _| v[i].clone());
        let low = self.g().mul(&col)?;
        Ok((0..low.rows()).map(|i| low.get(i, 0).clone()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KpTensors {
    /// `D^ij = η (P g Pᵀ)^ij`.
    pub d_upper: Matrix,
    /// `D^i_j = D^ik g_kj`.
    pub d_mixed: Matrix,
    /// `P^i_j = P^ik g_kj`.
    pub p_mixed: Matrix,
}

fn check_dims(s: &PoissonStructure, g: &Metric) -> Result<(), KpError> {
    if s.dim() != g.dim() {
        return Err(KpError::Dimension(format!(
            "structure has {} generators, metric is {1}x{1}",
            s.dim(),
            g.dim()
        )));
    }
    if **s.ring() != **g.ring() {
        return Err(RingError::RingMismatch {
            left: s.ring().to_string(),
            right: g.ring().to_string(),
        }
        .into());
    }
    Ok(())
}

/// `Q = P g P g P`.
pub fn compose_q(s: &PoissonStructure, g: &Metric) -> Result<Matrix, KpError> {
    check_dims(s, g)?;
    let p = s.matrix();
    let pg = p.mul(g.matrix())?;
    Ok(pg.mul(&pg)?.mul(p)?)
}

/// Solves `η·Q = −P` component by component. In each component η is read off
/// the first entry of `P` (row-major) that is nonzero there, then every entry
/// is verified. A component where `P` vanishes gets η = 1.
pub fn solve_eta(s: &PoissonStructure, g: &Metric) -> Result<EtaSolution, KpError> {
    let q = compose_q(s, g)?;
    let p = s.matrix();
    let ring = s.ring();
    if p.is_zero() {
        return Ok(EtaSolution::Degenerate(ring.one()));
    }
    let m = s.dim();
    let mut parts = Vec::with_capacity(ring.num_components());
    for c in 0..ring.num_components() {
        let pivot = (0..m * m)
            .map(|k| (k / m, k % m))
            .find(|&(i, j)| !p.get(i, j).part(c).is_zero());
        let part = match pivot {
            None => ring.one().part(c).clone(),
            Some((i, j)) => {
                let qc = q.get(i, j).part(c);
                match p.get(i, j).part(c).neg().div(qc) {
                    Some(v) => v,
                    None => {
                        let w = Witness::at([i, j], ring.lift(c, p.get(i, j).part(c).clone()));
                        return Ok(EtaSolution::NotProportional(w.with_matrix(q)));
                    }
                }
            }
        };
        parts.push(part);
    }
    let eta = ring.element(parts)?;
    let residual = residual_matrix(&eta, &q, p);
    match Verdict::zero_matrix(residual) {
        Verdict::Pass => Ok(EtaSolution::Solved(eta)),
        Verdict::Fail(w) => Ok(EtaSolution::NotProportional(w)),
    }
}

fn residual_matrix(eta: &RingElem, q: &Matrix, p: &Matrix) -> Matrix {
    Matrix::from_fn(p.ring(), p.rows(), p.cols(), |i, j| {
        eta * q.get(i, j) + p.get(i, j)
    })
}

/// Pass iff `η·Q + P = 0` entrywise; a failure carries the residual matrix.
pub fn verify_kp(k: &KPAlgebra) -> Result<Verdict, KpError> {
    let eta = k.require_eta()?;
    let q = compose_q(&k.structure, &k.metric)?;
    Ok(Verdict::zero_matrix(residual_matrix(eta, &q, k.p())))
}

pub fn kp_tensors(k: &KPAlgebra) -> Result<KpTensors, KpError> {
    let eta = k.require_eta()?;
    let p = k.p();
    let g = k.g();
    let p_mixed = p.mul(g)?;
    let d_upper = p_mixed.mul(&p.transpose())?.scale(eta);
    let d_mixed = d_upper.mul(g)?;
    Ok(KpTensors {
        d_upper,
        d_mixed,
        p_mixed,
    })
}

/// `g(α, β) = α(x^i) g_ij β(x^j)`.
pub fn metric_on_derivations(
    k: &KPAlgebra,
    alpha: &Derivation,
    beta: &Derivation,
) -> Result<RingElem, KpError> {
    let a = alpha.on_generators(k.structure())?;
    let b = beta.on_generators(k.structure())?;
    let mut acc = k.ring().zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let gij = k.metric.get(i, j);
            if !bj.is_zero() && !gij.is_zero() {
                acc = acc + ai * gij * bj;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Scalar;

    fn trivial() -> KPAlgebra {
        let r = Ring::new(["x", "y"]);
        let s = PoissonStructure::from_brackets(&r, &[(0, 1, r.one())]).unwrap();
        KPAlgebra::raw(s, Metric::identity(&r), Some(r.one())).unwrap()
    }

    #[test]
    fn metric_must_be_symmetric() {
        let r = Ring::new(["x", "y"]);
        let x = r.generator(0).unwrap();
        let m = Matrix::from_rows(&r, vec![vec![r.one(), x], vec![r.zero(), r.one()]]).unwrap();
        let err = Metric::new(m).unwrap_err();
        assert!(matches!(err, KpError::NotSymmetric(w) if w.indices == vec![0, 1]));
    }

    #[test]
    fn compose_q_examples() {
        let k = trivial();
        let q = compose_q(k.structure(), k.metric()).unwrap();
        assert_eq!(q, k.p().neg());
        let r = k.ring().clone();
        let q0 = compose_q(&PoissonStructure::zero(&r), k.metric()).unwrap();
        assert!(q0.is_zero());
    }

    #[test]
    fn solve_eta_examples() {
        let k = trivial();
        assert_eq!(
            solve_eta(k.structure(), k.metric()).unwrap(),
            EtaSolution::Solved(k.ring().one())
        );

        let r = Ring::new(["x", "y"]);
        let x = r.generator(0).unwrap();
        let s = PoissonStructure::from_brackets(&r, &[(0, 1, x.clone())]).unwrap();
        let eta = solve_eta(&s, &Metric::identity(&r)).unwrap();
        assert_eq!(eta, EtaSolution::Solved((&x * &x).recip().unwrap()));
        assert_eq!(eta.eta().unwrap().to_string(), "1/x^2");

        let z = solve_eta(&PoissonStructure::zero(&r), &Metric::identity(&r)).unwrap();
        assert_eq!(z, EtaSolution::Degenerate(r.one()));
    }

    #[test]
    fn decoupled_blocks_are_not_proportional() {
        let r = Ring::new(["x1", "x2", "x3", "x4"]);
        let x3 = r.generator(2).unwrap();
        let s = PoissonStructure::from_brackets(&r, &[(0, 1, r.one()), (2, 3, x3)]).unwrap();
        let sol = solve_eta(&s, &Metric::identity(&r)).unwrap();
        let EtaSolution::NotProportional(w) = sol else {
            panic!("expected no eta")
        };
        assert_eq!(w.indices, vec![2, 3]);
        assert!(matches!(
            KPAlgebra::solved(s, Metric::identity(&r)),
            Err(KpError::NotProportional(_))
        ));
    }

    #[test]
    fn q_zero_at_nonzero_p_entry() {
        // g = 0 kills Q while P ≠ 0
        let r = Ring::new(["x", "y"]);
        let s = PoissonStructure::from_brackets(&r, &[(0, 1, r.one())]).unwrap();
        let g = Metric::new(Matrix::zeros(&r, 2, 2)).unwrap();
        let EtaSolution::NotProportional(w) = solve_eta(&s, &g).unwrap() else {
            panic!()
        };
        assert_eq!(w.indices, vec![0, 1]);
    }

    #[test]
    fn verify_examples() {
        let k = trivial();
        assert!(verify_kp(&k).unwrap().is_pass());
        let r = k.ring().clone();
        let bad = k.clone().with_eta(Some(r.int(2))).unwrap();
        let Verdict::Fail(w) = verify_kp(&bad).unwrap() else {
            panic!()
        };
        assert_eq!(w.matrix.unwrap(), bad.p().neg());
        assert_eq!(
            verify_kp(&k.with_eta(None).unwrap()),
            Err(KpError::MissingEta)
        );
    }

    #[test]
    fn certified_rejects_wrong_eta() {
        let k = trivial();
        let r = k.ring().clone();
        let err = KPAlgebra::certified(k.structure().clone(), k.metric().clone(), r.int(2));
        assert!(matches!(err, Err(KpError::Condition(_))));
    }

    #[test]
    fn tensor_examples() {
        let k = trivial();
        let t = kp_tensors(&k).unwrap();
        assert_eq!(t.d_upper, Matrix::identity(k.ring(), 2));
        assert!(t.d_upper.is_symmetric());

        let r = k.ring().clone();
        let z = KPAlgebra::solved(PoissonStructure::zero(&r), Metric::identity(&r)).unwrap();
        let t = kp_tensors(&z).unwrap();
        assert!(t.d_upper.is_zero() && t.d_mixed.is_zero() && t.p_mixed.is_zero());
    }

    #[test]
    fn metric_on_derivation_examples() {
        let k = trivial();
        let r = k.ring().clone();
        let ax = Derivation::basis(&r, 0);
        let ay = Derivation::basis(&r, 1);
        assert!(metric_on_derivations(&k, &ax, &ay).unwrap().is_zero());
        assert!(metric_on_derivations(&k, &ax, &ax).unwrap().is_one());
        let short = Derivation::new(vec![r.one()]);
        assert!(matches!(
            metric_on_derivations(&k, &short, &ax),
            Err(KpError::Dimension(_))
        ));
    }

    #[test]
    fn two_generator_closed_form() {
        let r = Ring::new(["x", "y"]);
        let (x, y) = (r.generator(0).unwrap(), r.generator(1).unwrap());
        let p = &(&x * &y) + &r.int(1);
        let s = PoissonStructure::from_brackets(&r, &[(0, 1, p.clone())]).unwrap();
        let q = |n: i64, d: i64| r.constant(Scalar::new(n.into(), d.into()));
        let g = Metric::new(
            Matrix::from_rows(&r, vec![vec![q(2, 1), q(1, 3)], vec![q(1, 3), q(-1, 2)]]).unwrap(),
        )
        .unwrap();
        let det = g.matrix().det().unwrap();
        let expect = (&(&p * &p) * &det).recip().unwrap();
        assert_eq!(solve_eta(&s, &g).unwrap(), EtaSolution::Solved(expect));
    }

    #[test]
    fn product_ring_components_solve_independently() {
        let pr = Ring::product(vec![
            vec!["x".into(), "y".into()],
            vec!["u".into(), "v".into()],
        ]);
        let e1 = pr.component_unit(0);
        let u = pr.generator(2).unwrap();
        let s =
            PoissonStructure::from_brackets(&pr, &[(0, 1, e1.clone()), (2, 3, u.clone())]).unwrap();
        let eta = solve_eta(&s, &Metric::identity(&pr)).unwrap();
        assert!(matches!(eta, EtaSolution::Solved(_)));
        assert_eq!(eta.eta().unwrap().to_string(), "(1, 1/u^2)");
    }
}
