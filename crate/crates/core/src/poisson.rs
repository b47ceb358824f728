//! Poisson structures on finitely generated algebras.
//!
//! A structure is the antisymmetric matrix `P^ij = {x^i, x^j}` of generator
//! brackets. The bracket of arbitrary elements follows from the Leibniz rule:
//! `{a, b} = Σ ∂a/∂x^i · P^ij · ∂b/∂x^j`. On rational functions the partials
//! use the quotient rule.

use std::sync::Arc;

use thiserror::Error;

use crate::ring::{Matrix, Ring, RingElem, RingError};
use crate::verdict::{Verdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error("structure matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("structure matrix has {rows} rows but the ring has {generators} generators")]
    GeneratorCount { rows: usize, generators: usize },
    #[error("structure matrix is not antisymmetric {0}")]
    Antisymmetry(Witness),
    #[error("Jacobi identity fails {0}")]
    Jacobi(Witness),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonStructure {
    matrix: Matrix,
    jacobi_assumed: bool,
}

impl PoissonStructure {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(matrix: Matrix) -> Result<Self, PoissonError> {
        Self::validate_shape(&matrix)?;
        if let Verdict::Fail(w) = check_antisymmetry(&matrix)? {
            return Err(PoissonError::Antisymmetry(w));
        }
        if let Verdict::Fail(w) = check_jacobi(&matrix)? {
            return Err(PoissonError::Jacobi(w));
        }
        Ok(PoissonStructure {
            matrix,
            jacobi_assumed: false,
        })
    }

    /// Validates antisymmetry only. The skipped Jacobi check is remembered and
    /// surfaces in every report built on this structure.
    pub fn assume_poisson(matrix: Matrix) -> Result<Self, PoissonError> {
        Self::validate_shape(&matrix)?;
        if let Verdict::Fail(w) = check_antisymmetry(&matrix)? {
            return Err(PoissonError::Antisymmetry(w));
        }
        Ok(PoissonStructure {
            matrix,
            jacobi_assumed: true,
        })
    }

    /// Structure from the brackets of generator pairs `(i, j, {x^i, x^j})`;
    /// unspecified pairs are zero.
    pub fn from_brackets(
        ring: &Arc<Ring>,
        brackets: &[(usize, usize, RingElem)],
    ) -> Result<Self, PoissonError> {
        Self::new(Self::matrix_from_brackets(ring, brackets)?)
    }

    pub fn matrix_from_brackets(
        ring: &Arc<Ring>,
        brackets: &[(usize, usize, RingElem)],
    ) -> Result<Matrix, PoissonError> {
        let m = ring.num_generators();
        let mut p = Matrix::zeros(ring, m, m);
        for (i, j, v) in brackets {
            if *i >= m || *j >= m {
                return Err(RingError::IndexOutOfRange {
                    index: (*i).max(*j),
                    count: m,
                }
                .into());
            }
            p.set(*i, *j, v.clone());
            p.set(*j, *i, -v);
        }
        Ok(p)
    }

    /// The zero structure on a ring.
    pub fn zero(ring: &Arc<Ring>) -> Self {
        let m = ring.num_generators();
        PoissonStructure {
            matrix: Matrix::zeros(ring, m, m),
            jacobi_assumed: false,
        }
    }

    fn validate_shape(matrix: &Matrix) -> Result<(), PoissonError> {
        if !matrix.is_square() {
            return Err(PoissonError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let generators = matrix.ring().num_generators();
        if matrix.rows() != generators {
            return Err(PoissonError::GeneratorCount {
                rows: matrix.rows(),
                generators,
            });
        }
        Ok(())
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.matrix.ring()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RingElem {
        self.matrix.get(i, j)
    }

    pub fn jacobi_assumed(&self) -> bool {
        self.jacobi_assumed
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `{a, b} = Σ_ij ∂_i a · P^ij · ∂_j b`.
    pub fn bracket(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, RingError> {
        let ring = self.ring();
        for e in [a, b] {
            if **e.ring() != **ring {
                return Err(RingError::RingMismatch {
                    left: ring.to_string(),
                    right: e.ring().to_string(),
                });
            }
        }
        let m = self.dim();
        let da: Vec<RingElem> = (0..m).map(|i| a.partial(i)).collect::<Result<_, _>>()?;
        let mut acc = ring.zero();
        for j in 0..m {
            let dbj = b.partial(j)?;
            if dbj.is_zero() {
                continue;
            }
            let mut col = ring.zero();
            for (i, dai) in da.iter().enumerate() {
                let p = self.entry(i, j);
                if dai.is_zero() || p.is_zero() {
                    continue;
                }
                col = col + dai * p;
            }
            acc = acc + col * dbj;
        }
        Ok(acc)
    }

    /// `P^i(a) = {x^i, a}` for every generator.
    pub fn hamiltonian(&self, a: &RingElem) -> Result<Vec<RingElem>, RingError> {
        let da: Vec<RingElem> = (0..self.dim())
            .map(|j| a.partial(j))
            .collect::<Result<_, _>>()?;
        Ok((0..self.dim())
            .map(|i| {
                da.iter()
                    .enumerate()
                    .filter(|(_, d)| !d.is_zero())
                    .fold(self.ring().zero(), |acc, (j, d)| acc + self.entry(i, j) * d)
            })
            .collect())
    }
}

/// Pass iff `P^ij + P^ji = 0` and `P^ii = 0`; fails at the first offending
/// pair in row-major order with the residual `P^ij + P^ji` (or `P^ii`).
pub fn check_antisymmetry(p: &Matrix) -> Result<Verdict, PoissonError> {
    if !p.is_square() {
        return Err(PoissonError::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    for i in 0..p.rows() {
        for j in i..p.cols() {
            let residual = if i == j {
                p.get(i, i).clone()
            } else {
                p.get(i, j) + p.get(j, i)
            };
            if !residual.is_zero() {
                return Ok(Verdict::Fail(Witness::at([i, j], residual)));
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Jacobiator `J^ijk = Σ_l (P^il ∂_l P^jk + P^jl ∂_l P^ki + P^kl ∂_l P^ij)`
/// for one triple.
pub fn jacobiator(p: &Matrix, i: usize, j: usize, k: usize) -> Result<RingElem, RingError> {
    let mut acc = p.ring().zero();
    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
        let target = p.get(b, c);
        if target.is_zero() {
            continue;
        }
        for l in 0..p.rows() {
            let coeff = p.get(a, l);
            if coeff.is_zero() {
                continue;
            }
            let d = target.partial(l)?;
            if !d.is_zero() {
                acc = acc + coeff * &d;
            }
        }
    }
    Ok(acc)
}

/// Pass iff the Jacobiator vanishes for every `i < j < k`. Assumes the
/// matrix is antisymmetric. In a product ring this is the componentwise check.
pub fn check_jacobi(p: &Matrix) -> Result<Verdict, PoissonError> {
    if !p.is_square() {
        return Err(PoissonError::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let m = p.rows();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let jac = jacobiator(p, i, j, k)?;
                if !jac.is_zero() {
                    return Ok(Verdict::Fail(Witness::at([i, j, k], jac)));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}
