use std::fmt;

use crate::ring::{Matrix, RingElem};

/// Where a check failed: zero-based indices and the nonzero residual found
/// there. Some checks also attach the whole residual matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub residual: RingElem,
    pub matrix: Option<Matrix>,
}

impl Witness {
    pub fn at(indices: impl Into<Vec<usize>>, residual: RingElem) -> Self {
        Witness {
            indices: indices.into(),
            residual,
            matrix: None,
        }
    }

    pub fn with_matrix(mut self, m: Matrix) -> Self {
        self.matrix = Some(m);
        self
    }

    /// Indices as printed in reports, counting from one.
    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "at ({}): residual {}", idx.join(","), self.residual)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }

    /// Pass iff every entry of `m` vanishes; otherwise fails at the first
    /// nonzero entry in row-major order, carrying the whole matrix.
    pub fn zero_matrix(m: Matrix) -> Verdict {
        match m.first_nonzero() {
            None => Verdict::Pass,
            Some((i, j)) => {
                let r = m.get(i, j).clone();
                Verdict::Fail(Witness::at([i, j], r).with_matrix(m))
            }
        }
    }
}
