use std::fmt;
use std::sync::Arc;

use super::{Ring, RingElem, RingError, RingMap};

/// Dense matrix of ring elements, row-major. All entries share one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    ring: Arc<Ring>,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl Matrix {
    pub fn zeros(ring: &Arc<Ring>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Arc<Ring>, n: usize) -> Matrix {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_rows(ring: &Arc<Ring>, rows: Vec<Vec<RingElem>>) -> Result<Matrix, RingError> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(RingError::Shape(format!(
                "ragged rows in a {nrows}-row matrix"
            )));
        }
        let entries: Vec<RingElem> = rows.into_iter().flatten().collect();
        if let Some(bad) = entries.iter().find(|e| **e.ring() != **ring) {
            return Err(RingError::RingMismatch {
                left: ring.to_string(),
                right: bad.ring().to_string(),
            });
        }
        Ok(Matrix {
            ring: ring.clone(),
            rows: nrows,
            cols: ncols,
            entries,
        })
    }

    pub fn from_fn(
        ring: &Arc<Ring>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> RingElem,
    ) -> Matrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[RingElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElem::is_zero)
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|e| !e.is_zero())
            .map(|k| (k / self.cols, k % self.cols))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, RingError> {
        if self.cols != other.rows {
            return Err(RingError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    fn same_shape(&self, other: &Matrix) -> Result<(), RingError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RingError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, RingError> {
        self.same_shape(other)?;
        Ok(Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, RingError> {
        self.same_shape(other)?;
        Ok(Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| {
            self.get(i, j) - other.get(i, j)
        }))
    }

    pub fn scale(&self, s: &RingElem) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| s * self.get(i, j))
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| -self.get(i, j))
    }

    /// Entrywise image under a ring map.
    pub fn map(&self, f: &RingMap) -> Result<Matrix, RingError> {
        let entries = self
            .entries
            .iter()
            .map(|e| f.apply(e))
            .collect::<Result<_, _>>()?;
        Ok(Matrix {
            ring: f.target().clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Determinant by cofactor expansion; intended for small matrices.
    pub fn det(&self) -> Result<RingElem, RingError> {
        if !self.is_square() {
            return Err(RingError::Shape(
                "determinant of a non-square matrix".into(),
            ));
        }
        Ok(self.det_rec(&(0..self.rows).collect::<Vec<_>>(), 0))
    }

    fn det_rec(&self, cols: &[usize], row: usize) -> RingElem {
        if cols.is_empty() {
            return self.ring.one();
        }
        let mut acc = self.ring.zero();
        for (k, &c) in cols.iter().enumerate() {
            let a = self.get(row, c);
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = a * &self.det_rec(&rest, row + 1);
            acc = if k % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    /// Rows of canonical entry strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect()
    }
}

impl fmt::Display for Matrix {
    /// Row-major with entries right-aligned per column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_strings();
        let widths: Vec<usize> = (0..self.cols)
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            f.write_str("[ ")?;
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str("  ")?;
                }
                write!(f, "{cell:>width$}", width = widths[j])?;
            }
            f.write_str(" ]")?;
        }
        Ok(())
    }
}
