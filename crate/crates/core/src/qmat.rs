//! Dense rational matrices, just large enough for rotation bookkeeping and
//! covector/matrix products in the screen calculus.

use num_traits::{One, Zero};

use crate::ratio::Q;
use crate::{Error, Result};

/// Row-major dense matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> QMat {
        QMat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<QMat> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid_input("ragged matrix rows"));
        }
        Ok(QMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> Result<QMat> {
        if self.cols != other.rows {
            return Err(Error::invalid_input(format!(
                "matrix product shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * other.at(k, j);
                    *out.at_mut(i, j) += term;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Q]) -> Result<Vec<Q>> {
        if v.len() != self.cols {
            return Err(Error::invalid_input(format!(
                "matrix-vector shape mismatch: {}x{} times {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Q::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.at(i, j).is_zero() {
                    out[i] += self.at(i, j) * &v[j];
                }
            }
        }
        Ok(out)
    }

    /// Exact orthogonality test: `MᵀM = I`.
    pub fn is_orthogonal(&self) -> bool {
        self.rows == self.cols
            && self.transpose().mul(self).expect("square") == QMat::identity(self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{qi, qr};

    #[test]
    fn pythagorean_rotation_is_orthogonal() {
        let r = QMat::from_rows(vec![
            vec![qr(3, 5), qr(-4, 5)],
            vec![qr(4, 5), qr(3, 5)],
        ])
        .unwrap();
        assert!(r.is_orthogonal());
        let v = r.apply(&[qi(1), qi(0)]).unwrap();
        assert_eq!(v, vec![qr(3, 5), qr(4, 5)]);
    }

    #[test]
    fn non_orthogonal_detected() {
        let m = QMat::from_rows(vec![vec![qi(1), qi(1)], vec![qi(0), qi(1)]]).unwrap();
        assert!(!m.is_orthogonal());
    }
}
