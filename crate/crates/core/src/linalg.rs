//! Dense exact rational matrices.
//!
//! Desk-scale Gaussian elimination over Q: rank, kernel bases, solving, and a
//! couple of span comparisons. Everything is exact; rows are `Vec<Scalar>`.

use num_traits::Zero;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, crate::scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    /// Stacks `other` to the right of `self`.
    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = QMatrix::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Row-reduces in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&i| !self.get(i, col).is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, row * self.cols + j);
                }
            }
            let inv = Scalar::zero() + crate::scalar::one() / self.get(row, col).clone();
            for j in col..self.cols {
                let v = self.get(row, j) * &inv;
                self.set(row, j, v);
            }
            for i in 0..self.rows {
                if i != row && !self.get(i, col).is_zero() {
                    let f = self.get(i, col).clone();
                    for j in col..self.cols {
                        let v = self.get(i, j) - &f * self.get(row, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = crate::scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Whether `v` lies in the column span.
    pub fn column_span_contains(&self, v: &[Scalar]) -> bool {
        self.solve(v).is_some()
    }
}

/// Rank of the column span of a list of vectors.
pub fn span_rank(vectors: &[Vec<Scalar>], dim: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m = QMatrix::zero(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        assert_eq!(v.len(), dim);
        for (i, x) in v.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    m.rank()
}

/// True when the two column spans inside Q^dim coincide.
pub fn same_span(a: &[Vec<Scalar>], b: &[Vec<Scalar>], dim: usize) -> bool {
    let ra = span_rank(a, dim);
    let rb = span_rank(b, dim);
    if ra != rb {
        return false;
    }
    let mut all: Vec<Vec<Scalar>> = a.to_vec();
    all.extend(b.iter().cloned());
    span_rank(&all, dim) == ra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn rank_and_kernel() {
        let m = QMatrix::from_rows(vec![
            vec![int(1), int(2), int(3)],
            vec![int(2), int(4), int(6)],
            vec![int(1), int(0), int(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = QMatrix::from_rows(vec![vec![int(2), int(0)], vec![int(0), int(3)]]);
        let x = m.solve(&[int(1), int(1)]).unwrap();
        assert_eq!(x, vec![ratio(1, 2), ratio(1, 3)]);

        let sing = QMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]);
        assert!(sing.solve(&[int(0), int(1)]).is_none());
    }

    #[test]
    fn span_comparison() {
        let a = vec![vec![int(1), int(0)], vec![int(1), int(1)]];
        let b = vec![vec![int(0), int(1)], vec![int(2), int(1)]];
        assert!(same_span(&a, &b, 2));
        let c = vec![vec![int(1), int(0)]];
        assert!(!same_span(&a, &c, 2));
    }
}
