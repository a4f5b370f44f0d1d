//! Dense matrices over ℚ(√2)(i) with exact elimination.

use crate::scalar::{ExactScalar, Q};
use num_complex::Complex64;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ExactScalar::one());
        }
        m
    }
    pub fn diag(entries: Vec<ExactScalar>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }
    pub fn from_q_rows(rows: &[Vec<Q>]) -> Self {
        Self::from_rows(
            rows.iter().map(|r| r.iter().cloned().map(ExactScalar::rational).collect()).collect(),
        )
    }
    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: ExactScalar) {
        self.data[i * self.cols + j] = v;
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
    pub fn mul(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * o.cols + j] += &(a * b);
                }
            }
        }
        out
    }
    pub fn add(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
    pub fn sub(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
    pub fn scale(&self, s: &ExactScalar) -> ExactMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }
    pub fn transpose(&self) -> ExactMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }
    pub fn conj_transpose(&self) -> ExactMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }
    pub fn column(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn from_columns(rows: usize, cols: &[Vec<ExactScalar>]) -> ExactMatrix {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }
    pub fn hstack(&self, o: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, o.rows);
        let mut m = Self::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv().unwrap();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    if self.get(r, j).is_zero() {
                        continue;
                    }
                    let v = self.get(i, j) - &(&f * self.get(r, j));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = self.hstack(&Self::identity(n));
        let piv = aug.rref();
        if piv.len() < n || piv.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Solves self·x = b; None if inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
        assert_eq!(b.len(), self.rows);
        let bcol = Self::from_columns(self.rows, &[b.to_vec()]);
        let mut aug = self.hstack(&bcol);
        let piv = aug.rref();
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = vec![ExactScalar::zero(); self.cols];
        for (r, &c) in piv.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn trace(&self) -> ExactScalar {
        let mut t = ExactScalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    /// Coefficients c₀…c_n of det(xI − A) = Σ c_k x^k (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> Vec<ExactScalar> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut c = vec![ExactScalar::zero(); n + 1];
        c[n] = ExactScalar::one();
        let mut m = Self::zeros(n, n);
        let id = Self::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&c[n + 1 - k]));
            let am = self.mul(&m);
            c[n - k] = -(&am.trace() / &ExactScalar::int(k as i64));
        }
        c
    }

    /// Product of the nonzero eigenvalues together with their count (the rank of
    /// a diagonalizable matrix): the lowest nonvanishing char-poly coefficient.
    pub fn pseudo_determinant(&self) -> (usize, ExactScalar) {
        let c = self.char_poly();
        let n = self.rows;
        let k = (0..=n).find(|&k| !c[k].is_zero()).unwrap();
        let r = n - k;
        let sign = if r % 2 == 0 { ExactScalar::one() } else { ExactScalar::int(-1) };
        (r, &sign * &c[k])
    }

    pub fn to_complex(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_c64()).collect()).collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| ExactScalar::int(x)).collect()).collect(),
        )
    }

    #[test]
    fn inverse_and_rank() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.mul(&a.inverse().unwrap()), ExactMatrix::identity(2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn char_poly_of_companion() {
        // eigenvalues 1, 2, 3
        let a = m(&[&[1, 1, 0], &[0, 2, 1], &[0, 0, 3]]);
        let c = a.char_poly();
        let want: Vec<ExactScalar> = [-6, 11, -6, 1].iter().map(|&x| ExactScalar::int(x)).collect();
        assert_eq!(c, want);
    }

    #[test]
    fn pseudo_determinant_skips_kernel() {
        let a = m(&[&[2, 0, 0], &[0, 0, 0], &[0, 0, 5]]);
        assert_eq!(a.pseudo_determinant(), (2, ExactScalar::int(10)));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let x = a.solve(&[ExactScalar::int(1), ExactScalar::int(2), ExactScalar::int(3)]).unwrap();
        assert_eq!(x, vec![ExactScalar::int(1), ExactScalar::int(2)]);
        assert!(a.solve(&[ExactScalar::int(1), ExactScalar::int(2), ExactScalar::int(4)]).is_none());
    }
}
