//! Banded symmetric positive-definite storage with an in-place Cholesky factor.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix; row `i` stores columns `i - bw ..= i`.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    data: Vec<f64>,
    factored: bool,
}

impl BandedSpd {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Adds `value` to entry `(i, j)`; entries above the diagonal are mirrored.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        assert!(
            i - j <= self.bw,
            "entry ({i}, {j}) outside band {}",
            self.bw
        );
        let k = self.idx(i, j);
        self.data[k] += value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            return 0.0;
        }
        self.data[self.idx(i, j)]
    }

    /// `y = A x` (only valid before factoring).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert!(!self.factored);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// Replaces the matrix by its lower Cholesky factor.
    pub fn factor(&mut self) -> Result<()> {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let mut sum = self.data[self.idx(i, j)];
                for k in lo..j {
                    sum -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::LinearSolve { row: i });
                    }
                    let k = self.idx(i, i);
                    self.data[k] = sum.sqrt();
                } else {
                    let k = self.idx(i, j);
                    self.data[k] = sum / self.data[self.idx(j, j)];
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` in place using the stored factor.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert!(self.factored, "solve before factor");
        assert_eq!(b.len(), self.n);
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut sum = b[i];
            for k in lo..i {
                sum -= self.data[self.idx(i, k)] * b[k];
            }
            b[i] = sum / self.data[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut sum = b[i];
            for k in i + 1..=hi {
                sum -= self.data[self.idx(k, i)] * b[k];
            }
            b[i] = sum / self.data[self.idx(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve_matches_dense_product() {
        let n = 7;
        let mut a = BandedSpd::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i + 1, i, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.5).collect();
        let b = a.mul_vec(&x);
        let mut sol = b.clone();
        a.factor().unwrap();
        a.solve_in_place(&mut sol);
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-13);
        }
    }

    #[test]
    fn wide_band_random_spd() {
        let n = 20;
        let bw = 4;
        let mut a = BandedSpd::zeros(n, bw);
        for i in 0..n {
            a.add(i, i, 10.0);
            for d in 1..=bw {
                if i + d < n {
                    a.add(i + d, i, ((i * 7 + d * 3) % 5) as f64 * 0.3 - 0.6);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let b = a.mul_vec(&x);
        a.factor().unwrap();
        let mut sol = b;
        a.solve_in_place(&mut sol);
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let mut a = BandedSpd::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        a.add(1, 0, 2.0);
        assert!(matches!(a.factor(), Err(Error::LinearSolve { row: 1 })));
    }
}
