//! Dense LU with partial pivoting for the small square systems of the
//! transition solvers.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| libm::fabs(self[(i, j)])).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum()).collect()
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factors `P A = L U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    /// `None` if a pivot is exactly zero.
    pub fn factor(a: &Matrix) -> Option<Self> {
        let n = a.n;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| libm::fabs(lu[(i, k)]).total_cmp(&libm::fabs(lu[(j, k)])))
                .unwrap_or(k);
            if lu[(p, k)] == 0.0 || !lu[(p, k)].is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                if m != 0.0 {
                    for j in k + 1..n {
                        lu[(i, j)] -= m * lu[(k, j)];
                    }
                }
            }
        }
        Some(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[(i, j)] * x[j];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.lu.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

/// 1-norm condition number after one pass of row then column
/// equilibration. `f64::INFINITY` for singular matrices.
pub fn equilibrated_condition(a: &Matrix) -> f64 {
    let n = a.n;
    let mut m = a.clone();
    for i in 0..n {
        let s = (0..n).map(|j| libm::fabs(m[(i, j)])).fold(0.0, f64::max);
        if s == 0.0 {
            return f64::INFINITY;
        }
        for j in 0..n {
            m[(i, j)] /= s;
        }
    }
    for j in 0..n {
        let s = (0..n).map(|i| libm::fabs(m[(i, j)])).fold(0.0, f64::max);
        if s == 0.0 {
            return f64::INFINITY;
        }
        for i in 0..n {
            m[(i, j)] /= s;
        }
    }
    match Lu::factor(&m) {
        Some(lu) => m.norm1() * lu.inverse().norm1(),
        None => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_permuted_system() {
        let mut a = Matrix::zeros(3);
        a.data = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = [1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        let sol = Lu::factor(&a).unwrap().solve(&b);
        for (s, e) in sol.iter().zip(x) {
            assert!((s - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_infinite() {
        let mut a = Matrix::zeros(2);
        a.data = vec![1.0, 2.0, 2.0, 4.0];
        assert!(equilibrated_condition(&a) > 1e15);
        assert!((equilibrated_condition(&Matrix::identity(4)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equilibration_ignores_scaling() {
        let mut a = Matrix::zeros(2);
        a.data = vec![1e8, 0.0, 0.0, 1e-8];
        assert!((equilibrated_condition(&a) - 1.0).abs() < 1e-12);
    }
}
