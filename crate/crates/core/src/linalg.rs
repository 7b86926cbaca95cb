//! Dense LU and a block-tridiagonal solver for the stacked Newton systems.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Mat { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `self * v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Mat, b: &Mat) {
        let n = self.n;
        for i in 0..n {
            for k in 0..n {
                let aik = a.data[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                let brow = &b.data[k * n..(k + 1) * n];
                let row = &mut self.data[i * n..(i + 1) * n];
                for (r, bk) in row.iter_mut().zip(brow) {
                    *r -= aik * bk;
                }
            }
        }
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorisation with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Mat) -> Result<Self> {
        Self::factor_block(a, 0)
    }

    fn factor_block(a: &Mat, block: usize) -> Result<Self> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix { block });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                if m != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= m * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { n, lu, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

/// Block-tridiagonal matrix: row block `t` couples to blocks `t-1`, `t`, `t+1`.
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    /// `lower[t]` multiplies `x[t-1]`; `lower[0]` is unused.
    pub lower: Vec<Mat>,
    pub diag: Vec<Mat>,
    /// `upper[t]` multiplies `x[t+1]`; the last entry is unused.
    pub upper: Vec<Mat>,
}

impl BlockTridiagonal {
    pub fn zeros(blocks: usize, n: usize) -> Self {
        BlockTridiagonal {
            lower: vec![Mat::zeros(n); blocks],
            diag: vec![Mat::zeros(n); blocks],
            upper: vec![Mat::zeros(n); blocks],
        }
    }

    pub fn blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn block_size(&self) -> usize {
        self.diag.first().map_or(0, Mat::dim)
    }

    /// Entry of the assembled matrix; zero outside the three bands.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.block_size();
        let (bi, bj) = (i / n, j / n);
        let (r, c) = (i % n, j % n);
        if bi == bj {
            self.diag[bi][(r, c)]
        } else if bj + 1 == bi {
            self.lower[bi][(r, c)]
        } else if bi + 1 == bj {
            self.upper[bi][(r, c)]
        } else {
            0.0
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.block_size();
        let m = self.blocks();
        let mut out = vec![0.0; n * m];
        for t in 0..m {
            let mut acc = self.diag[t].mul_vec(&x[t * n..(t + 1) * n]);
            if t > 0 {
                let l = self.lower[t].mul_vec(&x[(t - 1) * n..t * n]);
                acc.iter_mut().zip(l).for_each(|(a, b)| *a += b);
            }
            if t + 1 < m {
                let u = self.upper[t].mul_vec(&x[(t + 1) * n..(t + 2) * n]);
                acc.iter_mut().zip(u).for_each(|(a, b)| *a += b);
            }
            out[t * n..(t + 1) * n].copy_from_slice(&acc);
        }
        out
    }

    /// Block Thomas elimination with pivoted LU on each reduced diagonal block.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.block_size();
        let m = self.blocks();
        debug_assert_eq!(rhs.len(), n * m);
        let mut gains: Vec<Mat> = Vec::with_capacity(m);
        let mut reduced: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut d = self.diag[0].clone();
        let mut r = rhs[..n].to_vec();
        for t in 0..m {
            if t > 0 {
                d = self.diag[t].clone();
                d.sub_mul(&self.lower[t], &gains[t - 1]);
                let lr = self.lower[t].mul_vec(&reduced[t - 1]);
                r = rhs[t * n..(t + 1) * n]
                    .iter()
                    .zip(lr)
                    .map(|(a, b)| a - b)
                    .collect();
            }
            let lu = Lu::factor_block(&d, t)?;
            gains.push(if t + 1 < m {
                lu.solve_mat(&self.upper[t])
            } else {
                Mat::zeros(n)
            });
            reduced.push(lu.solve(&r));
        }
        let mut x = vec![0.0; n * m];
        x[(m - 1) * n..].copy_from_slice(&reduced[m - 1]);
        for t in (0..m - 1).rev() {
            let (head, tail) = x.split_at_mut((t + 1) * n);
            let gx = gains[t].mul_vec(&tail[..n]);
            for (i, xi) in head[t * n..].iter_mut().enumerate() {
                *xi = reduced[t][i] - gx[i];
            }
        }
        Ok(x)
    }
}
