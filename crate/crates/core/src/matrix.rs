//! Small dense square matrices in f64, just enough linear algebra for the
//! transform-design pipeline: products, determinants (LU), and a cyclic
//! Jacobi eigensolver for the symmetric correlation matrices.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix rows must be square and nonempty".into()));
        }
        let mut m = Mat::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// diag(self * K * self^T) without forming the full product.
    pub fn quadratic_diag(&self, k: &Mat) -> Vec<f64> {
        assert_eq!(self.n, k.n, "dimension mismatch");
        let n = self.n;
        let mut out = Vec::with_capacity(n);
        let mut tmp = vec![0.0; n];
        for i in 0..n {
            let r = self.row(i);
            for (c, t) in tmp.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, &rj) in r.iter().enumerate() {
                    acc += k[(j, c)] * rj;
                }
                *t = acc;
            }
            out.push(r.iter().zip(&tmp).map(|(a, b)| a * b).sum());
        }
        out
    }

    pub fn max_abs_diff(&self, rhs: &Mat) -> f64 {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// max |(T T^t - I)_{ij}|, a cheap orthonormality check.
    pub fn orthonormality_error(&self) -> f64 {
        self.mul(&self.transpose()).max_abs_diff(&Mat::identity(self.n))
    }

    pub fn symmetry_error(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = 1.0;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r, &s| a[(r, col)].abs().total_cmp(&a[(s, col)].abs()))
                .unwrap();
            if a[(piv, col)] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)];
                    a[(col, j)] = a[(piv, j)];
                    a[(piv, j)] = t;
                }
                det = -det;
            }
            det *= a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / a[(col, col)];
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[(r, j)] -= f * a[(col, j)];
                }
            }
        }
        det
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns (eigenvalues, eigenvector matrix with eigenvectors as rows),
    /// unsorted; callers impose ordering/sign conventions.
    pub fn sym_eigen(&self) -> Result<(Vec<f64>, Mat)> {
        if self.symmetry_error() > 1e-9 {
            return Err(Error::InvalidParameter("eigensolver requires a symmetric matrix".into()));
        }
        let n = self.n;
        let mut a = self.clone();
        let mut v = Mat::identity(n); // rows accumulate the eigenvectors
        for _sweep in 0..200 {
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)] * a[(p, q)])
                .sum();
            if off.sqrt() < 1e-14 {
                let vals = a.diag();
                return Ok((vals, v));
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // A <- J^T A J with the Givens pair (p, q)
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vpk = v[(p, k)];
                        let vqk = v[(q, k)];
                        v[(p, k)] = c * vpk - s * vqk;
                        v[(q, k)] = s * vpk + c * vqk;
                    }
                }
            }
        }
        Err(Error::Numerical("Jacobi eigensolver did not converge".into()))
    }

    /// One row per line, space-separated decimal values.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let mut first = true;
            for x in self.row(i) {
                if !first {
                    s.push(' ');
                }
                let _ = write!(s, "{x}");
                first = false;
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Mat> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| Error::Format(format!("bad number {t:?}: {e}"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Mat::from_rows(&rows)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_product() {
        let a = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((a.det() - 5.0).abs() < 1e-12);
        let i = Mat::identity(2);
        assert!(a.mul(&i).max_abs_diff(&a) == 0.0);
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = Mat::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.25],
            vec![0.5, 0.25, 2.0],
        ])
        .unwrap();
        let (vals, vecs) = a.sym_eigen().unwrap();
        assert!(vecs.orthonormality_error() < 1e-10);
        // rows v_i satisfy A v_i = lambda_i v_i
        let n = a.n();
        for (i, &l) in vals.iter().enumerate() {
            for r in 0..n {
                let av: f64 = (0..n).map(|c| a[(r, c)] * vecs[(i, c)]).sum();
                assert!((av - l * vecs[(i, r)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quadratic_diag_matches_product() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]).unwrap();
        let k = Mat::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let full = a.mul(&k).mul(&a.transpose());
        let d = a.quadratic_diag(&k);
        assert!((d[0] - full[(0, 0)]).abs() < 1e-12);
        assert!((d[1] - full[(1, 1)]).abs() < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let a = Mat::from_rows(&[vec![1.5, -0.25], vec![0.125, 3.0]]).unwrap();
        let b = Mat::from_text(&a.to_text()).unwrap();
        assert_eq!(a, b);
    }
}
