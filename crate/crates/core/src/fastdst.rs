//! Recursive rotation factorization of the even type-3 DST for power-of-two
//! sizes: O(N log N) plane rotations plus sign flips and an output wire
//! permutation, exactly reproducing the direct matrix.
//!
//! The recursion mirrors the classical fast DCT-II / DST-II / DST-IV
//! decompositions: a DST-IV of size N splits into a half-size DCT-II and
//! DST-II after a stage of rotations, and those reduce into each other and
//! a quarter-size DST-IV.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowOp {
    /// Plane rotation on physical wires (0-based):
    /// y_i = cos a * x_i + sin a * x_j, y_j = -sin a * x_i + cos a * x_j.
    Rot { i: usize, j: usize, alpha: f64 },
    /// Sign flip of one wire.
    Flip { i: usize },
}

/// A transform expressed as a wire-level flow: ops applied in order, then the
/// m-th output read from wire `output_wires[m]`.
#[derive(Debug, Clone)]
pub struct FlowGraph {
    pub n: usize,
    pub ops: Vec<FlowOp>,
    pub output_wires: Vec<usize>,
}

impl FlowGraph {
    pub fn matrix(&self) -> Mat {
        let mut m = Mat::identity(self.n);
        for op in &self.ops {
            match *op {
                FlowOp::Rot { i, j, alpha } => {
                    let (c, s) = (alpha.cos(), alpha.sin());
                    for col in 0..self.n {
                        let a = m[(i, col)];
                        let b = m[(j, col)];
                        m[(i, col)] = c * a + s * b;
                        m[(j, col)] = -s * a + c * b;
                    }
                }
                FlowOp::Flip { i } => {
                    for col in 0..self.n {
                        m[(i, col)] = -m[(i, col)];
                    }
                }
            }
        }
        let mut out = Mat::zeros(self.n);
        for (row, &w) in self.output_wires.iter().enumerate() {
            for col in 0..self.n {
                out[(row, col)] = m[(w, col)];
            }
        }
        out
    }

    pub fn rotation_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, FlowOp::Rot { .. })).count()
    }
}

struct Builder {
    ops: Vec<FlowOp>,
}

impl Builder {
    fn rot(&mut self, i: usize, j: usize, alpha: f64) {
        self.ops.push(FlowOp::Rot { i, j, alpha });
    }
    fn flip(&mut self, i: usize) {
        self.ops.push(FlowOp::Flip { i });
    }

    /// DCT-II on the given wires; returns output wire order.
    fn dct2(&mut self, w: &[usize]) -> Vec<usize> {
        let n = w.len();
        if n == 1 {
            return w.to_vec();
        }
        let m = n / 2;
        for k in 0..m {
            self.rot(w[k], w[n - 1 - k], PI / 4.0);
            self.flip(w[n - 1 - k]);
        }
        if n == 2 {
            return vec![w[0], w[1]];
        }
        let even = self.dct2(&w[..m].to_vec());
        let odd_wires: Vec<usize> = (0..m).map(|k| w[n - 1 - k]).collect();
        let odd = self.dst4(&odd_wires);
        let mut out = Vec::with_capacity(n);
        for k in 0..m {
            out.push(even[k]);
            out.push(odd[k]);
        }
        out
    }

    /// DST-II on the given wires: input column flips + DCT-II + output reversal.
    fn dst2(&mut self, w: &[usize]) -> Vec<usize> {
        for k in (1..w.len()).step_by(2) {
            self.flip(w[k]);
        }
        let mut out = self.dct2(w);
        out.reverse();
        out
    }

    /// DST-IV on the given wires.
    fn dst4(&mut self, w: &[usize]) -> Vec<usize> {
        let n = w.len();
        if n == 1 {
            return w.to_vec();
        }
        if n == 2 {
            self.rot(w[0], w[1], PI / 8.0);
            self.flip(w[1]);
            return vec![w[0], w[1]];
        }
        let m = n / 2;
        for k in 0..m {
            self.rot(w[k], w[n - 1 - k], (2 * k + 1) as f64 * PI / (4 * n) as f64);
        }
        let p = self.dct2(&w[..m].to_vec());
        let lower: Vec<usize> = (0..m).map(|k| w[n - 1 - k]).collect();
        let q = self.dst2(&lower);
        let mut out = vec![usize::MAX; n];
        out[0] = p[0];
        for j in 1..m {
            self.rot(p[j], q[j - 1], PI / 4.0);
            self.flip(q[j - 1]);
            out[2 * j] = p[j];
            out[2 * j - 1] = q[j - 1];
        }
        self.flip(q[m - 1]);
        out[n - 1] = q[m - 1];
        out
    }
}

/// Rotation factorization of the even type-3 DST (= DST-IV with frequency-major
/// rows): reverse the input wires, run the DST-IV flow, flip odd output rows.
pub fn edst3_rotation_factorization(n: usize) -> Result<FlowGraph> {
    if !matches!(n, 4 | 8 | 16 | 32) {
        return Err(Error::InvalidParameter(format!(
            "factorization supports n in {{4, 8, 16, 32}}, got {n}"
        )));
    }
    let mut b = Builder { ops: Vec::new() };
    let reversed: Vec<usize> = (0..n).rev().collect();
    let out = b.dst4(&reversed);
    for m in (1..n).step_by(2) {
        b.flip(out[m]);
    }
    Ok(FlowGraph { n, ops: b.ops, output_wires: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::residual_autocorrelation;
    use crate::transforms::{coding_gain_vs_klt, dct2_matrix, edst3_matrix};

    #[test]
    fn dct2_flow_matches_direct() {
        for n in [2usize, 4, 8] {
            let mut b = Builder { ops: Vec::new() };
            let wires: Vec<usize> = (0..n).collect();
            let out = b.dct2(&wires);
            let g = FlowGraph { n, ops: b.ops, output_wires: out };
            let err = g.matrix().max_abs_diff(&dct2_matrix(n).unwrap().entries);
            assert!(err < 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn edst3_flow_matches_direct() {
        for n in [4usize, 8, 16, 32] {
            let g = edst3_rotation_factorization(n).unwrap();
            let err = g.matrix().max_abs_diff(&edst3_matrix(n).unwrap().entries);
            assert!(err < 1e-9, "n={n} err={err}");
        }
    }

    #[test]
    fn rotation_counts() {
        assert!(edst3_rotation_factorization(8).unwrap().rotation_count() <= 16);
        // O(n log n): within n/2 * log2(n) + n for the sizes supported
        for n in [4usize, 8, 16, 32] {
            let count = edst3_rotation_factorization(n).unwrap().rotation_count();
            let bound = n / 2 * (n as f64).log2() as usize + n;
            assert!(count <= bound, "n={n} count={count}");
        }
    }

    #[test]
    fn factored_gain_matches_table() {
        let k = residual_autocorrelation(0.95, 8).unwrap();
        let g = edst3_rotation_factorization(8).unwrap();
        let rel = coding_gain_vs_klt(&g.matrix(), &k).unwrap().relative().unwrap();
        assert!((rel + 0.1376).abs() < 5e-4, "relative gain {rel}");
    }

    #[test]
    fn rejects_unsupported_sizes() {
        assert!(edst3_rotation_factorization(6).is_err());
        assert!(edst3_rotation_factorization(64).is_err());
    }
}
