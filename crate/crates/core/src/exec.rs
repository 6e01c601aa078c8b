//! Bit-exact integer execution of quantized lifting networks (1D and
//! separable 2D, forward and inverse) plus residual DPCM. The only arithmetic
//! is integer multiply-add and arithmetic shifts; forward and inverse share
//! one rounding expression, which is what makes the mapping lossless.

use crate::error::{Error, Result};
use crate::lifting::QuantizedLiftingNetwork;

/// Inputs are validated to this range to leave accumulator headroom.
pub const MAX_INPUT_ABS: i64 = 1 << 20;
/// Intermediate wires may not exceed this bound (overflow guard).
pub const MAX_WIRE_ABS: i64 = (1 << 30) - 1;

#[derive(Debug, Clone)]
pub struct I2iTransform {
    net: QuantizedLiftingNetwork,
}

#[inline]
fn lift_round(k: i64, x: i64, l: u32) -> i64 {
    // (k*x + 2^(l-1)) >> l with sign-propagating shift; the shared rounding
    // point for forward and inverse steps.
    (k * x + (1i64 << (l - 1))) >> l
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualBlock {
    pub width: usize,
    pub height: usize,
    pub samples: Vec<i32>,
}

impl ResidualBlock {
    pub fn new(width: usize, height: usize, samples: Vec<i32>) -> Result<ResidualBlock> {
        if samples.len() != width * height {
            return Err(Error::InvalidParameter("sample count does not match dimensions".into()));
        }
        Ok(ResidualBlock { width, height, samples })
    }

    pub fn at(&self, r: usize, c: usize) -> i32 {
        self.samples[r * self.width + c]
    }
}

impl I2iTransform {
    pub fn new(net: QuantizedLiftingNetwork) -> Result<I2iTransform> {
        if net.l == 0 || net.l > 24 {
            return Err(Error::InvalidParameter(format!(
                "integer execution supports precision 1..=24, got {}",
                net.l
            )));
        }
        let bound = 1i64 << (net.l + 4);
        if net.steps.iter().any(|s| s.k.abs() >= bound || s.src >= net.n || s.dst >= net.n || s.src == s.dst)
        {
            return Err(Error::InvalidParameter("network steps out of range".into()));
        }
        if net.output_permutation.len() != net.n {
            return Err(Error::InvalidParameter("bad output permutation".into()));
        }
        let mut seen = vec![false; net.n];
        for &p in &net.output_permutation {
            if p >= net.n || seen[p] {
                return Err(Error::InvalidParameter("output permutation is not a permutation".into()));
            }
            seen[p] = true;
        }
        Ok(I2iTransform { net })
    }

    pub fn n(&self) -> usize {
        self.net.n
    }

    pub fn network(&self) -> &QuantizedLiftingNetwork {
        &self.net
    }

    fn check_input(&self, x: &[i32]) -> Result<()> {
        if x.len() != self.net.n {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                self.net.n,
                x.len()
            )));
        }
        if x.iter().any(|&v| (v as i64).abs() > MAX_INPUT_ABS) {
            return Err(Error::Overflow(format!("input magnitude exceeds {MAX_INPUT_ABS}")));
        }
        Ok(())
    }

    pub fn forward_1d(&self, x: &[i32]) -> Result<Vec<i32>> {
        self.check_input(x)?;
        let mut w: Vec<i64> = x.iter().map(|&v| v as i64).collect();
        for s in &self.net.steps {
            w[s.dst] += lift_round(s.k, w[s.src], self.net.l);
            if w[s.dst].abs() > MAX_WIRE_ABS {
                return Err(Error::Overflow("wire value exceeded the accumulator guard".into()));
            }
        }
        Ok(self.net.output_permutation.iter().map(|&p| w[p] as i32).collect())
    }

    pub fn inverse_1d(&self, y: &[i32]) -> Result<Vec<i32>> {
        self.check_input(y)?;
        let mut w = vec![0i64; self.net.n];
        for (m, &p) in self.net.output_permutation.iter().enumerate() {
            w[p] = y[m] as i64;
        }
        for s in self.net.steps.iter().rev() {
            w[s.dst] -= lift_round(s.k, w[s.src], self.net.l);
            if w[s.dst].abs() > MAX_WIRE_ABS {
                return Err(Error::Overflow("wire value exceeded the accumulator guard".into()));
            }
        }
        Ok(w.iter().map(|&v| v as i32).collect())
    }

    /// Separable 2D forward: 1D on each row, then on each column, in place on
    /// the row-pass output, rows then columns ascending.
    pub fn forward_2d(&self, block: &ResidualBlock) -> Result<ResidualBlock> {
        self.check_square(block)?;
        let n = self.net.n;
        let mut out = block.clone();
        for r in 0..n {
            let row = self.forward_1d(&out.samples[r * n..(r + 1) * n])?;
            out.samples[r * n..(r + 1) * n].copy_from_slice(&row);
        }
        let mut col = vec![0i32; n];
        for c in 0..n {
            for r in 0..n {
                col[r] = out.samples[r * n + c];
            }
            let t = self.forward_1d(&col)?;
            for r in 0..n {
                out.samples[r * n + c] = t[r];
            }
        }
        Ok(out)
    }

    /// Exact reversal of forward_2d: inverse 1D on each column, then each row.
    pub fn inverse_2d(&self, block: &ResidualBlock) -> Result<ResidualBlock> {
        self.check_square(block)?;
        let n = self.net.n;
        let mut out = block.clone();
        let mut col = vec![0i32; n];
        for c in 0..n {
            for r in 0..n {
                col[r] = out.samples[r * n + c];
            }
            let t = self.inverse_1d(&col)?;
            for r in 0..n {
                out.samples[r * n + c] = t[r];
            }
        }
        for r in 0..n {
            let row = self.inverse_1d(&out.samples[r * n..(r + 1) * n])?;
            out.samples[r * n..(r + 1) * n].copy_from_slice(&row);
        }
        Ok(out)
    }

    fn check_square(&self, block: &ResidualBlock) -> Result<()> {
        if block.width != self.net.n || block.height != self.net.n {
            return Err(Error::InvalidParameter(format!(
                "2D transform needs a {0}x{0} block, got {1}x{2}",
                self.net.n, block.width, block.height
            )));
        }
        Ok(())
    }

    /// Interval-arithmetic bound on |output| for inputs in [-in_abs, in_abs];
    /// a static no-blowup check for a given input range.
    pub fn output_bound_1d(&self, in_abs: i64) -> i64 {
        let mut hi = vec![in_abs; self.net.n];
        let half = 1i64 << (self.net.l - 1);
        for s in &self.net.steps {
            hi[s.dst] += (s.k.abs() * hi[s.src] + half) >> self.net.l;
        }
        hi.into_iter().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdpcmDirection {
    Horizontal,
    Vertical,
}

/// Residual DPCM: difference each pixel with its left (or top) neighbor;
/// first column (row) is kept as-is.
pub fn rdpcm_forward(block: &ResidualBlock, dir: RdpcmDirection) -> ResidualBlock {
    let mut out = block.clone();
    match dir {
        RdpcmDirection::Horizontal => {
            for r in 0..block.height {
                for c in (1..block.width).rev() {
                    out.samples[r * block.width + c] -= block.samples[r * block.width + c - 1];
                }
            }
        }
        RdpcmDirection::Vertical => {
            for r in (1..block.height).rev() {
                for c in 0..block.width {
                    out.samples[r * block.width + c] -= block.samples[(r - 1) * block.width + c];
                }
            }
        }
    }
    out
}

/// Prefix-sum inverse of rdpcm_forward.
pub fn rdpcm_inverse(block: &ResidualBlock, dir: RdpcmDirection) -> ResidualBlock {
    let mut out = block.clone();
    match dir {
        RdpcmDirection::Horizontal => {
            for r in 0..block.height {
                for c in 1..block.width {
                    out.samples[r * block.width + c] += out.samples[r * block.width + c - 1];
                }
            }
        }
        RdpcmDirection::Vertical => {
            for r in 1..block.height {
                for c in 0..block.width {
                    out.samples[r * block.width + c] += out.samples[(r - 1) * block.width + c];
                }
            }
        }
    }
    out
}

/// Exhaustive small-range reconstruction check plus a determinant audit;
/// the self-test entry used by the CLI.
pub fn self_test(net: &QuantizedLiftingNetwork) -> Result<usize> {
    let t = I2iTransform::new(net.clone())?;
    let n = net.n;
    if (net.real_matrix().det().abs() - 1.0).abs() > 1e-9 {
        return Err(Error::Numerical("network determinant is not +/-1".into()));
    }
    let range: Vec<i32> = (-2..=2).collect();
    let mut count = 0usize;
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<i32> = idx.iter().map(|&i| range[i]).collect();
        let y = t.forward_1d(&x)?;
        let back = t.inverse_1d(&y)?;
        if back != x {
            return Err(Error::Numerical(format!("reconstruction failed for {x:?}")));
        }
        count += 1;
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < range.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == n {
                return Ok(count);
            }
        }
    }
}
