//! Exact real-valued transform bases (odd/even type-3 DST, DCT-II, KLT, DPCM)
//! and the coding-gain figure of merit used to rank them.

use crate::error::{Error, Result};
use crate::markov::CorrelationModel;
use crate::matrix::Mat;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Odst3,
    Edst3,
    Dct2,
    Klt,
    Dpcm,
    Cascade,
    Lifting,
}

#[derive(Debug, Clone)]
pub struct TransformMatrix {
    pub n: usize,
    pub entries: Mat,
    pub kind: TransformKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodingGainDb {
    pub value: f64,
    /// Gain of a reference transform (usually the KLT) on the same source.
    pub reference: Option<f64>,
}

impl CodingGainDb {
    pub fn relative(&self) -> Option<f64> {
        self.reference.map(|r| self.value - r)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("transform size must be positive".into()));
    }
    Ok(())
}

/// Odd type-3 DST: rows indexed by frequency m, entries
/// (2/sqrt(2N+1)) * sin((2m-1) n pi / (2N+1)) with 1-based m, n.
pub fn odst3_matrix(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let mut m = Mat::zeros(n);
    let norm = 2.0 / ((2 * n + 1) as f64).sqrt();
    for mi in 1..=n {
        for ni in 1..=n {
            m[(mi - 1, ni - 1)] =
                norm * ((2 * mi - 1) as f64 * ni as f64 * PI / (2 * n + 1) as f64).sin();
        }
    }
    Ok(TransformMatrix { n, entries: m, kind: TransformKind::Odst3 })
}

/// Even type-3 DST (DST-IV): sqrt(2/N) * sin((2m-1)(2n-1) pi / (4N)), 1-based m, n.
pub fn edst3_matrix(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let mut m = Mat::zeros(n);
    let norm = (2.0 / n as f64).sqrt();
    for mi in 1..=n {
        for ni in 1..=n {
            m[(mi - 1, ni - 1)] =
                norm * ((2 * mi - 1) as f64 * (2 * ni - 1) as f64 * PI / (4 * n) as f64).sin();
        }
    }
    Ok(TransformMatrix { n, entries: m, kind: TransformKind::Edst3 })
}

/// Orthonormal DCT-II: sqrt(2/N) * cos(pi m (2n+1) / 2N) with row 0 scaled by 1/sqrt(2).
pub fn dct2_matrix(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let mut m = Mat::zeros(n);
    let norm = (2.0 / n as f64).sqrt();
    for mi in 0..n {
        let row_scale = if mi == 0 { norm / 2f64.sqrt() } else { norm };
        for ni in 0..n {
            m[(mi, ni)] = row_scale * (PI * mi as f64 * (2 * ni + 1) as f64 / (2 * n) as f64).cos();
        }
    }
    Ok(TransformMatrix { n, entries: m, kind: TransformKind::Dct2 })
}

/// 1D DPCM viewed as a matrix: first output kept, later outputs differenced
/// with the previous input. Unit determinant, not orthogonal.
pub fn dpcm_matrix(n: usize) -> Result<TransformMatrix> {
    check_n(n)?;
    let mut m = Mat::identity(n);
    for i in 1..n {
        m[(i, i - 1)] = -1.0;
    }
    Ok(TransformMatrix { n, entries: m, kind: TransformKind::Dpcm })
}

/// KLT of a correlation matrix: rows are unit eigenvectors sorted by descending
/// eigenvalue; each row's largest-magnitude entry (first on ties) is positive.
pub fn klt_matrix(k: &CorrelationModel) -> Result<TransformMatrix> {
    let (vals, vecs) = k.matrix.sym_eigen()?;
    let n = k.n;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut m = Mat::zeros(n);
    for (row, &src) in order.iter().enumerate() {
        let v = vecs.row(src);
        let mut best = 0;
        for (idx, x) in v.iter().enumerate() {
            if x.abs() > v[best].abs() {
                best = idx;
            }
        }
        let sign = if v[best] < 0.0 { -1.0 } else { 1.0 };
        for (col, x) in v.iter().enumerate() {
            m[(row, col)] = sign * x;
        }
    }
    Ok(TransformMatrix { n, entries: m, kind: TransformKind::Klt })
}

fn geometric_mean(v: &[f64]) -> Result<f64> {
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::Numerical("non-positive variance in coding gain".into()));
    }
    let log_mean = v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64;
    Ok(log_mean.exp())
}

/// Coding gain in dB of a transform on a source with correlation matrix K:
/// 10 log10( gm(diag K) / gm(diag T K T^t) ).
pub fn coding_gain_matrix(t: &Mat, k: &CorrelationModel) -> Result<CodingGainDb> {
    if t.n() != k.n {
        return Err(Error::InvalidParameter(format!(
            "transform size {} does not match source size {}",
            t.n(),
            k.n
        )));
    }
    let num = geometric_mean(&k.matrix.diag())?;
    let den = geometric_mean(&t.quadratic_diag(&k.matrix))?;
    Ok(CodingGainDb { value: 10.0 * (num / den).log10(), reference: None })
}

pub fn coding_gain(t: &TransformMatrix, k: &CorrelationModel) -> Result<CodingGainDb> {
    coding_gain_matrix(&t.entries, k)
}

/// Coding gain against a nominal unit-variance source (numerator 1 instead of
/// gm(diag K)); this is the convention behind the absolute KLT figure.
pub fn unit_source_coding_gain(t: &TransformMatrix, k: &CorrelationModel) -> Result<CodingGainDb> {
    let den = geometric_mean(&t.entries.quadratic_diag(&k.matrix))?;
    Ok(CodingGainDb { value: -10.0 * den.log10(), reference: None })
}

/// Gain of `t` with the KLT gain on the same source recorded as reference.
pub fn coding_gain_vs_klt(t: &Mat, k: &CorrelationModel) -> Result<CodingGainDb> {
    let klt = klt_matrix(k)?;
    let klt_gain = coding_gain(&klt, k)?.value;
    let mut g = coding_gain_matrix(t, k)?;
    g.reference = Some(klt_gain);
    Ok(g)
}
