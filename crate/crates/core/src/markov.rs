//! First-order Markov models of block prediction residuals: the residual
//! autocorrelation matrix, its high-correlation limit, and a seeded
//! Monte-Carlo residual generator.

use crate::error::{Error, Result};
use crate::matrix::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct CorrelationModel {
    pub rho: f64,
    pub n: usize,
    pub matrix: Mat,
}

/// Autocorrelation of residuals r(i) = u(i) - u(0) of a stationary unit-variance
/// first-order Markov source: K[i][j] = rho^|i-j| - rho^i - rho^j + 1 (1-based).
pub fn residual_autocorrelation(rho: f64, n: usize) -> Result<CorrelationModel> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho must be in [0,1), got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let mut m = Mat::zeros(n);
    for i in 1..=n {
        for j in 1..=n {
            m[(i - 1, j - 1)] =
                rho.powi((i as i32 - j as i32).abs()) - rho.powi(i as i32) - rho.powi(j as i32) + 1.0;
        }
    }
    Ok(CorrelationModel { rho, n, matrix: m })
}

/// Entrywise limit of the residual autocorrelation as rho -> 1: K[i][j] = min(i, j).
pub fn limit_correlation_matrix(n: usize) -> Result<Mat> {
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let mut m = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = 1.0 + i.min(j) as f64;
        }
    }
    Ok(m)
}

/// Draws `count` residual vectors r(1..=n) = u(i) - u(0), where u follows a
/// stationary unit-variance Markov chain with innovation variance 1 - rho^2.
/// Deterministic for a given seed.
pub fn synthesize_markov_residual(rho: f64, n: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho must be in [0,1), got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let innov_sd = (1.0 - rho * rho).sqrt();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u0: f64 = StandardNormal.sample(&mut rng); // stationary start
        let mut u = u0;
        let mut r = Vec::with_capacity(n);
        for _ in 0..n {
            let w: f64 = StandardNormal.sample(&mut rng);
            u = rho * u + innov_sd * w;
            r.push(u - u0);
        }
        out.push(r);
    }
    Ok(out)
}

/// Empirical second-moment matrix of a sample of vectors.
pub fn sample_correlation(samples: &[Vec<f64>]) -> Result<Mat> {
    let n = samples.first().map(|s| s.len()).unwrap_or(0);
    if n == 0 {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let mut m = Mat::zeros(n);
    for s in samples {
        for i in 0..n {
            for j in i..n {
                m[(i, j)] += s[i] * s[j];
            }
        }
    }
    let c = samples.len() as f64;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] /= c;
            m[(j, i)] = m[(i, j)];
        }
    }
    Ok(m)
}
