//! Cascaded plane-rotation approximation of the optimal residual transform:
//! exhaustive search over ordered branch pairs with multistart continuous
//! angle optimization (coordinate golden-section sweeps plus a numerical
//! gradient polish).

use crate::error::{Error, Result};
use crate::markov::CorrelationModel;
use crate::matrix::Mat;
use crate::transforms::{coding_gain, klt_matrix, CodingGainDb, TransformKind, TransformMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRotation {
    /// 1-based branch indices.
    pub i: usize,
    pub j: usize,
    /// Angle in radians, in [0, pi/2).
    pub alpha: f64,
}

impl PlaneRotation {
    pub fn new(i: usize, j: usize, alpha: f64) -> Result<PlaneRotation> {
        if i == 0 || j == 0 || i == j {
            return Err(Error::InvalidParameter(format!("bad branch pair ({i}, {j})")));
        }
        if !(0.0..FRAC_PI_2).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("angle {alpha} outside [0, pi/2)")));
        }
        Ok(PlaneRotation { i, j, alpha })
    }
}

/// N x N identity with the (i, j) plane rotated: (i,i)=(j,j)=cos a, (i,j)=sin a, (j,i)=-sin a.
pub fn rotation_matrix(rot: &PlaneRotation, n: usize) -> Result<TransformMatrix> {
    if rot.i > n || rot.j > n {
        return Err(Error::InvalidParameter(format!(
            "branch pair ({}, {}) out of range for n={n}",
            rot.i, rot.j
        )));
    }
    let mut m = Mat::identity(n);
    let (c, s) = (rot.alpha.cos(), rot.alpha.sin());
    let (i, j) = (rot.i - 1, rot.j - 1);
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = s;
    m[(j, i)] = -s;
    Ok(TransformMatrix { n, entries: m, kind: TransformKind::Cascade })
}

#[derive(Debug, Clone)]
pub struct RotationCascade {
    pub n: usize,
    pub rotations: Vec<PlaneRotation>,
    /// Gain of the composed transform on the correlation model it was designed
    /// for, with the KLT gain as reference.
    pub gain: Option<CodingGainDb>,
}

impl RotationCascade {
    /// Composed matrix; rotation k=1 is applied to the signal first.
    pub fn matrix(&self) -> Result<Mat> {
        if self.rotations.is_empty() {
            return Err(Error::InvalidParameter("cascade must contain at least one rotation".into()));
        }
        let mut m = Mat::identity(self.n);
        for r in &self.rotations {
            if r.i > self.n || r.j > self.n {
                return Err(Error::InvalidParameter(format!(
                    "rotation ({}, {}) out of range for n={}",
                    r.i, r.j, self.n
                )));
            }
            apply_rotation_rows(&mut m, r.i - 1, r.j - 1, r.alpha);
        }
        Ok(m)
    }

    /// Text form: header `n L`, then `k i j alpha` per rotation, 1-based.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.rotations.len());
        for (k, r) in self.rotations.iter().enumerate() {
            let _ = writeln!(s, "{} {} {} {:.16e}", k + 1, r.i, r.j, r.alpha);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<RotationCascade> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::Format("empty cascade file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_tok(it.next(), "n")?;
        let l: usize = parse_tok(it.next(), "L")?;
        let mut rotations = Vec::with_capacity(l);
        for k in 0..l {
            let line = lines
                .next()
                .ok_or_else(|| Error::Format(format!("missing rotation line {}", k + 1)))?;
            let mut it = line.split_whitespace();
            let idx: usize = parse_tok(it.next(), "k")?;
            if idx != k + 1 {
                return Err(Error::Format(format!("rotation lines out of order at {}", k + 1)));
            }
            let i: usize = parse_tok(it.next(), "i")?;
            let j: usize = parse_tok(it.next(), "j")?;
            let alpha: f64 = parse_tok(it.next(), "alpha")?;
            rotations.push(PlaneRotation::new(i, j, alpha)?);
        }
        Ok(RotationCascade { n, rotations, gain: None })
    }
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let t = tok.ok_or_else(|| Error::Format(format!("missing field {what}")))?;
    t.parse().map_err(|e| Error::Format(format!("bad {what} {t:?}: {e}")))
}

fn apply_rotation_rows(m: &mut Mat, i: usize, j: usize, alpha: f64) {
    let (s, c) = alpha.sin_cos();
    let n = m.n();
    for col in 0..n {
        let a = m[(i, col)];
        let b = m[(j, col)];
        m[(i, col)] = c * a + s * b;
        m[(j, col)] = -s * a + c * b;
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Restrict the discrete search to rotation sequences that group into
    /// consecutive stages of n/2 pairwise-disjoint branch pairs.
    pub parallel_only: bool,
    /// Random multistarts per discrete search point (first start is pi/4).
    pub restarts: usize,
    /// Golden-section interval width at which a coordinate is converged.
    pub angle_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { parallel_only: false, restarts: 32, angle_tolerance: 1e-7, seed: 0x5eed }
    }
}

/// Objective evaluation scratch: composed matrix rows + row variances.
/// Allocation-free after construction; the search calls `gain` millions of
/// times.
struct Scratch {
    m: Mat,
    tmp: Vec<f64>,
    log_num: f64,
}

impl Scratch {
    fn new(k: &CorrelationModel) -> Scratch {
        let log_num: f64 = k.matrix.diag().iter().map(|d| d.ln()).sum();
        Scratch { m: Mat::identity(k.n), tmp: vec![0.0; k.n], log_num }
    }

    /// Coding gain (dB, vs the raw source) of the cascade `pairs` (0-based)
    /// with the given angles; -inf on degenerate variances.
    fn gain(&mut self, pairs: &[(usize, usize)], angles: &[f64], k: &CorrelationModel) -> f64 {
        let n = k.n;
        for r in 0..n {
            let row = self.m.row_mut(r);
            row.fill(0.0);
            row[r] = 1.0;
        }
        for (&(i, j), &a) in pairs.iter().zip(angles) {
            apply_rotation_rows(&mut self.m, i, j, a);
        }
        let mut log_den = 0.0;
        for r in 0..n {
            let row = self.m.row(r);
            // K is symmetric, so (K row^T)_c is a row-against-row dot product
            for (c, t) in self.tmp.iter_mut().enumerate() {
                *t = k.matrix.row(c).iter().zip(row).map(|(a, b)| a * b).sum();
            }
            let d: f64 = row.iter().zip(&self.tmp).map(|(a, b)| a * b).sum();
            if d <= 0.0 {
                return f64::NEG_INFINITY;
            }
            log_den += d.ln();
        }
        10.0 / std::f64::consts::LN_10 * (self.log_num - log_den) / n as f64
    }
}

const ANGLE_HI: f64 = FRAC_PI_2 - 1e-12;

fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (0.0f64, ANGLE_HI);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    // also consider the interval endpoints (boundary maxima are legal)
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    let f_lo = f(lo.max(0.0));
    if f_lo >= fm && f_lo >= f1 && f_lo >= f2 {
        return (lo.max(0.0), f_lo);
    }
    if f1 >= fm && f1 >= f2 {
        return (x1, f1);
    }
    if f2 >= fm {
        return (x2, f2);
    }
    (xm, fm)
}

fn local_maximize(
    pairs: &[(usize, usize)],
    angles: &mut [f64],
    k: &CorrelationModel,
    scratch: &mut Scratch,
    tol: f64,
) -> f64 {
    let l = angles.len();
    let mut best = scratch.gain(pairs, angles, k);
    // coordinate-wise golden-section sweeps
    for _ in 0..60 {
        let before = best;
        for c in 0..l {
            let (x, fx) = golden_section_max(
                |a| {
                    let old = angles[c];
                    angles[c] = a;
                    let g = scratch.gain(pairs, angles, k);
                    angles[c] = old;
                    g
                },
                tol,
            );
            if fx > best {
                angles[c] = x;
                best = fx;
            }
        }
        if best - before < 1e-12 {
            break;
        }
    }
    // numerical-gradient polish with backtracking line search
    let h = 1e-6;
    for _ in 0..40 {
        let mut grad = vec![0.0; l];
        for c in 0..l {
            let old = angles[c];
            angles[c] = (old + h).min(ANGLE_HI);
            let fp = scratch.gain(pairs, angles, k);
            angles[c] = (old - h).max(0.0);
            let fm = scratch.gain(pairs, angles, k);
            angles[c] = old;
            grad[c] = (fp - fm) / (2.0 * h);
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-10 {
            break;
        }
        let mut step = 0.1 / gnorm.max(1.0);
        let mut improved = false;
        while step > 1e-13 {
            let trial: Vec<f64> = angles
                .iter()
                .zip(&grad)
                .map(|(a, g)| (a + step * g).clamp(0.0, ANGLE_HI))
                .collect();
            let ft = scratch.gain(pairs, &trial, k);
            if ft > best {
                angles.copy_from_slice(&trial);
                best = ft;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    best
}

/// Cheap screening ascent for ranking sequences: a few coordinate sweeps
/// from the pi/4 start, no multistarts, no polish. Accurate enough to rank
/// discrete sequences; never used for the final angles.
fn screen_maximize(
    pairs: &[(usize, usize)],
    angles: &mut [f64],
    k: &CorrelationModel,
    scratch: &mut Scratch,
) -> f64 {
    let mut best = scratch.gain(pairs, angles, k);
    for _ in 0..2 {
        let before = best;
        for c in 0..angles.len() {
            let (x, fx) = golden_section_max(
                |a| {
                    let old = angles[c];
                    angles[c] = a;
                    let g = scratch.gain(pairs, angles, k);
                    angles[c] = old;
                    g
                },
                5e-3,
            );
            if fx > best {
                angles[c] = x;
                best = fx;
            }
        }
        if best - before < 1e-9 {
            break;
        }
    }
    best
}

/// Optimize the rotation angles of a fixed ordered branch-pair sequence
/// (1-based pairs). Returns angles in [0, pi/2) and the achieved gain with
/// the KLT gain as reference.
pub fn optimize_angles(
    pairs: &[(usize, usize)],
    k: &CorrelationModel,
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, CodingGainDb)> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("at least one branch pair required".into()));
    }
    for &(i, j) in pairs {
        PlaneRotation::new(i, j, 0.0)?;
        if i > k.n || j > k.n {
            return Err(Error::InvalidParameter(format!("pair ({i}, {j}) out of range for n={}", k.n)));
        }
    }
    if config.restarts == 0 || config.angle_tolerance <= 0.0 {
        return Err(Error::InvalidParameter("restarts >= 1 and angle_tolerance > 0 required".into()));
    }
    let pairs0: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    let mut scratch = Scratch::new(k);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..config.restarts {
        let mut angles: Vec<f64> = if r == 0 {
            vec![FRAC_PI_4; pairs.len()]
        } else {
            (0..pairs.len()).map(|_| rng.gen_range(0.0..FRAC_PI_2)).collect()
        };
        let g = local_maximize(&pairs0, &mut angles, k, &mut scratch, config.angle_tolerance);
        if best.as_ref().map_or(true, |(bg, _)| g > *bg) {
            best = Some((g, angles));
        }
    }
    let (g, angles) = best.unwrap();
    let klt = coding_gain(&klt_matrix(k)?, k)?.value;
    Ok((angles, CodingGainDb { value: g, reference: Some(klt) }))
}

/// All canonical branch pairs (i < j), 1-based.
pub fn branch_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            v.push((i, j));
        }
    }
    v
}

/// True when the sequence groups into consecutive stages of n/2 pairwise
/// disjoint pairs (last stage may be partial).
pub fn parallel_stage_compatible(pairs: &[(usize, usize)], n: usize) -> bool {
    let h = (n / 2).max(1);
    for stage in pairs.chunks(h) {
        for (a, &(i1, j1)) in stage.iter().enumerate() {
            for &(i2, j2) in &stage[a + 1..] {
                if i1 == i2 || i1 == j2 || j1 == i2 || j1 == j2 {
                    return false;
                }
            }
        }
    }
    true
}

/// Exhaustive search over all ordered branch-pair sequences of length `l`,
/// with continuous angle optimization at every point. Only small n is
/// feasible; the search space is C(n,2)^l points.
pub fn search_cascade(
    n: usize,
    l: usize,
    k: &CorrelationModel,
    config: &OptimizerConfig,
) -> Result<RotationCascade> {
    if n != k.n {
        return Err(Error::InvalidParameter("n must match the correlation model".into()));
    }
    if l == 0 {
        return Err(Error::InvalidParameter("cascade length must be >= 1".into()));
    }
    let pairs = branch_pairs(n);
    let space = (pairs.len() as f64).powi(l as i32);
    if n > 4 {
        return Err(Error::SearchBudget(format!(
            "exhaustive search limited to n <= 4; n={n}, L={l} spans {space:.3e} points"
        )));
    }
    if space > 1e6 {
        return Err(Error::SearchBudget(format!(
            "search space C({n},2)^{l} = {space:.3e} points exceeds the exhaustive budget"
        )));
    }
    let num_seq = pairs.len().pow(l as u32);

    // For large spaces, a cheap deterministic coordinate-ascent screen ranks
    // every sequence first and only the survivors get the full multistart
    // optimization. Near-optimal sequences are plentiful, so a generous
    // shortlist loses nothing measurable.
    const FULL_SEARCH_LIMIT: usize = 1_000;
    const SHORTLIST: usize = 128;
    let screening = num_seq > FULL_SEARCH_LIMIT;
    let candidates: Vec<usize> = if !screening {
        (0..num_seq).collect()
    } else {
        let mut screened: Vec<(f64, usize)> = (0..num_seq)
            .into_par_iter()
            .map_init(
                || Scratch::new(k),
                |scratch, s| {
                    let seq = decode_sequence(s, l, &pairs);
                    if config.parallel_only && !parallel_stage_compatible(&seq, n) {
                        return (f64::NEG_INFINITY, s);
                    }
                    let seq0: Vec<(usize, usize)> =
                        seq.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
                    let mut angles = vec![FRAC_PI_4; l];
                    (screen_maximize(&seq0, &mut angles, k, scratch), s)
                },
            )
            .collect();
        screened.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        screened
            .into_iter()
            .take(SHORTLIST)
            .filter(|&(g, _)| g > f64::NEG_INFINITY)
            .map(|(_, s)| s)
            .collect()
    };

    let results: Vec<Option<(usize, f64, Vec<f64>)>> = candidates
        .into_par_iter()
        .map(|s| {
            let seq = decode_sequence(s, l, &pairs);
            if config.parallel_only && !parallel_stage_compatible(&seq, n) {
                return None;
            }
            let mut cfg = config.clone();
            cfg.seed = config.seed ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            if screening {
                // cheap pass over the shortlist; the winner gets the full
                // multistart budget below
                cfg.restarts = cfg.restarts.min(4);
            }
            let (angles, g) = optimize_angles(&seq, k, &cfg).expect("validated inputs");
            Some((s, g.value, angles))
        })
        .collect();
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for r in results.into_iter() {
        if let Some((s, g, angles)) = r {
            // higher gain wins; near-exact ties go to the lexicographically
            // smallest pair sequence (= smallest index s)
            let better = match &best {
                None => true,
                Some((bs, bg, _)) => g > *bg + 1e-12 || (g > *bg - 1e-12 && s < *bs),
            };
            if better {
                best = Some((s, g, angles));
            }
        }
    }
    let (s, mut g, mut angles) =
        best.ok_or_else(|| Error::SearchBudget("no feasible sequence under the constraints".into()))?;
    let seq = decode_sequence(s, l, &pairs);
    if screening {
        let mut cfg = config.clone();
        cfg.seed = config.seed ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let (a_full, g_full) = optimize_angles(&seq, k, &cfg)?;
        if g_full.value > g {
            g = g_full.value;
            angles = a_full;
        }
    }
    let rotations = seq
        .iter()
        .zip(&angles)
        .map(|(&(i, j), &a)| PlaneRotation::new(i, j, a.clamp(0.0, ANGLE_HI)))
        .collect::<Result<Vec<_>>>()?;
    let klt = coding_gain(&klt_matrix(k)?, k)?.value;
    Ok(RotationCascade { n, rotations, gain: Some(CodingGainDb { value: g, reference: Some(klt) }) })
}

fn decode_sequence(mut s: usize, l: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut seq = vec![(0usize, 0usize); l];
    for slot in (0..l).rev() {
        seq[slot] = pairs[s % pairs.len()];
        s /= pairs.len();
    }
    seq
}

/// Faster sub-optimal alternative: grow the cascade one rotation at a time,
/// picking the pair whose jointly re-optimized angles give the best gain.
pub fn greedy_cascade(
    n: usize,
    l: usize,
    k: &CorrelationModel,
    config: &OptimizerConfig,
) -> Result<RotationCascade> {
    if l == 0 {
        return Err(Error::InvalidParameter("cascade length must be >= 1".into()));
    }
    let pairs = branch_pairs(n);
    let mut seq: Vec<(usize, usize)> = Vec::new();
    let mut chosen: Option<(Vec<f64>, CodingGainDb)> = None;
    for step in 0..l {
        let mut best: Option<((usize, usize), Vec<f64>, CodingGainDb)> = None;
        for &p in &pairs {
            let mut trial = seq.clone();
            trial.push(p);
            if config.parallel_only && !parallel_stage_compatible(&trial, n) {
                continue;
            }
            let mut cfg = config.clone();
            cfg.seed = config.seed.wrapping_add(step as u64);
            let (angles, g) = optimize_angles(&trial, k, &cfg)?;
            if best.as_ref().map_or(true, |(_, _, bg)| g.value > bg.value + 1e-12) {
                best = Some((p, angles, g));
            }
        }
        let (p, angles, g) =
            best.ok_or_else(|| Error::SearchBudget("no feasible greedy extension".into()))?;
        seq.push(p);
        chosen = Some((angles, g));
    }
    let (angles, g) = chosen.unwrap();
    let rotations = seq
        .iter()
        .zip(&angles)
        .map(|(&(i, j), &a)| PlaneRotation::new(i, j, a.clamp(0.0, ANGLE_HI)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RotationCascade { n, rotations, gain: Some(g) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::residual_autocorrelation;
    use crate::transforms::coding_gain_matrix;

    fn k95(n: usize) -> CorrelationModel {
        residual_autocorrelation(0.95, n).unwrap()
    }

    #[test]
    fn rotation_matrix_shape() {
        let r = PlaneRotation::new(1, 2, 0.0).unwrap();
        let m = rotation_matrix(&r, 4).unwrap();
        assert!(m.entries.max_abs_diff(&Mat::identity(4)) == 0.0);
        let r = PlaneRotation::new(1, 2, FRAC_PI_4).unwrap();
        let m = rotation_matrix(&r, 2).unwrap().entries;
        let h = 0.5f64.sqrt();
        let want = Mat::from_rows(&[vec![h, h], vec![-h, h]]).unwrap();
        assert!(m.max_abs_diff(&want) < 1e-15);
        assert!((m.det() - 1.0).abs() < 1e-12);
        assert!(PlaneRotation::new(2, 2, 0.1).is_err());
        assert!(PlaneRotation::new(1, 2, FRAC_PI_2).is_err());
        assert!(rotation_matrix(&PlaneRotation::new(1, 5, 0.1).unwrap(), 4).is_err());
    }

    #[test]
    fn disjoint_rotations_commute() {
        let a = PlaneRotation::new(1, 2, 0.3).unwrap();
        let b = PlaneRotation::new(3, 4, 1.1).unwrap();
        let ab = RotationCascade { n: 4, rotations: vec![a, b], gain: None }.matrix().unwrap();
        let ba = RotationCascade { n: 4, rotations: vec![b, a], gain: None }.matrix().unwrap();
        assert!(ab.max_abs_diff(&ba) < 1e-15);
    }

    #[test]
    fn cascade_matrix_order() {
        // single rotation cascade equals the rotation matrix
        let r = PlaneRotation::new(1, 3, 0.7).unwrap();
        let c = RotationCascade { n: 3, rotations: vec![r], gain: None };
        assert!(c.matrix().unwrap().max_abs_diff(&rotation_matrix(&r, 3).unwrap().entries) < 1e-15);
        // two rotations: composed = P2 * P1
        let r1 = PlaneRotation::new(1, 2, 0.4).unwrap();
        let r2 = PlaneRotation::new(2, 3, 0.9).unwrap();
        let c = RotationCascade { n: 3, rotations: vec![r1, r2], gain: None };
        let want = rotation_matrix(&r2, 3).unwrap().entries.mul(&rotation_matrix(&r1, 3).unwrap().entries);
        assert!(c.matrix().unwrap().max_abs_diff(&want) < 1e-15);
        assert!(c.matrix().unwrap().orthonormality_error() < 1e-12);
    }

    #[test]
    fn serialization_round_trip() {
        let c = RotationCascade {
            n: 4,
            rotations: vec![
                PlaneRotation::new(1, 4, 0.785_348_866_9).unwrap(),
                PlaneRotation::new(2, 3, 0.603_568_195_8).unwrap(),
            ],
            gain: None,
        };
        let d = RotationCascade::from_text(&c.to_text()).unwrap();
        assert_eq!(d.n, 4);
        assert_eq!(d.rotations.len(), 2);
        for (a, b) in c.rotations.iter().zip(&d.rotations) {
            assert_eq!(a.i, b.i);
            assert_eq!(a.j, b.j);
            assert!((a.alpha - b.alpha).abs() < 1e-15);
        }
        assert!(RotationCascade::from_text("4").is_err());
    }

    #[test]
    fn two_point_search_diagonalizes() {
        let k = k95(2);
        let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
        let c = search_cascade(2, 1, &k, &cfg).unwrap();
        let t = c.matrix().unwrap();
        let klt_gain = c.gain.unwrap().reference.unwrap();
        assert!((c.gain.unwrap().value - klt_gain).abs() < 1e-4);
        // returned rotation diagonalizes K
        let full = t.mul(&k.matrix).mul(&t.transpose());
        assert!(full[(0, 1)].abs() < 1e-5, "off-diagonal {}", full[(0, 1)]);
        // analytic diagonalizing angle (or its pi/2 complement)
        let theta = 0.5 * (2.0 * k.matrix[(0, 1)]).atan2(k.matrix[(0, 0)] - k.matrix[(1, 1)]);
        let theta = theta.rem_euclid(FRAC_PI_2);
        let a = c.rotations[0].alpha;
        let diff = (a - theta).abs();
        let d = diff.min((diff - FRAC_PI_2).abs());
        assert!(d < 1e-4, "angle {a} vs analytic {theta}");
    }

    #[test]
    fn identity_source_gain_zero() {
        let k = CorrelationModel { rho: 0.0, n: 3, matrix: Mat::identity(3) };
        let (_, g) = optimize_angles(&[(1, 2), (2, 3)], &k, &OptimizerConfig { restarts: 2, ..Default::default() }).unwrap();
        assert!(g.value.abs() < 1e-9);
    }

    #[test]
    fn parallel_compatibility_rule() {
        assert!(parallel_stage_compatible(&[(2, 4), (1, 3), (3, 4), (1, 2)], 4));
        assert!(!parallel_stage_compatible(&[(1, 2), (1, 3)], 4));
        assert!(parallel_stage_compatible(&[(1, 2), (3, 4), (1, 3)], 4));
    }

    #[test]
    fn search_is_deterministic() {
        let k = k95(4);
        let cfg = OptimizerConfig { restarts: 3, ..Default::default() };
        let a = search_cascade(4, 2, &k, &cfg).unwrap();
        let b = search_cascade(4, 2, &k, &cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn budget_errors() {
        let k = k95(8);
        let err = search_cascade(8, 4, &k, &OptimizerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::SearchBudget(_)));
        let k = k95(4);
        assert!(matches!(search_cascade(4, 9, &k, &OptimizerConfig::default()), Err(Error::SearchBudget(_))));
    }

    #[test]
    fn search_l2_matches_reference() {
        let k = k95(4);
        let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
        let c = search_cascade(4, 2, &k, &cfg).unwrap();
        let g = c.gain.unwrap();
        let rel = g.relative().unwrap();
        assert!((rel + 0.7593).abs() < 0.005, "relative gain {rel}");
        // composed transform stays orthogonal and gain matches a re-evaluation
        let m = c.matrix().unwrap();
        assert!(m.orthonormality_error() < 1e-10);
        let re = coding_gain_matrix(&m, &k).unwrap().value;
        assert!((re - g.value).abs() < 1e-9);
    }

    #[test]
    fn greedy_runs() {
        let k = k95(4);
        let cfg = OptimizerConfig { restarts: 2, ..Default::default() };
        let c = greedy_cascade(4, 2, &k, &cfg).unwrap();
        assert_eq!(c.rotations.len(), 2);
        assert!(c.gain.unwrap().relative().unwrap() <= 1e-9);
    }
}
