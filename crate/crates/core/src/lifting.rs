//! Conversion of rotation cascades into integer-to-integer lifting networks:
//! per-rotation lifting decompositions, commutation of all scaling factors to
//! the branch ends, parameter quantization to k/2^l, and selection of the
//! decomposition-type combination with the best quantized gain and the
//! least-scaled branches.

use crate::error::{Error, Result};
use crate::fastdst::{FlowGraph, FlowOp};
use crate::markov::CorrelationModel;
use crate::matrix::Mat;
use crate::rotation::RotationCascade;
use crate::transforms::{coding_gain_vs_klt, CodingGainDb};
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DecompType {
    ThreeLift,
    Type1,
    Type2,
    Type3,
    Type4,
}

pub const TWO_LIFT_TYPES: [DecompType; 4] =
    [DecompType::Type1, DecompType::Type2, DecompType::Type3, DecompType::Type4];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftBranch {
    /// upper += param * lower
    Upper,
    /// lower += param * upper
    Lower,
}

#[derive(Debug, Clone)]
pub struct LiftDecomposition {
    pub type_id: DecompType,
    /// Lifting sub-steps in application order.
    pub steps: Vec<(LiftBranch, f64)>,
    /// Scaling factors applied after the lifting steps: (upper branch, lower
    /// branch). None for the scale-free three-lift form.
    pub scales: Option<(f64, f64)>,
    /// Types 3 and 4 deliver their outputs on swapped branches.
    pub permutes_outputs: bool,
}

impl LiftDecomposition {
    /// Composed 2x2 matrix (upper branch = row 0), including scales and the
    /// output permutation; must equal the plane rotation of the source angle.
    pub fn local_matrix(&self) -> Mat {
        let mut m = Mat::identity(2);
        for &(branch, p) in &self.steps {
            let (dst, src) = match branch {
                LiftBranch::Upper => (0, 1),
                LiftBranch::Lower => (1, 0),
            };
            for col in 0..2 {
                let add = p * m[(src, col)];
                m[(dst, col)] += add;
            }
        }
        if let Some((ku, kl)) = self.scales {
            for col in 0..2 {
                m[(0, col)] *= ku;
                m[(1, col)] *= kl;
            }
        }
        if self.permutes_outputs {
            for col in 0..2 {
                let t = m[(0, col)];
                m[(0, col)] = m[(1, col)];
                m[(1, col)] = t;
            }
        }
        m
    }
}

/// Three lifting steps, no scaling: lower += q*upper, upper += r*lower,
/// lower += q*upper with q = (cos a - 1)/sin a, r = sin a.
pub fn decompose_three_lift(alpha: f64) -> Result<LiftDecomposition> {
    let (s, c) = alpha.sin_cos();
    if s == 0.0 {
        return Err(Error::InvalidParameter(
            "three-lift decomposition undefined at alpha = 0; emit a pass-through instead".into(),
        ));
    }
    let q = (c - 1.0) / s;
    Ok(LiftDecomposition {
        type_id: DecompType::ThreeLift,
        steps: vec![(LiftBranch::Lower, q), (LiftBranch::Upper, s), (LiftBranch::Lower, q)],
        scales: None,
        permutes_outputs: false,
    })
}

/// Two lifting steps plus two scaling factors; four equivalent variants that
/// differ in which branch carries which scale and whether outputs swap.
pub fn decompose_two_lift(alpha: f64, type_id: DecompType) -> Result<LiftDecomposition> {
    let (s, c) = alpha.sin_cos();
    let t = alpha.tan();
    let sc = s * c;
    use DecompType::*;
    use LiftBranch::*;
    let (steps, scales, permutes) = match type_id {
        ThreeLift => return decompose_three_lift(alpha),
        Type1 => (vec![(Upper, t), (Lower, -sc)], (c, 1.0 / c), false),
        Type2 => (vec![(Lower, -t), (Upper, sc)], (1.0 / c, c), false),
        Type3 | Type4 if s == 0.0 => {
            return Err(Error::InvalidParameter(format!(
                "type {type_id:?} is singular at alpha = 0"
            )))
        }
        Type3 => (vec![(Upper, -1.0 / t), (Lower, sc)], (-s, 1.0 / s), true),
        Type4 => (vec![(Lower, 1.0 / t), (Upper, -sc)], (-1.0 / s, s), true),
    };
    Ok(LiftDecomposition { type_id, steps, scales: Some(scales), permutes_outputs: permutes })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftingStep {
    /// 0-based wire indices: dst += param * src.
    pub src: usize,
    pub dst: usize,
    pub param: f64,
}

/// Move a (scale_src, scale_dst) pair from before a lifting step to after it;
/// the step parameter becomes param * scale_src / scale_dst.
pub fn commute_scaling(step: LiftingStep, scale_src: f64, scale_dst: f64) -> Result<LiftingStep> {
    if scale_src == 0.0 || scale_dst == 0.0 {
        return Err(Error::InvalidParameter("zero scale cannot be commuted".into()));
    }
    Ok(LiftingStep { param: step.param * scale_src / scale_dst, ..step })
}

#[derive(Debug, Clone)]
pub struct LiftingNetwork {
    pub n: usize,
    pub steps: Vec<LiftingStep>,
    /// Per-output scale B_m collected at the branch ends (sign flips included).
    pub branch_scales: Vec<f64>,
    /// Output m reads wire output_permutation[m].
    pub output_permutation: Vec<usize>,
}

fn steps_matrix(n: usize, params: impl Iterator<Item = (usize, usize, f64)>) -> Mat {
    let mut m = Mat::identity(n);
    for (src, dst, p) in params {
        for col in 0..n {
            let add = p * m[(src, col)];
            m[(dst, col)] += add;
        }
    }
    m
}

impl LiftingNetwork {
    /// Full real matrix: diag(B) * permutation * product of lifting steps.
    pub fn matrix(&self) -> Mat {
        let inner = self.matrix_scales_omitted();
        let mut out = Mat::zeros(self.n);
        for row in 0..self.n {
            for col in 0..self.n {
                out[(row, col)] = self.branch_scales[row] * inner[(row, col)];
            }
        }
        out
    }

    /// Matrix actually realized at execution time (scales dropped).
    pub fn matrix_scales_omitted(&self) -> Mat {
        let inner = steps_matrix(self.n, self.steps.iter().map(|s| (s.src, s.dst, s.param)));
        let mut out = Mat::zeros(self.n);
        for (row, &w) in self.output_permutation.iter().enumerate() {
            for col in 0..self.n {
                out[(row, col)] = inner[(w, col)];
            }
        }
        out
    }

    /// "Least scaled" figure: max_m |log |B_m||.
    pub fn scale_score(&self) -> f64 {
        self.branch_scales.iter().map(|b| b.abs().ln().abs()).fold(0.0, f64::max)
    }

    pub fn scale_product(&self) -> f64 {
        self.branch_scales.iter().product()
    }
}

/// Shared builder: replace every rotation of a wire-level op stream with the
/// assigned lifting decomposition, commuting accumulated scales through each
/// new step and tracking which wire carries which logical branch.
fn ops_to_lifting(
    n: usize,
    ops: &[FlowOp],
    output_logical: &[usize],
    combo: &[DecompType],
) -> Result<LiftingNetwork> {
    let rot_count = ops.iter().filter(|o| matches!(o, FlowOp::Rot { .. })).count();
    if combo.len() != rot_count {
        return Err(Error::InvalidParameter(format!(
            "type combination length {} does not match rotation count {rot_count}",
            combo.len()
        )));
    }
    let mut pos: Vec<usize> = (0..n).collect(); // logical branch -> physical wire
    let mut scale = vec![1.0f64; n]; // accumulated scale per physical wire
    let mut steps: Vec<LiftingStep> = Vec::new();
    let mut next_type = combo.iter();
    for (op_idx, op) in ops.iter().enumerate() {
        match *op {
            FlowOp::Flip { i } => scale[pos[i]] = -scale[pos[i]],
            FlowOp::Rot { i, j, alpha } => {
                let ty = *next_type.next().unwrap();
                if alpha == 0.0 {
                    continue; // identity pass-through
                }
                let (wi, wj) = (pos[i], pos[j]);
                let d = decompose_two_lift(alpha, ty).map_err(|e| {
                    Error::InvalidParameter(format!("rotation {}: {e}", op_idx + 1))
                })?;
                for &(branch, p) in &d.steps {
                    let (src, dst) = match branch {
                        LiftBranch::Upper => (wj, wi),
                        LiftBranch::Lower => (wi, wj),
                    };
                    steps.push(commute_scaling(LiftingStep { src, dst, param: p }, scale[src], scale[dst])?);
                }
                if let Some((ku, kl)) = d.scales {
                    scale[wi] *= ku;
                    scale[wj] *= kl;
                }
                if d.permutes_outputs {
                    pos[i] = wj;
                    pos[j] = wi;
                }
            }
        }
    }
    let output_permutation: Vec<usize> = output_logical.iter().map(|&m| pos[m]).collect();
    let branch_scales: Vec<f64> = output_permutation.iter().map(|&w| scale[w]).collect();
    Ok(LiftingNetwork { n, steps, branch_scales, output_permutation })
}

/// Rotation cascade -> lifting network, one decomposition type per rotation.
pub fn cascade_to_lifting(cascade: &RotationCascade, combo: &[DecompType]) -> Result<LiftingNetwork> {
    let ops: Vec<FlowOp> = cascade
        .rotations
        .iter()
        .map(|r| FlowOp::Rot { i: r.i - 1, j: r.j - 1, alpha: r.alpha })
        .collect();
    let logical: Vec<usize> = (0..cascade.n).collect();
    ops_to_lifting(cascade.n, &ops, &logical, combo)
}

/// Flow graph (rotations + sign flips + output wiring) -> lifting network.
pub fn flow_to_lifting(flow: &FlowGraph, combo: &[DecompType]) -> Result<LiftingNetwork> {
    ops_to_lifting(flow.n, &flow.ops, &flow.output_wires, combo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizedStep {
    pub src: usize,
    pub dst: usize,
    /// Parameter numerator: the step parameter is k / 2^l.
    pub k: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedLiftingNetwork {
    pub n: usize,
    /// Shared precision: parameters are k / 2^l.
    pub l: u32,
    pub steps: Vec<QuantizedStep>,
    /// The dropped per-branch scales, kept as metadata.
    pub branch_scales: Vec<f64>,
    pub output_permutation: Vec<usize>,
}

/// Round-half-away-from-zero quantization of every parameter to k / 2^l.
pub fn quantize_network(net: &LiftingNetwork, l: u32) -> Result<QuantizedLiftingNetwork> {
    if l < 1 || l > 40 {
        return Err(Error::InvalidParameter(format!("precision l={l} outside [1, 40]")));
    }
    let scale = (1u64 << l) as f64;
    let bound = 1i64 << (l + 4);
    let steps = net
        .steps
        .iter()
        .map(|s| {
            let k = (s.param.abs() * scale + 0.5).floor() as i64 * s.param.signum() as i64;
            if k.abs() >= bound {
                return Err(Error::Overflow(format!(
                    "quantized parameter {} exceeds |k| < 2^(l+4) at l={l}",
                    s.param
                )));
            }
            Ok(QuantizedStep { src: s.src, dst: s.dst, k })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedLiftingNetwork {
        n: net.n,
        l,
        steps,
        branch_scales: net.branch_scales.clone(),
        output_permutation: net.output_permutation.clone(),
    })
}

impl QuantizedLiftingNetwork {
    /// Real matrix realized at execution (parameters k/2^l, scales omitted).
    pub fn real_matrix(&self) -> Mat {
        let scale = (1u64 << self.l) as f64;
        let inner =
            steps_matrix(self.n, self.steps.iter().map(|s| (s.src, s.dst, s.k as f64 / scale)));
        let mut out = Mat::zeros(self.n);
        for (row, &w) in self.output_permutation.iter().enumerate() {
            for col in 0..self.n {
                out[(row, col)] = inner[(w, col)];
            }
        }
        out
    }

    /// Text form: `n l num_steps`, one `src dst k` line per step (1-based
    /// wires), the output permutation (1-based), then the B_m metadata line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.n, self.l, self.steps.len());
        for st in &self.steps {
            let _ = writeln!(s, "{} {} {}", st.src + 1, st.dst + 1, st.k);
        }
        let perm: Vec<String> = self.output_permutation.iter().map(|p| (p + 1).to_string()).collect();
        let _ = writeln!(s, "{}", perm.join(" "));
        let scales: Vec<String> = self.branch_scales.iter().map(|b| format!("{b:.16e}")).collect();
        let _ = writeln!(s, "{}", scales.join(" "));
        s
    }

    pub fn from_text(text: &str) -> Result<QuantizedLiftingNetwork> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::Format("empty network file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_tok(it.next(), "n")?;
        let l: u32 = parse_tok(it.next(), "l")?;
        let num_steps: usize = parse_tok(it.next(), "num_steps")?;
        if n == 0 {
            return Err(Error::Format("network size must be positive".into()));
        }
        let mut steps = Vec::with_capacity(num_steps);
        for idx in 0..num_steps {
            let line =
                lines.next().ok_or_else(|| Error::Format(format!("missing step line {}", idx + 1)))?;
            let mut it = line.split_whitespace();
            let src: usize = parse_tok(it.next(), "src")?;
            let dst: usize = parse_tok(it.next(), "dst")?;
            let k: i64 = parse_tok(it.next(), "k")?;
            if src == 0 || dst == 0 || src > n || dst > n || src == dst {
                return Err(Error::Format(format!("bad step wires {src} {dst}")));
            }
            steps.push(QuantizedStep { src: src - 1, dst: dst - 1, k });
        }
        let perm_line = lines.next().ok_or(Error::Format("missing permutation line".into()))?;
        let output_permutation: Vec<usize> = perm_line
            .split_whitespace()
            .map(|t| parse_tok::<usize>(Some(t), "permutation"))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .map(|p| p.wrapping_sub(1))
            .collect();
        if output_permutation.len() != n || output_permutation.iter().any(|&p| p >= n) {
            return Err(Error::Format("bad output permutation".into()));
        }
        let scale_line = lines.next().ok_or(Error::Format("missing branch-scale line".into()))?;
        let branch_scales: Vec<f64> = scale_line
            .split_whitespace()
            .map(|t| parse_tok(Some(t), "branch scale"))
            .collect::<Result<Vec<_>>>()?;
        if branch_scales.len() != n {
            return Err(Error::Format("bad branch-scale line".into()));
        }
        Ok(QuantizedLiftingNetwork { n, l, steps, branch_scales, output_permutation })
    }

    /// FNV-1a hash of the serialized form; embedded in bitstream headers so a
    /// decoder can detect mismatched network files.
    pub fn fingerprint(&self) -> u32 {
        fnv1a(self.to_text().as_bytes())
    }
}

pub fn fnv1a(bytes: &[u8]) -> u32 {
    let mut h: u32 = 0x811c_9dc5;
    for &b in bytes {
        h ^= b as u32;
        h = h.wrapping_mul(0x0100_0193);
    }
    h
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let t = tok.ok_or_else(|| Error::Format(format!("missing field {what}")))?;
    t.parse().map_err(|e| Error::Format(format!("bad {what} {t:?}: {e}")))
}

/// Coding gain of the network as executed (quantized parameters, scales
/// omitted), with the KLT gain as reference.
pub fn lifting_coding_gain(qnet: &QuantizedLiftingNetwork, k: &CorrelationModel) -> Result<CodingGainDb> {
    if qnet.n != k.n {
        return Err(Error::InvalidParameter("network size does not match source".into()));
    }
    coding_gain_vs_klt(&qnet.real_matrix(), k)
}

struct Candidate {
    combo: Vec<DecompType>,
    qnet: QuantizedLiftingNetwork,
    gain: f64,
    score: f64,
    product_positive: bool,
}

/// Ranking rule: keep candidates within 0.005 dB of the best gain, prefer the
/// least-scaled network (max |log|B||), break near-ties (1e-3) in favor of a
/// positive scale product, then the lexicographically smallest combination.
fn rank_candidates(mut cands: Vec<Candidate>) -> Result<(Vec<DecompType>, QuantizedLiftingNetwork)> {
    if cands.is_empty() {
        return Err(Error::SearchBudget("no feasible type combination".into()));
    }
    let best_gain = cands.iter().map(|c| c.gain).fold(f64::NEG_INFINITY, f64::max);
    cands.retain(|c| c.gain >= best_gain - 0.005);
    cands.sort_by(|a, b| {
        let band_a = (a.score / 1e-3).round() as i64;
        let band_b = (b.score / 1e-3).round() as i64;
        band_a
            .cmp(&band_b)
            .then(b.product_positive.cmp(&a.product_positive))
            .then(a.combo.cmp(&b.combo))
    });
    let top = cands.into_iter().next().unwrap();
    Ok((top.combo, top.qnet))
}

fn evaluate_combo(
    build: &dyn Fn(&[DecompType]) -> Result<LiftingNetwork>,
    combo: &[DecompType],
    k: &CorrelationModel,
    l: u32,
) -> Option<Candidate> {
    let net = build(combo).ok()?;
    let qnet = quantize_network(&net, l).ok()?;
    let gain = lifting_coding_gain(&qnet, k).ok()?.value;
    Some(Candidate {
        combo: combo.to_vec(),
        gain,
        score: net.scale_score(),
        product_positive: net.scale_product() > 0.0,
        qnet,
    })
}

fn enumerate_combos(
    build: &dyn Fn(&[DecompType]) -> Result<LiftingNetwork>,
    num_rotations: usize,
    k: &CorrelationModel,
    l: u32,
) -> Result<(Vec<DecompType>, QuantizedLiftingNetwork)> {
    let total = 4usize.pow(num_rotations as u32);
    let mut cands = Vec::new();
    for idx in 0..total {
        let mut c = idx;
        let combo: Vec<DecompType> = (0..num_rotations)
            .map(|_| {
                let t = TWO_LIFT_TYPES[c % 4];
                c /= 4;
                t
            })
            .collect();
        if let Some(cand) = evaluate_combo(build, &combo, k, l) {
            cands.push(cand);
        }
    }
    rank_candidates(cands)
}

/// Enumerate all 4^L two-lift type combinations for a cascade (L <= 8) and
/// return the ranked-best quantized network.
pub fn select_design(
    cascade: &RotationCascade,
    k: &CorrelationModel,
    l: u32,
) -> Result<(Vec<DecompType>, QuantizedLiftingNetwork)> {
    let num = cascade.rotations.len();
    if num > 8 {
        return Err(Error::SearchBudget(format!(
            "4^{num} type combinations exceed the enumeration budget (L <= 8)"
        )));
    }
    let build = |combo: &[DecompType]| cascade_to_lifting(cascade, combo);
    enumerate_combos(&build, num, k, l)
}

/// Type selection for factored transforms. Small rotation counts are
/// enumerated; larger ones use a beam search (width 512) that grows type
/// assignments while minimizing the running max |log|scale||, then applies
/// the same ranking to the surviving candidates.
pub fn select_design_factored(
    flow: &FlowGraph,
    k: &CorrelationModel,
    l: u32,
) -> Result<(Vec<DecompType>, QuantizedLiftingNetwork)> {
    let num = flow.rotation_count();
    let build = |combo: &[DecompType]| flow_to_lifting(flow, combo);
    if num <= 8 {
        return enumerate_combos(&build, num, k, l);
    }
    const WIDTH: usize = 512;
    const FINALISTS: usize = 300;
    struct State {
        pos: Vec<usize>,
        scale: Vec<f64>,
        types: Vec<DecompType>,
    }
    let score_of = |scale: &[f64]| scale.iter().map(|s| s.abs().ln().abs()).fold(0.0, f64::max);
    let mut states =
        vec![State { pos: (0..flow.n).collect(), scale: vec![1.0; flow.n], types: Vec::new() }];
    for op in &flow.ops {
        match *op {
            FlowOp::Flip { i } => {
                for st in &mut states {
                    let w = st.pos[i];
                    st.scale[w] = -st.scale[w];
                }
            }
            FlowOp::Rot { i, j, alpha } => {
                let mut next = Vec::with_capacity(states.len() * 4);
                for st in &states {
                    let (wi, wj) = (st.pos[i], st.pos[j]);
                    for &ty in &TWO_LIFT_TYPES {
                        let d = match decompose_two_lift(alpha, ty) {
                            Ok(d) => d,
                            Err(_) => continue,
                        };
                        let (ku, kl) = d.scales.unwrap();
                        let mut scale = st.scale.clone();
                        scale[wi] *= ku;
                        scale[wj] *= kl;
                        let mut pos = st.pos.clone();
                        if d.permutes_outputs {
                            pos[i] = wj;
                            pos[j] = wi;
                        }
                        let mut types = st.types.clone();
                        types.push(ty);
                        next.push(State { pos, scale, types });
                    }
                }
                next.sort_by(|a, b| {
                    score_of(&a.scale).total_cmp(&score_of(&b.scale)).then(a.types.cmp(&b.types))
                });
                next.truncate(WIDTH);
                states = next;
            }
        }
    }
    let mut cands = Vec::new();
    for st in states.iter().take(FINALISTS) {
        if let Some(cand) = evaluate_combo(&build, &st.types, k, l) {
            cands.push(cand);
        }
    }
    rank_candidates(cands)
}

/// Integer-friendly 4-point DCT: the classical butterfly factorization
/// rewritten as plane rotations and sign flips, with decomposition types
/// hand-picked so the DC branch accumulates a scale of exactly 2 -- omitting
/// it makes the DC output the average of the inputs, exactly, for integers.
pub fn dct4_lifting_network() -> Result<QuantizedLiftingNetwork> {
    let flow = dct4_flow();
    use DecompType::*;
    let combo = [Type2, Type2, Type2, Type1];
    let net = flow_to_lifting(&flow, &combo)?;
    quantize_network(&net, 6)
}

pub(crate) fn dct4_flow() -> FlowGraph {
    use FlowOp::*;
    FlowGraph {
        n: 4,
        ops: vec![
            Rot { i: 0, j: 3, alpha: FRAC_PI_4 },
            Flip { i: 3 },
            Rot { i: 1, j: 2, alpha: FRAC_PI_4 },
            Flip { i: 2 },
            Rot { i: 0, j: 1, alpha: FRAC_PI_4 },
            Flip { i: 1 },
            Rot { i: 3, j: 2, alpha: PI / 8.0 },
            Flip { i: 2 },
        ],
        output_wires: vec![0, 3, 1, 2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::residual_autocorrelation;
    use crate::rotation::{rotation_matrix, PlaneRotation};
    use crate::transforms::{coding_gain_vs_klt, dct2_matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_lift_values() {
        let d = decompose_three_lift(PI / 6.0).unwrap();
        assert!((d.steps[0].1 + 0.267_949).abs() < 1e-6);
        assert!((d.steps[1].1 - 0.5).abs() < 1e-12);
        let d = decompose_three_lift(FRAC_PI_4).unwrap();
        assert!((d.steps[0].1 - (1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((d.steps[1].1 - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(decompose_three_lift(0.0).is_err());
    }

    #[test]
    fn two_lift_values() {
        let d = decompose_two_lift(PI / 6.0, DecompType::Type1).unwrap();
        assert!((d.steps[0].1 - 0.577_350).abs() < 1e-6);
        assert!((d.steps[1].1 + 0.433_013).abs() < 1e-6);
        let (k1, k2) = d.scales.unwrap();
        assert!((k1 - 0.866_025).abs() < 1e-6);
        assert!((k2 - 1.154_701).abs() < 1e-6);
        assert!(!d.permutes_outputs);
        let d = decompose_two_lift(FRAC_PI_4, DecompType::Type3).unwrap();
        assert!((d.steps[0].1 + 1.0).abs() < 1e-12);
        assert!((d.steps[1].1 - 0.5).abs() < 1e-12);
        let (ku, kl) = d.scales.unwrap();
        assert!((ku + 0.5f64.sqrt()).abs() < 1e-12);
        assert!((kl - 2f64.sqrt()).abs() < 1e-12);
        assert!(d.permutes_outputs);
        assert!(decompose_two_lift(0.0, DecompType::Type4).is_err());
    }

    #[test]
    fn decompositions_reproduce_rotations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let alpha = rng.gen_range(1e-3..(std::f64::consts::FRAC_PI_2 - 1e-3));
            let want = rotation_matrix(&PlaneRotation::new(1, 2, alpha).unwrap(), 2).unwrap().entries;
            for ty in [DecompType::ThreeLift, DecompType::Type1, DecompType::Type2, DecompType::Type3, DecompType::Type4]
            {
                let d = decompose_two_lift(alpha, ty).unwrap();
                let err = d.local_matrix().max_abs_diff(&want);
                assert!(err < 1e-12, "type {ty:?} alpha {alpha} err {err}");
            }
        }
    }

    #[test]
    fn commute_scaling_examples() {
        let s = LiftingStep { src: 0, dst: 1, param: 0.5 };
        assert_eq!(commute_scaling(s, 2.0, 2.0).unwrap().param, 0.5);
        assert_eq!(commute_scaling(s, 2.0, 0.5).unwrap().param, 2.0);
        assert!(commute_scaling(s, 0.0, 1.0).is_err());
    }

    #[test]
    fn single_rotation_network() {
        let c = RotationCascade {
            n: 2,
            rotations: vec![PlaneRotation::new(1, 2, 0.6).unwrap()],
            gain: None,
        };
        let net = cascade_to_lifting(&c, &[DecompType::Type1]).unwrap();
        assert_eq!(net.steps.len(), 2);
        assert_eq!(net.output_permutation, vec![0, 1]);
        assert!((net.branch_scales[0] - 0.6f64.cos()).abs() < 1e-12);
        assert!(net.matrix().max_abs_diff(&c.matrix().unwrap()) < 1e-12);
    }

    #[test]
    fn random_cascades_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let types = TWO_LIFT_TYPES;
        for _ in 0..1000 {
            let n = 4;
            let l = rng.gen_range(1..=5);
            let rotations: Vec<PlaneRotation> = (0..l)
                .map(|_| {
                    let i = rng.gen_range(1..=n);
                    let mut j = rng.gen_range(1..=n);
                    while j == i {
                        j = rng.gen_range(1..=n);
                    }
                    PlaneRotation::new(i, j, rng.gen_range(1e-3..1.57)).unwrap()
                })
                .collect();
            let c = RotationCascade { n, rotations, gain: None };
            let combo: Vec<DecompType> = (0..l).map(|_| types[rng.gen_range(0..4)]).collect();
            let net = cascade_to_lifting(&c, &combo).unwrap();
            let err = net.matrix().max_abs_diff(&c.matrix().unwrap());
            assert!(err < 1e-9, "combo {combo:?} err {err}");
            let prod = net.scale_product();
            assert!((prod.abs() - 1.0).abs() < 1e-9, "product {prod}");
        }
    }

    #[test]
    fn quantizer_behaviour() {
        let net = LiftingNetwork {
            n: 2,
            steps: vec![LiftingStep { src: 0, dst: 1, param: 0.4142 }],
            branch_scales: vec![1.0, 1.0],
            output_permutation: vec![0, 1],
        };
        let q = quantize_network(&net, 3).unwrap();
        assert_eq!(q.steps[0].k, 3); // 0.4142 * 8 = 3.31 -> 3 (= 0.375)
        let net2 = LiftingNetwork {
            steps: vec![LiftingStep { src: 0, dst: 1, param: 0.375 }],
            ..net.clone()
        };
        let q2 = quantize_network(&net2, 3).unwrap();
        assert_eq!(q2.steps[0].k, 3); // exact fixed point unchanged
        // half-away-from-zero on negatives
        let net3 = LiftingNetwork {
            steps: vec![LiftingStep { src: 0, dst: 1, param: -0.3125 }],
            ..net.clone()
        };
        assert_eq!(quantize_network(&net3, 2).unwrap().steps[0].k, -1); // -1.25 -> -1
        let net4 = LiftingNetwork {
            steps: vec![LiftingStep { src: 0, dst: 1, param: -0.375 }],
            ..net
        };
        assert_eq!(quantize_network(&net4, 2).unwrap().steps[0].k, -2); // -1.5 -> -2
    }

    #[test]
    fn quantized_det_is_unimodular() {
        let c = RotationCascade {
            n: 3,
            rotations: vec![
                PlaneRotation::new(1, 2, 0.3).unwrap(),
                PlaneRotation::new(2, 3, 1.1).unwrap(),
            ],
            gain: None,
        };
        for combo in [[DecompType::Type1, DecompType::Type3], [DecompType::Type4, DecompType::Type2]] {
            let q = quantize_network(&cascade_to_lifting(&c, &combo).unwrap(), 4).unwrap();
            assert!((q.real_matrix().det().abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn serialization_round_trip() {
        let c = RotationCascade {
            n: 4,
            rotations: vec![
                PlaneRotation::new(1, 4, 0.785).unwrap(),
                PlaneRotation::new(2, 3, 0.6).unwrap(),
            ],
            gain: None,
        };
        let q = quantize_network(
            &cascade_to_lifting(&c, &[DecompType::Type4, DecompType::Type2]).unwrap(),
            5,
        )
        .unwrap();
        let r = QuantizedLiftingNetwork::from_text(&q.to_text()).unwrap();
        assert_eq!(q, r);
        assert_eq!(q.fingerprint(), r.fingerprint());
        assert!(QuantizedLiftingNetwork::from_text("2 3").is_err());
    }

    #[test]
    fn high_precision_quantization_recovers_gain() {
        let k = residual_autocorrelation(0.95, 4).unwrap();
        let c = RotationCascade {
            n: 4,
            rotations: vec![
                PlaneRotation::new(1, 4, 0.785).unwrap(),
                PlaneRotation::new(2, 4, 0.604).unwrap(),
                PlaneRotation::new(2, 3, 0.836).unwrap(),
                PlaneRotation::new(1, 2, 0.898).unwrap(),
            ],
            gain: None,
        };
        use DecompType::*;
        let net = cascade_to_lifting(&c, &[Type4, Type2, Type3, Type2]).unwrap();
        let q = quantize_network(&net, 40).unwrap();
        let g_q = lifting_coding_gain(&q, &k).unwrap().value;
        // scale-omission neutrality: quantized-at-l=40, scales-omitted gain
        // equals the gain of the exact scale-included cascade matrix
        let g_exact = coding_gain_vs_klt(&c.matrix().unwrap(), &k).unwrap().value;
        assert!((g_q - g_exact).abs() < 1e-6, "diff {}", g_q - g_exact);
    }

    #[test]
    fn select_design_single_rotation_tie() {
        let k = residual_autocorrelation(0.95, 2).unwrap();
        let c = RotationCascade {
            n: 2,
            rotations: vec![PlaneRotation::new(1, 2, FRAC_PI_4).unwrap()],
            gain: None,
        };
        // all four types realize the same rotation; selection must still be
        // deterministic and least-scaled
        let (combo, qnet) = select_design(&c, &k, 4).unwrap();
        assert_eq!(combo.len(), 1);
        let (combo2, qnet2) = select_design(&c, &k, 4).unwrap();
        assert_eq!(combo, combo2);
        assert_eq!(qnet, qnet2);
    }

    #[test]
    fn dct4_network_properties() {
        // the rotation/flip flow reproduces the orthonormal DCT exactly
        let flow = dct4_flow();
        let err = flow.matrix().max_abs_diff(&dct2_matrix(4).unwrap().entries);
        assert!(err < 1e-15, "flow err {err}");
        let q = dct4_lifting_network().unwrap();
        assert!((q.real_matrix().det().abs() - 1.0).abs() < 1e-12);
        // DC branch dropped a scale of exactly 2
        assert!((q.branch_scales[0] - 2.0).abs() < 1e-12);
        let k = residual_autocorrelation(0.95, 4).unwrap();
        let g = lifting_coding_gain(&q, &k).unwrap().relative().unwrap();
        let dct = coding_gain_vs_klt(&dct2_matrix(4).unwrap().entries, &k)
            .unwrap()
            .relative()
            .unwrap();
        assert!((g - dct).abs() < 0.05, "i2i DCT {g} vs exact {dct}");
    }
}
