//! Lossless intra encoder: quadtree partitioning (32 down to 4), per-leaf
//! intra mode search, and one of four residual paths per leaf (skip, RDPCM
//! horizontal/vertical, integer-to-integer transform) as dictated by the
//! profile. The residual path is never signaled; only split flags, modes, and
//! residual values hit the bitstream.

use super::bits::BitWriter;
use super::entropy::{cost_value, encode_value, RiceState};
use super::frame::Frame;
use super::intra::{build_references, predict};
use super::profile::{residual_path, CodecProfile, ResidualPath, NUM_MODES};
use super::stats::UsageReport;
use crate::error::{Error, Result};
use crate::exec::{rdpcm_forward, I2iTransform, RdpcmDirection, ResidualBlock};
use crate::lifting::{fnv1a, QuantizedLiftingNetwork};

pub const MAGIC: &[u8; 4] = b"I2IC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 18;
pub const MAX_BLOCK: usize = 32;
pub const MIN_BLOCK: usize = 4;

/// The integer transform networks a codec instance may use. Profiles that
/// never transform ignore both slots.
#[derive(Debug, Clone, Default)]
pub struct CodecNetworks {
    pub net4: Option<QuantizedLiftingNetwork>,
    pub net8: Option<QuantizedLiftingNetwork>,
}

impl CodecNetworks {
    /// Fingerprint of the networks a profile actually uses, stored in the
    /// header so encoder and decoder agree on the transforms bit-for-bit.
    pub fn fingerprint(&self, profile: CodecProfile) -> Result<u32> {
        let mut text = String::new();
        if profile.max_transform_size() >= 4 {
            let n4 = self.net4.as_ref().ok_or_else(|| {
                Error::InvalidParameter(format!("profile {} needs a 4-point network", profile.name()))
            })?;
            text.push_str(&n4.to_text());
        }
        if profile.max_transform_size() >= 8 {
            let n8 = self.net8.as_ref().ok_or_else(|| {
                Error::InvalidParameter(format!("profile {} needs an 8-point network", profile.name()))
            })?;
            text.push_str(&n8.to_text());
        }
        Ok(fnv1a(text.as_bytes()))
    }

    pub(super) fn transforms(&self, profile: CodecProfile) -> Result<(Option<I2iTransform>, Option<I2iTransform>)> {
        let build = |net: &Option<QuantizedLiftingNetwork>, n: usize| -> Result<Option<I2iTransform>> {
            match net {
                Some(q) if profile.max_transform_size() >= n => {
                    if q.n != n {
                        return Err(Error::InvalidParameter(format!(
                            "expected a {n}-point network, got {}-point",
                            q.n
                        )));
                    }
                    Ok(Some(I2iTransform::new(q.clone())?))
                }
                None if profile.max_transform_size() >= n => Err(Error::InvalidParameter(format!(
                    "profile {} needs a {n}-point network",
                    profile.name()
                ))),
                _ => Ok(None),
            }
        };
        Ok((build(&self.net4, 4)?, build(&self.net8, 8)?))
    }
}

/// Diagonal scan order for an n x n coefficient block: anti-diagonals from
/// the DC corner, top-down within each diagonal.
pub(super) fn diag_scan(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n * n);
    for d in 0..2 * n - 1 {
        let r_lo = d.saturating_sub(n - 1);
        let r_hi = d.min(n - 1);
        for r in r_lo..=r_hi {
            order.push(r * n + (d - r));
        }
    }
    order
}

/// Adaptive entropy contexts shared across a frame: one per residual path
/// family, with the transform DC coefficient separated from the ACs.
#[derive(Debug, Clone, Default)]
pub(super) struct Contexts {
    pub skip: RiceState,
    pub rdpcm: RiceState,
    pub dc: RiceState,
    pub ac: RiceState,
}

/// Residual values in coded order for a leaf, given its path. Transform
/// coefficients come out in diagonal scan; the other paths are raster.
fn coded_values(
    path: ResidualPath,
    residual: &ResidualBlock,
    t: Option<&I2iTransform>,
) -> Result<Vec<i32>> {
    Ok(match path {
        ResidualPath::Skip => residual.samples.clone(),
        ResidualPath::RdpcmHorizontal => rdpcm_forward(residual, RdpcmDirection::Horizontal).samples,
        ResidualPath::RdpcmVertical => rdpcm_forward(residual, RdpcmDirection::Vertical).samples,
        ResidualPath::Transform => {
            let t = t.ok_or_else(|| Error::InvalidParameter("missing transform".into()))?;
            let coeffs = t.forward_2d(residual)?;
            let n = residual.width;
            diag_scan(n).into_iter().map(|i| coeffs.samples[i]).collect()
        }
    })
}

fn payload_cost(path: ResidualPath, values: &[i32]) -> u64 {
    // fresh contexts: a per-leaf approximation of the adaptive coder used at
    // serialization time
    let mut ctx = Contexts::default();
    let mut bits = 0u64;
    match path {
        ResidualPath::Skip => {
            for &v in values {
                bits += cost_value(&mut ctx.skip, v);
            }
        }
        ResidualPath::RdpcmHorizontal | ResidualPath::RdpcmVertical => {
            for &v in values {
                bits += cost_value(&mut ctx.rdpcm, v);
            }
        }
        ResidualPath::Transform => {
            for (i, &v) in values.iter().enumerate() {
                let st = if i == 0 { &mut ctx.dc } else { &mut ctx.ac };
                bits += cost_value(st, v);
            }
        }
    }
    bits
}

fn write_payload(w: &mut BitWriter, ctx: &mut Contexts, path: ResidualPath, values: &[i32]) {
    match path {
        ResidualPath::Skip => {
            for &v in values {
                encode_value(w, &mut ctx.skip, v);
            }
        }
        ResidualPath::RdpcmHorizontal | ResidualPath::RdpcmVertical => {
            for &v in values {
                encode_value(w, &mut ctx.rdpcm, v);
            }
        }
        ResidualPath::Transform => {
            for (i, &v) in values.iter().enumerate() {
                let st = if i == 0 { &mut ctx.dc } else { &mut ctx.ac };
                encode_value(w, st, v);
            }
        }
    }
}

enum Plan {
    Leaf { mode: u8 },
    Split { children: Vec<Option<Plan>> },
}

struct Encoder {
    plane: Frame,
    profile: CodecProfile,
    t4: Option<I2iTransform>,
    t8: Option<I2iTransform>,
    coded: Vec<bool>,
}

fn child_origins(r0: usize, c0: usize, size: usize) -> [(usize, usize); 4] {
    let h = size / 2;
    [(r0, c0), (r0, c0 + h), (r0 + h, c0), (r0 + h, c0 + h)]
}

impl Encoder {
    fn transform_for(&self, size: usize) -> Option<&I2iTransform> {
        match size {
            4 => self.t4.as_ref(),
            8 => self.t8.as_ref(),
            _ => None,
        }
    }

    fn mark(&mut self, r0: usize, c0: usize, size: usize) {
        for r in r0..r0 + size {
            for c in c0..c0 + size {
                self.coded[r * self.plane.width + c] = true;
            }
        }
    }

    /// Prediction residual of the block under `mode` with the current mask.
    fn residual(&self, r0: usize, c0: usize, size: usize, mode: u8) -> Result<(ResidualBlock, ResidualPath)> {
        let refs = build_references(
            &self.plane.pixels,
            self.plane.width,
            self.plane.height,
            &self.coded,
            r0,
            c0,
            size,
        );
        let pred = predict(&refs, mode)?;
        let mut samples = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                samples.push(self.plane.at(r0 + r, c0 + c) as i32 - pred[r * size + c]);
            }
        }
        Ok((ResidualBlock::new(size, size, samples)?, residual_path(self.profile, size, mode)))
    }

    /// Best intra mode for a leaf under fresh-context costing. Returns
    /// (bits including the 6-bit mode field, mode).
    fn best_leaf(&self, r0: usize, c0: usize, size: usize) -> Result<(u64, u8)> {
        let refs = build_references(
            &self.plane.pixels,
            self.plane.width,
            self.plane.height,
            &self.coded,
            r0,
            c0,
            size,
        );
        let mut best: Option<(u64, u8)> = None;
        for mode in 0..NUM_MODES {
            let pred = predict(&refs, mode)?;
            let mut samples = Vec::with_capacity(size * size);
            for r in 0..size {
                for c in 0..size {
                    samples.push(self.plane.at(r0 + r, c0 + c) as i32 - pred[r * size + c]);
                }
            }
            let block = ResidualBlock::new(size, size, samples)?;
            let path = residual_path(self.profile, size, mode);
            let values = coded_values(path, &block, self.transform_for(size))?;
            let cost = 6 + payload_cost(path, &values);
            if best.map(|(b, _)| cost < b).unwrap_or(true) {
                best = Some((cost, mode));
            }
        }
        Ok(best.unwrap())
    }

    fn plan_node(&mut self, r0: usize, c0: usize, size: usize) -> Result<(u64, Option<Plan>)> {
        let (w, h) = (self.plane.width, self.plane.height);
        if r0 >= h || c0 >= w {
            return Ok((0, None));
        }
        let inside = r0 + size <= h && c0 + size <= w;
        if inside && size == MIN_BLOCK {
            let (cost, mode) = self.best_leaf(r0, c0, size)?;
            self.mark(r0, c0, size);
            return Ok((cost, Some(Plan::Leaf { mode })));
        }
        if inside {
            let (leaf_cost, mode) = self.best_leaf(r0, c0, size)?;
            let mut split_cost = 0u64;
            let mut children = Vec::with_capacity(4);
            for (r, c) in child_origins(r0, c0, size) {
                let (cost, child) = self.plan_node(r, c, size / 2)?;
                split_cost += cost;
                children.push(child);
            }
            // one split flag either way; ties go to the leaf (fewer symbols)
            if leaf_cost <= split_cost {
                Ok((1 + leaf_cost, Some(Plan::Leaf { mode })))
            } else {
                Ok((1 + split_cost, Some(Plan::Split { children })))
            }
        } else {
            // node straddles the plane edge: split is forced and unsignaled
            let mut total = 0u64;
            let mut children = Vec::with_capacity(4);
            for (r, c) in child_origins(r0, c0, size) {
                let (cost, child) = self.plan_node(r, c, size / 2)?;
                total += cost;
                children.push(child);
            }
            Ok((total, Some(Plan::Split { children })))
        }
    }

    fn write_node(
        &mut self,
        w: &mut BitWriter,
        ctx: &mut Contexts,
        stats: &mut UsageReport,
        plan: &Plan,
        r0: usize,
        c0: usize,
        size: usize,
    ) -> Result<()> {
        let inside = r0 + size <= self.plane.height && c0 + size <= self.plane.width;
        match plan {
            Plan::Leaf { mode } => {
                debug_assert!(inside);
                if size > MIN_BLOCK {
                    w.put_bit(0);
                }
                w.put_bits(*mode as u32, 6);
                let (block, path) = self.residual(r0, c0, size, *mode)?;
                let values = coded_values(path, &block, self.transform_for(size))?;
                write_payload(w, ctx, path, &values);
                stats.record_leaf(size, *mode, path);
                self.mark(r0, c0, size);
            }
            Plan::Split { children } => {
                if inside {
                    w.put_bit(1);
                }
                for ((r, c), child) in child_origins(r0, c0, size).into_iter().zip(children) {
                    if let Some(child) = child {
                        self.write_node(w, ctx, stats, child, r, c, size / 2)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Encode a frame losslessly. Returns the bitstream and a usage report.
pub fn encode_frame(
    frame: &Frame,
    profile: CodecProfile,
    nets: &CodecNetworks,
) -> Result<(Vec<u8>, UsageReport)> {
    if frame.width > u32::MAX as usize || frame.height > u32::MAX as usize {
        return Err(Error::InvalidParameter("frame too large".into()));
    }
    let (t4, t8) = nets.transforms(profile)?;
    let pad_w = frame.width.div_ceil(MIN_BLOCK) * MIN_BLOCK;
    let pad_h = frame.height.div_ceil(MIN_BLOCK) * MIN_BLOCK;
    let plane = frame.padded_to(pad_w, pad_h)?;
    let mut enc = Encoder {
        coded: vec![false; plane.width * plane.height],
        plane,
        profile,
        t4,
        t8,
    };

    // phase 1: plan the quadtree and modes with fresh-context costing
    let mut plans = Vec::new();
    let mut r0 = 0;
    while r0 < pad_h {
        let mut c0 = 0;
        while c0 < pad_w {
            let (_, plan) = enc.plan_node(r0, c0, MAX_BLOCK)?;
            plans.push((r0, c0, plan));
            c0 += MAX_BLOCK;
        }
        r0 += MAX_BLOCK;
    }

    // phase 2: serialize with the adaptive contexts; the mask is replayed
    // from scratch so prediction matches the decoder exactly
    enc.coded.fill(false);
    let mut w = BitWriter::new();
    let mut ctx = Contexts::default();
    let mut stats = UsageReport::default();
    for (r0, c0, plan) in &plans {
        if let Some(plan) = plan {
            enc.write_node(&mut w, &mut ctx, &mut stats, plan, *r0, *c0, MAX_BLOCK)?;
        }
    }

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(profile.id());
    out.extend_from_slice(&(frame.width as u32).to_be_bytes());
    out.extend_from_slice(&(frame.height as u32).to_be_bytes());
    out.extend_from_slice(&nets.fingerprint(profile)?.to_be_bytes());
    debug_assert_eq!(out.len(), HEADER_LEN);
    out.extend_from_slice(&w.finish());
    out.extend_from_slice(&fnv1a(&frame.pixels).to_be_bytes());

    stats.total_bits = out.len() as u64 * 8;
    stats.pixel_count = frame.width * frame.height;
    Ok((out, stats))
}
