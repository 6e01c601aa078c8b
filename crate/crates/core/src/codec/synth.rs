//! Deterministic synthetic test frames: smooth gradients, flat rectangles,
//! directional plaid, soft blobs, a mixed scene, and pure noise. Used for the
//! bundled corpus and for codec stress tests.

use super::frame::Frame;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Gradient,
    Rectangles,
    Plaid,
    Blobs,
    Mixed,
    Noise,
}

pub const ALL_KINDS: [SynthKind; 6] = [
    SynthKind::Gradient,
    SynthKind::Rectangles,
    SynthKind::Plaid,
    SynthKind::Blobs,
    SynthKind::Mixed,
    SynthKind::Noise,
];

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Gradient => "gradient",
            SynthKind::Rectangles => "rectangles",
            SynthKind::Plaid => "plaid",
            SynthKind::Blobs => "blobs",
            SynthKind::Mixed => "mixed",
            SynthKind::Noise => "noise",
        }
    }

    pub fn from_name(s: &str) -> Result<SynthKind> {
        ALL_KINDS
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown synthetic kind '{s}'")))
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn synthetic_frame(kind: SynthKind, width: usize, height: usize, seed: u64) -> Result<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (kind as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut f = Frame::filled(width, height, 0)?;
    match kind {
        SynthKind::Gradient => {
            // diagonal ramp plus a slow sine to break strict linearity
            let (ax, ay) = (rng.gen_range(0.3..1.2), rng.gen_range(0.3..1.2));
            for r in 0..height {
                for c in 0..width {
                    let v = 40.0
                        + ax * c as f64
                        + ay * r as f64
                        + 18.0 * ((c as f64 / 37.0).sin() + (r as f64 / 29.0).cos());
                    f.set(r, c, clamp_u8(v * 255.0 / (255.0 + ax * width as f64 + ay * height as f64)));
                }
            }
        }
        SynthKind::Rectangles => {
            let base: u8 = rng.gen_range(60..140);
            for p in f.pixels.iter_mut() {
                *p = base;
            }
            for _ in 0..24 {
                let w = rng.gen_range(1..=(width / 2).max(1));
                let h = rng.gen_range(1..=(height / 2).max(1));
                let r0 = rng.gen_range(0..=height - h);
                let c0 = rng.gen_range(0..=width - w);
                let v: u8 = rng.gen_range(10..245);
                for r in r0..r0 + h {
                    for c in c0..c0 + w {
                        f.set(r, c, v);
                    }
                }
            }
        }
        SynthKind::Plaid => {
            // separable stripes: strongly horizontal/vertical structure
            let fr = rng.gen_range(0.15..0.5);
            let fc = rng.gen_range(0.15..0.5);
            for r in 0..height {
                for c in 0..width {
                    let v = 128.0 + 55.0 * (fr * r as f64).sin() + 55.0 * (fc * c as f64).sin();
                    f.set(r, c, clamp_u8(v));
                }
            }
        }
        SynthKind::Blobs => {
            let blobs: Vec<(f64, f64, f64, f64)> = (0..10)
                .map(|_| {
                    (
                        rng.gen_range(0.0..height as f64),
                        rng.gen_range(0.0..width as f64),
                        rng.gen_range(6.0..24.0),
                        rng.gen_range(-110.0..110.0),
                    )
                })
                .collect();
            for r in 0..height {
                for c in 0..width {
                    let mut v = 120.0;
                    for &(br, bc, s, a) in &blobs {
                        let d2 = (r as f64 - br).powi(2) + (c as f64 - bc).powi(2);
                        v += a * (-d2 / (2.0 * s * s)).exp();
                    }
                    f.set(r, c, clamp_u8(v));
                }
            }
        }
        SynthKind::Mixed => {
            // quadrants of the other kinds stitched together, plus mild noise
            let half_w = width / 2;
            let half_h = height / 2;
            let parts = [
                synthetic_frame(SynthKind::Gradient, half_w.max(1), half_h.max(1), seed + 1)?,
                synthetic_frame(SynthKind::Rectangles, width - half_w, half_h.max(1), seed + 2)?,
                synthetic_frame(SynthKind::Plaid, half_w.max(1), height - half_h, seed + 3)?,
                synthetic_frame(SynthKind::Blobs, width - half_w, height - half_h, seed + 4)?,
            ];
            for r in 0..height {
                for c in 0..width {
                    let (q, pr, pc) = match (r < half_h, c < half_w) {
                        (true, true) => (0, r, c),
                        (true, false) => (1, r, c - half_w),
                        (false, true) => (2, r - half_h, c),
                        (false, false) => (3, r - half_h, c - half_w),
                    };
                    let noisy = parts[q].at(pr, pc) as i32 + rng.gen_range(-2..=2);
                    f.set(r, c, noisy.clamp(0, 255) as u8);
                }
            }
        }
        SynthKind::Noise => {
            for p in f.pixels.iter_mut() {
                *p = rng.gen();
            }
        }
    }
    Ok(f)
}
