//! Bitstream decoder: mirrors the encoder's quadtree walk, entropy contexts,
//! and prediction mask exactly, then verifies the plane checksum.

use super::bits::BitReader;
use super::encode::{diag_scan, CodecNetworks, Contexts, HEADER_LEN, MAGIC, MAX_BLOCK, MIN_BLOCK, VERSION};
use super::entropy::decode_value;
use super::frame::Frame;
use super::intra::{build_references, predict};
use super::profile::{residual_path, CodecProfile, ResidualPath, NUM_MODES};
use crate::error::{Error, Result};
use crate::exec::{rdpcm_inverse, I2iTransform, RdpcmDirection, ResidualBlock};
use crate::lifting::fnv1a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeaderInfo {
    pub version: u8,
    pub profile: CodecProfile,
    pub width: usize,
    pub height: usize,
    pub fingerprint: u32,
}

pub fn decode_header(data: &[u8]) -> Result<HeaderInfo> {
    if data.len() < HEADER_LEN {
        return Err(Error::Truncated);
    }
    if &data[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = data[4];
    if version != VERSION {
        return Err(Error::Format(format!("unsupported bitstream version {version}")));
    }
    let profile = CodecProfile::from_id(data[5])?;
    let width = u32::from_be_bytes(data[6..10].try_into().unwrap()) as usize;
    let height = u32::from_be_bytes(data[10..14].try_into().unwrap()) as usize;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero frame dimension".into()));
    }
    let fingerprint = u32::from_be_bytes(data[14..18].try_into().unwrap());
    Ok(HeaderInfo { version, profile, width, height, fingerprint })
}

struct Decoder<'a> {
    r: BitReader<'a>,
    ctx: Contexts,
    recon: Frame,
    coded: Vec<bool>,
    profile: CodecProfile,
    t4: Option<I2iTransform>,
    t8: Option<I2iTransform>,
}

impl Decoder<'_> {
    fn transform_for(&self, size: usize) -> Option<&I2iTransform> {
        match size {
            4 => self.t4.as_ref(),
            8 => self.t8.as_ref(),
            _ => None,
        }
    }

    fn node(&mut self, r0: usize, c0: usize, size: usize) -> Result<()> {
        let (w, h) = (self.recon.width, self.recon.height);
        if r0 >= h || c0 >= w {
            return Ok(());
        }
        let inside = r0 + size <= h && c0 + size <= w;
        let split = if !inside {
            true // forced, unsignaled
        } else if size == MIN_BLOCK {
            false
        } else {
            self.r.get_bit()? == 1
        };
        if split {
            let half = size / 2;
            for (r, c) in [(r0, c0), (r0, c0 + half), (r0 + half, c0), (r0 + half, c0 + half)] {
                self.node(r, c, half)?;
            }
            return Ok(());
        }
        self.leaf(r0, c0, size)
    }

    fn leaf(&mut self, r0: usize, c0: usize, size: usize) -> Result<()> {
        let mode = self.r.get_bits(6)? as u8;
        if mode >= NUM_MODES {
            return Err(Error::Format(format!("intra mode {mode} out of range")));
        }
        let path = residual_path(self.profile, size, mode);
        let count = size * size;
        let mut values = Vec::with_capacity(count);
        match path {
            ResidualPath::Skip => {
                for _ in 0..count {
                    values.push(decode_value(&mut self.r, &mut self.ctx.skip)?);
                }
            }
            ResidualPath::RdpcmHorizontal | ResidualPath::RdpcmVertical => {
                for _ in 0..count {
                    values.push(decode_value(&mut self.r, &mut self.ctx.rdpcm)?);
                }
            }
            ResidualPath::Transform => {
                for i in 0..count {
                    let st = if i == 0 { &mut self.ctx.dc } else { &mut self.ctx.ac };
                    values.push(decode_value(&mut self.r, st)?);
                }
            }
        }
        let residual = match path {
            ResidualPath::Skip => ResidualBlock::new(size, size, values)?,
            ResidualPath::RdpcmHorizontal => {
                rdpcm_inverse(&ResidualBlock::new(size, size, values)?, RdpcmDirection::Horizontal)
            }
            ResidualPath::RdpcmVertical => {
                rdpcm_inverse(&ResidualBlock::new(size, size, values)?, RdpcmDirection::Vertical)
            }
            ResidualPath::Transform => {
                let t = self
                    .transform_for(size)
                    .ok_or_else(|| Error::Format(format!("no {size}-point network for this profile")))?;
                let mut coeffs = vec![0i32; count];
                for (v, idx) in values.into_iter().zip(diag_scan(size)) {
                    coeffs[idx] = v;
                }
                t.inverse_2d(&ResidualBlock::new(size, size, coeffs)?)?
            }
        };
        let refs = build_references(
            &self.recon.pixels,
            self.recon.width,
            self.recon.height,
            &self.coded,
            r0,
            c0,
            size,
        );
        let pred = predict(&refs, mode)?;
        for r in 0..size {
            for c in 0..size {
                let v = pred[r * size + c] + residual.at(r, c);
                // corrupted payloads can push this out of range; the trailing
                // checksum is what actually rejects them
                self.recon.set(r0 + r, c0 + c, v.clamp(0, 255) as u8);
                self.coded[(r0 + r) * self.recon.width + c0 + c] = true;
            }
        }
        Ok(())
    }
}

/// Decode a bitstream produced by `encode_frame`, verifying the network
/// fingerprint and the plane checksum.
pub fn decode_frame(data: &[u8], nets: &CodecNetworks) -> Result<Frame> {
    let hdr = decode_header(data)?;
    if data.len() < HEADER_LEN + 4 {
        return Err(Error::Truncated);
    }
    if nets.fingerprint(hdr.profile)? != hdr.fingerprint {
        return Err(Error::Format("network fingerprint mismatch".into()));
    }
    let payload = &data[HEADER_LEN..data.len() - 4];
    let want_sum = u32::from_be_bytes(data[data.len() - 4..].try_into().unwrap());

    let (t4, t8) = nets.transforms(hdr.profile)?;
    let pad_w = hdr.width.div_ceil(MIN_BLOCK) * MIN_BLOCK;
    let pad_h = hdr.height.div_ceil(MIN_BLOCK) * MIN_BLOCK;
    let mut dec = Decoder {
        r: BitReader::new(payload),
        ctx: Contexts::default(),
        recon: Frame::filled(pad_w, pad_h, 0)?,
        coded: vec![false; pad_w * pad_h],
        profile: hdr.profile,
        t4,
        t8,
    };
    let mut r0 = 0;
    while r0 < pad_h {
        let mut c0 = 0;
        while c0 < pad_w {
            dec.node(r0, c0, MAX_BLOCK)?;
            c0 += MAX_BLOCK;
        }
        r0 += MAX_BLOCK;
    }
    let out = dec.recon.cropped_to(hdr.width, hdr.height)?;
    if fnv1a(&out.pixels) != want_sum {
        return Err(Error::ChecksumMismatch);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_errors_are_distinct() {
        assert!(matches!(decode_header(&[0u8; 4]), Err(Error::Truncated)));
        let mut junk = vec![0u8; HEADER_LEN];
        junk[..4].copy_from_slice(b"JUNK");
        assert!(matches!(decode_header(&junk), Err(Error::BadMagic)));
        let mut bad_ver = vec![0u8; HEADER_LEN];
        bad_ver[..4].copy_from_slice(MAGIC);
        bad_ver[4] = 99;
        assert!(matches!(decode_header(&bad_ver), Err(Error::Format(_))));
    }
}
