//! Codec profiles: which residual coding path each (block size, intra mode)
//! combination uses. The path is a deterministic function of the profile, so
//! it is never signaled in the bitstream.

use crate::error::{Error, Result};

/// Intra modes follow the common 35-mode layout: 0 planar, 1 DC, 2..=34
/// angular. Mode 10 is purely horizontal, mode 26 purely vertical.
pub const MODE_HORIZONTAL: u8 = 10;
pub const MODE_VERTICAL: u8 = 26;
pub const NUM_MODES: u8 = 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodecProfile {
    /// Transform skip everywhere: prediction residuals coded as-is.
    SkipAll,
    /// Residual DPCM along the prediction direction for purely horizontal /
    /// vertical modes, skip otherwise.
    Rdpcm,
    /// 4x4 blocks through the integer transform for every mode; larger
    /// blocks use RDPCM on hor/ver modes and skip otherwise.
    I2i4,
    /// Like I2i4, but 4x4 hor/ver blocks prefer RDPCM over the transform.
    I2i4Rdpcm,
    /// Integer transform on 4x4 and 8x8 for every mode; 16x16 and larger use
    /// RDPCM on hor/ver modes and skip otherwise.
    I2i48,
    /// Like I2i48, but hor/ver blocks of transformable sizes prefer RDPCM.
    I2i48Rdpcm,
}

pub const ALL_PROFILES: [CodecProfile; 6] = [
    CodecProfile::SkipAll,
    CodecProfile::Rdpcm,
    CodecProfile::I2i4,
    CodecProfile::I2i4Rdpcm,
    CodecProfile::I2i48,
    CodecProfile::I2i48Rdpcm,
];

impl CodecProfile {
    pub fn name(self) -> &'static str {
        match self {
            CodecProfile::SkipAll => "skip-all",
            CodecProfile::Rdpcm => "rdpcm",
            CodecProfile::I2i4 => "i2i4",
            CodecProfile::I2i4Rdpcm => "i2i4-rdpcm",
            CodecProfile::I2i48 => "i2i48",
            CodecProfile::I2i48Rdpcm => "i2i48-rdpcm",
        }
    }

    pub fn from_name(s: &str) -> Result<CodecProfile> {
        ALL_PROFILES
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown profile '{s}'")))
    }

    pub fn id(self) -> u8 {
        ALL_PROFILES.iter().position(|&p| p == self).unwrap() as u8 + 1
    }

    pub fn from_id(id: u8) -> Result<CodecProfile> {
        if id == 0 || id as usize > ALL_PROFILES.len() {
            return Err(Error::Format(format!("unknown profile id {id}")));
        }
        Ok(ALL_PROFILES[id as usize - 1])
    }

    /// Largest block size the profile transforms (0 when it never does).
    pub fn max_transform_size(self) -> usize {
        match self {
            CodecProfile::SkipAll | CodecProfile::Rdpcm => 0,
            CodecProfile::I2i4 | CodecProfile::I2i4Rdpcm => 4,
            CodecProfile::I2i48 | CodecProfile::I2i48Rdpcm => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualPath {
    Skip,
    RdpcmHorizontal,
    RdpcmVertical,
    Transform,
}

/// The residual path for a block: pure function of profile, block size, and
/// intra mode.
pub fn residual_path(profile: CodecProfile, size: usize, mode: u8) -> ResidualPath {
    let hv = match mode {
        MODE_HORIZONTAL => Some(ResidualPath::RdpcmHorizontal),
        MODE_VERTICAL => Some(ResidualPath::RdpcmVertical),
        _ => None,
    };
    let transformable = size <= profile.max_transform_size();
    match profile {
        CodecProfile::SkipAll => ResidualPath::Skip,
        CodecProfile::Rdpcm => hv.unwrap_or(ResidualPath::Skip),
        CodecProfile::I2i4 | CodecProfile::I2i48 => {
            if transformable {
                ResidualPath::Transform
            } else {
                hv.unwrap_or(ResidualPath::Skip)
            }
        }
        CodecProfile::I2i4Rdpcm | CodecProfile::I2i48Rdpcm => {
            if let Some(p) = hv {
                p
            } else if transformable {
                ResidualPath::Transform
            } else {
                ResidualPath::Skip
            }
        }
    }
}
