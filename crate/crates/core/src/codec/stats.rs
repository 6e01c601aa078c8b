//! Per-frame coding statistics collected by the encoder.

use super::profile::ResidualPath;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Default)]
pub struct UsageReport {
    /// leaf count per block size
    pub blocks_by_size: BTreeMap<usize, usize>,
    /// leaf count per residual path name
    pub blocks_by_path: BTreeMap<&'static str, usize>,
    /// intra mode histogram (index = mode)
    pub mode_histogram: Vec<usize>,
    pub total_bits: u64,
    pub pixel_count: usize,
}

pub fn path_name(path: ResidualPath) -> &'static str {
    match path {
        ResidualPath::Skip => "skip",
        ResidualPath::RdpcmHorizontal => "rdpcm-h",
        ResidualPath::RdpcmVertical => "rdpcm-v",
        ResidualPath::Transform => "i2i",
    }
}

impl UsageReport {
    pub fn record_leaf(&mut self, size: usize, mode: u8, path: ResidualPath) {
        *self.blocks_by_size.entry(size).or_insert(0) += 1;
        *self.blocks_by_path.entry(path_name(path)).or_insert(0) += 1;
        if self.mode_histogram.len() <= mode as usize {
            self.mode_histogram.resize(mode as usize + 1, 0);
        }
        self.mode_histogram[mode as usize] += 1;
    }

    pub fn bits_per_pixel(&self) -> f64 {
        if self.pixel_count == 0 {
            return 0.0;
        }
        self.total_bits as f64 / self.pixel_count as f64
    }
}

impl fmt::Display for UsageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bits: {}  bpp: {:.4}", self.total_bits, self.bits_per_pixel())?;
        write!(f, "blocks:")?;
        for (size, count) in &self.blocks_by_size {
            write!(f, " {size}x{size}={count}")?;
        }
        writeln!(f)?;
        write!(f, "paths:")?;
        for (name, count) in &self.blocks_by_path {
            write!(f, " {name}={count}")?;
        }
        Ok(())
    }
}
