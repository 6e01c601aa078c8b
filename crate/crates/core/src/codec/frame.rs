//! 8-bit grayscale frames with binary PGM (P5) I/O.

use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Frame> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("frame dimensions must be positive".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Frame { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Frame> {
        Frame::new(width, height, vec![value; width * height])
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.pixels[r * self.width + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.pixels[r * self.width + c] = v;
    }

    /// Grow to `(w, h)` by replicating the last column/row. Used to make the
    /// frame a multiple of the smallest block size before coding; the header
    /// records the true dimensions and the decoder crops back.
    pub fn padded_to(&self, w: usize, h: usize) -> Result<Frame> {
        if w < self.width || h < self.height {
            return Err(Error::InvalidParameter("padding cannot shrink the frame".into()));
        }
        let mut out = Frame::filled(w, h, 0)?;
        for r in 0..h {
            let sr = r.min(self.height - 1);
            for c in 0..w {
                let sc = c.min(self.width - 1);
                out.set(r, c, self.at(sr, sc));
            }
        }
        Ok(out)
    }

    pub fn cropped_to(&self, w: usize, h: usize) -> Result<Frame> {
        if w > self.width || h > self.height {
            return Err(Error::InvalidParameter("crop cannot grow the frame".into()));
        }
        let mut pixels = Vec::with_capacity(w * h);
        for r in 0..h {
            pixels.extend_from_slice(&self.pixels[r * self.width..r * self.width + w]);
        }
        Frame::new(w, h, pixels)
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        write!(f, "P5\n{} {}\n255\n", self.width, self.height)?;
        f.write_all(&self.pixels)?;
        Ok(())
    }

    pub fn read_pgm(path: &Path) -> Result<Frame> {
        let mut data = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut data)?;
        Frame::parse_pgm(&data)
    }

    pub fn parse_pgm(data: &[u8]) -> Result<Frame> {
        if data.len() < 2 || &data[..2] != b"P5" {
            return Err(Error::Format("not a binary PGM (missing P5 magic)".into()));
        }
        // header tokens (width, height, maxval) separated by whitespace,
        // with '#' comment lines allowed
        let mut pos = 2usize;
        let mut fields = [0usize; 3];
        for field in fields.iter_mut() {
            // skip whitespace and comments
            loop {
                while pos < data.len() && data[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < data.len() && data[pos] == b'#' {
                    while pos < data.len() && data[pos] != b'\n' {
                        pos += 1;
                    }
                } else {
                    break;
                }
            }
            let start = pos;
            while pos < data.len() && data[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Format("malformed PGM header".into()));
            }
            *field = std::str::from_utf8(&data[start..pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format("malformed PGM header".into()))?;
        }
        let (w, h, maxval) = (fields[0], fields[1], fields[2]);
        if maxval != 255 {
            return Err(Error::Format(format!("only 8-bit PGM supported, maxval {maxval}")));
        }
        // exactly one whitespace byte between maxval and the raster
        pos += 1;
        if data.len() < pos + w * h {
            return Err(Error::Truncated);
        }
        Frame::new(w, h, data[pos..pos + w * h].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.pgm");
        let f = Frame::new(5, 3, (0u8..15).collect()).unwrap();
        f.write_pgm(&path).unwrap();
        assert_eq!(Frame::read_pgm(&path).unwrap(), f);
    }

    #[test]
    fn pgm_with_comment() {
        let mut data = b"P5\n# a comment\n2 2\n255\n".to_vec();
        data.extend_from_slice(&[1, 2, 3, 4]);
        let f = Frame::parse_pgm(&data).unwrap();
        assert_eq!((f.width, f.height), (2, 2));
        assert_eq!(f.pixels, vec![1, 2, 3, 4]);
    }

    #[test]
    fn pgm_rejects_bad_input() {
        assert!(matches!(Frame::parse_pgm(b"P6\n1 1\n255\nx"), Err(Error::Format(_))));
        assert!(matches!(Frame::parse_pgm(b"P5\n4 4\n255\nxy"), Err(Error::Truncated)));
        assert!(Frame::parse_pgm(b"P5\n1 1\n65535\n\0\0").is_err());
    }

    #[test]
    fn pad_and_crop() {
        let f = Frame::new(3, 2, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let p = f.padded_to(4, 4).unwrap();
        assert_eq!(p.at(0, 3), 3); // last column replicated
        assert_eq!(p.at(3, 1), 5); // last row replicated
        assert_eq!(p.at(3, 3), 6);
        assert_eq!(p.cropped_to(3, 2).unwrap(), f);
    }
}
