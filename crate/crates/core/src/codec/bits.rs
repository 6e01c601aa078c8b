//! MSB-first bit packing for the codec payload.

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u32,
    nbits: u32,
}

impl BitWriter {
    pub fn new() -> BitWriter {
        BitWriter::default()
    }

    pub fn put_bit(&mut self, bit: u32) {
        self.acc = (self.acc << 1) | (bit & 1);
        self.nbits += 1;
        if self.nbits == 8 {
            self.bytes.push(self.acc as u8);
            self.acc = 0;
            self.nbits = 0;
        }
    }

    /// Write the low `n` bits of `v`, most significant first (n <= 32).
    pub fn put_bits(&mut self, v: u32, n: u32) {
        for i in (0..n).rev() {
            self.put_bit((v >> i) & 1);
        }
    }

    /// Pad with zero bits to a byte boundary and return the buffer.
    pub fn finish(mut self) -> Vec<u8> {
        while self.nbits != 0 {
            self.put_bit(0);
        }
        self.bytes
    }

    #[allow(dead_code)] // cost-accounting hook, exercised by the entropy tests
    pub fn bit_len(&self) -> u64 {
        self.bytes.len() as u64 * 8 + self.nbits as u64
    }
}

#[derive(Debug)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    bit: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> BitReader<'a> {
        BitReader { data, pos: 0, bit: 0 }
    }

    pub fn get_bit(&mut self) -> Result<u32> {
        if self.pos >= self.data.len() {
            return Err(Error::Truncated);
        }
        let b = (self.data[self.pos] >> (7 - self.bit)) & 1;
        self.bit += 1;
        if self.bit == 8 {
            self.bit = 0;
            self.pos += 1;
        }
        Ok(b as u32)
    }

    pub fn get_bits(&mut self, n: u32) -> Result<u32> {
        let mut v = 0u32;
        for _ in 0..n {
            v = (v << 1) | self.get_bit()?;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut w = BitWriter::new();
        w.put_bits(0b1011, 4);
        w.put_bit(1);
        w.put_bits(0xdead, 16);
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes);
        assert_eq!(r.get_bits(4).unwrap(), 0b1011);
        assert_eq!(r.get_bit().unwrap(), 1);
        assert_eq!(r.get_bits(16).unwrap(), 0xdead);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let bytes = BitWriter::new().finish();
        let mut r = BitReader::new(&bytes);
        assert!(matches!(r.get_bit(), Err(Error::Truncated)));
    }
}
