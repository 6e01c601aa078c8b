//! Desk-scale lossless intra codec for 8-bit grayscale frames. Built from
//! quadtree-partitioned intra prediction, a profile-selected residual path
//! (skip / RDPCM / integer-to-integer transform), and an adaptive Rice coder.

mod bits;
mod decode;
mod encode;
mod entropy;
mod frame;
mod intra;
mod profile;
mod stats;
mod synth;

pub use decode::{decode_frame, decode_header, HeaderInfo};
pub use encode::{encode_frame, CodecNetworks, HEADER_LEN, MAGIC, MAX_BLOCK, MIN_BLOCK, VERSION};
pub use frame::Frame;
pub use profile::{residual_path, CodecProfile, ResidualPath, ALL_PROFILES, MODE_HORIZONTAL, MODE_VERTICAL, NUM_MODES};
pub use stats::UsageReport;
pub use synth::{synthetic_frame, SynthKind, ALL_KINDS};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lifting::dct4_lifting_network;

    fn test_nets() -> CodecNetworks {
        CodecNetworks { net4: Some(dct4_lifting_network().unwrap()), net8: None }
    }

    fn profiles_without_8pt() -> Vec<CodecProfile> {
        vec![CodecProfile::SkipAll, CodecProfile::Rdpcm, CodecProfile::I2i4, CodecProfile::I2i4Rdpcm]
    }

    #[test]
    fn round_trip_all_kinds_and_profiles() {
        let nets = test_nets();
        for kind in ALL_KINDS {
            let f = synthetic_frame(kind, 64, 64, 3).unwrap();
            for profile in profiles_without_8pt() {
                let (bits, stats) = encode_frame(&f, profile, &nets).unwrap();
                assert_eq!(stats.total_bits as usize, bits.len() * 8);
                let back = decode_frame(&bits, &nets).unwrap();
                assert_eq!(back, f, "{} {}", kind.name(), profile.name());
            }
        }
    }

    #[test]
    fn round_trip_odd_dimensions() {
        let nets = test_nets();
        for (w, h) in [(1usize, 1usize), (5, 3), (31, 17), (67, 41), (129, 64)] {
            let f = synthetic_frame(SynthKind::Mixed, w, h, 5).unwrap();
            let (bits, _) = encode_frame(&f, CodecProfile::I2i4Rdpcm, &nets).unwrap();
            let back = decode_frame(&bits, &nets).unwrap();
            assert_eq!(back, f, "{w}x{h}");
        }
    }

    #[test]
    fn header_reflects_inputs() {
        let nets = test_nets();
        let f = synthetic_frame(SynthKind::Gradient, 40, 24, 1).unwrap();
        let (bits, _) = encode_frame(&f, CodecProfile::I2i4, &nets).unwrap();
        let hdr = decode_header(&bits).unwrap();
        assert_eq!(hdr.width, 40);
        assert_eq!(hdr.height, 24);
        assert_eq!(hdr.profile, CodecProfile::I2i4);
        assert_eq!(hdr.fingerprint, nets.fingerprint(CodecProfile::I2i4).unwrap());
    }

    #[test]
    fn corruption_is_detected() {
        let nets = test_nets();
        let f = synthetic_frame(SynthKind::Rectangles, 48, 48, 2).unwrap();
        let (bits, _) = encode_frame(&f, CodecProfile::I2i4, &nets).unwrap();

        // flipped payload byte -> checksum mismatch (or a structural error)
        let mut bad = bits.clone();
        let mid = HEADER_LEN + (bad.len() - HEADER_LEN - 4) / 2;
        bad[mid] ^= 0x55;
        assert!(decode_frame(&bad, &nets).is_err());

        // truncated stream
        assert!(matches!(decode_frame(&bits[..bits.len() / 2], &nets), Err(_)));
        assert!(matches!(decode_frame(&bits[..3], &nets), Err(Error::Truncated)));

        // wrong magic
        let mut bad = bits.clone();
        bad[0] = b'X';
        assert!(matches!(decode_frame(&bad, &nets), Err(Error::BadMagic)));

        // wrong networks -> fingerprint mismatch
        let mut other = dct4_lifting_network().unwrap();
        other.steps[0].k += 1;
        let wrong = CodecNetworks { net4: Some(other), net8: None };
        assert!(matches!(decode_frame(&bits, &wrong), Err(Error::Format(_))));
    }

    #[test]
    fn transform_profile_beats_skip_on_smooth_content() {
        let nets = test_nets();
        let f = synthetic_frame(SynthKind::Gradient, 64, 64, 7).unwrap();
        let (skip_bits, _) = encode_frame(&f, CodecProfile::SkipAll, &nets).unwrap();
        let (i2i_bits, stats) = encode_frame(&f, CodecProfile::I2i4Rdpcm, &nets).unwrap();
        assert!(
            i2i_bits.len() < skip_bits.len(),
            "i2i {} vs skip {}",
            i2i_bits.len(),
            skip_bits.len()
        );
        assert!(stats.blocks_by_path.contains_key("i2i"));
    }

    #[test]
    fn noise_is_near_incompressible_but_lossless() {
        let nets = test_nets();
        let f = synthetic_frame(SynthKind::Noise, 64, 64, 8).unwrap();
        let (bits, stats) = encode_frame(&f, CodecProfile::I2i4Rdpcm, &nets).unwrap();
        assert_eq!(decode_frame(&bits, &nets).unwrap(), f);
        // entropy coding can't beat 8 bpp on uniform noise by much, and the
        // overhead must stay modest
        let bpp = stats.bits_per_pixel();
        assert!(bpp > 7.5 && bpp < 9.5, "bpp {bpp}");
    }
}
