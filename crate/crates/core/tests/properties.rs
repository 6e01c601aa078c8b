//! Property tests for the structural invariants: orthogonality of rotation
//! cascades, exact invertibility of every integer path, and format round
//! trips.

use i2i_core::codec::{decode_frame, encode_frame, CodecNetworks, CodecProfile, Frame};
use i2i_core::exec::{rdpcm_forward, rdpcm_inverse, I2iTransform, RdpcmDirection, ResidualBlock};
use i2i_core::lifting::dct4_lifting_network;
use i2i_core::rotation::{PlaneRotation, RotationCascade};
use proptest::prelude::*;

fn nets() -> CodecNetworks {
    CodecNetworks { net4: Some(dct4_lifting_network().unwrap()), net8: None }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cascade_matrices_are_orthogonal(
        angles in prop::collection::vec(0.0..std::f64::consts::FRAC_PI_2, 1..6),
        pair_seeds in prop::collection::vec(0usize..6, 1..6),
    ) {
        let all_pairs = [(1usize, 2usize), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
        let len = angles.len().min(pair_seeds.len());
        let rotations: Vec<PlaneRotation> = (0..len)
            .map(|k| {
                let (i, j) = all_pairs[pair_seeds[k]];
                PlaneRotation::new(i, j, angles[k]).unwrap()
            })
            .collect();
        let cascade = RotationCascade { n: 4, rotations, gain: None };
        let m = cascade.matrix().unwrap();
        prop_assert!(m.orthonormality_error() < 1e-12);
        prop_assert!((m.det() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn integer_transform_round_trip(x in prop::collection::vec(-100_000i32..=100_000, 4)) {
        let t = I2iTransform::new(dct4_lifting_network().unwrap()).unwrap();
        let y = t.forward_1d(&x).unwrap();
        prop_assert_eq!(t.inverse_1d(&y).unwrap(), x);
    }

    #[test]
    fn rdpcm_round_trip(
        samples in prop::collection::vec(-255i32..=255, 16..=64),
        horizontal in any::<bool>(),
    ) {
        // shape into the widest rectangle that fits
        let w = (samples.len() as f64).sqrt() as usize;
        let h = samples.len() / w;
        let block = ResidualBlock::new(w, h, samples[..w * h].to_vec()).unwrap();
        let dir = if horizontal { RdpcmDirection::Horizontal } else { RdpcmDirection::Vertical };
        prop_assert_eq!(rdpcm_inverse(&rdpcm_forward(&block, dir), dir), block);
    }

    #[test]
    fn pgm_round_trip(
        w in 1usize..40,
        h in 1usize..40,
        seed in any::<u64>(),
    ) {
        let pixels: Vec<u8> = (0..w * h).map(|i| (seed.wrapping_mul(i as u64 + 1) >> 32) as u8).collect();
        let f = Frame::new(w, h, pixels).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        f.write_pgm(&path).unwrap();
        prop_assert_eq!(Frame::read_pgm(&path).unwrap(), f);
    }
}

proptest! {
    // codec round trips are slower; fewer cases
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn codec_round_trip_random_frames(
        w in 1usize..48,
        h in 1usize..48,
        seed in any::<u64>(),
        profile_idx in 0usize..4,
    ) {
        let pixels: Vec<u8> = (0..w * h)
            .map(|i| (seed.wrapping_mul(2 * i as u64 + 1).rotate_left(i as u32 % 64) >> 24) as u8)
            .collect();
        let f = Frame::new(w, h, pixels).unwrap();
        let profile = [
            CodecProfile::SkipAll,
            CodecProfile::Rdpcm,
            CodecProfile::I2i4,
            CodecProfile::I2i4Rdpcm,
        ][profile_idx];
        let nets = nets();
        let (bits, _) = encode_frame(&f, profile, &nets).unwrap();
        prop_assert_eq!(decode_frame(&bits, &nets).unwrap(), f);
    }
}
