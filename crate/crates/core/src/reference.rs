//! Published reference values the toolkit is validated against, with the
//! tolerance used for each check. Gains are in dB; relative values are
//! "transform minus KLT" on the rho = 0.95 residual model.

pub const RHO: f64 = 0.95;

/// Absolute KLT gain on the 4-point model, unit-variance source convention.
pub const KLT_ABS_4: (f64, f64) = (10.0039, 5e-4);

/// Relative gains vs KLT for N in {4, 8, 16, 32}.
pub const ODST3_REL: [(usize, f64); 4] =
    [(4, -0.0009), (8, -0.0024), (16, -0.0045), (32, -0.0072)];
pub const EDST3_REL: [(usize, f64); 4] =
    [(4, -0.2174), (8, -0.1376), (16, -0.0797), (32, -0.0468)];
pub const DCT_REL: [(usize, f64); 4] = [(4, -0.6211), (8, -0.5611), (16, -0.4108), (32, -0.2640)];
pub const TRANSFORM_REL_TOL: f64 = 5e-4;

/// Best rotation-cascade relative gains for N = 4, L in {2, 3, 4, 5}.
pub const CASCADE_REL: [(usize, f64); 4] =
    [(2, -0.7593), (3, -0.1023), (4, -0.0059), (5, -0.0001)];
pub const CASCADE_REL_TOL: f64 = 5e-3;

/// Parallel-constrained 4-point cascade (L = 4, two stages of disjoint pairs).
pub const PARALLEL_REL: (f64, f64) = (-0.1206, 5e-3);
pub const PARALLEL_PAIRS: [(usize, usize); 4] = [(2, 4), (1, 3), (3, 4), (1, 2)];

/// Quantized 4-point design: relative gain per precision l = 1..=8.
pub const QUANTIZED_REL: [(u32, f64); 8] = [
    (1, -1.0565),
    (2, -0.0973),
    (3, -0.0158),
    (4, -0.0165),
    (5, -0.0104),
    (6, -0.0056),
    (7, -0.0060),
    (8, -0.0059),
];
pub const QUANTIZED_REL_TOL: f64 = 0.01;

/// Branch scales of the selected l = 3 design (as a multiset, sign-consistent).
pub const BRANCH_SCALES_4: [f64; 4] = [-1.1644, -0.9013, 0.8400, 1.1344];
pub const BRANCH_SCALES_TOL: f64 = 0.02;

/// 1D DPCM relative gain on the 4-point model.
pub const DPCM_REL: (f64, f64) = (-0.0039, 5e-4);

/// Max allowed gap between the quantized (l = 8) 8-point design and the exact
/// 8-point even type-3 DST.
pub const EIGHT_POINT_GAP_TOL: f64 = 0.001;
