//! Transform-design toolkit and desk-scale lossless intra codec built on
//! integer-to-integer sine transforms.
//!
//! Pipeline: model residual statistics ([`markov`]), measure transforms by
//! coding gain ([`transforms`]), approximate the optimal transform with a
//! cascade of plane rotations ([`rotation`], [`fastdst`]), convert the
//! cascade to quantized lifting networks ([`lifting`]), execute them
//! bit-exactly on integers ([`exec`]), and use them inside a lossless image
//! codec ([`codec`]).

pub mod codec;
pub mod error;
pub mod exec;
pub mod fastdst;
pub mod lifting;
pub mod markov;
pub mod matrix;
pub mod reference;
pub mod rotation;
pub mod transforms;

pub use error::{Error, Result};
pub use exec::{I2iTransform, ResidualBlock};
pub use lifting::{LiftingNetwork, QuantizedLiftingNetwork};
pub use markov::CorrelationModel;
pub use matrix::Mat;
pub use rotation::{OptimizerConfig, PlaneRotation, RotationCascade};
pub use transforms::{CodingGainDb, TransformKind, TransformMatrix};
