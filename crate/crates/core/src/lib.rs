//! Twofold loop model on random planar maps: exact enumeration, formal series,
//! the elliptic solution and the non-generic critical variety.

pub mod critical;
pub mod elliptic;
pub mod error;
pub mod maps;
pub mod model;
pub mod numeric;
pub mod scalar;
pub mod series;
pub mod solver;

pub use error::{Error, Result};
pub use maps::{ClusterConfig, RotationMap, TwofoldLoopConfig};
pub use model::{ModelParams, PottsParams};
pub use scalar::Rational;
