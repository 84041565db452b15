//! Exact VC-dimension computations for axis-parallel boxes, cubes and
//! stripes on the torus `T^d`.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod extraction;
pub mod formats;
pub mod lifting;
pub mod matching;
pub mod search;
pub mod shatter;
pub mod stripes;
pub mod torus;

pub use error::{Error, Result};
pub use shatter::{Family, Mask, ShatterReport};
pub use torus::{Arc, Closure, Cube, PointSet, Rat, Shape, Stripe, TorusBox, TorusPoint};
