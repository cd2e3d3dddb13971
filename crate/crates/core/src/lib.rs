//! Sum-power minimization for transmitters built from reconfigurable
//! intelligent surfaces (RIS), where every user is served by its own row of
//! unit-modulus reflecting elements.

pub mod analysis;
pub mod baselines;
pub mod channel;
pub mod dualmethod;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod powerctl;
pub mod sdp;
pub mod sdr;

pub use error::{Error, Result};
