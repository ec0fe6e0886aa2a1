//! Construction, decoding and Monte Carlo evaluation of the code family that
//! interpolates between polar codes and Reed-Muller codes.

pub mod error;
pub mod channels;
pub mod construction;
pub mod decoders;
pub mod gf2;
pub mod montecarlo;

pub use error::{Error, Result};
