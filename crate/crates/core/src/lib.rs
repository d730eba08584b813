//! Classical polytopes and quantum bounds for communication games with two
//! senders and one receiver.

pub mod classical;
pub mod corpus;
pub mod error;
pub mod hierarchy;
pub mod model;
pub mod numerics;
pub mod polytope;
pub mod sdp;
pub mod seesaw;

pub use error::{Error, Result};
