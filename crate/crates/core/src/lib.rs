//! Hybrid quantum-classical string diagrams.
//!
//! Doubled ZX terms ([`zx`]) are interpreted as completely positive maps
//! ([`sem`]), sent to real Pauli transfer matrices ([`ptm`]) and wired into
//! classical computation graphs ([`hybrid`]) where a quantum box is just
//! another smooth map.

pub mod data;
pub mod demo;
pub mod error;
pub mod hybrid;
pub mod linalg;
pub mod ptm;
pub mod random;
pub mod sem;
pub mod sim;
pub mod verify;
pub mod zx;

pub use error::{Error, Result};
