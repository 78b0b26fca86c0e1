//! Core primitives for modulation order confusion (MOC) links.
//!
//! The crate covers both directions of the disguise: symbol random mapping
//! (low-to-high order), symbol time diversity with a dynamic-programming
//! receiver (high-to-low order), the multi-antenna Taylor-series and
//! constellation-path transmitters, RIS reflection design, and the
//! eavesdropper's classification/separation toolchain used to score them.
//!
//! `no_std` + `alloc`; all randomness flows through seeded [`channel::RngStream`]
//! values so every simulation is reproducible.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod channel;
pub mod constellation;
pub mod linalg;
pub mod mimo;
pub mod ris;
pub mod srm;
pub mod std_codec;

pub use num_complex::Complex64;
