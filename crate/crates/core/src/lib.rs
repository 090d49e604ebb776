//! Lossless motion-compensated wavelet coding of image volumes, with
//! re-sorting of block-structured highpass subbands.
//!
//! The pipeline: [`temporal`] lifting along the frame axis with block
//! [`motion`] compensation, a [`dwt`] spatial pyramid per frame, per-band
//! re-sorting decisions in [`resort`], code-block entropy coding in
//! [`tier1`], and the [`container`] format that ties them together.
//! [`report`] compares the three decision modes.
//!
//! ```
//! use lc5w::container::{decode, encode, DecisionMode, EncoderConfig};
//! use lc5w::volume::{generate_phantom, PhantomSpec};
//!
//! let v = generate_phantom(&PhantomSpec::blocky(32, 32, 4, 16, 0)).unwrap();
//! let bytes = encode(&v, &EncoderConfig::default().with_mode(DecisionMode::Lc)).unwrap();
//! assert_eq!(decode(&bytes).unwrap(), v);
//! ```

pub mod bytes;
pub mod container;
pub mod dwt;
pub mod error;
pub mod motion;
pub mod plane;
pub mod report;
pub mod resort;
pub mod temporal;
pub mod tier1;
pub mod volume;

pub use error::{Error, Result};
pub use plane::Plane;
