//! Numerical verification of Codazzi-type identities for surfaces in
//! `M^n(κ) × ℝ`.

pub mod catalog;
pub mod cli;
pub mod codazzi;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod jets;
pub mod linalg;
pub mod spaceforms;
pub mod theorems;

pub use error::{Error, Result};
