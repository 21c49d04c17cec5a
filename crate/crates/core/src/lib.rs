//! Chain-level fixed-point invariants, computed exactly.
//!
//! The crate provides four layers, each checked by construction:
//!
//! * [`linalg`]: integer matrices, Smith normal form, integer linear
//!   systems, homology.
//! * [`groupring`]: finite and finitely generated abelian groups, group
//!   rings, twisted conjugacy classes, Hattori-Stallings traces.
//! * [`chain`]: chain complexes over Z and over group rings, chain maps,
//!   homotopy certificates, mapping cones, strict duality, Lefschetz and
//!   Reidemeister traces.
//! * [`fincat`] and [`profunctor`]: finite categories, profunctors with
//!   chain-complex entries, bar-construction composites and shadows, dual
//!   pair certificates, trace matrices, weighted colimits and the
//!   linearity formula for traces of colimits.
//!
//! [`simplicial`] feeds geometric examples into the chain layer,
//! [`reidemeister`] implements base change along group homomorphisms and
//! relative Reidemeister traces, and [`selftest`] packages the acceptance
//! checks the test suite and the command line expose.

pub mod chain;
pub mod error;
pub mod fincat;
pub mod groupring;
pub mod linalg;
pub mod models;
pub mod profunctor;
pub mod reidemeister;
pub mod selftest;
pub mod simplicial;

pub use error::{Error, Result};
