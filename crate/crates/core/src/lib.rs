//! A desk-scale laboratory for studying how neural-surrogate accuracy
//! scales with the compute budget and fidelity mix of its training data.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`solver`] — generates matched low/high-fidelity solutions of a 1D
//!    turbulent boundary-layer slice. High fidelity resolves the viscous
//!    sublayer (first cell center y+ < 1); low fidelity replaces the wall
//!    region with an equilibrium law-of-the-wall closure (first cell center
//!    y+ in [30, 300]) and is roughly 3x cheaper in deterministic work units.
//! 2. [`compose`] — selects a training set from a solved pool under a total
//!    work budget `D_b` split between fidelities by a composition `D_c`.
//! 3. [`surrogate`] — trains a small from-scratch MLP surrogate (velocity
//!    field + wall-shear scalar heads) with AdamW, warmup+cosine schedule,
//!    gradient clipping and early stopping.
//! 4. [`scaling`] / [`sweep`] / [`plot`] — runs the (budget x composition x
//!    seed) experiment grid, aggregates errors, fits saturating power laws
//!    and renders SVG charts.
//!
//! Everything is seeded and deterministic: identical configs produce
//! byte-identical pool manifests, results CSVs and SVGs.

pub mod compose;
pub mod config;
pub mod error;
pub mod metrics;
pub mod plot;
pub mod scaling;
pub mod solver;
pub mod surrogate;
pub mod sweep;

pub use error::{Error, Result};
