//! Rough-path calculus driven by G-Brownian motion.
//!
//! The library simulates one-dimensional Brownian motion under volatility
//! uncertainty (a scenario family of controls with values in
//! `[σ_lo, σ_hi]`), lifts the samples to rough paths, solves the
//! associated rough and Stratonovich dynamics, and measures how fast the
//! polygonal-driver approximations converge:
//!
//! - the ODE scheme driven by the piecewise-linear interpolation reaches
//!   the Stratonovich solution at L² rate `n^{-1/2}` in the mesh count;
//! - the lifted interpolation reaches the Stratonovich lift at rate
//!   `n^{-θ}` in the α-Hölder rough distance for any `θ < 1/2 - α`.
//!
//! Module map:
//!
//! - [`path`]: uniform grids and grid paths;
//! - [`rough`]: second levels, Hölder norms, Chen identity, `ϱ_α`;
//! - [`gbm`]: volatility scenarios and `(B, ⟨B⟩)` samples;
//! - [`lift`]: Stratonovich / Itô / polygonal lifts;
//! - [`controlled`]: controlled paths and the compensated-sum integral;
//! - [`field`], [`rde`], [`schemes`]: coefficients, the rough solver and
//!   the three time-stepping schemes;
//! - [`expectation`]: upper-expectation and capacity estimators;
//! - [`fit`], [`experiment`], [`report`], [`config`]: rate fits, the
//!   experiment drivers and their CSV/JSON artifacts.

pub mod config;
pub mod controlled;
pub mod error;
pub mod expectation;
pub mod experiment;
pub mod field;
pub mod fit;
pub mod gbm;
pub mod lift;
pub mod path;
pub mod rde;
pub mod report;
pub mod rough;
pub mod schemes;

pub use error::{Error, Result};
