//! Difference-flatness analysis for discrete-time nonlinear systems
//! `x⁺ = f(x, u)`.
//!
//! The pipeline runs bottom-up through the modules: [`symbolic`] supplies
//! exact rational-function algebra, [`model`] parses and validates systems,
//! [`geometry`] handles adapted charts and projectable distributions,
//! [`analysis`] runs the distribution sequence and issues the verdict,
//! [`construction`] builds a flat output and the implicit triangular form,
//! and [`verification`] checks candidates symbolically and numerically.

pub mod analysis;
pub mod cli;
pub mod construction;
pub mod geometry;
pub mod model;
pub mod symbolic;
pub mod verification;
