//! Noise-contrastive estimation (NCE) and its exponential-loss variant (eNCE)
//! for exponential-family distributions, together with the optimizers and
//! landscape diagnostics needed to study how flat or well-conditioned the
//! resulting objectives are.
//!
//! Layout:
//! - [`numerics`]: adaptive quadrature, log-sum-exp, symmetric eigensolves,
//!   finite-difference derivative checks.
//! - [`expfam`]: the supported exponential families (1-d unit-variance
//!   Gaussian mean family; d-dimensional diagonal Gaussians), extended
//!   parameters, densities, samplers, and measured family constants.
//! - [`objective`]: population (quadrature / Monte Carlo) and empirical
//!   (batch) loss, gradient, and Hessian evaluation for both losses.
//! - [`optim`]: gradient descent, normalized gradient descent, and Newton's
//!   method with trajectory traces and standard step-size policies.
//! - [`landscape`]: Hessian extremes, condition numbers, Bhattacharyya
//!   coefficients, neighborhood constants, annulus probes, and a pass/fail
//!   certification report over the built-in inequality checks.

pub mod expfam;
pub mod landscape;
pub mod numerics;
pub mod objective;
pub mod optim;
