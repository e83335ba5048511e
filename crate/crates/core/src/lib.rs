//! Nested sampling with posterior repartitioning.
//!
//! Nested sampling draws its power from using the likelihood and the prior
//! separately, which becomes a liability when the likelihood peak sits far
//! out in the wings of the prior: the live set migrates so slowly that runs
//! become expensive or collapse outright. This crate rewrites the
//! likelihood/prior pair as an effective pair with the same product, so the
//! sampler explores a broader effective prior while posterior inferences and
//! the evidence are preserved.
//!
//! The crate provides:
//!
//! * [`model`] — priors, likelihoods, and the repartitioning transform;
//! * [`ns`] — the nested-sampling engine with pluggable constrained samplers;
//! * [`baselines`] — Metropolis–Hastings and importance-sampling baselines;
//! * [`diagnostics`] — runtime/convergence checks against a knowledge base
//!   and KL/JS divergence scoring;
//! * [`oracles`] — conjugate and quadrature ground-truth calculators;
//! * [`harness`] — a config-driven benchmark harness with CSV/JSON output.

pub mod math;
pub mod model;
pub mod oracles;
