//! Spectral functionals of symmetric operators with a numerical-rank
//! tolerance, LCP solvers over the nonnegative orthant, and certificates
//! for the solution-set bounds of positive semidefinite instances.

pub mod bounds;
pub mod cli;
pub mod gallery;
pub mod io;
pub mod lcp;
pub mod operator;
pub mod report;
pub mod sweep;
