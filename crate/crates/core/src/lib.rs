//! Numerical laboratory for exit times of diffusions.
//!
//! The crate simulates first exit times of Brownian motion on Euclidean
//! domains, horizontal Brownian motion on the Heisenberg group and the
//! simple random walk on Sierpinski-gasket graphs, solves the matching
//! discrete Dirichlet and Neumann problems exactly, and checks the
//! spectral survival bounds that tie the two together:
//!
//! * `e^{-λt} ≤ sup_x P_x(τ_D > t) ≤ K (1 + 2λt/d')^{d'} e^{-λt}`
//! * `Γ(p+1) ≤ λ^p sup_x E_x[τ^p] ≤ C_p`
//! * `log P_x(τ_D > t) / t → -λ(D)`
//!
//! Module map:
//!
//! * [`param`] parameter functions `F`, their inverse and the `Φ` transform.
//! * [`space`] ambient spaces, domains and ball volumes.
//! * [`layercake`] the layer-cake integration identity.
//! * [`sampler`] path-level Monte Carlo and batch exit-time collection.
//! * [`discrete`] graphs, linear solves, eigenpairs and heat kernels.
//! * [`estimate`] survival curves, moments, tail slopes and scaling fits.
//! * [`verify`] named inequality checks and condition fits.
//! * [`cli`] the `exitlab` batch front-end.

pub mod cli;
pub mod discrete;
mod error;
pub mod estimate;
pub mod layercake;
pub mod param;
pub mod quadrature;
pub mod sampler;
pub mod space;
pub mod verify;

pub use error::{Error, Result};

/// First positive zero of the Bessel function `J_0`.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;
/// First positive zero of `J_1'`.
pub const BESSEL_J1_PRIME_FIRST_ZERO: f64 = 1.841_183_781_340_659_3;
