//! Simulation and verification laboratory for the n-dimensional
//! nonholonomic Veselova top.
//!
//! The configuration of the body is a rotation `g ∈ SO(n)`; the contact
//! direction in the body frame is `q = g⁻¹e₁`. The Veselova constraint
//! forces the angular velocity to be the single-plane rotation
//! `Ω = q ∧ q̇`, and the motion extremizes the kinetic energy of the mass
//! tensor `J = diag[J₁, …, Jₙ]` subject to that constraint. The library
//! implements:
//!
//! * the full constrained dynamics on `(g, Ω)` with its conserved energy,
//!   momentum level, and constraint residual diagnostics ([`full`]);
//! * the reduction to the tangent-vector pair `(q, p)` on the unit-sphere
//!   bundle, its invariant measure, energy-momentum map, steady rotations,
//!   and their stability ([`reduced`], [`stability`]);
//! * second reductions by the symmetry groups of axisymmetric
//!   (`J = diag[J₁, J₂, …, J₂]`) and cylindrical
//!   (`J = diag[J₁…, J₂…]`) bodies, with closed-form solutions, orbit
//!   strata, and invariant measures ([`axisymmetric`], [`cylindrical`],
//!   [`strata`]);
//! * reconstruction of full trajectories from reduced ones, symmetry
//!   embeddings that confine high-dimensional symmetric bodies to 3D/4D
//!   blocks, the explicit three-frequency relative equilibrium in
//!   dimension four, and the spatial trace of the body's axis
//!   ([`reconstruct`]);
//! * frequency analysis for estimating the dimension of the invariant
//!   torus a sampled trajectory winds around, with shipped preset
//!   experiments ([`spectrum`], [`presets`]).
//!
//! Everything numerical is generic over the floating-point scalar through
//! the [`scalar::Real`] trait; the `*64` aliases at the crate root fix
//! `f64` for ordinary use.

pub mod axisymmetric;
pub mod body;
pub mod cylindrical;
pub mod error;
pub mod full;
pub mod linalg;
pub mod presets;
pub mod reconstruct;
pub mod reduced;
pub mod scalar;
pub mod skew;
pub mod spectrum;
pub mod stability;
pub mod strata;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` vector.
pub type Vector64 = linalg::Vector<f64>;
/// `f64` square matrix.
pub type SquareMatrix64 = linalg::SquareMatrix<f64>;
/// `f64` orthogonal matrix.
pub type OrthogonalMatrix64 = linalg::OrthogonalMatrix<f64>;
/// `f64` skew-symmetric matrix.
pub type SkewMatrix64 = skew::SkewMatrix<f64>;
/// `f64` mass tensor.
pub type MassTensor64 = body::MassTensor<f64>;
/// `f64` full state `(g, Ω)`.
pub type FullState64 = full::FullState<f64>;
/// `f64` reduced state `(q, p)`.
pub type ReducedState64 = reduced::ReducedState<f64>;
/// `f64` integrator options.
pub type IntegratorOptions64 = reduced::IntegratorOptions<f64>;
/// `f64` point of the cylindrical second-reduced cone.
pub type CylPoint64 = cylindrical::CylPoint<f64>;
/// `f64` closed-form cylindrical relative equilibrium.
pub type CylReleq64 = reconstruct::CylReleq<f64>;
/// `f64` frequency spectrum.
pub type FrequencySpectrum64 = spectrum::FrequencySpectrum<f64>;

/// Deterministic RNG used by examples, tests, and the command-line tool.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
