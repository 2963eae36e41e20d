//! Error types shared by the whole library.
//!
//! Diagnostics are stored as `f64` regardless of the working scalar so the
//! error enum stays non-generic and easy to thread through callers.

use thiserror::Error;

/// Library-wide error enum.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A dimension is below the minimum the operation supports.
    #[error("{context} requires dimension >= {min}, got {got}")]
    DimensionTooSmall {
        context: &'static str,
        min: usize,
        got: usize,
    },

    /// An angular-velocity matrix expected to be a single-plane rotation has
    /// numerical rank greater than two.
    #[error("matrix rank exceeds 2: third singular value ratio {sigma_ratio:e} above {tol:e}")]
    RankError { sigma_ratio: f64, tol: f64 },

    /// A state drifted past a guard threshold (orthogonality loss, per-step
    /// energy jump, ...). The integrators raise this instead of silently
    /// continuing on garbage.
    #[error("drift guard tripped in {context}: {value:e} exceeds {limit:e}")]
    DriftError {
        context: &'static str,
        value: f64,
        limit: f64,
    },

    /// The symmetric positive-definite multiplier system failed to factor.
    #[error("singular multiplier system (pivot {pivot:e} at index {index})")]
    SingularSystem { pivot: f64, index: usize },

    /// No diagonal factor matrix reproduces the inertia operator on
    /// decomposable elements (the operator is not of axisymmetric type).
    #[error("no diagonal factorization of the inertia operator exists for this mass tensor")]
    Infeasible,

    /// A value violates the defining (in)equalities of its semialgebraic
    /// space beyond tolerance.
    #[error("point outside {space}: constraint '{constraint}' violated by {violation:e}")]
    OutsideSpace {
        space: &'static str,
        constraint: &'static str,
        violation: f64,
    },

    /// The two halves of a cylindrical mass tensor coincide; the second-
    /// reduction formulas divide by their difference.
    #[error("degenerate body: |J1 - J2| = {gap:e} below {tol:e}")]
    DegenerateBody { gap: f64, tol: f64 },

    /// Vectors that must span a plane are linearly dependent.
    #[error("degenerate configuration in {context}: dependent directions (residual {residual:e})")]
    DegenerateConfiguration {
        context: &'static str,
        residual: f64,
    },

    /// Reconstruction requires nonvanishing momentum.
    #[error("zero momentum: |p| = {norm:e} below {tol:e}")]
    ZeroMomentum { norm: f64, tol: f64 },

    /// Requested (momentum, energy) values lie outside the admissible wedge.
    #[error("(P, H) = ({momentum}, {energy}) outside the admissible energy-momentum region")]
    OutsideImage { momentum: f64, energy: f64 },

    /// Signal too short (or otherwise unusable) for frequency analysis.
    #[error("insufficient data for frequency analysis: {reason}")]
    InsufficientData { reason: &'static str },

    /// A state object violates its invariants.
    #[error("invalid state in {context}: {what} = {value:e} exceeds {tol:e}")]
    InvalidState {
        context: &'static str,
        what: &'static str,
        value: f64,
        tol: f64,
    },

    /// A mass tensor entry is non-positive or non-finite.
    #[error("mass tensor must have positive finite entries; entry {index} = {value}")]
    InvalidMass { index: usize, value: f64 },

    /// The multiplicity pattern of the mass tensor does not match the
    /// requested symmetry-based operation.
    #[error("wrong symmetry class for {context}: needs {needed}")]
    SymmetryMismatch {
        context: &'static str,
        needed: &'static str,
    },
}

/// Library-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages_render() {
        let e = Error::DimensionMismatch {
            context: "wedge",
            expected: 3,
            got: 4,
        };
        assert!(format!("{e}").contains("wedge"));
        let e = Error::DriftError {
            context: "orthogonality",
            value: 0.7,
            limit: 0.5,
        };
        assert!(format!("{e}").contains("7e-1"));
    }
}
