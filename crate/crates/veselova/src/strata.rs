//! Orbit-type strata of the second reduced spaces.
//!
//! Both second reductions (axisymmetric and cylindrical) partition their
//! quotient space by isotropy type. A stratum is identified by a tag and
//! carries the isotropy descriptor: by how much each factor of the
//! symmetry group `O(r) × O(r′)` shrinks on that stratum. A drop of
//! `(a, b)` means the isotropy subgroup is conjugate to
//! `O(r−a) × O(r′−b)`.
//!
//! For the axisymmetric reduction the acting group is the single factor
//! `O(n−1)` (treated as `r = 1`, `r′ = n−1` with a trivial first factor),
//! so only the second drop is meaningful there.

/// Stratum tag. The primed tags mark the mirror stratum where the roles
/// of the two coordinate blocks are exchanged; the subscript is the
/// dimension of the stratum inside the quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StratumTag {
    S0,
    S0Prime,
    S1,
    S1Prime,
    S2,
    S3,
    S3Prime,
    S4,
}

impl StratumTag {
    /// Display label, e.g. `"S0'"` for [`StratumTag::S0Prime`].
    pub fn label(&self) -> &'static str {
        match self {
            StratumTag::S0 => "S0",
            StratumTag::S0Prime => "S0'",
            StratumTag::S1 => "S1",
            StratumTag::S1Prime => "S1'",
            StratumTag::S2 => "S2",
            StratumTag::S3 => "S3",
            StratumTag::S3Prime => "S3'",
            StratumTag::S4 => "S4",
        }
    }
}

impl core::fmt::Display for StratumTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// A stratum tag together with its isotropy descriptor (dimension drops
/// of the two orthogonal-group factors).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Stratum {
    pub tag: StratumTag,
    /// `(a, b)`: isotropy conjugate to `O(r−a) × O(r′−b)`.
    pub isotropy_drop: (usize, usize),
}

impl Stratum {
    /// Stratum of the cylindrical quotient (group `O(r) × O(r′)`,
    /// `r, r′ ≥ 2`).
    pub fn cylindrical(tag: StratumTag) -> Self {
        let isotropy_drop = match tag {
            StratumTag::S0 => (0, 1),
            StratumTag::S0Prime => (1, 0),
            StratumTag::S1 => (0, 2),
            StratumTag::S1Prime => (2, 0),
            StratumTag::S2 => (1, 1),
            StratumTag::S3 => (1, 2),
            StratumTag::S3Prime => (2, 1),
            StratumTag::S4 => (2, 2),
        };
        Stratum { tag, isotropy_drop }
    }

    /// Stratum of the axisymmetric quotient (group `O(n−1)` acting on
    /// the complement of the symmetry axis; only the tags S0, S0′, S2,
    /// S3 occur).
    pub fn axisymmetric(tag: StratumTag) -> Self {
        let drop = match tag {
            StratumTag::S0 | StratumTag::S0Prime => 0,
            StratumTag::S2 => 1,
            StratumTag::S3 => 2,
            _ => unreachable!("tag {tag} does not occur in the axisymmetric quotient"),
        };
        Stratum {
            tag,
            isotropy_drop: (0, drop),
        }
    }
}

impl core::fmt::Display for Stratum {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag.label())
    }
}
