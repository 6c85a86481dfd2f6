//! Distance moments `L^(p) = E|X - Y|^p` for independent uniform points in flat
//! polytopes.
//!
//! Closed forms come from Crofton-type reductions down to a handful of
//! irreducible configurations, which are in turn expanded into the auxiliary
//! integrals of [`auxint`]. Every closed-form path has a brute-force
//! counterpart in [`oracle`].

pub mod auxint;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod geom;
pub mod irreducible;
pub mod oracle;
pub mod polygon2d;
pub mod reduction;

mod sum;

pub use error::{Error, Result};

/// Where a numeric value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Quadrature => "quadrature",
            Provenance::MonteCarlo => "monte-carlo",
        })
    }
}

/// Rescaling applied to a raw moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalize {
    /// Raw coordinates.
    #[default]
    None,
    /// Body rescaled to unit volume.
    UnitVolume,
    /// Body rescaled to unit first intrinsic volume.
    UnitV1,
}

/// A moment value together with how it was obtained.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentResult {
    pub value: f64,
    /// Provenances of all contributing terms, deduplicated, in first-use order.
    pub provenance: Vec<Provenance>,
    /// Absolute error bound (0 for pure closed forms at double precision).
    pub error: f64,
}

impl MomentResult {
    pub fn closed_form(value: f64) -> Self {
        Self { value, provenance: vec![Provenance::ClosedForm], error: 0.0 }
    }

    pub fn provenance_label(&self) -> String {
        self.provenance.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("+")
    }
}
