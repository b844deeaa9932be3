//! Scenario files, fixtures, reports, and command execution for the
//! `slantmap` binary. The library surface exists so integration tests can
//! drive commands without spawning processes.

pub mod commands;
pub mod report;
pub mod scenario;

use slantmap_core::fixtures;
use slantmap_core::rmap::MapScenario;

/// Built-in scenarios reachable through `--fixture`.
pub const FIXTURE_NAMES: [&str; 4] = [
    "paper-semi-slant",
    "paper-hemi-slant",
    "polar-plane",
    "euclidean-identity",
];

pub fn fixture_by_name(name: &str) -> Option<MapScenario> {
    match name {
        "paper-semi-slant" => Some(fixtures::paper_semi_slant()),
        "paper-hemi-slant" => Some(fixtures::paper_hemi_slant()),
        "polar-plane" => Some(fixtures::polar_plane()),
        "euclidean-identity" => Some(fixtures::euclidean_identity()),
        _ => None,
    }
}

/// Process exit codes shared by the binary and its tests.
pub mod exit_codes {
    pub const OK: i32 = 0;
    pub const SCENARIO_INVALID: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
    pub const NUMERIC_FAILURE: i32 = 4;
    pub const UNKNOWN_IDENTITY: i32 = 5;
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn scenario(message: impl Into<String>) -> CliError {
        CliError {
            exit_code: exit_codes::SCENARIO_INVALID,
            message: message.into(),
        }
    }

    pub fn check(message: impl Into<String>) -> CliError {
        CliError {
            exit_code: exit_codes::CHECK_FAILED,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> CliError {
        CliError {
            exit_code: exit_codes::NUMERIC_FAILURE,
            message: message.into(),
        }
    }

    pub fn unknown_identity(name: &str) -> CliError {
        CliError {
            exit_code: exit_codes::UNKNOWN_IDENTITY,
            message: format!(
                "unknown identity `{name}`; run `slantmap identity --list` for the catalog"
            ),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

/// Maps core errors onto the exit-code taxonomy: structural problems are
/// scenario errors, verdict-style outcomes are check failures, and
/// inversion/eigen/evaluation breakdowns are numeric failures.
pub fn map_core_error(e: impl CoreErrorClass) -> CliError {
    e.classify()
}

pub trait CoreErrorClass {
    fn classify(self) -> CliError;
}

impl CoreErrorClass for slantmap_core::rmap::MapError {
    fn classify(self) -> CliError {
        use slantmap_core::rmap::MapError as E;
        match &self {
            E::Dimension(_) | E::NonConstantRank { .. } | E::NoSamplePoints => {
                CliError::scenario(self.to_string())
            }
            E::RankMismatch { .. } | E::NotPerp { .. } => CliError::check(self.to_string()),
            E::Geom(_) | E::Eval(_) | E::Linalg(_) => CliError::numeric(self.to_string()),
        }
    }
}

impl CoreErrorClass for slantmap_core::geom::GeomError {
    fn classify(self) -> CliError {
        CliError::numeric(self.to_string())
    }
}

impl CoreErrorClass for slantmap_core::cstruct::CStructError {
    fn classify(self) -> CliError {
        use slantmap_core::cstruct::CStructError as E;
        match &self {
            E::OddDimension(_) | E::Shape => CliError::scenario(self.to_string()),
            E::Geom(_) => CliError::numeric(self.to_string()),
        }
    }
}

impl CoreErrorClass for slantmap_core::slant::SlantError {
    fn classify(self) -> CliError {
        use slantmap_core::slant::SlantError as E;
        match &self {
            E::MissingComplexStructure | E::NeedsTwoSamplePoints => {
                CliError::scenario(self.to_string())
            }
            E::BadOperators(_) => CliError::check(self.to_string()),
            E::Map(inner) => inner.clone().classify(),
            E::CStruct(inner) => inner.clone().classify(),
            E::Linalg(_) => CliError::numeric(self.to_string()),
        }
    }
}

impl CoreErrorClass for slantmap_core::clairaut::ClairautError {
    fn classify(self) -> CliError {
        use slantmap_core::clairaut::ClairautError as E;
        match &self {
            E::Map(inner) => inner.clone().classify(),
            E::NoPotential | E::ZeroVector => CliError::scenario(self.to_string()),
            E::CurveLeftImage { .. } => CliError::check(self.to_string()),
            E::Geom(_) | E::Eval(_) | E::Linalg(_) | E::GeodesicFailed(_) => {
                CliError::numeric(self.to_string())
            }
        }
    }
}

impl CoreErrorClass for slantmap_core::ineq::IneqError {
    fn classify(self) -> CliError {
        use slantmap_core::ineq::IneqError as E;
        match &self {
            E::Map(inner) => inner.clone().classify(),
            E::Slant(inner) => inner.clone().classify(),
            E::RankTooSmall { .. } => CliError::scenario(self.to_string()),
            E::Frame(_) => CliError::numeric(self.to_string()),
        }
    }
}

impl CoreErrorClass for slantmap_core::theorems::TheoremError {
    fn classify(self) -> CliError {
        use slantmap_core::theorems::TheoremError as E;
        match &self {
            E::Map(inner) => inner.clone().classify(),
            E::Slant(inner) => inner.clone().classify(),
            E::Clairaut(inner) => inner.clone().classify(),
            E::IncompatibleClassification { .. } | E::MissingGeodesicSeed => {
                CliError::scenario(self.to_string())
            }
            E::KernelVelocity { .. } => CliError::scenario(self.to_string()),
            E::Geom(_) | E::Eval(_) | E::Linalg(_) => CliError::numeric(self.to_string()),
        }
    }
}

impl CoreErrorClass for slantmap_core::expr::ParseError {
    fn classify(self) -> CliError {
        CliError::scenario(self.to_string())
    }
}
