use prism_core::alexander::AlexanderError;
use prism_core::changemaker::ChangemakerError;
use prism_core::ctype::CTypeError;
use prism_core::families::FamilyError;
use prism_core::{CfError, LatticeError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or input files; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A library invariant failed; exit code 3.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invariant(_) | CliError::Io(_) => 3,
        }
    }
}

fn lattice(e: LatticeError) -> CliError {
    match e {
        LatticeError::Overflow => CliError::Invariant(e.to_string()),
        e => CliError::Usage(e.to_string()),
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        lattice(e)
    }
}

impl From<CfError> for CliError {
    fn from(e: CfError) -> Self {
        match e {
            CfError::Degenerate(_) | CfError::SignCondition(_) => CliError::Invariant(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CTypeError> for CliError {
    fn from(e: CTypeError) -> Self {
        match e {
            CTypeError::Invariant(_) => CliError::Invariant(e.to_string()),
            CTypeError::Lattice(e) => lattice(e),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ChangemakerError> for CliError {
    fn from(e: ChangemakerError) -> Self {
        match e {
            ChangemakerError::Lattice(e) => lattice(e),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::CType(e) => e.into(),
            FamilyError::Changemaker(e) => e.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<AlexanderError> for CliError {
    fn from(e: AlexanderError) -> Self {
        match e {
            AlexanderError::Invariant(_) | AlexanderError::NotStabilized(_) => CliError::Invariant(e.to_string()),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.into())
        } else {
            CliError::Invariant(e.to_string())
        }
    }
}
