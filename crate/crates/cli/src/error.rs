use std::fmt;

use mif_core::source::AxiomFailure;

/// Process exit status of the `mif` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    CheckFailed = 1,
    Input = 2,
    NotIntegral = 3,
    OracleAxiom = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            status: ExitStatus::Input,
            message: message.into(),
        }
    }

    /// Maps a solver error, rendering source positions with node labels.
    pub fn from_core(err: mif_core::Error, labels: &[String]) -> Self {
        use mif_core::Error;
        match err {
            Error::NotIntegral(msg) => CliError {
                status: ExitStatus::NotIntegral,
                message: format!("instance is not integral: {msg}"),
            },
            Error::OracleAxiom(failure) => CliError {
                status: ExitStatus::OracleAxiom,
                message: format!(
                    "entropy function violates its axioms: {}",
                    describe_axiom(&failure, labels)
                ),
            },
            other => CliError::input(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn label_set(set: mif_core::SourceSet, labels: &[String]) -> String {
    let names: Vec<&str> = set.iter().map(|p| labels[p].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// `labels[p]` names the source at position `p`.
pub fn describe_axiom(failure: &AxiomFailure, labels: &[String]) -> String {
    match failure {
        AxiomFailure::Normalization { value } => format!("H({{}}) = {value}, expected 0"),
        AxiomFailure::Monotonicity {
            smaller,
            larger,
            h_smaller,
            h_larger,
        } => format!(
            "not monotone: H({}) = {h_smaller} > H({}) = {h_larger}",
            label_set(*smaller, labels),
            label_set(*larger, labels)
        ),
        AxiomFailure::Submodularity { a, b, lhs, rhs } => format!(
            "not submodular: A = {}, B = {}: H(A) + H(B) = {lhs} < H(A∪B) + H(A∩B) = {rhs}",
            label_set(*a, labels),
            label_set(*b, labels)
        ),
    }
}
