use std::fmt;

use ctx_core::exgraph::GraphError;
use ctx_core::hidden_variable::HiddenVariableError;
use ctx_core::quantum::QuantumError;
use ctx_core::{EmpiricalError, ScenarioError};

/// sysexits-style codes.
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATAERR: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_CAP: i32 = 70;
pub const EXIT_CANTCREAT: i32 = 73;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn malformed(message: impl fmt::Display) -> Self {
        CliError::new(EXIT_DATAERR, message.to_string())
    }

    pub fn not_found(message: impl fmt::Display) -> Self {
        CliError::new(EXIT_NOINPUT, message.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn scenario_code(e: &ScenarioError) -> i32 {
    match e {
        ScenarioError::TooManyGlobalSections { .. } => EXIT_CAP,
        _ => EXIT_DATAERR,
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::new(scenario_code(&e), e.to_string())
    }
}

impl From<EmpiricalError> for CliError {
    fn from(e: EmpiricalError) -> Self {
        let code = match &e {
            EmpiricalError::Scenario(s) => scenario_code(s),
            _ => EXIT_DATAERR,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<HiddenVariableError> for CliError {
    fn from(e: HiddenVariableError) -> Self {
        let code = match &e {
            HiddenVariableError::Scenario(s) => scenario_code(s),
            HiddenVariableError::Empirical(EmpiricalError::Scenario(s)) => scenario_code(s),
            _ => EXIT_DATAERR,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        let code = match &e {
            GraphError::TooManyVertices { .. } => EXIT_CAP,
            GraphError::Scenario(s) => scenario_code(s),
            _ => EXIT_DATAERR,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        let code = match &e {
            QuantumError::Scenario(s) => scenario_code(s),
            QuantumError::Empirical(EmpiricalError::Scenario(s)) => scenario_code(s),
            _ => EXIT_DATAERR,
        };
        CliError::new(code, e.to_string())
    }
}
