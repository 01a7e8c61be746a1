use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use exchange_core::market_file::MarketSpec;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_RESIDUAL: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<exchange_core::Error> for CliError {
    fn from(e: exchange_core::Error) -> Self {
        match e {
            exchange_core::Error::MarketFile(msg) => CliError::Parse(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// What a failing check means for the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckClass {
    Verification,
    Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub class: CheckClass,
    pub value: f64,
    /// `within`: |value - target| <= tolerance; `at_most`: value <= target + tolerance;
    /// `at_least`: value >= target - tolerance.
    pub relation: &'static str,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, relation: &'static str, value: f64, target: f64, tolerance: f64, passed: bool) -> Self {
        Check {
            name: name.into(),
            class: CheckClass::Verification,
            value,
            relation,
            target,
            tolerance,
            passed,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let ok = (value - target).abs() <= tolerance;
        Self::new(name, "within", value, target, tolerance, ok)
    }

    pub fn at_most(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let ok = value <= target + tolerance;
        Self::new(name, "at_most", value, target, tolerance, ok)
    }

    pub fn at_least(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        let ok = value >= target - tolerance;
        Self::new(name, "at_least", value, target, tolerance, ok)
    }

    /// A boolean condition, encoded as value 1/0 against target 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, "within", if ok { 1.0 } else { 0.0 }, 1.0, 0.0, ok)
    }

    pub fn residual(mut self) -> Self {
        self.class = CheckClass::Residual;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub market: Option<MarketSpec>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    pub data: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            market: None,
            warnings: Vec::new(),
            notes: Vec::new(),
            data: Value::Null,
            checks: Vec::new(),
            passed: true,
            exit_code: EXIT_PASS,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Derives `passed` and `exit_code` from the checks.
    pub fn finish(mut self) -> Self {
        let failed = |class| self.checks.iter().any(|c| !c.passed && c.class == class);
        self.exit_code = if failed(CheckClass::Verification) {
            EXIT_VERIFICATION
        } else if failed(CheckClass::Residual) {
            EXIT_RESIDUAL
        } else {
            EXIT_PASS
        };
        self.passed = self.exit_code == EXIT_PASS;
        self
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
