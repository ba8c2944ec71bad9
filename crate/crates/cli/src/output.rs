use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use serde::Serialize;

use itermap::dynamics::DynamicsError;
use itermap::groups::GroupError;
use itermap::theory::TheoryError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// A failed run: bad input exits with 2, a failed computation with 3.
#[derive(Debug)]
pub enum Failure {
    Spec(String),
    Compute(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Spec(_) => ExitCode::from(2),
            Failure::Compute(_) => ExitCode::from(3),
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Spec(m) | Failure::Compute(m) => m,
        }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Field(_)
            | DynamicsError::Parse(_)
            | DynamicsError::DegreeDrop { .. }
            | DynamicsError::ZeroDenominator
            | DynamicsError::DegenerateMap
            | DynamicsError::ConstantMap
            | DynamicsError::ZeroIterate => Failure::Spec(e.to_string()),
            DynamicsError::InseparableMap | DynamicsError::FieldTooLarge { .. } => {
                Failure::Compute(e.to_string())
            }
        }
    }
}

impl From<GroupError> for Failure {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::DegreeTooLarge(_)
            | GroupError::ClosureBudgetExceeded(_)
            | GroupError::CoefficientBudgetExceeded(_) => Failure::Compute(e.to_string()),
            _ => Failure::Spec(e.to_string()),
        }
    }
}

impl From<TheoryError> for Failure {
    fn from(e: TheoryError) -> Self {
        match e {
            TheoryError::Dynamics(e) => e.into(),
            TheoryError::Group(e) => e.into(),
            TheoryError::ParameterOutOfRange(_)
            | TheoryError::Domain(_)
            | TheoryError::NonIntegerCritical(_) => Failure::Spec(e.to_string()),
            TheoryError::BoundVoid(_)
            | TheoryError::OrbitExplosion { .. }
            | TheoryError::BudgetExceeded(_) => Failure::Compute(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Compute(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Compute(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Compute(e.to_string()))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))
}

/// Sends `text` to the requested file or to standard output.
pub fn emit(args: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &args.output {
        Some(path) => write_file(path, text),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

/// Renders a report as JSON or as CSV rows.
pub fn render<T: Serialize, R: Serialize>(
    format: Format,
    report: &T,
    rows: impl IntoIterator<Item = R>,
) -> Result<String, Failure> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(rows),
    }
}
