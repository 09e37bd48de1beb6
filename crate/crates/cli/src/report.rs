use std::fmt;
use std::io::{self, Write};
use std::process::ExitCode;

use qf_core::QfError;
use serde::Serialize;
use serde_json::Value;

/// Why a command did not succeed. `Usage` maps to exit code 2, the rest to 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
    Runtime(QfError),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
            Failure::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<QfError> for Failure {
    fn from(e: QfError) -> Self {
        Failure::Runtime(e)
    }
}

pub type Outcome = Result<(), Failure>;

/// Errors caused by the caller's parameters rather than by the computation.
pub fn usage(e: QfError) -> Failure {
    match e {
        QfError::InvalidGroup(_)
        | QfError::UnknownGroupSpec(_)
        | QfError::CompositeK(_)
        | QfError::Invalid(_)
        | QfError::DegenerateTheta(_)
        | QfError::GridTooCoarse(_)
        | QfError::TooLarge(_) => Failure::Usage(e.to_string()),
        other => Failure::Runtime(other),
    }
}

/// Serializes through `Value`, whose maps are ordered, so keys come out sorted.
pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

/// Writes one line to stdout. A closed pipe ends the process quietly, as a
/// reader such as `head` expects.
pub fn write_line(args: fmt::Arguments) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_fmt(args).and_then(|()| out.write_all(b"\n")) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

macro_rules! outln {
    ($($arg:tt)*) => {
        $crate::report::write_line(format_args!($($arg)*))
    };
}
pub(crate) use outln;

pub fn print_json(v: &Value) {
    outln!(
        "{}",
        serde_json::to_string_pretty(v).expect("JSON values always print")
    );
}

/// Prints the report, then fails with `what` unless `ok`.
pub fn emit(v: Value, ok: bool, what: impl FnOnce() -> String) -> Outcome {
    print_json(&v);
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(what()))
    }
}

/// A tolerance that may be loosened from `default` but never tightened.
pub fn tolerance(default: f64, given: Option<f64>) -> Result<f64, Failure> {
    match given {
        None => Ok(default),
        Some(t) if t.is_finite() && t >= default => Ok(t),
        Some(t) => Err(Failure::Usage(format!(
            "tolerance {t:e} is tighter than the default {default:e}"
        ))),
    }
}
