use std::fmt;

use maxcomplex_core::Error;

pub const OK: u8 = 0;
pub const USAGE: u8 = 1;
pub const MISMATCH: u8 = 2;
pub const CAPACITY: u8 = 3;
pub const EXHAUSTED: u8 = 4;

/// Outcomes that are not bugs in the input but still fail the command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// A bound was not attained or two computations disagree.
    Mismatch(String),
    /// A search ran out of budget.
    Exhausted(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Mismatch(m) | Failure::Exhausted(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for Failure {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Mismatch(_) => MISMATCH,
                Failure::Exhausted(_) => EXHAUSTED,
            };
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Capacity(_) | Error::NeedDedekind { .. } | Error::NeedCsgCount { .. } => {
                    CAPACITY
                }
                _ => USAGE,
            };
        }
    }
    USAGE
}
