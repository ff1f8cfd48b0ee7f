//! Command-line front end: data ingestion, posterior state documents, and
//! the `gpbayes` subcommands.

pub mod commands;
pub mod document;
pub mod ingest;

use gpbayes::Error;

/// Process exit status for a failed command.
///
/// 2 for usage errors, 4 when a posterior leaves its numeric regime, and 3
/// for every other data or domain problem.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<commands::UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Spec(_) => 2,
                e if e.is_numeric_regime() => 4,
                _ => 3,
            };
        }
    }
    3
}
