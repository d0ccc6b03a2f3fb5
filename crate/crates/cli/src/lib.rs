//! File formats and command implementations behind the `nomilp` binary.

pub mod commands;
pub mod document;
pub mod error;
pub mod formats;

pub use commands::{
    compare, nominate, simulate, MrrArg, NominateOptions, NominateOutput, SimulateOutput,
    TieBreakArg,
};
pub use document::NominationDocument;
pub use error::{exit, CliError};
pub use formats::to_json;
