//! Economy documents, command dispatch and run reports.

mod document;
mod run;

pub use document::{
    parse_document, parse_economy, AgentSpec, DocumentOptions, EconomyDocument, ParsedEconomy, SchemaError, UtilitySpec,
    SCHEMA_VERSION,
};
pub use run::{
    digest, main_with_args, parse_price, run_command, run_on_economy, Cli, Command, CommonFlags, Format, Payload,
    RunReport, EXIT_EXHAUSTED, EXIT_OK, EXIT_REJECTED, EXIT_SCHEMA, EXIT_USAGE,
};
