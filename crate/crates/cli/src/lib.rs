//! Command-line front end for the invariants engine: a line-oriented
//! model format, a fixed example corpus, and deterministic reports.

pub mod build;
mod commands;
pub mod corpus;
pub mod document;
pub mod report;

pub use commands::run_from;

/// Entry point for the binary. Reads real process arguments and streams.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let mut out = std::io::stdout();
    let mut err = std::io::stderr();
    run_from(&args, &mut out, &mut err)
}
