//! Document formats, reports and command implementations for the `distill`
//! command-line tool.

pub mod cli;
pub mod doc;
pub mod report;
