//! Library surface of the command-line driver: document parsing, report
//! emission and the command implementations.

pub mod commands;
pub mod doc;
pub mod report;
