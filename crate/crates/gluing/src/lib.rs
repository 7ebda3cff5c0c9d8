//! Spec files, reports, DOT rendering and the command dispatcher over
//! `gluing_core`.

pub mod dot;
pub mod random;
pub mod report;
pub mod run;
pub mod spec;

pub use report::RunReport;
pub use run::{run, RunArgs, RunError};
pub use spec::{parse_spec, serialize_spec, ParseOptions, SpecDocument, SpecError};
