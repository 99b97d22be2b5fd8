//! Serialization, LP export and the external-solver adapter.

pub mod bound_serde;
mod document;
mod lp;
mod solver;

pub use document::{
    read_model, read_model_file, write_model, write_model_file, DocumentError, DocumentMetadata, ModelDocument,
    Payload, FORMAT_VERSION,
};
pub use lp::{export_lp, export_lp_with_report, lower_row, LpError, LpExport};
pub use solver::{
    parse_solver_log, run_external_solver, SolverError, SolverPatterns, SolverResult, SolverRun, SolverStatus,
    DEFAULT_OPT_TOL,
};
