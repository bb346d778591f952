//! Driver layer for the `rdsplit-core` solver: refinement studies over a
//! ladder of grids, an independent unsplit FTCS oracle for
//! cross-validation, CSV/markdown table rendering, and the command-line
//! front end.

pub mod cli;
pub mod harness;
