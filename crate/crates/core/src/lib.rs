//! Exact computations on klt surface germs and singularity baskets.
//!
//! Runnable tours live in `examples/`:
//!
//! ```text
//! cargo run --release --example hj_strings
//! cargo run --release --example germ_info
//! cargo run --release --example classify_mld
//! cargo run --release --example universe
//! cargo run --release --example volume_formula
//! cargo run --release --example pipeline
//! cargo run --release --example ls_table
//! cargo run --release --example external_filter
//! ```

pub mod basket;
pub mod classifier;
pub mod external;
pub mod filters;
pub mod germ;
pub mod hj;
pub mod linalg;
pub mod ls;
pub mod rational;
pub mod report;
