//! Compiles and runs every code snippet in the book (`book/src/*.md`)
//! as a doc-test, so the guide can never drift from the library.
//!
//! Each chapter is included verbatim as the documentation of an empty
//! module; `cargo test --doc -p book-tests` executes the fenced Rust
//! blocks.  The modules mirror the chapter order of `SUMMARY.md`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/groups-and-matrices.md")]
pub mod groups_and_matrices {}

#[doc = include_str!("../../../book/src/invariants.md")]
pub mod invariants {}

#[doc = include_str!("../../../book/src/partitioning.md")]
pub mod partitioning {}

#[doc = include_str!("../../../book/src/isomorphism.md")]
pub mod isomorphism {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
