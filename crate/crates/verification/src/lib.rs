//! Acceptance checks live in `tests/acceptance.rs`; this crate has no library code.
//!
//! Run them with `cargo test -p dualphase-verification --test acceptance`.
