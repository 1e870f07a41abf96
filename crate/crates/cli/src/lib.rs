//! Library half of the `gapmoments` command: record output and the
//! verification suite.

pub mod output;
pub mod verify;
