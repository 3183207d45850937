//! File formats and dump rendering shared by the `hypervol` binary and its
//! integration tests.

pub mod dump;
pub mod formats;
