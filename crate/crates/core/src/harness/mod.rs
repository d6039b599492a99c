//! File formats, instance generators and the brute-force oracle behind the CLI.

pub mod brute_force;
pub mod generators;
pub mod io;
