//! Combinatorial instances and their encodings as generated spaces, with
//! analytic decoders that read a solution back from a certificate and check
//! it against the instance.

mod build;
mod decode;
mod instance;

pub use build::*;
pub use decode::*;
pub use instance::*;
