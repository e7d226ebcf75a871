pub mod circuit_mc;
pub mod constants;
pub mod couplings;
pub mod entropy_code;
pub mod error;
pub mod fit;
pub mod lattice_lg;
pub mod meanfield;
pub mod specfun;
pub mod syk_chain;

pub use error::{Error, Result};
