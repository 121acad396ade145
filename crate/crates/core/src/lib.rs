pub mod analysis;
pub mod cayley;
pub mod error;
pub mod group;
pub mod io;
pub mod laplace;
pub mod linalg;
pub mod poly;
pub mod snf;
pub mod suites;

pub use error::{Error, Result};
