pub mod admissible;
pub mod arnoldf2;
pub mod decompgraph;
pub mod error;
pub mod flatsurf;
pub mod haupt;
pub mod intmat;
pub mod numfmt;
pub mod periods;
pub mod qsqrt2;
pub mod random;
pub mod symplattice;

pub use error::{Error, Result};
