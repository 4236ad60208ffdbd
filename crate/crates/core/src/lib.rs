pub mod cli;
pub mod cohomology;
pub mod deformation;
pub mod family;
pub mod ff2;
pub mod zeta;
pub mod frobzero;
pub mod hseries;
pub mod padic;
pub mod linalg;
pub mod oracle;
pub mod parse;
pub mod pipeline;
pub mod poly;
pub mod scalar;

pub use poly::Poly;
pub use scalar::Scalar;
