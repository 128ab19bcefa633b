//! Formal L-parameter algebra for unitary groups, theta lifts of packet
//! characters, and the Gan-Gross-Prasad recipe for Fourier-Jacobi periods.

pub mod component;
pub mod dsl;
pub mod epsilon;
pub mod param;
pub mod recipe;
pub mod sign;
pub mod theta;
pub mod verify;

pub use sign::Sign;
