//! Independent cross-checks of the recipe: the see-saw transport, seeded random
//! parameters, and the property suite built on both.

pub mod random;
pub mod seesaw;
pub mod suite;
