pub mod diffexpr;
pub mod families;
pub mod foliation;
pub mod harness;
pub mod hodograph;
pub mod jets;
pub mod symmetry;
