pub mod action;
pub mod cli;
pub mod construct;
pub mod ginzburg;
pub mod group;
pub mod linalg;
pub mod pipeline;
pub mod quiver;
pub mod scalar;
pub mod skew;
mod smith;
