//! Special functions.

pub use statrs::function::gamma::gamma;
