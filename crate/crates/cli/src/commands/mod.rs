pub mod analyze;
pub mod hex;
pub mod plan;
pub mod simulate;
