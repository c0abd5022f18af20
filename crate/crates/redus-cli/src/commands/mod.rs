mod common;
pub mod fed;
pub mod report;
pub mod sweep;
pub mod synth;
pub mod train;
