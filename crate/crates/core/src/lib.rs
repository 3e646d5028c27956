pub mod bench;
pub mod circuit;
pub mod error;
pub mod noise;
pub mod protocol;
pub mod sim;
pub mod transpile;
