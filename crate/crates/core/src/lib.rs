pub mod butterfly;
pub mod cli;
pub mod indexing;
pub mod ratcf;
pub mod spectrum;
pub mod tree;
