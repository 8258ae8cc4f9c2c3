pub mod cli;
pub mod infer;
pub mod semantics;
pub mod solver;
pub mod syntax;
pub mod testkit;
pub mod types;
