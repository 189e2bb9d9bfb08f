//! Metamath Zero toolkit: a single-pass verifier for `.mmb` proof files checked
//! against `.mm0` specifications, and a compiler that produces those proof
//! files from fully elaborated proof trees.

pub mod compiler;
pub mod corpus;
pub mod kernel;
pub mod mmb;
pub mod spec;
pub mod vm;
