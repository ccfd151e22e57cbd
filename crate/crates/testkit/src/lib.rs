//! Test support for mkbs: random knowledge bases, answer scripts, and
//! brute-force oracles that share no code with the engine they check.

pub mod gen;
pub mod oracle;
pub mod script;

pub use gen::{ENGINE_GOAL, random_engine_kb, random_net, random_syntax_kb, EngineKbShape};
pub use oracle::{brute_force_cf, closure_distances, cyclic_attributes_brute_force};
pub use script::RandomScript;
