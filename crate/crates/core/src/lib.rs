pub mod arith;
pub mod error;
pub mod graph;
pub mod iso;
pub mod taut;
pub mod eval;
pub mod pullback;
pub mod forget;
pub mod pairing;
pub mod omega;
pub mod dr;
pub mod trees;
pub mod relations;
pub mod formal;
