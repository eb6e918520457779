//! Approximate TSP tours for instances satisfying the β-relaxed triangle
//! inequality `w(u,v) <= β (w(u,x) + w(x,v))`, computed and certified in exact
//! rational arithmetic.

pub mod backbone;
pub mod cactus;
pub mod cli;
pub mod error;
mod flow;
pub mod instance;
pub mod lp;
pub mod matching;
pub mod onetree;
pub mod oracles;
pub mod parity;
pub mod rational;

pub use error::{Error, Result};
pub use instance::{beta_of, effective_beta, Beta, Instance, Vertex};
pub use rational::Rational;
