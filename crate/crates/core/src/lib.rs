//! Exact analysis of finite strategic games: equilibria, smoothness
//! certificates, social contribution games, and concrete game families
//! (min-sum scheduling, linear congestion, second-price auctions, valid
//! utility games), all in rational arithmetic.

pub mod auction;
pub mod congestion;
pub mod equilibria;
pub mod error;
pub mod game;
pub mod lp;
pub mod rational;
pub mod scheduling;
pub mod smoothness;
pub mod utility;

pub use error::{Error, Result};
pub use game::{FiniteGame, Orientation, Profile};
pub use rational::Q;
