//! Upper bounds on the maximum-likelihood decoding error probability of
//! binary linear block codes over the BPSK-AWGN channel, built on a
//! list-decoding "good region" and a binomial tail penalty, plus a Monte
//! Carlo harness that checks them.

pub mod bounds;
pub mod error;
pub mod numerics;
pub mod simulator;
pub mod spectrum;

pub use error::{Error, Result};
