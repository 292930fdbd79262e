// Replay and scheme errors deliberately carry full witness payloads.
#![allow(clippy::result_large_err)]

//! An exact-arithmetic toolkit for probabilistic social choice.
//!
//! The crate models agents with weak preferences (complete, transitive,
//! ties allowed) over a finite set of alternatives and social decision
//! schemes that map preference profiles to lotteries. Everything is
//! computed with arbitrary-precision rational arithmetic; no verdict ever
//! depends on floating point.
//!
//! What lives where:
//!
//! - [`preferences`]: weak orders as ordered partitions, profiles,
//!   permutation actions, Pareto dominance, weak-order enumeration.
//! - [`lotteries`]: exact-rational lotteries and the stochastic-dominance
//!   (SD) comparison.
//! - [`schemes`]: the social decision scheme abstraction, random
//!   dictatorship, random serial dictatorship, and tabulated schemes.
//! - [`exactlp`]: a small exact-rational linear programming solver
//!   (two-phase simplex with Bland's rule).
//! - [`analysis`]: efficiency and strategyproofness checkers that return
//!   machine-checkable witnesses.
//! - [`theorem`]: the thirteen-profile impossibility chain and a replay
//!   engine that convicts any candidate scheme claiming to be an anonymous,
//!   neutral, SD-efficient, SD-strategyproof extension of random
//!   dictatorship, plus the lifting construction to larger agent and
//!   alternative sets.
//! - [`report`]: structured (JSON) renderings of verdicts and witnesses.
//! - [`cli`]: the command-line interface behind the `sdchoice` binary.
//!
//! Each major capability has a runnable example under `examples/`; start
//! with `eval_rsd`:
//!
//! ```bash
//! cargo run --example eval_rsd
//! cargo run --example theorem_replay
//! ```

pub mod analysis;
pub mod cli;
pub mod exactlp;
pub mod lotteries;
pub mod preferences;
pub mod report;
pub mod schemes;
pub mod theorem;

pub use lotteries::{ratio, Lottery, Rational, SdVerdict};
pub use preferences::{
    AgentId, AgentPermutation, Alternative, AlternativePermutation, PreferenceRelation, Profile,
    Universe,
};
pub use schemes::SocialDecisionScheme;
