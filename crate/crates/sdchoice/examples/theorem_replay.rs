//! Replay the thirteen-profile impossibility chain against candidate
//! schemes. Every candidate is convicted of violating one of: anonymity
//! plus neutrality, ex post efficiency, SD-efficiency,
//! SD-strategyproofness, or agreement with random dictatorship.
//!
//! ```bash
//! cargo run --example theorem_replay
//! ```

use sdchoice::schemes::{RandomSerialDictatorship, SerialDictatorship, UniformScheme};
use sdchoice::theorem::{proof_profiles, replay, step_assertions};

fn main() {
    println!(
        "chain: {} profiles, {} step assertions\n",
        proof_profiles().len(),
        step_assertions().len()
    );

    // Random serial dictatorship satisfies everything except
    // SD-efficiency, and the chain finds exactly that.
    let report = replay(&RandomSerialDictatorship).unwrap();
    println!("{report}");

    // The constant uniform scheme is anonymous, neutral and strategyproof,
    // but not even ex post efficient on the chain profiles.
    let report = replay(&UniformScheme).unwrap();
    println!(
        "uniform scheme: {} at step {}\n",
        report.property, report.step
    );

    // Fixed-order serial dictatorship fails the very first symmetry
    // constraint.
    let report = replay(&SerialDictatorship).unwrap();
    println!(
        "serial dictatorship: {} at step {}",
        report.property, report.step
    );
}
