//! Lift the impossibility chain to more agents and alternatives: six
//! agents over five alternatives. The lifted profiles keep the original
//! four agents' preferences on a,b,c,d, rank the new alternative below
//! everything, and add fully indifferent agents; only lotteries over the
//! base alternatives stay SD-efficient there.
//!
//! ```bash
//! cargo run --example lifted_replay
//! ```

use sdchoice::analysis::check_sd_efficiency;
use sdchoice::schemes::RandomSerialDictatorship;
use sdchoice::theorem::{lift_profile, proof_profile, replay_lifted};
use sdchoice::{Lottery, Universe};

fn main() {
    let universe = Universe::parse("a,b,c,d,e").unwrap();
    let base = &proof_profile("R1").unwrap().profile;
    let lifted = lift_profile(base, 6, &universe).unwrap();
    print!("lifted R1 to 6 agents over a..e:\n{lifted}");

    // Any probability on the new alternative is SD-inefficient.
    let leaky = Lottery::parse("1/2*a + 1/4*b + 1/4*e", &universe).unwrap();
    println!(
        "\n{leaky} is {}",
        check_sd_efficiency(&lifted, &leaky).unwrap()
    );

    // The chain convicts the lifted oracle just like the base one.
    let report = replay_lifted(&RandomSerialDictatorship, 6, &universe).unwrap();
    println!(
        "\nlifted replay of rsd: {} at step {} (profile {})",
        report.property, report.step, report.profile_name
    );
}
