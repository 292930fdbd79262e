//! Decide SD-efficiency with the exact LP checker and re-verify the
//! returned witness, then cross-check with the brute-force search.
//!
//! ```bash
//! cargo run --example sd_efficiency_lp
//! ```

use sdchoice::analysis::{
    brute_force_sd_efficiency, check_ex_post, check_sd_efficiency, verify_sd_domination,
    EfficiencyVerdict, InefficiencyWitness,
};
use sdchoice::{Lottery, Profile};

fn main() {
    let profile = Profile::parse(
        "agent 1: a~c > b > d\n\
         agent 2: b~d > a > c\n\
         agent 3: a > d > b > c\n\
         agent 4: b > c > a > d\n",
        None,
    )
    .unwrap();
    let uniform = Lottery::parse("1/4*a + 1/4*b + 1/4*c + 1/4*d", profile.universe()).unwrap();

    // No alternative is Pareto-dominated, so the uniform lottery is ex post
    // efficient; SD-efficiency is the stronger notion and rejects it.
    println!("ex post: {}", check_ex_post(&profile, &uniform).unwrap());
    let verdict = check_sd_efficiency(&profile, &uniform).unwrap();
    println!("sd:      {verdict}");

    if let EfficiencyVerdict::Inefficient(InefficiencyWitness::SdDominated { dominator, .. }) =
        &verdict
    {
        let (strict_agent, transcript) =
            verify_sd_domination(&profile, dominator, &uniform).unwrap();
        println!("witness re-verification (strict agent {strict_agent}):");
        for line in transcript {
            println!("  {line}");
        }
    }

    // The witness itself is an SD-efficient lottery.
    let half = Lottery::parse("1/2*a + 1/2*b", profile.universe()).unwrap();
    println!(
        "1/2*a + 1/2*b: {}",
        check_sd_efficiency(&profile, &half).unwrap()
    );
    println!(
        "brute force over denominators <= 12 agrees: {}",
        brute_force_sd_efficiency(&profile, &half, 12).unwrap()
    );
}
