//! Exhaustive strategyproofness checking: scan every profile, agent and
//! misreport for a profitable deviation.
//!
//! ```bash
//! cargo run --example manipulation_search
//! ```

use sdchoice::analysis::{all_profiles, check_strong_sd_sp, find_sd_manipulation};
use sdchoice::schemes::{RandomSerialDictatorship, SerialDictatorship};
use sdchoice::Universe;

fn main() {
    let universe = Universe::parse("a,b,c").unwrap();

    // Random serial dictatorship: no agent can gain by lying, under either
    // notion, on any two-agent profile over three alternatives.
    let profiles = all_profiles(&universe, 2);
    println!(
        "checking rsd on {} profiles x 2 agents x 13 misreports...",
        profiles.len()
    );
    let mut checked = 0usize;
    for profile in &profiles {
        let witness = check_strong_sd_sp(&RandomSerialDictatorship, profile, None, None)
            .expect("search runs");
        assert!(witness.is_none(), "rsd must be strongly sd-strategyproof");
        checked += 1;
    }
    println!("no witness across {checked} profiles: rsd is strongly sd-strategyproof here");

    // Fixed-order serial dictatorship is also strategyproof; the search
    // confirms it on the same grid.
    for profile in &profiles {
        let witness =
            find_sd_manipulation(&SerialDictatorship, profile, None, None).expect("search runs");
        assert!(witness.is_none());
    }
    println!("fixed-order serial dictatorship is sd-strategyproof here too");

    // A manipulable scheme for contrast: a mock that rewards one specific
    // misreport of agent 4 on a four-alternative profile.
    use sdchoice::schemes::FnScheme;
    use sdchoice::{Lottery, Profile};
    let truthful = Profile::parse(
        "agent 1: c > a~b > d\n\
         agent 2: b > a~c > d\n\
         agent 3: a > d > b~c\n\
         agent 4: b > c > a > d\n",
        None,
    )
    .unwrap();
    let deviated = truthful
        .with_relation(
            sdchoice::AgentId::new(4),
            sdchoice::PreferenceRelation::parse("b~c > a > d", truthful.universe()).unwrap(),
        )
        .unwrap();
    let u = truthful.universe().clone();
    let d = deviated.clone();
    let mock = FnScheme::new("mock", move |p: &Profile| {
        if *p == d {
            Ok(Lottery::parse("1/2*b + 1/2*c", &u).unwrap())
        } else {
            Ok(Lottery::parse("1/4*a + 1/2*b + 1/4*c", &u).unwrap())
        }
    });
    let witness = find_sd_manipulation(&mock, &truthful, None, None)
        .unwrap()
        .expect("the mock is manipulable");
    println!("mock scheme witness: {witness}");
    for line in witness.verify().unwrap() {
        println!("  {line}");
    }
}
