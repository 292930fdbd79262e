//! Implement the scheme trait for a custom rule and run the full battery
//! against it: symmetry checks, manipulation search and the impossibility
//! replay.
//!
//! The rule here is "uniform over the union of everyone's top class". It
//! is anonymous and neutral, but the chain still convicts it, as it must
//! convict every candidate.
//!
//! ```bash
//! cargo run --example custom_scheme
//! ```

use std::collections::BTreeSet;

use sdchoice::analysis::{check_anonymity_neutrality, find_sd_manipulation};
use sdchoice::schemes::SchemeError;
use sdchoice::theorem::{proof_profile, replay};
use sdchoice::{
    AgentPermutation, Alternative, AlternativePermutation, Lottery, Profile, SocialDecisionScheme,
};

struct TopUnion;

impl SocialDecisionScheme for TopUnion {
    fn name(&self) -> &str {
        "top-union"
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        let mut tops: BTreeSet<Alternative> = BTreeSet::new();
        let everything: BTreeSet<Alternative> =
            profile.universe().alternatives().iter().cloned().collect();
        for (_, relation) in profile.entries() {
            tops.extend(relation.max_set(&everything)?);
        }
        if tops.is_empty() {
            tops = everything;
        }
        Ok(Lottery::uniform(profile.universe(), &tops)?)
    }
}

fn main() {
    let profile = &proof_profile("R1").unwrap().profile;
    println!("top-union on R1: {}", TopUnion.evaluate(profile).unwrap());

    // Anonymity and neutrality hold for this rule by construction.
    let pi = AgentPermutation::parse("(1 2)(3 4)").unwrap();
    let sigma = AlternativePermutation::parse("(a b)(c d)").unwrap();
    let verdict = check_anonymity_neutrality(&TopUnion, profile, &pi, &sigma).unwrap();
    println!("symmetry under (pi, sigma) holds: {}", verdict.holds);

    // It is manipulable, and the search produces a verified witness.
    match find_sd_manipulation(&TopUnion, profile, None, None).unwrap() {
        Some(witness) => println!("manipulation: {witness}"),
        None => println!("no manipulation on R1"),
    }

    // And the chain convicts it.
    let report = replay(&TopUnion).unwrap();
    println!(
        "replay: {} at step {} (profile {})",
        report.property, report.step, report.profile_name
    );
}
