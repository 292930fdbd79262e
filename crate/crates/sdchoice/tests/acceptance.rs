//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`). Every
//! expected value is exact; there are no tolerances anywhere.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdchoice::analysis::{
    brute_force_sd_efficiency, check_anonymity_neutrality, check_sd_efficiency, check_strong_sd_sp,
    verify_sd_domination, EfficiencyVerdict, InefficiencyWitness,
};
use sdchoice::lotteries::sd_compare;
use sdchoice::preferences::enumerate_weak_orders;
use sdchoice::schemes::{rd, rsd, RandomSerialDictatorship, TabulatedScheme, UniformScheme};
use sdchoice::theorem::{
    lift_profile, proof_profile, proof_profiles, replay, ViolationReport, ViolationWitness,
};
use sdchoice::{Alternative, Lottery, Profile, SdVerdict};

fn pass(number: u32, name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    println!("ACCEPTANCE {number} ({name}): PASS in {elapsed:.2?}");
    assert!(
        elapsed < budget,
        "criterion {number} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn example_profile() -> Profile {
    let text = std::fs::read_to_string(fixture("sec3_example.prof")).unwrap();
    Profile::parse(&text, None).unwrap()
}

#[test]
fn criterion_01_rsd_paper_value() {
    let started = Instant::now();
    let profile = example_profile();
    let expected = Lottery::parse("5/12*a + 5/12*b + 1/12*c + 1/12*d", profile.universe()).unwrap();
    assert_eq!(rsd(&profile).unwrap(), expected);
    pass(
        1,
        "rsd on the example profile",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_02_rd_value_on_r13() {
    let started = Instant::now();
    let r13 = &proof_profile("R13").unwrap().profile;
    let expected = Lottery::parse("1/4*a + 1/2*b + 1/4*c", r13.universe()).unwrap();
    assert_eq!(rd(r13).unwrap(), expected);
    pass(2, "rd on R13", started, Duration::from_secs(1));
}

#[test]
fn criterion_03_sd_efficiency_checker() {
    let started = Instant::now();
    let profile = example_profile();
    let uniform = Lottery::parse("1/4*a + 1/4*b + 1/4*c + 1/4*d", profile.universe()).unwrap();

    // The stated dominator strictly dominates for all four agents.
    let half = Lottery::parse("1/2*a + 1/2*b", profile.universe()).unwrap();
    for (agent, relation) in profile.entries() {
        assert_eq!(
            sd_compare(relation, &half, &uniform).unwrap(),
            SdVerdict::StrictlyDominates,
            "agent {agent}"
        );
    }

    // The checker rejects the uniform lottery and its own witness
    // re-verifies.
    match check_sd_efficiency(&profile, &uniform).unwrap() {
        EfficiencyVerdict::Inefficient(InefficiencyWitness::SdDominated { dominator, .. }) => {
            verify_sd_domination(&profile, &dominator, &uniform).unwrap();
        }
        other => panic!("uniform lottery must be sd-inefficient, got {other:?}"),
    }
    pass(3, "sd-efficiency checker", started, Duration::from_secs(1));
}

fn reverify_report(report: &ViolationReport) {
    match &report.witness {
        ViolationWitness::Symmetry(w) => {
            let transformed = w
                .original
                .permute_agents(&w.pi)
                .unwrap()
                .permute_alternatives(&w.sigma)
                .unwrap();
            assert_eq!(
                transformed, w.original,
                "permutation pair must fix the profile"
            );
            let image = w.sigma.apply(&w.alternative);
            assert_ne!(
                w.original_lottery.mass_of(&w.alternative).unwrap(),
                w.transformed_lottery.mass_of(&image).unwrap(),
                "witness alternative must expose the asymmetry"
            );
        }
        ViolationWitness::ParetoMass {
            profile,
            lottery,
            dominated,
            dominator,
            mass,
        } => {
            assert!(profile.pareto_dominates(dominator, dominated).unwrap());
            assert_eq!(lottery.mass_of(dominated).unwrap(), mass);
            assert!(num::Signed::is_positive(mass));
        }
        ViolationWitness::SdDomination {
            profile,
            lottery,
            dominator,
            strict_agent,
        } => {
            let (first_strict, _) = verify_sd_domination(profile, dominator, lottery).unwrap();
            assert_eq!(first_strict, *strict_agent);
        }
        ViolationWitness::Manipulation(w) => {
            w.verify().unwrap();
            let deviated = w.deviated_profile().unwrap();
            let differing = w
                .true_profile
                .entries()
                .iter()
                .filter(|(agent, relation)| deviated.relation(*agent).unwrap() != relation)
                .count();
            assert_eq!(differing, 1, "profiles must differ in exactly one relation");
        }
        ViolationWitness::RdMismatch {
            profile,
            expected,
            actual,
        } => {
            assert_eq!(&rd(profile).unwrap(), expected);
            assert_ne!(expected, actual);
        }
    }
}

#[test]
fn criterion_04_replay_convicts_every_oracle() {
    let started = Instant::now();
    let table = TabulatedScheme::from_file(Path::new(&fixture("mock_chain.table"))).unwrap();

    let reports = [
        replay(&RandomSerialDictatorship).unwrap(),
        replay(&UniformScheme).unwrap(),
        replay(&table).unwrap(),
    ];
    for report in &reports {
        reverify_report(report);
    }
    // The mock walks the whole chain and is caught by the forced final
    // manipulation.
    assert_eq!(reports[2].step, "R13-final");
    pass(
        4,
        "replay convicts every oracle",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_05_rsd_strong_sp_exhaustive() {
    let started = Instant::now();
    let u = universe("a,b,c");
    let orders = enumerate_weak_orders(&u);
    assert_eq!(orders.len(), 13);
    let profiles = sdchoice::analysis::all_profiles(&u, 2);
    assert_eq!(profiles.len(), 169);
    for profile in &profiles {
        let witness = check_strong_sd_sp(&RandomSerialDictatorship, profile, None, None).unwrap();
        assert!(
            witness.is_none(),
            "unexpected strong-sp witness on {profile}"
        );
    }
    pass(
        5,
        "rsd strong sd-strategyproofness, 169 profiles x 2 agents x 13 misreports",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_06_rsd_equals_rd_on_strict_profiles() {
    let started = Instant::now();
    let u = universe("a,b,c");
    let strict: Vec<_> = enumerate_weak_orders(&u)
        .into_iter()
        .filter(|r| r.is_strict())
        .collect();
    assert_eq!(strict.len(), 6);
    let mut checked = 0;
    for r1 in &strict {
        for r2 in &strict {
            for r3 in &strict {
                let profile = Profile::new(vec![
                    (1.into(), r1.clone()),
                    (2.into(), r2.clone()),
                    (3.into(), r3.clone()),
                ])
                .unwrap();
                assert_eq!(rsd(&profile).unwrap(), rd(&profile).unwrap(), "{profile}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 216);
    pass(
        6,
        "rsd = rd on all 216 strict profiles",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_07_rsd_anonymity_neutrality_random() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5d_c4_01_ce);
    let tokens = ["a", "b", "c", "d"];
    for trial in 0..200 {
        let m = rng.random_range(1..=4usize);
        let n = rng.random_range(1..=4u32);
        let u = universe(&tokens[..m].join(","));
        let profile = sample_profile(&mut rng, &u, n);
        let pi = random_agent_permutation(&mut rng, &profile);
        let sigma = random_alternative_permutation(&mut rng, &u);
        let verdict =
            check_anonymity_neutrality(&RandomSerialDictatorship, &profile, &pi, &sigma).unwrap();
        assert!(
            verdict.holds,
            "trial {trial}: rsd must be anonymous and neutral on {profile} under pi={pi}, sigma={sigma}"
        );
    }
    pass(
        7,
        "rsd anonymity+neutrality, 200 random profiles",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_08_weak_order_counts() {
    let started = Instant::now();
    let tokens = ["a", "b", "c", "d", "e"];
    let expected = [3usize, 13, 75, 541];
    for (m, expected) in (2..=5).zip(expected) {
        let u = universe(&tokens[..m].join(","));
        let orders = enumerate_weak_orders(&u);
        assert_eq!(orders.len(), expected, "m = {m}");
        assert_eq!(orders.len() as u64, fubini(m), "recurrence oracle, m = {m}");
    }
    pass(
        8,
        "weak-order counts 3, 13, 75, 541",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_09_lp_checker_matches_brute_force() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x10_77_e2_15);
    let u = universe("a,b,c,d");
    for trial in 0..100 {
        let profile = sample_profile(&mut rng, &u, 4);
        let lottery = sample_lottery(&mut rng, &u, 12);
        let lp = check_sd_efficiency(&profile, &lottery).unwrap();
        let brute = brute_force_sd_efficiency(&profile, &lottery, 12).unwrap();
        assert_eq!(
            lp.is_efficient(),
            brute.is_efficient(),
            "trial {trial}: LP and brute force disagree on {lottery} for {profile}"
        );
    }
    pass(
        9,
        "LP vs brute force on 100 random pairs",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_10_lifting_confines_efficient_support() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x11_f7_ed_01);
    let target = universe("a,b,c,d,e");
    let extra = Alternative::new("e");
    for fixture in proof_profiles() {
        let lifted = lift_profile(&fixture.profile, 6, &target).unwrap();
        let mut sampled = 0;
        while sampled < 10 {
            let lottery = sample_lottery(&mut rng, &target, 8);
            if !num::Signed::is_positive(lottery.mass_of(&extra).unwrap()) {
                continue;
            }
            sampled += 1;
            let verdict = check_sd_efficiency(&lifted, &lottery).unwrap();
            assert!(
                !verdict.is_efficient(),
                "{}: {lottery} has mass on e but was judged efficient",
                fixture.name
            );
        }
        // Sanity: a lottery inside the base support of the lifted profile
        // can be efficient.
        let inside: BTreeSet<Alternative> = [Alternative::new("a")].into();
        let degenerate = Lottery::uniform(&target, &inside).unwrap();
        let _ = check_sd_efficiency(&lifted, &degenerate).unwrap();
    }
    pass(
        10,
        "lifted profiles reject mass outside the base alternatives",
        started,
        Duration::from_secs(120),
    );
}
