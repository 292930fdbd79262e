//! Step-level tests of the replay engine: for every assertion in the
//! chain, a tabulated oracle that satisfies everything before it and
//! breaks exactly at it must be convicted at that step, with the right
//! property and a witness that re-verifies.

mod common;

use std::collections::BTreeSet;

use sdchoice::analysis::verify_sd_domination;
use sdchoice::lotteries::sd_compare;
use sdchoice::schemes::{rd, FnScheme, SchemeError, TabulatedScheme};
use sdchoice::theorem::{
    proof_profile, replay, replay_lifted, step_assertions, ReplayError, ViolatedProperty,
    ViolationReport, ViolationWitness,
};
use sdchoice::{Alternative, Lottery, Profile, SdVerdict, Universe};

fn table(entries: &[(&str, &str)]) -> TabulatedScheme {
    let entries = entries
        .iter()
        .map(|(name, lottery)| {
            let profile = proof_profile(name)
                .unwrap_or_else(|| panic!("unknown fixture {name}"))
                .profile
                .clone();
            let lottery = Lottery::parse(lottery, profile.universe()).unwrap();
            (profile, lottery)
        })
        .collect();
    TabulatedScheme::new("falsifier", entries).unwrap()
}

fn reverify(report: &ViolationReport) {
    match &report.witness {
        ViolationWitness::Symmetry(w) => {
            let transformed = w
                .original
                .permute_agents(&w.pi)
                .unwrap()
                .permute_alternatives(&w.sigma)
                .unwrap();
            assert_eq!(transformed, w.original);
            let image = w.sigma.apply(&w.alternative);
            assert_ne!(
                w.original_lottery.mass_of(&w.alternative).unwrap(),
                w.transformed_lottery.mass_of(&image).unwrap()
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
            ..
        } => {
            verify_sd_domination(profile, dominator, lottery).unwrap();
        }
        ViolationWitness::Manipulation(w) => {
            w.verify().unwrap();
            assert_eq!(
                sd_compare(
                    w.true_profile.relation(w.agent).unwrap(),
                    &w.deviation_lottery,
                    &w.truthful_lottery,
                )
                .unwrap(),
                SdVerdict::StrictlyDominates
            );
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

struct Case {
    step: &'static str,
    property: ViolatedProperty,
    table: Vec<(&'static str, &'static str)>,
}

/// One falsifying oracle per chain step. Prefix entries satisfy every
/// earlier assertion; the final entry breaks exactly the labeled step.
fn falsifiers() -> Vec<Case> {
    use ViolatedProperty::*;
    const HALF_AB: &str = "1/2*a + 1/2*b";
    const HALF_BC: &str = "1/2*b + 1/2*c";
    const RD13: &str = "1/4*a + 1/2*b + 1/4*c";
    // Enters the contradiction branch: more than half the mass on a.
    const BRANCH_R3: &str = "3/5*a + 2/5*b";

    let case = |step, property, table: &[(&'static str, &'static str)]| Case {
        step,
        property,
        table: table.to_vec(),
    };

    vec![
        case(
            "R1-symmetry",
            AnonymityNeutrality,
            &[("R1", "1/2*a + 1/4*b + 1/4*c")],
        ),
        case(
            "R1-efficiency",
            SdEfficiency,
            &[("R1", "1/4*a + 1/4*b + 1/4*c + 1/4*d")],
        ),
        case(
            "R2-symmetry",
            AnonymityNeutrality,
            &[("R1", HALF_AB), ("R2", "1/2*a + 1/2*c")],
        ),
        case(
            "R2-efficiency",
            SdEfficiency,
            &[("R1", HALF_AB), ("R2", "3/8*a + 3/8*b + 1/8*c + 1/8*d")],
        ),
        case(
            "R3-symmetry",
            AnonymityNeutrality,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", "1/4*a + 1/4*b + 1/2*c"),
            ],
        ),
        case(
            "R3-efficiency",
            SdEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", "1/4*a + 1/4*b + 1/4*c + 1/4*d"),
            ],
        ),
        case(
            "R4-sp",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", HALF_AB),
            ],
        ),
        case(
            "R5-sp",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", HALF_AB),
            ],
        ),
        case(
            "R5-pareto",
            ExPostEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", "3/5*a + 1/5*b + 1/5*c"),
            ],
        ),
        case(
            "R6-pareto",
            ExPostEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", BRANCH_R3),
                ("R6", "3/5*a + 1/5*b + 1/5*d"),
            ],
        ),
        case(
            "R6-sp",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", BRANCH_R3),
                ("R6", HALF_AB),
            ],
        ),
        case(
            "R7-pareto",
            ExPostEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", BRANCH_R3),
                ("R6", BRANCH_R3),
                ("R7", "3/5*a + 1/5*b + 1/5*c"),
            ],
        ),
        case(
            "R7-sp",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", BRANCH_R3),
                ("R6", BRANCH_R3),
                ("R7", "2/5*a + 3/5*b"),
            ],
        ),
        // The branch cannot end well: with everything above holding, the
        // final symmetry constraint is arithmetically unsatisfiable.
        case(
            "R7-symmetry",
            AnonymityNeutrality,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", BRANCH_R3),
                ("R4", BRANCH_R3),
                ("R5", BRANCH_R3),
                ("R6", BRANCH_R3),
                ("R7", BRANCH_R3),
            ],
        ),
        case(
            "R8-upper",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", "1/4*a + 3/8*b + 3/8*c"),
            ],
        ),
        case(
            "R8-lower",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", "3/4*a + 1/8*b + 1/8*c"),
            ],
        ),
        case(
            "R8-dzero",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", "3/8*a + 3/8*b + 1/8*c + 1/8*d"),
            ],
        ),
        case(
            "R9-upper",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", "1/2*a + 1/4*b + 1/4*c"),
            ],
        ),
        case(
            "R9-lower",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", "1/4*a + 3/4*b"),
            ],
        ),
        case(
            "R8-czero",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", "1/2*a + 1/4*b + 1/4*c"),
                ("R9", HALF_AB),
            ],
        ),
        case(
            "R10-pareto",
            ExPostEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", "1/4*a + 1/2*b + 1/4*d"),
            ],
        ),
        case(
            "R10-upper",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", "1/4*a + 3/4*b"),
            ],
        ),
        case(
            "R10-lower",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", "3/4*a + 1/4*b"),
            ],
        ),
        case(
            "R11-pareto",
            ExPostEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", "1/4*a + 1/2*b + 1/4*d"),
            ],
        ),
        case(
            "R11-lower",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", "3/4*a + 1/4*b"),
            ],
        ),
        case(
            "R12-pareto",
            ExPostEfficiency,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", HALF_BC),
                ("R12", "1/4*b + 1/2*c + 1/4*d"),
            ],
        ),
        case(
            "R12-symmetry",
            AnonymityNeutrality,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", HALF_BC),
                ("R12", HALF_AB),
            ],
        ),
        case(
            "R12-c-lower",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", HALF_BC),
                ("R12", "1/5*a + 2/5*b + 2/5*c"),
            ],
        ),
        case(
            "R12-c-upper",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", HALF_AB),
                ("R12", HALF_BC),
            ],
        ),
        case(
            "R12-a-upper",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", "1/5*a + 3/5*b + 1/5*c"),
                ("R12", "3/5*a + 1/5*b + 1/5*c"),
            ],
        ),
        case(
            "R13-rd",
            RdExtension,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", HALF_BC),
                ("R12", HALF_BC),
                ("R13", HALF_BC),
            ],
        ),
        case(
            "R13-final",
            SdStrategyproofness,
            &[
                ("R1", HALF_AB),
                ("R2", HALF_AB),
                ("R3", HALF_AB),
                ("R8", HALF_AB),
                ("R9", HALF_AB),
                ("R10", HALF_AB),
                ("R11", HALF_BC),
                ("R12", HALF_BC),
                ("R13", RD13),
            ],
        ),
    ]
}

#[test]
fn every_step_convicts_its_falsifier() {
    for case in falsifiers() {
        let scheme = table(&case.table);
        let report = replay(&scheme)
            .unwrap_or_else(|err| panic!("step {}: replay failed: {err}", case.step));
        assert_eq!(report.step, case.step, "wrong step for {}", case.step);
        assert_eq!(
            report.property, case.property,
            "wrong property for {}",
            case.step
        );
        reverify(&report);
    }
}

#[test]
fn falsifier_matrix_covers_every_step() {
    let steps: BTreeSet<&str> = step_assertions().iter().map(|s| s.id).collect();
    let covered: BTreeSet<&str> = falsifiers().iter().map(|c| c.step).collect();
    assert_eq!(steps, covered);
}

#[test]
fn oracle_errors_carry_step_context() {
    // A table defined only on R1 fails at the first step that needs R2.
    let scheme = table(&[("R1", "1/2*a + 1/2*b")]);
    match replay(&scheme) {
        Err(ReplayError::Oracle { step, profile, .. }) => {
            assert_eq!(step, "R2-symmetry");
            assert_eq!(profile, "R2");
        }
        other => panic!("expected an oracle error, got {other:?}"),
    }
}

#[test]
fn wrong_universe_lotteries_are_rejected() {
    let other = Universe::parse("a,b,c,d,e").unwrap();
    let scheme = FnScheme::new("wrong-universe", move |_: &Profile| {
        let all: BTreeSet<Alternative> = other.alternatives().iter().cloned().collect();
        Ok(Lottery::uniform(&other, &all).unwrap())
    });
    assert!(matches!(
        replay(&scheme),
        Err(ReplayError::InvalidLottery { .. })
    ));
}

#[test]
fn lifted_oracle_leaking_mass_is_convicted_on_support() {
    let universe = Universe::parse("a,b,c,d,e").unwrap();
    let leaky = FnScheme::new("leaky", |profile: &Profile| {
        let all: BTreeSet<Alternative> =
            profile.universe().alternatives().iter().cloned().collect();
        Ok(Lottery::uniform(profile.universe(), &all).unwrap())
    });
    let report = replay_lifted(&leaky, 6, &universe).unwrap();
    assert_eq!(report.step, "lifted-support");
    assert_eq!(report.property, ViolatedProperty::SdEfficiency);
    reverify(&report);
}

#[test]
fn lifted_replay_walks_the_chain_for_base_supported_oracles() {
    // An oracle that answers the lifted profiles with the mock chain values
    // on the base alternatives reaches the forced final manipulation.
    let universe = Universe::parse("a,b,c,d,e").unwrap();
    let mock = FnScheme::new("lifted-mock", |profile: &Profile| {
        // Identify which lifted fixture this is and answer with the mock
        // chain value extended by zero mass on the extra alternative.
        let u = profile.universe().clone();
        let lookup: &[(&str, &str)] = &[
            ("R1", "1/2*a + 1/2*b"),
            ("R2", "1/2*a + 1/2*b"),
            ("R3", "1/2*a + 1/2*b"),
            ("R8", "1/2*a + 1/2*b"),
            ("R9", "1/2*a + 1/2*b"),
            ("R10", "1/2*a + 1/2*b"),
            ("R11", "1/2*b + 1/2*c"),
            ("R12", "1/2*b + 1/2*c"),
            ("R13", "1/4*a + 1/2*b + 1/4*c"),
        ];
        for (name, lottery) in lookup {
            let fixture = &proof_profile(name).unwrap().profile;
            let lifted =
                sdchoice::theorem::lift_profile(fixture, profile.len() as u32, &u).unwrap();
            if &lifted == profile {
                return Ok(Lottery::parse(lottery, &u).unwrap());
            }
        }
        Err(SchemeError::UndefinedProfile {
            scheme: "lifted-mock".to_string(),
        })
    });
    let report = replay_lifted(&mock, 6, &universe).unwrap();
    assert_eq!(report.step, "R13-final");
    assert_eq!(report.property, ViolatedProperty::SdStrategyproofness);
    reverify(&report);
    // The witness lives at the lifted level: five alternatives, six agents.
    if let ViolationWitness::Manipulation(w) = &report.witness {
        assert_eq!(w.true_profile.len(), 6);
        assert_eq!(w.true_profile.universe().len(), 5);
    } else {
        panic!("expected a manipulation witness");
    }
}

#[test]
fn branch_oracle_is_always_convicted_inside_the_branch() {
    // Entering the branch with consistent lotteries all the way down ends
    // in the forced symmetry conviction at R7; every prefix deviation is
    // caught earlier. Exhaustively vary the R7 value over a small grid to
    // confirm a conviction always happens.
    let grid = [
        "3/5*a + 2/5*b",
        "2/5*a + 3/5*b",
        "3/5*a + 1/5*b + 1/5*c",
        "1/2*a + 1/2*b",
        "1*a",
    ];
    for r7 in grid {
        let scheme = table(&[
            ("R1", "1/2*a + 1/2*b"),
            ("R2", "1/2*a + 1/2*b"),
            ("R3", "3/5*a + 2/5*b"),
            ("R4", "3/5*a + 2/5*b"),
            ("R5", "3/5*a + 2/5*b"),
            ("R6", "3/5*a + 2/5*b"),
            ("R7", r7),
        ]);
        let report = replay(&scheme).unwrap();
        assert!(
            report.step.starts_with("R7"),
            "r7 = {r7} convicted at {}",
            report.step
        );
        reverify(&report);
    }
}
