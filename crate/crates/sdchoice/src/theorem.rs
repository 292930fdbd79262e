//! The impossibility replay engine.
//!
//! No social decision scheme on four or more agents and alternatives can be
//! anonymous, neutral, SD-efficient, SD-strategyproof, and an extension of
//! random dictatorship at the same time. The executable content of that
//! statement is a chain of thirteen fixed profiles, `R1` through `R13`,
//! with one asserted constraint per derivation step: symmetry constraints
//! from anonymity and neutrality, zero-probability constraints from
//! efficiency, and inequality constraints from strategyproofness. For any
//! candidate scheme the chain cannot be walked to the end: some assertion
//! must fail, and the failing step names the violated property and builds a
//! witness that re-verifies through the `analysis` checkers.
//!
//! [`replay`] runs the chain against an oracle directly on the four-agent,
//! four-alternative fixtures. [`replay_lifted`] embeds the fixtures into a
//! larger agent and alternative universe first (extra agents fully
//! indifferent, extra alternatives ranked below everything), evaluates the
//! caller's oracle there, and runs the same chain on the induced
//! four-by-four scheme.
//!
//! The branch structure mirrors the derivation: profiles `R4` through `R7`
//! are consulted only when the evaluated `R3` lottery puts more than half
//! its probability on `a`; inside that branch the final symmetry assertion
//! cannot hold, and outside it the chain ends in a forced manipulation at
//! `R13`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num::{Signed, Zero};
use thiserror::Error;

use crate::analysis::{
    check_sd_efficiency, verify_sd_domination, AnalysisError, EfficiencyVerdict,
    InefficiencyWitness, ManipulationKind, ManipulationWitness, SymmetryWitness,
};
use crate::lotteries::{ratio, Lottery, LotteryError, Rational};
use crate::preferences::{
    AgentId, AgentPermutation, Alternative, AlternativePermutation, PreferenceError,
    PreferenceRelation, Profile, Universe,
};
use crate::schemes::{rd, SchemeError, SocialDecisionScheme};

/// One of the thirteen chain profiles, by name.
#[derive(Clone, PartialEq, Debug)]
pub struct NamedProofProfile {
    pub name: &'static str,
    pub profile: Profile,
}

const FIXTURE_TEXTS: [(&str, &str); 13] = [
    ("R1", include_str!("../fixtures/r1.prof")),
    ("R2", include_str!("../fixtures/r2.prof")),
    ("R3", include_str!("../fixtures/r3.prof")),
    ("R4", include_str!("../fixtures/r4.prof")),
    ("R5", include_str!("../fixtures/r5.prof")),
    ("R6", include_str!("../fixtures/r6.prof")),
    ("R7", include_str!("../fixtures/r7.prof")),
    ("R8", include_str!("../fixtures/r8.prof")),
    ("R9", include_str!("../fixtures/r9.prof")),
    ("R10", include_str!("../fixtures/r10.prof")),
    ("R11", include_str!("../fixtures/r11.prof")),
    ("R12", include_str!("../fixtures/r12.prof")),
    ("R13", include_str!("../fixtures/r13.prof")),
];

/// The thirteen chain profiles on agents 1..4 over alternatives a,b,c,d.
pub fn proof_profiles() -> &'static [NamedProofProfile] {
    static PROFILES: OnceLock<Vec<NamedProofProfile>> = OnceLock::new();
    PROFILES.get_or_init(|| {
        FIXTURE_TEXTS
            .iter()
            .map(|(name, text)| NamedProofProfile {
                name,
                profile: Profile::parse(text, None).expect("fixtures are well-formed"),
            })
            .collect()
    })
}

/// Looks up a chain profile by name (`R1` .. `R13`).
pub fn proof_profile(name: &str) -> Option<&'static NamedProofProfile> {
    proof_profiles().iter().find(|p| p.name == name)
}

fn base_universe() -> &'static Universe {
    proof_profiles()[0].profile.universe()
}

/// The property a failed step convicts.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ViolatedProperty {
    /// Reported jointly: the argument uses anonymity and neutrality
    /// together and cannot localize which one failed.
    AnonymityNeutrality,
    ExPostEfficiency,
    SdEfficiency,
    SdStrategyproofness,
    RdExtension,
}

impl fmt::Display for ViolatedProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolatedProperty::AnonymityNeutrality => "anonymity+neutrality",
            ViolatedProperty::ExPostEfficiency => "ex-post-efficiency",
            ViolatedProperty::SdEfficiency => "sd-efficiency",
            ViolatedProperty::SdStrategyproofness => "sd-strategyproofness",
            ViolatedProperty::RdExtension => "rd-extension",
        })
    }
}

/// The constraint a step asserts about the evaluated lotteries. Masses are
/// read from the four-by-four chain values (lifted evaluations are
/// restricted to the base alternatives first).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StepCheck {
    /// Each listed pair of alternatives carries equal probability.
    MassPairsEqual(Vec<(&'static str, &'static str)>),
    /// Every listed alternative carries zero probability.
    MassZero(Vec<&'static str>),
    /// The probabilities of the listed alternatives sum to at most the bound.
    SumAtMost(Vec<&'static str>, Rational),
    /// ... at least the bound.
    SumAtLeast(Vec<&'static str>, Rational),
    /// ... strictly more than the bound.
    SumExceeds(Vec<&'static str>, Rational),
    /// `p(alt) <= p_other(other_alt)` across two chain profiles.
    MassAtMostOther {
        alt: &'static str,
        other: &'static str,
        other_alt: &'static str,
    },
    /// `p(alt) >= p_other(other_alt)`.
    MassAtLeastOther {
        alt: &'static str,
        other: &'static str,
        other_alt: &'static str,
    },
    /// The evaluated lottery equals random dictatorship on the profile.
    EqualsRd,
    /// Unsatisfiable by construction; the step always fires its witness.
    AlwaysFails,
}

/// How a failed step is attributed and how its witness is built.
#[derive(Clone, PartialEq, Debug)]
pub enum Attribution {
    /// The permutation pair maps the profile to itself; unequal masses at
    /// an orbit violate anonymity plus neutrality.
    Symmetry {
        agent_cycles: Vec<Vec<u32>>,
        alt_cycles: Vec<Vec<&'static str>>,
    },
    /// The stated lottery weakly SD-dominates the evaluated one for every
    /// agent, strictly for some, whenever the check fails.
    ExplicitDominator(Vec<(&'static str, Rational)>),
    /// Ask the LP checker for a dominating lottery.
    LpDominator,
    /// A listed alternative with positive probability is Pareto-dominated.
    Pareto {
        dominated: Vec<&'static str>,
        dominator: &'static str,
    },
    /// Agent `agent`, truthful in `true_profile`, gains by reporting their
    /// relation from `misreport_profile` (the two fixtures differ exactly
    /// in that agent's entry).
    Manipulation {
        agent: u32,
        true_profile: &'static str,
        misreport_profile: &'static str,
    },
    /// The evaluated lottery differs from random dictatorship.
    RdExtension,
}

/// One step of the derivation chain.
#[derive(Clone, PartialEq, Debug)]
pub struct StepAssertion {
    pub id: &'static str,
    /// The chain profile the constraint reads (cross-profile checks also
    /// read the profile named inside the check).
    pub profile: &'static str,
    pub check: StepCheck,
    pub attribution: Attribution,
    /// Steps of the contradiction sub-argument, run only when the branch
    /// condition `p_R3(a) > 1/2` holds.
    pub branch_only: bool,
    /// A step that cannot hold once reached; reaching it and seeing the
    /// check pass would mean the engine itself is broken.
    pub must_fail: bool,
}

/// The ordered derivation chain. Every assertion carries the property to
/// attribute on failure and the ingredients of its witness.
pub fn step_assertions() -> Vec<StepAssertion> {
    use Attribution::*;
    use StepCheck::*;
    let half = ratio(1, 2);
    let half_ab = vec![("a", half.clone()), ("b", half.clone())];
    let swap12_34 = vec![vec![1, 2], vec![3, 4]];
    let swap_ab_cd = vec![vec!["a", "b"], vec!["c", "d"]];

    let step = |id, profile, check, attribution| StepAssertion {
        id,
        profile,
        check,
        attribution,
        branch_only: false,
        must_fail: false,
    };
    let branch = |id, profile, check, attribution| StepAssertion {
        branch_only: true,
        ..step(id, profile, check, attribution)
    };

    vec![
        step(
            "R1-symmetry",
            "R1",
            MassPairsEqual(vec![("a", "b"), ("c", "d")]),
            Symmetry {
                agent_cycles: swap12_34.clone(),
                alt_cycles: swap_ab_cd.clone(),
            },
        ),
        step(
            "R1-efficiency",
            "R1",
            MassZero(vec!["c", "d"]),
            ExplicitDominator(half_ab.clone()),
        ),
        step(
            "R2-symmetry",
            "R2",
            MassPairsEqual(vec![("a", "b"), ("c", "d")]),
            Symmetry {
                agent_cycles: swap12_34.clone(),
                alt_cycles: swap_ab_cd.clone(),
            },
        ),
        step(
            "R2-efficiency",
            "R2",
            MassZero(vec!["c", "d"]),
            ExplicitDominator(half_ab),
        ),
        step(
            "R3-symmetry",
            "R3",
            MassPairsEqual(vec![("c", "d")]),
            Symmetry {
                agent_cycles: vec![vec![1, 3], vec![2, 4]],
                alt_cycles: vec![vec!["c", "d"]],
            },
        ),
        step("R3-efficiency", "R3", MassZero(vec!["c", "d"]), LpDominator),
        // Contradiction branch: assume p_R3(a) > 1/2.
        branch(
            "R4-sp",
            "R4",
            SumExceeds(vec!["a"], half.clone()),
            Manipulation {
                agent: 1,
                true_profile: "R4",
                misreport_profile: "R3",
            },
        ),
        branch(
            "R5-sp",
            "R5",
            SumExceeds(vec!["a"], half.clone()),
            Manipulation {
                agent: 3,
                true_profile: "R5",
                misreport_profile: "R4",
            },
        ),
        branch(
            "R5-pareto",
            "R5",
            MassZero(vec!["c", "d"]),
            Pareto {
                dominated: vec!["c", "d"],
                dominator: "b",
            },
        ),
        branch(
            "R6-pareto",
            "R6",
            MassZero(vec!["c", "d"]),
            Pareto {
                dominated: vec!["c", "d"],
                dominator: "b",
            },
        ),
        branch(
            "R6-sp",
            "R6",
            SumExceeds(vec!["a"], half.clone()),
            Manipulation {
                agent: 2,
                true_profile: "R5",
                misreport_profile: "R6",
            },
        ),
        branch(
            "R7-pareto",
            "R7",
            MassZero(vec!["c", "d"]),
            Pareto {
                dominated: vec!["c", "d"],
                dominator: "b",
            },
        ),
        branch(
            "R7-sp",
            "R7",
            SumExceeds(vec!["a"], half.clone()),
            Manipulation {
                agent: 4,
                true_profile: "R6",
                misreport_profile: "R7",
            },
        ),
        StepAssertion {
            must_fail: true,
            ..branch(
                "R7-symmetry",
                "R7",
                MassPairsEqual(vec![("a", "b")]),
                Symmetry {
                    agent_cycles: swap12_34,
                    alt_cycles: vec![vec!["a", "b"]],
                },
            )
        },
        // Main line, reached when p_R3(a) <= 1/2.
        step(
            "R8-upper",
            "R8",
            SumAtMost(vec!["b", "c"], half.clone()),
            Manipulation {
                agent: 3,
                true_profile: "R8",
                misreport_profile: "R1",
            },
        ),
        step(
            "R8-lower",
            "R8",
            SumAtLeast(vec!["b", "c"], half.clone()),
            Manipulation {
                agent: 4,
                true_profile: "R8",
                misreport_profile: "R2",
            },
        ),
        step(
            "R8-dzero",
            "R8",
            MassZero(vec!["d"]),
            Manipulation {
                agent: 4,
                true_profile: "R8",
                misreport_profile: "R2",
            },
        ),
        step(
            "R9-upper",
            "R9",
            SumAtMost(vec!["a", "c"], half.clone()),
            Manipulation {
                agent: 2,
                true_profile: "R9",
                misreport_profile: "R3",
            },
        ),
        step(
            "R9-lower",
            "R9",
            SumAtLeast(vec!["a"], half.clone()),
            Manipulation {
                agent: 1,
                true_profile: "R9",
                misreport_profile: "R8",
            },
        ),
        step(
            "R8-czero",
            "R8",
            MassZero(vec!["c"]),
            Manipulation {
                agent: 1,
                true_profile: "R9",
                misreport_profile: "R8",
            },
        ),
        step(
            "R10-pareto",
            "R10",
            MassZero(vec!["d"]),
            Pareto {
                dominated: vec!["d"],
                dominator: "a",
            },
        ),
        step(
            "R10-upper",
            "R10",
            SumAtMost(vec!["b"], half.clone()),
            Manipulation {
                agent: 2,
                true_profile: "R8",
                misreport_profile: "R10",
            },
        ),
        step(
            "R10-lower",
            "R10",
            SumAtLeast(vec!["b"], half.clone()),
            Manipulation {
                agent: 2,
                true_profile: "R10",
                misreport_profile: "R8",
            },
        ),
        step(
            "R11-pareto",
            "R11",
            MassZero(vec!["d"]),
            Pareto {
                dominated: vec!["d"],
                dominator: "a",
            },
        ),
        step(
            "R11-lower",
            "R11",
            SumAtLeast(vec!["b"], half),
            Manipulation {
                agent: 1,
                true_profile: "R10",
                misreport_profile: "R11",
            },
        ),
        step(
            "R12-pareto",
            "R12",
            MassZero(vec!["d"]),
            Pareto {
                dominated: vec!["d"],
                dominator: "a",
            },
        ),
        step(
            "R12-symmetry",
            "R12",
            MassPairsEqual(vec![("b", "c")]),
            Symmetry {
                agent_cycles: vec![vec![1, 2]],
                alt_cycles: vec![vec!["b", "c"]],
            },
        ),
        step(
            "R12-c-lower",
            "R12",
            MassAtLeastOther {
                alt: "c",
                other: "R11",
                other_alt: "c",
            },
            Manipulation {
                agent: 1,
                true_profile: "R12",
                misreport_profile: "R11",
            },
        ),
        step(
            "R12-c-upper",
            "R12",
            MassAtMostOther {
                alt: "c",
                other: "R11",
                other_alt: "c",
            },
            Manipulation {
                agent: 1,
                true_profile: "R11",
                misreport_profile: "R12",
            },
        ),
        step(
            "R12-a-upper",
            "R12",
            MassAtMostOther {
                alt: "a",
                other: "R11",
                other_alt: "a",
            },
            Manipulation {
                agent: 1,
                true_profile: "R11",
                misreport_profile: "R12",
            },
        ),
        step("R13-rd", "R13", EqualsRd, RdExtension),
        step(
            "R13-final",
            "R13",
            AlwaysFails,
            Manipulation {
                agent: 4,
                true_profile: "R13",
                misreport_profile: "R12",
            },
        ),
    ]
}

/// Witness payload of a violation report.
#[derive(Clone, PartialEq, Debug)]
pub enum ViolationWitness {
    Symmetry(SymmetryWitness),
    ParetoMass {
        profile: Profile,
        lottery: Lottery,
        dominated: Alternative,
        dominator: Alternative,
        mass: Rational,
    },
    SdDomination {
        profile: Profile,
        lottery: Lottery,
        dominator: Lottery,
        strict_agent: AgentId,
    },
    Manipulation(ManipulationWitness),
    RdMismatch {
        profile: Profile,
        expected: Lottery,
        actual: Lottery,
    },
}

/// A machine-checkable conviction of a candidate scheme: the property it
/// violates, the step of the chain that caught it, a witness, and the
/// transcript of the chain progress plus the witness re-verification.
#[derive(Clone, PartialEq, Debug)]
pub struct ViolationReport {
    pub scheme: String,
    pub property: ViolatedProperty,
    pub step: &'static str,
    pub profile_name: String,
    pub witness: ViolationWitness,
    pub transcript: Vec<String>,
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme: {}", self.scheme)?;
        writeln!(f, "violated property: {}", self.property)?;
        writeln!(
            f,
            "failed step: {} (profile {})",
            self.step, self.profile_name
        )?;
        match &self.witness {
            ViolationWitness::Symmetry(w) => {
                writeln!(
                    f,
                    "witness: profile is invariant under pi={}, sigma={}",
                    w.pi, w.sigma
                )?;
                writeln!(
                    f,
                    "  but the evaluated lottery gives {} to {} and {} to {}",
                    w.original_lottery.mass_of(&w.alternative).unwrap(),
                    w.alternative,
                    w.transformed_lottery
                        .mass_of(&w.sigma.apply(&w.alternative))
                        .unwrap(),
                    w.sigma.apply(&w.alternative),
                )?;
                write!(f, "profile:\n{}", indented(&w.original.to_string()))?;
                writeln!(f, "evaluated lottery: {}", w.original_lottery)?;
            }
            ViolationWitness::ParetoMass {
                profile,
                lottery,
                dominated,
                dominator,
                mass,
            } => {
                writeln!(
                    f,
                    "witness: {dominated} has probability {mass} but {dominator} Pareto-dominates it"
                )?;
                write!(f, "profile:\n{}", indented(&profile.to_string()))?;
                writeln!(f, "evaluated lottery: {lottery}")?;
            }
            ViolationWitness::SdDomination {
                profile,
                lottery,
                dominator,
                strict_agent,
            } => {
                writeln!(
                    f,
                    "witness: {dominator} is weakly sd-preferred by every agent, strictly by agent {strict_agent}"
                )?;
                write!(f, "profile:\n{}", indented(&profile.to_string()))?;
                writeln!(f, "evaluated lottery: {lottery}")?;
            }
            ViolationWitness::Manipulation(w) => {
                writeln!(
                    f,
                    "witness: agent {} manipulates by reporting `{}`",
                    w.agent, w.misreport
                )?;
                write!(
                    f,
                    "true profile:\n{}",
                    indented(&w.true_profile.to_string())
                )?;
                writeln!(f, "truthful outcome: {}", w.truthful_lottery)?;
                writeln!(f, "deviation outcome: {}", w.deviation_lottery)?;
            }
            ViolationWitness::RdMismatch {
                profile,
                expected,
                actual,
            } => {
                writeln!(
                    f,
                    "witness: random dictatorship returns {expected}, the scheme returns {actual}"
                )?;
                write!(f, "profile:\n{}", indented(&profile.to_string()))?;
            }
        }
        writeln!(f, "transcript:")?;
        for line in &self.transcript {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

fn indented(text: &str) -> String {
    text.lines().map(|line| format!("  {line}\n")).collect()
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("step {step}: oracle failed on {profile}: {source}")]
    Oracle {
        step: &'static str,
        profile: String,
        #[source]
        source: SchemeError,
    },
    #[error("step {step}: oracle returned an invalid lottery on {profile}: {detail}")]
    InvalidLottery {
        step: &'static str,
        profile: String,
        detail: String,
    },
    #[error("step {step}: witness construction failed: {detail}")]
    WitnessRejected { step: &'static str, detail: String },
    #[error("the chain ran to completion without convicting; the engine is broken")]
    ChainExhausted,
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Replays the chain against a scheme on the four-agent, four-alternative
/// fixtures. Always produces a [`ViolationReport`] for a total scheme; an
/// `Err` means the oracle itself failed (undefined profile, invalid
/// lottery), not that the scheme passed.
pub fn replay(scheme: &dyn SocialDecisionScheme) -> Result<ViolationReport, ReplayError> {
    ChainRunner::new(scheme, Mode::Base)?.run()
}

/// Replays the chain against a scheme defined on `num_agents` agents over
/// `universe` (a superset of a,b,c,d with at least four agents): each
/// fixture is lifted, the oracle is evaluated on the lifted profile, and
/// the chain constraints are checked on the restriction of the returned
/// lottery to the base alternatives. A returned lottery with positive
/// probability outside the base alternatives is convicted of
/// SD-inefficiency immediately. The final extension-of-random-dictatorship
/// step is checked at the induced four-by-four level, since the lifted
/// profiles contain fully indifferent agents and are outside random
/// dictatorship's own domain.
pub fn replay_lifted(
    scheme: &dyn SocialDecisionScheme,
    num_agents: u32,
    universe: &Universe,
) -> Result<ViolationReport, ReplayError> {
    ChainRunner::new(
        scheme,
        Mode::Lifted {
            num_agents,
            universe: universe.clone(),
        },
    )?
    .run()
}

enum Mode {
    Base,
    Lifted { num_agents: u32, universe: Universe },
}

struct ChainRunner<'a> {
    scheme: &'a dyn SocialDecisionScheme,
    mode: Mode,
    world_profiles: BTreeMap<&'static str, Profile>,
    world_lotteries: BTreeMap<&'static str, Lottery>,
    /// Chain values: the world lottery restricted to the base alternatives.
    chain: BTreeMap<&'static str, Lottery>,
    transcript: Vec<String>,
}

impl<'a> ChainRunner<'a> {
    fn new(scheme: &'a dyn SocialDecisionScheme, mode: Mode) -> Result<Self, ReplayError> {
        if let Mode::Lifted {
            num_agents,
            universe,
        } = &mode
        {
            // Validate once up front; lift_profile re-checks per fixture.
            lift_profile(&proof_profiles()[0].profile, *num_agents, universe)?;
        }
        Ok(ChainRunner {
            scheme,
            mode,
            world_profiles: BTreeMap::new(),
            world_lotteries: BTreeMap::new(),
            chain: BTreeMap::new(),
            transcript: Vec::new(),
        })
    }

    fn world_profile(&mut self, name: &'static str) -> Result<Profile, ReplayError> {
        if let Some(profile) = self.world_profiles.get(name) {
            return Ok(profile.clone());
        }
        let fixture = proof_profile(name).expect("step profiles exist");
        let profile = match &self.mode {
            Mode::Base => fixture.profile.clone(),
            Mode::Lifted {
                num_agents,
                universe,
            } => lift_profile(&fixture.profile, *num_agents, universe)?,
        };
        self.world_profiles.insert(name, profile.clone());
        Ok(profile)
    }

    /// Evaluates the oracle on a chain profile. In lifted mode a lottery
    /// with probability outside the base alternatives short-circuits into
    /// an SD-efficiency conviction on the lifted profile.
    fn ensure(
        &mut self,
        step: &'static str,
        name: &'static str,
    ) -> Result<Option<ViolationReport>, ReplayError> {
        if self.chain.contains_key(name) {
            return Ok(None);
        }
        let profile = self.world_profile(name)?;
        let lottery = self
            .scheme
            .evaluate(&profile)
            .map_err(|source| ReplayError::Oracle {
                step,
                profile: name.to_string(),
                source,
            })?;
        if lottery.universe() != profile.universe() {
            return Err(ReplayError::InvalidLottery {
                step,
                profile: name.to_string(),
                detail: "lottery universe differs from the profile universe".to_string(),
            });
        }
        let restricted = match lottery.restrict(base_universe()) {
            Ok(restricted) => restricted,
            Err(LotteryError::MassOutsideTarget) => {
                self.transcript.push(format!(
                    "{name}: lottery {lottery} puts probability outside the base alternatives"
                ));
                return Ok(Some(
                    self.convict_lifted_support(step, name, profile, lottery)?,
                ));
            }
            Err(other) => return Err(other.into()),
        };
        self.transcript
            .push(format!("{name}: evaluated to {restricted}"));
        self.world_lotteries.insert(name, lottery);
        self.chain.insert(name, restricted);
        Ok(None)
    }

    fn convict_lifted_support(
        &mut self,
        step: &'static str,
        name: &'static str,
        profile: Profile,
        lottery: Lottery,
    ) -> Result<ViolationReport, ReplayError> {
        let verdict = check_sd_efficiency(&profile, &lottery)?;
        let EfficiencyVerdict::Inefficient(InefficiencyWitness::SdDominated {
            dominator,
            strict_agent,
            transcript,
        }) = verdict
        else {
            return Err(ReplayError::WitnessRejected {
                step,
                detail: "probability outside the base alternatives must be sd-inefficient"
                    .to_string(),
            });
        };
        let mut full = self.transcript.clone();
        full.push(
            "only lotteries over the base alternatives are sd-efficient in a lifted profile"
                .to_string(),
        );
        full.extend(transcript);
        Ok(ViolationReport {
            scheme: self.scheme.name().to_string(),
            property: ViolatedProperty::SdEfficiency,
            step: "lifted-support",
            profile_name: name.to_string(),
            witness: ViolationWitness::SdDomination {
                profile,
                lottery,
                dominator,
                strict_agent,
            },
            transcript: full,
        })
    }

    fn mass(&self, name: &str, alt: &str) -> Rational {
        self.chain[name]
            .mass_of(&Alternative::new(alt))
            .expect("base alternative")
            .clone()
    }

    fn holds(&self, step: &StepAssertion) -> bool {
        let name = step.profile;
        match &step.check {
            StepCheck::MassPairsEqual(pairs) => pairs
                .iter()
                .all(|(x, y)| self.mass(name, x) == self.mass(name, y)),
            StepCheck::MassZero(alts) => alts.iter().all(|x| self.mass(name, x).is_zero()),
            StepCheck::SumAtMost(alts, bound) => {
                alts.iter().map(|x| self.mass(name, x)).sum::<Rational>() <= *bound
            }
            StepCheck::SumAtLeast(alts, bound) => {
                alts.iter().map(|x| self.mass(name, x)).sum::<Rational>() >= *bound
            }
            StepCheck::SumExceeds(alts, bound) => {
                alts.iter().map(|x| self.mass(name, x)).sum::<Rational>() > *bound
            }
            StepCheck::MassAtMostOther {
                alt,
                other,
                other_alt,
            } => self.mass(name, alt) <= self.mass(other, other_alt),
            StepCheck::MassAtLeastOther {
                alt,
                other,
                other_alt,
            } => self.mass(name, alt) >= self.mass(other, other_alt),
            StepCheck::EqualsRd => {
                let fixture = &proof_profile(name).expect("step profiles exist").profile;
                match rd(fixture) {
                    Ok(expected) => expected == self.chain[name],
                    Err(_) => false,
                }
            }
            StepCheck::AlwaysFails => false,
        }
    }

    fn run(mut self) -> Result<ViolationReport, ReplayError> {
        let steps = step_assertions();
        let mut branch_taken = None;
        for step in &steps {
            if step.branch_only {
                let taken = *branch_taken.get_or_insert_with(|| self.mass("R3", "a") > ratio(1, 2));
                if !taken {
                    continue;
                }
            }
            if let Some(report) = self.ensure(step.id, step.profile)? {
                return Ok(report);
            }
            // Cross-profile checks read an already-evaluated profile.
            if self.holds(step) {
                if step.must_fail {
                    return Err(ReplayError::WitnessRejected {
                        step: step.id,
                        detail: "assertion cannot hold for a valid lottery at this point"
                            .to_string(),
                    });
                }
                self.transcript.push(format!("ok: {}", step.id));
                continue;
            }
            return self.convict(step);
        }
        Err(ReplayError::ChainExhausted)
    }

    fn convict(mut self, step: &StepAssertion) -> Result<ViolationReport, ReplayError> {
        self.transcript.push(format!("failed: {}", step.id));
        let (property, witness, verification) = self.build_witness(step)?;
        let mut transcript = self.transcript;
        transcript.extend(verification);
        Ok(ViolationReport {
            scheme: self.scheme.name().to_string(),
            property,
            step: step.id,
            profile_name: step.profile.to_string(),
            witness,
            transcript,
        })
    }

    fn build_witness(
        &mut self,
        step: &StepAssertion,
    ) -> Result<(ViolatedProperty, ViolationWitness, Vec<String>), ReplayError> {
        let name = step.profile;
        let reject = |detail: String| ReplayError::WitnessRejected {
            step: step.id,
            detail,
        };
        match &step.attribution {
            Attribution::Symmetry {
                agent_cycles,
                alt_cycles,
            } => {
                let pi = AgentPermutation::from_cycles(agent_cycles)?;
                let sigma = AlternativePermutation::from_cycles(alt_cycles)?;
                let profile = self.world_profile(name)?;
                let transformed = profile.permute_agents(&pi)?.permute_alternatives(&sigma)?;
                if transformed != profile {
                    return Err(reject(
                        "permutation pair does not map the profile to itself".to_string(),
                    ));
                }
                let lottery = self.world_lotteries[name].clone();
                let failing = profile
                    .universe()
                    .alternatives()
                    .iter()
                    .find(|alt| {
                        lottery.mass_of(&sigma.apply(alt)).unwrap() != lottery.mass_of(alt).unwrap()
                    })
                    .cloned()
                    .ok_or_else(|| reject("no asymmetric alternative found".to_string()))?;
                let verification = vec![
                    format!("profile {name} maps to itself under pi={pi}, sigma={sigma}"),
                    format!(
                        "anonymity and neutrality force equal probability along sigma orbits, \
                         but {failing} gets {} and {} gets {}",
                        lottery.mass_of(&failing).unwrap(),
                        sigma.apply(&failing),
                        lottery.mass_of(&sigma.apply(&failing)).unwrap()
                    ),
                ];
                let witness = SymmetryWitness {
                    pi,
                    sigma,
                    original: profile.clone(),
                    transformed,
                    original_lottery: lottery.clone(),
                    // The transformed profile is the profile itself and
                    // schemes are deterministic, so its evaluation is the
                    // same lottery.
                    transformed_lottery: lottery,
                    alternative: failing,
                };
                Ok((
                    ViolatedProperty::AnonymityNeutrality,
                    ViolationWitness::Symmetry(witness),
                    verification,
                ))
            }
            Attribution::ExplicitDominator(pairs) => {
                let profile = self.world_profile(name)?;
                let lottery = self.world_lotteries[name].clone();
                let pairs: Vec<(Alternative, Rational)> = pairs
                    .iter()
                    .map(|(alt, mass)| (Alternative::new(*alt), mass.clone()))
                    .collect();
                let dominator = Lottery::from_pairs(profile.universe(), &pairs)?;
                let (strict_agent, verification) =
                    verify_sd_domination(&profile, &dominator, &lottery)
                        .map_err(|e| reject(e.to_string()))?;
                Ok((
                    ViolatedProperty::SdEfficiency,
                    ViolationWitness::SdDomination {
                        profile,
                        lottery,
                        dominator,
                        strict_agent,
                    },
                    verification,
                ))
            }
            Attribution::LpDominator => {
                let profile = self.world_profile(name)?;
                let lottery = self.world_lotteries[name].clone();
                let verdict = check_sd_efficiency(&profile, &lottery)?;
                let EfficiencyVerdict::Inefficient(InefficiencyWitness::SdDominated {
                    dominator,
                    strict_agent,
                    transcript,
                }) = verdict
                else {
                    return Err(reject(
                        "lp checker found no dominator for a lottery the chain rejects".to_string(),
                    ));
                };
                Ok((
                    ViolatedProperty::SdEfficiency,
                    ViolationWitness::SdDomination {
                        profile,
                        lottery,
                        dominator,
                        strict_agent,
                    },
                    transcript,
                ))
            }
            Attribution::Pareto {
                dominated,
                dominator,
            } => {
                let profile = self.world_profile(name)?;
                let lottery = self.world_lotteries[name].clone();
                let dominator = Alternative::new(*dominator);
                let dominated = dominated
                    .iter()
                    .map(|alt| Alternative::new(*alt))
                    .find(|alt| lottery.mass_of(alt).unwrap().is_positive())
                    .ok_or_else(|| reject("no dominated alternative carries mass".to_string()))?;
                if !profile.pareto_dominates(&dominator, &dominated)? {
                    return Err(reject(format!(
                        "{dominator} does not Pareto-dominate {dominated}"
                    )));
                }
                let strict = profile
                    .entries()
                    .iter()
                    .find(|(_, rel)| rel.strictly_prefers(&dominator, &dominated).unwrap())
                    .map(|(agent, _)| *agent)
                    .expect("Pareto dominance has a strict agent");
                let mass = lottery.mass_of(&dominated)?.clone();
                let verification = vec![
                    format!(
                        "every agent weakly prefers {dominator} to {dominated}, agent {strict} strictly"
                    ),
                    format!("yet {dominated} receives probability {mass}"),
                    "sd-efficiency implies ex post efficiency; the finer violation is reported"
                        .to_string(),
                ];
                Ok((
                    ViolatedProperty::ExPostEfficiency,
                    ViolationWitness::ParetoMass {
                        profile,
                        lottery,
                        dominated,
                        dominator,
                        mass,
                    },
                    verification,
                ))
            }
            Attribution::Manipulation {
                agent,
                true_profile,
                misreport_profile,
            } => {
                let agent = AgentId::new(*agent);
                let truthful_profile = self.world_profile(true_profile)?;
                let deviated_profile = self.world_profile(misreport_profile)?;
                let misreport = deviated_profile
                    .relation(agent)
                    .ok_or_else(|| reject(format!("agent {agent} missing")))?
                    .clone();
                if truthful_profile.with_relation(agent, misreport.clone())? != deviated_profile {
                    return Err(reject(format!(
                        "{true_profile} and {misreport_profile} do not differ exactly at agent {agent}"
                    )));
                }
                let witness = ManipulationWitness {
                    agent,
                    true_profile: truthful_profile,
                    misreport,
                    truthful_lottery: self.world_lotteries[true_profile].clone(),
                    deviation_lottery: self.world_lotteries[misreport_profile].clone(),
                    kind: ManipulationKind::SdManipulation,
                };
                let mut verification = witness.verify().map_err(|e| reject(e.to_string()))?;
                verification.insert(
                    0,
                    format!(
                        "profiles {true_profile} and {misreport_profile} differ exactly at agent {agent}"
                    ),
                );
                Ok((
                    ViolatedProperty::SdStrategyproofness,
                    ViolationWitness::Manipulation(witness),
                    verification,
                ))
            }
            Attribution::RdExtension => {
                // Checked at the induced four-by-four level: lifted chain
                // profiles contain fully indifferent agents, so random
                // dictatorship itself is only defined on the base fixture.
                let fixture = proof_profile(name).expect("step profiles exist");
                let expected = rd(&fixture.profile).map_err(|e| reject(e.to_string()))?;
                let actual = self.chain[name].clone();
                if expected == actual {
                    return Err(reject("rd value matches after all".to_string()));
                }
                let verification = vec![
                    format!("every agent has a unique top in {name}"),
                    format!("random dictatorship returns {expected}"),
                    format!("the evaluated lottery is {actual}"),
                ];
                Ok((
                    ViolatedProperty::RdExtension,
                    ViolationWitness::RdMismatch {
                        profile: fixture.profile.clone(),
                        expected,
                        actual,
                    },
                    verification,
                ))
            }
        }
    }
}

/// Embeds a profile into a larger agent set and alternative universe: the
/// original agents keep their relations on the base alternatives and rank
/// every new alternative below everything, the new alternatives appearing
/// as singleton classes in universe order; added agents are indifferent
/// between all alternatives.
pub fn lift_profile(
    base: &Profile,
    num_agents: u32,
    universe: &Universe,
) -> Result<Profile, PreferenceError> {
    if !base.universe().is_subset_of(universe) {
        return Err(PreferenceError::NotASuperset);
    }
    if (num_agents as usize) < base.len() {
        return Err(PreferenceError::TooFewAgents {
            requested: num_agents,
            base: base.len() as u32,
        });
    }
    let extras: Vec<Alternative> = universe
        .alternatives()
        .iter()
        .filter(|alt| !base.universe().contains(alt))
        .cloned()
        .collect();

    let mut entries = Vec::new();
    for (agent, relation) in base.entries() {
        let mut classes: Vec<Vec<Alternative>> = relation
            .classes()
            .into_iter()
            .map(|class| class.into_iter().cloned().collect())
            .collect();
        for extra in &extras {
            classes.push(vec![extra.clone()]);
        }
        entries.push((*agent, PreferenceRelation::new(universe.clone(), classes)?));
    }
    let mut next_id = base.agents().map(AgentId::get).max().unwrap_or(0);
    let indifferent =
        PreferenceRelation::new(universe.clone(), vec![universe.alternatives().to_vec()])?;
    for _ in base.len()..num_agents as usize {
        next_id += 1;
        entries.push((AgentId::new(next_id), indifferent.clone()));
    }
    Profile::with_universe(universe.clone(), entries)
}

/// Whether a scheme agrees with random dictatorship on a profile in random
/// dictatorship's domain (every agent has a unique top choice). Errors on
/// profiles outside that domain.
#[derive(Clone, PartialEq, Debug)]
pub struct RdExtensionVerdict {
    pub holds: bool,
    pub expected: Lottery,
    pub actual: Lottery,
}

pub fn check_rd_extension(
    scheme: &dyn SocialDecisionScheme,
    profile: &Profile,
) -> Result<RdExtensionVerdict, AnalysisError> {
    let expected = rd(profile)?;
    let actual = scheme.evaluate(profile)?;
    Ok(RdExtensionVerdict {
        holds: expected == actual,
        expected,
        actual,
    })
}
