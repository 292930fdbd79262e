//! Efficiency and strategyproofness verdicts with machine-checkable
//! witnesses.
//!
//! Every negative verdict carries a witness that re-verifies through the
//! primitive operations: a Pareto-dominated alternative with positive
//! probability, a dominating lottery together with a strictly better-off
//! agent, or a profitable misreport. Checkers construct the witness and
//! confirm it before returning.

use std::collections::BTreeSet;
use std::fmt;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::exactlp::{solve, Cmp, LinearProgram, LpError, LpOutcome};
use crate::lotteries::{sd_compare, Lottery, LotteryError, Rational, SdVerdict};
use crate::preferences::{
    enumerate_weak_orders, AgentId, AgentPermutation, Alternative, AlternativePermutation,
    PreferenceError, PreferenceRelation, Profile,
};
use crate::schemes::{SchemeError, SocialDecisionScheme};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("checker invariant violated: {0}")]
    Internal(String),
}

/// Why a lottery fails an efficiency notion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum InefficiencyWitness {
    /// `dominated` receives positive probability although `dominator`
    /// Pareto-dominates it.
    ParetoDominatedMass {
        dominated: Alternative,
        dominator: Alternative,
        mass: Rational,
    },
    /// `dominator` is weakly SD-preferred by every agent and strictly by
    /// `strict_agent`.
    SdDominated {
        dominator: Lottery,
        strict_agent: AgentId,
        transcript: Vec<String>,
    },
}

/// Outcome of an efficiency check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EfficiencyVerdict {
    Efficient,
    Inefficient(InefficiencyWitness),
}

impl EfficiencyVerdict {
    pub fn is_efficient(&self) -> bool {
        matches!(self, EfficiencyVerdict::Efficient)
    }

    pub fn witness(&self) -> Option<&InefficiencyWitness> {
        match self {
            EfficiencyVerdict::Efficient => None,
            EfficiencyVerdict::Inefficient(witness) => Some(witness),
        }
    }
}

impl fmt::Display for EfficiencyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EfficiencyVerdict::Efficient => f.write_str("efficient"),
            EfficiencyVerdict::Inefficient(InefficiencyWitness::ParetoDominatedMass {
                dominated,
                dominator,
                mass,
            }) => write!(
                f,
                "inefficient: {dominated} has probability {mass} but is Pareto-dominated by {dominator}"
            ),
            EfficiencyVerdict::Inefficient(InefficiencyWitness::SdDominated {
                dominator,
                strict_agent,
                ..
            }) => write!(
                f,
                "inefficient: {dominator} is weakly sd-preferred by every agent and strictly by agent {strict_agent}"
            ),
        }
    }
}

/// Ex post efficiency: the lottery must put zero probability on every
/// Pareto-dominated alternative. The witness names the first dominated
/// alternative with positive probability, in universe order, and its first
/// dominator.
pub fn check_ex_post(
    profile: &Profile,
    lottery: &Lottery,
) -> Result<EfficiencyVerdict, AnalysisError> {
    if profile.universe() != lottery.universe() {
        return Err(AnalysisError::Lottery(LotteryError::UniverseMismatch));
    }
    for dominated in profile.universe().alternatives() {
        let mass = lottery.mass_of(dominated)?;
        if !mass.is_positive() {
            continue;
        }
        for dominator in profile.universe().alternatives() {
            if profile.pareto_dominates(dominator, dominated)? {
                return Ok(EfficiencyVerdict::Inefficient(
                    InefficiencyWitness::ParetoDominatedMass {
                        dominated: dominated.clone(),
                        dominator: dominator.clone(),
                        mass: mass.clone(),
                    },
                ));
            }
        }
    }
    Ok(EfficiencyVerdict::Efficient)
}

/// SD-efficiency via an exact linear program.
///
/// Variables are a candidate lottery `q` plus one slack per agent per
/// indifference-class boundary (upper contour masses are constant on
/// classes, so boundaries suffice). Constraints pin `q` to a lottery whose
/// upper contour mass matches `lottery`'s plus the slack at each boundary;
/// the objective maximizes total slack. The lottery is SD-efficient exactly
/// when the optimum is zero. A positive optimum yields a dominating `q`
/// that is itself SD-efficient, since it maximizes the summed contour gains.
pub fn check_sd_efficiency(
    profile: &Profile,
    lottery: &Lottery,
) -> Result<EfficiencyVerdict, AnalysisError> {
    if profile.universe() != lottery.universe() {
        return Err(AnalysisError::Lottery(LotteryError::UniverseMismatch));
    }
    let universe = profile.universe();
    let m = universe.len();

    let mut variables: Vec<String> = universe
        .alternatives()
        .iter()
        .map(|alt| format!("q_{alt}"))
        .collect();
    let mut slack_owner: Vec<AgentId> = Vec::new();
    for (agent, relation) in profile.entries() {
        for boundary in 0..relation.class_count().saturating_sub(1) {
            variables.push(format!("s_{agent}_{boundary}"));
            slack_owner.push(*agent);
        }
    }
    let total = variables.len();
    let mut objective = vec![Rational::zero(); total];
    for coefficient in objective.iter_mut().skip(m) {
        *coefficient = Rational::one();
    }
    let mut lp = LinearProgram::new(variables, objective);

    for j in 0..total {
        let mut coeffs = vec![Rational::zero(); total];
        coeffs[j] = Rational::one();
        lp.push(coeffs, Cmp::Ge, Rational::zero());
    }
    let mut coeffs = vec![Rational::zero(); total];
    for cell in coeffs.iter_mut().take(m) {
        *cell = Rational::one();
    }
    lp.push(coeffs, Cmp::Eq, Rational::one());

    let mut slack = m;
    for (_, relation) in profile.entries() {
        let classes = relation.class_indices();
        let mut coeffs = vec![Rational::zero(); total];
        let mut contour = Rational::zero();
        for class in &classes[..classes.len().saturating_sub(1)] {
            for &idx in class {
                coeffs[idx] = Rational::one();
                contour += lottery.mass_by_index(idx);
            }
            let mut row = coeffs.clone();
            row[slack] = -Rational::one();
            lp.push(row, Cmp::Eq, contour.clone());
            slack += 1;
        }
    }

    let outcome = solve(&lp)?;
    let LpOutcome::Optimal { value, point } = outcome else {
        return Err(AnalysisError::Internal(format!(
            "sd-efficiency program must be solvable, got {outcome:?}"
        )));
    };
    if value.is_zero() {
        return Ok(EfficiencyVerdict::Efficient);
    }

    let dominator = Lottery::new(universe.clone(), point[..m].to_vec())?;
    let (strict_agent, transcript) = verify_sd_domination(profile, &dominator, lottery)?;
    Ok(EfficiencyVerdict::Inefficient(
        InefficiencyWitness::SdDominated {
            dominator,
            strict_agent,
            transcript,
        },
    ))
}

/// Confirms that `dominator` weakly SD-dominates `lottery` for every agent
/// with strict dominance for at least one; returns the first strict agent
/// and a per-agent transcript.
pub fn verify_sd_domination(
    profile: &Profile,
    dominator: &Lottery,
    lottery: &Lottery,
) -> Result<(AgentId, Vec<String>), AnalysisError> {
    let mut strict_agent = None;
    let mut transcript = Vec::new();
    for (agent, relation) in profile.entries() {
        let verdict = sd_compare(relation, dominator, lottery)?;
        transcript.push(format!(
            "agent {agent} ({relation}): candidate {verdict} the evaluated lottery"
        ));
        match verdict {
            SdVerdict::StrictlyDominates => {
                strict_agent = strict_agent.or(Some(*agent));
            }
            SdVerdict::Equivalent => {}
            other => {
                return Err(AnalysisError::Internal(format!(
                    "claimed dominator fails for agent {agent}: {other:?}"
                )))
            }
        }
    }
    let strict_agent = strict_agent.ok_or_else(|| {
        AnalysisError::Internal("claimed dominator is not strict for any agent".to_string())
    })?;
    Ok((strict_agent, transcript))
}

/// Brute-force SD-efficiency oracle: searches every lottery with common
/// denominator at most `max_denominator` for a dominator. Sound but only
/// complete relative to the denominator bound; the LP checker is the
/// decision procedure.
pub fn brute_force_sd_efficiency(
    profile: &Profile,
    lottery: &Lottery,
    max_denominator: u32,
) -> Result<EfficiencyVerdict, AnalysisError> {
    if profile.universe() != lottery.universe() {
        return Err(AnalysisError::Lottery(LotteryError::UniverseMismatch));
    }
    for candidate in Lottery::enumerate_with_denominator(profile.universe(), max_denominator) {
        if candidate == *lottery {
            continue;
        }
        let mut strict_agent = None;
        let mut dominates_all = true;
        let mut transcript = Vec::new();
        for (agent, relation) in profile.entries() {
            let verdict = sd_compare(relation, &candidate, lottery)?;
            match verdict {
                SdVerdict::StrictlyDominates => {
                    strict_agent = strict_agent.or(Some(*agent));
                    transcript.push(format!("agent {agent}: strictly better"));
                }
                SdVerdict::Equivalent => transcript.push(format!("agent {agent}: equivalent")),
                _ => {
                    dominates_all = false;
                    break;
                }
            }
        }
        if dominates_all {
            if let Some(strict_agent) = strict_agent {
                return Ok(EfficiencyVerdict::Inefficient(
                    InefficiencyWitness::SdDominated {
                        dominator: candidate,
                        strict_agent,
                        transcript,
                    },
                ));
            }
        }
    }
    Ok(EfficiencyVerdict::Efficient)
}

/// The flavor of strategyproofness a witness violates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ManipulationKind {
    /// The deviation outcome strictly SD-dominates the truthful outcome
    /// under the agent's true relation.
    SdManipulation,
    /// The truthful outcome fails to weakly SD-dominate the deviation
    /// outcome (an incomparable deviation already counts).
    StrongSdViolation,
}

impl fmt::Display for ManipulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ManipulationKind::SdManipulation => "sd-manipulation",
            ManipulationKind::StrongSdViolation => "strong-sd violation",
        })
    }
}

/// A profitable (or strong-SP-violating) unilateral misreport, together
/// with everything needed to re-verify it.
#[derive(Clone, PartialEq, Debug)]
pub struct ManipulationWitness {
    pub agent: AgentId,
    pub true_profile: Profile,
    pub misreport: PreferenceRelation,
    pub truthful_lottery: Lottery,
    pub deviation_lottery: Lottery,
    pub kind: ManipulationKind,
}

impl ManipulationWitness {
    /// The deviated profile: the true profile with the agent's relation
    /// replaced by the misreport. Differs from the true profile in exactly
    /// that one entry.
    pub fn deviated_profile(&self) -> Result<Profile, PreferenceError> {
        self.true_profile
            .with_relation(self.agent, self.misreport.clone())
    }

    /// Re-verifies the witness from its parts: the claimed verdict must
    /// reproduce under the agent's true relation.
    pub fn verify(&self) -> Result<Vec<String>, AnalysisError> {
        let relation = self
            .true_profile
            .relation(self.agent)
            .ok_or(PreferenceError::UnknownAgent(self.agent))?;
        if *relation == self.misreport {
            return Err(AnalysisError::Internal(
                "misreport equals the true relation".to_string(),
            ));
        }
        let verdict = sd_compare(relation, &self.deviation_lottery, &self.truthful_lottery)?;
        let ok = match self.kind {
            ManipulationKind::SdManipulation => verdict == SdVerdict::StrictlyDominates,
            ManipulationKind::StrongSdViolation => !verdict.flipped().weakly_dominates(),
        };
        if !ok {
            return Err(AnalysisError::Internal(format!(
                "witness does not verify: deviation {verdict} truthful under the true relation"
            )));
        }
        Ok(vec![
            format!(
                "agent {} true relation: {relation}; misreport: {}",
                self.agent, self.misreport
            ),
            format!("truthful outcome: {}", self.truthful_lottery),
            format!("deviation outcome: {}", self.deviation_lottery),
            format!(
                "deviation {verdict} truthful outcome under the true relation ({})",
                self.kind
            ),
        ])
    }
}

impl fmt::Display for ManipulationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agent {} gains by reporting `{}`: {} over {} ({})",
            self.agent, self.misreport, self.deviation_lottery, self.truthful_lottery, self.kind
        )
    }
}

fn candidate_misreports(
    profile: &Profile,
    misreports: Option<&[PreferenceRelation]>,
) -> Vec<PreferenceRelation> {
    match misreports {
        Some(list) => list.to_vec(),
        None => enumerate_weak_orders(profile.universe()),
    }
}

fn candidate_agents(profile: &Profile, agents: Option<&[AgentId]>) -> Vec<AgentId> {
    match agents {
        Some(list) => list.to_vec(),
        None => profile.agents().collect(),
    }
}

/// Searches agents and misreports, in canonical enumeration order, for a
/// deviation whose outcome strictly SD-dominates the truthful outcome under
/// the deviating agent's true relation. Returns the first witness found, so
/// results are reproducible.
pub fn find_sd_manipulation(
    scheme: &dyn SocialDecisionScheme,
    profile: &Profile,
    agents: Option<&[AgentId]>,
    misreports: Option<&[PreferenceRelation]>,
) -> Result<Option<ManipulationWitness>, AnalysisError> {
    search_manipulation(scheme, profile, agents, misreports, false)
}

/// Strong SD-strategyproofness check: the truthful outcome must weakly
/// SD-dominate every unilateral deviation outcome. A deviation that is
/// merely incomparable already yields a witness.
pub fn check_strong_sd_sp(
    scheme: &dyn SocialDecisionScheme,
    profile: &Profile,
    agents: Option<&[AgentId]>,
    misreports: Option<&[PreferenceRelation]>,
) -> Result<Option<ManipulationWitness>, AnalysisError> {
    search_manipulation(scheme, profile, agents, misreports, true)
}

fn search_manipulation(
    scheme: &dyn SocialDecisionScheme,
    profile: &Profile,
    agents: Option<&[AgentId]>,
    misreports: Option<&[PreferenceRelation]>,
    strong: bool,
) -> Result<Option<ManipulationWitness>, AnalysisError> {
    let truthful = scheme.evaluate(profile)?;
    let misreports = candidate_misreports(profile, misreports);
    for agent in candidate_agents(profile, agents) {
        let relation = profile
            .relation(agent)
            .ok_or(PreferenceError::UnknownAgent(agent))?
            .clone();
        for misreport in &misreports {
            if *misreport == relation {
                continue;
            }
            let deviated = profile.with_relation(agent, misreport.clone())?;
            let deviation = scheme.evaluate(&deviated)?;
            let verdict = sd_compare(&relation, &deviation, &truthful)?;
            let kind = match verdict {
                SdVerdict::StrictlyDominates => Some(ManipulationKind::SdManipulation),
                SdVerdict::Incomparable if strong => Some(ManipulationKind::StrongSdViolation),
                _ => None,
            };
            if let Some(kind) = kind {
                let witness = ManipulationWitness {
                    agent,
                    true_profile: profile.clone(),
                    misreport: misreport.clone(),
                    truthful_lottery: truthful,
                    deviation_lottery: deviation,
                    kind,
                };
                witness.verify()?;
                return Ok(Some(witness));
            }
        }
    }
    Ok(None)
}

/// A counterexample to combined anonymity and neutrality.
#[derive(Clone, PartialEq, Debug)]
pub struct SymmetryWitness {
    pub pi: AgentPermutation,
    pub sigma: AlternativePermutation,
    pub original: Profile,
    pub transformed: Profile,
    pub original_lottery: Lottery,
    pub transformed_lottery: Lottery,
    /// Alternative at which `f(transformed)(sigma(x)) != f(original)(x)`.
    pub alternative: Alternative,
}

/// Outcome of the combined anonymity and neutrality check.
#[derive(Clone, PartialEq, Debug)]
pub struct SymmetryVerdict {
    pub holds: bool,
    pub witness: Option<SymmetryWitness>,
}

/// Checks `f(permute_agents(R, pi)^sigma)(sigma(x)) = f(R)(x)` for all `x`.
/// Any anonymous and neutral scheme satisfies this for every `(pi, sigma)`;
/// when the pair maps the profile to itself the check specializes to the
/// self-symmetry constraint `f(R)(x) = f(R)(sigma(x))`.
pub fn check_anonymity_neutrality(
    scheme: &dyn SocialDecisionScheme,
    profile: &Profile,
    pi: &AgentPermutation,
    sigma: &AlternativePermutation,
) -> Result<SymmetryVerdict, AnalysisError> {
    let transformed = profile.permute_agents(pi)?.permute_alternatives(sigma)?;
    let original_lottery = scheme.evaluate(profile)?;
    let transformed_lottery = scheme.evaluate(&transformed)?;
    for alt in profile.universe().alternatives() {
        let image = sigma.apply(alt);
        if transformed_lottery.mass_of(&image)? != original_lottery.mass_of(alt)? {
            return Ok(SymmetryVerdict {
                holds: false,
                witness: Some(SymmetryWitness {
                    pi: pi.clone(),
                    sigma: sigma.clone(),
                    original: profile.clone(),
                    transformed,
                    original_lottery,
                    transformed_lottery,
                    alternative: alt.clone(),
                }),
            });
        }
    }
    Ok(SymmetryVerdict {
        holds: true,
        witness: None,
    })
}

/// All profiles over `universe` with agents `1..=n`, in canonical order.
/// The count is the Fubini number of the universe size raised to `n`.
pub fn all_profiles(universe: &crate::preferences::Universe, n: u32) -> Vec<Profile> {
    let orders = enumerate_weak_orders(universe);
    let mut result = Vec::new();
    let mut current: Vec<(AgentId, PreferenceRelation)> = Vec::new();
    fn recurse(
        orders: &[PreferenceRelation],
        universe: &crate::preferences::Universe,
        n: u32,
        agent: u32,
        current: &mut Vec<(AgentId, PreferenceRelation)>,
        result: &mut Vec<Profile>,
    ) {
        if agent > n {
            result.push(
                Profile::with_universe(universe.clone(), current.clone())
                    .expect("constructed entries are valid"),
            );
            return;
        }
        for order in orders {
            current.push((AgentId::new(agent), order.clone()));
            recurse(orders, universe, n, agent + 1, current, result);
            current.pop();
        }
    }
    recurse(&orders, universe, n, 1, &mut current, &mut result);
    result
}

/// The alternatives that are the unique top of at least one agent.
pub fn uniquely_top_ranked(profile: &Profile) -> BTreeSet<Alternative> {
    profile
        .entries()
        .iter()
        .filter_map(|(_, relation)| relation.unique_top().cloned())
        .collect()
}
