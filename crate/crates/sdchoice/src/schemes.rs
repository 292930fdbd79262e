//! Social decision schemes: mappings from preference profiles to lotteries.
//!
//! The trait keeps schemes opaque so the analysis and replay machinery can
//! probe built-in rules, user implementations and tabulated mocks uniformly.
//! A scheme must be deterministic: the same profile always yields the same
//! lottery.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use num::Zero;
use thiserror::Error;

use crate::lotteries::{Lottery, LotteryError, Rational};
use crate::preferences::{
    AgentId, ParseError, PreferenceError, PreferenceRelation, Profile, Universe,
};

#[derive(Debug, Error)]
pub enum SchemeError {
    /// Random dictatorship is undefined when some agent's top class is not
    /// a singleton; the error names the first such agent.
    #[error("random dictatorship is undefined: agent {0} has no unique top choice")]
    AgentWithoutUniqueTop(AgentId),
    #[error("no lottery exists over an empty alternative set")]
    EmptyDomain,
    #[error("scheme `{scheme}` is undefined on the supplied profile")]
    UndefinedProfile { scheme: String },
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Lottery(#[from] LotteryError),
    #[error("table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("profile file: {0}")]
    ProfileParse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A social decision scheme: a deterministic mapping from profiles to
/// lotteries over the profile's universe.
pub trait SocialDecisionScheme {
    fn name(&self) -> &str;
    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError>;
}

/// Random dictatorship: pick an agent uniformly at random and return that
/// agent's unique top choice. Only defined when every agent has one; on any
/// other profile evaluation fails rather than falling back to a tie-break.
pub struct RandomDictatorship;

impl SocialDecisionScheme for RandomDictatorship {
    fn name(&self) -> &str {
        "rd"
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        rd(profile)
    }
}

pub fn rd(profile: &Profile) -> Result<Lottery, SchemeError> {
    if profile.is_empty() {
        return Err(SchemeError::EmptyDomain);
    }
    let universe = profile.universe();
    let mut counts = vec![0i64; universe.len()];
    for (agent, relation) in profile.entries() {
        let top = relation
            .unique_top()
            .ok_or(SchemeError::AgentWithoutUniqueTop(*agent))?;
        counts[universe.index_of(top).expect("top is in the universe")] += 1;
    }
    let n = profile.len() as i64;
    let mass = counts
        .into_iter()
        .map(|c| Rational::new(c.into(), n.into()))
        .collect();
    Ok(Lottery::new(universe.clone(), mass)?)
}

/// Random serial dictatorship: draw an agent order uniformly at random and
/// let each agent in turn restrict the feasible set to their most preferred
/// remaining alternatives; randomize uniformly over the survivors.
pub struct RandomSerialDictatorship;

impl SocialDecisionScheme for RandomSerialDictatorship {
    fn name(&self) -> &str {
        "rsd"
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        rsd(profile)
    }
}

pub fn rsd(profile: &Profile) -> Result<Lottery, SchemeError> {
    let relations: Vec<PreferenceRelation> = profile
        .entries()
        .iter()
        .map(|(_, rel)| rel.clone())
        .collect();
    let feasible: BTreeSet<_> = profile.universe().alternatives().iter().cloned().collect();
    rsd_restricted(profile.universe(), &relations, &feasible)
}

/// The restricted evaluation underlying `rsd`: with no relations left the
/// result is uniform over the feasible set; otherwise it averages, over the
/// uniformly chosen next dictator, the evaluation on the remaining relations
/// with the feasible set narrowed to that dictator's best members.
///
/// Identical relations are merged with multiplicities and intermediate
/// results memoized on (remaining multiset, feasible set); the outcome
/// equals the plain positional recursion's.
pub fn rsd_restricted(
    universe: &Universe,
    remaining: &[PreferenceRelation],
    feasible: &BTreeSet<crate::preferences::Alternative>,
) -> Result<Lottery, SchemeError> {
    if feasible.is_empty() {
        return Err(SchemeError::EmptyDomain);
    }
    for relation in remaining {
        if relation.universe() != universe {
            return Err(SchemeError::Preference(PreferenceError::UniverseMismatch));
        }
    }
    let mut mask = 0u64;
    for alt in feasible {
        let idx = universe
            .index_of(alt)
            .ok_or_else(|| PreferenceError::UnknownAlternative(alt.clone()))?;
        mask |= 1 << idx;
    }

    // Intern distinct relations so memo keys are small. Desk scale keeps
    // the linear scans cheap.
    let mut distinct: Vec<&PreferenceRelation> = Vec::new();
    let mut ids: Vec<usize> = Vec::with_capacity(remaining.len());
    for relation in remaining {
        let id = match distinct.iter().position(|r| *r == relation) {
            Some(id) => id,
            None => {
                distinct.push(relation);
                distinct.len() - 1
            }
        };
        ids.push(id);
    }
    ids.sort_unstable();

    let mut memo: HashMap<(Vec<usize>, u64), Vec<Rational>> = HashMap::new();
    let mass = rsd_recurse(universe, &distinct, &ids, mask, &mut memo);
    Ok(Lottery::new(universe.clone(), mass)?)
}

fn rsd_recurse(
    universe: &Universe,
    distinct: &[&PreferenceRelation],
    remaining: &[usize],
    feasible: u64,
    memo: &mut HashMap<(Vec<usize>, u64), Vec<Rational>>,
) -> Vec<Rational> {
    let key = (remaining.to_vec(), feasible);
    if let Some(mass) = memo.get(&key) {
        return mass.clone();
    }
    let mass = if remaining.is_empty() {
        let count = feasible.count_ones() as i64;
        (0..universe.len())
            .map(|i| {
                if feasible & (1 << i) != 0 {
                    Rational::new(1.into(), count.into())
                } else {
                    Rational::zero()
                }
            })
            .collect()
    } else {
        let total = remaining.len() as i64;
        let mut acc = vec![Rational::zero(); universe.len()];
        let mut i = 0;
        while i < remaining.len() {
            let id = remaining[i];
            let mut multiplicity = 1usize;
            while i + multiplicity < remaining.len() && remaining[i + multiplicity] == id {
                multiplicity += 1;
            }
            let mut rest = remaining.to_vec();
            rest.remove(i);
            let narrowed = max_set_mask(distinct[id], feasible);
            let child = rsd_recurse(universe, distinct, &rest, narrowed, memo);
            let weight = Rational::new((multiplicity as i64).into(), total.into());
            for (cell, value) in acc.iter_mut().zip(child) {
                *cell += &weight * value;
            }
            i += multiplicity;
        }
        acc
    };
    memo.insert(key, mass.clone());
    mass
}

fn max_set_mask(relation: &PreferenceRelation, feasible: u64) -> u64 {
    for class in relation.class_indices() {
        let mut hit = 0u64;
        for &idx in class {
            if feasible & (1 << idx) != 0 {
                hit |= 1 << idx;
            }
        }
        if hit != 0 {
            return hit;
        }
    }
    debug_assert!(false, "feasible set must meet some class");
    feasible
}

/// The constant scheme returning the uniform lottery over the universe.
/// Anonymous and neutral, but wildly inefficient; useful as a probe.
pub struct UniformScheme;

impl SocialDecisionScheme for UniformScheme {
    fn name(&self) -> &str {
        "uniform"
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        let all: BTreeSet<_> = profile.universe().alternatives().iter().cloned().collect();
        if all.is_empty() {
            return Err(SchemeError::EmptyDomain);
        }
        Ok(Lottery::uniform(profile.universe(), &all)?)
    }
}

/// Serial dictatorship with the fixed agent order 1, 2, 3, ...: every agent
/// narrows the feasible set in id order. Deterministic and strategyproof
/// but not anonymous; useful as a counterexample scheme.
pub struct SerialDictatorship;

impl SocialDecisionScheme for SerialDictatorship {
    fn name(&self) -> &str {
        "serial"
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        let mut feasible: BTreeSet<_> = profile.universe().alternatives().iter().cloned().collect();
        if feasible.is_empty() {
            return Err(SchemeError::EmptyDomain);
        }
        for (_, relation) in profile.entries() {
            feasible = relation.max_set(&feasible)?;
        }
        Ok(Lottery::uniform(profile.universe(), &feasible)?)
    }
}

/// A scheme defined by a closure; handy for mocks and one-off candidates.
pub struct FnScheme<F> {
    name: String,
    eval: F,
}

impl<F> FnScheme<F>
where
    F: Fn(&Profile) -> Result<Lottery, SchemeError>,
{
    pub fn new(name: impl Into<String>, eval: F) -> Self {
        FnScheme {
            name: name.into(),
            eval,
        }
    }
}

impl<F> SocialDecisionScheme for FnScheme<F>
where
    F: Fn(&Profile) -> Result<Lottery, SchemeError>,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        (self.eval)(profile)
    }
}

/// A scheme tabulated as an explicit profile-to-lottery map. Evaluation on
/// a profile outside the table is an error, which the replay engine reports
/// with step context.
pub struct TabulatedScheme {
    name: String,
    table: BTreeMap<Profile, Lottery>,
}

impl TabulatedScheme {
    pub fn new(
        name: impl Into<String>,
        entries: Vec<(Profile, Lottery)>,
    ) -> Result<Self, SchemeError> {
        let mut table = BTreeMap::new();
        for (profile, lottery) in entries {
            if profile.universe() != lottery.universe() {
                return Err(SchemeError::Lottery(LotteryError::UniverseMismatch));
            }
            table.insert(profile, lottery);
        }
        Ok(TabulatedScheme {
            name: name.into(),
            table,
        })
    }

    /// Loads a table file: one `<profile path>: <lottery>` entry per line,
    /// `#` comments and blank lines ignored. Profile paths are resolved
    /// relative to the table file's directory.
    pub fn from_file(path: &Path) -> Result<Self, SchemeError> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut entries = Vec::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (profile_path, lottery_text) = line.rsplit_once(':').ok_or(SchemeError::Table {
                line: line_no + 1,
                message: "expected `<profile path>: <lottery>`".to_string(),
            })?;
            let profile_path = base.join(profile_path.trim());
            let profile_text = std::fs::read_to_string(&profile_path)?;
            let profile = Profile::parse(&profile_text, None)?;
            let lottery = Lottery::parse(lottery_text, profile.universe()).map_err(|e| {
                SchemeError::Table {
                    line: line_no + 1,
                    message: e.to_string(),
                }
            })?;
            entries.push((profile, lottery));
        }
        let name = format!("table:{}", path.display());
        TabulatedScheme::new(name, entries)
    }
}

impl SocialDecisionScheme for TabulatedScheme {
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, profile: &Profile) -> Result<Lottery, SchemeError> {
        self.table
            .get(profile)
            .cloned()
            .ok_or_else(|| SchemeError::UndefinedProfile {
                scheme: self.name.clone(),
            })
    }
}

impl fmt::Debug for TabulatedScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TabulatedScheme({}, {} entries)",
            self.name,
            self.table.len()
        )
    }
}

/// Looks up a built-in scheme by registry name: `rd`, `rsd`, `uniform` or
/// `serial`.
pub fn scheme_by_name(name: &str) -> Option<Box<dyn SocialDecisionScheme>> {
    match name {
        "rd" => Some(Box::new(RandomDictatorship)),
        "rsd" => Some(Box::new(RandomSerialDictatorship)),
        "uniform" => Some(Box::new(UniformScheme)),
        "serial" => Some(Box::new(SerialDictatorship)),
        _ => None,
    }
}

/// Registry names of the built-in schemes.
pub fn builtin_scheme_names() -> &'static [&'static str] {
    &["rd", "rsd", "uniform", "serial"]
}
