//! Weak preference relations over a finite alternative set, preference
//! profiles, permutation group actions, Pareto dominance, and exhaustive
//! weak-order enumeration.
//!
//! A weak order is stored as an ordered partition of the universe into
//! indifference classes, best class first. Completeness and transitivity
//! hold by construction, so the only invariants to police are that the
//! classes are nonempty, pairwise disjoint, and cover the universe.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A candidate outcome, identified by a short symbolic token such as `a`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Alternative(String);

impl Alternative {
    pub fn new(id: impl Into<String>) -> Self {
        Alternative(id.into())
    }

    pub fn id(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Alternative {
    fn from(id: &str) -> Self {
        Alternative::new(id)
    }
}

/// Agent identifier. Agents are named by positive integers so that profile
/// restriction and permutations compose without reindexing ambiguity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AgentId(u32);

impl AgentId {
    pub fn new(id: u32) -> Self {
        AgentId(id)
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for AgentId {
    fn from(id: u32) -> Self {
        AgentId(id)
    }
}

/// The ordered set of alternatives shared by relations, profiles and
/// lotteries. The order is significant: it fixes canonical formatting and
/// the canonical enumeration order of weak orders.
///
/// Cloning is cheap; the alternative list is shared.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Universe(Arc<Vec<Alternative>>);

impl Universe {
    pub fn new(alternatives: Vec<Alternative>) -> Result<Self, PreferenceError> {
        let mut seen = BTreeSet::new();
        for alt in &alternatives {
            if alt.id().is_empty() {
                return Err(PreferenceError::EmptyToken);
            }
            if !seen.insert(alt.clone()) {
                return Err(PreferenceError::DuplicateAlternative(alt.clone()));
            }
        }
        Ok(Universe(Arc::new(alternatives)))
    }

    /// Builds a universe from a comma-separated token list such as `a,b,c,d`.
    pub fn parse(text: &str) -> Result<Self, PreferenceError> {
        let alternatives: Vec<Alternative> = text
            .split(',')
            .map(|token| Alternative::new(token.trim()))
            .filter(|alt| !alt.id().is_empty())
            .collect();
        if alternatives.is_empty() {
            return Err(PreferenceError::EmptyUniverse);
        }
        Universe::new(alternatives)
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, alt: &Alternative) -> bool {
        self.index_of(alt).is_some()
    }

    pub fn index_of(&self, alt: &Alternative) -> Option<usize> {
        self.0.iter().position(|a| a == alt)
    }

    pub fn alternative(&self, index: usize) -> &Alternative {
        &self.0[index]
    }

    /// True when `other` contains every alternative of `self`.
    pub fn is_subset_of(&self, other: &Universe) -> bool {
        self.0.iter().all(|a| other.contains(a))
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, alt) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{alt}")?;
        }
        Ok(())
    }
}

/// Errors from constructing or operating on relations and profiles.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreferenceError {
    #[error("alternative token must be nonempty")]
    EmptyToken,
    #[error("universe must contain at least one alternative")]
    EmptyUniverse,
    #[error("duplicate alternative `{0}`")]
    DuplicateAlternative(Alternative),
    #[error("alternative `{0}` is not in the universe")]
    UnknownAlternative(Alternative),
    #[error("selection must be a nonempty subset of the universe")]
    EmptySelection,
    #[error("relations are defined over different universes")]
    UniverseMismatch,
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("classes do not partition the universe")]
    NotAPartition,
    #[error("mapping is not a bijection: {0}")]
    NotBijective(String),
    #[error("unknown agent {0}")]
    UnknownAgent(AgentId),
    #[error("duplicate agent {0}")]
    DuplicateAgent(AgentId),
    #[error("agent ids must be positive")]
    NonPositiveAgent,
    #[error("profile is empty and no universe was supplied")]
    EmptyProfile,
    #[error("target universe does not contain the base universe")]
    NotASuperset,
    #[error("cannot lift to {requested} agents: the base profile already has {base}")]
    TooFewAgents { requested: u32, base: u32 },
}

/// Parse errors carry the byte offset of the offending token where one exists.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unknown alternative `{token}` at offset {offset}")]
    UnknownToken { token: String, offset: usize },
    #[error("duplicate alternative `{token}` at offset {offset}")]
    DuplicateToken { token: String, offset: usize },
    #[error("missing alternatives: {}", missing.join(", "))]
    MissingAlternatives { missing: Vec<String> },
    #[error("empty indifference class at offset {offset}")]
    EmptyClass { offset: usize },
    #[error("relation text is empty")]
    EmptyText,
    #[error("line {line}: expected `agent <id>: <relation>`, got `{content}`")]
    BadAgentLine { line: usize, content: String },
    #[error("line {line}: duplicate agent {id}")]
    DuplicateAgentLine { line: usize, id: AgentId },
    #[error("line {line}: {source}")]
    InRelation {
        line: usize,
        #[source]
        source: Box<ParseError>,
    },
    #[error(transparent)]
    Preference(#[from] PreferenceError),
}

/// A complete and transitive preference relation, stored as an ordered
/// partition into indifference classes with the best class first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PreferenceRelation {
    universe: Universe,
    /// Indices into the universe; each class sorted ascending.
    classes: Vec<Vec<usize>>,
}

impl PreferenceRelation {
    /// Builds a relation from indifference classes given as alternative sets,
    /// best class first. The classes must partition the universe.
    pub fn new(
        universe: Universe,
        classes: Vec<Vec<Alternative>>,
    ) -> Result<Self, PreferenceError> {
        let mut index_classes = Vec::with_capacity(classes.len());
        let mut seen = vec![false; universe.len()];
        let mut covered = 0usize;
        for (k, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(PreferenceError::EmptyClass(k));
            }
            let mut indices = Vec::with_capacity(class.len());
            for alt in class {
                let idx = universe
                    .index_of(alt)
                    .ok_or_else(|| PreferenceError::UnknownAlternative(alt.clone()))?;
                if seen[idx] {
                    return Err(PreferenceError::DuplicateAlternative(alt.clone()));
                }
                seen[idx] = true;
                covered += 1;
                indices.push(idx);
            }
            indices.sort_unstable();
            index_classes.push(indices);
        }
        if covered != universe.len() {
            return Err(PreferenceError::NotAPartition);
        }
        Ok(PreferenceRelation {
            universe,
            classes: index_classes,
        })
    }

    /// Parses the `>`/`~` grammar: classes separated by `>`, ties within a
    /// class separated by `~`, every universe member appearing exactly once.
    ///
    /// `"a~c > b~d"` over `{a,b,c,d}` yields the two classes `{a,c}` and
    /// `{b,d}`.
    pub fn parse(text: &str, universe: &Universe) -> Result<Self, ParseError> {
        if text.trim().is_empty() {
            return Err(ParseError::EmptyText);
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (class_offset, class_text) in split_with_offsets(text, '>') {
            let mut indices = Vec::new();
            if class_text.trim().is_empty() {
                return Err(ParseError::EmptyClass {
                    offset: class_offset,
                });
            }
            for (tie_offset, token_text) in split_with_offsets(class_text, '~') {
                let token = token_text.trim();
                let offset = class_offset + tie_offset + leading_ws(token_text);
                if token.is_empty() {
                    return Err(ParseError::EmptyClass {
                        offset: class_offset + tie_offset,
                    });
                }
                let alt = Alternative::new(token);
                let idx = universe.index_of(&alt).ok_or(ParseError::UnknownToken {
                    token: token.to_string(),
                    offset,
                })?;
                if seen.insert(idx, offset).is_some() {
                    return Err(ParseError::DuplicateToken {
                        token: token.to_string(),
                        offset,
                    });
                }
                indices.push(idx);
            }
            indices.sort_unstable();
            classes.push(indices);
        }
        if seen.len() != universe.len() {
            let missing = universe
                .alternatives()
                .iter()
                .enumerate()
                .filter(|(i, _)| !seen.contains_key(i))
                .map(|(_, a)| a.id().to_string())
                .collect();
            return Err(ParseError::MissingAlternatives { missing });
        }
        Ok(PreferenceRelation {
            universe: universe.clone(),
            classes,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// The indifference classes, best first, as alternative lists.
    pub fn classes(&self) -> Vec<Vec<&Alternative>> {
        self.classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|&i| self.universe.alternative(i))
                    .collect()
            })
            .collect()
    }

    pub(crate) fn class_indices(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Rank of an alternative: the index of its class, 0 being best.
    pub fn class_index(&self, alt: &Alternative) -> Result<usize, PreferenceError> {
        let idx = self
            .universe
            .index_of(alt)
            .ok_or_else(|| PreferenceError::UnknownAlternative(alt.clone()))?;
        Ok(self.class_index_of(idx))
    }

    pub(crate) fn class_index_of(&self, universe_index: usize) -> usize {
        self.classes
            .iter()
            .position(|class| class.contains(&universe_index))
            .expect("every universe index belongs to a class")
    }

    pub fn weakly_prefers(
        &self,
        x: &Alternative,
        y: &Alternative,
    ) -> Result<bool, PreferenceError> {
        Ok(self.class_index(x)? <= self.class_index(y)?)
    }

    pub fn strictly_prefers(
        &self,
        x: &Alternative,
        y: &Alternative,
    ) -> Result<bool, PreferenceError> {
        Ok(self.class_index(x)? < self.class_index(y)?)
    }

    pub fn indifferent(&self, x: &Alternative, y: &Alternative) -> Result<bool, PreferenceError> {
        Ok(self.class_index(x)? == self.class_index(y)?)
    }

    /// The most preferred members of `selection`: all `x` with `x ⪰ y` for
    /// every `y` in the selection. Always nonempty for a nonempty selection;
    /// equal to the intersection of the selection with its best class.
    pub fn max_set(
        &self,
        selection: &BTreeSet<Alternative>,
    ) -> Result<BTreeSet<Alternative>, PreferenceError> {
        if selection.is_empty() {
            return Err(PreferenceError::EmptySelection);
        }
        let mut best_rank = usize::MAX;
        let mut ranks = Vec::with_capacity(selection.len());
        for alt in selection {
            let rank = self.class_index(alt)?;
            best_rank = best_rank.min(rank);
            ranks.push((alt, rank));
        }
        Ok(ranks
            .into_iter()
            .filter(|&(_, rank)| rank == best_rank)
            .map(|(alt, _)| alt.clone())
            .collect())
    }

    /// The single best alternative, if the top class is a singleton.
    pub fn unique_top(&self) -> Option<&Alternative> {
        match self.classes.first() {
            Some(class) if class.len() == 1 => Some(self.universe.alternative(class[0])),
            _ => None,
        }
    }

    /// True when no two distinct alternatives are tied.
    pub fn is_strict(&self) -> bool {
        self.classes.iter().all(|class| class.len() == 1)
    }

    /// The image relation under a permutation of alternatives: the permuted
    /// relation ranks `sigma(x)` exactly as this relation ranks `x`.
    pub fn permute_alternatives(
        &self,
        sigma: &AlternativePermutation,
    ) -> Result<Self, PreferenceError> {
        sigma.check_closed_on(&self.universe)?;
        let mut classes = Vec::with_capacity(self.classes.len());
        for class in &self.classes {
            let mut image: Vec<usize> = class
                .iter()
                .map(|&i| {
                    let target = sigma.apply(self.universe.alternative(i));
                    self.universe
                        .index_of(&target)
                        .expect("checked closed on universe")
                })
                .collect();
            image.sort_unstable();
            classes.push(image);
        }
        Ok(PreferenceRelation {
            universe: self.universe.clone(),
            classes,
        })
    }
}

fn leading_ws(text: &str) -> usize {
    text.len() - text.trim_start().len()
}

/// Splits `text` at `sep`, yielding `(byte offset, piece)` pairs.
fn split_with_offsets(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == sep {
            pieces.push((start, &text[start..i]));
            start = i + c.len_utf8();
        }
    }
    pieces.push((start, &text[start..]));
    pieces
}

impl fmt::Display for PreferenceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, class) in self.classes.iter().enumerate() {
            if k > 0 {
                f.write_str(" > ")?;
            }
            for (j, &idx) in class.iter().enumerate() {
                if j > 0 {
                    f.write_str("~")?;
                }
                write!(f, "{}", self.universe.alternative(idx))?;
            }
        }
        Ok(())
    }
}

/// An ordered list of `(agent, relation)` entries over a shared universe.
/// Entries are kept sorted by agent id; agent ids are the stable names used
/// by restriction (`without_agent`) and by permutations.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Profile {
    universe: Universe,
    entries: Vec<(AgentId, PreferenceRelation)>,
}

impl Profile {
    pub fn new(entries: Vec<(AgentId, PreferenceRelation)>) -> Result<Self, PreferenceError> {
        let universe = match entries.first() {
            Some((_, rel)) => rel.universe().clone(),
            None => return Err(PreferenceError::EmptyProfile),
        };
        Profile::with_universe(universe, entries)
    }

    /// Like [`Profile::new`] but usable for empty profiles, which still need
    /// a universe to be meaningful.
    pub fn with_universe(
        universe: Universe,
        mut entries: Vec<(AgentId, PreferenceRelation)>,
    ) -> Result<Self, PreferenceError> {
        entries.sort_by_key(|(id, _)| *id);
        let mut prev: Option<AgentId> = None;
        for (id, rel) in &entries {
            if id.get() == 0 {
                return Err(PreferenceError::NonPositiveAgent);
            }
            if prev == Some(*id) {
                return Err(PreferenceError::DuplicateAgent(*id));
            }
            prev = Some(*id);
            if rel.universe() != &universe {
                return Err(PreferenceError::UniverseMismatch);
            }
        }
        Ok(Profile { universe, entries })
    }

    /// Parses the profile text format: one `agent <id>: <relation>` line per
    /// agent, `#` starting a comment, blank lines ignored.
    ///
    /// When no universe is supplied, the universe is the set of alternatives
    /// mentioned anywhere in the file, in lexicographic order.
    pub fn parse(text: &str, universe: Option<&Universe>) -> Result<Self, ParseError> {
        let mut lines = Vec::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line
                .strip_prefix("agent")
                .ok_or_else(|| ParseError::BadAgentLine {
                    line: line_no + 1,
                    content: line.to_string(),
                })?;
            let (id_text, relation_text) =
                rest.split_once(':')
                    .ok_or_else(|| ParseError::BadAgentLine {
                        line: line_no + 1,
                        content: line.to_string(),
                    })?;
            let id: u32 = id_text
                .trim()
                .parse()
                .map_err(|_| ParseError::BadAgentLine {
                    line: line_no + 1,
                    content: line.to_string(),
                })?;
            lines.push((line_no + 1, AgentId::new(id), relation_text));
        }

        let inferred;
        let universe = match universe {
            Some(u) => u,
            None => {
                let mut tokens: BTreeSet<&str> = BTreeSet::new();
                for (_, _, text) in &lines {
                    for token in text.split(['>', '~']) {
                        let token = token.trim();
                        if !token.is_empty() {
                            tokens.insert(token);
                        }
                    }
                }
                if tokens.is_empty() {
                    return Err(ParseError::Preference(PreferenceError::EmptyProfile));
                }
                inferred = Universe::new(tokens.into_iter().map(Alternative::new).collect())?;
                &inferred
            }
        };

        let mut entries = Vec::with_capacity(lines.len());
        let mut seen = BTreeSet::new();
        for (line_no, id, relation_text) in lines {
            if !seen.insert(id) {
                return Err(ParseError::DuplicateAgentLine { line: line_no, id });
            }
            let relation =
                PreferenceRelation::parse(relation_text, universe).map_err(|source| {
                    ParseError::InRelation {
                        line: line_no,
                        source: Box::new(source),
                    }
                })?;
            entries.push((id, relation));
        }
        Ok(Profile::with_universe(universe.clone(), entries)?)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn entries(&self) -> &[(AgentId, PreferenceRelation)] {
        &self.entries
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.entries.iter().map(|(id, _)| *id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn relation(&self, agent: AgentId) -> Option<&PreferenceRelation> {
        self.entries
            .iter()
            .find(|(id, _)| *id == agent)
            .map(|(_, rel)| rel)
    }

    /// The profile with agent `agent`'s entry removed.
    pub fn without_agent(&self, agent: AgentId) -> Result<Profile, PreferenceError> {
        if self.relation(agent).is_none() {
            return Err(PreferenceError::UnknownAgent(agent));
        }
        let entries = self
            .entries
            .iter()
            .filter(|(id, _)| *id != agent)
            .cloned()
            .collect();
        Profile::with_universe(self.universe.clone(), entries)
    }

    /// The profile with agent `agent`'s relation replaced, all other entries
    /// untouched. This is the unilateral deviation used by manipulation
    /// checks.
    pub fn with_relation(
        &self,
        agent: AgentId,
        relation: PreferenceRelation,
    ) -> Result<Profile, PreferenceError> {
        if relation.universe() != &self.universe {
            return Err(PreferenceError::UniverseMismatch);
        }
        if self.relation(agent).is_none() {
            return Err(PreferenceError::UnknownAgent(agent));
        }
        let entries = self
            .entries
            .iter()
            .map(|(id, rel)| {
                if *id == agent {
                    (*id, relation.clone())
                } else {
                    (*id, rel.clone())
                }
            })
            .collect();
        Profile::with_universe(self.universe.clone(), entries)
    }

    /// Permutes agents: the entry for agent `i` in the result carries the
    /// relation of agent `pi(i)` in this profile.
    pub fn permute_agents(&self, pi: &AgentPermutation) -> Result<Profile, PreferenceError> {
        let agents: BTreeSet<AgentId> = self.agents().collect();
        pi.check_closed_on(&agents)?;
        let entries = self
            .entries
            .iter()
            .map(|(id, _)| {
                let source = pi.apply(*id);
                let rel = self
                    .relation(source)
                    .expect("checked closed on agent set")
                    .clone();
                (*id, rel)
            })
            .collect();
        Profile::with_universe(self.universe.clone(), entries)
    }

    /// Applies a permutation of alternatives to every relation.
    pub fn permute_alternatives(
        &self,
        sigma: &AlternativePermutation,
    ) -> Result<Profile, PreferenceError> {
        let entries = self
            .entries
            .iter()
            .map(|(id, rel)| Ok((*id, rel.permute_alternatives(sigma)?)))
            .collect::<Result<Vec<_>, PreferenceError>>()?;
        Profile::with_universe(self.universe.clone(), entries)
    }

    /// True when `x` Pareto-dominates `y`: every agent weakly prefers `x` to
    /// `y` and at least one strictly prefers it.
    pub fn pareto_dominates(
        &self,
        x: &Alternative,
        y: &Alternative,
    ) -> Result<bool, PreferenceError> {
        let mut strict = false;
        for (_, rel) in &self.entries {
            let rx = rel.class_index(x)?;
            let ry = rel.class_index(y)?;
            if rx > ry {
                return Ok(false);
            }
            if rx < ry {
                strict = true;
            }
        }
        Ok(strict)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (id, rel) in &self.entries {
            writeln!(f, "agent {id}: {rel}")?;
        }
        Ok(())
    }
}

/// A bijection on agent ids, stored as an explicit mapping. Ids outside the
/// stored mapping are fixed points, so a permutation built on four agents
/// extends to larger agent sets unchanged.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AgentPermutation {
    map: BTreeMap<AgentId, AgentId>,
}

impl AgentPermutation {
    pub fn identity() -> Self {
        AgentPermutation {
            map: BTreeMap::new(),
        }
    }

    pub fn from_pairs(pairs: Vec<(AgentId, AgentId)>) -> Result<Self, PreferenceError> {
        let mut map = BTreeMap::new();
        let mut values = BTreeSet::new();
        for (from, to) in pairs {
            if map.insert(from, to).is_some() {
                return Err(PreferenceError::NotBijective(format!(
                    "agent {from} mapped twice"
                )));
            }
            if !values.insert(to) {
                return Err(PreferenceError::NotBijective(format!(
                    "agent {to} is the image of two agents"
                )));
            }
        }
        let domain: BTreeSet<_> = map.keys().copied().collect();
        if domain != values {
            return Err(PreferenceError::NotBijective(
                "domain and image differ".to_string(),
            ));
        }
        let map = map.into_iter().filter(|(k, v)| k != v).collect();
        Ok(AgentPermutation { map })
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[1,2],[3,4]]`.
    pub fn from_cycles(cycles: &[Vec<u32>]) -> Result<Self, PreferenceError> {
        let mut pairs = Vec::new();
        for cycle in cycles {
            for (i, &id) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                pairs.push((AgentId::new(id), AgentId::new(next)));
            }
        }
        AgentPermutation::from_pairs(pairs)
    }

    /// Parses cycle notation such as `(1 2)(3 4)`; `()` and `id` denote the
    /// identity. Elements may be separated by spaces or commas.
    pub fn parse(text: &str) -> Result<Self, PreferenceError> {
        let cycles = parse_cycles(text)?;
        let cycles = cycles
            .into_iter()
            .map(|cycle| {
                cycle
                    .into_iter()
                    .map(|token| {
                        token.parse::<u32>().map_err(|_| {
                            PreferenceError::NotBijective(format!("`{token}` is not an agent id"))
                        })
                    })
                    .collect::<Result<Vec<u32>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        AgentPermutation::from_cycles(&cycles)
    }

    pub fn apply(&self, agent: AgentId) -> AgentId {
        self.map.get(&agent).copied().unwrap_or(agent)
    }

    pub fn inverse(&self) -> Self {
        AgentPermutation {
            map: self.map.iter().map(|(k, v)| (*v, *k)).collect(),
        }
    }

    fn check_closed_on(&self, agents: &BTreeSet<AgentId>) -> Result<(), PreferenceError> {
        for (from, to) in &self.map {
            if !agents.contains(from) || !agents.contains(to) {
                return Err(PreferenceError::UnknownAgent(if agents.contains(from) {
                    *to
                } else {
                    *from
                }));
            }
        }
        Ok(())
    }
}

impl fmt::Display for AgentPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cycles(
            f,
            self.map.keys().copied(),
            |id| self.apply(id),
            |id| id.to_string(),
        )
    }
}

/// A bijection on alternatives, stored as an explicit mapping. Alternatives
/// outside the mapping are fixed points.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlternativePermutation {
    map: BTreeMap<Alternative, Alternative>,
}

impl AlternativePermutation {
    pub fn identity() -> Self {
        AlternativePermutation {
            map: BTreeMap::new(),
        }
    }

    pub fn from_pairs(pairs: Vec<(Alternative, Alternative)>) -> Result<Self, PreferenceError> {
        let mut map = BTreeMap::new();
        let mut values = BTreeSet::new();
        for (from, to) in pairs {
            if map.insert(from.clone(), to.clone()).is_some() {
                return Err(PreferenceError::NotBijective(format!(
                    "alternative {from} mapped twice"
                )));
            }
            if !values.insert(to.clone()) {
                return Err(PreferenceError::NotBijective(format!(
                    "alternative {to} is the image of two alternatives"
                )));
            }
        }
        let domain: BTreeSet<_> = map.keys().cloned().collect();
        if domain != values {
            return Err(PreferenceError::NotBijective(
                "domain and image differ".to_string(),
            ));
        }
        let map = map.into_iter().filter(|(k, v)| k != v).collect();
        Ok(AlternativePermutation { map })
    }

    /// Builds a permutation from disjoint cycles, e.g. `[["a","b"],["c","d"]]`.
    pub fn from_cycles<S: AsRef<str>>(cycles: &[Vec<S>]) -> Result<Self, PreferenceError> {
        let mut pairs = Vec::new();
        for cycle in cycles {
            for (i, id) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()].as_ref();
                pairs.push((Alternative::new(id.as_ref()), Alternative::new(next)));
            }
        }
        AlternativePermutation::from_pairs(pairs)
    }

    /// Parses cycle notation such as `(a b)(c d)`.
    pub fn parse(text: &str) -> Result<Self, PreferenceError> {
        let cycles = parse_cycles(text)?;
        AlternativePermutation::from_cycles(&cycles)
    }

    pub fn apply(&self, alt: &Alternative) -> Alternative {
        self.map.get(alt).cloned().unwrap_or_else(|| alt.clone())
    }

    pub fn inverse(&self) -> Self {
        AlternativePermutation {
            map: self
                .map
                .iter()
                .map(|(k, v)| (v.clone(), k.clone()))
                .collect(),
        }
    }

    pub(crate) fn check_closed_on(&self, universe: &Universe) -> Result<(), PreferenceError> {
        for (from, to) in &self.map {
            if !universe.contains(from) {
                return Err(PreferenceError::UnknownAlternative(from.clone()));
            }
            if !universe.contains(to) {
                return Err(PreferenceError::UnknownAlternative(to.clone()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for AlternativePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cycles(
            f,
            self.map.keys().cloned(),
            |alt| self.apply(&alt),
            |alt| alt.id().to_string(),
        )
    }
}

fn parse_cycles(text: &str) -> Result<Vec<Vec<String>>, PreferenceError> {
    let text = text.trim();
    if text.is_empty() || text == "id" || text == "()" {
        return Ok(Vec::new());
    }
    let mut cycles = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err(PreferenceError::NotBijective(format!(
                "expected `(` in cycle notation, got `{rest}`"
            )));
        };
        let Some(end) = stripped.find(')') else {
            return Err(PreferenceError::NotBijective(
                "unterminated cycle".to_string(),
            ));
        };
        let inner = &stripped[..end];
        let elements: Vec<String> = inner
            .split([' ', ','])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if !elements.is_empty() {
            cycles.push(elements);
        }
        rest = &stripped[end + 1..];
    }
    Ok(cycles)
}

fn write_cycles<T, I>(
    f: &mut fmt::Formatter<'_>,
    moved: I,
    apply: impl Fn(T) -> T,
    render: impl Fn(T) -> String,
) -> fmt::Result
where
    T: Clone + Ord,
    I: Iterator<Item = T>,
{
    let mut remaining: BTreeSet<T> = moved.collect();
    if remaining.is_empty() {
        return f.write_str("()");
    }
    while let Some(start) = remaining.iter().next().cloned() {
        f.write_str("(")?;
        let mut current = start.clone();
        let mut first = true;
        loop {
            remaining.remove(&current);
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(&render(current.clone()))?;
            first = false;
            current = apply(current);
            if current == start {
                break;
            }
        }
        f.write_str(")")?;
    }
    Ok(())
}

/// All weak orders over the universe, each exactly once, in a fixed
/// canonical order: lexicographic by the sequence of indifference classes,
/// classes compared as sorted index lists under the universe order.
///
/// The count is the Fubini number of `universe.len()`: 1, 3, 13, 75, 541 for
/// one through five alternatives.
pub fn enumerate_weak_orders(universe: &Universe) -> Vec<PreferenceRelation> {
    let indices: Vec<usize> = (0..universe.len()).collect();
    let mut result = Vec::new();
    let mut prefix: Vec<Vec<usize>> = Vec::new();
    enumerate_partitions(universe, &indices, &mut prefix, &mut result);
    result
}

fn enumerate_partitions(
    universe: &Universe,
    remaining: &[usize],
    prefix: &mut Vec<Vec<usize>>,
    out: &mut Vec<PreferenceRelation>,
) {
    if remaining.is_empty() {
        out.push(PreferenceRelation {
            universe: universe.clone(),
            classes: prefix.clone(),
        });
        return;
    }
    for first_class in nonempty_subsets_lex(remaining) {
        let rest: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|i| !first_class.contains(i))
            .collect();
        prefix.push(first_class);
        enumerate_partitions(universe, &rest, prefix, out);
        prefix.pop();
    }
}

/// Nonempty subsets of a sorted slice, in lexicographic order of their
/// sorted element lists.
fn nonempty_subsets_lex(elements: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(elements: &[usize], current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for (i, &e) in elements.iter().enumerate() {
            current.push(e);
            out.push(current.clone());
            extend(&elements[i + 1..], current, out);
            current.pop();
        }
    }
    extend(elements, &mut current, &mut out);
    out
}
