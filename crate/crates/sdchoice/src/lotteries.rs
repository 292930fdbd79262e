//! Exact-rational lotteries over alternatives and the stochastic-dominance
//! comparison relation.
//!
//! All probability arithmetic is exact; no floating point is involved in any
//! verdict. A lottery weakly SD-dominates another for a relation when every
//! upper contour set (the alternatives at least as good as some reference
//! alternative) receives at least as much probability.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::preferences::{Alternative, PreferenceRelation, Universe};

/// Arbitrary-precision rational number; numerator and denominator are kept
/// in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Convenience constructor for small rationals.
pub fn ratio(numerator: i64, denominator: i64) -> Rational {
    Rational::new(numerator.into(), denominator.into())
}

pub fn parse_rational(text: &str) -> Result<Rational, LotteryError> {
    text.trim()
        .parse::<Rational>()
        .map_err(|_| LotteryError::BadRational(text.trim().to_string()))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LotteryError {
    #[error("probability of `{alternative}` is negative: {mass}")]
    NegativeMass {
        alternative: Alternative,
        mass: Rational,
    },
    #[error("probabilities sum to {sum}, not 1")]
    MassSum { sum: Rational },
    #[error("lottery and relation are defined over different universes")]
    UniverseMismatch,
    #[error("alternative `{0}` is not in the universe")]
    UnknownAlternative(Alternative),
    #[error("duplicate alternative `{0}` in lottery")]
    DuplicateAlternative(Alternative),
    #[error("selection must be a nonempty subset of the universe")]
    EmptySelection,
    #[error("`{0}` is not a rational number")]
    BadRational(String),
    #[error("malformed lottery term `{0}`")]
    BadTerm(String),
    #[error("lottery text is empty")]
    EmptyText,
    #[error("lottery has positive probability outside the target universe")]
    MassOutsideTarget,
}

/// A probability distribution over the universe, with exact rational
/// probabilities that are nonnegative and sum to one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Lottery {
    universe: Universe,
    mass: Vec<Rational>,
}

impl Lottery {
    pub fn new(universe: Universe, mass: Vec<Rational>) -> Result<Self, LotteryError> {
        assert_eq!(
            mass.len(),
            universe.len(),
            "one probability per alternative"
        );
        let mut sum = Rational::zero();
        for (i, m) in mass.iter().enumerate() {
            if m.is_negative() {
                return Err(LotteryError::NegativeMass {
                    alternative: universe.alternative(i).clone(),
                    mass: m.clone(),
                });
            }
            sum += m;
        }
        if !sum.is_one() {
            return Err(LotteryError::MassSum { sum });
        }
        Ok(Lottery { universe, mass })
    }

    /// Builds a lottery from `(alternative, probability)` pairs; alternatives
    /// not mentioned get probability zero.
    pub fn from_pairs(
        universe: &Universe,
        pairs: &[(Alternative, Rational)],
    ) -> Result<Self, LotteryError> {
        let mut mass = vec![Rational::zero(); universe.len()];
        let mut seen = BTreeSet::new();
        for (alt, m) in pairs {
            let idx = universe
                .index_of(alt)
                .ok_or_else(|| LotteryError::UnknownAlternative(alt.clone()))?;
            if !seen.insert(idx) {
                return Err(LotteryError::DuplicateAlternative(alt.clone()));
            }
            mass[idx] = m.clone();
        }
        Lottery::new(universe.clone(), mass)
    }

    /// The lottery placing probability one on a single alternative.
    pub fn degenerate(universe: &Universe, alt: &Alternative) -> Result<Self, LotteryError> {
        Lottery::from_pairs(universe, &[(alt.clone(), Rational::one())])
    }

    /// The uniform lottery over a nonempty selection, zero elsewhere.
    pub fn uniform(
        universe: &Universe,
        selection: &BTreeSet<Alternative>,
    ) -> Result<Self, LotteryError> {
        if selection.is_empty() {
            return Err(LotteryError::EmptySelection);
        }
        let share = Rational::new(1.into(), (selection.len() as i64).into());
        let pairs: Vec<(Alternative, Rational)> = selection
            .iter()
            .map(|alt| (alt.clone(), share.clone()))
            .collect();
        Lottery::from_pairs(universe, &pairs)
    }

    /// Parses the lottery text format `5/12*a + 5/12*b + 1/12*c + 1/12*d`.
    /// A bare token denotes probability one on that alternative.
    pub fn parse(text: &str, universe: &Universe) -> Result<Self, LotteryError> {
        if text.trim().is_empty() {
            return Err(LotteryError::EmptyText);
        }
        let mut pairs = Vec::new();
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(LotteryError::BadTerm(term.to_string()));
            }
            let (mass, token) = match term.split_once('*') {
                Some((coefficient, token)) => (parse_rational(coefficient)?, token.trim()),
                None => (Rational::one(), term),
            };
            if token.is_empty() || token.contains(char::is_whitespace) {
                return Err(LotteryError::BadTerm(term.to_string()));
            }
            pairs.push((Alternative::new(token), mass));
        }
        Lottery::from_pairs(universe, &pairs)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn mass_of(&self, alt: &Alternative) -> Result<&Rational, LotteryError> {
        let idx = self
            .universe
            .index_of(alt)
            .ok_or_else(|| LotteryError::UnknownAlternative(alt.clone()))?;
        Ok(&self.mass[idx])
    }

    pub(crate) fn mass_by_index(&self, index: usize) -> &Rational {
        &self.mass[index]
    }

    pub fn masses(&self) -> impl Iterator<Item = (&Alternative, &Rational)> {
        self.universe.alternatives().iter().zip(self.mass.iter())
    }

    /// The alternatives receiving positive probability.
    pub fn support(&self) -> BTreeSet<Alternative> {
        self.masses()
            .filter(|(_, m)| m.is_positive())
            .map(|(alt, _)| alt.clone())
            .collect()
    }

    /// Reinterprets the lottery over a sub-universe. Fails when any
    /// probability lies outside the target.
    pub fn restrict(&self, target: &Universe) -> Result<Lottery, LotteryError> {
        let mut mass = vec![Rational::zero(); target.len()];
        for (alt, m) in self.masses() {
            if m.is_zero() {
                continue;
            }
            match target.index_of(alt) {
                Some(idx) => mass[idx] = m.clone(),
                None => return Err(LotteryError::MassOutsideTarget),
            }
        }
        Lottery::new(target.clone(), mass)
    }

    /// Reinterprets the lottery over a super-universe, assigning zero
    /// probability to the new alternatives.
    pub fn zero_extend(&self, target: &Universe) -> Result<Lottery, LotteryError> {
        let mut mass = vec![Rational::zero(); target.len()];
        for (alt, m) in self.masses() {
            let idx = target
                .index_of(alt)
                .ok_or_else(|| LotteryError::UnknownAlternative(alt.clone()))?;
            mass[idx] = m.clone();
        }
        Lottery::new(target.clone(), mass)
    }

    /// The image lottery under a permutation of alternatives: the image
    /// assigns to `sigma(x)` the probability this lottery assigns to `x`.
    pub fn permute(
        &self,
        sigma: &crate::preferences::AlternativePermutation,
    ) -> Result<Lottery, LotteryError> {
        let mut mass = vec![Rational::zero(); self.universe.len()];
        for (alt, m) in self.masses() {
            let target = sigma.apply(alt);
            let idx = self
                .universe
                .index_of(&target)
                .ok_or(LotteryError::UnknownAlternative(target))?;
            mass[idx] = m.clone();
        }
        Lottery::new(self.universe.clone(), mass)
    }

    /// Every lottery whose probabilities can be written over a common
    /// denominator of at most `max_denominator`, deduplicated and sorted.
    /// Intended for small universes; the count grows quickly.
    pub fn enumerate_with_denominator(universe: &Universe, max_denominator: u32) -> Vec<Lottery> {
        let m = universe.len();
        let mut out = BTreeSet::new();
        for denominator in 1..=max_denominator {
            let mut parts = vec![0u32; m];
            compositions(denominator, 0, &mut parts, &mut |parts| {
                let mass: Vec<Rational> = parts
                    .iter()
                    .map(|&k| Rational::new((k as i64).into(), (denominator as i64).into()))
                    .collect();
                out.insert(Lottery {
                    universe: universe.clone(),
                    mass,
                });
            });
        }
        out.into_iter().collect()
    }
}

fn compositions(remaining: u32, index: usize, parts: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if index + 1 == parts.len() {
        parts[index] = remaining;
        emit(parts);
        return;
    }
    for k in 0..=remaining {
        parts[index] = k;
        compositions(remaining - k, index + 1, parts, emit);
    }
}

impl fmt::Display for Lottery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (alt, m) in self.masses() {
            if m.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{m}*{alt}")?;
            first = false;
        }
        Ok(())
    }
}

/// Outcome of a stochastic-dominance comparison between two lotteries.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SdVerdict {
    /// The first lottery weakly dominates the second but not vice versa.
    StrictlyDominates,
    /// The second lottery weakly dominates the first but not vice versa.
    StrictlyDominatedBy,
    /// Each weakly dominates the other: equal mass on every upper contour.
    Equivalent,
    /// Neither weakly dominates the other.
    Incomparable,
}

impl SdVerdict {
    /// True when the first lottery is at least as good on every upper
    /// contour set.
    pub fn weakly_dominates(self) -> bool {
        matches!(self, SdVerdict::StrictlyDominates | SdVerdict::Equivalent)
    }

    /// The verdict with the roles of the two lotteries exchanged.
    pub fn flipped(self) -> Self {
        match self {
            SdVerdict::StrictlyDominates => SdVerdict::StrictlyDominatedBy,
            SdVerdict::StrictlyDominatedBy => SdVerdict::StrictlyDominates,
            other => other,
        }
    }
}

impl fmt::Display for SdVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SdVerdict::StrictlyDominates => "strictly dominates",
            SdVerdict::StrictlyDominatedBy => "is strictly dominated by",
            SdVerdict::Equivalent => "is equivalent to",
            SdVerdict::Incomparable => "is incomparable to",
        })
    }
}

/// Total probability the lottery puts on alternatives at least as good as
/// `alt` under the relation.
pub fn upper_contour_mass(
    relation: &PreferenceRelation,
    lottery: &Lottery,
    alt: &Alternative,
) -> Result<Rational, LotteryError> {
    if relation.universe() != lottery.universe() {
        return Err(LotteryError::UniverseMismatch);
    }
    let rank = relation
        .class_index(alt)
        .map_err(|_| LotteryError::UnknownAlternative(alt.clone()))?;
    let mut sum = Rational::zero();
    for class in &relation.class_indices()[..=rank] {
        for &idx in class {
            sum += lottery.mass_by_index(idx);
        }
    }
    Ok(sum)
}

/// Compares two lotteries by stochastic dominance under one relation.
///
/// The upper contour mass is constant on indifference classes, so one
/// comparison per class boundary decides the verdict.
pub fn sd_compare(
    relation: &PreferenceRelation,
    p: &Lottery,
    q: &Lottery,
) -> Result<SdVerdict, LotteryError> {
    if relation.universe() != p.universe() || p.universe() != q.universe() {
        return Err(LotteryError::UniverseMismatch);
    }
    let mut p_ahead = false;
    let mut q_ahead = false;
    let mut p_sum = Rational::zero();
    let mut q_sum = Rational::zero();
    for class in relation.class_indices() {
        for &idx in class {
            p_sum += p.mass_by_index(idx);
            q_sum += q.mass_by_index(idx);
        }
        match p_sum.cmp(&q_sum) {
            std::cmp::Ordering::Greater => p_ahead = true,
            std::cmp::Ordering::Less => q_ahead = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    Ok(match (p_ahead, q_ahead) {
        (false, false) => SdVerdict::Equivalent,
        (true, false) => SdVerdict::StrictlyDominates,
        (false, true) => SdVerdict::StrictlyDominatedBy,
        (true, true) => SdVerdict::Incomparable,
    })
}
