//! Helpers shared by the integration test suites.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sdchoice::lotteries::Rational;
use sdchoice::preferences::enumerate_weak_orders;
use sdchoice::{
    AgentId, AgentPermutation, AlternativePermutation, Lottery, PreferenceRelation, Profile,
    Universe,
};

/// Ordered-set-partition recurrence: W(m) = sum_{k=1..m} C(m,k) W(m-k),
/// W(0) = 1. Independent of the enumeration code under test.
pub fn fubini(m: usize) -> u64 {
    fn binomial(n: usize, k: usize) -> u64 {
        let mut result = 1u64;
        for i in 0..k {
            result = result * (n - i) as u64 / (i + 1) as u64;
        }
        result
    }
    if m == 0 {
        return 1;
    }
    (1..=m).map(|k| binomial(m, k) * fubini(m - k)).sum()
}

pub fn universe(tokens: &str) -> Universe {
    Universe::parse(tokens).unwrap()
}

pub fn profile(lines: &[&str]) -> Profile {
    let text: String = lines
        .iter()
        .enumerate()
        .map(|(i, rel)| format!("agent {}: {rel}\n", i + 1))
        .collect();
    Profile::parse(&text, None).unwrap()
}

pub fn sample_relation(rng: &mut ChaCha8Rng, orders: &[PreferenceRelation]) -> PreferenceRelation {
    orders[rng.random_range(0..orders.len())].clone()
}

pub fn sample_profile(rng: &mut ChaCha8Rng, u: &Universe, n: u32) -> Profile {
    let orders = enumerate_weak_orders(u);
    let entries = (1..=n)
        .map(|id| (AgentId::new(id), sample_relation(rng, &orders)))
        .collect();
    Profile::with_universe(u.clone(), entries).unwrap()
}

/// A random lottery whose probabilities share a denominator drawn from
/// `1..=max_denominator`.
pub fn sample_lottery(rng: &mut ChaCha8Rng, u: &Universe, max_denominator: u32) -> Lottery {
    let denominator = rng.random_range(1..=max_denominator) as i64;
    let mut counts = vec![0i64; u.len()];
    for _ in 0..denominator {
        counts[rng.random_range(0..u.len())] += 1;
    }
    let mass = counts
        .into_iter()
        .map(|k| Rational::new(k.into(), denominator.into()))
        .collect();
    Lottery::new(u.clone(), mass).unwrap()
}

pub fn random_agent_permutation(rng: &mut ChaCha8Rng, profile: &Profile) -> AgentPermutation {
    let agents: Vec<AgentId> = profile.agents().collect();
    let mut targets = agents.clone();
    targets.shuffle(rng);
    AgentPermutation::from_pairs(agents.into_iter().zip(targets).collect()).unwrap()
}

pub fn random_alternative_permutation(
    rng: &mut ChaCha8Rng,
    u: &Universe,
) -> AlternativePermutation {
    let alternatives = u.alternatives().to_vec();
    let mut targets = alternatives.clone();
    targets.shuffle(rng);
    AlternativePermutation::from_pairs(alternatives.into_iter().zip(targets).collect()).unwrap()
}
