//! Structured (JSON) renderings of lotteries, verdicts and reports.
//!
//! Exact rationals are embedded as numerator/denominator string pairs and
//! lotteries as `(alternative, numerator, denominator)` triples; decimals
//! never appear. Keys are emitted in sorted order, so identical inputs
//! produce byte-identical reports.

use serde_json::{json, Value};

use crate::analysis::{
    EfficiencyVerdict, InefficiencyWitness, ManipulationWitness, SymmetryVerdict,
};
use crate::lotteries::{Lottery, Rational};
use crate::preferences::Profile;
use crate::theorem::{RdExtensionVerdict, ViolationReport, ViolationWitness};

pub fn rational_value(r: &Rational) -> Value {
    json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
    })
}

/// A lottery as `(alternative, numerator, denominator)` triples, zero
/// entries included so the universe stays visible.
pub fn lottery_value(lottery: &Lottery) -> Value {
    Value::Array(
        lottery
            .masses()
            .map(|(alt, mass)| {
                json!([alt.id(), mass.numer().to_string(), mass.denom().to_string()])
            })
            .collect(),
    )
}

pub fn profile_value(profile: &Profile) -> Value {
    json!({
        "universe": profile.universe().to_string(),
        "agents": profile
            .entries()
            .iter()
            .map(|(agent, relation)| json!({
                "agent": agent.get(),
                "relation": relation.to_string(),
            }))
            .collect::<Vec<_>>(),
    })
}

pub fn efficiency_value(
    profile: &Profile,
    lottery: &Lottery,
    verdict: &EfficiencyVerdict,
) -> Value {
    let mut value = json!({
        "profile": profile_value(profile),
        "lottery": lottery_value(lottery),
        "efficient": verdict.is_efficient(),
    });
    if let EfficiencyVerdict::Inefficient(witness) = verdict {
        value["witness"] = match witness {
            InefficiencyWitness::ParetoDominatedMass {
                dominated,
                dominator,
                mass,
            } => json!({
                "kind": "pareto-dominated-mass",
                "dominated": dominated.id(),
                "dominator": dominator.id(),
                "mass": rational_value(mass),
            }),
            InefficiencyWitness::SdDominated {
                dominator,
                strict_agent,
                transcript,
            } => json!({
                "kind": "sd-dominated",
                "dominator": lottery_value(dominator),
                "strict_agent": strict_agent.get(),
                "transcript": transcript,
            }),
        };
    }
    value
}

pub fn manipulation_value(witness: &ManipulationWitness) -> Value {
    json!({
        "agent": witness.agent.get(),
        "kind": witness.kind.to_string(),
        "true_profile": profile_value(&witness.true_profile),
        "misreport": witness.misreport.to_string(),
        "truthful_lottery": lottery_value(&witness.truthful_lottery),
        "deviation_lottery": lottery_value(&witness.deviation_lottery),
    })
}

pub fn symmetry_value(verdict: &SymmetryVerdict) -> Value {
    let mut value = json!({ "holds": verdict.holds });
    if let Some(witness) = &verdict.witness {
        value["witness"] = json!({
            "pi": witness.pi.to_string(),
            "sigma": witness.sigma.to_string(),
            "original": profile_value(&witness.original),
            "transformed": profile_value(&witness.transformed),
            "original_lottery": lottery_value(&witness.original_lottery),
            "transformed_lottery": lottery_value(&witness.transformed_lottery),
            "alternative": witness.alternative.id(),
        });
    }
    value
}

pub fn rd_extension_value(verdict: &RdExtensionVerdict) -> Value {
    json!({
        "holds": verdict.holds,
        "expected": lottery_value(&verdict.expected),
        "actual": lottery_value(&verdict.actual),
    })
}

pub fn violation_value(report: &ViolationReport) -> Value {
    let witness = match &report.witness {
        ViolationWitness::Symmetry(w) => json!({
            "kind": "symmetry",
            "pi": w.pi.to_string(),
            "sigma": w.sigma.to_string(),
            "profile": profile_value(&w.original),
            "lottery": lottery_value(&w.original_lottery),
            "alternative": w.alternative.id(),
        }),
        ViolationWitness::ParetoMass {
            profile,
            lottery,
            dominated,
            dominator,
            mass,
        } => json!({
            "kind": "pareto-mass",
            "profile": profile_value(profile),
            "lottery": lottery_value(lottery),
            "dominated": dominated.id(),
            "dominator": dominator.id(),
            "mass": rational_value(mass),
        }),
        ViolationWitness::SdDomination {
            profile,
            lottery,
            dominator,
            strict_agent,
        } => json!({
            "kind": "sd-domination",
            "profile": profile_value(profile),
            "lottery": lottery_value(lottery),
            "dominator": lottery_value(dominator),
            "strict_agent": strict_agent.get(),
        }),
        ViolationWitness::Manipulation(w) => {
            let mut value = manipulation_value(w);
            value["kind"] = json!("manipulation");
            value
        }
        ViolationWitness::RdMismatch {
            profile,
            expected,
            actual,
        } => json!({
            "kind": "rd-mismatch",
            "profile": profile_value(profile),
            "expected": lottery_value(expected),
            "actual": lottery_value(actual),
        }),
    };
    json!({
        "scheme": report.scheme,
        "property": report.property.to_string(),
        "step": report.step,
        "profile": report.profile_name,
        "witness": witness,
        "transcript": report.transcript,
    })
}
