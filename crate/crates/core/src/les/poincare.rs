//! The two-triangle argument for surgeries on the trefoil: A₅ and the knot
//! group give A₃, then A₃ and the knot group give A₁.

use super::corollary::{corollary_check, CorollaryReport};
use super::family::{Family, Term, Truth};
use super::puzzle::TrianglePuzzle;
use super::rules::Trace;
use super::solve::apply_rules;
use crate::abgroup::GradedGroup;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Input data: I^# of the lens space S³₅, of the knot, and the rational
/// ranks of S³ₙ per grading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareFacts {
    pub lens: GradedGroup,
    pub knot: GradedGroup,
    /// n ↦ ranks of I^#(S³ₙ; ℚ) in gradings 0 and 1.
    pub rational_ranks: BTreeMap<u32, Vec<usize>>,
    /// Primes allowed in the torsion of A₁ (an input axiom).
    #[serde(default = "two")]
    pub allowed_primes: Vec<u64>,
}

fn two() -> Vec<u64> {
    vec![2]
}

impl PoincareFacts {
    pub fn standard() -> Self {
        use crate::abgroup::FgAbelianGroup as G;
        let lens = GradedGroup::new(2).expect("modulus").with(0, G::free(5));
        let knot = GradedGroup::new(2)
            .expect("modulus")
            .with(0, G::free(3).direct_sum(&G::cyclic(2)))
            .with(1, G::free(1));
        let rational_ranks = [(1, vec![1, 0]), (3, vec![3, 0])].into_iter().collect();
        PoincareFacts { lens, knot, rational_ranks, allowed_primes: vec![2] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub rational_l_space: Truth,
    pub f2_l_space: Truth,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoincareReport {
    pub a3: Family,
    pub a3_text: String,
    pub step1: Trace,
    pub corollary: CorollaryReport,
    pub a1: Family,
    pub a1_text: String,
    pub a1_constraints: Vec<String>,
    pub step2: Trace,
    pub verdict: Verdict,
    pub summary: String,
}

fn ranks_for(f: &PoincareFacts, n: u32) -> Result<&Vec<usize>> {
    f.rational_ranks.get(&n).ok_or_else(|| Error::Invalid(format!("missing rational ranks for n = {n}")))
}

fn step_puzzle(y: Family, z: &GradedGroup, ranks: &[usize]) -> TrianglePuzzle {
    let mut p = TrianglePuzzle::new(2, y, Family::concrete(z), [0, 0, 1]);
    for (g, r) in ranks.iter().enumerate() {
        p = p.with_rank(g as u32, *r);
    }
    p
}

fn unique(p: &TrianglePuzzle) -> Result<(Family, Trace)> {
    let d = apply_rules(p)?;
    match d.solutions.as_slice() {
        [s] => Ok((s.family.clone(), s.trace.clone())),
        v => Err(Error::Puzzle(format!("expected one solution family, got {}", v.len()))),
    }
}

/// Describes the unknown torsion of a family in words, e.g. "G a
/// nontrivial 2-group".
fn describe(f: &Family) -> String {
    let mut out = Vec::new();
    for c in f.components.values() {
        if let Term::Var(v) = &c.torsion {
            let i = f.info(v);
            let kind = match i.primes.as_ref().map(|p| p.iter().copied().collect::<Vec<_>>()) {
                Some(p) if p.len() == 1 => format!("{}-group", p[0]),
                _ => "finite group".to_string(),
            };
            let adj = if i.nonzero { "a nontrivial" } else { "a" };
            out.push(format!("{v} {adj} {kind}"));
        }
    }
    out.join(", ")
}

pub fn run_poincare(facts: &PoincareFacts) -> Result<PoincareReport> {
    let step1 = step_puzzle(Family::concrete(&facts.lens), &facts.knot, ranks_for(facts, 3)?);
    let (a3, t1) = unique(&step1)?;
    let corollary = corollary_check(&step1.clone().with_primes(facts.allowed_primes.iter().copied()), 16)?;
    let step2 = step_puzzle(a3.clone(), &facts.knot, ranks_for(facts, 1)?).with_primes(facts.allowed_primes.iter().copied());
    let (a1, t2) = unique(&step2)?;
    let verdict = Verdict { rational_l_space: a1.is_l_space(None)?, f2_l_space: a1.is_l_space(Some(2))? };
    let l = match verdict.f2_l_space {
        Truth::No => "not an F_2 L-space",
        Truth::Yes => "an F_2 L-space",
        Truth::Unknown => "undecided whether an F_2 L-space",
    };
    let desc = describe(&a1);
    let summary = if desc.is_empty() {
        format!("I^#(P;Z) = {a1}; {l}")
    } else {
        format!("I^#(P;Z) = {a1}, {desc}; {l}")
    };
    Ok(PoincareReport {
        a3_text: a3.to_string(),
        a3,
        step1: t1,
        corollary,
        a1_text: a1.to_string(),
        a1_constraints: a1.constraint_lines(),
        a1,
        step2: t2,
        verdict,
        summary,
    })
}
