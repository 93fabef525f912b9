//! Statements about where torsion of the unknown corner can live.

use super::family::{Family, Term};
use super::puzzle::TrianglePuzzle;
use super::solve::apply_rules;
use crate::error::Result;
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Corollary {
    /// Torsion only involves `primes` and only sits in `gradings`.
    RestrictedTorsion { primes: BTreeSet<u64>, gradings: BTreeSet<u32> },
    /// Torsion is finite and only sits in `gradings`.
    FiniteTorsion { gradings: BTreeSet<u32> },
    /// Every solution is torsion-free.
    Vacuous,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub statement: Corollary,
    pub text: String,
    /// Checked against every member of every solution family with unknowns
    /// of order ≤ `checked_order`.
    pub verified: bool,
    pub checked_order: u64,
}

fn torsion_gradings(f: &Family) -> BTreeSet<u32> {
    f.components.iter().filter(|(_, c)| !c.torsion.is_known_zero()).map(|(g, _)| *g).collect()
}

fn grading_list(gs: &BTreeSet<u32>) -> String {
    let v: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
    if v.len() == 1 {
        format!("grading {}", v[0])
    } else {
        format!("gradings {{{}}}", v.join(", "))
    }
}

/// The strongest statement the rules support about torsion of the
/// unknown, checked against concrete members of the solution families.
pub fn corollary_check(puzzle: &TrianglePuzzle, checked_order: u64) -> Result<CorollaryReport> {
    let d = apply_rules(puzzle)?;
    let mut gradings = BTreeSet::new();
    let mut primes: Option<BTreeSet<u64>> = Some(BTreeSet::new());
    for s in &d.solutions {
        gradings.extend(torsion_gradings(&s.family));
        for c in s.family.components.values() {
            let p = match &c.torsion {
                Term::Known(g) => Some(g.torsion_primes().into_iter().collect::<BTreeSet<u64>>()),
                Term::Var(v) => s.family.info(v).primes,
            };
            primes = match (primes, p) {
                (Some(a), Some(b)) => Some(a.union(&b).copied().collect()),
                _ => None,
            };
        }
    }
    let (statement, text) = if gradings.is_empty() {
        (Corollary::Vacuous, "every solution is free, so there is no torsion to locate".to_string())
    } else {
        match primes {
            Some(p) if !p.is_empty() => {
                let ps: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                let text = format!(
                    "if X is not free, its torsion is {}-torsion and is contained in {}",
                    ps.join(","),
                    grading_list(&gradings)
                );
                (Corollary::RestrictedTorsion { primes: p, gradings }, text)
            }
            _ => {
                let text = format!("if X is not free, its torsion is finite and is contained in {}", grading_list(&gradings));
                (Corollary::FiniteTorsion { gradings }, text)
            }
        }
    };
    let mut verified = true;
    for s in &d.solutions {
        for key in s.family.members(checked_order, crate::abgroup::DEFAULT_EXTENSION_BOUND)? {
            for (g, comp) in key.0.iter().enumerate() {
                let t = comp.torsion_part();
                if t.is_zero() {
                    continue;
                }
                let ok = match &statement {
                    Corollary::Vacuous => false,
                    Corollary::FiniteTorsion { gradings } => gradings.contains(&(g as u32)),
                    Corollary::RestrictedTorsion { primes, gradings } => {
                        gradings.contains(&(g as u32)) && t.torsion_primes().iter().all(|p| primes.contains(p))
                    }
                };
                verified &= ok;
            }
        }
    }
    Ok(CorollaryReport { statement, text, verified, checked_order })
}
