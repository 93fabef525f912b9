//! Facts, rules and replayable deduction traces.

use super::family::{embeds, Ext, Term, VarInfo};
use crate::abgroup::{enumerate_extensions, groups_of_order, FgAbelianGroup, DEFAULT_EXTENSION_BOUND};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Objects of the long exact sequence. `Ker(k)` lives in Y-grading k;
/// `Im(h)` and `Coker(h)` in Z-grading h.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obj {
    X(u32),
    Y(u32),
    Z(u32),
    Ker(u32),
    Im(u32),
    Coker(u32),
}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obj::X(g) => write!(f, "X_({g})"),
            Obj::Y(g) => write!(f, "Y_({g})"),
            Obj::Z(g) => write!(f, "Z_({g})"),
            Obj::Ker(g) => write!(f, "ker(f1)_({g})"),
            Obj::Im(g) => write!(f, "im(f1)_({g})"),
            Obj::Coker(g) => write!(f, "coker(f1)_({g})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "fact", rename_all = "snake_case")]
pub enum Fact {
    /// 0 → sub → mid → quot → 0.
    Ses { sub: Obj, mid: Obj, quot: Obj },
    /// lo ≤ rank ≤ hi.
    Rank { obj: Obj, lo: usize, hi: Option<usize> },
    /// The torsion subgroup of `obj` is `term`.
    Torsion { obj: Obj, term: Term },
    /// The SES with middle term `obj` splits.
    Splits { obj: Obj },
    Constraint { var: String, info: VarInfo },
    Relation { ext: Ext },
    AllowedPrimes { primes: BTreeSet<u64> },
}

impl Fact {
    pub fn rank(obj: Obj, lo: usize, hi: Option<usize>) -> Self {
        Fact::Rank { obj, lo, hi }
    }

    pub fn torsion(obj: Obj, term: Term) -> Self {
        Fact::Torsion { obj, term }
    }

    fn ses(&self) -> Option<[Obj; 3]> {
        match self {
            Fact::Ses { sub, mid, quot } => Some([*sub, *mid, *quot]),
            _ => None,
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Ses { sub, mid, quot } => write!(f, "0 -> {sub} -> {mid} -> {quot} -> 0"),
            Fact::Rank { obj, lo, hi } => match hi {
                Some(h) if h == lo => write!(f, "rk {obj} = {lo}"),
                Some(h) => write!(f, "{lo} <= rk {obj} <= {h}"),
                None => write!(f, "rk {obj} >= {lo}"),
            },
            Fact::Torsion { obj, term } => write!(f, "Tor {obj} = {term}"),
            Fact::Splits { obj } => write!(f, "the sequence through {obj} splits"),
            Fact::Constraint { var, info } => {
                let mut bits = Vec::new();
                if info.nonzero {
                    bits.push("nonzero".to_string());
                }
                if let Some(p) = &info.primes {
                    let ps: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                    bits.push(format!("primes in {{{}}}", ps.join(",")));
                }
                if let Some(h) = &info.contains {
                    bits.push(format!("contains {h}"));
                }
                if let Some(n) = info.max_gens {
                    bits.push(format!("<= {n} generators"));
                }
                if bits.is_empty() {
                    bits.push("finite".into());
                }
                write!(f, "{var}: {}", bits.join(", "))
            }
            Fact::Relation { ext } => write!(f, "{ext}"),
            Fact::AllowedPrimes { primes } => {
                let ps: Vec<String> = primes.iter().map(|x| x.to_string()).collect();
                write!(f, "torsion of X only involves primes {{{}}}", ps.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Given,
    RankAdditivity,
    GradingRankBound,
    Case,
    FreeKernel,
    ZeroCorner,
    SplitOnFreeQuotient,
    TorsionTransfer,
    ExtensionOrder,
    NonSplitDetect,
    PrimeRestriction,
    GeneratorBound,
    Introduce,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub rule: Rule,
    pub premises: Vec<Fact>,
    pub conclusions: Vec<Fact>,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.conclusions.iter().map(|x| x.to_string()).collect();
        if self.premises.is_empty() {
            write!(f, "[{}] {}", self.rule, c.join("; "))
        } else {
            let p: Vec<String> = self.premises.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}] {} |- {}", self.rule, p.join("; "), c.join("; "))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn rules_used(&self) -> BTreeSet<Rule> {
        self.steps.iter().map(|s| s.rule).collect()
    }

    pub fn render(&self) -> String {
        self.steps.iter().enumerate().map(|(i, s)| format!("{:>3}. {s}\n", i + 1)).collect()
    }
}

pub type Interval = (usize, Option<usize>);

pub(crate) fn meet(a: Interval, b: Interval) -> Option<Interval> {
    let lo = a.0.max(b.0);
    let hi = match (a.1, b.1) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    match hi {
        Some(h) if h < lo => None,
        _ => Some((lo, hi)),
    }
}

/// The interval for position `pos` of an SES implied by the other two.
pub(crate) fn additivity(ranks: [Interval; 3], pos: usize) -> Interval {
    let [s, m, q] = ranks;
    let add = |a: Interval, b: Interval| (a.0 + b.0, a.1.zip(b.1).map(|(x, y)| x + y));
    // m − x ranges over [m.lo − x.hi, m.hi − x.lo]
    let diff = |m: Interval, x: Interval| {
        let lo = match x.1 {
            Some(xh) => m.0.saturating_sub(xh),
            None => 0,
        };
        (lo, m.1.map(|mh| mh.saturating_sub(x.0)))
    };
    match pos {
        0 => diff(m, q),
        1 => add(s, q),
        _ => diff(m, s),
    }
}

pub(crate) fn is_zero_term(t: &Term) -> bool {
    t.is_known_zero()
}

/// Info implied by a term: for a known group, the group itself.
pub(crate) fn term_info(t: &Term, infos: &BTreeMap<String, VarInfo>) -> VarInfo {
    match t {
        Term::Var(v) => infos.get(v).cloned().unwrap_or_default(),
        Term::Known(g) => VarInfo {
            nonzero: !g.is_zero(),
            primes: Some(g.torsion_primes().into_iter().collect()),
            contains: if g.is_zero() { None } else { Some(g.clone()) },
            max_gens: Some(g.torsion().len()),
        },
    }
}

/// New constraints on the unknowns of `e` implied by the others.
pub(crate) fn propagate_ext(e: &Ext, infos: &BTreeMap<String, VarInfo>) -> BTreeMap<String, VarInfo> {
    let s = term_info(&e.sub, infos);
    let m = term_info(&e.mid, infos);
    let q = term_info(&e.quot, infos);
    let mut out = BTreeMap::new();
    if let Term::Var(v) = &e.mid {
        let mut n = m.clone();
        if s.nonzero || q.nonzero {
            n.nonzero = true;
        }
        if let (Some(a), Some(b)) = (&s.primes, &q.primes) {
            let u: BTreeSet<u64> = a.union(b).copied().collect();
            n.restrict_primes(&u);
        }
        if n.contains.is_none() {
            n.contains = s.contains.clone();
        }
        if let (Some(a), Some(b)) = (s.max_gens, q.max_gens) {
            n.max_gens = Some(n.max_gens.map_or(a + b, |x| x.min(a + b)));
        }
        if n != m {
            out.insert(v.clone(), n);
        }
    }
    for (t, i) in [(&e.sub, &s), (&e.quot, &q)] {
        if let Term::Var(v) = t {
            if out.contains_key(v) {
                continue;
            }
            let mut n = i.clone();
            if let Some(p) = &m.primes {
                n.restrict_primes(p);
            }
            if let Some(g) = m.max_gens {
                n.max_gens = Some(n.max_gens.map_or(g, |x| x.min(g)));
            }
            if n != *i {
                out.insert(v.clone(), n);
            }
        }
    }
    out
}

/// Groups that fit the open position of a finite SES whose other two
/// positions are known.
pub(crate) fn ext_fill(sub: Option<&FgAbelianGroup>, mid: Option<&FgAbelianGroup>, quot: Option<&FgAbelianGroup>) -> Vec<FgAbelianGroup> {
    let bound = DEFAULT_EXTENSION_BOUND;
    let order = |g: &FgAbelianGroup| g.order().and_then(|o| o.to_u64());
    match (sub, mid, quot) {
        (Some(a), None, Some(c)) => enumerate_extensions(a, c, bound).unwrap_or_default(),
        (None, Some(b), Some(c)) | (Some(c), Some(b), None) => {
            let (Some(ob), Some(oc)) = (order(b), order(c)) else { return Vec::new() };
            if oc == 0 || ob % oc != 0 {
                return Vec::new();
            }
            let sub_is_open = sub.is_none();
            groups_of_order(ob / oc)
                .into_iter()
                .filter(|x| {
                    let (s, q) = if sub_is_open { (x, c) } else { (c, x) };
                    enumerate_extensions(s, q, bound).map(|v| v.contains(b)).unwrap_or(false)
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

/// Why a step does not follow from its premises.
fn bad(msg: impl Into<String>) -> std::result::Result<(), String> {
    Err(msg.into())
}

fn find_ses(p: &[Fact]) -> Option<[Obj; 3]> {
    p.iter().find_map(Fact::ses)
}

fn rank_of(p: &[Fact], o: Obj) -> Option<Interval> {
    p.iter().find_map(|f| match f {
        Fact::Rank { obj, lo, hi } if *obj == o => Some((*lo, *hi)),
        _ => None,
    })
}

fn tor_of(p: &[Fact], o: Obj) -> Option<&Term> {
    p.iter().find_map(|f| match f {
        Fact::Torsion { obj, term } if *obj == o => Some(term),
        _ => None,
    })
}

fn constraint_of<'a>(p: &'a [Fact], v: &str) -> Option<&'a VarInfo> {
    p.iter().find_map(|f| match f {
        Fact::Constraint { var, info } if var == v => Some(info),
        _ => None,
    })
}

fn single_torsion(c: &[Fact]) -> Option<(Obj, &Term)> {
    match c {
        [Fact::Torsion { obj, term }] => Some((*obj, term)),
        _ => None,
    }
}

/// Checks one step in isolation. `fresh` tells whether a name is unused by
/// everything established before the step.
pub fn check_step(step: &Step, fresh: &dyn Fn(&str) -> bool) -> std::result::Result<(), String> {
    let p = &step.premises;
    let c = &step.conclusions;
    match step.rule {
        Rule::Given => Ok(()),
        Rule::RankAdditivity | Rule::GradingRankBound => {
            let Some(ses) = find_ses(p) else { return bad("no sequence among premises") };
            let [Fact::Rank { obj, lo, hi }] = c.as_slice() else { return bad("expects one rank conclusion") };
            let Some(pos) = ses.iter().position(|o| o == obj) else { return bad("target not in sequence") };
            let full = (0, None);
            let r = [0, 1, 2].map(|i| rank_of(p, ses[i]).unwrap_or(full));
            let derived = additivity(r, pos);
            let Some(res) = meet(r[pos], derived) else { return bad("empty interval") };
            if res != (*lo, *hi) {
                return bad(format!("expected {res:?}"));
            }
            let exact = (0..3).filter(|&i| i != pos).all(|i| rank_of(p, ses[i]).is_some_and(|x| x.1 == Some(x.0)));
            let want = if exact { Rule::RankAdditivity } else { Rule::GradingRankBound };
            if step.rule != want {
                return bad(format!("should be {want}"));
            }
            Ok(())
        }
        Rule::Case => {
            let [Fact::Rank { obj, lo, hi }] = c.as_slice() else { return bad("expects one rank") };
            let Some((l, h)) = rank_of(p, *obj) else { return bad("no prior interval") };
            if Some(*lo) != *hi || *lo < l || h.is_some_and(|h| *lo > h) {
                return bad("case outside the interval");
            }
            Ok(())
        }
        Rule::FreeKernel => {
            let Some([a, b, _]) = find_ses(p) else { return bad("no sequence") };
            let Some((o, t)) = single_torsion(c) else { return bad("expects one torsion") };
            if o != a || !is_zero_term(t) || !tor_of(p, b).is_some_and(is_zero_term) {
                return bad("needs a torsion-free middle and concludes on the sub");
            }
            Ok(())
        }
        Rule::ZeroCorner => {
            let Some(ses) = find_ses(p) else { return bad("no sequence") };
            let Some((o, t)) = single_torsion(c) else { return bad("expects one torsion") };
            for z in [ses[0], ses[2]] {
                let zero = rank_of(p, z) == Some((0, Some(0))) && tor_of(p, z).is_some_and(is_zero_term);
                if !zero || o == z {
                    continue;
                }
                let other = ses.iter().copied().find(|x| *x != z && *x != o);
                if other.and_then(|x| tor_of(p, x)) == Some(t) {
                    return Ok(());
                }
            }
            bad("no zero end matches")
        }
        Rule::SplitOnFreeQuotient => {
            let Some([_, b, q]) = find_ses(p) else { return bad("no sequence") };
            if c.as_slice() != [Fact::Splits { obj: b }] || !tor_of(p, q).is_some_and(is_zero_term) {
                return bad("needs a free quotient");
            }
            Ok(())
        }
        Rule::TorsionTransfer => {
            let Some([a, b, q]) = find_ses(p) else { return bad("no sequence") };
            let Some((o, t)) = single_torsion(c) else { return bad("expects one torsion") };
            if !p.contains(&Fact::Splits { obj: b }) || !tor_of(p, q).is_some_and(is_zero_term) {
                return bad("needs a split sequence with free quotient");
            }
            let src = if o == a { b } else if o == b { a } else { return bad("wrong target") };
            if tor_of(p, src) != Some(t) {
                return bad("torsion does not match");
            }
            Ok(())
        }
        Rule::ExtensionOrder => check_extension_order(p, c, fresh),
        Rule::NonSplitDetect => {
            let Some([a, b, q]) = find_ses(p) else { return bad("no sequence") };
            let Some(Term::Known(t)) = tor_of(p, b) else { return bad("middle torsion must be known") };
            if !tor_of(p, a).is_some_and(is_zero_term) || t.is_zero() {
                return bad("needs a free sub and torsion in the middle");
            }
            let [Fact::Torsion { obj, term: Term::Var(v) }, Fact::Constraint { var, info }] = c.as_slice() else {
                return bad("expects a fresh unknown and its constraint");
            };
            if *obj != q || v != var || !fresh(v) {
                return bad("unknown must be fresh and on the quotient");
            }
            let want = VarInfo { nonzero: true, contains: Some(t.clone()), ..Default::default() };
            if *info != want {
                return bad("constraint mismatch");
            }
            Ok(())
        }
        Rule::PrimeRestriction => {
            let Some(allowed) = p.iter().find_map(|f| match f {
                Fact::AllowedPrimes { primes } => Some(primes),
                _ => None,
            }) else {
                return bad("no prime axiom");
            };
            let [Fact::Constraint { var, info }] = c.as_slice() else { return bad("expects one constraint") };
            let on_x = p.iter().any(|f| matches!(f, Fact::Torsion { obj: Obj::X(_), term: Term::Var(v) } if v == var));
            if !on_x {
                return bad("applies to torsion of X only");
            }
            let mut want = constraint_of(p, var).cloned().unwrap_or_default();
            want.restrict_primes(allowed);
            if *info != want {
                return bad("constraint mismatch");
            }
            Ok(())
        }
        Rule::GeneratorBound => {
            let Some([a, b, q]) = find_ses(p) else { return bad("no sequence") };
            let [Fact::Constraint { var, info }] = c.as_slice() else { return bad("expects one constraint") };
            let Some(Term::Known(t)) = tor_of(p, b) else { return bad("middle torsion must be known") };
            let Some((r, Some(r2))) = rank_of(p, b) else { return bad("middle rank must be known") };
            if r != r2 {
                return bad("middle rank must be exact");
            }
            let mut want = constraint_of(p, var).cloned().unwrap_or_default();
            if tor_of(p, a) == Some(&Term::Var(var.clone())) {
                bound_sub(&mut want, t);
            } else if tor_of(p, q) == Some(&Term::Var(var.clone())) {
                bound_quot(&mut want, t, r);
            } else {
                return bad("unknown is not an end of the sequence");
            }
            if *info != want {
                return bad("constraint mismatch");
            }
            Ok(())
        }
        Rule::Introduce => match c.as_slice() {
            [Fact::Torsion { term: Term::Var(v), .. }] if p.is_empty() && fresh(v) => Ok(()),
            _ => bad("introduces one fresh unknown"),
        },
    }
}

pub(crate) fn bound_sub(i: &mut VarInfo, t: &FgAbelianGroup) {
    let n = t.torsion().len();
    i.max_gens = Some(i.max_gens.map_or(n, |x| x.min(n)));
    i.restrict_primes(&t.torsion_primes().into_iter().collect());
}

pub(crate) fn bound_quot(i: &mut VarInfo, t: &FgAbelianGroup, rank: usize) {
    let n = rank + t.torsion().len();
    i.max_gens = Some(i.max_gens.map_or(n, |x| x.min(n)));
    if rank == 0 {
        i.restrict_primes(&t.torsion_primes().into_iter().collect());
    }
}

fn check_extension_order(p: &[Fact], c: &[Fact], fresh: &dyn Fn(&str) -> bool) -> std::result::Result<(), String> {
    // propagation of constraints along a relation
    if let Some(ext) = p.iter().find_map(|f| match f {
        Fact::Relation { ext } => Some(ext),
        _ => None,
    }) {
        let infos: BTreeMap<String, VarInfo> = p
            .iter()
            .filter_map(|f| match f {
                Fact::Constraint { var, info } => Some((var.clone(), info.clone())),
                _ => None,
            })
            .collect();
        let want = propagate_ext(ext, &infos);
        let [Fact::Constraint { var, info }] = c else { return bad("expects one constraint") };
        if want.get(var) != Some(info) {
            return bad("constraint does not follow");
        }
        return Ok(());
    }
    let Some(ses) = find_ses(p) else { return bad("no sequence") };
    if rank_of(p, ses[0]) != Some((0, Some(0))) {
        return bad("sub must be finite");
    }
    let (target, term) = match c.first() {
        Some(Fact::Torsion { obj, term }) => (*obj, term),
        _ => return bad("expects a torsion conclusion"),
    };
    let Some(pos) = ses.iter().position(|o| *o == target) else { return bad("target not in sequence") };
    let terms: Vec<Option<&Term>> = (0..3).map(|i| if i == pos { None } else { tor_of(p, ses[i]) }).collect();
    if terms.iter().enumerate().any(|(i, t)| i != pos && t.is_none()) {
        return bad("other torsion terms missing");
    }
    match (term, c.len()) {
        (Term::Known(g), 1) => {
            let known: Vec<Option<&FgAbelianGroup>> = terms.iter().map(|t| t.and_then(|t| t.known())).collect();
            if (0..3).any(|i| i != pos && known[i].is_none()) {
                return bad("a known result needs known neighbours");
            }
            let fill = ext_fill(known[0], known[1], known[2]);
            if fill.as_slice() != std::slice::from_ref(g) {
                return bad("result is not the unique fit");
            }
            Ok(())
        }
        (Term::Var(v), 2) => {
            if !fresh(v) {
                return bad("unknown must be fresh");
            }
            let mut t: Vec<Term> = terms.iter().map(|t| t.cloned().unwrap_or_else(|| term.clone())).collect();
            let quot = t.pop().expect("three");
            let mid = t.pop().expect("three");
            let sub = t.pop().expect("three");
            let want = Ext { sub, mid, quot };
            if c[1] != (Fact::Relation { ext: want }) {
                return bad("relation mismatch");
            }
            Ok(())
        }
        _ => bad("unexpected conclusion shape"),
    }
}

/// Known-term consistency of an SES; returns the violated rule.
pub(crate) fn ses_conflict(
    ranks: [Interval; 3],
    tors: [&FgAbelianGroup; 3],
) -> Option<(Rule, String)> {
    let [a, b, c] = tors;
    if b.is_zero() && !a.is_zero() {
        return Some((Rule::FreeKernel, format!("{a} inside a torsion-free group")));
    }
    if c.is_zero() && a != b {
        return Some((Rule::TorsionTransfer, format!("split sequence needs torsion {a}, found {b}")));
    }
    if ranks[0] == (0, Some(0)) {
        let ok = enumerate_extensions(a, c, DEFAULT_EXTENSION_BOUND).map(|v| v.contains(b)).unwrap_or(false);
        if !ok {
            return Some((Rule::ExtensionOrder, format!("{b} is not an extension of {c} by {a}")));
        }
    }
    if a.is_zero() && !embeds(b, c) {
        return Some((Rule::NonSplitDetect, format!("{b} does not embed in {c}")));
    }
    None
}
