//! The deduction engine: rank intervals, then torsion, then constraints.

use super::family::{Component, Ext, Family, Term, VarInfo};
use super::puzzle::{split_les, SesSchema, TrianglePuzzle};
use super::rules::{
    additivity, bound_quot, bound_sub, check_step, ext_fill, meet, propagate_ext, ses_conflict, Fact,
    Interval, Obj, Rule, Step, Trace,
};
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

const NAME_POOL: [&str; 14] = ["K", "H", "G", "J", "L", "M", "N", "P", "Q", "R", "S", "U", "V", "W"];

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub family: Family,
    pub trace: Trace,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pruned {
    pub rule: Rule,
    pub detail: String,
    pub trace: Trace,
}

#[derive(Clone, Debug, Serialize)]
pub struct Deduction {
    pub schema: SesSchema,
    pub solutions: Vec<Solution>,
    pub pruned: Vec<Pruned>,
}

impl Deduction {
    /// The family when the rules pin a single one.
    pub fn unique(&self) -> Option<&Family> {
        match self.solutions.as_slice() {
            [s] => Some(&s.family),
            _ => None,
        }
    }
}

struct Layout {
    m: u32,
    d: [i64; 3],
}

impl Layout {
    fn g(&self, x: i64) -> u32 {
        x.rem_euclid(self.m as i64) as u32
    }

    fn sess(&self) -> Vec<[Obj; 3]> {
        let mut out = Vec::new();
        let [dpsi, d1, d2] = self.d;
        for k in 0..self.m {
            out.push([Obj::Ker(k), Obj::Y(k), Obj::Im(self.g(k as i64 + d1))]);
        }
        for h in 0..self.m {
            out.push([Obj::Im(h), Obj::Z(h), Obj::Coker(h)]);
        }
        for g in 0..self.m {
            out.push([Obj::Coker(self.g(g as i64 - d2)), Obj::X(g), Obj::Ker(self.g(g as i64 + dpsi))]);
        }
        out
    }

    /// Objects in the order undetermined ones are introduced.
    fn intro_order(&self) -> Vec<Obj> {
        let mut v = Vec::new();
        for f in [Obj::Ker, Obj::Im, Obj::Coker, Obj::X] {
            v.extend((0..self.m).map(f));
        }
        v
    }
}

#[derive(Clone)]
struct State {
    steps: Vec<Step>,
    ranks: BTreeMap<Obj, Interval>,
    tors: BTreeMap<Obj, Term>,
    vars: BTreeMap<String, VarInfo>,
    relations: Vec<Ext>,
    used: BTreeSet<String>,
    allowed: Option<BTreeSet<u64>>,
    lossy: bool,
}

struct Conflict(Rule, String);

impl State {
    fn push(&mut self, rule: Rule, premises: Vec<Fact>, conclusions: Vec<Fact>) {
        for c in &conclusions {
            match c {
                Fact::Rank { obj, lo, hi } => {
                    self.ranks.insert(*obj, (*lo, *hi));
                }
                Fact::Torsion { obj, term } => {
                    if let Term::Var(v) = term {
                        self.used.insert(v.clone());
                    }
                    self.tors.insert(*obj, term.clone());
                }
                Fact::Constraint { var, info } => {
                    self.used.insert(var.clone());
                    self.vars.insert(var.clone(), info.clone());
                }
                Fact::Relation { ext } => self.relations.push(ext.clone()),
                _ => {}
            }
        }
        self.steps.push(Step { rule, premises, conclusions });
    }

    fn rank(&self, o: Obj) -> Interval {
        self.ranks.get(&o).copied().unwrap_or((0, None))
    }

    fn rank_fact(&self, o: Obj) -> Option<Fact> {
        self.ranks.get(&o).map(|(lo, hi)| Fact::rank(o, *lo, *hi))
    }

    fn tor_fact(&self, o: Obj) -> Option<Fact> {
        self.tors.get(&o).map(|t| Fact::torsion(o, t.clone()))
    }

    fn is_zero_obj(&self, o: Obj) -> bool {
        self.rank(o) == (0, Some(0)) && self.tors.get(&o).is_some_and(Term::is_known_zero)
    }

    fn constraint_fact(&self, v: &str) -> Option<Fact> {
        self.vars.get(v).map(|i| Fact::Constraint { var: v.to_string(), info: i.clone() })
    }

    fn fresh_name(&mut self, o: Obj) -> String {
        let base = match o {
            Obj::Ker(k) => Some(format!("ker{k}")),
            Obj::Im(h) => Some(format!("im{h}")),
            _ => None,
        };
        let mut name = match base {
            Some(b) => b,
            None => NAME_POOL
                .iter()
                .map(|s| s.to_string())
                .find(|s| !self.used.contains(s))
                .unwrap_or_else(|| {
                    (1..).map(|i| format!("T{i}")).find(|s| !self.used.contains(s)).expect("unbounded")
                }),
        };
        while self.used.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        name
    }
}

fn ses_fact(s: [Obj; 3]) -> Fact {
    Fact::Ses { sub: s[0], mid: s[1], quot: s[2] }
}

/// Facts read off the puzzle: sequences, known ranks and torsion, input
/// constraints and relations, rank bounds and the prime axiom.
pub fn given_facts(n: &TrianglePuzzle) -> Vec<Fact> {
    let lay = Layout { m: n.modulus, d: n.degrees };
    let mut out: Vec<Fact> = lay.sess().into_iter().map(ses_fact).collect();
    let y = n.slots[1].family().expect("normalized");
    let z = n.slots[2].family().expect("normalized");
    for (fam, mk) in [(y, Obj::Y as fn(u32) -> Obj), (z, Obj::Z as fn(u32) -> Obj)] {
        for g in 0..n.modulus {
            let c = fam.component(g as i64);
            out.push(Fact::rank(mk(g), c.rank, Some(c.rank)));
            out.push(Fact::torsion(mk(g), c.torsion));
        }
    }
    let mut vars: BTreeMap<String, VarInfo> = BTreeMap::new();
    let mut rels: Vec<Ext> = Vec::new();
    for fam in [y, z] {
        for v in fam.var_names() {
            vars.entry(v.clone()).or_insert_with(|| fam.info(&v));
        }
        for r in &fam.relations {
            if !rels.contains(r) {
                rels.push(r.clone());
            }
        }
    }
    for (var, info) in vars {
        out.push(Fact::Constraint { var, info });
    }
    for ext in rels {
        out.push(Fact::Relation { ext });
    }
    for g in 0..n.modulus {
        let (lo, hi) = n.rank_bound(g);
        if lo > 0 || hi.is_some() {
            out.push(Fact::rank(Obj::X(g), lo, hi));
        }
    }
    if let Some(p) = &n.allowed_primes {
        out.push(Fact::AllowedPrimes { primes: p.clone() });
    }
    out
}

/// Runs the rules. Every surviving branch becomes a solution family with
/// its trace; dead branches are reported with the rule that killed them.
pub fn apply_rules(puzzle: &TrianglePuzzle) -> Result<Deduction> {
    let n = puzzle.normalized()?;
    let schema = split_les(&n)?;
    let lay = Layout { m: n.modulus, d: n.degrees };
    let mut st = State {
        steps: Vec::new(),
        ranks: BTreeMap::new(),
        tors: BTreeMap::new(),
        vars: BTreeMap::new(),
        relations: Vec::new(),
        used: BTreeSet::new(),
        allowed: n.allowed_primes.clone(),
        lossy: false,
    };
    for f in [&n.slots[1], &n.slots[2]] {
        let fam = f.family().expect("normalized");
        st.used.extend(fam.var_names());
        st.lossy |= !fam.exact;
    }
    st.push(Rule::Given, Vec::new(), given_facts(&n));

    let mut solutions = Vec::new();
    let mut pruned = Vec::new();
    explore(&lay, st, &mut solutions, &mut pruned)?;
    if solutions.is_empty() {
        let (rule, detail) = pruned
            .first()
            .map(|p: &Pruned| (p.rule.to_string(), p.detail.clone()))
            .unwrap_or_else(|| ("Given".into(), "no branch".into()));
        return Err(Error::Inconsistent { rule, detail });
    }
    Ok(Deduction { schema, solutions, pruned })
}

fn explore(lay: &Layout, mut st: State, sols: &mut Vec<Solution>, pruned: &mut Vec<Pruned>) -> Result<()> {
    if let Err(Conflict(rule, detail)) = propagate_ranks(lay, &mut st) {
        pruned.push(Pruned { rule, detail, trace: Trace { steps: st.steps } });
        return Ok(());
    }
    let open = lay
        .intro_order()
        .into_iter()
        .filter(|o| matches!(o, Obj::Im(_)))
        .chain(lay.intro_order())
        .find(|o| {
            let (lo, hi) = st.rank(*o);
            hi != Some(lo)
        });
    if let Some(o) = open {
        let (lo, hi) = st.rank(o);
        let hi = hi.ok_or_else(|| Error::Puzzle(format!("rank of {o} is unbounded")))?;
        for r in lo..=hi {
            let mut b = st.clone();
            let prem = vec![b.rank_fact(o).expect("bounded")];
            b.push(Rule::Case, prem, vec![Fact::rank(o, r, Some(r))]);
            explore(lay, b, sols, pruned)?;
        }
        return Ok(());
    }
    match torsion_phase(lay, &mut st).and_then(|_| constraint_phase(lay, &mut st)) {
        Ok(()) => {
            let family = assemble(lay, &st);
            sols.push(Solution { family, trace: Trace { steps: st.steps } });
        }
        Err(Conflict(rule, detail)) => pruned.push(Pruned { rule, detail, trace: Trace { steps: st.steps } }),
    }
    Ok(())
}

fn propagate_ranks(lay: &Layout, st: &mut State) -> std::result::Result<(), Conflict> {
    loop {
        let mut changed = false;
        for s in lay.sess() {
            for pos in 0..3 {
                let r = s.map(|o| st.rank(o));
                let derived = additivity(r, pos);
                let Some(next) = meet(r[pos], derived) else {
                    return Err(Conflict(
                        Rule::RankAdditivity,
                        format!("no rank for {} fits 0 -> {} -> {} -> {} -> 0", s[pos], s[0], s[1], s[2]),
                    ));
                };
                if next == r[pos] && st.ranks.contains_key(&s[pos]) {
                    continue;
                }
                if next == (0, None) {
                    continue;
                }
                let mut prem = vec![ses_fact(s)];
                prem.extend(s.iter().filter_map(|o| st.rank_fact(*o)));
                let exact = (0..3).filter(|&i| i != pos).all(|i| r[i].1 == Some(r[i].0));
                let rule = if exact { Rule::RankAdditivity } else { Rule::GradingRankBound };
                st.push(rule, prem, vec![Fact::rank(s[pos], next.0, next.1)]);
                changed = true;
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Tries to pin the torsion of `s[pos]`. Returns whether a step was taken.
fn torsion_rule(st: &mut State, s: [Obj; 3], pos: usize) -> bool {
    let [a, b, c] = s;
    let t = |st: &State, o: Obj| st.tors.get(&o).cloned();
    let ses = ses_fact(s);
    let target = s[pos];

    if pos == 0 && t(st, b).is_some_and(|x| x.is_known_zero()) {
        let prem = vec![ses, st.tor_fact(b).expect("known")];
        st.push(Rule::FreeKernel, prem, vec![Fact::torsion(a, Term::zero())]);
        return true;
    }
    for z in [a, c] {
        if z == target || !st.is_zero_obj(z) {
            continue;
        }
        let other = *s.iter().find(|o| **o != z && **o != target).expect("three");
        if let Some(term) = t(st, other) {
            let prem = vec![ses, st.rank_fact(z).expect("zero"), st.tor_fact(z).expect("zero"), st.tor_fact(other).expect("known")];
            st.push(Rule::ZeroCorner, prem, vec![Fact::torsion(target, term)]);
            return true;
        }
    }
    if pos < 2 && t(st, c).is_some_and(|x| x.is_known_zero()) {
        let src = if pos == 0 { b } else { a };
        if let Some(term) = t(st, src) {
            let split = Fact::Splits { obj: b };
            if !st.steps.iter().any(|x| x.conclusions.contains(&split)) {
                let prem = vec![ses.clone(), st.tor_fact(c).expect("known")];
                st.push(Rule::SplitOnFreeQuotient, prem, vec![split.clone()]);
            }
            let prem = vec![ses, split, st.tor_fact(c).expect("known"), st.tor_fact(src).expect("known")];
            st.push(Rule::TorsionTransfer, prem, vec![Fact::torsion(target, term)]);
            return true;
        }
    }
    if st.rank(a) == (0, Some(0)) {
        let others: Vec<Option<Term>> = (0..3).map(|i| if i == pos { None } else { t(st, s[i]) }).collect();
        if (0..3).all(|i| i == pos || others[i].is_some()) {
            let mut prem = vec![ses, st.rank_fact(a).expect("finite")];
            prem.extend((0..3).filter(|&i| i != pos).map(|i| st.tor_fact(s[i]).expect("known")));
            let known: Vec<Option<_>> = others.iter().map(|x| x.as_ref().and_then(|x| x.known().cloned())).collect();
            if (0..3).all(|i| i == pos || known[i].is_some()) {
                let fill = ext_fill(known[0].as_ref(), known[1].as_ref(), known[2].as_ref());
                if let [g] = fill.as_slice() {
                    st.push(Rule::ExtensionOrder, prem, vec![Fact::torsion(target, Term::Known(g.clone()))]);
                    return true;
                }
            }
            let v = st.fresh_name(target);
            let mut terms: Vec<Term> = others.into_iter().map(|x| x.unwrap_or_else(|| Term::Var(v.clone()))).collect();
            let quot = terms.pop().expect("three");
            let mid = terms.pop().expect("three");
            let sub = terms.pop().expect("three");
            let ext = Ext { sub, mid, quot };
            st.push(
                Rule::ExtensionOrder,
                prem,
                vec![Fact::torsion(target, Term::Var(v)), Fact::Relation { ext }],
            );
            return true;
        }
    }
    if pos == 2 && t(st, a).is_some_and(|x| x.is_known_zero()) {
        if let Some(Term::Known(tb)) = t(st, b) {
            if !tb.is_zero() {
                let prem = vec![ses, st.tor_fact(a).expect("known"), st.tor_fact(b).expect("known")];
                let v = st.fresh_name(target);
                let info = VarInfo { nonzero: true, contains: Some(tb), ..Default::default() };
                st.push(
                    Rule::NonSplitDetect,
                    prem,
                    vec![Fact::torsion(target, Term::Var(v.clone())), Fact::Constraint { var: v, info }],
                );
                // the unknown may carry torsion beyond what is forced
                st.lossy = true;
                return true;
            }
        }
    }
    false
}

fn torsion_phase(lay: &Layout, st: &mut State) -> std::result::Result<(), Conflict> {
    let sess = lay.sess();
    loop {
        let mut changed = false;
        for s in &sess {
            for pos in 0..3 {
                if !st.tors.contains_key(&s[pos]) && torsion_rule(st, *s, pos) {
                    changed = true;
                }
            }
        }
        if changed {
            continue;
        }
        let Some(o) = lay.intro_order().into_iter().find(|o| !st.tors.contains_key(o)) else { break };
        let finite = sess.iter().filter(|s| s.contains(&o)).all(|s| s.iter().all(|x| st.rank(*x) == (0, Some(0))));
        if !finite {
            st.lossy = true;
        }
        let v = st.fresh_name(o);
        st.push(Rule::Introduce, Vec::new(), vec![Fact::torsion(o, Term::Var(v))]);
    }
    for s in &sess {
        let ts: Vec<Option<&crate::abgroup::FgAbelianGroup>> = s.iter().map(|o| st.tors[o].known()).collect();
        if let [Some(a), Some(b), Some(c)] = ts.as_slice() {
            if let Some((rule, detail)) = ses_conflict(s.map(|o| st.rank(o)), [a, b, c]) {
                return Err(Conflict(rule, format!("{}: {detail}", ses_fact(*s))));
            }
        }
    }
    Ok(())
}

fn set_info(st: &mut State, rule: Rule, prem: Vec<Fact>, var: &str, info: VarInfo) -> std::result::Result<(), Conflict> {
    let unsat = info.is_unsatisfiable();
    st.push(rule, prem, vec![Fact::Constraint { var: var.to_string(), info }]);
    if unsat {
        return Err(Conflict(rule, format!("no finite group satisfies the constraints on {var}")));
    }
    Ok(())
}

fn constraint_phase(lay: &Layout, st: &mut State) -> std::result::Result<(), Conflict> {
    for s in lay.sess() {
        let b = s[1];
        let (Some((r, Some(r2))), Some(Term::Known(tb))) = (st.ranks.get(&b).copied(), st.tors.get(&b).cloned()) else {
            continue;
        };
        if r != r2 {
            continue;
        }
        for (pos, end) in [(0, s[0]), (2, s[2])] {
            let Some(Term::Var(v)) = st.tors.get(&end).cloned() else { continue };
            let old = st.vars.get(&v).cloned().unwrap_or_default();
            let mut info = old.clone();
            if pos == 0 {
                bound_sub(&mut info, &tb);
            } else {
                bound_quot(&mut info, &tb, r);
            }
            if info == old {
                continue;
            }
            let mut prem = vec![ses_fact(s), st.rank_fact(b).expect("known"), st.tor_fact(b).expect("known")];
            prem.push(st.tor_fact(end).expect("known"));
            prem.extend(st.constraint_fact(&v));
            set_info(st, Rule::GeneratorBound, prem, &v, info)?;
        }
    }
    if let Some(allowed) = st.allowed.clone() {
        for g in 0..lay.m {
            match st.tors.get(&Obj::X(g)).cloned() {
                Some(Term::Known(t)) => {
                    if let Some(p) = t.torsion_primes().into_iter().find(|p| !allowed.contains(p)) {
                        return Err(Conflict(Rule::PrimeRestriction, format!("Tor X_({g}) = {t} has {p}-torsion")));
                    }
                }
                Some(Term::Var(v)) => {
                    let old = st.vars.get(&v).cloned().unwrap_or_default();
                    let mut info = old.clone();
                    info.restrict_primes(&allowed);
                    if info == old {
                        continue;
                    }
                    let mut prem = vec![Fact::AllowedPrimes { primes: allowed.clone() }, st.tor_fact(Obj::X(g)).expect("known")];
                    prem.extend(st.constraint_fact(&v));
                    set_info(st, Rule::PrimeRestriction, prem, &v, info)?;
                }
                None => {}
            }
        }
    }
    loop {
        let mut changed = false;
        for e in st.relations.clone() {
            let upd = propagate_ext(&e, &st.vars);
            for (v, info) in upd {
                let mut prem = vec![Fact::Relation { ext: e.clone() }];
                for t in e.terms() {
                    if let Some(f) = t.var().and_then(|x| st.constraint_fact(x)) {
                        prem.push(f);
                    }
                }
                set_info(st, Rule::ExtensionOrder, prem, &v, info)?;
                changed = true;
            }
            // a known member must satisfy what its neighbours force
            for t in e.terms() {
                if let Term::Known(g) = t {
                    let need = propagate_ext(&relabel(&e, t), &st.vars);
                    if let Some(i) = need.get(PROBE) {
                        if !i.admits(g) {
                            return Err(Conflict(Rule::ExtensionOrder, format!("{g} cannot sit in {e}")));
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(())
}

const PROBE: &str = "\u{0}probe";

/// The relation with the known term `t` replaced by an unconstrained probe.
fn relabel(e: &Ext, t: &Term) -> Ext {
    let sw = |x: &Term| if x == t { Term::Var(PROBE.into()) } else { x.clone() };
    Ext { sub: sw(&e.sub), mid: sw(&e.mid), quot: sw(&e.quot) }
}

fn assemble(lay: &Layout, st: &State) -> Family {
    let mut components = BTreeMap::new();
    let mut reach: BTreeSet<String> = BTreeSet::new();
    for g in 0..lay.m {
        let rank = st.rank(Obj::X(g)).0;
        let torsion = st.tors.get(&Obj::X(g)).cloned().unwrap_or_else(Term::zero);
        if let Term::Var(v) = &torsion {
            reach.insert(v.clone());
        }
        components.insert(g, Component { rank, torsion });
    }
    let mut rels: Vec<Ext> = Vec::new();
    loop {
        let before = (reach.len(), rels.len());
        for e in &st.relations {
            if rels.contains(e) {
                continue;
            }
            if e.terms().iter().any(|t| t.var().is_some_and(|v| reach.contains(v))) {
                rels.push(e.clone());
                reach.extend(e.terms().iter().filter_map(|t| t.var().map(String::from)));
            }
        }
        if (reach.len(), rels.len()) == before {
            break;
        }
    }
    let vars = reach.iter().map(|v| (v.clone(), st.vars.get(v).cloned().unwrap_or_default())).collect();
    Family { modulus: lay.m, components, vars, relations: rels, exact: !st.lossy }
}

/// Re-checks every step of a trace against the puzzle: given facts must be
/// read off the puzzle, other premises must already be established, and
/// each conclusion must follow by its rule.
pub fn replay(puzzle: &TrianglePuzzle, trace: &Trace) -> Result<()> {
    let n = puzzle.normalized()?;
    let given = given_facts(&n);
    let mut known: Vec<Fact> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    for f in [&n.slots[1], &n.slots[2]] {
        names.extend(f.family().expect("normalized").var_names());
    }
    for (i, step) in trace.steps.iter().enumerate() {
        let fail = |msg: String| Error::RelationFailed { name: format!("step {} ({})", i + 1, step.rule), detail: msg };
        if step.rule == Rule::Given {
            if let Some(c) = step.conclusions.iter().find(|c| !given.contains(c)) {
                return Err(fail(format!("{c} is not part of the puzzle")));
            }
        } else if let Some(p) = step.premises.iter().find(|p| !known.contains(p)) {
            return Err(fail(format!("premise {p} not established")));
        }
        let fresh = |v: &str| !names.contains(v);
        check_step(step, &fresh).map_err(fail)?;
        for c in &step.conclusions {
            match c {
                Fact::Torsion { term: Term::Var(v), .. } => {
                    names.insert(v.clone());
                }
                Fact::Constraint { var, .. } => {
                    names.insert(var.clone());
                }
                _ => {}
            }
            known.push(c.clone());
        }
    }
    Ok(())
}

/// Every concrete member (free unknowns of order ≤ `free_order`) of every
/// solution family.
pub fn solution_set(
    d: &Deduction,
    free_order: u64,
    bound: u64,
) -> Result<BTreeSet<super::family::GradedKey>> {
    let mut out = BTreeSet::new();
    for s in &d.solutions {
        out.extend(s.family.members(free_order, bound)?);
    }
    Ok(out)
}
