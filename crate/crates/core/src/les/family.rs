//! Symbolic graded groups: each component is ℤ^rank ⊕ T with T a known
//! finite group or a named unknown finite group, plus constraints on the
//! unknowns and short exact sequences relating them.

use crate::abgroup::{enumerate_extensions, groups_of_order, FgAbelianGroup, GradedGroup};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Known(FgAbelianGroup),
    Var(String),
}

impl Term {
    pub fn zero() -> Self {
        Term::Known(FgAbelianGroup::zero())
    }

    pub fn is_known_zero(&self) -> bool {
        matches!(self, Term::Known(g) if g.is_zero())
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Known(_) => None,
        }
    }

    pub fn known(&self) -> Option<&FgAbelianGroup> {
        match self {
            Term::Known(g) => Some(g),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Known(g) => write!(f, "{g}"),
            Term::Var(v) => write!(f, "{v}"),
        }
    }
}

/// Constraints on an unknown finite abelian group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarInfo {
    #[serde(default)]
    pub nonzero: bool,
    /// Every prime dividing the order lies in this set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<BTreeSet<u64>>,
    /// A subgroup the unknown is known to contain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains: Option<FgAbelianGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_gens: Option<usize>,
}

impl VarInfo {
    pub fn admits(&self, g: &FgAbelianGroup) -> bool {
        if !g.is_finite() {
            return false;
        }
        if self.nonzero && g.is_zero() {
            return false;
        }
        if let Some(p) = &self.primes {
            if g.torsion_primes().iter().any(|q| !p.contains(q)) {
                return false;
            }
        }
        if let Some(h) = &self.contains {
            if !embeds(h, g) {
                return false;
            }
        }
        if let Some(n) = self.max_gens {
            if g.torsion().len() > n {
                return false;
            }
        }
        true
    }

    /// No finite group satisfies the constraints.
    pub fn is_unsatisfiable(&self) -> bool {
        let Some(p) = &self.primes else { return false };
        if self.nonzero && p.is_empty() {
            return true;
        }
        if let Some(h) = &self.contains {
            if h.torsion_primes().iter().any(|q| !p.contains(q)) {
                return true;
            }
        }
        self.max_gens == Some(0) && self.nonzero
    }

    pub fn restrict_primes(&mut self, allowed: &BTreeSet<u64>) -> bool {
        let next: BTreeSet<u64> = match &self.primes {
            Some(p) => p.intersection(allowed).copied().collect(),
            None => allowed.clone(),
        };
        let changed = self.primes.as_ref() != Some(&next);
        self.primes = Some(next);
        changed
    }
}

/// Whether the finite group `h` is isomorphic to a subgroup of `g`: for
/// every prime the sorted exponents of h are dominated entrywise.
pub fn embeds(h: &FgAbelianGroup, g: &FgAbelianGroup) -> bool {
    if h.rank() > g.rank() {
        return false;
    }
    let hp = h.primary_parts();
    let gp = g.primary_parts();
    hp.iter().all(|(p, lam)| {
        let mu = gp.get(p).cloned().unwrap_or_default();
        lam.len() <= mu.len() && lam.iter().zip(mu.iter()).all(|(a, b)| a <= b)
    })
}

/// 0 → sub → mid → quot → 0 among finite groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ext {
    pub sub: Term,
    pub mid: Term,
    pub quot: Term,
}

impl Ext {
    pub fn terms(&self) -> [&Term; 3] {
        [&self.sub, &self.mid, &self.quot]
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0 -> {} -> {} -> {} -> 0", self.sub, self.mid, self.quot)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub rank: usize,
    pub torsion: Term,
}

impl Component {
    pub fn zero() -> Self {
        Component { rank: 0, torsion: Term::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_known_zero()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        if !self.torsion.is_known_zero() {
            parts.push(self.torsion.to_string());
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Three-valued answer for predicates on families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Yes,
    No,
    Unknown,
}

impl Truth {
    fn not(self) -> Truth {
        match self {
            Truth::Yes => Truth::No,
            Truth::No => Truth::Yes,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

/// Symbolic graded group. `exact` is false when the rules had to forget
/// information (the family then over-approximates the solutions).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub modulus: u32,
    pub components: BTreeMap<u32, Component>,
    #[serde(default)]
    pub vars: BTreeMap<String, VarInfo>,
    #[serde(default)]
    pub relations: Vec<Ext>,
    #[serde(default = "yes")]
    pub exact: bool,
}

fn yes() -> bool {
    true
}

impl Family {
    pub fn concrete(g: &GradedGroup) -> Self {
        let m = g.modulus();
        let components = (0..m)
            .map(|k| {
                let c = g.component(k as i64);
                (k, Component { rank: c.rank(), torsion: Term::Known(c.torsion_part()) })
            })
            .collect();
        Family { modulus: m, components, vars: BTreeMap::new(), relations: Vec::new(), exact: true }
    }

    pub fn component(&self, g: i64) -> Component {
        let k = g.rem_euclid(self.modulus as i64) as u32;
        self.components.get(&k).cloned().unwrap_or_else(Component::zero)
    }

    pub fn is_concrete(&self) -> bool {
        self.components.values().all(|c| c.torsion.var().is_none())
    }

    pub fn var_names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.vars.keys().cloned().collect();
        for c in self.components.values() {
            if let Term::Var(v) = &c.torsion {
                out.insert(v.clone());
            }
        }
        for r in &self.relations {
            for t in r.terms() {
                if let Term::Var(v) = t {
                    out.insert(v.clone());
                }
            }
        }
        out
    }

    pub fn info(&self, v: &str) -> VarInfo {
        self.vars.get(v).cloned().unwrap_or_default()
    }

    /// The graded group obtained by substituting every unknown.
    pub fn instantiate(&self, assignment: &BTreeMap<String, FgAbelianGroup>) -> Result<GradedGroup> {
        let mut out = GradedGroup::new(self.modulus)?;
        for (g, c) in &self.components {
            let t = resolve(&c.torsion, assignment)
                .ok_or_else(|| Error::Puzzle(format!("no value for {}", c.torsion)))?;
            out.add_component(*g as i64, FgAbelianGroup::free(c.rank).direct_sum(&t));
        }
        Ok(out)
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        if self.modulus != 2 {
            return Err(Error::WrongModulus { expected: 2, got: self.modulus });
        }
        Ok(self.component(0).rank as i64 - self.component(1).rank as i64)
    }

    /// Whether some component has p-torsion.
    pub fn has_p_torsion(&self, p: u64) -> Truth {
        let mut acc = Truth::No;
        for c in self.components.values() {
            match self.term_has_p_torsion(&c.torsion, p, 0) {
                Truth::Yes => return Truth::Yes,
                Truth::Unknown => acc = Truth::Unknown,
                Truth::No => {}
            }
        }
        acc
    }

    fn term_has_p_torsion(&self, t: &Term, p: u64, depth: usize) -> Truth {
        let v = match t {
            Term::Known(g) => return if g.has_p_torsion(p) { Truth::Yes } else { Truth::No },
            Term::Var(v) => v,
        };
        let info = self.info(v);
        if let Some(ps) = &info.primes {
            if !ps.contains(&p) {
                return Truth::No;
            }
            if info.nonzero && ps.len() == 1 {
                return Truth::Yes;
            }
        }
        if info.contains.as_ref().is_some_and(|h| h.has_p_torsion(p)) {
            return Truth::Yes;
        }
        if depth < 8 {
            // the middle of an extension has p-torsion if either end does
            for r in &self.relations {
                if &r.mid == t {
                    for end in [&r.sub, &r.quot] {
                        if self.term_has_p_torsion(end, p, depth + 1) == Truth::Yes {
                            return Truth::Yes;
                        }
                    }
                }
            }
        }
        Truth::Unknown
    }

    /// dim_K = χ, with K = F_p for `Some(p)` and ℚ for `None`.
    pub fn is_l_space(&self, p: Option<u64>) -> Result<Truth> {
        self.euler_characteristic()?;
        if self.component(1).rank > 0 {
            return Ok(Truth::No);
        }
        Ok(match p {
            None => Truth::Yes,
            Some(p) => self.has_p_torsion(p).not(),
        })
    }

    /// Finds values for the unknowns that turn the family into `x`, with
    /// `given` fixing some of them. Unknowns not pinned by `x`, `given` or a
    /// relation range over groups of order ≤ `free_order`.
    pub fn admits(
        &self,
        x: &GradedGroup,
        given: &BTreeMap<String, FgAbelianGroup>,
        free_order: u64,
        bound: u64,
    ) -> Result<Option<Assignment>> {
        if x.modulus() != self.modulus {
            return Ok(None);
        }
        let mut fixed = given.clone();
        for k in 0..self.modulus {
            let c = self.component(k as i64);
            let xc = x.component(k as i64);
            if xc.rank() != c.rank {
                return Ok(None);
            }
            let t = xc.torsion_part();
            match &c.torsion {
                Term::Known(g) => {
                    if *g != t {
                        return Ok(None);
                    }
                }
                Term::Var(v) => match fixed.get(v) {
                    Some(prev) if *prev != t => return Ok(None),
                    _ => {
                        fixed.insert(v.clone(), t);
                    }
                },
            }
        }
        let mut sols = self.search(fixed, free_order, bound, 1)?;
        Ok(sols.pop())
    }

    /// Every assignment of the unknowns (orders of unpinned unknowns ≤
    /// `free_order`) satisfying all constraints and relations.
    pub fn assignments(&self, free_order: u64, bound: u64) -> Result<Vec<Assignment>> {
        self.search(BTreeMap::new(), free_order, bound, usize::MAX)
    }

    /// Concrete members of the family, deduplicated.
    pub fn members(&self, free_order: u64, bound: u64) -> Result<BTreeSet<GradedKey>> {
        let mut out = BTreeSet::new();
        for a in self.assignments(free_order, bound)? {
            out.insert(GradedKey::of(&self.instantiate(&a.values)?));
        }
        Ok(out)
    }

    fn search(
        &self,
        fixed: BTreeMap<String, FgAbelianGroup>,
        free_order: u64,
        bound: u64,
        limit: usize,
    ) -> Result<Vec<Assignment>> {
        let vars: Vec<String> = self.var_names().into_iter().collect();
        for (v, g) in &fixed {
            if vars.contains(v) && !self.info(v).admits(g) {
                return Ok(Vec::new());
            }
        }
        let mut out = Vec::new();
        let mut cur = fixed;
        self.backtrack(&vars, &mut cur, free_order, bound, limit, &mut out)?;
        Ok(out)
    }

    fn backtrack(
        &self,
        vars: &[String],
        cur: &mut BTreeMap<String, FgAbelianGroup>,
        free_order: u64,
        bound: u64,
        limit: usize,
        out: &mut Vec<Assignment>,
    ) -> Result<()> {
        if out.len() >= limit {
            return Ok(());
        }
        // relations with every term assigned must hold
        let mut checked = Vec::new();
        for r in &self.relations {
            let (Some(s), Some(m), Some(q)) = (resolve(&r.sub, cur), resolve(&r.mid, cur), resolve(&r.quot, cur))
            else {
                continue;
            };
            if !enumerate_extensions(&s, &q, bound)?.contains(&m) {
                return Ok(());
            }
            checked.push([s, m, q]);
        }
        let open: Vec<&String> = vars.iter().filter(|v| !cur.contains_key(*v)).collect();
        if open.is_empty() {
            out.push(Assignment { values: cur.clone(), extensions: checked });
            return Ok(());
        }
        // branch on the unknown with the fewest candidates
        // unknowns pinned by a relation go first; free ones range up to free_order
        let mut best: Option<(String, Vec<FgAbelianGroup>)> = None;
        for v in &open {
            if let Some(c) = self.candidates(v, cur, bound)? {
                if best.as_ref().is_none_or(|(_, b)| c.len() < b.len()) {
                    best = Some((v.to_string(), c));
                }
            }
        }
        let (v, cands) = best.unwrap_or_else(|| {
            (open[0].clone(), (1..=free_order).flat_map(groups_of_order).collect())
        });
        let info = self.info(&v);
        for g in cands {
            if !info.admits(&g) {
                continue;
            }
            cur.insert(v.clone(), g);
            self.backtrack(vars, cur, free_order, bound, limit, out)?;
            cur.remove(&v);
            if out.len() >= limit {
                break;
            }
        }
        Ok(())
    }

    fn candidates(
        &self,
        v: &str,
        cur: &BTreeMap<String, FgAbelianGroup>,
        bound: u64,
    ) -> Result<Option<Vec<FgAbelianGroup>>> {
        let me = Term::Var(v.to_string());
        let mut best: Option<Vec<FgAbelianGroup>> = None;
        let mut offer = |c: Vec<FgAbelianGroup>| {
            if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                best = Some(c);
            }
        };
        for r in &self.relations {
            let s = resolve(&r.sub, cur);
            let m = resolve(&r.mid, cur);
            let q = resolve(&r.quot, cur);
            if r.mid == me {
                if let (Some(s), Some(q)) = (&s, &q) {
                    offer(enumerate_extensions(s, q, bound)?);
                }
            } else if r.sub == me || r.quot == me {
                let other = if r.sub == me { &q } else { &s };
                if let Some(m) = &m {
                    let om = order_u64(m)?;
                    match other {
                        Some(o) => {
                            let oo = order_u64(o)?;
                            if om % oo != 0 {
                                offer(Vec::new());
                            } else {
                                offer(groups_of_order(om / oo));
                            }
                        }
                        None => offer(divisor_groups(om)),
                    }
                }
            }
        }
        Ok(best)
    }
}

fn order_u64(g: &FgAbelianGroup) -> Result<u64> {
    g.order().and_then(|o| o.to_u64()).ok_or(Error::NotFinite)
}

fn divisor_groups(n: u64) -> Vec<FgAbelianGroup> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).flat_map(groups_of_order).collect()
}

fn resolve(t: &Term, a: &BTreeMap<String, FgAbelianGroup>) -> Option<FgAbelianGroup> {
    match t {
        Term::Known(g) => Some(g.clone()),
        Term::Var(v) => a.get(v).cloned(),
    }
}

/// Values for the unknowns with the extensions that were checked.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assignment {
    pub values: BTreeMap<String, FgAbelianGroup>,
    pub extensions: Vec<[FgAbelianGroup; 3]>,
}

/// Hashable stand-in for a graded group (component per grade).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedKey(pub Vec<FgAbelianGroup>);

impl GradedKey {
    pub fn of(g: &GradedGroup) -> Self {
        GradedKey((0..g.modulus()).map(|k| g.component(k as i64)).collect())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .components
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| format!("({c})_({g})"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Family {
    /// Constraints in words, one per line.
    pub fn constraint_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (v, i) in &self.vars {
            let mut bits = vec!["finite".to_string()];
            if i.nonzero {
                bits.push("nonzero".into());
            }
            if let Some(p) = &i.primes {
                let ps: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                bits.push(if ps.len() == 1 {
                    format!("a {}-group", ps[0])
                } else {
                    format!("primes in {{{}}}", ps.join(", "))
                });
            }
            if let Some(h) = &i.contains {
                bits.push(format!("contains {h}"));
            }
            if let Some(n) = i.max_gens {
                bits.push(format!("at most {n} generators"));
            }
            out.push(format!("{v}: {}", bits.join(", ")));
        }
        for r in &self.relations {
            out.push(r.to_string());
        }
        out
    }

    /// Order of a known finite term, if any.
    pub fn known_order(t: &Term) -> Option<BigInt> {
        t.known().and_then(|g| g.order()).filter(|o| !o.is_zero())
    }
}
