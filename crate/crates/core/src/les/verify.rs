//! Independent checks of candidate solutions, with constructive map
//! witnesses for small concrete corners.

use super::family::{Family, Term};
use super::puzzle::TrianglePuzzle;
use super::solve::apply_rules;
use crate::abgroup::{enumerate_extensions, FgAbelianGroup, GradedGroup};
use crate::error::{Error, Result};
use crate::exactlin::{cokernel_presentation, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Search limits for [`verify_solution`].
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Orders tried for unknowns nothing pins down.
    pub free_order: u64,
    pub extension_bound: u64,
    /// Matrices tried per grading when looking for map witnesses; 0 skips
    /// the search.
    pub map_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { free_order: 16, extension_bound: crate::abgroup::DEFAULT_EXTENSION_BOUND, map_budget: 20_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MapWitness {
    /// Y-grading of the source; the target is Z in grading source + deg f₁.
    pub source_grade: u32,
    pub matrix: Vec<Vec<i64>>,
    pub kernel: FgAbelianGroup,
    pub cokernel: FgAbelianGroup,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub assignment: BTreeMap<String, FgAbelianGroup>,
    /// Each entry is (sub, middle, quotient) of a realized extension.
    pub extensions: Vec<[FgAbelianGroup; 3]>,
    /// `None` when the corners are not concrete or nothing was found
    /// within budget.
    pub maps: Option<Vec<MapWitness>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Whether `candidate` can be the unknown corner: some solution family
/// admits it with every relation realized by an extension. `given` pins
/// values of named unknowns.
pub fn verify_solution(
    puzzle: &TrianglePuzzle,
    candidate: &GradedGroup,
    given: &BTreeMap<String, FgAbelianGroup>,
    opts: VerifyOptions,
) -> Result<Verification> {
    if candidate.modulus() != puzzle.modulus {
        return Err(Error::ModulusMismatch(candidate.modulus(), puzzle.modulus));
    }
    let d = apply_rules(puzzle)?;
    let mut reasons = Vec::new();
    for sol in &d.solutions {
        match sol.family.admits(candidate, given, opts.free_order, opts.extension_bound)? {
            Some(a) => {
                let n = puzzle.normalized()?;
                let maps = if opts.map_budget > 0 {
                    concrete_corners(&n, &a.values)
                        .and_then(|(y, z)| find_maps(&n, &y, &z, candidate, opts.map_budget))
                } else {
                    None
                };
                return Ok(Verification {
                    ok: true,
                    reason: None,
                    witness: Some(Witness { assignment: a.values, extensions: a.extensions, maps }),
                });
            }
            None => reasons.push(explain(&sol.family, candidate, given)),
        }
    }
    Ok(Verification { ok: false, reason: Some(reasons.join("; ")), witness: None })
}

fn explain(f: &Family, x: &GradedGroup, given: &BTreeMap<String, FgAbelianGroup>) -> String {
    for g in 0..f.modulus {
        let c = f.component(g as i64);
        let xc = x.component(g as i64);
        if c.rank != xc.rank() {
            return format!("rank in grading {g} is {}, expected {}", xc.rank(), c.rank);
        }
        if let Term::Var(v) = &c.torsion {
            let t = given.get(v).cloned().unwrap_or_else(|| xc.torsion_part());
            let info = f.info(v);
            if !info.admits(&t) {
                return format!("{v} = {t} violates its constraints");
            }
        } else if c.torsion.known() != Some(&xc.torsion_part()) {
            return format!("torsion in grading {g} must be {}", c.torsion);
        }
    }
    format!("no extensions realize {f}")
}

fn concrete_corners(
    n: &TrianglePuzzle,
    vals: &BTreeMap<String, FgAbelianGroup>,
) -> Option<(GradedGroup, GradedGroup)> {
    let y = n.slots[1].family()?.instantiate(vals).ok()?;
    let z = n.slots[2].family()?.instantiate(vals).ok()?;
    Some((y, z))
}

/// A presentation ℤ^gens / diag(torsion) on the trailing generators.
struct Pres {
    rank: usize,
    orders: Vec<BigInt>,
}

impl Pres {
    fn of(g: &FgAbelianGroup) -> Self {
        Pres { rank: g.rank(), orders: g.torsion().to_vec() }
    }

    fn gens(&self) -> usize {
        self.rank + self.orders.len()
    }

    /// gens × #torsion, column i is order_i · e_{rank+i}.
    fn relations(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.gens(), self.orders.len());
        for (i, d) in self.orders.iter().enumerate() {
            m.set(self.rank + i, i, d.clone());
        }
        m
    }
}

/// First `k` rows of the columns of `m`.
fn top_rows(m: &IntMatrix, k: usize) -> IntMatrix {
    m.submatrix(0, k, 0, m.cols())
}

/// Kernel and cokernel of the hom `y → z` whose columns are images of
/// generators. The matrix must define a hom.
pub fn hom_ker_coker(y: &FgAbelianGroup, z: &FgAbelianGroup, m: &IntMatrix) -> Result<(FgAbelianGroup, FgAbelianGroup)> {
    let (py, pz) = (Pres::of(y), Pres::of(z));
    if m.shape() != (pz.gens(), py.gens()) {
        return Err(Error::Shape(format!("hom matrix is {:?}, expected {:?}", m.shape(), (pz.gens(), py.gens()))));
    }
    let rz = pz.relations();
    let coker = cokernel_presentation(&m.transpose().vstack(&rz.transpose())?);
    if py.gens() == 0 {
        return Ok((FgAbelianGroup::zero(), coker));
    }
    // x with m·x ∈ image(rz)
    let a = m.hstack(&rz)?;
    let p = top_rows(&smith_normal_form(&a).kernel_basis(), py.gens());
    if p.cols() == 0 {
        return Ok((FgAbelianGroup::zero(), coker));
    }
    // ker ≅ ℤ^k / {c : p·c ∈ image(ry)}
    let b = p.hstack(&py.relations())?;
    let q = top_rows(&smith_normal_form(&b).kernel_basis(), p.cols());
    let ker = if q.cols() == 0 {
        FgAbelianGroup::free(p.cols())
    } else {
        cokernel_presentation(&q.transpose())
    };
    Ok((ker, coker))
}

/// Allowed values for entry (i, j) of a hom matrix y → z, smallest first.
fn entry_values(py: &Pres, pz: &Pres, i: usize, j: usize) -> Vec<i64> {
    let src_order = (j >= py.rank).then(|| py.orders[j - py.rank].clone());
    if i < pz.rank {
        return match src_order {
            Some(_) => vec![0],
            None => vec![0, 1, -1, 2, -2, 3, -3, 4, -4],
        };
    }
    let e = pz.orders[i - pz.rank].to_i64().unwrap_or(i64::MAX);
    let step = match &src_order {
        Some(d) => (e / BigInt::from(e).gcd(d).to_i64().unwrap_or(1)).max(1),
        None => 1,
    };
    (0..e.min(5)).map(|k| k * step).filter(|v| *v < e).collect()
}

/// Kernel/cokernel pairs reachable by matrices in the search order:
/// sparse matrices first (each column at most one nonzero entry), then
/// the full box until the budget runs out.
fn reachable_pairs(
    y: &FgAbelianGroup,
    z: &FgAbelianGroup,
    budget: usize,
) -> Vec<(FgAbelianGroup, FgAbelianGroup, Vec<Vec<i64>>)> {
    let (py, pz) = (Pres::of(y), Pres::of(z));
    let (r, c) = (pz.gens(), py.gens());
    let vals: Vec<Vec<Vec<i64>>> = (0..r).map(|i| (0..c).map(|j| entry_values(&py, &pz, i, j)).collect()).collect();
    let mut seen: BTreeSet<(FgAbelianGroup, FgAbelianGroup)> = BTreeSet::new();
    let mut out = Vec::new();
    let mut tried = 0usize;
    let mut visit = |data: Vec<i64>, out: &mut Vec<_>| {
        let rows: Vec<Vec<i64>> = (0..r).map(|i| data[i * c..(i + 1) * c].to_vec()).collect();
        let m = if r == 0 || c == 0 { IntMatrix::zeros(r, c) } else { IntMatrix::from_i64(&rows) };
        if let Ok((k, q)) = hom_ker_coker(y, z, &m) {
            if seen.insert((k.clone(), q.clone())) {
                out.push((k, q, rows));
            }
        }
    };
    // sparse phase: column j goes to row choice[j] (or nowhere)
    let mut choice = vec![0usize; c];
    loop {
        let mut data = vec![0i64; r * c];
        let mut ok = true;
        let mut used = vec![false; r];
        for j in 0..c {
            if choice[j] > 0 {
                let i = choice[j] - 1;
                if used[i] {
                    ok = false;
                }
                used[i] = true;
                let v = vals[i][j].iter().copied().find(|v| *v != 0);
                match v {
                    Some(v) => data[i * c + j] = v,
                    None => ok = false,
                }
            }
        }
        if ok {
            tried += 1;
            visit(data, &mut out);
        }
        if !advance(&mut choice, r + 1) || tried >= budget {
            break;
        }
    }
    // full phase over the value box
    let sizes: Vec<usize> = (0..r * c).map(|k| vals[k / c.max(1)][k % c.max(1)].len()).collect();
    let mut idx = vec![0usize; r * c];
    while tried < budget {
        let data: Vec<i64> = (0..r * c).map(|k| vals[k / c][k % c][idx[k]]).collect();
        tried += 1;
        visit(data, &mut out);
        if !advance_mixed(&mut idx, &sizes) {
            break;
        }
    }
    out
}

fn advance(v: &mut [usize], base: usize) -> bool {
    for x in v.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

fn advance_mixed(v: &mut [usize], sizes: &[usize]) -> bool {
    for (x, s) in v.iter_mut().zip(sizes) {
        *x += 1;
        if *x < *s {
            return true;
        }
        *x = 0;
    }
    false
}

/// Whether some SES 0 → c → x → k → 0 exists, when that is decidable from
/// the two easy cases (k free or c finite). `None` otherwise.
pub fn ses_exists(c: &FgAbelianGroup, x: &FgAbelianGroup, k: &FgAbelianGroup, bound: u64) -> Option<bool> {
    if x.rank() != c.rank() + k.rank() {
        return Some(false);
    }
    if k.is_free() {
        return Some(*x == c.direct_sum(k));
    }
    if c.is_finite() {
        let ext = enumerate_extensions(c, &k.torsion_part(), bound).ok()?;
        return Some(ext.contains(&x.torsion_part()));
    }
    None
}

fn find_maps(n: &TrianglePuzzle, y: &GradedGroup, z: &GradedGroup, x: &GradedGroup, budget: usize) -> Option<Vec<MapWitness>> {
    let m = n.modulus as i64;
    let [dpsi, d1, d2] = n.degrees;
    let per: Vec<_> = (0..m)
        .map(|k| reachable_pairs(&y.component(k), &z.component(k + d1), budget))
        .collect();
    // pick one pair per grading; X_g needs coker at g − d₂ and ker at g + dψ
    let mut pick = vec![0usize; m as usize];
    let sizes: Vec<usize> = per.iter().map(Vec::len).collect();
    if sizes.contains(&0) {
        return None;
    }
    loop {
        let ker = |g: i64| &per[(g.rem_euclid(m)) as usize][pick[(g.rem_euclid(m)) as usize]].0;
        let coker = |h: i64| {
            let k = (h - d1).rem_euclid(m) as usize;
            &per[k][pick[k]].1
        };
        let good = (0..m).all(|g| {
            ses_exists(coker(g - d2), &x.component(g), ker(g + dpsi), crate::abgroup::DEFAULT_EXTENSION_BOUND)
                == Some(true)
        });
        if good {
            return Some(
                (0..m as usize)
                    .map(|k| {
                        let (kk, cc, mat) = &per[k][pick[k]];
                        MapWitness { source_grade: k as u32, matrix: mat.clone(), kernel: kk.clone(), cokernel: cc.clone() }
                    })
                    .collect(),
            );
        }
        if !advance_mixed(&mut pick, &sizes) {
            return None;
        }
    }
}
