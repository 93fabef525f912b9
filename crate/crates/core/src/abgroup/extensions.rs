//! Extensions 0 → H → G → K → 0 of finite abelian groups.
//!
//! G splits into p-primary parts, and a p-group of type λ has a subgroup of
//! type μ with quotient of type ν exactly when the Littlewood–Richardson
//! coefficient c^λ_{μν} is positive (Hall polynomial support). The search
//! runs over all partitions λ of the right size per prime.

use super::group::FgAbelianGroup;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::collections::BTreeMap;

pub const DEFAULT_EXTENSION_BOUND: u64 = 4096;

/// Partitions of n in descending part order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Whether c^λ_{μν} > 0.
pub fn lr_positive(lambda: &[u32], mu: &[u32], nu: &[u32]) -> bool {
    let size = |p: &[u32]| p.iter().sum::<u32>();
    if size(lambda) != size(mu) + size(nu) {
        return false;
    }
    let part = |p: &[u32], i: usize| p.get(i).copied().unwrap_or(0) as usize;
    if (0..mu.len()).any(|i| part(mu, i) > part(lambda, i)) {
        return false;
    }
    // cells of λ/μ in reading order: rows top to bottom, right to left
    let mut cells = Vec::new();
    for i in 0..lambda.len() {
        for j in (part(mu, i)..part(lambda, i)).rev() {
            cells.push((i, j));
        }
    }
    let mut filling: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut content = vec![0u32; nu.len()];
    fn search(
        k: usize,
        cells: &[(usize, usize)],
        mu: &[u32],
        nu: &[u32],
        filling: &mut BTreeMap<(usize, usize), usize>,
        content: &mut Vec<u32>,
    ) -> bool {
        if k == cells.len() {
            return true;
        }
        let (i, j) = cells[k];
        // row weakly increasing: value ≤ the entry to the right
        let hi = filling.get(&(i, j + 1)).copied().unwrap_or(usize::MAX);
        // column strictly increasing: value > the entry above (if skew cell)
        let above_in_skew = i > 0 && j >= mu.get(i - 1).copied().unwrap_or(0) as usize;
        let lo = if above_in_skew { filling[&(i - 1, j)] + 1 } else { 0 };
        for v in lo..nu.len() {
            if v > hi {
                break;
            }
            if content[v] >= nu[v] {
                continue;
            }
            if v > 0 && content[v] + 1 > content[v - 1] {
                continue;
            }
            content[v] += 1;
            filling.insert((i, j), v);
            if search(k + 1, cells, mu, nu, filling, content) {
                return true;
            }
            filling.remove(&(i, j));
            content[v] -= 1;
        }
        false
    }
    search(0, &cells, mu, nu, &mut filling, &mut content)
}

fn check_finite(g: &FgAbelianGroup) -> Result<BigInt> {
    g.order().ok_or(Error::NotFinite)
}

/// All G of order |H|·|K| with a subgroup ≅ H whose quotient is ≅ K.
pub fn enumerate_extensions(
    h: &FgAbelianGroup,
    k: &FgAbelianGroup,
    bound: u64,
) -> Result<Vec<FgAbelianGroup>> {
    let order = check_finite(h)? * check_finite(k)?;
    if order > BigInt::from(bound) {
        return Err(Error::BoundExceeded { order: order.to_string(), bound });
    }
    let hp = h.primary_parts();
    let kp = k.primary_parts();
    let mut primes: Vec<u64> = hp.keys().chain(kp.keys()).copied().collect();
    primes.sort_unstable();
    primes.dedup();

    let mut per_prime: Vec<(u64, Vec<Vec<u32>>)> = Vec::new();
    for p in primes {
        let mu = hp.get(&p).cloned().unwrap_or_default();
        let nu = kp.get(&p).cloned().unwrap_or_default();
        let n: u32 = mu.iter().sum::<u32>() + nu.iter().sum::<u32>();
        let lambdas: Vec<Vec<u32>> =
            partitions(n).into_iter().filter(|l| lr_positive(l, &mu, &nu)).collect();
        per_prime.push((p, lambdas));
    }

    let mut out = vec![BTreeMap::<u64, Vec<u32>>::new()];
    for (p, lambdas) in per_prime {
        let mut next = Vec::new();
        for partial in &out {
            for l in &lambdas {
                let mut m = partial.clone();
                m.insert(p, l.clone());
                next.push(m);
            }
        }
        out = next;
    }
    let mut groups: Vec<FgAbelianGroup> =
        out.iter().map(|parts| FgAbelianGroup::from_primary_parts(0, parts)).collect();
    groups.sort();
    groups.dedup();
    Ok(groups)
}

/// All abelian groups of order n.
pub fn groups_of_order(n: u64) -> Vec<FgAbelianGroup> {
    let mut out = vec![BTreeMap::<u64, Vec<u32>>::new()];
    for (p, e) in super::group::factorize(n) {
        let mut next = Vec::new();
        for partial in &out {
            for l in partitions(e) {
                let mut m = partial.clone();
                m.insert(p, l);
                next.push(m);
            }
        }
        out = next;
    }
    let mut groups: Vec<FgAbelianGroup> =
        out.iter().map(|parts| FgAbelianGroup::from_primary_parts(0, parts)).collect();
    groups.sort();
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> FgAbelianGroup {
        FgAbelianGroup::cyclic(n)
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn lr_small_cases() {
        // s_1 · s_1 = s_2 + s_11
        assert!(lr_positive(&[2], &[1], &[1]));
        assert!(lr_positive(&[1, 1], &[1], &[1]));
        // s_1 · s_1 does not contain s_3
        assert!(!lr_positive(&[3], &[1], &[1]));
        // c^{21}_{1,11} = 1, c^{21}_{1,2} = 1, c^{111}_{1,2} = 0
        assert!(lr_positive(&[2, 1], &[1], &[1, 1]));
        assert!(!lr_positive(&[1, 1, 1], &[1], &[2]));
    }

    #[test]
    fn examples() {
        let e = enumerate_extensions(&c(2), &c(2), DEFAULT_EXTENSION_BOUND).unwrap();
        assert_eq!(e, {
            let mut v = vec![c(4), c(2).direct_sum(&c(2))];
            v.sort();
            v
        });
        assert_eq!(
            enumerate_extensions(&c(2), &FgAbelianGroup::zero(), 4096).unwrap(),
            vec![c(2)]
        );
        assert_eq!(enumerate_extensions(&c(2), &c(3), 4096).unwrap(), vec![c(6)]);
    }

    #[test]
    fn bound_and_finiteness() {
        assert!(matches!(
            enumerate_extensions(&c(64), &c(128), 4096),
            Err(Error::BoundExceeded { .. })
        ));
        assert_eq!(
            enumerate_extensions(&FgAbelianGroup::free(1), &c(2), 4096),
            Err(Error::NotFinite)
        );
    }

    #[test]
    fn orders() {
        assert_eq!(groups_of_order(16).len(), 5);
        assert_eq!(groups_of_order(72).len(), 6);
        assert_eq!(groups_of_order(1), vec![FgAbelianGroup::zero()]);
    }
}
