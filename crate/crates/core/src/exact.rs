//! Exact solvers: exhaustive enumeration of all size-K committees, and the
//! polynomial case of constant OWA vectors.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{Instance, WinnerSet};
use crate::owa::classify;
use crate::scoring::Scorer;

/// Default cap on the number of enumerated committees.
pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `rank`-th (0-based) size-`k` subset of `0..m` in lexicographic order.
pub(crate) fn unrank_combination(m: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    while out.len() < k {
        let count = binomial(m - x - 1, k - out.len() - 1);
        if rank < count {
            out.push(x);
        } else {
            rank -= count;
        }
        x += 1;
    }
    out
}

/// Advances to the next subset in lexicographic order; false after the last.
pub(crate) fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn check_budget(inst: &Instance, budget: u128) -> Result<u128> {
    let required = binomial(inst.m(), inst.k());
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required)
}

pub fn brute_force(inst: &Instance, budget: u128) -> Result<WinnerSet> {
    brute_force_with(inst, budget, Exec::default())
}

/// Best committee by exhaustive search; among optimal committees the
/// lexicographically smallest one, independent of `exec`.
pub fn brute_force_with(inst: &Instance, budget: u128, exec: Exec) -> Result<WinnerSet> {
    let total = check_budget(inst, budget)?;
    let (m, k) = (inst.m(), inst.k());
    let scorer = Scorer::for_instance(inst);
    let chunks: u128 = if exec.is_parallel() { total.min(256) } else { 1 };
    let per_chunk = total.div_ceil(chunks);

    let bests = exec.map_range(chunks as usize, |c| {
        let start = c as u128 * per_chunk;
        let end = (start + per_chunk).min(total);
        if start >= end {
            return None;
        }
        let mut comb = unrank_combination(m, k, start);
        let mut buf = Vec::with_capacity(k);
        let mut best: Option<(i128, Vec<usize>)> = None;
        for _ in start..end {
            let v = scorer.total(&comb, &mut buf);
            if best.as_ref().map_or(true, |(b, _)| v > *b) {
                best = Some((v, comb.clone()));
            }
            next_combination(&mut comb, m);
        }
        best
    });
    // Chunks are in lexicographic order; only a strictly better score may
    // replace an earlier winner.
    let (best_value, items) = bests
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .expect("at least one committee");
    let winners = WinnerSet::new(inst, items)?;
    debug_assert_eq!(winners.score(), scorer.to_rational(best_value));
    Ok(winners)
}

/// The `limit` best committees, by score and then lexicographically.
pub fn top_committees(inst: &Instance, limit: usize, budget: u128) -> Result<Vec<WinnerSet>> {
    check_budget(inst, budget)?;
    let (m, k) = (inst.m(), inst.k());
    let scorer = Scorer::for_instance(inst);
    let mut comb: Vec<usize> = (0..k).collect();
    let mut all = Vec::new();
    let mut buf = Vec::new();
    loop {
        all.push((scorer.total(&comb, &mut buf), comb.clone()));
        if !next_combination(&mut comb, m) {
            break;
        }
    }
    // Stable sort keeps lexicographic order among equal scores.
    all.sort_by(|a, b| b.0.cmp(&a.0));
    all.into_iter()
        .take(limit)
        .map(|(_, items)| WinnerSet::new(inst, items))
        .collect()
}

/// Constant OWA vectors: the K items with the largest total utility
/// (ties by lowest index).
pub fn kbest_solve(inst: &Instance) -> Result<WinnerSet> {
    if !classify(inst.owa()).constant {
        return Err(Error::Precondition(
            "kbest requires a constant OWA vector; use brute, greedy or kbest-proxy".into(),
        ));
    }
    Ok(top_items_by_total(inst))
}

pub(crate) fn top_items_by_total(inst: &Instance) -> WinnerSet {
    let sums = inst.utilities().column_sums();
    let mut order: Vec<usize> = (0..inst.m()).collect();
    order.sort_by(|&a, &b| sums[b].cmp(&sums[a]).then(a.cmp(&b)));
    order.truncate(inst.k());
    WinnerSet::new(inst, order).expect("K distinct in-range items")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OwaVector, UtilityMatrix};
    use crate::number::Rational;
    use crate::testdata::*;

    fn r(v: i128) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
        assert_eq!(binomial(400, 200), u128::MAX);
    }

    #[test]
    fn unrank_matches_iteration() {
        let (m, k) = (7, 3);
        let mut comb: Vec<usize> = (0..k).collect();
        let mut rank = 0;
        loop {
            assert_eq!(unrank_combination(m, k, rank), comb);
            rank += 1;
            if !next_combination(&mut comb, m) {
                break;
            }
        }
        assert_eq!(rank, binomial(m, k));
    }

    #[test]
    fn example1_optimum_and_runners_up() {
        let inst = example1_instance(&[2, 1, 0]);
        let w = brute_force(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!((w.items(), w.score()), (&[0, 1, 5][..], r(77)));
        // Frozen from exhaustive enumeration: only two committees score 75;
        // {a1, a2, a5} is fourth with 73.
        let top = top_committees(&inst, 4, DEFAULT_BUDGET).unwrap();
        let ranked: Vec<(&[usize], Rational)> = top.iter().map(|w| (w.items(), w.score())).collect();
        assert_eq!(
            ranked,
            vec![
                (&[0, 1, 5][..], r(77)),
                (&[0, 1, 3][..], r(75)),
                (&[0, 4, 5][..], r(75)),
                (&[0, 1, 4][..], r(73)),
            ]
        );
    }

    #[test]
    fn chamberlin_courant_and_k_borda() {
        let cc = brute_force(&example1_instance(&[1, 0, 0]), DEFAULT_BUDGET).unwrap();
        assert_eq!(cc.items(), &[0, 4, 5]);
        let kb = kbest_solve(&example1_instance(&[1, 1, 1])).unwrap();
        assert_eq!(kb.items(), &[0, 1, 2]);
        assert_eq!(
            example1_utilities().column_sums(),
            vec![r(23), r(15), r(15), r(10), r(13), r(14)]
        );
    }

    #[test]
    fn full_committee() {
        let u = UtilityMatrix::from_integers(&[[1, 2, 3]]).unwrap();
        let inst = Instance::new(u, OwaVector::from_integers(&[3, 2, 1]).unwrap()).unwrap();
        assert_eq!(brute_force(&inst, 1).unwrap().items(), &[0, 1, 2]);
    }

    #[test]
    fn kbest_ties_and_errors() {
        let u = UtilityMatrix::from_integers(&[[4, 4, 4, 4]]).unwrap();
        let inst = Instance::new(u, OwaVector::from_integers(&[2, 2]).unwrap()).unwrap();
        assert_eq!(kbest_solve(&inst).unwrap().items(), &[0, 1]);
        assert!(matches!(
            kbest_solve(&example1_instance(&[2, 1, 0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let inst = example1_instance(&[2, 1, 0]);
        assert_eq!(
            brute_force(&inst, 19),
            Err(Error::BudgetExceeded { required: 20, budget: 19 })
        );
    }

    #[test]
    fn parallel_and_sequential_agree_on_ties() {
        // Every committee ties, so the answer must be the first one.
        let u = UtilityMatrix::from_integers(&[[1; 12]]).unwrap();
        let inst = Instance::new(u, OwaVector::from_integers(&[1, 1, 1, 1]).unwrap()).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(
                brute_force_with(&inst, DEFAULT_BUDGET, exec).unwrap().items(),
                &[0, 1, 2, 3]
            );
        }
    }
}
