//! Shared instances and reference implementations for the integration tests.
//! The reference code works straight from the definitions and shares nothing
//! with the library beyond the data types.
#![allow(dead_code)]

use num_traits::Zero;
use owa_winner::{Instance, OwaVector, Rational, UtilityMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn instance(rows: &[Vec<i64>], alpha: &[i64]) -> Instance {
    Instance::new(
        UtilityMatrix::from_integers(rows).unwrap(),
        OwaVector::from_integers(alpha).unwrap(),
    )
    .unwrap()
}

pub fn example1(alpha: &[i64]) -> Instance {
    let a = vec![5, 4, 3, 0, 2, 1];
    let b = vec![4, 0, 2, 3, 1, 5];
    let c = vec![0, 3, 2, 4, 5, 1];
    instance(&[a.clone(), a.clone(), a, b.clone(), b, c], alpha)
}

pub fn exjl(alpha: &[i64]) -> Instance {
    instance(
        &[
            vec![10, 10, 9, 8, 5, 0],
            vec![6, 5, 0, 10, 8, 10],
            vec![8, 0, 10, 6, 10, 7],
        ],
        alpha,
    )
}

pub fn q(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Sum over agents of the weights applied to the agent's utilities for
/// `items`, best first.
pub fn reference_score(inst: &Instance, items: &[usize]) -> Rational {
    let alpha = inst.owa().as_slice();
    let mut total = Rational::zero();
    for i in 0..inst.n() {
        let mut vals: Vec<Rational> = items.iter().map(|&j| inst.utilities().get(i, j)).collect();
        vals.sort_by(|a, b| b.cmp(a));
        for (v, a) in vals.iter().zip(alpha) {
            total += v * a;
        }
    }
    total
}

pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..m {
            cur.push(j);
            rec(j + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Best committee, lexicographically smallest among ties.
pub fn reference_optimum(inst: &Instance) -> (Vec<usize>, Rational) {
    let mut best: Option<(Vec<usize>, Rational)> = None;
    for w in subsets(inst.m(), inst.k()) {
        let s = reference_score(inst, &w);
        if best.as_ref().map_or(true, |(_, b)| s > *b) {
            best = Some((w, s));
        }
    }
    best.unwrap()
}

/// Minimum over agents of the `ceil(gamma m)`-th largest utility, over the
/// largest utility overall.
pub fn reference_beta(inst: &Instance, gamma: Rational) -> Rational {
    let u = inst.utilities();
    let t = (gamma * int(inst.m() as i128)).ceil().to_integer() as usize;
    let mut u_max = Rational::zero();
    let mut worst: Option<Rational> = None;
    for i in 0..inst.n() {
        let mut row: Vec<Rational> = u.row(i).to_vec();
        row.sort_by(|a, b| b.cmp(a));
        u_max = u_max.max(row[0]);
        worst = Some(worst.map_or(row[t - 1], |w: Rational| w.min(row[t - 1])));
    }
    if u_max.is_zero() {
        Rational::zero()
    } else {
        worst.unwrap() / u_max
    }
}

/// Sequential PAV: each round adds the item maximizing the sum over its
/// approvers of `1 / (1 + already elected approved items)`.
pub fn sequential_pav(approvals: &[Vec<bool>], k: usize) -> Vec<usize> {
    let m = approvals[0].len();
    let mut elected: Vec<usize> = Vec::new();
    for _ in 0..k {
        let mut best: Option<(usize, Rational)> = None;
        for c in (0..m).filter(|c| !elected.contains(c)) {
            let mut s = Rational::zero();
            for ballot in approvals {
                if ballot[c] {
                    let have = elected.iter().filter(|&&e| ballot[e]).count();
                    s += q(1, have as i128 + 1);
                }
            }
            if best.as_ref().map_or(true, |(_, b)| s > *b) {
                best = Some((c, s));
            }
        }
        elected.push(best.unwrap().0);
    }
    elected
}

/// `k` weights from `0..=5`, nonincreasing, first one positive.
pub fn random_nonincreasing(rng: &mut ChaCha8Rng, k: usize) -> Vec<i64> {
    let mut a: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=5)).collect();
    a.sort_unstable_by(|x, y| y.cmp(x));
    if a[0] == 0 {
        a[0] = 1;
    }
    a
}

pub enum Kind {
    Integer,
    Approval,
    Borda,
}

pub fn random_rows(rng: &mut ChaCha8Rng, kind: &Kind, n: usize, m: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| match kind {
            Kind::Integer => (0..m).map(|_| rng.gen_range(0..=9)).collect(),
            Kind::Approval => (0..m).map(|_| rng.gen_bool(0.5) as i64).collect(),
            Kind::Borda => {
                let mut perm: Vec<usize> = (0..m).collect();
                for i in (1..m).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                let mut row = vec![0; m];
                for (pos, &item) in perm.iter().enumerate() {
                    row[item] = (m - 1 - pos) as i64;
                }
                row
            }
        })
        .collect()
}
