//! Slow, independent reference implementations used to cross-check the
//! library on small games.

#![allow(dead_code)]

use std::collections::HashSet;

use threshold_lab::CharacteristicInvariants;

fn all_types(classes: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &n in classes {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=n).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Winning and losing types, straight from row dominance.
pub fn split_types(ci: &CharacteristicInvariants) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    all_types(ci.classes()).into_iter().partition(|s| ci.is_winning_type(s))
}

fn weight(w: &[u64], s: &[u32]) -> u64 {
    w.iter().zip(s).map(|(a, &b)| a * b as u64).sum()
}

/// Searches non-increasing integer class weights up to `bound`, doubling
/// from 1. Returns the first separating vector with its quota.
pub fn brute_force_weights(ci: &CharacteristicInvariants, bound: u64) -> Option<(Vec<u64>, u64)> {
    let (win, lose) = split_types(ci);
    let t = ci.t();
    let mut b = 1;
    while b <= bound {
        let mut w = vec![0u64; t];
        if let Some(found) = search(&mut w, 0, b, &win, &lose) {
            return Some(found);
        }
        b *= 2;
    }
    None
}

fn search(w: &mut Vec<u64>, k: usize, cap: u64, win: &[Vec<u32>], lose: &[Vec<u32>]) -> Option<(Vec<u64>, u64)> {
    if k == w.len() {
        let q = win.iter().map(|s| weight(w, s)).min()?;
        let l = lose.iter().map(|s| weight(w, s)).max().unwrap_or(0);
        return (q > l).then(|| (w.clone(), q));
    }
    let top = if k == 0 { cap } else { w[k - 1] };
    for x in (0..=top).rev() {
        w[k] = x;
        if let Some(f) = search(w, k + 1, cap, win, lose) {
            return Some(f);
        }
    }
    None
}

fn multisets(items: &[Vec<u32>], k: usize, mut f: impl FnMut(&[usize])) {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, f);
            cur.pop();
        }
    }
    rec(items.len(), k, 0, &mut Vec::new(), &mut f);
}

fn sum_of(items: &[Vec<u32>], idx: &[usize], t: usize) -> Vec<u32> {
    let mut s = vec![0u32; t];
    for &i in idx {
        for (a, b) in s.iter_mut().zip(&items[i]) {
            *a += b;
        }
    }
    s
}

/// Whether some `k` winning types (rows only when `invariant`) have the
/// same total as some `k` losing types. Plain enumeration, no pruning.
pub fn has_trade(ci: &CharacteristicInvariants, k: usize, invariant: bool) -> bool {
    let (win, lose) = split_types(ci);
    let pre: Vec<Vec<u32>> = if invariant { ci.rows().to_vec() } else { win };
    let t = ci.t();
    let mut sums = HashSet::new();
    multisets(&lose, k, |idx| {
        sums.insert(sum_of(&lose, idx, t));
    });
    let mut found = false;
    multisets(&pre, k, |idx| {
        if !found && sums.contains(&sum_of(&pre, idx, t)) {
            found = true;
        }
    });
    found
}

/// Smallest failing length up to `cap`.
pub fn first_trade(ci: &CharacteristicInvariants, cap: usize, invariant: bool) -> Option<usize> {
    (2..=cap).find(|&k| has_trade(ci, k, invariant))
}
