//! Trading transforms and their type-level counterparts, verification, the
//! per-class expansion from vectorial trades to player-level trades, and
//! the bounded search for trade-robustness failures.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{PlayerPartition, SimpleGame};
use crate::invariants::{CharacteristicInvariants, TypeTable};
use crate::weightedness::decide_weighted;

/// Which winning types may appear before the trade: any minimal winning
/// type (`Trade`) or only rows of `𝓜` (`Invariant`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TradeMode {
    Trade,
    Invariant,
}

impl fmt::Display for TradeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TradeMode::Trade => "trade",
            TradeMode::Invariant => "invariant",
        })
    }
}

impl std::str::FromStr for TradeMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "trade" => Ok(TradeMode::Trade),
            "invariant" | "invariant-trade" => Ok(TradeMode::Invariant),
            other => Err(format!("unknown mode '{other}' (expected trade or invariant)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypeMult {
    #[serde(rename = "type")]
    pub ty: Vec<u32>,
    pub mult: u32,
}

/// Multisets of types before and after a trade.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VectorialTrade {
    pub pre: Vec<TypeMult>,
    pub post: Vec<TypeMult>,
}

fn group(list: &[Vec<u32>]) -> Vec<TypeMult> {
    let mut sorted = list.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut out: Vec<TypeMult> = Vec::new();
    for ty in sorted {
        match out.last_mut() {
            Some(last) if last.ty == ty => last.mult += 1,
            _ => out.push(TypeMult { ty, mult: 1 }),
        }
    }
    out
}

fn ungroup(list: &[TypeMult]) -> Vec<Vec<u32>> {
    list.iter()
        .flat_map(|tm| std::iter::repeat_n(tm.ty.clone(), tm.mult as usize))
        .collect()
}

impl VectorialTrade {
    /// Canonical form: equal types merged, lexicographically descending.
    pub fn from_lists(pre: &[Vec<u32>], post: &[Vec<u32>]) -> Self {
        Self {
            pre: group(pre),
            post: group(post),
        }
    }

    pub fn canonical(&self) -> Self {
        Self::from_lists(&self.pre_list(), &self.post_list())
    }

    pub fn pre_list(&self) -> Vec<Vec<u32>> {
        ungroup(&self.pre)
    }

    pub fn post_list(&self) -> Vec<Vec<u32>> {
        ungroup(&self.post)
    }

    /// Number of coalitions on each side (the pre side is authoritative).
    pub fn len(&self) -> usize {
        self.pre.iter().map(|t| t.mult as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn side_sum(side: &[TypeMult], t: usize) -> Option<Vec<u64>> {
        let mut acc = vec![0u64; t];
        for tm in side {
            if tm.ty.len() != t {
                return None;
            }
            for (a, &x) in acc.iter_mut().zip(&tm.ty) {
                *a += x as u64 * tm.mult as u64;
            }
        }
        Some(acc)
    }

    /// Equal numbers of coalitions and equal component sums.
    pub fn is_balanced(&self) -> bool {
        let Some(t) = self.pre.first().map(|tm| tm.ty.len()) else {
            return self.post.is_empty();
        };
        let post_len: usize = self.post.iter().map(|t| t.mult as usize).sum();
        post_len == self.len()
            && matches!(
                (Self::side_sum(&self.pre, t), Self::side_sum(&self.post, t)),
                (Some(a), Some(b)) if a == b
            )
    }
}

impl fmt::Display for VectorialTrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &[TypeMult]| {
            s.iter()
                .map(|tm| {
                    let ty: Vec<String> = tm.ty.iter().map(|x| x.to_string()).collect();
                    if tm.mult == 1 {
                        format!("({})", ty.join(","))
                    } else {
                        format!("{}×({})", tm.mult, ty.join(","))
                    }
                })
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "⟨{} ; {}⟩", side(&self.pre), side(&self.post))
    }
}

/// Certificate JSON document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub mode: TradeMode,
    pub k: usize,
    pub pre: Vec<TypeMult>,
    pub post: Vec<TypeMult>,
}

impl Certificate {
    pub fn new(mode: TradeMode, trade: &VectorialTrade) -> Self {
        Self {
            mode,
            k: trade.len(),
            pre: trade.pre.clone(),
            post: trade.post.clone(),
        }
    }

    pub fn trade(&self) -> VectorialTrade {
        VectorialTrade {
            pre: self.pre.clone(),
            post: self.post.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    RobustUpToMaxK,
    FailsAt { k: usize, certificate: VectorialTrade },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RobustnessReport {
    pub mode: TradeMode,
    pub max_k_searched: usize,
    pub verdict: Verdict,
}

impl RobustnessReport {
    pub fn failing_k(&self) -> Option<usize> {
        match self.verdict {
            Verdict::FailsAt { k, .. } => Some(k),
            Verdict::RobustUpToMaxK => None,
        }
    }

    pub fn certificate(&self) -> Option<&VectorialTrade> {
        match &self.verdict {
            Verdict::FailsAt { certificate, .. } => Some(certificate),
            Verdict::RobustUpToMaxK => None,
        }
    }
}

/// Player-level trade `⟨X₁..X_k ; Y₁..Y_k⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradingTransform {
    pub pre: Vec<Coalition>,
    pub post: Vec<Coalition>,
}

impl TradingTransform {
    /// Every player occurs equally often on both sides.
    pub fn is_balanced(&self) -> bool {
        if self.pre.len() != self.post.len() {
            return false;
        }
        let mut count = [0i64; 64];
        for c in &self.pre {
            for p in c.players() {
                count[p] += 1;
            }
        }
        for c in &self.post {
            for p in c.players() {
                count[p] -= 1;
            }
        }
        count.iter().all(|&x| x == 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformVerdict {
    ValidCertificate,
    BalancedNotCertificate,
    Unbalanced,
}

pub fn verify_transform(game: &SimpleGame, t: &TradingTransform) -> TransformVerdict {
    if !t.is_balanced() {
        return TransformVerdict::Unbalanced;
    }
    if !t.pre.is_empty()
        && t.pre.iter().all(|&x| game.is_winning(x))
        && t.post.iter().all(|&y| !game.is_winning(y))
    {
        TransformVerdict::ValidCertificate
    } else {
        TransformVerdict::BalancedNotCertificate
    }
}

pub fn verify_vectorial(ci: &CharacteristicInvariants, v: &VectorialTrade, mode: TradeMode) -> bool {
    if v.is_empty() || !v.is_balanced() {
        return false;
    }
    let table = ci.table();
    let pre_ok = v.pre.iter().all(|tm| match mode {
        TradeMode::Trade => table.is_winning(&tm.ty) == Some(true),
        TradeMode::Invariant => ci.rows().contains(&tm.ty),
    });
    pre_ok && v.post.iter().all(|tm| table.is_losing(&tm.ty))
}

pub type SetPair = (Vec<Vec<u32>>, Vec<Vec<u32>>);

/// Sets `A_i ⊆ {0..m}` with `|A_i| = a_i`, `B_j` with `|B_j| = b_j`, such
/// that every element lies in equally many `A`s and `B`s, where `m` is the
/// largest entry. Returns `None` if the sums differ.
pub fn expand_counts(a: &[u32], b: &[u32]) -> Option<SetPair> {
    if a.iter().map(|&x| x as u64).sum::<u64>() != b.iter().map(|&x| x as u64).sum::<u64>() {
        return None;
    }
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut sa: Vec<Vec<u32>> = vec![Vec::new(); a.len()];
    let mut sb: Vec<Vec<u32>> = vec![Vec::new(); b.len()];
    // descending by remaining value, then by position
    let order = |r: &[u32]| {
        let mut idx: Vec<usize> = (0..r.len()).filter(|&i| r[i] > 0).collect();
        idx.sort_by(|&i, &j| r[j].cmp(&r[i]).then(i.cmp(&j)));
        idx
    };
    loop {
        let oa = order(&ra);
        let ob = order(&rb);
        if oa.is_empty() && ob.is_empty() {
            break;
        }
        if let Some((i, j)) = oa
            .iter()
            .find_map(|&i| ob.iter().find(|&&j| rb[j] == ra[i]).map(|&j| (i, j)))
        {
            sa[i].extend(0..ra[i]);
            sb[j].extend(0..rb[j]);
            ra[i] = 0;
            rb[j] = 0;
            continue;
        }
        let m = ra.iter().chain(&rb).copied().max().unwrap_or(0);
        let side_a = oa.first().is_some_and(|&i| ra[i] == m);
        let l = if side_a {
            oa.iter().filter(|&&i| ra[i] == m).count()
        } else {
            ob.iter().filter(|&&j| rb[j] == m).count()
        };
        if oa.len() < l || ob.len() < l {
            return None;
        }
        for &i in &oa[..l] {
            sa[i].push(m - 1);
            ra[i] -= 1;
        }
        for &j in &ob[..l] {
            sb[j].push(m - 1);
            rb[j] -= 1;
        }
    }
    for s in sa.iter_mut().chain(sb.iter_mut()) {
        s.sort_unstable();
    }
    Some((sa, sb))
}

/// Player-level trade realizing `v`, applying [`expand_counts`] inside each
/// class of `partition`.
pub fn expand_vectorial(v: &VectorialTrade, partition: &PlayerPartition) -> Result<TradingTransform> {
    if !v.is_balanced() {
        return Err(Error::InvalidTrade("component sums differ".into()));
    }
    let pre = v.pre_list();
    let post = v.post_list();
    let t = partition.classes.len();
    if pre.iter().chain(&post).any(|s| s.len() != t) {
        return Err(Error::InvalidTrade("type length differs from class count".into()));
    }
    let mut x = vec![Coalition::EMPTY; pre.len()];
    let mut y = vec![Coalition::EMPTY; post.len()];
    for (k, class) in partition.classes.iter().enumerate() {
        let a: Vec<u32> = pre.iter().map(|s| s[k]).collect();
        let b: Vec<u32> = post.iter().map(|s| s[k]).collect();
        let (sa, sb) = expand_counts(&a, &b)
            .ok_or_else(|| Error::InvalidTrade(format!("class {k} is unbalanced")))?;
        let place = |sets: Vec<Vec<u32>>, out: &mut [Coalition]| -> Result<()> {
            for (c, set) in out.iter_mut().zip(sets) {
                for pos in set {
                    let p = *class.get(pos as usize).ok_or_else(|| {
                        Error::InvalidTrade(format!("class {k} has only {} players", class.len()))
                    })?;
                    *c = c.with(p);
                }
            }
            Ok(())
        };
        place(sa, &mut x)?;
        place(sb, &mut y)?;
    }
    Ok(TradingTransform { pre: x, post: y })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Require the post-trade types to be maximal losing with exact sums,
    /// on top of the pre-trade restriction. Experimental: may miss
    /// certificates that the default search finds.
    pub exact_maximal_losing: bool,
}

/// Reusable search state for one game: the type table, the maximal losing
/// types and a memo of uncoverable remainders shared across targets.
pub struct TradeSearcher<'a> {
    ci: &'a CharacteristicInvariants,
    table: TypeTable,
    maximal_losing: Vec<Vec<u32>>,
    max_ml: Vec<u32>,
    minimal_winning: Vec<Vec<u32>>,
    options: SearchOptions,
    failed: HashSet<(Vec<u32>, u32)>,
}

impl<'a> TradeSearcher<'a> {
    pub fn new(ci: &'a CharacteristicInvariants) -> Self {
        Self::with_options(ci, SearchOptions::default())
    }

    pub fn with_options(ci: &'a CharacteristicInvariants, options: SearchOptions) -> Self {
        let table = ci.table();
        let maximal_losing = table.maximal_losing();
        let t = ci.t();
        let max_ml = (0..t)
            .map(|k| maximal_losing.iter().map(|l| l[k]).max().unwrap_or(0))
            .collect();
        let mut minimal_winning = table.minimal_winning();
        minimal_winning.sort_by(|a, b| crate::lattice::canonical_cmp(a, b));
        Self {
            ci,
            table,
            maximal_losing,
            max_ml,
            minimal_winning,
            options,
            failed: HashSet::new(),
        }
    }

    pub fn table(&self) -> &TypeTable {
        &self.table
    }

    pub fn maximal_losing(&self) -> &[Vec<u32>] {
        &self.maximal_losing
    }

    fn candidates(&self, mode: TradeMode) -> Vec<Vec<u32>> {
        match mode {
            TradeMode::Trade => self.minimal_winning.clone(),
            TradeMode::Invariant => self.ci.rows().to_vec(),
        }
    }

    /// A certificate of length exactly `j`, if one exists. Lists are
    /// searched in lexicographic order of candidate indices.
    pub fn failure_at(&mut self, j: usize, mode: TradeMode) -> Option<VectorialTrade> {
        let cands = self.candidates(mode);
        let t = self.ci.t();
        let mut idx = vec![0usize; j];
        loop {
            let mut target = vec![0u32; t];
            for &i in &idx {
                for (a, &x) in target.iter_mut().zip(&cands[i]) {
                    *a += x;
                }
            }
            let mut chosen = Vec::with_capacity(j);
            let found = if self.options.exact_maximal_losing {
                self.exact(&target, j as u32, &mut chosen)
            } else {
                self.cover(&target, j as u32, &mut chosen)
            };
            if found {
                let pre: Vec<Vec<u32>> = idx.iter().map(|&i| cands[i].clone()).collect();
                let post = trim_to_target(chosen, &target, j);
                let trade = VectorialTrade::from_lists(&pre, &post);
                debug_assert!(verify_vectorial(self.ci, &trade, mode));
                return Some(trade);
            }
            // next non-decreasing index tuple
            let mut pos = j;
            loop {
                if pos == 0 {
                    return None;
                }
                pos -= 1;
                if idx[pos] + 1 < cands.len() {
                    let v = idx[pos] + 1;
                    for slot in &mut idx[pos..] {
                        *slot = v;
                    }
                    break;
                }
            }
        }
    }

    /// Whether `j` losing types can dominate `r` componentwise.
    fn cover(&mut self, r: &[u32], j: u32, chosen: &mut Vec<Vec<u32>>) -> bool {
        if r.iter().all(|&x| x == 0) {
            return true;
        }
        if j == 0 || r.iter().zip(&self.max_ml).any(|(&x, &m)| x > j * m) {
            return false;
        }
        if j == 1 {
            if self.table.is_losing(r) {
                chosen.push(r.to_vec());
                return true;
            }
            return false;
        }
        let key = (r.to_vec(), j);
        if self.failed.contains(&key) {
            return false;
        }
        for li in 0..self.maximal_losing.len() {
            let l = &self.maximal_losing[li];
            if r.iter().zip(l).all(|(&x, &y)| x == 0 || y == 0) {
                continue;
            }
            let rest: Vec<u32> = r.iter().zip(l).map(|(&x, &y)| x.saturating_sub(y)).collect();
            chosen.push(l.clone());
            if self.cover(&rest, j - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        self.failed.insert(key);
        false
    }

    /// Whether `r` is a sum of exactly `j` maximal losing types.
    fn exact(&mut self, r: &[u32], j: u32, chosen: &mut Vec<Vec<u32>>) -> bool {
        if j == 0 {
            return r.iter().all(|&x| x == 0);
        }
        let key = (r.to_vec(), j);
        if self.failed.contains(&key) {
            return false;
        }
        for li in 0..self.maximal_losing.len() {
            let l = &self.maximal_losing[li];
            if r.iter().zip(l).any(|(&x, &y)| y > x) {
                continue;
            }
            let rest: Vec<u32> = r.iter().zip(l).map(|(&x, &y)| x - y).collect();
            chosen.push(l.clone());
            if self.exact(&rest, j - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        self.failed.insert(key);
        false
    }

    /// Smallest `j` in `2..=max_k` with a certificate.
    pub fn find(&mut self, mode: TradeMode, max_k: usize) -> RobustnessReport {
        self.find_from(mode, 2, max_k)
    }

    /// Like [`find`](Self::find) but assumes lengths below `from` fail.
    pub fn find_from(&mut self, mode: TradeMode, from: usize, max_k: usize) -> RobustnessReport {
        for j in from.max(2)..=max_k {
            if let Some(certificate) = self.failure_at(j, mode) {
                return RobustnessReport {
                    mode,
                    max_k_searched: j,
                    verdict: Verdict::FailsAt { k: j, certificate },
                };
            }
        }
        RobustnessReport {
            mode,
            max_k_searched: max_k,
            verdict: Verdict::RobustUpToMaxK,
        }
    }
}

/// Removes surplus units so the post side sums exactly to `target`, pads
/// with empty types up to `j` entries.
fn trim_to_target(mut post: Vec<Vec<u32>>, target: &[u32], j: usize) -> Vec<Vec<u32>> {
    let t = target.len();
    while post.len() < j {
        post.push(vec![0; t]);
    }
    for k in 0..t {
        let total: u32 = post.iter().map(|l| l[k]).sum();
        let mut excess = total - target[k];
        for l in post.iter_mut() {
            let cut = excess.min(l[k]);
            l[k] -= cut;
            excess -= cut;
        }
    }
    post
}

pub fn find_failure(ci: &CharacteristicInvariants, mode: TradeMode, max_k: usize) -> RobustnessReport {
    TradeSearcher::new(ci).find(mode, max_k)
}

pub fn find_failure_with(
    ci: &CharacteristicInvariants,
    mode: TradeMode,
    max_k: usize,
    options: SearchOptions,
) -> RobustnessReport {
    TradeSearcher::with_options(ci, options).find(mode, max_k)
}

/// Minimal failing lengths in trade and invariant mode, each `None` if no
/// failure exists up to `cap`.
pub fn min_failure_pair(ci: &CharacteristicInvariants, cap: usize) -> Result<(Option<usize>, Option<usize>)> {
    if decide_weighted(ci).is_some() {
        return Err(Error::Weighted);
    }
    let mut searcher = TradeSearcher::new(ci);
    let trade = searcher.find(TradeMode::Trade, cap).failing_k();
    let invariant = searcher.find(TradeMode::Invariant, cap).failing_k();
    Ok((trade, invariant))
}
