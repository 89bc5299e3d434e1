//! Per-game verdicts (weighted, or the first failing trade length) and
//! bucket counts over enumerations.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::enumeration::{EnumFilter, WorkUnits};
use crate::invariants::CharacteristicInvariants;
use crate::trades::{Certificate, TradeMode, TradeSearcher};
use crate::weightedness::{decide_weighted, WeightedRepresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifyOptions {
    pub cap_k: usize,
    /// Searched further when a non-weighted game survives `cap_k`.
    pub escalate_to: usize,
    pub trade: bool,
    pub invariant: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            cap_k: 4,
            escalate_to: 6,
            trade: true,
            invariant: true,
        }
    }
}

impl ClassifyOptions {
    pub fn trade_only() -> Self {
        Self {
            invariant: false,
            ..Self::default()
        }
    }

    pub fn invariant_only() -> Self {
        Self {
            trade: false,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationRecord {
    pub invariants: CharacteristicInvariants,
    pub t: usize,
    pub r: usize,
    pub weighted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representation: Option<WeightedRepresentation>,
    pub k_trade_fail: Option<usize>,
    pub k_invariant_fail: Option<usize>,
    /// Non-weighted but no failure found up to the escalated cap.
    pub unresolved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

pub fn classify_game(ci: &CharacteristicInvariants, opts: &ClassifyOptions) -> ClassificationRecord {
    let mut searcher = TradeSearcher::new(ci);
    let mut record = ClassificationRecord {
        invariants: ci.clone(),
        t: ci.t(),
        r: ci.r(),
        weighted: false,
        representation: None,
        k_trade_fail: None,
        k_invariant_fail: None,
        unresolved: false,
        certificate: None,
    };
    let first_mode = if opts.trade { TradeMode::Trade } else { TradeMode::Invariant };
    // a cheap length-2 search settles most non-weighted games before the LP
    let quick = searcher.failure_at(2, first_mode);
    if quick.is_none() {
        if let Some(rep) = decide_weighted(ci) {
            record.weighted = true;
            record.representation = Some(rep);
            return record;
        }
    }
    let top = opts.escalate_to.max(opts.cap_k);
    let mut certificate = quick.map(|c| Certificate::new(first_mode, &c));
    let mut first_k = certificate.as_ref().map(|c| c.k);
    if first_k.is_none() {
        let report = searcher.find_from(first_mode, 3, top);
        first_k = report.failing_k();
        certificate = report.certificate().map(|c| Certificate::new(first_mode, c));
    }
    match first_mode {
        TradeMode::Trade => record.k_trade_fail = first_k,
        TradeMode::Invariant => record.k_invariant_fail = first_k,
    }
    if opts.trade && opts.invariant {
        // invariant failures are trade failures, so start at the trade length
        let from = first_k.unwrap_or(top + 1);
        let report = searcher.find_from(TradeMode::Invariant, from, top);
        record.k_invariant_fail = report.failing_k();
    }
    record.unresolved = first_k.is_none();
    record.certificate = certificate;
    record
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub n: u32,
    pub t: Option<usize>,
    pub r: Option<usize>,
    pub total: u64,
    pub weighted: u64,
    /// games by first failing length in trade mode
    pub trade_fails: BTreeMap<usize, u64>,
    /// games by first failing length in invariant mode
    pub invariant_fails: BTreeMap<usize, u64>,
    pub unresolved: u64,
}

impl CountReport {
    pub fn new(n: u32, filter: EnumFilter) -> Self {
        Self {
            n,
            t: filter.t,
            r: filter.r,
            ..Self::default()
        }
    }

    pub fn add(&mut self, rec: &ClassificationRecord) {
        self.total += 1;
        if rec.weighted {
            self.weighted += 1;
        }
        if let Some(k) = rec.k_trade_fail {
            *self.trade_fails.entry(k).or_default() += 1;
        }
        if let Some(k) = rec.k_invariant_fail {
            *self.invariant_fails.entry(k).or_default() += 1;
        }
        if rec.unresolved {
            self.unresolved += 1;
        }
    }

    pub fn merge(&mut self, other: &CountReport) {
        self.total += other.total;
        self.weighted += other.weighted;
        for (k, v) in &other.trade_fails {
            *self.trade_fails.entry(*k).or_default() += v;
        }
        for (k, v) in &other.invariant_fails {
            *self.invariant_fails.entry(*k).or_default() += v;
        }
        self.unresolved += other.unresolved;
    }

    pub fn not_weighted(&self) -> u64 {
        self.total - self.weighted
    }

    pub fn fails(&self, mode: TradeMode, k: usize) -> u64 {
        let map = match mode {
            TradeMode::Trade => &self.trade_fails,
            TradeMode::Invariant => &self.invariant_fails,
        };
        map.get(&k).copied().unwrap_or(0)
    }

    /// Column names: `n, CG, WG, N-2T, N-3T`, then `N-kT` for larger `k`
    /// only when some count is non-zero (`I` instead of `T` in invariant
    /// mode), and `UNRESOLVED` when non-zero.
    pub fn csv_header(reports: &[CountReport], mode: TradeMode) -> Vec<String> {
        let tag = match mode {
            TradeMode::Trade => "T",
            TradeMode::Invariant => "I",
        };
        let mut cols: Vec<String> = ["n", "CG", "WG"].iter().map(|s| s.to_string()).collect();
        for k in Self::columns(reports, mode) {
            cols.push(format!("N-{k}{tag}"));
        }
        if reports.iter().any(|r| r.unresolved > 0) {
            cols.push("UNRESOLVED".into());
        }
        cols
    }

    fn columns(reports: &[CountReport], mode: TradeMode) -> Vec<usize> {
        let max = reports
            .iter()
            .flat_map(|r| match mode {
                TradeMode::Trade => r.trade_fails.keys(),
                TradeMode::Invariant => r.invariant_fails.keys(),
            })
            .copied()
            .max()
            .unwrap_or(3)
            .max(3);
        (2..=max).collect()
    }

    pub fn csv_rows(reports: &[CountReport], mode: TradeMode) -> Vec<Vec<String>> {
        let cols = Self::columns(reports, mode);
        let any_unresolved = reports.iter().any(|r| r.unresolved > 0);
        reports
            .iter()
            .map(|r| {
                let mut row = vec![r.n.to_string(), r.total.to_string(), r.weighted.to_string()];
                row.extend(cols.iter().map(|&k| r.fails(mode, k).to_string()));
                if any_unresolved {
                    row.push(r.unresolved.to_string());
                }
                row
            })
            .collect()
    }
}

/// Classifies every game of an enumeration in parallel. `sink` receives
/// records in enumeration order.
pub fn classify_enumeration(
    n: u32,
    filter: EnumFilter,
    opts: &ClassifyOptions,
    mut sink: Option<&mut dyn FnMut(&ClassificationRecord)>,
) -> CountReport {
    let units = WorkUnits::new(n, filter);
    let mut report = CountReport::new(n, filter);
    const CHUNK: usize = 512;
    let keep = sink.is_some();
    let mut start = 0;
    while start < units.len() {
        let end = (start + CHUNK).min(units.len());
        let parts = units.par_map(start..end, |u, w| {
            let mut local = CountReport::new(n, filter);
            let mut records = Vec::new();
            w.run(u, &mut |ci| {
                let rec = classify_game(&ci, opts);
                local.add(&rec);
                if keep {
                    records.push(rec);
                }
            });
            (local, records)
        });
        for (local, records) in parts {
            report.merge(&local);
            if let Some(s) = sink.as_mut() {
                for rec in &records {
                    s(rec);
                }
            }
        }
        start = end;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{canada, fm_smallest, unsc};

    #[test]
    fn single_games() {
        let opts = ClassifyOptions::default();
        let u = classify_game(&unsc(), &opts);
        assert!(u.weighted && u.representation.as_ref().unwrap().verify(&unsc()));
        let c = classify_game(&canada(), &opts);
        assert_eq!((c.weighted, c.k_trade_fail, c.k_invariant_fail), (false, Some(2), Some(2)));
        let f = classify_game(&fm_smallest(), &opts);
        assert_eq!(f.k_invariant_fail, Some(4));
        assert!(!f.unresolved);
    }

    #[test]
    fn small_census() {
        let r = classify_enumeration(6, EnumFilter::t(3), &ClassifyOptions::trade_only(), None);
        assert_eq!((r.total, r.weighted, r.fails(TradeMode::Trade, 2), r.fails(TradeMode::Trade, 3)), (262, 256, 6, 0));
        let header = CountReport::csv_header(std::slice::from_ref(&r), TradeMode::Trade);
        assert_eq!(header, vec!["n", "CG", "WG", "N-2T", "N-3T"]);
        assert_eq!(CountReport::csv_rows(&[r], TradeMode::Trade)[0].join(","), "6,262,256,6,0");
    }

    #[test]
    fn records_arrive_in_order() {
        let mut seen = Vec::new();
        let mut sink = |rec: &ClassificationRecord| seen.push(rec.invariants.clone());
        let report = classify_enumeration(5, EnumFilter::default(), &ClassifyOptions::default(), Some(&mut sink));
        assert_eq!(report.total as usize, seen.len());
        assert_eq!(seen, crate::enumeration::enumerate_complete(5, EnumFilter::default()));
    }
}
