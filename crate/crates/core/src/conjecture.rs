//! Small-scale searches for counterexamples to open statements about
//! 3-trade robustness.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classify::{classify_enumeration, ClassificationRecord, ClassifyOptions};
use crate::enumeration::EnumFilter;
use crate::families::{in_lemma_6_1, lemma_6_1_instances};
use crate::invariants::CharacteristicInvariants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    /// t = 3, r = 2: 3-trade robust implies weighted, and the games failing
    /// first at length 3 are exactly the two parametric families.
    T3R2FamilyExactness,
    /// t = 3: 3-trade robust implies weighted.
    T3ThreeTradeRobust,
    /// r = 2: 3-trade robust implies weighted.
    R2ThreeTradeRobust,
}

impl FromStr for ScanTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "t3r2" | "t3r2_family" => ScanTarget::T3R2FamilyExactness,
            "t3" | "t3_3tr" => ScanTarget::T3ThreeTradeRobust,
            "r2" | "r2_3tr" => ScanTarget::R2ThreeTradeRobust,
            other => return Err(format!("unknown scan target '{other}' (t3r2, t3, r2)")),
        })
    }
}

impl fmt::Display for ScanTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanTarget::T3R2FamilyExactness => "t3r2",
            ScanTarget::T3ThreeTradeRobust => "t3",
            ScanTarget::R2ThreeTradeRobust => "r2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub invariants: CharacteristicInvariants,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub target: ScanTarget,
    pub n_min: u32,
    pub n_max: u32,
    pub games_checked: u64,
    pub counterexamples: Vec<Counterexample>,
}

pub fn conjecture_scan(target: ScanTarget, n_min: u32, n_max: u32) -> ScanReport {
    let filter = match target {
        ScanTarget::T3R2FamilyExactness => EnumFilter { t: Some(3), r: Some(2) },
        ScanTarget::T3ThreeTradeRobust => EnumFilter::t(3),
        ScanTarget::R2ThreeTradeRobust => EnumFilter::r(2),
    };
    let opts = ClassifyOptions {
        cap_k: 3,
        escalate_to: 3,
        ..ClassifyOptions::trade_only()
    };
    let mut counterexamples = Vec::new();
    let mut games_checked = 0;
    for n in n_min..=n_max {
        let mut fail_at_3 = BTreeSet::new();
        let mut sink = |rec: &ClassificationRecord| {
            if !rec.weighted && rec.k_trade_fail.is_none() {
                counterexamples.push(Counterexample {
                    invariants: rec.invariants.clone(),
                    reason: "not weighted but 3-trade robust".into(),
                });
            }
            if rec.k_trade_fail == Some(3) {
                fail_at_3.insert(rec.invariants.clone());
            }
        };
        let report = classify_enumeration(n, filter, &opts, Some(&mut sink));
        games_checked += report.total;
        if target == ScanTarget::T3R2FamilyExactness {
            for ci in &fail_at_3 {
                if !in_lemma_6_1(ci) {
                    counterexamples.push(Counterexample {
                        invariants: ci.clone(),
                        reason: "fails first at length 3 but lies outside both families".into(),
                    });
                }
            }
            for ci in lemma_6_1_instances(n) {
                if !fail_at_3.contains(&ci) {
                    counterexamples.push(Counterexample {
                        invariants: ci,
                        reason: "family member that does not fail first at length 3".into(),
                    });
                }
            }
        }
    }
    ScanReport {
        target,
        n_min,
        n_max,
        games_checked,
        counterexamples,
    }
}
