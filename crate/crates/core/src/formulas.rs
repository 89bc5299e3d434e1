//! Closed-form counts of complete and weighted games, checked against the
//! enumeration.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::enumeration::{EnumFilter, WorkUnits};
use crate::weightedness::decide_weighted;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// complete games with one shift-minimal row
    CgR1,
    /// weighted games with one shift-minimal row
    WgR1,
    /// complete games with two classes
    CgT2,
    /// complete games with one class
    CgT1,
    /// weighted games with one class
    WgT1,
}

pub const ALL_FORMULAS: [Formula; 5] = [Formula::CgR1, Formula::WgR1, Formula::CgT2, Formula::CgT1, Formula::WgT1];

impl FromStr for Formula {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "cg_r1" => Formula::CgR1,
            "wg_r1" => Formula::WgR1,
            "cg_t2" => Formula::CgT2,
            "cg_t1" => Formula::CgT1,
            "wg_t1" => Formula::WgT1,
            other => return Err(format!("unknown formula '{other}' (cg_r1, wg_r1, cg_t2, cg_t1, wg_t1)")),
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Formula::CgR1 => "cg_r1",
            Formula::WgR1 => "wg_r1",
            Formula::CgT2 => "cg_t2",
            Formula::CgT1 => "cg_t1",
            Formula::WgT1 => "wg_t1",
        })
    }
}

/// `F(0) = 0, F(1) = 1`.
pub fn fibonacci(n: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

pub fn cg_r1(n: u32) -> u64 {
    (1u64 << n) - 1
}

pub fn wg_r1(n: u32) -> u64 {
    if n <= 5 {
        return cg_r1(n);
    }
    let n = n as u64;
    (n.pow(4) + 23 * n * n + 12 - 6 * n.pow(3) - 18 * n) / 12
}

pub fn cg_t2(n: u32) -> u64 {
    let n64 = n as u64;
    fibonacci(n + 6) - (n64 * n64 + 4 * n64 + 8)
}

pub fn cg_t1(n: u32) -> u64 {
    n as u64
}

impl Formula {
    pub fn value(self, n: u32) -> u64 {
        match self {
            Formula::CgR1 => cg_r1(n),
            Formula::WgR1 => wg_r1(n),
            Formula::CgT2 => cg_t2(n),
            Formula::CgT1 | Formula::WgT1 => cg_t1(n),
        }
    }

    fn filter(self) -> EnumFilter {
        match self {
            Formula::CgR1 | Formula::WgR1 => EnumFilter::r(1),
            Formula::CgT2 => EnumFilter::t(2),
            Formula::CgT1 | Formula::WgT1 => EnumFilter::t(1),
        }
    }

    fn counts_weighted(self) -> bool {
        matches!(self, Formula::WgR1 | Formula::WgT1)
    }

    /// Smallest `n` the closed form is stated for.
    pub fn min_n(self) -> u32 {
        match self {
            Formula::CgT2 => 2,
            _ => 1,
        }
    }

    /// The count obtained from the enumeration.
    pub fn enumerated(self, n: u32) -> u64 {
        let units = WorkUnits::new(n, self.filter());
        let weighted_only = self.counts_weighted();
        units
            .par_map(0..units.len(), |u, w| {
                let mut c = 0u64;
                w.run(u, &mut |ci| {
                    if !weighted_only || decide_weighted(&ci).is_some() {
                        c += 1;
                    }
                });
                c
            })
            .into_iter()
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaRow {
    pub n: u32,
    pub formula: u64,
    pub enumerated: u64,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaReport {
    pub which: Formula,
    pub rows: Vec<FormulaRow>,
    pub all_match: bool,
}

pub fn formula_check(which: Formula, n_min: u32, n_max: u32) -> FormulaReport {
    let rows: Vec<FormulaRow> = (n_min.max(which.min_n())..=n_max)
        .map(|n| {
            let formula = which.value(n);
            let enumerated = which.enumerated(n);
            FormulaRow {
                n,
                formula,
                enumerated,
                matches: formula == enumerated,
            }
        })
        .collect();
    let all_match = rows.iter().all(|r| r.matches);
    FormulaReport { which, rows, all_match }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(fibonacci(11), 89);
        assert_eq!(cg_t2(5), 36);
        assert_eq!(wg_r1(6), 61);
        assert_eq!(wg_r1(5), 31);
        assert_eq!(cg_r1(4), 15);
        assert_eq!(cg_t1(7), 7);
    }

    #[test]
    fn small_checks() {
        for f in ALL_FORMULAS {
            let report = formula_check(f, 1, 6);
            assert!(report.all_match, "{f}: {:?}", report.rows);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("cg_t2".parse::<Formula>(), Ok(Formula::CgT2));
        assert!("cg_t3".parse::<Formula>().is_err());
    }
}
