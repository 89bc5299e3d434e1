//! Exact feasibility of homogeneous systems `a·x > 0` / `a·x ≥ 0` with
//! integer coefficients and free rational unknowns.
//!
//! Two independent solvers are provided: Fourier–Motzkin elimination with
//! back-substitution, and a dense two-phase simplex over big rationals with
//! Bland's rule. Strict rows are turned into `a·x ≥ 1` for the simplex,
//! which is equivalent because solutions of a homogeneous system scale.
//!
//! Above the elimination limit a floating-point LP is tried first; its
//! solution is rounded to integers and only accepted after an exact check.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<i64>,
    pub strict: bool,
}

#[derive(Clone, Debug, Default)]
pub struct HomogeneousSystem {
    dim: usize,
    rows: Vec<Constraint>,
}

/// Largest system handed to elimination before switching to the simplex.
const FM_ROW_LIMIT: usize = 4000;
pub const FM_MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FmOutcome {
    Feasible(Vec<BigRational>),
    Infeasible,
    /// Coefficients overflowed or the system grew too large.
    GaveUp,
}

impl HomogeneousSystem {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn push(&mut self, coeffs: Vec<i64>, strict: bool) {
        assert_eq!(coeffs.len(), self.dim);
        self.rows.push(Constraint { coeffs, strict });
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        self.rows.iter().all(|row| {
            let v: BigRational = row
                .coeffs
                .iter()
                .zip(x)
                .map(|(&c, xi)| xi * BigRational::from_integer(BigInt::from(c)))
                .sum();
            if row.strict {
                v.is_positive()
            } else {
                !v.is_negative()
            }
        })
    }

    /// Fourier–Motzkin for small dimensions. Otherwise a verified float
    /// candidate, then the exact simplex.
    pub fn solve(&self) -> Option<Vec<BigRational>> {
        if self.dim <= FM_MAX_DIM {
            match self.solve_fm() {
                FmOutcome::Feasible(x) => return Some(x),
                FmOutcome::Infeasible => return None,
                FmOutcome::GaveUp => {}
            }
        } else if let Some(x) = self.float_candidate() {
            return Some(x.into_iter().map(|v| BigRational::from_integer(BigInt::from(v))).collect());
        }
        self.solve_simplex()
    }

    /// Exact check of an integer point.
    pub fn satisfied_by_integers(&self, x: &[i64]) -> bool {
        self.rows.iter().all(|row| {
            let v: i128 = row.coeffs.iter().zip(x).map(|(&c, &xi)| c as i128 * xi as i128).sum();
            if row.strict {
                v > 0
            } else {
                v >= 0
            }
        })
    }

    /// Integer point from a float LP with margin 1 on strict rows, or `None`
    /// if the float solver fails or no scaled rounding passes the exact check.
    pub fn float_candidate(&self) -> Option<Vec<i64>> {
        use microlp::{ComparisonOp, OptimizationDirection, Problem};
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = (0..self.dim)
            .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        for row in &self.rows {
            let expr: Vec<_> = vars.iter().zip(&row.coeffs).map(|(&v, &c)| (v, c as f64)).collect();
            lp.add_constraint(expr, ComparisonOp::Ge, if row.strict { 1.0 } else { 0.0 });
        }
        let sol = lp.solve().ok()?;
        let sol = sol.solution()?;
        let x: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
        // vertices have small denominators; large scales absorb rounding
        let scales = (1..=12).map(f64::from).chain((4..=20).map(|e| f64::from(1u32 << e)));
        for s in scales {
            let y: Option<Vec<i64>> = x
                .iter()
                .map(|&v| {
                    let r = (v * s).round();
                    (r.abs() < 1e15).then_some(r as i64)
                })
                .collect();
            if let Some(y) = y {
                if self.satisfied_by_integers(&y) {
                    return Some(y);
                }
            }
        }
        None
    }

    pub fn solve_fm(&self) -> FmOutcome {
        let mut levels: Vec<Vec<FmRow>> = Vec::with_capacity(self.dim + 1);
        let mut current: Vec<FmRow> = Vec::new();
        for row in &self.rows {
            match FmRow::new(row.coeffs.iter().map(|&c| c as i128).collect(), row.strict) {
                Some(r) => current.push(r),
                None => return FmOutcome::Infeasible,
            }
        }
        current = dedup_rows(current);
        for var in (0..self.dim).rev() {
            levels.push(current.clone());
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
            for r in current {
                match r.coeffs[var].signum() {
                    1 => pos.push(r),
                    -1 => neg.push(r),
                    _ => rest.push(r),
                }
            }
            if rest.len() + pos.len() * neg.len() > FM_ROW_LIMIT {
                return FmOutcome::GaveUp;
            }
            for p in &pos {
                for q in &neg {
                    let (a, b) = (p.coeffs[var], -q.coeffs[var]);
                    let mut coeffs = Vec::with_capacity(self.dim);
                    for k in 0..self.dim {
                        let v = b
                            .checked_mul(p.coeffs[k])
                            .and_then(|x| a.checked_mul(q.coeffs[k]).and_then(|y| x.checked_add(y)));
                        match v {
                            Some(v) => coeffs.push(v),
                            None => return FmOutcome::GaveUp,
                        }
                    }
                    match FmRow::new(coeffs, p.strict || q.strict) {
                        Some(r) => rest.push(r),
                        None => return FmOutcome::Infeasible,
                    }
                }
            }
            current = dedup_rows(rest);
        }
        // back-substitution: level i constrains variables 0..=dim-1-i
        let mut x: Vec<BigRational> = vec![BigRational::zero(); self.dim];
        for var in 0..self.dim {
            let rows = &levels[self.dim - 1 - var];
            let mut lower: Option<(BigRational, bool)> = None;
            let mut upper: Option<(BigRational, bool)> = None;
            for r in rows {
                let a = r.coeffs[var];
                if a == 0 {
                    continue;
                }
                let rest: BigRational = (0..var)
                    .map(|k| &x[k] * BigRational::from_integer(BigInt::from(r.coeffs[k])))
                    .sum();
                let bound = -rest / BigRational::from_integer(BigInt::from(a));
                if a > 0 {
                    tighten(&mut lower, bound, r.strict, true);
                } else {
                    tighten(&mut upper, bound, r.strict, false);
                }
            }
            x[var] = match (lower, upper) {
                (None, None) => BigRational::zero(),
                (Some((l, _)), None) => l + BigRational::one(),
                (None, Some((u, _))) => u - BigRational::one(),
                (Some((l, ls)), Some((u, us))) => {
                    if l < u {
                        (l + u) / BigRational::from_integer(BigInt::from(2))
                    } else {
                        debug_assert!(l == u && !ls && !us);
                        l
                    }
                }
            };
        }
        debug_assert!(self.satisfied_by(&x));
        FmOutcome::Feasible(x)
    }

    /// Two-phase simplex on `x = x⁺ − x⁻`, minimizing the artificial sum.
    pub fn solve_simplex(&self) -> Option<Vec<BigRational>> {
        let m = self.rows.len();
        if m == 0 {
            return Some(vec![BigRational::zero(); self.dim]);
        }
        // columns: x⁺ (dim), x⁻ (dim), surplus (m), artificial (strict rows)
        let strict_rows: Vec<usize> = (0..m).filter(|&i| self.rows[i].strict).collect();
        let n_struct = 2 * self.dim;
        let surplus0 = n_struct;
        let art0 = surplus0 + m;
        let ncols = art0 + strict_rows.len();
        let mut tab = Tableau::new(m, ncols);
        let mut art_of_row = vec![None; m];
        for (ai, &i) in strict_rows.iter().enumerate() {
            art_of_row[i] = Some(art0 + ai);
        }
        for (i, row) in self.rows.iter().enumerate() {
            // strict: a·x − s + art = 1, basis art
            // non-strict: −a·x + s = 0, basis s
            let sign: i64 = if row.strict { 1 } else { -1 };
            for (k, &c) in row.coeffs.iter().enumerate() {
                tab.set(i, k, sign * c);
                tab.set(i, self.dim + k, -sign * c);
            }
            tab.set(i, surplus0 + i, -sign);
            if let Some(a) = art_of_row[i] {
                tab.set(i, a, 1);
                tab.rhs[i] = BigRational::one();
                tab.basis[i] = a;
            } else {
                tab.basis[i] = surplus0 + i;
            }
        }
        // objective: minimize Σ art  ⇔ reduced costs from rows with artificials
        let mut cost = vec![BigRational::zero(); ncols];
        for c in &mut cost[art0..] {
            *c = BigRational::one();
        }
        tab.minimize(&cost);
        if !tab.objective(&cost).is_zero() {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.dim];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < self.dim {
                x[b] += &tab.rhs[i];
            } else if b < n_struct {
                x[b - self.dim] -= &tab.rhs[i];
            }
        }
        debug_assert!(self.satisfied_by(&x));
        Some(x)
    }
}

fn tighten(slot: &mut Option<(BigRational, bool)>, value: BigRational, strict: bool, lower: bool) {
    let replace = match slot {
        None => true,
        Some((v, s)) => {
            if lower {
                value > *v || (value == *v && strict && !*s)
            } else {
                value < *v || (value == *v && strict && !*s)
            }
        }
    };
    if replace {
        *slot = Some((value, strict));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct FmRow {
    coeffs: Vec<i128>,
    strict: bool,
}

impl FmRow {
    /// Normalizes by the gcd. Returns `None` for the contradiction `0 > 0`;
    /// the tautology `0 ≥ 0` is kept as an all-zero row and dropped later.
    fn new(mut coeffs: Vec<i128>, strict: bool) -> Option<Self> {
        let g = coeffs.iter().fold(0i128, |g, &c| g.gcd(&c));
        if g == 0 {
            return (!strict).then_some(Self { coeffs, strict });
        }
        for c in &mut coeffs {
            *c /= g;
        }
        Some(Self { coeffs, strict })
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Drops tautologies and duplicates; a strict row subsumes its non-strict twin.
fn dedup_rows(mut rows: Vec<FmRow>) -> Vec<FmRow> {
    rows.retain(|r| !r.is_trivial());
    rows.sort();
    let mut out: Vec<FmRow> = Vec::with_capacity(rows.len());
    for r in rows {
        match out.last_mut() {
            Some(last) if last.coeffs == r.coeffs => last.strict |= r.strict,
            _ => out.push(r),
        }
    }
    out
}

struct Tableau {
    a: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: usize, n: usize) -> Self {
        Self {
            a: vec![vec![BigRational::zero(); n]; m],
            rhs: vec![BigRational::zero(); m],
            basis: vec![0; m],
        }
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i][j] = BigRational::from_integer(BigInt::from(v));
    }

    fn objective(&self, cost: &[BigRational]) -> BigRational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, r)| &cost[b] * r)
            .sum()
    }

    fn reduced_cost(&self, cost: &[BigRational], j: usize) -> BigRational {
        let mut rc = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.a[i][j].is_zero() {
                rc -= &cost[b] * &self.a[i][j];
            }
        }
        rc
    }

    /// Bland's rule: smallest improving column, smallest basic index on ties.
    fn minimize(&mut self, cost: &[BigRational]) {
        let ncols = cost.len();
        loop {
            let Some(enter) = (0..ncols).find(|&j| self.reduced_cost(cost, j).is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.a.len() {
                if self.a[i][enter].is_positive() {
                    let ratio = &self.rhs[i] / &self.a[i][enter];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                // unbounded below cannot happen for a non-negative objective
                return;
            };
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col].clone();
        for v in self.a[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let pivot_row = self.a[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let f = self.a[i][col].clone();
            for (v, pv) in self.a[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }
}

/// Clears denominators and divides by the common gcd, giving the primitive
/// integer vector on the same ray. Entries must be non-negative.
pub fn integerize(x: &[BigRational]) -> Vec<BigInt> {
    let lcm = x
        .iter()
        .fold(BigInt::one(), |l, v| l.lcm(v.denom()));
    let ints: Vec<BigInt> = x
        .iter()
        .map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}
