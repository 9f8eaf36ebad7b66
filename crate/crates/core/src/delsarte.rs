//! The radial Delsarte linear program, solved exactly.
//!
//! The full program ranges over all `f : {0,1}^n → R` with `f(0) = 1`,
//! `f ≥ 0`, `f̂ ≥ 0` and `f = 0` on weights `1..d-1`, maximizing `Σ_x f(x)`.
//! Averaging a feasible `f` over coordinate permutations keeps every
//! constraint and the objective, so some optimum is radial and it suffices
//! to optimize over profiles `a_0 = 1, a_d, ..., a_n ≥ 0` subject to
//! `Σ_k a_k K_k(i) ≥ 0` for `i = 0..n`, maximizing `Σ_k C(n,k) a_k`.
//!
//! The simplex method runs over `BigRational` with Bland's rule, so it
//! terminates and its output is exact. Dual prices from the final tableau
//! are turned into a radial `g` profile, but soundness of any reported dual
//! bound still goes through [`dual_value`], which re-checks feasibility.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::certificate::{check_dual_feasible, profile_bound};
use crate::error::{Error, Result};
use crate::radial::{
    all_nonneg, binomial_row, krawtchouk_table, radial_sum, radial_transform_with, KrawtchoukTable,
    LevelProfile,
};
use crate::rational::{to_ratio_string, uint};

pub const DEFAULT_LP_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpInstance {
    pub n: usize,
    pub d: usize,
}

impl LpInstance {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 || d > n {
            return Err(Error::InvalidParameter(format!("need 1 <= d <= n, got n={n}, d={d}")));
        }
        Ok(Self { n, d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpSolution {
    pub n: usize,
    pub d: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
    #[serde(serialize_with = "ser_profile_values")]
    pub profile: LevelProfile,
    pub status: LpStatus,
    /// Shadow price of the constraint `Σ_k a_k K_k(i) ≥ 0`, indexed by `i`.
    #[serde(skip)]
    pub duals: Vec<BigRational>,
    #[serde(skip)]
    pub pivots: usize,
}

fn ser_ratio<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_ratio_string(v))
}

fn ser_profile_values<S: Serializer>(p: &LevelProfile, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(p.values().iter().map(to_ratio_string))
}

impl LpSolution {
    /// The radial dual solution encoded by the shadow prices:
    /// `F[g][i] = w_i / C(n,i)` with `w_0 = 1 + y_0` and `w_i = y_i`.
    /// At an optimum `g(0)/ĝ(0)` equals the primal value.
    pub fn dual_profile(&self) -> LevelProfile {
        let n = self.n;
        let binom = binomial_row(n);
        let transform: Vec<BigRational> = self
            .duals
            .iter()
            .enumerate()
            .map(|(i, y)| {
                let w = if i == 0 { y + BigRational::one() } else { y.clone() };
                w / uint(&binom[i])
            })
            .collect();
        let table = krawtchouk_table(n);
        let t = LevelProfile::new(n, transform).expect("dual vector has n+1 entries");
        radial_transform_with(&t, &table)
    }

    /// Complementary-slackness certificate: primal feasible, shadow prices
    /// dual feasible, and equal objective values.
    pub fn certify(&self) -> bool {
        let Ok(inst) = LpInstance::new(self.n, self.d) else { return false };
        if self.status != LpStatus::Optimal || !verify_primal(&self.profile, &inst) {
            return false;
        }
        if self.duals.len() != self.n + 1 || !all_nonneg(&self.duals) {
            return false;
        }
        let table = krawtchouk_table(self.n);
        let binom = binomial_row(self.n);
        let dual_ok = (self.d..=self.n).all(|k| {
            let lhs = self.duals.iter().enumerate().fold(BigRational::zero(), |acc, (i, y)| {
                acc - y * BigRational::from_integer(table.get(k, i).clone())
            });
            lhs >= uint(&binom[k])
        });
        let dual_obj = self.duals.iter().fold(BigRational::one(), |acc, y| acc + y);
        dual_ok && dual_obj == self.value
    }
}

/// Max `c·x` subject to `A x ≤ b`, `x ≥ 0`, with `b ≥ 0` so the slack basis
/// is feasible from the start.
struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    reduced: Vec<BigRational>,
    objective: BigRational,
    basis: Vec<usize>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(a: Vec<Vec<BigRational>>, b: Vec<BigRational>, c: Vec<BigRational>) -> Self {
        let m = a.len();
        let nv = c.len();
        let rows = a
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        let mut reduced = c;
        reduced.extend(std::iter::repeat_n(BigRational::zero(), m));
        Self {
            rows,
            rhs: b,
            reduced,
            objective: BigRational::zero(),
            basis: (nv..nv + m).collect(),
            pivots: 0,
        }
    }

    fn run(&mut self) -> Outcome {
        loop {
            // Bland: lowest-index improving column.
            let Some(q) = self.reduced.iter().position(|z| z.is_positive()) else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &row[q];
                let better = match &leave {
                    None => true,
                    Some((p, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*p])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, _)) = leave else { return Outcome::Unbounded };
            self.pivot(p, q);
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = BigRational::one() / &self.rows[p][q];
        for v in self.rows[p].iter_mut() {
            *v *= &inv;
        }
        self.rhs[p] *= &inv;
        let prow = self.rows[p].clone();
        let prhs = self.rhs[p].clone();
        for i in 0..self.rows.len() {
            if i == p || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &prhs;
        }
        let f = self.reduced[q].clone();
        for (v, pv) in self.reduced.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
        self.objective += &f * &prhs;
        self.basis[p] = q;
        self.pivots += 1;
    }
}

/// Solves the radial Delsarte LP with constraints in natural order.
pub fn solve_primal(inst: &LpInstance) -> Result<LpSolution> {
    let order: Vec<usize> = (0..=inst.n).collect();
    solve_primal_with_order(inst, &order)
}

/// Same LP with the constraint rows `Σ_k a_k K_k(i) ≥ 0` listed in the given
/// order of `i`. Bland's rule makes the pivot path depend on that order; the
/// optimal value does not.
pub fn solve_primal_with_order(inst: &LpInstance, order: &[usize]) -> Result<LpSolution> {
    let LpInstance { n, d } = *inst;
    if n > DEFAULT_LP_LIMIT {
        return Err(Error::DimensionTooLarge { what: "LP", n, limit: DEFAULT_LP_LIMIT });
    }
    let mut seen = vec![false; n + 1];
    if order.len() != n + 1 || order.iter().any(|&i| i > n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidParameter("constraint order must permute 0..=n".into()));
    }
    let table = krawtchouk_table(n);
    let binom = binomial_row(n);
    let levels: Vec<usize> = (d..=n).collect();

    // 1 + Σ_k a_k K_k(i) ≥ 0  ⇔  -Σ_k K_k(i) a_k ≤ 1
    let a: Vec<Vec<BigRational>> = order
        .iter()
        .map(|&i| levels.iter().map(|&k| BigRational::from_integer(-table.get(k, i))).collect())
        .collect();
    let b = vec![BigRational::one(); n + 1];
    let c: Vec<BigRational> = levels.iter().map(|&k| uint(&binom[k])).collect();
    let nv = c.len();

    let mut tab = Tableau::new(a, b, c);
    let outcome = tab.run();

    let mut values = vec![BigRational::zero(); n + 1];
    values[0] = BigRational::one();
    for (row, &var) in tab.basis.iter().enumerate() {
        if var < nv {
            values[levels[var]] = tab.rhs[row].clone();
        }
    }
    let profile = LevelProfile::new(n, values)?;
    let mut duals = vec![BigRational::zero(); n + 1];
    for (pos, &i) in order.iter().enumerate() {
        duals[i] = -tab.reduced[nv + pos].clone();
    }
    let (status, value) = match outcome {
        Outcome::Optimal => (LpStatus::Optimal, BigRational::one() + &tab.objective),
        Outcome::Unbounded => (LpStatus::Unbounded, radial_sum(&profile)),
    };
    debug_assert!(status != LpStatus::Optimal || value == radial_sum(&profile));
    Ok(LpSolution { n, d, value, profile, status, duals, pivots: tab.pivots })
}

/// Exact check of the four primal constraint families for a radial profile.
pub fn verify_primal(profile: &LevelProfile, inst: &LpInstance) -> bool {
    verify_primal_with(profile, inst, &krawtchouk_table(inst.n))
}

pub(crate) fn verify_primal_with(profile: &LevelProfile, inst: &LpInstance, table: &KrawtchoukTable) -> bool {
    if profile.n() != inst.n || !profile.get(0).is_one() {
        return false;
    }
    if (1..inst.d).any(|k| !profile.get(k).is_zero()) {
        return false;
    }
    all_nonneg(profile.values()) && all_nonneg(radial_transform_with(profile, table).values())
}

/// The bound `g(0)/ĝ(0)` of a dual-feasible radial `g`; errors if `g` fails
/// the feasibility check.
pub fn dual_value(g: &LevelProfile, inst: &LpInstance) -> Result<BigRational> {
    if g.n() != inst.n {
        return Err(Error::DimensionMismatch { left: g.n(), right: inst.n });
    }
    let check = check_dual_feasible(g, inst.d);
    if !check.feasible() {
        let msg: Vec<String> = check.violations.iter().map(ToString::to_string).collect();
        return Err(Error::InfeasibleDual(msg.join("; ")));
    }
    profile_bound(g)
}
