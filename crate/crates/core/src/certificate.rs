//! Dual certificates `g = φ·Γ²` for the Delsarte bound.
//!
//! The walk certificate uses `φ_m(x) = (n - 2|x|)^m - (n - 2d)^m` and
//! `Γ̂_r = L_r + L_{r-1}`, with `Γ = F[Γ̂]`, i.e. `Γ(x) = K_r(|x|) + K_{r-1}(|x|)`.
//! Unnormalized, `F[g] = 2^n·((A^m - c)Γ̂ ⊛ Γ̂)` where `A` is the cube
//! adjacency matrix, `c = (n - 2d)^m` and `⊛` is the unnormalized
//! convolution. Hence `F[g] ≥ 2^n·Γ̂⊛Γ̂ ≥ 0` as soon as
//! `A^m Γ̂ ≥ (c + 1)·Γ̂`, which for odd `m` reduces to the two integer
//! inequalities `P_{r,m,-1} ≥ c + 1` and `P_{r-1,m,1} ≥ c + 1`.
//!
//! The same identity gives the bound in closed form:
//! `g(0)/ĝ(0) = φ(0)·S² / (C(n,r)(P_{r,m,-1} - c) + C(n,r-1)(P_{r-1,m,1} - c))`
//! with `S = C(n,r) + C(n,r-1)`. [`auto_select`] ranks grid points with it;
//! [`exact_bound`] always evaluates the profile directly.

use std::fmt;

use log::{debug, warn};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::radial::{
    binomial, krawtchouk_rows, krawtchouk_table, radial_sum, radial_transform_with, LevelProfile,
};
use crate::rational::{int, log2_ratio, to_ratio_string};
use crate::walks::walk_counts;

/// The walk certificate for parameters `(n, d, m, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub d: usize,
    pub m: u32,
    pub r: usize,
    pub phi: LevelProfile,
    pub gamma_hat: LevelProfile,
    pub gamma: LevelProfile,
    pub g: LevelProfile,
}

impl Certificate {
    /// `d > n/2`: `(n - 2d)^m` is negative and the bound is not interesting.
    pub fn trivial_regime(&self) -> bool {
        2 * self.d > self.n
    }
}

fn validate(n: usize, d: usize, r: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if d == 0 || d > n {
        return Err(Error::InvalidParameter(format!("need 1 <= d <= n, got d={d}, n={n}")));
    }
    if r == 0 || r > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= r <= n (levels r and r-1 are both used), got r={r}"
        )));
    }
    Ok(())
}

fn phi_values(n: usize, d: usize, m: u32) -> Vec<BigInt> {
    let c = BigInt::from(n as i64 - 2 * d as i64).pow(m);
    (0..=n).map(|k| BigInt::from(n as i64 - 2 * k as i64).pow(m) - &c).collect()
}

/// Builds `φ_m`, `Γ̂_r`, `Γ_r` and `g = φ_m·Γ_r²` exactly.
pub fn build_certificate(n: usize, d: usize, m: u32, r: usize) -> Result<Certificate> {
    validate(n, d, r)?;
    if m.is_multiple_of(2) {
        return Err(Error::EvenExponent(m));
    }
    let phi = phi_values(n, d, m);
    let rows = krawtchouk_rows(n, r);
    let gamma: Vec<BigInt> = (0..=n).map(|k| &rows[r][k] + &rows[r - 1][k]).collect();
    let g: Vec<BigInt> = phi.iter().zip(&gamma).map(|(p, gm)| p * gm * gm).collect();

    let mut gamma_hat = LevelProfile::level_indicator(n, r);
    let mut vals = gamma_hat.clone().into_values();
    vals[r - 1] = BigRational::one();
    gamma_hat = LevelProfile::new(n, vals)?;

    Ok(Certificate {
        n,
        d,
        m,
        r,
        phi: LevelProfile::from_integers(n, phi)?,
        gamma_hat,
        gamma: LevelProfile::from_integers(n, gamma)?,
        g: LevelProfile::from_integers(n, g)?,
    })
}

fn ser_int<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Exact walk-criterion verdict for a walk certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `(n - 2d)^m + 1`.
    #[serde(serialize_with = "ser_int")]
    pub threshold: BigInt,
    /// `P_{r,m,-1}`.
    #[serde(serialize_with = "ser_int")]
    pub walks_r: BigInt,
    /// `P_{r-1,m,1}`.
    #[serde(serialize_with = "ser_int")]
    pub walks_r_minus_1: BigInt,
    #[serde(serialize_with = "ser_int")]
    pub margin_r: BigInt,
    #[serde(serialize_with = "ser_int")]
    pub margin_r_minus_1: BigInt,
    pub parity_ok: bool,
    pub sign_ok: bool,
}

/// Checks `A^m(L_r + L_{r-1}) ≥ ((n-2d)^m + 1)(L_r + L_{r-1})` through the
/// exact walk counts. A feasible verdict implies `g` is dual feasible.
pub fn check_feasibility_walks(n: usize, d: usize, m: u32, r: usize) -> Result<FeasibilityReport> {
    validate(n, d, r)?;
    let base = BigInt::from(n as i64 - 2 * d as i64);
    let c = base.clone().pow(m);
    let threshold: BigInt = &c + 1;
    let sign_ok = (d..=n).all(|k| BigInt::from(n as i64 - 2 * k as i64).pow(m) <= c);
    let parity_ok = m % 2 == 1;
    let to_int = |u: BigUint| BigInt::from_biguint(Sign::Plus, u);
    let walks_r = to_int(walk_counts(n, r, m).at_offset(-1));
    let walks_r_minus_1 = to_int(walk_counts(n, r - 1, m).at_offset(1));
    let margin_r = &walks_r - &threshold;
    let margin_r_minus_1 = &walks_r_minus_1 - &threshold;
    let feasible =
        parity_ok && sign_ok && !margin_r.is_negative() && !margin_r_minus_1.is_negative();
    Ok(FeasibilityReport {
        feasible,
        threshold,
        walks_r,
        walks_r_minus_1,
        margin_r,
        margin_r_minus_1,
        parity_ok,
        sign_ok,
    })
}

/// One failed condition of dual feasibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `g(x) > 0` at a level `≥ d`.
    Sign { level: usize },
    /// `F[g] < 0` at a level.
    NegativeTransform { level: usize },
    /// `F[g](0) ≤ 0`.
    TransformAtZero,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Sign { level } => write!(f, "sign violation at level {level}"),
            Violation::NegativeTransform { level } => {
                write!(f, "negative transform at level {level}")
            }
            Violation::TransformAtZero => write!(f, "ĝ(0) not positive"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCheck {
    pub violations: Vec<Violation>,
}

impl DualCheck {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact check of `ĝ ≥ 0`, `ĝ(0) > 0` and `g ≤ 0` on levels `≥ d`.
pub fn check_dual_feasible(g: &LevelProfile, d: usize) -> DualCheck {
    let n = g.n();
    let mut violations = Vec::new();
    for k in d..=n {
        if g.get(k).is_positive() {
            violations.push(Violation::Sign { level: k });
        }
    }
    let t = radial_transform_with(g, &krawtchouk_table(n));
    if !t.get(0).is_positive() {
        violations.push(Violation::TransformAtZero);
    }
    for (i, v) in t.values().iter().enumerate() {
        if v.is_negative() {
            violations.push(Violation::NegativeTransform { level: i });
        }
    }
    DualCheck { violations }
}

/// `g(0)/ĝ(0) = g[0]·2^n / Σ_k C(n,k)·g[k]` for any radial `g`. Errors when
/// the denominator is not positive.
pub fn profile_bound(g: &LevelProfile) -> Result<BigRational> {
    let denom = radial_sum(g);
    if !denom.is_positive() {
        return Err(Error::NonPositiveDenominator(to_ratio_string(&denom)));
    }
    let two_n = BigRational::from_integer(BigInt::one() << g.n());
    Ok(g.get(0) * two_n / denom)
}

/// The bound `A(n,d) ≤ g(0)/ĝ(0)` carried by a certificate.
pub fn exact_bound(cert: &Certificate) -> Result<BigRational> {
    profile_bound(&cert.g)
}

/// `φ(0)·|supp Γ̂|`, and `2·n^m·C(n,r)` when that cruder form applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportBound {
    pub value: BigInt,
    pub crude: Option<BigUint>,
}

pub fn support_bound(cert: &Certificate) -> SupportBound {
    let (n, r) = (cert.n, cert.r);
    let support = binomial(n as u64, r as i64) + binomial(n as u64, r as i64 - 1);
    let phi0 = cert.phi.get(0).to_integer();
    let value = phi0 * BigInt::from_biguint(Sign::Plus, support);
    // phi(0) <= n^m needs n - 2d >= 0; C(n,r-1) <= C(n,r) needs r <= n/2.
    let crude = (2 * r <= n && 2 * cert.d <= n).then(|| {
        BigUint::from(2u32) * BigUint::from(n).pow(cert.m) * binomial(n as u64, r as i64)
    });
    SupportBound { value, crude }
}

/// Closed-form `g(0)/ĝ(0)` of a walk certificate with odd `m` from the walk
/// counts. `None` when the denominator is not positive.
pub fn walk_bound(n: usize, d: usize, m: u32, r: usize, walks_r: &BigInt, walks_r_minus_1: &BigInt) -> Option<BigRational> {
    let c = BigInt::from(n as i64 - 2 * d as i64).pow(m);
    let phi0 = BigInt::from(n).pow(m) - &c;
    let cr = BigInt::from_biguint(Sign::Plus, binomial(n as u64, r as i64));
    let cr1 = BigInt::from_biguint(Sign::Plus, binomial(n as u64, r as i64 - 1));
    let s = &cr + &cr1;
    let denom = &cr * (walks_r - &c) + &cr1 * (walks_r_minus_1 - &c);
    if !denom.is_positive() {
        return None;
    }
    Some(BigRational::new(phi0 * &s * &s, denom))
}

/// Search grid for [`auto_select`].
#[derive(Debug, Clone, Default)]
pub struct SearchGrid {
    /// Largest offset above the lower edge `⌈n/2 - sqrt(d(n-d))⌉`. `None`
    /// scans up to `⌈n/2⌉`.
    pub max_offset: Option<usize>,
    /// Largest odd `m`. `None` uses [`default_max_m`].
    pub max_m: Option<u32>,
}

impl SearchGrid {
    pub fn max_m_for(&self, n: usize) -> u32 {
        self.max_m.unwrap_or_else(|| default_max_m(n))
    }
}

/// `max(9, ⌈2√n⌉)` rounded up to odd. Logarithmic caps leave the bound
/// visibly loose at a few hundred coordinates.
pub fn default_max_m(n: usize) -> u32 {
    let four_n = 4 * n as u64;
    let s = four_n.sqrt();
    let m = if s * s < four_n { s + 1 } else { s } as u32;
    let m = if m.is_multiple_of(2) { m + 1 } else { m };
    m.max(9)
}

/// Smallest `r ≥ 1` with `|r - n/2| ≤ sqrt(d(n-d))` on the low side, i.e.
/// `(n - 2r)² ≤ 4d(n-d)` or `2r ≥ n`; computed in integers.
pub fn lower_edge(n: usize, d: usize) -> usize {
    let rhs = 4 * (d as u128) * ((n - d.min(n)) as u128);
    (1..=n)
        .find(|&r| 2 * r >= n || ((n - 2 * r) as u128).pow(2) <= rhs)
        .unwrap_or(n)
}

/// Outcome of [`auto_select`]: the certificate and its bound.
#[derive(Debug, Clone)]
pub struct Selection {
    pub certificate: Certificate,
    pub bound: BigRational,
    pub report: FeasibilityReport,
}

/// Searches odd `m` and `r` near the lower edge for the walk-feasible pair
/// with the smallest bound; ties go to the smallest `r`, then smallest `m`.
pub fn auto_select(n: usize, d: usize) -> Result<Selection> {
    auto_select_with(n, d, &SearchGrid::default())
}

pub fn auto_select_with(n: usize, d: usize, grid: &SearchGrid) -> Result<Selection> {
    if d == 0 || 2 * d > n {
        return Err(Error::InvalidParameter(format!(
            "auto selection needs 1 <= d <= n/2, got n={n}, d={d}"
        )));
    }
    let r_lo = lower_edge(n, d);
    let r_top = n.div_ceil(2).max(r_lo);
    let r_hi = match grid.max_offset {
        Some(w) => (r_lo + w).min(r_top),
        None => r_top,
    };
    let max_m = grid.max_m_for(n);
    let c_base = BigInt::from(n as i64 - 2 * d as i64);
    let growth_beats = |r: usize| 4.0 * (r * (n - r)) as f64 > ((n - 2 * d) as f64).powi(2);

    let best = (r_lo..=r_hi)
        .into_par_iter()
        .filter_map(|r| {
            let up = walk_counts_all(n, r, max_m, -1);
            let down = walk_counts_all(n, r - 1, max_m, 1);
            let mut best: Option<(BigRational, usize, u32)> = None;
            let mut crossed = false;
            let mut monotone = true;
            for m in (3..=max_m).step_by(2) {
                let threshold: BigInt = c_base.clone().pow(m) + 1;
                let (pr, pr1) = (&up[m as usize], &down[m as usize]);
                let ok = pr >= &threshold && pr1 >= &threshold;
                if ok {
                    crossed = true;
                } else if crossed {
                    monotone = false;
                }
                if !ok {
                    continue;
                }
                if let Some(b) = walk_bound(n, d, m, r, pr, pr1) {
                    if best.as_ref().is_none_or(|(bb, _, _)| &b < bb) {
                        best = Some((b, r, m));
                    }
                }
            }
            if !monotone && growth_beats(r) {
                warn!("margin at n={n} d={d} r={r} changes sign more than once over odd m");
            }
            best
        })
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let (bound, r, m) = best.ok_or(Error::NoFeasibleCertificate { n, d })?;
    debug!("auto_select n={n} d={d}: r={r} m={m} bound≈2^{:.3}", log2_ratio(&bound));
    let certificate = build_certificate(n, d, m, r)?;
    let report = check_feasibility_walks(n, d, m, r)?;
    debug_assert!(report.feasible);
    Ok(Selection { certificate, bound, report })
}

/// `P_{r,t,j}` for every `t ≤ max_m`, from one DP run.
fn walk_counts_all(n: usize, r: usize, max_m: u32, j: i64) -> Vec<BigInt> {
    let target = r as i64 + j;
    let mut out = vec![BigInt::zero(); max_m as usize + 1];
    if target < 0 || target > n as i64 {
        return out;
    }
    let target = target as usize;
    let lo = r.saturating_sub(max_m as usize);
    let hi = (r + max_m as usize).min(n);
    let width = hi - lo + 1;
    let mut cur = vec![BigInt::zero(); width];
    cur[r - lo] = BigInt::one();
    if target == r {
        out[0] = BigInt::one();
    }
    for slot in out.iter_mut().skip(1) {
        let next: Vec<BigInt> = (0..width)
            .map(|i| {
                let level = lo + i;
                let mut acc = BigInt::zero();
                if i > 0 {
                    acc += &cur[i - 1] * (n - level + 1);
                }
                if i + 1 < width {
                    acc += &cur[i + 1] * (level + 1);
                }
                acc
            })
            .collect();
        cur = next;
        *slot = cur[target - lo].clone();
    }
    out
}

/// The comparison certificate with `φ(x) = 2(d - |x|)` and
/// `Γ(x) = Σ_{j≤r} C(n,j)^{-1} K_j(d) K_j(|x|)`. Nothing is asserted about
/// feasibility; run [`check_dual_feasible`] on `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MrrwCertificate {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub phi: LevelProfile,
    pub gamma_hat: LevelProfile,
    pub gamma: LevelProfile,
    pub g: LevelProfile,
}

pub fn build_mrrw_certificate(n: usize, d: usize, r: usize) -> Result<MrrwCertificate> {
    if n == 0 || d == 0 || d > n || r > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= d <= n and r <= n, got n={n}, d={d}, r={r}"
        )));
    }
    let rows = krawtchouk_rows(n, r);
    let mut gamma_hat = vec![BigRational::zero(); n + 1];
    for (j, row) in rows.iter().enumerate() {
        gamma_hat[j] = BigRational::new(row[d].clone(), BigInt::from(binomial(n as u64, j as i64)));
    }
    let gamma: Vec<BigRational> = (0..=n)
        .map(|k| {
            rows.iter()
                .zip(&gamma_hat)
                .fold(BigRational::zero(), |acc, (row, w)| acc + w * BigRational::from_integer(row[k].clone()))
        })
        .collect();
    let phi: Vec<BigRational> = (0..=n).map(|k| int(2 * (d as i64 - k as i64))).collect();
    let g: Vec<BigRational> = phi.iter().zip(&gamma).map(|(p, gm)| p * gm * gm).collect();
    Ok(MrrwCertificate {
        n,
        d,
        r,
        phi: LevelProfile::new(n, phi)?,
        gamma_hat: LevelProfile::new(n, gamma_hat)?,
        gamma: LevelProfile::new(n, gamma)?,
        g: LevelProfile::new(n, g)?,
    })
}
