//! Bound reports, rate–distance curves and parameter sweeps behind the CLI.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::certificate::{
    auto_select, build_certificate, check_dual_feasible, check_feasibility_walks, exact_bound,
    support_bound, Certificate,
};
use crate::codes::{max_code, Code};
use crate::delsarte::{solve_primal, LpInstance};
use crate::error::{Error, Result};
use crate::radial::binary_entropy;
use crate::rational::{log2_ratio, to_ratio_string};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Certificate,
    Lp,
    Oracle,
    Support,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Certificate, Method::Lp, Method::Oracle, Method::Support];

    pub fn name(self) -> &'static str {
        match self {
            Method::Certificate => "certificate",
            Method::Lp => "lp",
            Method::Oracle => "oracle",
            Method::Support => "support",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

/// Explicit certificate parameters; both or neither must be given.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub m: Option<u32>,
    pub r: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    pub method: Method,
    #[serde(serialize_with = "ser_ratio")]
    pub bound: BigRational,
    /// `log2(bound) / n`.
    pub exponent: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
}

fn ser_ratio<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_ratio_string(v))
}

impl BoundReport {
    fn new(n: usize, d: usize, method: Method, bound: BigRational) -> Self {
        let exponent = log2_ratio(&bound) / n as f64;
        Self { n, d, method, bound, exponent, m: None, r: None }
    }
}

/// A walk certificate for `(n, d)`: the given `(m, r)` if present, else the
/// auto-selected one. Errors unless the certificate is dual feasible.
pub fn select_certificate(n: usize, d: usize, ov: Overrides) -> Result<Certificate> {
    let cert = match (ov.m, ov.r) {
        (Some(m), Some(r)) => build_certificate(n, d, m, r)?,
        (None, None) => auto_select(n, d)?.certificate,
        _ => return Err(Error::InvalidParameter("--m and --r must be given together".into())),
    };
    let walks = check_feasibility_walks(cert.n, cert.d, cert.m, cert.r)?;
    if !walks.feasible {
        let check = check_dual_feasible(&cert.g, d);
        if !check.feasible() {
            let msg: Vec<String> = check.violations.iter().map(ToString::to_string).collect();
            return Err(Error::InfeasibleDual(format!(
                "m={} r={}: walk margins ({}, {}); {}",
                cert.m,
                cert.r,
                walks.margin_r,
                walks.margin_r_minus_1,
                msg.join("; ")
            )));
        }
    }
    Ok(cert)
}

pub fn bound_report(n: usize, d: usize, method: Method, ov: Overrides) -> Result<BoundReport> {
    match method {
        Method::Certificate | Method::Support => {
            let cert = select_certificate(n, d, ov)?;
            let bound = if method == Method::Certificate {
                exact_bound(&cert)?
            } else {
                BigRational::from_integer(support_bound(&cert).value)
            };
            let mut rep = BoundReport::new(n, d, method, bound);
            rep.m = Some(cert.m);
            rep.r = Some(cert.r);
            Ok(rep)
        }
        Method::Lp => {
            let sol = solve_primal(&LpInstance::new(n, d)?)?;
            Ok(BoundReport::new(n, d, method, sol.value))
        }
        Method::Oracle => oracle_report(n, d).map(|(rep, _)| rep),
    }
}

/// The oracle report together with the code that achieves it.
pub fn oracle_report(n: usize, d: usize) -> Result<(BoundReport, Code)> {
    let (size, code) = max_code(n, d)?;
    let rep = BoundReport::new(n, d, Method::Oracle, BigRational::from_integer(BigInt::from(size)));
    Ok((rep, code))
}

/// Lower bound `1 - H(δ)`.
pub fn gv_rate(delta: f64) -> f64 {
    1.0 - binary_entropy(delta).unwrap_or(f64::NAN)
}

/// First linear-programming bound `H(1/2 - sqrt(δ(1-δ)))`.
pub fn mrrw1_rate(delta: f64) -> f64 {
    let inner = 0.5 - (delta * (1.0 - delta)).sqrt();
    binary_entropy(inner.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
}

/// `log2(bound)/n` for the auto-selected certificate at `d = ⌊δn⌋`.
pub fn cert_exponent(n: usize, delta: f64) -> Option<f64> {
    let d = (delta * n as f64).floor() as usize;
    if d == 0 || 2 * d > n {
        return None;
    }
    auto_select(n, d).ok().map(|sel| log2_ratio(&sel.bound) / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub delta: f64,
    pub gv: f64,
    pub mrrw1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cert_exponent: Option<f64>,
}

/// `points` values of δ spaced uniformly over `[0, 1/2]`. The endpoints use
/// the exact values `R(0) = 1` and `R(1/2) = 0`; interior points use the
/// formulas.
pub fn curve(points: usize, n_finite: Option<usize>) -> Result<Vec<CurveRow>> {
    if points < 2 {
        return Err(Error::InvalidParameter("curve needs at least 2 points".into()));
    }
    let last = points - 1;
    Ok((0..points)
        .into_par_iter()
        .map(|i| {
            let delta = 0.5 * i as f64 / last as f64;
            let (gv, mrrw1) = match i {
                0 => (1.0, 1.0),
                i if i == last => (0.0, 0.0),
                _ => (gv_rate(delta), mrrw1_rate(delta)),
            };
            let cert_exponent = n_finite.and_then(|n| cert_exponent(n, delta));
            CurveRow { delta, gv, mrrw1, cert_exponent }
        })
        .collect())
}

/// One grid point of a sweep, with a cell per requested method.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub d: usize,
    pub cells: Vec<(Method, Result<BoundReport>)>,
}

/// Evaluates every `(n, d)` pair with every method. Rows come back in the
/// order of `grid` regardless of how the work was scheduled.
pub fn sweep(grid: &[(usize, usize)], methods: &[Method]) -> Vec<SweepRow> {
    grid.par_iter()
        .map(|&(n, d)| SweepRow {
            n,
            d,
            cells: methods
                .iter()
                .map(|&m| (m, bound_report(n, d, m, Overrides::default())))
                .collect(),
        })
        .collect()
}
