//! Level-to-level walk counts in the Hamming cube.
//!
//! A vertex of weight `k` has `n - k` neighbours of weight `k + 1` and `k`
//! neighbours of weight `k - 1`. That count depends only on the weight, so
//! the number of length-`m` walks from a vertex `x` ending at weight `ℓ` is
//! the same for every `x` of a given weight, and the dynamic program over
//! levels
//!
//! ```text
//! c⁽⁰⁾ = e_r,   c⁽ᵗ⁺¹⁾[ℓ] = (n - ℓ + 1)·c⁽ᵗ⁾[ℓ - 1] + (ℓ + 1)·c⁽ᵗ⁾[ℓ + 1]
//! ```
//!
//! is exact. `P_{r,m,j}` in the usual notation is `counts[r + j]`.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::rational::root_biguint;

/// Exact counts of length-`m` walks from a fixed weight-`r` vertex, by
/// terminal weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkCountTable {
    pub n: usize,
    pub r: usize,
    pub m: u32,
    #[serde(serialize_with = "ser_counts")]
    pub counts: Vec<BigUint>,
}

fn ser_counts<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

impl WalkCountTable {
    /// `P_{r,m,j}`; zero when `r + j` is not a level.
    pub fn at_offset(&self, j: i64) -> BigUint {
        let level = self.r as i64 + j;
        if level < 0 || level > self.n as i64 {
            return BigUint::zero();
        }
        self.counts[level as usize].clone()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// Runs the level DP. Only the window `[r - m, r + m]` is ever touched.
pub fn walk_counts(n: usize, r: usize, m: u32) -> WalkCountTable {
    assert!(r <= n, "start level {r} outside 0..={n}");
    let lo = r.saturating_sub(m as usize);
    let hi = (r + m as usize).min(n);
    let width = hi - lo + 1;
    let mut cur = vec![BigUint::zero(); width];
    cur[r - lo] = BigUint::from(1u32);
    let mut next = vec![BigUint::zero(); width];
    for _ in 0..m {
        for (i, slot) in next.iter_mut().enumerate() {
            let level = lo + i;
            let mut acc = BigUint::zero();
            if i > 0 && !cur[i - 1].is_zero() {
                acc += &cur[i - 1] * (n - level + 1);
            }
            if i + 1 < width && !cur[i + 1].is_zero() {
                acc += &cur[i + 1] * (level + 1);
            }
            *slot = acc;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut counts = vec![BigUint::zero(); n + 1];
    for (i, c) in cur.into_iter().enumerate() {
        counts[lo + i] = c;
    }
    WalkCountTable { n, r, m, counts }
}

/// `P_{r,m,j}`: length-`m` walks from a weight-`r` vertex ending at weight
/// `r + j`. Out-of-range terminal levels give zero.
pub fn walk_count(n: usize, r: usize, m: u32, j: i64) -> BigUint {
    let level = r as i64 + j;
    if level < 0 || level > n as i64 || r > n {
        return BigUint::zero();
    }
    walk_counts(n, r, m).counts[level as usize].clone()
}

/// Main term `2·sqrt(r(n - r))` of the growth rate `P_{r,m,j}^{1/m}`.
pub fn asymptotic_walk_estimate(n: usize, r: usize, _m: u32, _j: i64) -> f64 {
    2.0 * ((r as f64) * ((n - r.min(n)) as f64)).sqrt()
}

/// `P^{1/m}` as a float, safe for counts far beyond `f64` range.
pub fn walk_root(count: &BigUint, m: u32) -> f64 {
    root_biguint(count, m)
}
