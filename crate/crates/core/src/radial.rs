//! Exact combinatorial and Fourier primitives on the Hamming cube `{0,1}^n`.
//!
//! Transforms here are *unnormalized*: `F[f](x) = Σ_y (-1)^{<x,y>} f(y)`.
//! The normalized transform `f̂ = 2^{-n}·F[f]` is never stored. With this
//! convention `F∘F = 2^n·I`, the unnormalized transform of the level-`j`
//! indicator is the Krawtchouk polynomial `K_j(|x|)`, and every certificate
//! quantity stays an exact integer or rational.

use std::env;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{parse_ratio, to_ratio_string, uint};

/// Default largest `n` for which dense `2^n`-point functions are allowed.
pub const DEFAULT_DENSE_LIMIT: usize = 24;

/// Environment variable that overrides [`DEFAULT_DENSE_LIMIT`].
pub const DENSE_LIMIT_ENV: &str = "LPBOUND_DENSE_LIMIT";

/// Dense-mode limit from `LPBOUND_DENSE_LIMIT`, or the default.
pub fn dense_limit() -> usize {
    env::var(DENSE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_LIMIT)
}

/// `C(n, k)`; zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc = C(n, i) here, so the division is exact.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The full row `C(n, 0), ..., C(n, n)`.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut acc = BigUint::one();
    row.push(acc.clone());
    for k in 0..n {
        acc = acc * (n - k) / (k + 1);
        row.push(acc.clone());
    }
    row
}

/// A radial function on the `n`-cube: `x ↦ values[|x|]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    n: usize,
    values: Vec<BigRational>,
}

impl LevelProfile {
    pub fn new(n: usize, values: Vec<BigRational>) -> Result<Self> {
        if values.len() != n + 1 {
            return Err(Error::ProfileLength { n, expected: n + 1, got: values.len() });
        }
        Ok(Self { n, values })
    }

    pub fn from_integers<I, T>(n: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let values = values.into_iter().map(|v| BigRational::from_integer(v.into())).collect();
        Self::new(n, values)
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, values: vec![BigRational::zero(); n + 1] }
    }

    pub fn ones(n: usize) -> Self {
        Self { n, values: vec![BigRational::one(); n + 1] }
    }

    /// The level indicator `L_k` (`e_k` as a profile).
    pub fn level_indicator(n: usize, k: usize) -> Self {
        let mut p = Self::zeros(n);
        if k <= n {
            p.values[k] = BigRational::one();
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigRational> {
        self.values
    }

    pub fn get(&self, k: usize) -> &BigRational {
        &self.values[k]
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { n: self.n, values: self.values.iter().map(|v| v * c).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileRepr {
    n: usize,
    values: Vec<String>,
}

impl Serialize for LevelProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileRepr { n: self.n, values: self.values.iter().map(to_ratio_string).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevelProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ProfileRepr::deserialize(d)?;
        let values = repr
            .values
            .iter()
            .map(|s| parse_ratio(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        LevelProfile::new(repr.n, values).map_err(D::Error::custom)
    }
}

/// Exact Krawtchouk values `K_j(k)` for `0 ≤ j,k ≤ n`, where
/// `K_j(k) = Σ_i (-1)^i C(k,i) C(n-k, j-i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KrawtchoukTable {
    n: usize,
    rows: Vec<Vec<BigInt>>,
}

impl KrawtchoukTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `K_j(k)`.
    pub fn get(&self, j: usize, k: usize) -> &BigInt {
        &self.rows[j][k]
    }

    /// `k ↦ K_j(k)` for `k = 0..=n`.
    pub fn row(&self, j: usize) -> &[BigInt] {
        &self.rows[j]
    }
}

/// Rows `K_0, ..., K_{max_j}` evaluated at every `k = 0..=n`, by the
/// three-term recurrence `(j+1)K_{j+1}(k) = (n-2k)K_j(k) - (n-j+1)K_{j-1}(k)`.
pub fn krawtchouk_rows(n: usize, max_j: usize) -> Vec<Vec<BigInt>> {
    let max_j = max_j.min(n);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_j + 1);
    rows.push(vec![BigInt::one(); n + 1]);
    if max_j == 0 {
        return rows;
    }
    let lin: Vec<BigInt> = (0..=n).map(|k| BigInt::from(n as i64 - 2 * k as i64)).collect();
    rows.push(lin.clone());
    for j in 1..max_j {
        let next: Vec<BigInt> = (0..=n)
            .map(|k| {
                let num = &lin[k] * &rows[j][k] - BigInt::from(n - j + 1) * &rows[j - 1][k];
                debug_assert!((&num % BigInt::from(j + 1)).is_zero());
                num / BigInt::from(j + 1)
            })
            .collect();
        rows.push(next);
    }
    rows
}

pub fn krawtchouk_table(n: usize) -> KrawtchoukTable {
    KrawtchoukTable { n, rows: krawtchouk_rows(n, n) }
}

/// Unnormalized transform of a radial function:
/// `output[i] = Σ_k p[k]·K_k(i)`.
pub fn radial_transform(p: &LevelProfile) -> LevelProfile {
    radial_transform_with(p, &krawtchouk_table(p.n))
}

/// [`radial_transform`] with a precomputed table of the same dimension.
pub fn radial_transform_with(p: &LevelProfile, table: &KrawtchoukTable) -> LevelProfile {
    assert_eq!(p.n, table.n, "krawtchouk table dimension mismatch");
    let n = p.n;
    let values = (0..=n)
        .map(|i| {
            p.values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .fold(BigRational::zero(), |acc, (k, v)| {
                    acc + v * BigRational::from_integer(table.rows[k][i].clone())
                })
        })
        .collect();
    LevelProfile { n, values }
}

/// `Σ_x f(x) = Σ_k C(n,k)·p[k]`, which is also `F[f](0) = 2^n·f̂(0)`.
pub fn radial_sum(p: &LevelProfile) -> BigRational {
    binomial_row(p.n)
        .iter()
        .zip(&p.values)
        .fold(BigRational::zero(), |acc, (c, v)| acc + uint(c) * v)
}

/// A general function on the `n`-cube, indexed by the bit pattern of the point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseFunction {
    n: usize,
    values: Vec<BigRational>,
}

impl DenseFunction {
    pub fn new(n: usize, values: Vec<BigRational>) -> Result<Self> {
        check_dense(n, dense_limit())?;
        if values.len() != 1usize << n {
            return Err(Error::ProfileLength { n, expected: 1 << n, got: values.len() });
        }
        Ok(Self { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_dense(n, dense_limit())?;
        Ok(Self { n, values: vec![BigRational::zero(); 1 << n] })
    }

    /// Indicator of a set of points.
    pub fn indicator(n: usize, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut f = Self::zeros(n)?;
        for x in points {
            if x >= f.values.len() {
                return Err(Error::InvalidParameter(format!("point {x} outside the {n}-cube")));
            }
            f.values[x] = BigRational::one();
        }
        Ok(f)
    }

    /// Expands a radial profile to every point of the cube.
    pub fn from_profile(p: &LevelProfile) -> Result<Self> {
        check_dense(p.n, dense_limit())?;
        let values = (0..1usize << p.n).map(|x| p.values[x.count_ones() as usize].clone()).collect();
        Ok(Self { n: p.n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn get(&self, x: usize) -> &BigRational {
        &self.values[x]
    }

    /// Averages over each level, giving the radialization of `f`.
    pub fn radialize(&self) -> LevelProfile {
        let n = self.n;
        let mut sums = vec![BigRational::zero(); n + 1];
        for (x, v) in self.values.iter().enumerate() {
            sums[x.count_ones() as usize] += v;
        }
        let values = sums
            .into_iter()
            .zip(binomial_row(n))
            .map(|(s, c)| s / uint(&c))
            .collect();
        LevelProfile { n, values }
    }

    /// `Σ_x f(x)`.
    pub fn sum(&self) -> BigRational {
        self.values.iter().fold(BigRational::zero(), |acc, v| acc + v)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { n: self.n, values: self.values.iter().map(|v| v * c).collect() }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { n: self.n, values })
    }

    /// `Σ_x f(x)·g(x)` (unnormalized inner product).
    pub fn dot(&self, other: &Self) -> Result<BigRational> {
        same_dim(self, other)?;
        Ok(self.values.iter().zip(&other.values).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
    }
}

fn check_dense(n: usize, limit: usize) -> Result<()> {
    if n > limit || n >= usize::BITS as usize {
        return Err(Error::DimensionTooLarge { what: "dense-mode", n, limit });
    }
    Ok(())
}

fn same_dim(f: &DenseFunction, g: &DenseFunction) -> Result<()> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch { left: f.n, right: g.n });
    }
    Ok(())
}

/// Unnormalized Walsh–Hadamard transform `F[f](x) = Σ_y (-1)^{<x,y>} f(y)`,
/// evaluated with `n·2^n` exact butterflies.
pub fn dense_transform(f: &DenseFunction) -> Result<DenseFunction> {
    dense_transform_limited(f, dense_limit())
}

pub fn dense_transform_limited(f: &DenseFunction, limit: usize) -> Result<DenseFunction> {
    check_dense(f.n, limit)?;
    let mut a = f.values.clone();
    let mut h = 1;
    while h < a.len() {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let s = &*u + &*v;
                let t = &*u - &*v;
                *u = s;
                *v = t;
            }
        }
        h *= 2;
    }
    Ok(DenseFunction { n: f.n, values: a })
}

/// Normalized convolution `(f*g)(x) = 2^{-n} Σ_y f(y) g(x+y)`, computed
/// through the transform: `F[f*g] = 2^{-n}·F[f]·F[g]`.
pub fn dense_convolve(f: &DenseFunction, g: &DenseFunction) -> Result<DenseFunction> {
    same_dim(f, g)?;
    let ff = dense_transform(f)?;
    let fg = dense_transform(g)?;
    let prod = ff.mul(&fg)?;
    let back = dense_transform(&prod)?;
    // F[F[h]] = 2^n h, and one more 2^{-n} for the normalization.
    let scale = BigRational::new(BigInt::one(), BigInt::one() << (2 * f.n));
    Ok(back.scale(&scale))
}

/// Binary entropy `H(p) = -p·log2 p - (1-p)·log2(1-p)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("binary entropy needs p in [0,1], got {p}")));
    }
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    Ok(term(p) + term(1.0 - p))
}

/// True when every value is non-negative.
pub(crate) fn all_nonneg(values: &[BigRational]) -> bool {
    values.iter().all(|v| !v.is_negative())
}
