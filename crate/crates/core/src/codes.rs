//! Exhaustive computation of `A(n,d)` for small `n`, and the distance
//! distribution `f_C = (2^n/|C|)·1_C * 1_C` of a code.
//!
//! Codes are translation invariant, so the search fixes `0 ∈ C` and looks
//! for a largest clique among the nonzero words of weight `≥ d`, where two
//! words are joined when they are at distance `≥ d`. Branches are cut when
//! a greedy colouring of the remaining candidates shows they cannot beat the
//! incumbent. Odd distances reduce to even ones by a parity bit, and
//! coordinate permutations fixing the chosen words are used to skip
//! equivalent branches.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::radial::{DenseFunction, LevelProfile};

/// Default largest `n` for the exhaustive search when `d ≥ 3`.
pub const DEFAULT_ORACLE_LIMIT: usize = 10;

/// Largest `n` accepted for `d ≤ 2` regardless of the configured limit.
pub const SMALL_DISTANCE_LIMIT: usize = 12;

/// A binary code: distinct words of length `n`, stored as bit patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    n: usize,
    words: Vec<usize>,
}

impl Code {
    pub fn new(n: usize, mut words: Vec<usize>) -> Result<Self> {
        if n >= usize::BITS as usize {
            return Err(Error::DimensionTooLarge { what: "code length", n, limit: usize::BITS as usize - 1 });
        }
        if let Some(&w) = words.iter().find(|&&w| w >> n != 0) {
            return Err(Error::InvalidParameter(format!("word {w:#b} longer than n={n}")));
        }
        words.sort_unstable();
        let len = words.len();
        words.dedup();
        if words.len() != len {
            return Err(Error::InvalidParameter("code words must be distinct".into()));
        }
        Ok(Self { n, words })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[usize] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Minimum pairwise distance; `None` for fewer than two words.
    pub fn min_distance(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &u) in self.words.iter().enumerate() {
            for &v in &self.words[i + 1..] {
                let dist = (u ^ v).count_ones() as usize;
                best = Some(best.map_or(dist, |b| b.min(dist)));
            }
        }
        best
    }

    /// Applies a coordinate permutation: bit `i` moves to bit `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_perm(self.n, perm)?;
        let words = self.words.iter().map(|&w| permute_bits(w, perm)).collect();
        Self::new(self.n, words)
    }
}

/// Newline-separated bitstrings, most significant coordinate first.
impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.words {
            writeln!(f, "{:0width$b}", w, width = self.n)?;
        }
        Ok(())
    }
}

fn check_perm(n: usize, perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidParameter(format!("not a permutation of 0..{n}")));
    }
    Ok(())
}

fn permute_bits(w: usize, perm: &[usize]) -> usize {
    perm.iter().enumerate().fold(0, |acc, (i, &p)| acc | (((w >> i) & 1) << p))
}

#[derive(Clone)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Self) -> Self {
        Self { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    fn and_not_assign(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
}

struct Search {
    adj: Vec<BitSet>,
    /// Bit pattern of each vertex.
    words: Vec<usize>,
    best: Vec<usize>,
    current: Vec<usize>,
    /// Coordinate classes on which all chosen words are constant. Permuting
    /// coordinates within a class fixes every chosen word.
    cells: Vec<usize>,
    /// Cliques no larger than this are not worth finding.
    floor: usize,
}

impl Search {
    /// Greedy sequential colouring; returns candidates in colour order with
    /// their colour number (1-based).
    fn colour(&self, cand: &BitSet) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut uncoloured = cand.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.and_not_assign(&self.adj[v]);
                uncoloured.remove(v);
                out.push((v, colour));
            }
        }
        out
    }

    fn same_orbit(&self, u: usize, v: usize) -> bool {
        let (a, b) = (self.words[u], self.words[v]);
        self.cells.iter().all(|&c| (a & c).count_ones() == (b & c).count_ones())
    }

    /// Branches on `v`, then drops its whole orbit: any clique through
    /// another orbit member maps onto one through `v`.
    fn expand(&mut self, mut cand: BitSet) {
        let order = self.colour(&cand);
        for &(v, colour) in order.iter().rev() {
            if !cand.contains(v) {
                continue;
            }
            let target = self.floor.max(self.best.len());
            if self.current.len() + colour <= target {
                return;
            }
            self.current.push(v);
            let next = cand.and(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > target {
                    self.best = self.current.clone();
                }
            } else {
                let saved = self.cells.len();
                let x = self.words[v];
                let refined: Vec<usize> =
                    self.cells.iter().flat_map(|&c| [c & x, c & !x]).filter(|&c| c != 0).collect();
                let old = std::mem::replace(&mut self.cells, refined);
                self.expand(next);
                self.cells = old;
                debug_assert_eq!(self.cells.len(), saved);
            }
            self.current.pop();
            for &(u, _) in &order {
                if cand.contains(u) && self.same_orbit(u, v) {
                    cand.remove(u);
                }
            }
        }
    }
}

/// `A(n,d)` and a code achieving it. Candidates are tried in lexicographic
/// order, so the witness is deterministic.
pub fn max_code(n: usize, d: usize) -> Result<(usize, Code)> {
    max_code_with_limit(n, d, DEFAULT_ORACLE_LIMIT)
}

pub fn max_code_with_limit(n: usize, d: usize, limit: usize) -> Result<(usize, Code)> {
    let identity: Vec<usize> = (0..n).collect();
    max_code_permuted(n, d, &identity, limit)
}

/// Runs the search with vertices ordered by their image under a coordinate
/// permutation. The size found never depends on the order.
pub fn max_code_permuted(n: usize, d: usize, perm: &[usize], limit: usize) -> Result<(usize, Code)> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 1 and d >= 1, got n={n}, d={d}")));
    }
    check_perm(n, perm)?;
    // Distances 1 and 2 are cheap for the colouring bound.
    let limit = if d <= 2 { limit.max(SMALL_DISTANCE_LIMIT) } else { limit };
    if n > limit {
        return Err(Error::DimensionTooLarge { what: "oracle", n, limit });
    }
    if d == 1 {
        return Ok((1 << n, Code::new(n, (0..1 << n).collect())?));
    }
    if d > n {
        return Ok((1, Code::new(n, vec![0])?));
    }

    // Adding a parity bit to a code of odd distance d gives one of length
    // n + 1 and distance d + 1, and deleting that bit undoes it. For even d,
    // deleting a coordinate and adding a parity bit shows some optimal code
    // has only even-weight words.
    let (len, perm) = if d % 2 == 1 {
        (n + 1, perm.iter().copied().chain([n]).collect::<Vec<_>>())
    } else {
        (n, perm.to_vec())
    };
    let mask = (1usize << n) - 1;
    let words = even_weight_search(len, d + d % 2, &perm).into_iter().map(|u| u & mask).collect();
    let code = Code::new(n, words)?;
    Ok((code.len(), code))
}

/// Largest code of even-weight words of length `n` with even distance `d`,
/// containing 0.
///
/// One end of a closest pair is translated to 0 and the coordinates are
/// permuted so the other end is the anchor `1^w 0^(n-w)`, where `w ≥ d` is
/// the minimum distance; then every weight and every pairwise distance is at
/// least `w`. The clique search then branches on orbits of the coordinate
/// permutations fixing every chosen word rather than on single words.
fn even_weight_search(n: usize, d: usize, perm: &[usize]) -> Vec<usize> {
    let mut best = vec![0usize];
    for w in (d..=n).step_by(2) {
        let anchor = permute_bits((1usize << w) - 1, perm);
        if best.len() < 2 {
            best = vec![0, anchor];
        }
        let mut verts: Vec<usize> = (1usize..1 << n)
            .filter(|&u| {
                u != anchor
                    && u.count_ones() % 2 == 0
                    && u.count_ones() as usize >= w
                    && (u ^ anchor).count_ones() as usize >= w
            })
            .collect();
        verts.sort_by_key(|&u| permute_bits(u, perm));
        let nv = verts.len();
        let mut adj = vec![BitSet::new(nv); nv];
        for i in 0..nv {
            for j in i + 1..nv {
                if (verts[i] ^ verts[j]).count_ones() as usize >= w {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        let full = (1usize << n) - 1;
        let mut search = Search {
            adj,
            words: verts.clone(),
            best: Vec::new(),
            current: Vec::new(),
            cells: [anchor, full & !anchor].into_iter().filter(|&c| c != 0).collect(),
            floor: best.len().saturating_sub(2),
        };
        let mut cand = BitSet::new(nv);
        (0..nv).for_each(|i| cand.insert(i));
        if nv > 0 {
            search.expand(cand);
        }
        if search.best.len() + 2 > best.len() {
            best = vec![0, anchor];
            best.extend(search.best.iter().map(|&k| verts[k]));
        }
    }
    best
}

/// `f_C(x) = |{(u,v) ∈ C² : u + v = x}| / |C|`, equal to
/// `(2^n/|C|)·(1_C * 1_C)(x)` for the normalized convolution.
pub fn distance_distribution(code: &Code) -> Result<DenseFunction> {
    if code.is_empty() {
        return Err(Error::InvalidParameter("empty code".into()));
    }
    let n = code.n;
    let mut counts = vec![0i64; 1 << n];
    for &u in &code.words {
        for &v in &code.words {
            counts[u ^ v] += 1;
        }
    }
    let size = BigInt::from(code.len());
    let values = counts.into_iter().map(|c| BigRational::new(c.into(), size.clone())).collect();
    DenseFunction::new(n, values)
}

/// Radial average of [`distance_distribution`]: `a_k = A_k / C(n,k)` where
/// `A_k` is the average number of codewords at distance `k`.
pub fn radial_distance_distribution(code: &Code) -> Result<LevelProfile> {
    Ok(distance_distribution(code)?.radialize())
}
