//! Subspaces of `GF(2)^v` as row-reduced bit matrices.
//!
//! A vector is a `u128` bit mask; bit `i` is the coefficient of `x^i`, so
//! the same value is also a field element of `GF(2^v)`. A [`Subspace`] keeps
//! its basis in canonical reduced row-echelon form: each row's pivot is its
//! highest set bit, rows are sorted by descending pivot and every pivot bit
//! is clear in all other rows. Two subspaces are equal as sets iff their
//! canonical forms are identical, so the derived `Eq`/`Hash`/`Ord` work on
//! the subspaces themselves.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use rayon::prelude::*;
use thiserror::Error;

use crate::gf::{mask_for, MAX_DEGREE};

/// Largest ambient dimension accepted by [`enumerate_subspaces`].
pub const ENUMERATION_MAX_DIM: u32 = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("vector {vector:#x} does not fit in ambient dimension {v}")]
    LengthMismatch { vector: u128, v: u32 },
    #[error("subspaces live in different ambient spaces ({0} vs {1})")]
    AmbientMismatch(u32, u32),
    #[error("need at least two codewords")]
    TooFewCodewords,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("ambient dimension {0} is too large to enumerate (limit {ENUMERATION_MAX_DIM})")]
    TooLarge(u32),
    #[error("malformed subspace text: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    v: u32,
    rows: Vec<u128>,
}

impl Subspace {
    pub fn zero(v: u32) -> Self {
        Subspace { v, rows: Vec::new() }
    }

    pub fn full(v: u32) -> Self {
        Subspace {
            v,
            rows: (0..v).rev().map(|i| 1u128 << i).collect(),
        }
    }

    /// Canonical span of `vectors`. Zero and repeated vectors are fine.
    pub fn span<I: IntoIterator<Item = u128>>(v: u32, vectors: I) -> Result<Self, LinalgError> {
        if v == 0 || v > MAX_DEGREE {
            return Err(LinalgError::InvalidParameters(format!("ambient dimension {v}")));
        }
        let mask = mask_for(v);
        let mut space = Subspace::zero(v);
        for x in vectors {
            if x & !mask != 0 {
                return Err(LinalgError::LengthMismatch { vector: x, v });
            }
            space.insert(x);
        }
        Ok(space)
    }

    /// Builds directly from rows already in canonical form.
    pub(crate) fn from_canonical_rows(v: u32, rows: Vec<u128>) -> Self {
        debug_assert!(is_canonical(&rows));
        Subspace { v, rows }
    }

    pub fn ambient(&self) -> u32 {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    /// Reduces `x` against the basis; zero iff `x` lies in the subspace.
    pub fn reduce(&self, mut x: u128) -> u128 {
        for &r in &self.rows {
            if x & top_bit(r) != 0 {
                x ^= r;
            }
        }
        x
    }

    pub fn contains(&self, x: u128) -> bool {
        self.reduce(x) == 0
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.v == other.v && self.rows.iter().all(|&r| other.contains(r))
    }

    /// Adds `x` to the basis, keeping canonical form. Returns false if `x`
    /// was already in the span.
    pub fn insert(&mut self, x: u128) -> bool {
        let x = self.reduce(x);
        if x == 0 {
            return false;
        }
        let pivot = top_bit(x);
        for r in &mut self.rows {
            if *r & pivot != 0 {
                *r ^= x;
            }
        }
        let pos = self.rows.partition_point(|&r| top_bit(r) > pivot);
        self.rows.insert(pos, x);
        true
    }

    /// `A + B`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for &r in &other.rows {
            s.insert(r);
        }
        Ok(s)
    }

    pub fn sum_dim(&self, other: &Subspace) -> Result<usize, LinalgError> {
        self.check_ambient(other)?;
        Ok(union_rank(&self.rows, &other.rows))
    }

    /// `dim(A ∩ B) = dim A + dim B - dim(A + B)`.
    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize, LinalgError> {
        Ok(self.dim() + other.dim() - self.sum_dim(other)?)
    }

    /// Subspace distance `dim(A + B) - dim(A ∩ B)`.
    pub fn distance(&self, other: &Subspace) -> Result<usize, LinalgError> {
        let sum = self.sum_dim(other)?;
        Ok(2 * sum - self.dim() - other.dim())
    }

    /// All nonzero vectors of the subspace, indexed by combination mask:
    /// entry `m - 1` is the XOR of the rows selected by the bits of `m`.
    pub fn nonzero_vectors(&self) -> Vec<u128> {
        combinations(&self.rows)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.v != other.v {
            return Err(LinalgError::AmbientMismatch(self.v, other.v));
        }
        Ok(())
    }
}

/// Subspace distance as a free function.
pub fn subspace_distance(a: &Subspace, b: &Subspace) -> Result<usize, LinalgError> {
    a.distance(b)
}

/// Minimum pairwise subspace distance, by exhaustive comparison of all
/// pairs (parallel over the first index).
pub fn min_distance(code: &[Subspace]) -> Result<usize, LinalgError> {
    if code.len() < 2 {
        return Err(LinalgError::TooFewCodewords);
    }
    let v = code[0].v;
    if let Some(bad) = code.iter().find(|c| c.v != v) {
        return Err(LinalgError::AmbientMismatch(v, bad.v));
    }
    let best = (0..code.len() - 1)
        .into_par_iter()
        .map(|i| {
            let a = &code[i];
            code[i + 1..]
                .iter()
                .map(|b| 2 * union_rank(&a.rows, &b.rows) - a.dim() - b.dim())
                .min()
                .unwrap_or(usize::MAX)
        })
        .min()
        .unwrap_or(usize::MAX);
    Ok(best)
}

/// Gaussian coefficient `[v; k]_q`, the number of `k`-dimensional subspaces
/// of `GF(q)^v`.
pub fn gaussian(v: u32, k: u32, q: u64) -> Result<BigUint, LinalgError> {
    if k > v {
        return Err(LinalgError::InvalidParameters(format!("k={k} exceeds v={v}")));
    }
    if !is_prime_power(q) {
        return Err(LinalgError::InvalidParameters(format!("q={q} is not a prime power")));
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= Pow::pow(&q, v - i) - 1u32;
        den *= Pow::pow(&q, i + 1) - 1u32;
    }
    Ok(num / den)
}

pub(crate) fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true
}

/// Lazily enumerates every `k`-dimensional subspace of `GF(2)^v` once, each
/// in canonical form. Subspaces come grouped by pivot set (lexicographic in
/// the pivot positions), then by the free coefficients.
pub fn enumerate_subspaces(v: u32, k: u32) -> Result<SubspaceIter, LinalgError> {
    if v > ENUMERATION_MAX_DIM {
        return Err(LinalgError::TooLarge(v));
    }
    if v == 0 || k > v {
        return Err(LinalgError::InvalidParameters(format!("v={v}, k={k}")));
    }
    Ok(SubspaceIter::new(v, k))
}

pub struct SubspaceIter {
    v: u32,
    k: usize,
    /// Pivot positions, descending.
    pivots: Vec<u32>,
    /// (row, bit) for each free coefficient of the current pivot set.
    free: Vec<(usize, u32)>,
    counter: u64,
    done: bool,
}

impl SubspaceIter {
    fn new(v: u32, k: u32) -> Self {
        let pivots: Vec<u32> = (0..k).map(|i| v - 1 - i).collect();
        let mut it = SubspaceIter {
            v,
            k: k as usize,
            pivots,
            free: Vec::new(),
            counter: 0,
            done: false,
        };
        it.free = it.free_positions();
        it
    }

    fn free_positions(&self) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (row, &p) in self.pivots.iter().enumerate() {
            for bit in 0..p {
                if !self.pivots.contains(&bit) {
                    out.push((row, bit));
                }
            }
        }
        out
    }

    /// Next pivot set in lexicographic order of the descending sequence,
    /// from high pivots to low.
    fn advance_pivots(&mut self) -> bool {
        let k = self.k;
        for i in (0..k).rev() {
            let floor = (k - 1 - i) as u32;
            if self.pivots[i] > floor {
                self.pivots[i] -= 1;
                for j in i + 1..k {
                    self.pivots[j] = self.pivots[j - 1] - 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let mut rows: Vec<u128> = self.pivots.iter().map(|&p| 1u128 << p).collect();
        for (idx, &(row, bit)) in self.free.iter().enumerate() {
            if self.counter >> idx & 1 == 1 {
                rows[row] |= 1u128 << bit;
            }
        }
        self.counter += 1;
        if self.counter >> self.free.len() != 0 {
            self.counter = 0;
            if self.advance_pivots() {
                self.free = self.free_positions();
            } else {
                self.done = true;
            }
        }
        Some(Subspace::from_canonical_rows(self.v, rows))
    }
}

/// All nonzero XOR-combinations of `basis`, entry `m - 1` for mask `m`.
pub(crate) fn combinations(basis: &[u128]) -> Vec<u128> {
    let n = basis.len();
    let mut out = vec![0u128; (1usize << n) - 1];
    for m in 1usize..(1 << n) {
        let low = m.trailing_zeros() as usize;
        let prev = m & (m - 1);
        out[m - 1] = if prev == 0 {
            basis[low]
        } else {
            out[prev - 1] ^ basis[low]
        };
    }
    out
}

#[inline]
fn top_bit(x: u128) -> u128 {
    1u128 << (127 - x.leading_zeros())
}

/// Rank of the union of an echelon basis `a` and arbitrary vectors `b`.
fn union_rank(a: &[u128], b: &[u128]) -> usize {
    let mut basis: Vec<u128> = Vec::with_capacity(a.len() + b.len());
    basis.extend_from_slice(a);
    for &x in b {
        let mut x = x;
        // basis is kept sorted by descending top bit with distinct top bits
        for &r in &basis {
            x = x.min(x ^ r);
        }
        if x != 0 {
            let t = top_bit(x);
            let pos = basis.partition_point(|&r| top_bit(r) > t);
            basis.insert(pos, x);
        }
    }
    basis.len()
}

fn is_canonical(rows: &[u128]) -> bool {
    rows.windows(2).all(|w| top_bit(w[0]) > top_bit(w[1]))
        && rows
            .iter()
            .enumerate()
            .all(|(i, &r)| rows.iter().enumerate().all(|(j, &s)| i == j || s & top_bit(r) == 0))
}

/// `dim=<k> v=<v>` followed by one lowercase hex row per line.
impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dim={} v={}", self.dim(), self.v)?;
        for r in &self.rows {
            write!(f, "\n{r:x}")?;
        }
        Ok(())
    }
}

impl FromStr for Subspace {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut all = parse_subspaces(s)?;
        match all.len() {
            1 => Ok(all.remove(0)),
            n => Err(LinalgError::Parse(format!("expected one subspace, found {n}"))),
        }
    }
}

/// Parses a stream of concatenated serialized subspaces. Blank lines are
/// ignored.
pub fn parse_subspaces(text: &str) -> Result<Vec<Subspace>, LinalgError> {
    let mut out = Vec::new();
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
    while let Some(header) = lines.next() {
        let (dim, v) = parse_header(header)?;
        let mut vectors = Vec::with_capacity(dim);
        for _ in 0..dim {
            let line = lines
                .next()
                .ok_or_else(|| LinalgError::Parse(format!("missing rows after {header:?}")))?;
            let x = u128::from_str_radix(line, 16).map_err(|_| LinalgError::Parse(format!("bad hex row {line:?}")))?;
            vectors.push(x);
        }
        let space = Subspace::span(v, vectors)?;
        if space.dim() != dim {
            return Err(LinalgError::Parse(format!(
                "rows span dimension {} but header says {dim}",
                space.dim()
            )));
        }
        out.push(space);
    }
    Ok(out)
}

fn parse_header(line: &str) -> Result<(usize, u32), LinalgError> {
    let bad = || LinalgError::Parse(format!("bad header {line:?}"));
    let mut dim = None;
    let mut v = None;
    for tok in line.split_whitespace() {
        match tok.split_once('=') {
            Some(("dim", x)) => dim = Some(x.parse().map_err(|_| bad())?),
            Some(("v", x)) => v = Some(x.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok((dim.ok_or_else(bad)?, v.ok_or_else(bad)?))
}
