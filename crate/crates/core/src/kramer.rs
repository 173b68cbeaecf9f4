//! Orbit incidence matrices for the Singer group `⟨ω⟩` and an exact 0/1
//! packing solver.
//!
//! Rows are the `⟨ω⟩`-orbits on `t`-subspaces, columns the orbits on
//! `k`-subspaces; entry `(i, j)` counts the members of column orbit `j` that
//! contain the fixed representative of row orbit `i`. A 0/1 vector `x` with
//! `M x <= λ` selects orbits whose union covers every `t`-subspace at most
//! `λ` times.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::gf::{FieldSpec, GfError};
use crate::linalg::{enumerate_subspaces, gaussian, LinalgError, Subspace, ENUMERATION_MAX_DIM};

#[derive(Debug, Error)]
pub enum KramerError {
    #[error("need 1 <= t <= k < v (got v={v}, k={k}, t={t})")]
    InvalidParameters { v: u32, k: u32, t: u32 },
    #[error("v={0} is too large for exhaustive enumeration (limit {ENUMERATION_MAX_DIM}, and v*k <= 128)")]
    TooLarge(u32),
    #[error("instance has {cells} cells; solver cap is {cap}")]
    SolverCapExceeded { cells: usize, cap: usize },
    #[error("selection has {found} entries for {cols} columns")]
    SelectionLength { found: usize, cols: usize },
    #[error("{count} selected codewords contain the same {t}-subspace (limit {lambda})")]
    Overcovered { t: u32, count: u32, lambda: u32 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, Debug)]
pub struct KMInstance {
    field: FieldSpec,
    k: u32,
    t: u32,
    t_orbits: Vec<Subspace>,
    t_orbit_lengths: Vec<u128>,
    k_orbits: Vec<Subspace>,
    k_orbit_lengths: Vec<u128>,
    matrix: Vec<Vec<u32>>,
}

/// `ω · U`.
pub fn singer_shift(field: &FieldSpec, sub: &Subspace) -> Subspace {
    let rows = sub
        .rows()
        .iter()
        .map(|&r| field.mul_by_generator(crate::gf::FieldElement::from_bits(r)).bits());
    Subspace::span(sub.ambient(), rows).expect("field elements lie in the ambient space")
}

/// All members of the orbit of `sub`, starting with `sub`.
pub fn orbit_of(field: &FieldSpec, sub: &Subspace) -> Vec<Subspace> {
    let mut members = vec![sub.clone()];
    let mut cur = singer_shift(field, sub);
    while &cur != sub {
        let next = singer_shift(field, &cur);
        members.push(cur);
        cur = next;
    }
    members
}

/// Number of `⟨ω⟩`-orbits on `k`-subspaces of `GF(2)^v`, by Burnside:
/// `ω^j` fixes `U` iff `U` is a vector space over the subfield generated by
/// `ω^j`, so `(1/L) Σ_{d | gcd(v,k)} N(d) [v/d; k/d]_{2^d}` where `N(d)`
/// counts field elements of degree exactly `d`.
pub fn singer_orbit_count(v: u32, k: u32) -> BigUint {
    if k == 0 || k == v {
        return BigUint::from(1u32);
    }
    let order = (BigUint::from(1u32) << v) - 1u32;
    let g = gcd(v, k);
    let mut total = BigUint::zero();
    for d in (1..=g).filter(|d| g.is_multiple_of(*d)) {
        let count = exact_degree_count(d);
        let fixed = gaussian(v / d, k / d, 1u64 << d).expect("valid parameters");
        total += fixed * count;
    }
    total / order
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mobius(mut n: u32) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Nonzero elements of `GF(2^d)` lying in no proper subfield.
fn exact_degree_count(d: u32) -> BigUint {
    let signed: i128 = (1..=d)
        .filter(|e| d.is_multiple_of(*e))
        .map(|e| mobius(d / e) as i128 * ((1i128 << e) - 1))
        .sum();
    BigUint::from(signed as u128)
}

/// Packs the rows of a subspace into a hash key; needs `v * dim <= 128`.
/// Only compared within one dimension.
fn pack(sub: &Subspace) -> u128 {
    let v = sub.ambient() as usize;
    sub.rows().iter().enumerate().fold(0, |acc, (i, &r)| acc | r << (v * i))
}

/// Splits all `dim`-subspaces into orbits; returns `(minimum member, length)`
/// per orbit.
fn partition(field: &FieldSpec, dim: u32) -> Result<Vec<(Subspace, u128)>, KramerError> {
    let v = field.degree();
    let mut seen: HashSet<u128> = HashSet::new();
    let mut orbits = Vec::new();
    for sub in enumerate_subspaces(v, dim)? {
        let key = pack(&sub);
        if seen.contains(&key) {
            continue;
        }
        let mut min = sub.clone();
        let mut len = 0u128;
        let mut cur = sub;
        loop {
            seen.insert(pack(&cur));
            len += 1;
            if cur < min {
                min = cur.clone();
            }
            cur = singer_shift(field, &cur);
            if pack(&cur) == key {
                break;
            }
        }
        orbits.push((min, len));
    }
    Ok(orbits)
}

/// Basis-coordinate patterns of the `t`-subspaces of a `k`-space.
fn coordinate_patterns(k: u32, t: u32) -> Result<Vec<Vec<u128>>, KramerError> {
    Ok(enumerate_subspaces(k, t)?.map(|s| s.rows().to_vec()).collect())
}

fn apply_pattern(sub: &Subspace, pattern: &[u128]) -> Subspace {
    let basis = sub.rows();
    let vectors = pattern.iter().map(|&c| {
        (0..basis.len())
            .filter(|&b| c >> b & 1 == 1)
            .fold(0u128, |acc, b| acc ^ basis[b])
    });
    Subspace::span(sub.ambient(), vectors).expect("combinations of basis rows")
}

/// Enumerates `t`- and `k`-subspaces, partitions them into Singer orbits and
/// counts incidences. Columns are ordered by descending orbit length, then by
/// representative; rows by representative.
pub fn build_instance(field: &FieldSpec, k: u32, t: u32) -> Result<KMInstance, KramerError> {
    let v = field.degree();
    if t == 0 || t > k || k >= v {
        return Err(KramerError::InvalidParameters { v, k, t });
    }
    if v > ENUMERATION_MAX_DIM || v * k > 128 {
        return Err(KramerError::TooLarge(v));
    }
    let mut rows = partition(field, t)?;
    rows.sort();
    let mut cols = partition(field, k)?;
    cols.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let row_index: HashMap<u128, usize> = rows.iter().enumerate().map(|(i, (s, _))| (pack(s), i)).collect();
    let patterns = coordinate_patterns(k, t)?;
    let columns: Vec<Vec<u32>> = cols
        .par_iter()
        .map(|(rep, _)| {
            let mut col = vec![0u32; rows.len()];
            for member in orbit_of(field, rep) {
                for p in &patterns {
                    if let Some(&i) = row_index.get(&pack(&apply_pattern(&member, p))) {
                        col[i] += 1;
                    }
                }
            }
            col
        })
        .collect();
    let matrix = (0..rows.len())
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let (t_orbits, t_orbit_lengths) = rows.into_iter().unzip();
    let (k_orbits, k_orbit_lengths) = cols.into_iter().unzip();
    Ok(KMInstance {
        field: field.clone(),
        k,
        t,
        t_orbits,
        t_orbit_lengths,
        k_orbits,
        k_orbit_lengths,
        matrix,
    })
}

impl KMInstance {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn v(&self) -> u32 {
        self.field.degree()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn rows(&self) -> usize {
        self.t_orbits.len()
    }

    pub fn cols(&self) -> usize {
        self.k_orbits.len()
    }

    pub fn matrix(&self) -> &[Vec<u32>] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.matrix[row][col]
    }

    pub fn t_orbits(&self) -> &[Subspace] {
        &self.t_orbits
    }

    pub fn t_orbit_lengths(&self) -> &[u128] {
        &self.t_orbit_lengths
    }

    pub fn k_orbits(&self) -> &[Subspace] {
        &self.k_orbits
    }

    pub fn k_orbit_lengths(&self) -> &[u128] {
        &self.k_orbit_lengths
    }

    /// `M x <= λ` row by row.
    pub fn is_feasible(&self, selected: &[bool], lambda: u32) -> bool {
        self.row_sums(selected).all(|s| s <= lambda as u64)
    }

    /// `M x = λ`: the selection is a `t`-design with index `λ`.
    pub fn is_design(&self, selected: &[bool], lambda: u32) -> bool {
        self.row_sums(selected).all(|s| s == lambda as u64)
    }

    fn row_sums<'a>(&'a self, selected: &'a [bool]) -> impl Iterator<Item = u64> + 'a {
        self.matrix.iter().map(move |row| {
            row.iter()
                .zip(selected)
                .filter(|(_, &x)| x)
                .map(|(&m, _)| m as u64)
                .sum()
        })
    }

    /// Every member of every selected orbit.
    pub fn codewords(&self, selected: &[bool]) -> Vec<Subspace> {
        self.k_orbits
            .iter()
            .zip(selected)
            .filter(|(_, &x)| x)
            .flat_map(|(rep, _)| orbit_of(&self.field, rep))
            .collect()
    }

    /// Checks at the codeword level that no `t`-subspace lies in more than
    /// `λ` selected codewords.
    pub fn verify_packing(&self, selected: &[bool], lambda: u32) -> Result<(), KramerError> {
        if selected.len() != self.cols() {
            return Err(KramerError::SelectionLength {
                found: selected.len(),
                cols: self.cols(),
            });
        }
        let patterns = coordinate_patterns(self.k, self.t)?;
        let mut counts: HashMap<u128, u32> = HashMap::new();
        for word in self.codewords(selected) {
            for p in &patterns {
                let c = counts.entry(pack(&apply_pattern(&word, p))).or_default();
                *c += 1;
                if *c > lambda {
                    return Err(KramerError::Overcovered {
                        t: self.t,
                        count: *c,
                        lambda,
                    });
                }
            }
        }
        Ok(())
    }
}

/// `km v=<v> k=<k> t=<t> rows=<r> cols=<c>`, then one line per row.
impl fmt::Display for KMInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "km v={} k={} t={} rows={} cols={}",
            self.v(),
            self.k,
            self.t,
            self.rows(),
            self.cols()
        )?;
        for row in &self.matrix {
            f.write_str("\n")?;
            for (j, m) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest `rows * cols` accepted.
    pub cell_cap: usize,
    /// Search nodes before giving up on proving optimality.
    pub node_limit: u64,
    pub lambda: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cell_cap: 1_000_000,
            node_limit: 1_000_000,
            lambda: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KMSolution {
    pub selected: Vec<bool>,
    /// Sum of the selected orbit lengths.
    pub codewords: u128,
    /// False when the node limit stopped the search first.
    pub optimal: bool,
    pub nodes: u64,
}

impl KMSolution {
    pub fn indices(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(j, _)| j)
            .collect()
    }
}

/// `solution codewords=<n> optimal=<bool> nodes=<n>`, then the selected
/// column indices.
impl fmt::Display for KMSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "solution codewords={} optimal={} nodes={}",
            self.codewords, self.optimal, self.nodes
        )?;
        let idx: Vec<String> = self.indices().iter().map(|j| j.to_string()).collect();
        f.write_str(&idx.join(" "))
    }
}

/// `(column index, orbit length, nonzero (row, entry) pairs)`.
type Column = (usize, u128, Vec<(usize, u32)>);

struct Search<'a> {
    columns: Vec<Column>,
    suffix: Vec<u128>,
    row_weights: &'a [u128],
    per_codeword: u128,
    capacity: Vec<u32>,
    free_units: u128,
    chosen: Vec<usize>,
    value: u128,
    best: (u128, Vec<usize>),
    nodes: u64,
    node_limit: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn fits(&self, col: &[(usize, u32)]) -> bool {
        col.iter().all(|&(i, m)| m <= self.capacity[i])
    }

    fn dfs(&mut self, pos: usize) {
        if self.nodes >= self.node_limit {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if self.value > self.best.0 {
            self.best = (self.value, self.chosen.clone());
        }
        if pos == self.columns.len() {
            return;
        }
        let bound = self.value + self.suffix[pos].min(self.free_units / self.per_codeword);
        if bound <= self.best.0 {
            return;
        }
        if self.fits(&self.columns[pos].2) {
            let (j, len, col) = std::mem::take(&mut self.columns[pos]);
            let used: u128 = col.iter().map(|&(i, m)| m as u128 * self.row_weights[i]).sum();
            for &(i, m) in &col {
                self.capacity[i] -= m;
            }
            self.free_units -= used;
            self.value += len;
            self.chosen.push(j);
            self.dfs(pos + 1);
            self.chosen.pop();
            self.value -= len;
            self.free_units += used;
            for &(i, m) in &col {
                self.capacity[i] += m;
            }
            self.columns[pos] = (j, len, col);
        }
        if !self.exhausted {
            self.dfs(pos + 1);
        }
    }
}

/// Exact branch and bound for `max Σ len_j x_j` subject to `M x <= λ`.
///
/// Columns are tried in instance order (longest orbits first), including
/// before excluding. The bound is the smaller of the remaining column weight
/// and the uncovered `t`-subspace budget divided by `[k; t]_2`.
pub fn solve_packing(instance: &KMInstance, config: &SolverConfig) -> Result<KMSolution, KramerError> {
    let cells = instance.rows() * instance.cols();
    if cells > config.cell_cap {
        return Err(KramerError::SolverCapExceeded {
            cells,
            cap: config.cell_cap,
        });
    }
    let lambda = config.lambda;
    let columns: Vec<Column> = (0..instance.cols())
        .filter(|&j| instance.matrix.iter().all(|row| row[j] <= lambda))
        .map(|j| {
            let col = (0..instance.rows())
                .filter(|&i| instance.matrix[i][j] > 0)
                .map(|i| (i, instance.matrix[i][j]))
                .collect();
            (j, instance.k_orbit_lengths[j], col)
        })
        .collect();
    let mut suffix = vec![0u128; columns.len() + 1];
    for p in (0..columns.len()).rev() {
        suffix[p] = suffix[p + 1] + columns[p].1;
    }
    let per_codeword = gaussian(instance.k, instance.t, 2)
        .expect("valid parameters")
        .to_u128()
        .expect("small instance");
    let free_units = instance.t_orbit_lengths.iter().sum::<u128>() * lambda as u128;
    let mut search = Search {
        columns,
        suffix,
        row_weights: &instance.t_orbit_lengths,
        per_codeword,
        capacity: vec![lambda; instance.rows()],
        free_units,
        chosen: Vec::new(),
        value: 0,
        best: (0, Vec::new()),
        nodes: 0,
        node_limit: config.node_limit,
        exhausted: false,
    };
    search.dfs(0);
    let mut selected = vec![false; instance.cols()];
    for &j in &search.best.1 {
        selected[j] = true;
    }
    Ok(KMSolution {
        selected,
        codewords: search.best.0,
        optimal: !search.exhausted,
        nodes: search.nodes,
    })
}
