//! Singer-cycle orbits of subspaces.
//!
//! A `k`-subspace `U` of `GF(2)^v` is described by the discrete logarithms of
//! its `2^k - 1` nonzero vectors (viewed as field elements). The Singer cycle
//! acts on that exponent set by adding one modulo `L = 2^v - 1`, so the whole
//! orbit of `U` is determined by one representative. An orbit is *good* when
//! its members pairwise meet in at most one dimension; this holds iff all
//! ordered quotients `u_i / u_j` of distinct nonzero vectors of `U` are
//! distinct, which is what [`OrbitRep::is_good_orbit`] checks. The check
//! needs only field divisions, so it also works above the discrete-log cap.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};
use crate::linalg::{combinations, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("at least one generator is required")]
    NoGenerators,
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("malformed orbit line: {0}")]
    Parse(String),
}

/// Representative of a Singer orbit of `k`-subspaces.
///
/// When discrete logarithms are available the representative is the
/// canonical one: among all cyclic shifts of the exponent set, the one whose
/// sorted list is lexicographically smallest. Otherwise the generators are
/// kept as given and exponent labels are absent.
#[derive(Clone, Debug)]
pub struct OrbitRep {
    field: FieldSpec,
    generators: Vec<FieldElement>,
    /// All nonzero vectors of the representative, ascending by exponent when
    /// labels are known, otherwise in combination-mask order.
    elements: Vec<FieldElement>,
    /// Exponents aligned with `elements` (hence sorted).
    exponents: Option<Vec<u128>>,
    canonical_shift: Option<u128>,
}

impl OrbitRep {
    /// Builds the orbit representative of the span of `generators`.
    pub fn from_generators(field: &FieldSpec, generators: &[FieldElement]) -> Result<Self, OrbitError> {
        if generators.is_empty() {
            return Err(OrbitError::NoGenerators);
        }
        for &g in generators {
            if !field.contains(g) {
                return Err(GfError::ElementOutOfRange {
                    value: g.bits(),
                    degree: field.degree(),
                }
                .into());
            }
        }
        let span = Subspace::span(field.degree(), generators.iter().map(|g| g.bits()))
            .expect("generators checked against the field");
        if span.dim() != generators.len() {
            return Err(OrbitError::DependentGenerators);
        }
        let elements: Vec<FieldElement> = combinations(&bits_of(generators))
            .into_iter()
            .map(FieldElement::from_bits)
            .collect();

        if !field.has_dlog() {
            return Ok(OrbitRep {
                field: field.clone(),
                generators: generators.to_vec(),
                elements,
                exponents: None,
                canonical_shift: None,
            });
        }

        let order = field.order();
        let logs: Vec<u128> = elements.iter().map(|&e| field.dlog(e)).collect::<Result<_, _>>()?;
        let (shift, _) = logs
            .iter()
            .map(|&c| {
                let shift = (order - c) % order;
                let mut shifted: Vec<u128> = logs.iter().map(|&e| (e + shift) % order).collect();
                shifted.sort_unstable();
                (shift, shifted)
            })
            .min_by(|a, b| a.1.cmp(&b.1))
            .expect("nonempty");

        let factor = field.exp(shift);
        let generators: Vec<FieldElement> = generators.iter().map(|&g| field.mul(g, factor)).collect();
        let mut labelled: Vec<(u128, FieldElement)> = logs
            .iter()
            .zip(&elements)
            .map(|(&e, &x)| ((e + shift) % order, field.mul(x, factor)))
            .collect();
        labelled.sort_unstable();
        Ok(OrbitRep {
            field: field.clone(),
            generators,
            exponents: Some(labelled.iter().map(|p| p.0).collect()),
            elements: labelled.into_iter().map(|p| p.1).collect(),
            canonical_shift: Some(shift),
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Dimension `k` of the subspaces in the orbit.
    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[FieldElement] {
        &self.generators
    }

    /// The `2^k - 1` nonzero vectors of the representative.
    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    /// Sorted exponent set `P_U` of the representative, if discrete logs
    /// are available.
    pub fn exponents(&self) -> Option<&[u128]> {
        self.exponents.as_deref()
    }

    /// Shift that was added to the input exponents to reach the canonical
    /// representative.
    pub fn canonical_shift(&self) -> Option<u128> {
        self.canonical_shift
    }

    /// Exponent set of the member `ω^a · U`, sorted.
    pub fn shifted_exponents(&self, a: u128) -> Option<Vec<u128>> {
        let order = self.field.order();
        let a = a % order;
        self.exponents.as_ref().map(|exps| {
            let mut out: Vec<u128> = exps.iter().map(|&e| (e + a) % order).collect();
            out.sort_unstable();
            out
        })
    }

    pub fn representative(&self) -> Subspace {
        self.member(0)
    }

    /// `ω^a · U`.
    pub fn member(&self, a: u128) -> Subspace {
        let factor = self.field.exp(a);
        self.span_of(self.generators.iter().map(|&g| self.field.mul(g, factor)))
    }

    /// Members `ω^a · U` for `a = 0, 1, ...` until the orbit closes.
    pub fn orbit_members(&self) -> impl Iterator<Item = Subspace> + '_ {
        let len = self.orbit_length();
        let mut current = self.generators.clone();
        let mut a = 0u128;
        std::iter::from_fn(move || {
            if a == len {
                return None;
            }
            let s = self.span_of(current.iter().copied());
            for g in &mut current {
                *g = self.field.mul_by_generator(*g);
            }
            a += 1;
            Some(s)
        })
    }

    /// Smallest `a > 0` with `ω^a · U = U`.
    ///
    /// The stabilizer of `U` in the Singer group is `GF(2^d)^*` for the
    /// largest `d | gcd(v, k)` such that `U` is a `GF(2^d)`-subspace, so only
    /// those subfields need testing.
    pub fn orbit_length(&self) -> u128 {
        let order = self.field.order();
        let g = (self.field.degree() as usize).gcd(&self.k());
        let span = self.representative();
        for d in (2..=g).rev().filter(|d| g.is_multiple_of(*d)) {
            let sub_order = (1u128 << d) - 1;
            let beta = self.field.exp(order / sub_order);
            if self
                .generators
                .iter()
                .all(|&x| span.contains(self.field.mul(x, beta).bits()))
            {
                return order / sub_order;
            }
        }
        order
    }

    /// All `2 * C(2^k - 1, 2)` ordered quotients of the representative's
    /// nonzero vectors, with the edge-label table when they are pairwise
    /// distinct. `None` means the orbit is not good.
    pub fn is_good_orbit(&self) -> Option<EdgeLabelSet> {
        let n = self.elements.len();
        let mut ordered = HashMap::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = self
                    .field
                    .div(self.elements[i], self.elements[j])
                    .expect("nonzero elements");
                if ordered.insert(q, (i, j)).is_some() {
                    return None;
                }
            }
        }
        let order = self.field.order();
        let unordered_diffs = self.exponents.as_ref().map(|exps| {
            let mut set = BTreeSet::new();
            for i in 0..n {
                for j in i + 1..n {
                    let d = (exps[j] + order - exps[i]) % order;
                    set.insert(d.min(order - d));
                }
            }
            set
        });
        Some(EdgeLabelSet {
            ordered,
            unordered_diffs,
        })
    }

    fn span_of<I: IntoIterator<Item = FieldElement>>(&self, vectors: I) -> Subspace {
        Subspace::span(self.field.degree(), vectors.into_iter().map(|x| x.bits()))
            .expect("field elements fit the ambient space")
    }

    /// Parses an orbit line, reusing `field` when it matches the line's
    /// parameters.
    pub fn parse_line(line: &str, field: Option<&FieldSpec>) -> Result<Self, OrbitError> {
        let bad = |msg: &str| OrbitError::Parse(format!("{msg}: {line:?}"));
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some("orbit") {
            return Err(bad("expected 'orbit'"));
        }
        let (mut v, mut poly, mut k, mut gens) = (None, None, None, None);
        for tok in tokens {
            match tok.split_once('=') {
                Some(("v", x)) => v = Some(x.parse::<u32>().map_err(|_| bad("bad v"))?),
                Some(("poly", x)) => poly = Some(x),
                Some(("k", x)) => k = Some(x.parse::<usize>().map_err(|_| bad("bad k"))?),
                Some(("gens", x)) => {
                    gens = Some(
                        x.split(',')
                            .map(|h| u128::from_str_radix(h, 16).map(FieldElement::from_bits))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| bad("bad generator hex"))?,
                    )
                }
                _ => return Err(bad("unexpected token")),
            }
        }
        let (v, poly, k, gens) = (
            v.ok_or_else(|| bad("missing v"))?,
            poly.ok_or_else(|| bad("missing poly"))?,
            k.ok_or_else(|| bad("missing k"))?,
            gens.ok_or_else(|| bad("missing gens"))?,
        );
        if gens.len() != k {
            return Err(bad("generator count differs from k"));
        }
        let owned;
        let field = match field {
            Some(f) if f.degree() == v && f.modulus().to_string() == poly => f,
            _ => {
                owned = FieldSpec::from_hex(v, poly)?;
                &owned
            }
        };
        OrbitRep::from_generators(field, &gens)
    }
}

/// `orbit v=<v> poly=<hex> k=<k> gens=<hex,...>`
impl fmt::Display for OrbitRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| format!("{g:x}")).collect();
        write!(
            f,
            "orbit v={} poly={} k={} gens={}",
            self.field.degree(),
            self.field.modulus(),
            self.k(),
            gens.join(",")
        )
    }
}

/// Edge labels of the complete graph on a good orbit's one-dimensional
/// subspaces. The labels are the same for every member of the orbit.
#[derive(Clone, Debug)]
pub struct EdgeLabelSet {
    ordered: HashMap<FieldElement, (usize, usize)>,
    unordered_diffs: Option<BTreeSet<u128>>,
}

impl EdgeLabelSet {
    /// Quotient `elements[i] / elements[j]` mapped to `(i, j)`.
    pub fn ordered_quotients(&self) -> &HashMap<FieldElement, (usize, usize)> {
        &self.ordered
    }

    /// Exponent differences normalized to `min(d, L - d)`, when exponents
    /// are known.
    pub fn unordered_diffs(&self) -> Option<&BTreeSet<u128>> {
        self.unordered_diffs.as_ref()
    }

    /// One key per unordered pair: the smaller (by bits) of `q` and `1/q`.
    pub fn unordered_keys(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.ordered.iter().filter(|(_, (i, j))| i < j).map(|(&q, &(i, j))| {
            let inverse = self
                .ordered
                .iter()
                .find(|(_, &(a, b))| a == j && b == i)
                .map(|(&k, _)| k)
                .expect("both orientations present");
            q.min(inverse)
        })
    }

    /// Number of unordered labels.
    pub fn len(&self) -> usize {
        self.ordered.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }
}

fn bits_of(xs: &[FieldElement]) -> Vec<u128> {
    xs.iter().map(|x| x.bits()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_distance;
    use std::collections::HashSet;

    fn w(field: &FieldSpec, e: u128) -> FieldElement {
        field.exp(e)
    }

    #[test]
    fn v5_example_with_modulus_29() {
        // x^5 + x^3 + 1 makes 1 + ω = ω^14
        let f = FieldSpec::from_hex(5, "29").unwrap();
        let rep = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1)]).unwrap();
        assert_eq!(rep.exponents().unwrap(), &[0, 1, 14]);
        assert_eq!(rep.canonical_shift(), Some(0));
        assert_eq!(rep.shifted_exponents(1).unwrap(), vec![1, 2, 15]);
        assert_eq!(rep.shifted_exponents(16).unwrap(), vec![16, 17, 30]);
        assert_eq!(rep.shifted_exponents(17).unwrap(), vec![0, 17, 18]);
        assert_eq!(rep.shifted_exponents(30).unwrap(), vec![0, 13, 30]);
        assert_eq!(rep.orbit_length(), 31);
        let members: HashSet<Subspace> = rep.orbit_members().collect();
        assert_eq!(members.len(), 31);
    }

    #[test]
    fn default_modulus_label() {
        let f = FieldSpec::new(5, None).unwrap();
        let rep = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1)]).unwrap();
        assert_eq!(rep.exponents().unwrap(), &[0, 1, 18]);
    }

    #[test]
    fn canonical_shift_is_stable_across_orbit() {
        let f = FieldSpec::new(7, None).unwrap();
        let base = OrbitRep::from_generators(&f, &[w(&f, 3), w(&f, 10), w(&f, 50)]).unwrap();
        for a in [1u128, 17, 99] {
            let gens: Vec<_> = [3u128, 10, 50].iter().map(|&e| w(&f, e + a)).collect();
            let other = OrbitRep::from_generators(&f, &gens).unwrap();
            assert_eq!(other.exponents(), base.exponents());
            assert_eq!(other.representative(), base.representative());
        }
        assert_eq!(base.exponents().unwrap()[0], 0);
    }

    #[test]
    fn member_exponents_match_subspace() {
        let f = FieldSpec::new(9, None).unwrap();
        let rep = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1), w(&f, 77)]).unwrap();
        for a in [0u128, 5, 400] {
            let member = rep.member(a);
            let mut logs: Vec<u128> = member
                .nonzero_vectors()
                .into_iter()
                .map(|x| f.dlog(FieldElement::from_bits(x)).unwrap())
                .collect();
            logs.sort_unstable();
            assert_eq!(logs, rep.shifted_exponents(a).unwrap());
        }
    }

    #[test]
    fn k1_orbit() {
        let f = FieldSpec::new(6, None).unwrap();
        let rep = OrbitRep::from_generators(&f, &[w(&f, 9)]).unwrap();
        assert_eq!(rep.exponents().unwrap(), &[0]);
        assert_eq!(rep.orbit_length(), 63);
    }

    #[test]
    fn dependent_generators() {
        let f = FieldSpec::new(8, None).unwrap();
        let sum = w(&f, 0) + w(&f, 1);
        assert_eq!(
            OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1), sum]).unwrap_err(),
            OrbitError::DependentGenerators
        );
        assert_eq!(
            OrbitRep::from_generators(&f, &[]).unwrap_err(),
            OrbitError::NoGenerators
        );
    }

    #[test]
    fn closure_under_addition() {
        let f = FieldSpec::new(13, None).unwrap();
        let rep = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1), w(&f, 4321)]).unwrap();
        assert_eq!(rep.exponents().unwrap().len(), 7);
        let set: HashSet<FieldElement> = rep.elements().iter().copied().collect();
        for &a in rep.elements() {
            for &b in rep.elements() {
                let s = a + b;
                assert!(s.is_zero() || set.contains(&s));
            }
        }
    }

    #[test]
    fn orbit_length_matches_walk() {
        // walk ω^a U until it repeats
        let f = FieldSpec::new(6, None).unwrap();
        for gens in [[0u128, 1, 2], [0, 21, 42], [0, 9, 18], [5, 7, 40]] {
            let elems: Vec<_> = gens.iter().map(|&e| w(&f, e)).collect();
            let Ok(rep) = OrbitRep::from_generators(&f, &elems) else {
                continue;
            };
            let start = rep.representative();
            let walked = (1..=f.order()).find(|&a| rep.member(a) == start).unwrap();
            assert_eq!(rep.orbit_length(), walked, "gens {gens:?}");
            assert_eq!(f.order() % walked, 0);
        }
    }

    /// GF(16) sits inside GF(2^12) as a 4-dim subspace fixed by GF(16)^*.
    #[test]
    fn subfield_orbit_is_short_and_bad() {
        let f = FieldSpec::new(12, None).unwrap();
        let beta = f.exp(f.order() / 15);
        let gens: Vec<_> = (0..4).map(|i| f.pow(beta, i).unwrap()).collect();
        let rep = OrbitRep::from_generators(&f, &gens).unwrap();
        assert_eq!(rep.orbit_length(), 4095 / 15);
        assert!(rep.is_good_orbit().is_none());
        // same for GF(8) as a 3-space
        let gamma = f.exp(f.order() / 7);
        let gens: Vec<_> = (0..3).map(|i| f.pow(gamma, i).unwrap()).collect();
        let rep = OrbitRep::from_generators(&f, &gens).unwrap();
        assert_eq!(rep.orbit_length(), 585);
        assert!(rep.is_good_orbit().is_none());
    }

    #[test]
    fn k2_full_orbits_are_good() {
        let f = FieldSpec::new(7, None).unwrap();
        for e in 1..127 {
            let rep = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, e)]).unwrap();
            let labels = rep.is_good_orbit().expect("k=2 with full orbit is good");
            assert_eq!(labels.len(), 3);
            assert_eq!(labels.ordered_quotients().len(), 6);
        }
    }

    #[test]
    fn good_orbit_has_min_distance_four() {
        let f = FieldSpec::new(10, None).unwrap();
        let mut good = 0;
        let mut bad = 0;
        for e in 2..60 {
            let Ok(rep) = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1), w(&f, e)]) else {
                continue;
            };
            let members: Vec<Subspace> = rep.orbit_members().collect();
            let d = min_distance(&members).unwrap();
            match rep.is_good_orbit() {
                Some(labels) => {
                    good += 1;
                    assert_eq!(rep.orbit_length(), f.order());
                    assert!(d >= 4, "e={e}");
                    assert_eq!(labels.len(), 21);
                    assert_eq!(labels.ordered_quotients().len(), 42);
                    assert_eq!(labels.unordered_diffs().unwrap().len(), 21);
                    let keys: HashSet<_> = labels.unordered_keys().collect();
                    assert_eq!(keys.len(), 21);
                    for (q, &(i, j)) in labels.ordered_quotients() {
                        assert_eq!(*q, f.div(rep.elements()[i], rep.elements()[j]).unwrap());
                    }
                }
                None => {
                    bad += 1;
                    assert!(d <= 2, "e={e}");
                }
            }
        }
        assert!(good > 0 && bad > 0, "good={good} bad={bad}");
    }

    #[test]
    fn large_field_without_labels() {
        let f = FieldSpec::new(100, None).unwrap();
        let gens = [w(&f, 0), w(&f, 1), w(&f, 987654321987654321)];
        let rep = OrbitRep::from_generators(&f, &gens).unwrap();
        assert!(rep.exponents().is_none());
        assert_eq!(rep.generators(), &gens);
        let labels = rep.is_good_orbit().unwrap();
        assert!(labels.unordered_diffs().is_none());
        assert_eq!(labels.len(), 21);
        assert_eq!(rep.orbit_length(), f.order());
    }

    #[test]
    fn line_round_trip() {
        let f = FieldSpec::new(13, None).unwrap();
        let rep = OrbitRep::from_generators(&f, &[w(&f, 0), w(&f, 1), w(&f, 999)]).unwrap();
        let line = rep.to_string();
        assert!(line.starts_with("orbit v=13 poly="));
        let back = OrbitRep::parse_line(&line, None).unwrap();
        assert_eq!(back.generators(), rep.generators());
        assert_eq!(back.exponents(), rep.exponents());
        assert!(OrbitRep::parse_line("orbit v=13 k=3", None).is_err());
        assert!(OrbitRep::parse_line("orbit v=13 poly=201b k=2 gens=1,2,3", None).is_err());
    }
}
