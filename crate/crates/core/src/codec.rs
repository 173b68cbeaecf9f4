//! Encoder and decoder for codes made of good Singer orbits.
//!
//! Every codeword is `ω^a · U_i` for an orbit representative `U_i`. Because
//! the ordered quotients of a codeword's nonzero vectors do not depend on the
//! shift `a`, one division of two received vectors identifies which pair of
//! representative vectors they are; the merged quotient table across all
//! orbits is injective, so the lookup also identifies the orbit. The
//! remaining basis vectors follow from precomputed ratios at one
//! multiplication each.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};
use crate::linalg::Subspace;
use crate::orbit::{EdgeLabelSet, OrbitError, OrbitRep};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("message {message} is outside 0..{limit}")]
    MessageOutOfRange { message: u128, limit: u128 },
    #[error("received word is not decodable")]
    NotDecodable,
    #[error("received word has dimension {dim}; decodable range is 2..={max}")]
    DimensionOutOfRange { dim: usize, max: usize },
    #[error("error decoding is implemented for k = 3 only (code has k = {0})")]
    ErrorDecodingUnsupported(usize),
    #[error("orbit {0} is not a good orbit")]
    NotGood(usize),
    #[error("orbit {0} shares an edge label with an earlier orbit")]
    LabelCollision(usize),
    #[error("orbit {index} does not match the code parameters")]
    Mismatch { index: usize },
    #[error("a code needs at least one orbit")]
    Empty,
    #[error("received word lives in dimension {found}, code in {expected}")]
    AmbientMismatch { expected: u32, found: u32 },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("malformed code file: {0}")]
    Parse(String),
}

/// Field operations spent by one decode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpCount {
    pub divisions: u32,
    pub multiplications: u32,
}

/// Where a quotient key points: the orbit, the representative pair
/// `(anchor, partner)` whose quotient it is, and the ratios
/// `c_t / c_anchor` that complete `{c_anchor, c_partner}` to a basis.
#[derive(Clone, Debug)]
struct TableEntry {
    orbit: usize,
    anchor: usize,
    completion: Vec<FieldElement>,
}

#[derive(Clone, Debug)]
pub struct Code {
    field: FieldSpec,
    k: usize,
    seed: u64,
    orbits: Vec<OrbitRep>,
    tables: Vec<EdgeLabelSet>,
    global: HashMap<FieldElement, TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub codeword: Subspace,
    pub orbit_index: usize,
    /// Shift `a` with `codeword = ω^a · U`, when discrete logs are available.
    pub shift: Option<u128>,
    pub op_count: OpCount,
    /// Subspace distance between the received word and the codeword.
    pub distance: usize,
    anchor: FieldElement,
    anchor_index: usize,
}

impl Code {
    /// Assembles a code from good orbits with pairwise disjoint edge labels.
    pub fn new(field: &FieldSpec, k: usize, orbits: Vec<OrbitRep>, seed: u64) -> Result<Self, CodecError> {
        let mut code = Code {
            field: field.clone(),
            k,
            seed,
            orbits: Vec::with_capacity(orbits.len()),
            tables: Vec::with_capacity(orbits.len()),
            global: HashMap::new(),
        };
        for orbit in orbits {
            code.push(orbit)?;
        }
        if code.orbits.is_empty() {
            return Err(CodecError::Empty);
        }
        Ok(code)
    }

    /// An empty code that orbits can be added to one at a time.
    pub(crate) fn empty(field: &FieldSpec, k: usize, seed: u64) -> Self {
        Code {
            field: field.clone(),
            k,
            seed,
            orbits: Vec::new(),
            tables: Vec::new(),
            global: HashMap::new(),
        }
    }

    /// Whether `orbit` could be added without breaking injectivity of the
    /// merged table. Returns its labels when it could.
    pub(crate) fn admits(&self, orbit: &OrbitRep) -> Result<EdgeLabelSet, CodecError> {
        let index = self.orbits.len();
        if orbit.field() != &self.field || orbit.k() != self.k {
            return Err(CodecError::Mismatch { index });
        }
        let labels = orbit.is_good_orbit().ok_or(CodecError::NotGood(index))?;
        if labels.ordered_quotients().keys().any(|q| self.global.contains_key(q)) {
            return Err(CodecError::LabelCollision(index));
        }
        Ok(labels)
    }

    pub(crate) fn push(&mut self, orbit: OrbitRep) -> Result<(), CodecError> {
        let labels = self.admits(&orbit)?;
        let index = self.orbits.len();
        let elements = orbit.elements();
        for (&q, &(i, j)) in labels.ordered_quotients() {
            let completion = completion_ratios(&self.field, elements, i, j, self.k);
            self.global.insert(
                q,
                TableEntry {
                    orbit: index,
                    anchor: i,
                    completion,
                },
            );
        }
        self.orbits.push(orbit);
        self.tables.push(labels);
        Ok(())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn orbits(&self) -> &[OrbitRep] {
        &self.orbits
    }

    pub fn tables(&self) -> &[EdgeLabelSet] {
        &self.tables
    }

    /// Number of ordered quotient keys in the merged table.
    pub fn table_len(&self) -> usize {
        self.global.len()
    }

    /// `|orbits| · L`, saturating at `u128::MAX`.
    pub fn len(&self) -> u128 {
        (self.orbits.len() as u128).saturating_mul(self.field.order())
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// All codewords, orbit by orbit. Only sensible for small fields.
    pub fn codewords(&self) -> impl Iterator<Item = Subspace> + '_ {
        self.orbits.iter().flat_map(|o| o.orbit_members())
    }

    /// Codeword for `message`: orbit `message / L`, shift `message % L`.
    pub fn encode(&self, message: u128) -> Result<Subspace, CodecError> {
        let order = self.field.order();
        let orbit = (message / order) as usize;
        if orbit >= self.orbits.len() {
            return Err(CodecError::MessageOutOfRange {
                message,
                limit: self.len(),
            });
        }
        Ok(self.orbits[orbit].member(message % order))
    }

    /// Codeword `ω^shift · U_orbit`.
    pub fn encode_parts(&self, orbit: usize, shift: u128) -> Result<Subspace, CodecError> {
        let rep = self.orbits.get(orbit).ok_or(CodecError::MessageOutOfRange {
            message: orbit as u128,
            limit: self.orbits.len() as u128,
        })?;
        Ok(rep.member(shift))
    }

    /// Decodes a 2-dimensional received word contained in a codeword, using
    /// its two canonical basis rows.
    pub fn decode_erasure(&self, received: &Subspace) -> Result<DecodeResult, CodecError> {
        self.check_ambient(received)?;
        if received.dim() != 2 {
            return Err(CodecError::DimensionOutOfRange {
                dim: received.dim(),
                max: self.k + 1,
            });
        }
        let (r, s) = (received.rows()[0], received.rows()[1]);
        self.decode_erasure_pair(el(r), el(s))
    }

    /// Erasure decoding from an explicit pair of independent vectors of the
    /// received space.
    pub fn decode_erasure_pair(&self, r: FieldElement, s: FieldElement) -> Result<DecodeResult, CodecError> {
        let received =
            Subspace::span(self.field.degree(), [r.bits(), s.bits()]).map_err(|_| CodecError::NotDecodable)?;
        if received.dim() != 2 {
            return Err(CodecError::DimensionOutOfRange {
                dim: received.dim(),
                max: self.k + 1,
            });
        }
        let mut ops = OpCount::default();
        let result = self.reconstruct(r, s, &mut ops).ok_or(CodecError::NotDecodable)?;
        Ok(self.finish(result, ops, self.k - 2))
    }

    /// Decodes a `(k+1)`-dimensional word holding one error (k = 3 only).
    ///
    /// The span `I` of three received vectors meets the codeword in at least
    /// two dimensions, so one of the seven 2-dimensional subspaces of `I`
    /// lies in the codeword. Each is tried as an erasure; a hit is accepted
    /// once its reconstructed third vector is found in the received word.
    /// Two codewords inside one 4-space would meet in two dimensions, so the
    /// first accepted candidate is the only one.
    pub fn decode_error(&self, received: &Subspace) -> Result<DecodeResult, CodecError> {
        self.decode_error_counted(received, &mut OpCount::default())
    }

    fn decode_error_counted(&self, received: &Subspace, ops: &mut OpCount) -> Result<DecodeResult, CodecError> {
        self.check_ambient(received)?;
        if self.k != 3 {
            return Err(CodecError::ErrorDecodingUnsupported(self.k));
        }
        if received.dim() != 4 {
            return Err(CodecError::DimensionOutOfRange {
                dim: received.dim(),
                max: self.k + 1,
            });
        }
        let rows = received.rows();
        let (r, s, t) = (rows[0], rows[1], rows[2]);
        let probes = [
            (r, s),
            (r, t),
            (s, t),
            (r, s ^ t),
            (s, r ^ t),
            (t, r ^ s),
            (r ^ s, r ^ t),
        ];
        for (x, y) in probes {
            if let Some(result) = self.reconstruct(el(x), el(y), ops) {
                if result.codeword.is_subspace_of(received) {
                    return Ok(self.finish(result, *ops, 1));
                }
            }
        }
        Err(CodecError::NotDecodable)
    }

    /// Dispatches on the received dimension: `2..=k` are erasure cases
    /// (with a containment check above 2, so `k` means distance 0), `k + 1`
    /// is the single-error case.
    pub fn decode(&self, received: &Subspace) -> Result<DecodeResult, CodecError> {
        self.decode_traced(received).0
    }

    /// Like [`decode`](Self::decode), also reporting the field operations
    /// spent when decoding fails.
    pub fn decode_traced(&self, received: &Subspace) -> (Result<DecodeResult, CodecError>, OpCount) {
        let mut ops = OpCount::default();
        let result = self.decode_counted(received, &mut ops);
        (result, ops)
    }

    fn decode_counted(&self, received: &Subspace, ops: &mut OpCount) -> Result<DecodeResult, CodecError> {
        self.check_ambient(received)?;
        let dim = received.dim();
        if dim == self.k + 1 {
            return self.decode_error_counted(received, ops);
        }
        if dim < 2 || dim > self.k {
            return Err(CodecError::DimensionOutOfRange { dim, max: self.k + 1 });
        }
        let rows = received.rows();
        let result = self
            .reconstruct(el(rows[0]), el(rows[1]), ops)
            .ok_or(CodecError::NotDecodable)?;
        if dim > 2 && !received.is_subspace_of(&result.codeword) {
            return Err(CodecError::NotDecodable);
        }
        Ok(self.finish(result, *ops, self.k - dim))
    }

    /// Message index of a decoded word: `orbit · L + dlog(anchor / c_anchor)`.
    pub fn message_of(&self, result: &DecodeResult) -> Result<u128, CodecError> {
        let shift = self.shift_of(result.orbit_index, result.anchor, result.anchor_index)?;
        Ok(result.orbit_index as u128 * self.field.order() + shift)
    }

    fn shift_of(&self, orbit: usize, anchor: FieldElement, index: usize) -> Result<u128, CodecError> {
        let c = self.orbits[orbit].elements()[index];
        let factor = self.field.div(anchor, c)?;
        Ok(self.field.dlog(factor)?)
    }

    /// One division to find the edge, one multiplication per missing basis
    /// vector.
    fn reconstruct(&self, r: FieldElement, s: FieldElement, ops: &mut OpCount) -> Option<DecodeResult> {
        let key = self.field.div(r, s).ok()?;
        ops.divisions += 1;
        let entry = self.global.get(&key)?;
        let mut basis = vec![r.bits(), s.bits()];
        for &ratio in &entry.completion {
            basis.push(self.field.mul(r, ratio).bits());
            ops.multiplications += 1;
        }
        let codeword = Subspace::span(self.field.degree(), basis).ok()?;
        Some(DecodeResult {
            codeword,
            orbit_index: entry.orbit,
            shift: None,
            op_count: OpCount::default(),
            distance: 0,
            anchor: r,
            anchor_index: entry.anchor,
        })
    }

    fn finish(&self, mut result: DecodeResult, ops: OpCount, distance: usize) -> DecodeResult {
        if self.field.has_dlog() {
            result.shift = self
                .shift_of(result.orbit_index, result.anchor, result.anchor_index)
                .ok();
        }
        result.op_count = ops;
        result.distance = distance;
        result
    }

    fn check_ambient(&self, received: &Subspace) -> Result<(), CodecError> {
        if received.ambient() != self.field.degree() {
            return Err(CodecError::AmbientMismatch {
                expected: self.field.degree(),
                found: received.ambient(),
            });
        }
        Ok(())
    }

    /// Parses the text produced by `Display`.
    pub fn parse(text: &str) -> Result<Self, CodecError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| CodecError::Parse("empty input".into()))?;
        let bad = || CodecError::Parse(format!("bad header {header:?}"));
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("code") {
            return Err(bad());
        }
        let (mut v, mut poly, mut k, mut seed) = (None, None, None, None);
        for tok in tokens {
            match tok.split_once('=') {
                Some(("v", x)) => v = Some(x.parse::<u32>().map_err(|_| bad())?),
                Some(("poly", x)) => poly = Some(x),
                Some(("k", x)) => k = Some(x.parse::<usize>().map_err(|_| bad())?),
                Some(("seed", x)) => seed = Some(x.parse::<u64>().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        let field = FieldSpec::from_hex(v.ok_or_else(bad)?, poly.ok_or_else(bad)?)?;
        let k = k.ok_or_else(bad)?;
        let orbits = lines
            .map(|line| OrbitRep::parse_line(line, Some(&field)))
            .collect::<Result<Vec<_>, _>>()?;
        Code::new(&field, k, orbits, seed.ok_or_else(bad)?)
    }
}

/// `code v=<v> poly=<hex> k=<k> seed=<u64>` and one orbit line per orbit.
impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "code v={} poly={} k={} seed={}",
            self.field.degree(),
            self.field.modulus(),
            self.k,
            self.seed
        )?;
        for o in &self.orbits {
            write!(f, "\n{o}")?;
        }
        Ok(())
    }
}

impl DecodeResult {
    /// `status=ok orbit=<idx> shift=<a|-> divs=<n> muls=<n>`
    pub fn status_line(&self) -> String {
        let shift = self.shift.map_or_else(|| "-".to_string(), |a| a.to_string());
        format!(
            "status=ok orbit={} shift={} divs={} muls={}",
            self.orbit_index, shift, self.op_count.divisions, self.op_count.multiplications
        )
    }

    /// The received vector the reconstruction was anchored on.
    pub fn anchor(&self) -> FieldElement {
        self.anchor
    }
}

/// Status line for a failed decode.
pub fn failure_line(ops: OpCount) -> String {
    format!(
        "status=fail orbit=- shift=- divs={} muls={}",
        ops.divisions, ops.multiplications
    )
}

fn el(x: u128) -> FieldElement {
    FieldElement::from_bits(x)
}

/// Ratios `c_t / c_i` for representative vectors `c_t` that extend
/// `{c_i, c_j}` to a basis of the representative.
fn completion_ratios(field: &FieldSpec, elements: &[FieldElement], i: usize, j: usize, k: usize) -> Vec<FieldElement> {
    let mut span =
        Subspace::span(field.degree(), [elements[i].bits(), elements[j].bits()]).expect("field elements fit");
    let mut out = Vec::with_capacity(k.saturating_sub(2));
    for &c in elements {
        if span.dim() == k {
            break;
        }
        if span.insert(c.bits()) {
            out.push(field.div(c, elements[i]).expect("nonzero"));
        }
    }
    out
}
