//! Randomized construction of good orbits and multi-orbit codes, and the
//! analytic estimate of how likely a random orbit is to be good.
//!
//! A trial picks generators `ω^{e_1}, ..., ω^{e_k}`. For the first orbit the
//! exponents are anchored at `e_1 = 0, e_2 = 1` with the rest uniform in
//! `2..=L-1`; the Singer action makes `e_1 = 0` free of loss of generality.
//! Anchoring `e_2` as well would put the quotient `ω` into every orbit's
//! table, so later orbits draw `e_2, ..., e_k` uniformly from `1..=L-1`.
//!
//! Every trial uses its own ChaCha8 stream (`seed`, stream = trial index),
//! so results depend only on the seed and are reproducible across machines.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codec::{Code, CodecError};
use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::{gaussian, is_prime_power};
use crate::orbit::{OrbitError, OrbitRep};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search parameters: {0}")]
    InvalidConfig(String),
    #[error("found {found} of {wanted} orbits in {trials} trials")]
    TrialsExhausted {
        partial: Box<Code>,
        found: usize,
        wanted: usize,
        trials: u64,
        stats: SearchStats,
    },
    #[error("invalid estimator parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub field: FieldSpec,
    pub k: usize,
    pub n_orbits: usize,
    pub max_trials: u64,
    pub seed: u64,
}

impl SearchConfig {
    pub const DEFAULT_MAX_TRIALS: u64 = 10_000;

    pub fn new(field: &FieldSpec, k: usize, n_orbits: usize, seed: u64) -> Self {
        SearchConfig {
            field: field.clone(),
            k,
            n_orbits,
            max_trials: Self::DEFAULT_MAX_TRIALS,
            seed,
        }
    }

    pub fn with_max_trials(mut self, max_trials: u64) -> Self {
        self.max_trials = max_trials;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let v = self.field.degree() as usize;
        if self.k < 2 || self.k > v {
            return Err(SearchError::InvalidConfig(format!("k={} must lie in 2..={v}", self.k)));
        }
        if self.n_orbits == 0 {
            return Err(SearchError::InvalidConfig("n_orbits must be at least 1".into()));
        }
        if self.max_trials == 0 {
            return Err(SearchError::InvalidConfig("max_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// How a trial draws its exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorRecipe {
    /// `e_1 = 0`, `e_2 = 1`, the rest uniform in `2..=L-1`.
    Anchored,
    /// `e_1 = 0`, the rest uniform in `1..=L-1`.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialFailure {
    Dependent,
    LabelCollision,
}

impl fmt::Display for TrialFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialFailure::Dependent => "dependent generators",
            TrialFailure::LabelCollision => "edge-label collision",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub trials: u64,
    pub dependent: u64,
    pub label_collisions: u64,
    pub cross_collisions: u64,
}

/// RNG for trial number `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws exponents per `recipe` and tests the resulting orbit.
pub fn random_orbit_trial<R: Rng + ?Sized>(
    field: &FieldSpec,
    k: usize,
    recipe: GeneratorRecipe,
    rng: &mut R,
) -> Result<OrbitRep, TrialFailure> {
    let order = field.order();
    let mut exponents = Vec::with_capacity(k);
    exponents.push(0u128);
    let lower = match recipe {
        GeneratorRecipe::Anchored => {
            exponents.push(1);
            2
        }
        GeneratorRecipe::Free => 1,
    };
    while exponents.len() < k {
        exponents.push(rng.gen_range(lower..order));
    }
    trial_from_exponents(field, &exponents)
}

/// Tests the orbit of `span{ω^e : e ∈ exponents}`.
pub fn trial_from_exponents(field: &FieldSpec, exponents: &[u128]) -> Result<OrbitRep, TrialFailure> {
    let gens: Vec<FieldElement> = exponents.iter().map(|&e| field.exp(e)).collect();
    let rep = match OrbitRep::from_generators(field, &gens) {
        Ok(rep) => rep,
        Err(OrbitError::DependentGenerators) => return Err(TrialFailure::Dependent),
        Err(e) => panic!("trial generators are valid field elements: {e}"),
    };
    if rep.is_good_orbit().is_some() {
        Ok(rep)
    } else {
        Err(TrialFailure::LabelCollision)
    }
}

/// Accumulates good orbits whose edge labels are disjoint from those
/// already accepted, until `n_orbits` are found or trials run out.
pub fn find_code(config: &SearchConfig) -> Result<Code, SearchError> {
    find_code_with_stats(config).map(|(code, _)| code)
}

pub fn find_code_with_stats(config: &SearchConfig) -> Result<(Code, SearchStats), SearchError> {
    config.validate()?;
    let mut code = Code::empty(&config.field, config.k, config.seed);
    let mut stats = SearchStats::default();
    for index in 0..config.max_trials {
        if code.orbits().len() == config.n_orbits {
            break;
        }
        stats.trials += 1;
        let recipe = if code.orbits().is_empty() {
            GeneratorRecipe::Anchored
        } else {
            GeneratorRecipe::Free
        };
        let mut rng = trial_rng(config.seed, index);
        match random_orbit_trial(&config.field, config.k, recipe, &mut rng) {
            Ok(rep) => match code.push(rep) {
                Ok(()) => {}
                Err(CodecError::LabelCollision(_)) => stats.cross_collisions += 1,
                Err(e) => return Err(e.into()),
            },
            Err(TrialFailure::Dependent) => stats.dependent += 1,
            Err(TrialFailure::LabelCollision) => stats.label_collisions += 1,
        }
    }
    if code.orbits().len() < config.n_orbits {
        return Err(SearchError::TrialsExhausted {
            found: code.orbits().len(),
            wanted: config.n_orbits,
            trials: stats.trials,
            partial: Box::new(code),
            stats,
        });
    }
    Ok((code, stats))
}

/// Birthday-style estimate for the probability that `s` label pairs drawn
/// from `m` classes are all distinct.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityEstimate {
    pub q: u64,
    pub v: u32,
    pub k: u32,
    pub n: u64,
    /// Number of unordered label classes: `(q^v - 2)/2` for even `q`,
    /// `(q^v - 1)/2` for odd `q`.
    pub m: BigUint,
    /// Number of label pairs that must be distinct: `C(n [k;1]_q, 2)`.
    pub s: BigUint,
    /// `-s(s-1)/(2m)`.
    pub exponent: f64,
    /// `s(s-1)` and `2m`, the exact ratio behind `exponent`.
    pub exponent_ratio: (BigUint, BigUint),
    /// `(1 - 1/m)(1 - 2/m)...(1 - s/m)`.
    pub exact_product: f64,
    /// Natural log of `exact_product`; stays finite when the product
    /// underflows.
    pub ln_exact_product: f64,
}

pub fn estimate_success(q: u64, v: u32, k: u32, n: u64) -> Result<ProbabilityEstimate, SearchError> {
    if !is_prime_power(q) || v < 2 || k < 2 || k > v || n == 0 {
        return Err(SearchError::InvalidParameters(format!("q={q} v={v} k={k} n={n}")));
    }
    let m = label_classes(q, v);
    let points = gaussian(k, 1, q).expect("k >= 1") * BigUint::from(n);
    let s = choose2(&points);
    let numerator = if s.is_zero() { BigUint::zero() } else { &s * (&s - 1u32) };
    let denominator = &m * 2u32;
    let exponent = -big_ratio(&numerator, &denominator);
    let ln_exact_product = ln_distinct_probability(&m, &s);
    Ok(ProbabilityEstimate {
        q,
        v,
        k,
        n,
        m,
        s,
        exponent,
        exponent_ratio: (numerator, denominator),
        exact_product: ln_exact_product.exp(),
        ln_exact_product,
    })
}

/// Two readings of "how many orbits can be combined without conflicts".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinableOrbits {
    /// Largest `n` with `s(s-1)/(2m) <= 1`, `s = C(n [k;1]_q, 2)`.
    pub unit_exponent: BigUint,
    /// `floor(sqrt(2 m ln 2) / (2 [k;1]_q))`: the birthday median
    /// `sqrt(2 m ln 2)` spread over `2 [k;1]_q` labels per orbit.
    pub birthday_median: BigUint,
}

pub fn combinable_orbits(q: u64, v: u32, k: u32) -> Result<CombinableOrbits, SearchError> {
    if !is_prime_power(q) || v < 2 || k < 2 || k > v {
        return Err(SearchError::InvalidParameters(format!("q={q} v={v} k={k}")));
    }
    let m = label_classes(q, v);
    let points = gaussian(k, 1, q).expect("k >= 1");
    let fits = |n: &BigUint| {
        let s = choose2(&(&points * n));
        if s.is_zero() {
            return true;
        }
        &s * (&s - 1u32) <= &m * 2u32
    };
    let mut lo = BigUint::zero();
    let mut hi = BigUint::one();
    while fits(&hi) {
        lo = hi.clone();
        hi <<= 1;
    }
    // invariant: fits(lo) (or lo = 0), !fits(hi)
    while &hi - &lo > BigUint::one() {
        let mid = (&lo + &hi) >> 1;
        if fits(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (ln2_num, ln2_den) = ln2_rational();
    let x = (&m * 2u32 * ln2_num) / ln2_den;
    let birthday_median = x.sqrt() / (points * 2u32);
    Ok(CombinableOrbits {
        unit_exponent: lo,
        birthday_median,
    })
}

fn label_classes(q: u64, v: u32) -> BigUint {
    let qv = num_traits::Pow::pow(BigUint::from(q), v);
    if q.is_multiple_of(2) {
        (qv - 2u32) / 2u32
    } else {
        (qv - 1u32) / 2u32
    }
}

fn choose2(n: &BigUint) -> BigUint {
    if n < &BigUint::from(2u32) {
        return BigUint::zero();
    }
    n * (n - 1u32) / 2u32
}

/// ln 2 to 60 decimal places.
fn ln2_rational() -> (BigUint, BigUint) {
    let num = BigUint::parse_bytes(b"693147180559945309417232121458176568075500134360255254120680", 10)
        .expect("valid digits");
    let den = num_traits::Pow::pow(BigUint::from(10u32), 60u32);
    (num, den)
}

/// `a / b` as `f64` without overflowing on huge operands.
pub(crate) fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let shift = |x: &BigUint| x.bits().saturating_sub(64);
    let (sa, sb) = (shift(a), shift(b));
    let fa = (a >> sa).to_f64().expect("fits in 64 bits");
    let fb = (b >> sb).to_f64().expect("fits in 64 bits");
    fa / fb * 2f64.powi(sa as i32 - sb as i32)
}

/// `ln ∏_{i=1}^{s} (1 - i/m)`.
fn ln_distinct_probability(m: &BigUint, s: &BigUint) -> f64 {
    if s >= m {
        return f64::NEG_INFINITY;
    }
    if s.is_zero() {
        return 0.0;
    }
    let ratio = big_ratio(s, m);
    if let Some(count) = s.to_u64().filter(|&c| c <= 1_000_000) {
        let mf = big_ratio(m, &BigUint::one());
        return (1..=count).map(|i| (-(i as f64) / mf).ln_1p()).sum();
    }
    if ratio < 1e-3 {
        // -Σ_j S_j / (j m^j) with power sums S_1, S_2, S_3
        let s1 = s * (s + 1u32) / 2u32;
        let s2 = s * (s + 1u32) * (s * 2u32 + 1u32) / 6u32;
        let s3 = &s1 * &s1;
        return -big_ratio(&s1, m) - big_ratio(&s2, &(m * m)) / 2.0 - big_ratio(&s3, &(m * m * m)) / 3.0;
    }
    // Stirling: ln P = -(m - s - 1/2) ln(1 - s/m) - s + O(1/(m - s))
    let rest = big_ratio(&(m - s), &BigUint::one()) - 0.5;
    let sf = big_ratio(s, &BigUint::one());
    -rest * (-ratio).ln_1p() - sf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_distance, Subspace};
    use std::collections::HashSet;

    #[test]
    fn estimate_v100_k3() {
        let e = estimate_success(2, 100, 3, 1).unwrap();
        assert_eq!(e.s, BigUint::from(21u32));
        assert_eq!(e.m.to_string(), "633825300114114700748351602687");
        let expected = -3.3132158019282496e-28;
        assert!(((e.exponent - expected) / expected).abs() < 1e-12);
        assert!((e.exact_product - 1.0).abs() < 1e-20);
    }

    #[test]
    fn odd_q_classes() {
        let e = estimate_success(3, 4, 2, 1).unwrap();
        assert_eq!(e.m, BigUint::from(40u32));
        // [2;1]_3 = 4 points, C(4,2) = 6 pairs
        assert_eq!(e.s, BigUint::from(6u32));
        let direct: f64 = (1..=6).map(|i| 1.0 - i as f64 / 40.0).product();
        assert!((e.exact_product - direct).abs() < 1e-12);
        assert!(estimate_success(6, 4, 2, 1).is_err());
        assert!(estimate_success(2, 4, 1, 1).is_err());
        assert!(estimate_success(2, 4, 2, 0).is_err());
    }

    #[test]
    fn v20_numbers() {
        let e = estimate_success(2, 20, 3, 1).unwrap();
        assert_eq!(e.m, BigUint::from(524287u32));
        assert!((e.exponent + 210.0 / 524287.0).abs() < 1e-15);
    }

    #[test]
    fn product_agrees_with_exponential_when_sparse() {
        for (v, n) in [
            (100, 1u64),
            (100, 1_000_000),
            (100, 10u64.pow(12)),
            (60, 1000),
            (40, 10),
        ] {
            let e = estimate_success(2, v, 3, n).unwrap();
            let s = big_ratio(&e.s, &BigUint::one());
            let m = big_ratio(&e.m, &BigUint::one());
            if s * s / m < 1e-3 {
                let rel = (e.exact_product - e.exponent.exp()).abs() / e.exponent.exp();
                assert!(rel < 1e-3, "v={v} n={n} rel={rel}");
            }
        }
        // s >= m forces a zero factor
        assert_eq!(estimate_success(2, 4, 3, 3).unwrap().exact_product, 0.0);
    }

    #[test]
    fn product_regimes_match_direct_sum() {
        // force the series and Stirling branches against a direct evaluation
        let m = BigUint::from(10u64.pow(12));
        for s in [2_000_000u64, 50_000_000] {
            let direct: f64 = (1..=s).map(|i| (-(i as f64) / 1e12).ln_1p()).sum();
            let got = ln_distinct_probability(&m, &BigUint::from(s));
            assert!((got - direct).abs() / direct.abs() < 1e-9, "s={s}: {got} vs {direct}");
        }
        let m = BigUint::from(4_000_000u64);
        let s = 1_500_000u64;
        let direct: f64 = (1..=s).map(|i| (-(i as f64) / 4e6).ln_1p()).sum::<f64>();
        let got = ln_distinct_probability(&m, &BigUint::from(s));
        assert!((got - direct).abs() / direct.abs() < 1e-9, "{got} vs {direct}");
    }

    #[test]
    fn combinable_orbit_counts() {
        let c = combinable_orbits(2, 100, 3).unwrap();
        assert_eq!(c.birthday_median, BigUint::from(66_955_225_653_132u64));
        let n = &c.unit_exponent;
        let check = |n: &BigUint| {
            let s = choose2(&(n * 7u32));
            &s * (&s - 1u32) <= BigUint::from(2u32) * label_classes(2, 100)
        };
        assert!(check(n));
        assert!(!check(&(n + 1u32)));
        assert_eq!(n.to_string(), "6779019");
    }

    #[test]
    fn dependent_trial() {
        let f = FieldSpec::new(13, None).unwrap();
        let sum = f.exp(0) + f.exp(1);
        let e3 = f.dlog(sum).unwrap();
        assert_eq!(
            trial_from_exponents(&f, &[0, 1, e3]).unwrap_err(),
            TrialFailure::Dependent
        );
    }

    #[test]
    fn k2_trials_always_good() {
        let f = FieldSpec::new(5, None).unwrap();
        for i in 0..20 {
            let rep = random_orbit_trial(&f, 2, GeneratorRecipe::Anchored, &mut trial_rng(1, i)).unwrap();
            assert_eq!(rep.orbit_length(), 31);
        }
    }

    #[test]
    fn find_code_is_reproducible() {
        let f = FieldSpec::new(11, None).unwrap();
        let cfg = SearchConfig::new(&f, 3, 3, 42);
        let a = find_code(&cfg).unwrap();
        let b = find_code(&cfg).unwrap();
        assert_eq!(a.to_string(), b.to_string());
        let c = find_code(&SearchConfig::new(&f, 3, 3, 43)).unwrap();
        assert_ne!(a.to_string(), c.to_string());
        assert_eq!(a.table_len(), 3 * 42);
        // first orbit is the anchored one
        assert_eq!(&a.orbits()[0].exponents().unwrap()[..2], &[0, 1]);
    }

    #[test]
    fn multi_orbit_code_is_sound() {
        let f = FieldSpec::new(9, None).unwrap();
        let code = find_code(&SearchConfig::new(&f, 3, 2, 5)).unwrap();
        let words: Vec<Subspace> = code.codewords().collect();
        assert_eq!(words.len(), 2 * 511);
        assert!(min_distance(&words).unwrap() >= 4);
        let labels: HashSet<u128> = code
            .tables()
            .iter()
            .flat_map(|t| t.unordered_diffs().unwrap().iter().copied())
            .collect();
        assert_eq!(labels.len(), 42);
    }

    #[test]
    fn exhausted_trials_return_partial() {
        // GF(2^5) has only (31-1)/2 = 15 difference classes; two k=3 orbits
        // would need 42 distinct labels.
        let f = FieldSpec::new(5, None).unwrap();
        let cfg = SearchConfig::new(&f, 3, 2, 1).with_max_trials(50);
        match find_code(&cfg) {
            Err(SearchError::TrialsExhausted { found, trials, .. }) => {
                assert!(found <= 1);
                assert_eq!(trials, 50);
            }
            other => panic!("{other:?}"),
        }
        assert!(SearchConfig::new(&f, 1, 1, 0).validate().is_err());
        assert!(SearchConfig::new(&f, 3, 0, 0).validate().is_err());
    }
}
