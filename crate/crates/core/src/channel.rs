//! Operator-channel simulator: the transmitter injects vectors spanning a
//! codeword, the network forwards random linear combinations, erasures
//! shrink and injected error vectors grow the received space.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;

use crate::codec::{Code, OpCount};
use crate::linalg::Subspace;
use crate::search::trial_rng;

/// How erasures are realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ErasureMode {
    /// Packets are drawn from a uniformly random subspace of codimension
    /// `erasure_dims` inside the codeword; the erasure count is exact.
    #[default]
    Subspace,
    /// `erasure_dims` of the transmitted packets are dropped before the
    /// network combines them; the actual loss depends on the packets.
    PacketDrop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelConfig {
    /// Vectors emitted by the transmitter. The first `dim` of them form a
    /// basis of the (possibly erased) word; a value below `dim` loses rank.
    pub n_packets: usize,
    /// Random combinations forwarded by the network.
    pub n_combinations: usize,
    pub erasure_dims: usize,
    pub error_vectors: usize,
    pub mode: ErasureMode,
    pub seed: u64,
}

impl ChannelConfig {
    /// Enough combinations that rank loss has probability about `2^-60`.
    pub const DEFAULT_COMBINATIONS: usize = 64;

    pub fn new(erasure_dims: usize, error_vectors: usize, seed: u64) -> Self {
        ChannelConfig {
            n_packets: 0,
            n_combinations: Self::DEFAULT_COMBINATIONS,
            erasure_dims,
            error_vectors,
            mode: ErasureMode::Subspace,
            seed,
        }
    }

    pub fn noiseless(seed: u64) -> Self {
        Self::new(0, 0, seed)
    }

    pub fn with_packets(mut self, n_packets: usize) -> Self {
        self.n_packets = n_packets;
        self
    }

    pub fn with_combinations(mut self, n_combinations: usize) -> Self {
        self.n_combinations = n_combinations;
        self
    }

    pub fn with_mode(mut self, mode: ErasureMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelOutput {
    pub received: Subspace,
    pub truth: Subspace,
    /// `dim(truth) - dim(truth ∩ received)`
    pub actual_erasures: usize,
    /// `dim(received) - dim(truth ∩ received)`
    pub actual_errors: usize,
}

/// Sends `word` through the channel. `n_packets = 0` means "one packet per
/// dimension of the (erased) word".
pub fn transmit<R: Rng + ?Sized>(config: &ChannelConfig, word: &Subspace, rng: &mut R) -> ChannelOutput {
    let v = word.ambient();
    let dim = word.dim();
    let source = match config.mode {
        ErasureMode::Subspace => random_subspace_of(word, dim.saturating_sub(config.erasure_dims), rng),
        ErasureMode::PacketDrop => word.clone(),
    };
    let n_packets = if config.n_packets == 0 {
        source.dim()
    } else {
        config.n_packets
    };
    let mut packets: Vec<u128> = source.rows().iter().copied().take(n_packets).collect();
    while packets.len() < n_packets {
        packets.push(random_combination(source.rows(), rng));
    }
    if config.mode == ErasureMode::PacketDrop {
        for _ in 0..config.erasure_dims.min(packets.len()) {
            let i = rng.gen_range(0..packets.len());
            packets.swap_remove(i);
        }
    }
    let mut collected: Vec<u128> = (0..config.n_combinations)
        .map(|_| random_combination(&packets, rng))
        .collect();
    let mask = if v == 128 { u128::MAX } else { (1u128 << v) - 1 };
    let mut injected = 0;
    while injected < config.error_vectors && dim < v as usize {
        let x = rng.gen::<u128>() & mask;
        if !word.contains(x) {
            collected.push(x);
            injected += 1;
        }
    }
    let received = Subspace::span(v, collected).expect("vectors lie in the ambient space");
    let common = word.intersection_dim(&received).expect("same ambient space");
    ChannelOutput {
        actual_erasures: dim - common,
        actual_errors: received.dim() - common,
        received,
        truth: word.clone(),
    }
}

fn random_combination<R: Rng + ?Sized>(vectors: &[u128], rng: &mut R) -> u128 {
    vectors.iter().filter(|_| rng.gen::<bool>()).fold(0, |acc, &x| acc ^ x)
}

/// A uniformly random `dim`-subspace of `word`: independent uniform vectors
/// collected until the span reaches `dim`.
fn random_subspace_of<R: Rng + ?Sized>(word: &Subspace, dim: usize, rng: &mut R) -> Subspace {
    let mut sub = Subspace::zero(word.ambient());
    while sub.dim() < dim {
        sub.insert(random_combination(word.rows(), rng));
    }
    sub
}

/// End-to-end statistics for a batch of messages.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineReport {
    pub sent: u64,
    pub ok: u64,
    pub fail: u64,
    pub miscorrect: u64,
    pub max_divs: u32,
    pub max_muls: u32,
    /// Decode attempts by operation count.
    pub op_histogram: BTreeMap<OpCount, u64>,
    /// Transmissions by `(actual_erasures, actual_errors)`.
    pub channel_histogram: BTreeMap<(usize, usize), u64>,
}

impl PipelineReport {
    fn record(&mut self, outcome: Outcome, ops: OpCount, channel: (usize, usize)) {
        self.sent += 1;
        match outcome {
            Outcome::Ok => self.ok += 1,
            Outcome::Fail => self.fail += 1,
            Outcome::Miscorrect => self.miscorrect += 1,
        }
        self.max_divs = self.max_divs.max(ops.divisions);
        self.max_muls = self.max_muls.max(ops.multiplications);
        *self.op_histogram.entry(ops).or_default() += 1;
        *self.channel_histogram.entry(channel).or_default() += 1;
    }

    /// `sent=<n> ok=<n> fail=<n> miscorrect=<n> max_divs=<n> max_muls=<n>`
    pub fn summary_line(&self) -> String {
        format!(
            "sent={} ok={} fail={} miscorrect={} max_divs={} max_muls={}",
            self.sent, self.ok, self.fail, self.miscorrect, self.max_divs, self.max_muls
        )
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary_line())?;
        for (ops, n) in &self.op_histogram {
            write!(f, "\nops divs={} muls={} count={n}", ops.divisions, ops.multiplications)?;
        }
        for ((erasures, errors), n) in &self.channel_histogram {
            write!(f, "\nchannel erasures={erasures} errors={errors} count={n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Ok,
    Fail,
    Miscorrect,
}

/// Encodes `n_messages` random messages, sends each through the channel and
/// decodes. Message `i` uses its own RNG stream, so the report does not
/// depend on thread scheduling.
pub fn run_pipeline(code: &Code, channel: &ChannelConfig, n_messages: u64, seed: u64) -> PipelineReport {
    let limit = code.len();
    let samples: Vec<_> = (0..n_messages)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let message = rng.gen_range(0..limit);
            let word = code.encode(message).expect("message drawn below code length");
            let out = transmit(channel, &word, &mut rng);
            let (result, ops) = code.decode_traced(&out.received);
            let outcome = match result {
                Ok(r) if r.codeword == word => Outcome::Ok,
                Ok(_) => Outcome::Miscorrect,
                Err(_) => Outcome::Fail,
            };
            (outcome, ops, (out.actual_erasures, out.actual_errors))
        })
        .collect();
    let mut report = PipelineReport::default();
    for (outcome, ops, channel) in samples {
        report.record(outcome, ops, channel);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::search::{find_code, SearchConfig};

    fn word(v: u32, rows: &[u128]) -> Subspace {
        Subspace::span(v, rows.iter().copied()).unwrap()
    }

    #[test]
    fn noiseless_stays_inside() {
        let w = word(10, &[0b1, 0b10, 0b1000_0000]);
        for i in 0..200 {
            let cfg = ChannelConfig::noiseless(0).with_combinations(3);
            let out = transmit(&cfg, &w, &mut trial_rng(9, i));
            assert!(out.received.is_subspace_of(&w));
            assert_eq!(out.actual_errors, 0);
        }
        let out = transmit(&ChannelConfig::noiseless(0), &w, &mut trial_rng(9, 0));
        assert_eq!(out.received, w);
    }

    #[test]
    fn exact_erasures() {
        let w = word(10, &[0b1, 0b10, 0b1000_0000]);
        for i in 0..100 {
            let out = transmit(&ChannelConfig::new(1, 0, 0), &w, &mut trial_rng(3, i));
            assert_eq!(out.received.dim(), 2);
            assert!(out.received.is_subspace_of(&w));
            assert_eq!(out.actual_erasures, 1);
        }
    }

    #[test]
    fn errors_grow_the_space() {
        let w = word(12, &[0b1, 0b10, 0b100]);
        for i in 0..100 {
            let out = transmit(&ChannelConfig::new(0, 1, 0), &w, &mut trial_rng(4, i));
            assert_eq!(out.received.dim(), 4);
            assert!(w.is_subspace_of(&out.received));
            assert_eq!((out.actual_erasures, out.actual_errors), (0, 1));
        }
    }

    #[test]
    fn packet_drop_loses_rank() {
        let w = word(8, &[0b1, 0b10, 0b100]);
        let cfg = ChannelConfig::new(1, 0, 0).with_mode(ErasureMode::PacketDrop);
        let out = transmit(&cfg, &w, &mut trial_rng(0, 0));
        assert_eq!(out.received.dim(), 2);
        // with spare packets a single drop usually costs nothing
        let cfg = cfg.with_packets(6);
        let lossless = (0..50)
            .filter(|&i| transmit(&cfg, &w, &mut trial_rng(1, i)).actual_erasures == 0)
            .count();
        assert!(lossless > 25);
    }

    #[test]
    fn pipelines() {
        let f = FieldSpec::new(11, None).unwrap();
        let code = find_code(&SearchConfig::new(&f, 3, 2, 7)).unwrap();
        let r = run_pipeline(&code, &ChannelConfig::noiseless(0), 300, 1);
        assert_eq!((r.ok, r.fail, r.miscorrect), (300, 0, 0));
        assert_eq!((r.max_divs, r.max_muls), (1, 1));
        let r = run_pipeline(&code, &ChannelConfig::new(1, 0, 0), 300, 2);
        assert_eq!(r.ok, 300);
        assert_eq!(
            r.op_histogram.keys().copied().collect::<Vec<_>>(),
            vec![OpCount {
                divisions: 1,
                multiplications: 1
            }]
        );
        let r = run_pipeline(&code, &ChannelConfig::new(0, 1, 0), 300, 3);
        assert_eq!(r.ok, 300);
        assert!(r.max_divs <= 7 && r.max_muls <= 7);
        assert_eq!(
            r.summary_line(),
            format!(
                "sent=300 ok=300 fail=0 miscorrect=0 max_divs={} max_muls={}",
                r.max_divs, r.max_muls
            )
        );
        assert_eq!(run_pipeline(&code, &ChannelConfig::new(0, 1, 0), 300, 3), r);
        // two errors are outside the decoder's contract
        let r = run_pipeline(&code, &ChannelConfig::new(0, 2, 0), 100, 4);
        assert_eq!(r.ok + r.fail + r.miscorrect, 100);
        assert!(r.fail > 90);
    }
}
