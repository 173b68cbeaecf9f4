//! The `singer-codes` command line.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 not decodable or
//! search exhausted, 3 a violated invariant (bad code file, failed check).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::{run_pipeline, transmit, ChannelConfig, ErasureMode};
use crate::codec::{failure_line, Code, CodecError};
use crate::gf::{FieldSpec, GfError, Modulus};
use crate::kramer::{build_instance, solve_packing, KramerError, SolverConfig};
use crate::linalg::{min_distance, Subspace};
use crate::search::{combinable_orbits, estimate_success, find_code_with_stats, trial_rng, SearchConfig, SearchError};

#[derive(Debug, Parser)]
#[command(name = "singer-codes", version, about = "Subspace codes from Singer-cycle orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Show the modulus and multiplicative order of GF(2^v).
    FieldInfo {
        #[arg(long)]
        v: u32,
        /// Primitive modulus as hex without the leading x^v term.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Search for good orbits with disjoint edge labels; prints a code file.
    FindCode {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        orbits: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_MAX_TRIALS)]
        max_trials: u64,
    },
    /// Show one orbit of a code: exponents, edge labels, length.
    InspectOrbit {
        #[arg(long)]
        code: String,
        #[arg(long)]
        index: usize,
    },
    /// Encode a message index as a subspace.
    Encode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        message: u128,
    },
    /// Decode a received subspace (from a file, or standard input).
    Decode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        word: Option<String>,
    },
    /// Run the operator channel, on one word or on random messages.
    Simulate {
        #[arg(long)]
        code: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        errors: usize,
        #[arg(long, default_value_t = 0)]
        erasures: usize,
        /// Number of random messages for a statistics run.
        #[arg(long, required_unless_present = "word", conflicts_with = "word")]
        messages: Option<u64>,
        /// Transmit this word instead ("-" for standard input) and print the
        /// received subspace.
        #[arg(long)]
        word: Option<String>,
        #[arg(long, value_enum, default_value_t = Mode::Subspace)]
        mode: Mode,
        /// Packets emitted by the transmitter (0: one per dimension).
        #[arg(long, default_value_t = 0)]
        packets: usize,
        #[arg(long, default_value_t = ChannelConfig::DEFAULT_COMBINATIONS)]
        combinations: usize,
        /// Also print operation-count and channel histograms.
        #[arg(long)]
        histograms: bool,
    },
    /// Analytic probability that random orbits have distinct labels.
    Estimate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        v: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        orbits: u64,
    },
    /// Dump the Singer orbit incidence matrix.
    KmBuild {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: u32,
    },
    /// Solve the orbit packing problem for the incidence matrix.
    KmSolve {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = SolverConfig::default().node_limit)]
        node_limit: u64,
        #[arg(long, default_value_t = SolverConfig::default().cell_cap)]
        cell_cap: usize,
    },
    /// Re-check a code file; with --exhaustive also the minimum distance.
    Verify {
        #[arg(long)]
        code: String,
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(Debug, Args)]
struct FieldArgs {
    #[arg(long)]
    v: u32,
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Subspace,
    PacketDrop,
}

/// Largest ambient dimension for the brute-force distance check.
const VERIFY_MAX_DEGREE: u32 = 13;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Rejected(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Rejected(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Rejected(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<GfError> for Failure {
    fn from(e: GfError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::NotDecodable | CodecError::DimensionOutOfRange { .. } => Failure::Rejected(e.to_string()),
            CodecError::NotGood(_) | CodecError::LabelCollision(_) | CodecError::Mismatch { .. } => {
                Failure::Invariant(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::TrialsExhausted { .. } => Failure::Rejected(e.to_string()),
            SearchError::Codec(c) => c.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<KramerError> for Failure {
    fn from(e: KramerError) -> Self {
        match e {
            KramerError::Overcovered { .. } => Failure::Invariant(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Runs the CLI with explicit streams; returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return 1;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli.command, stdin, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = run(std::env::args_os(), &mut io::stdin(), &mut out, &mut io::stderr());
    let _ = out.flush();
    code
}

fn field_of(v: u32, poly: Option<&str>) -> Result<FieldSpec, Failure> {
    Ok(match poly {
        Some(hex) => FieldSpec::from_hex(v, hex)?,
        None => FieldSpec::new(v, None)?,
    })
}

fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
    }
}

fn load_code(path: &str, stdin: &mut dyn Read) -> Result<Code, Failure> {
    Ok(Code::parse(&read_source(path, stdin)?)?)
}

fn load_word(path: Option<&str>, stdin: &mut dyn Read) -> Result<Subspace, Failure> {
    let text = read_source(path.unwrap_or("-"), stdin)?;
    text.parse()
        .map_err(|e: crate::linalg::LinalgError| Failure::Usage(e.to_string()))
}

fn execute(command: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::FieldInfo { v, poly } => {
            let field = field_of(v, poly.as_deref())?;
            let m: Modulus = field.modulus();
            writeln!(out, "v={} poly={} order={}", v, m, field.order())?;
            let factors: Vec<String> = field.order_prime_factors().iter().map(u128::to_string).collect();
            writeln!(out, "order_factors={}", factors.join(","))?;
            writeln!(out, "dlog={}", field.has_dlog())?;
        }
        Command::FindCode {
            field,
            k,
            orbits,
            seed,
            max_trials,
        } => {
            let field = field_of(field.v, field.poly.as_deref())?;
            let config = SearchConfig::new(&field, k, orbits, seed).with_max_trials(max_trials);
            let (code, _) = find_code_with_stats(&config)?;
            writeln!(out, "{code}")?;
        }
        Command::InspectOrbit { code, index } => {
            let code = load_code(&code, stdin)?;
            let orbit = code
                .orbits()
                .get(index)
                .ok_or_else(|| Failure::Usage(format!("code has {} orbits", code.orbits().len())))?;
            writeln!(out, "{orbit}")?;
            writeln!(out, "length={}", orbit.orbit_length())?;
            if let Some(exps) = orbit.exponents() {
                let e: Vec<String> = exps.iter().map(u128::to_string).collect();
                writeln!(out, "exponents={}", e.join(","))?;
            }
            let table = &code.tables()[index];
            match table.unordered_diffs() {
                Some(diffs) => {
                    let d: Vec<String> = diffs.iter().map(u128::to_string).collect();
                    writeln!(out, "labels={}", d.join(","))?;
                }
                None => {
                    let mut keys: Vec<String> = table.unordered_keys().map(|q| format!("{q:x}")).collect();
                    keys.sort();
                    writeln!(out, "quotients={}", keys.join(","))?;
                }
            }
        }
        Command::Encode { code, message } => {
            let code = load_code(&code, stdin)?;
            writeln!(out, "{}", code.encode(message)?)?;
        }
        Command::Decode { code, word } => {
            let code = load_code(&code, stdin)?;
            let received = load_word(word.as_deref(), stdin)?;
            let (result, ops) = code.decode_traced(&received);
            match result {
                Ok(r) => {
                    let message = code.message_of(&r).ok();
                    let message = message.map_or_else(|| "-".to_string(), |m| m.to_string());
                    writeln!(out, "{} message={message}", r.status_line())?;
                }
                Err(e) => {
                    writeln!(out, "{}", failure_line(ops))?;
                    return Err(e.into());
                }
            }
        }
        Command::Simulate {
            code,
            seed,
            errors,
            erasures,
            messages,
            word,
            mode,
            packets,
            combinations,
            histograms,
        } => {
            let code = load_code(&code, stdin)?;
            let mode = match mode {
                Mode::Subspace => ErasureMode::Subspace,
                Mode::PacketDrop => ErasureMode::PacketDrop,
            };
            let channel = ChannelConfig::new(erasures, errors, seed)
                .with_mode(mode)
                .with_packets(packets)
                .with_combinations(combinations);
            if let Some(path) = word {
                let sent = load_word(Some(&path), stdin)?;
                let output = transmit(&channel, &sent, &mut trial_rng(seed, 0));
                writeln!(out, "{}", output.received)?;
            } else {
                let n = messages.expect("clap enforces --messages without --word");
                let report = run_pipeline(&code, &channel, n, seed);
                if histograms {
                    writeln!(out, "{report}")?;
                } else {
                    writeln!(out, "{}", report.summary_line())?;
                }
            }
        }
        Command::Estimate { q, v, k, orbits } => {
            let e = estimate_success(q, v, k, orbits)?;
            writeln!(out, "q={} v={} k={} orbits={}", e.q, e.v, e.k, e.n)?;
            writeln!(out, "m={}", e.m)?;
            writeln!(out, "s={}", e.s)?;
            writeln!(out, "exponent={:e}", e.exponent)?;
            writeln!(out, "estimate={}", e.exponent.exp())?;
            writeln!(out, "exact_product={}", e.exact_product)?;
            writeln!(out, "ln_exact_product={:e}", e.ln_exact_product)?;
            let c = combinable_orbits(q, v, k)?;
            writeln!(out, "combinable_unit_exponent={}", c.unit_exponent)?;
            writeln!(out, "combinable_birthday_median={}", c.birthday_median)?;
        }
        Command::KmBuild { field, k, t } => {
            let field = field_of(field.v, field.poly.as_deref())?;
            writeln!(out, "{}", build_instance(&field, k, t)?)?;
        }
        Command::KmSolve {
            field,
            k,
            t,
            node_limit,
            cell_cap,
        } => {
            let field = field_of(field.v, field.poly.as_deref())?;
            let instance = build_instance(&field, k, t)?;
            let config = SolverConfig {
                cell_cap,
                node_limit,
                lambda: 1,
            };
            let solution = solve_packing(&instance, &config)?;
            if !instance.is_feasible(&solution.selected, 1) {
                return Err(Failure::Invariant("solver returned an infeasible selection".into()));
            }
            instance.verify_packing(&solution.selected, 1)?;
            writeln!(out, "{solution}")?;
        }
        Command::Verify { code, exhaustive } => {
            let code = load_code(&code, stdin)?;
            for (i, orbit) in code.orbits().iter().enumerate() {
                if orbit.is_good_orbit().is_none() {
                    return Err(Failure::Invariant(format!("orbit {i} is not good")));
                }
                writeln!(out, "orbit={i} good=true length={}", orbit.orbit_length())?;
            }
            let labels: usize = code.tables().iter().map(|t| t.unordered_keys().count()).sum();
            writeln!(out, "labels={labels} quotients={} distinct=true", code.table_len())?;
            if exhaustive {
                let v = code.field().degree();
                if v > VERIFY_MAX_DEGREE {
                    return Err(Failure::Usage(format!(
                        "exhaustive check needs v <= {VERIFY_MAX_DEGREE} (got {v})"
                    )));
                }
                let words: Vec<Subspace> = code.codewords().collect();
                let d = min_distance(&words).map_err(|e| Failure::Usage(e.to_string()))?;
                let required = 2 * (code.k() - 1);
                writeln!(out, "codewords={} min_distance={d}", words.len())?;
                if d < required {
                    return Err(Failure::Invariant(format!("minimum distance {d} < {required}")));
                }
            }
        }
    }
    Ok(())
}
