//! Constant-dimension subspace codes built from Singer-cycle orbits.
//!
//! The crate covers the whole path from field arithmetic to decoding:
//!
//! * [`gf`]: arithmetic in `GF(2^v)` with a primitive modulus.
//! * [`linalg`]: subspaces of `GF(2)^v`, subspace distance, Gaussian
//!   coefficients.
//! * [`orbit`]: Singer orbits, exponent labels and the good-orbit test.
//! * [`search`]: randomized construction of good orbits and multi-orbit
//!   codes, plus the analytic success estimate.
//! * [`codec`]: encoder and erasure/error decoder driven by the quotient
//!   lookup table.
//! * [`channel`]: a random linear network coding (operator channel)
//!   simulator.
//! * [`kramer`]: the orbit incidence matrix for prescribed Singer symmetry
//!   and a small exact packing solver.
//! * [`cli`]: the `singer-codes` command-line front end.

pub mod channel;
pub mod cli;
pub mod codec;
pub mod gf;
pub mod kramer;
pub mod linalg;
pub mod orbit;
pub mod search;

pub use channel::{run_pipeline, transmit, ChannelConfig, ChannelOutput, ErasureMode, PipelineReport};
pub use codec::{Code, CodecError, DecodeResult, OpCount};
pub use gf::{FieldElement, FieldSpec, GfError, Modulus};
pub use kramer::{build_instance, solve_packing, KMInstance, KMSolution, KramerError, SolverConfig};
pub use linalg::{LinalgError, Subspace};
pub use orbit::{EdgeLabelSet, OrbitError, OrbitRep};
pub use search::{estimate_success, find_code, ProbabilityEstimate, SearchConfig, SearchError};
