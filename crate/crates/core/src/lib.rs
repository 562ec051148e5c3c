//! Evolution of finite state machines against the universal-witness
//! languages U_n.
//!
//! The library provides:
//!
//! - [`fsm`]: complete deterministic finite state machines over the ternary
//!   alphabet `{a, b, c}` — execution, minimization, language equivalence,
//!   and a plain-text snapshot format;
//! - [`witness`]: construction of the witness machines recognizing U_n and
//!   an exact per-length census of language members;
//! - [`sampling`]: the two sample-set generators, balanced short strings
//!   (`bss`) and random-up-to-length-n (`rle:<n>`);
//! - [`evolution`]: the two-objective (fitness vs. state count) evolutionary
//!   loop with Pareto-antichain population maintenance;
//! - [`harness`]: seeded multi-run campaigns, checkpointed trajectories, and
//!   CSV reporting, used by the `fsm-evo` command line tool.
//!
//! Everything downstream of a seed is deterministic: a campaign rerun from
//! its resolved config file reproduces its output files byte for byte,
//! regardless of the parallelism level.

pub mod evolution;
pub mod fsm;
pub mod harness;
pub mod rng;
pub mod sampling;
pub mod witness;

pub use evolution::{evolve, fitness, EvolveConfig, Individual, MutationFlip, Population};
pub use fsm::{Fsm, FsmError, StateId, Symbol};
pub use rng::RandomSource;
pub use sampling::{generate_bss, generate_rle, SampleError, SampleMethod, SampleSet};
pub use witness::{build_witness, census, member_count_up_to, CensusRow, WitnessSpec};
