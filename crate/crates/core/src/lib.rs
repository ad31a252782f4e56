//! Workbench for task mapping on heterogeneous CPU/GPU/FPGA platforms.
//!
//! The crate generates random annotated series-parallel task graphs,
//! predicts the makespan of a given task-to-device mapping with a fast
//! analytical model, optimizes mappings by simulated annealing, and checks
//! predictions against a deterministic discrete-event simulator that
//! reproduces dynamic scheduling, bounded-FIFO streaming between FPGA
//! kernels with RAM fallback, and device congestion.
//!
//! Typical flow: [`taskgraph::generate`] -> [`mapper::simulated_annealing`]
//! -> [`predictor::predict`] -> [`simulator::simulate`] -> compare, wrapped
//! for batches by [`experiment::run_experiment`].
//!
//! With the default `parallel` feature, annealing restarts, brute-force
//! enumeration and experiment cases run on a rayon pool; results are
//! identical to the sequential fallback because every work item owns a
//! private random stream.

pub mod experiment;
pub mod kernelgen;
pub mod mapper;
pub mod platform;
pub mod predictor;
pub mod simulator;
pub mod taskgraph;
pub mod timeline;

mod par;

/// Derives an independent 64-bit seed for a numbered substream.
///
/// SplitMix64 over the pair, so chain and case substreams never collide for
/// practical stream counts.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
