//! Mapping construction: the CPU-only baseline, simulated annealing with a
//! single-task move and geometric cooling, and an exhaustive oracle for
//! small instances.
//!
//! Annealing energy is the predicted makespan. The temperature range is
//! chosen from the ratio between the largest and smallest per-task execution
//! time across devices, which together with the cost-normalized acceptance
//! function makes the search invariant under rescaling all times.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::platform::Platform;
use crate::predictor::{makespan_dense, Mapping, MappingError, PredictorConfig};
use crate::taskgraph::TaskGraph;
use crate::{derive_seed, par};

/// Simulated annealing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    /// Geometric cooling factor per temperature level.
    pub q: f64,
    pub iterations_per_level: u32,
    /// Independent chains; the best seen mapping wins.
    pub restarts: u32,
    /// Exponent of the final temperature `(t_min / t_max)^k`.
    pub k: f64,
    pub seed: u64,
    /// Override the systematic initial temperature.
    pub t0: Option<f64>,
    /// Override the systematic final temperature.
    pub tf: Option<f64>,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            q: 0.95,
            iterations_per_level: 50,
            restarts: 10,
            k: 2.0,
            seed: 0,
            t0: None,
            tf: None,
        }
    }
}

/// Outcome of a simulated annealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct SaResult {
    pub mapping: Mapping,
    pub predicted_makespan: f64,
    pub accepted_moves: u64,
    pub rejected_moves: u64,
    /// Temperature levels per chain.
    pub temperature_levels: u32,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("invalid annealing config: {0}")]
    InvalidConfig(String),
    #[error("brute force supports at most {max} tasks, graph has {actual}")]
    TooLarge { actual: usize, max: usize },
}

/// Maps every task onto the first CPU device. Always area-valid.
pub fn cpu_only(graph: &TaskGraph, platform: &Platform) -> Mapping {
    let cpu = platform
        .devices
        .iter()
        .find(|d| d.is_cpu())
        .expect("platforms always contain a CPU");
    let mut mapping = Mapping::new();
    for task in graph.tasks() {
        mapping.assign(task.id, cpu.id);
    }
    mapping
}

/// True iff the summed streamability of FPGA-mapped tasks fits each FPGA's
/// area capacity.
pub fn area_valid(graph: &TaskGraph, mapping: &Mapping, platform: &Platform) -> bool {
    !matches!(
        mapping.validate(graph, platform),
        Err(MappingError::AreaExceeded { .. })
    )
}

/// Systematic temperature range: with `r = t_max / t_min` over all
/// (task, device) execution times, the schedule runs from `T0 = r` down to
/// `Tf = r^-k`.
pub fn temperature_range(graph: &TaskGraph, platform: &Platform, k: f64) -> (f64, f64) {
    let mut t_min = f64::INFINITY;
    let mut t_max = 0.0f64;
    for (i, task) in graph.tasks().iter().enumerate() {
        for device in &platform.devices {
            let t = device.exec_time(task, graph.input_bytes_at(i));
            t_min = t_min.min(t);
            t_max = t_max.max(t);
        }
    }
    if !(t_min.is_finite() && t_min > 0.0) {
        return (1.0, 1.0);
    }
    let ratio = t_max / t_min;
    (ratio, (t_min / t_max).powf(k))
}

/// Probability of accepting a move that changes the cost by `delta`:
/// 1 for improvements, otherwise `exp(-delta / (current_cost * t))`.
pub fn acceptance_probability(delta: f64, current_cost: f64, t: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        (-delta / (current_cost * t)).exp()
    }
}

struct ChainOutcome {
    assignment: Vec<usize>,
    cost: f64,
    accepted: u64,
    rejected: u64,
    levels: u32,
}

/// Optimizes a mapping by simulated annealing.
///
/// Runs `restarts` independent chains: the first starts from the CPU-only
/// baseline (so the result can never lose to it), the rest from uniformly
/// random area-valid mappings. Each chain cools geometrically from `T0` to
/// `Tf` with a fixed number of single-task moves per level; proposals that
/// violate the FPGA area constraint are rejected outright. The best mapping
/// seen across all chains is returned. Deterministic for a fixed seed, and
/// identical whether chains run in parallel or sequentially.
pub fn simulated_annealing(
    graph: &TaskGraph,
    platform: &Platform,
    config: &SaConfig,
) -> Result<SaResult, MapError> {
    if !(config.q > 0.0 && config.q < 1.0) {
        return Err(MapError::InvalidConfig("q must be in (0, 1)".into()));
    }
    if config.iterations_per_level == 0 || config.restarts == 0 {
        return Err(MapError::InvalidConfig(
            "iterations_per_level and restarts must be >= 1".into(),
        ));
    }
    if config.k < 1.0 {
        return Err(MapError::InvalidConfig("k must be >= 1".into()));
    }

    let baseline = cpu_only(graph, platform);
    baseline.validate(graph, platform)?;
    let predictor_config = PredictorConfig::default();
    let base_dense = dense(graph, &baseline, platform);

    if graph.tasks().is_empty() || platform.devices.len() < 2 {
        let cost = makespan_dense(graph, &base_dense, platform, &predictor_config);
        return Ok(SaResult {
            mapping: baseline,
            predicted_makespan: cost,
            accepted_moves: 0,
            rejected_moves: 0,
            temperature_levels: 0,
        });
    }

    let (t0, tf) = {
        let (t0, tf) = temperature_range(graph, platform, config.k);
        (config.t0.unwrap_or(t0), config.tf.unwrap_or(tf))
    };

    let outcomes: Vec<ChainOutcome> = par::map_indexed(config.restarts as usize, |chain| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, chain as u64));
        let start = if chain == 0 {
            base_dense.clone()
        } else {
            random_valid_assignment(graph, platform, &mut rng)
        };
        run_chain(graph, platform, &predictor_config, config, t0, tf, start, &mut rng)
    });

    let mut best = None::<&ChainOutcome>;
    let mut accepted = 0;
    let mut rejected = 0;
    for outcome in &outcomes {
        accepted += outcome.accepted;
        rejected += outcome.rejected;
        if best.is_none() || outcome.cost < best.unwrap().cost {
            best = Some(outcome);
        }
    }
    let best = best.unwrap();

    let mut mapping = Mapping::new();
    for (i, task) in graph.tasks().iter().enumerate() {
        mapping.assign(task.id, platform.devices[best.assignment[i]].id);
    }
    Ok(SaResult {
        mapping,
        predicted_makespan: best.cost,
        accepted_moves: accepted,
        rejected_moves: rejected,
        temperature_levels: outcomes[0].levels,
    })
}

fn dense(graph: &TaskGraph, mapping: &Mapping, platform: &Platform) -> Vec<usize> {
    graph
        .tasks()
        .iter()
        .map(|t| {
            let id = mapping.device_of(t.id).unwrap();
            platform.devices.iter().position(|d| d.id == id).unwrap()
        })
        .collect()
}

fn fpga_area_used(graph: &TaskGraph, assignment: &[usize], platform: &Platform) -> Vec<u64> {
    let mut used = vec![0u64; platform.devices.len()];
    for (i, task) in graph.tasks().iter().enumerate() {
        if platform.devices[assignment[i]].is_fpga() {
            used[assignment[i]] += task.streamability as u64;
        }
    }
    used
}

/// Uniformly random area-valid assignment by rejection sampling; after too
/// many rejections the latest draw is repaired by evicting the largest
/// FPGA-mapped tasks onto random non-FPGA devices.
fn random_valid_assignment(
    graph: &TaskGraph,
    platform: &Platform,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = graph.tasks().len();
    let m = platform.devices.len();
    let mut assignment = vec![0usize; n];
    for _ in 0..1000 {
        for slot in assignment.iter_mut() {
            *slot = rng.random_range(0..m);
        }
        let used = fpga_area_used(graph, &assignment, platform);
        let fits = platform
            .devices
            .iter()
            .enumerate()
            .all(|(d, dev)| dev.area_capacity().is_none_or(|cap| used[d] <= cap as u64));
        if fits {
            return assignment;
        }
    }
    // repair: evict the biggest area consumers first
    let non_fpga: Vec<usize> = (0..m).filter(|&d| !platform.devices[d].is_fpga()).collect();
    let mut used = fpga_area_used(graph, &assignment, platform);
    let mut by_area: Vec<usize> = (0..n).collect();
    by_area.sort_by_key(|&i| std::cmp::Reverse((graph.tasks()[i].streamability, i)));
    for i in by_area {
        let d = assignment[i];
        let Some(cap) = platform.devices[d].area_capacity() else {
            continue;
        };
        if used[d] <= cap as u64 {
            continue;
        }
        used[d] -= graph.tasks()[i].streamability as u64;
        assignment[i] = non_fpga[rng.random_range(0..non_fpga.len())];
    }
    assignment
}

#[allow(clippy::too_many_arguments)]
fn run_chain(
    graph: &TaskGraph,
    platform: &Platform,
    predictor_config: &PredictorConfig,
    config: &SaConfig,
    t0: f64,
    tf: f64,
    start: Vec<usize>,
    rng: &mut ChaCha8Rng,
) -> ChainOutcome {
    let n = graph.tasks().len();
    let m = platform.devices.len();
    let mut current = start;
    let mut used = fpga_area_used(graph, &current, platform);
    let mut current_cost = makespan_dense(graph, &current, platform, predictor_config);
    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut accepted = 0u64;
    let mut rejected = 0u64;
    let mut levels = 0u32;
    let mut t = t0;

    loop {
        levels += 1;
        for _ in 0..config.iterations_per_level {
            let task = rng.random_range(0..n);
            let offset = rng.random_range(0..m - 1);
            let proposal = if offset >= current[task] {
                offset + 1
            } else {
                offset
            };
            let area = graph.tasks()[task].streamability as u64;
            if let Some(cap) = platform.devices[proposal].area_capacity() {
                if used[proposal] + area > cap as u64 {
                    rejected += 1;
                    continue;
                }
            }
            let previous = current[task];
            current[task] = proposal;
            let new_cost = makespan_dense(graph, &current, platform, predictor_config);
            let delta = new_cost - current_cost;
            let accept = delta <= 0.0
                || rng.random::<f64>() < acceptance_probability(delta, current_cost, t);
            if accept {
                if platform.devices[proposal].is_fpga() {
                    used[proposal] += area;
                }
                if platform.devices[previous].is_fpga() {
                    used[previous] -= area;
                }
                current_cost = new_cost;
                accepted += 1;
                if new_cost < best_cost {
                    best_cost = new_cost;
                    best.copy_from_slice(&current);
                }
            } else {
                current[task] = previous;
                rejected += 1;
            }
        }
        t *= config.q;
        if t <= tf {
            break;
        }
    }

    ChainOutcome {
        assignment: best,
        cost: best_cost,
        accepted,
        rejected,
        levels,
    }
}

/// Largest instance [`brute_force`] accepts.
pub const BRUTE_FORCE_MAX_TASKS: usize = 10;

/// Exhaustively enumerates all area-valid mappings and returns the one with
/// the smallest predicted makespan, breaking ties by lexicographically
/// smallest assignment (task id order, device order as in the platform).
pub fn brute_force(graph: &TaskGraph, platform: &Platform) -> Result<Mapping, MapError> {
    let n = graph.tasks().len();
    if n > BRUTE_FORCE_MAX_TASKS {
        return Err(MapError::TooLarge {
            actual: n,
            max: BRUTE_FORCE_MAX_TASKS,
        });
    }
    let m = platform.devices.len();
    let total = (m as u64).pow(n as u32);
    let predictor_config = PredictorConfig::default();

    let decode = |index: u64| {
        let mut assignment = vec![0usize; n];
        let mut rest = index;
        for i in (0..n).rev() {
            assignment[i] = (rest % m as u64) as usize;
            rest /= m as u64;
        }
        assignment
    };

    // chunked scan so the parallel and sequential paths reduce identically
    let chunk = 4096u64;
    let chunks = total.div_ceil(chunk);
    let mins = par::map_indexed(chunks as usize, |c| {
        let lo = c as u64 * chunk;
        let hi = (lo + chunk).min(total);
        let mut best: Option<(f64, u64)> = None;
        let mut assignment = decode(lo);
        for index in lo..hi {
            if index != lo {
                // increment base-m counter
                let mut i = n;
                while i > 0 {
                    i -= 1;
                    assignment[i] += 1;
                    if assignment[i] < m {
                        break;
                    }
                    assignment[i] = 0;
                }
            }
            let used = fpga_area_used(graph, &assignment, platform);
            let fits = platform.devices.iter().enumerate().all(|(d, dev)| {
                dev.area_capacity().is_none_or(|cap| used[d] <= cap as u64)
            });
            if !fits {
                continue;
            }
            let cost = makespan_dense(graph, &assignment, platform, &predictor_config);
            if best.is_none() || cost < best.unwrap().0 {
                best = Some((cost, index));
            }
        }
        best
    });

    let best = mins
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("at least the all-CPU mapping is valid");

    let assignment = decode(best.1);
    let mut mapping = Mapping::new();
    for (i, task) in graph.tasks().iter().enumerate() {
        mapping.assign(task.id, platform.devices[assignment[i]].id);
    }
    Ok(mapping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platform::{default_platform, Device, DeviceId, DeviceKind, Interconnect};
    use crate::predictor::predicted_makespan;
    use crate::taskgraph::{generate, Edge, GeneratorConfig, Task, TaskId};

    fn task(id: u32, c: f64, p: f64, s: u32) -> Task {
        Task {
            id: TaskId(id),
            complexity: c,
            parallelizability: p,
            streamability: s,
        }
    }

    #[test]
    fn cpu_only_maps_everything_to_cpu() {
        let g = generate(&GeneratorConfig {
            node_count: 10,
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        let m = cpu_only(&g, &platform);
        for t in g.tasks() {
            assert_eq!(m.device_of(t.id), Some(DeviceId(0)));
        }
        assert!(area_valid(&g, &m, &platform));
    }

    #[test]
    fn temperature_range_formula() {
        // two tasks, one device, times 1x and 100x
        let platform = Platform::new(
            vec![Device {
                id: DeviceId(0),
                kind: DeviceKind::Cpu {
                    core_count: 1,
                    core_rate: 1e9,
                },
            }],
            Interconnect {
                host_bandwidth: 1e9,
                transfer_latency: 0.0,
            },
        )
        .unwrap();
        let g = TaskGraph::new(
            vec![task(0, 1.0, 0.0, 1), task(1, 100.0, 0.0, 1)],
            vec![],
            1_000_000,
        )
        .unwrap();
        let (t0, tf) = temperature_range(&g, &platform, 2.0);
        assert!((t0 - 100.0).abs() < 1e-9);
        assert!((tf - 1e-4).abs() < 1e-12);
        // k=1 halves the final temperature's log-range
        let (_, tf1) = temperature_range(&g, &platform, 1.0);
        assert!((tf1.ln() - tf.ln() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn temperature_range_degenerate_ratio() {
        let platform = Platform::new(
            vec![Device {
                id: DeviceId(0),
                kind: DeviceKind::Cpu {
                    core_count: 1,
                    core_rate: 1e9,
                },
            }],
            Interconnect {
                host_bandwidth: 1e9,
                transfer_latency: 0.0,
            },
        )
        .unwrap();
        let g = TaskGraph::new(
            vec![task(0, 2.0, 0.0, 1), task(1, 2.0, 0.0, 1)],
            vec![],
            1_000_000,
        )
        .unwrap();
        let (t0, tf) = temperature_range(&g, &platform, 2.0);
        assert_eq!((t0, tf), (1.0, 1.0));
        // degenerate range still runs exactly one level
        let r = simulated_annealing(
            &g,
            &platform,
            &SaConfig {
                restarts: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.temperature_levels, 0); // single device: no proposals
    }

    #[test]
    fn acceptance_probability_values() {
        assert_eq!(acceptance_probability(0.0, 1.0, 1.0), 1.0);
        assert_eq!(acceptance_probability(-0.5, 1.0, 1.0), 1.0);
        let e1 = acceptance_probability(0.02, 0.02, 1.0);
        assert!((e1 - (-1.0f64).exp()).abs() < 1e-12);
        let mut last = 1.0;
        for delta in [0.01, 0.1, 1.0, 10.0] {
            let p = acceptance_probability(delta, 1.0, 0.5);
            assert!(p < last && p > 0.0);
            last = p;
        }
    }

    #[test]
    fn single_fast_gpu_task_moves_to_gpu() {
        let g = TaskGraph::new(vec![task(0, 1.0, 1.0, 1)], vec![], 10_000_000).unwrap();
        let platform = default_platform();
        let r = simulated_annealing(&g, &platform, &SaConfig::default()).unwrap();
        assert_eq!(r.mapping.device_of(TaskId(0)), Some(DeviceId(1)));
    }

    #[test]
    fn sa_never_loses_to_cpu_baseline() {
        let platform = default_platform();
        for seed in 0..5 {
            let g = generate(&GeneratorConfig {
                node_count: 12,
                seed,
                ..Default::default()
            })
            .unwrap();
            let base = predicted_makespan(&g, &cpu_only(&g, &platform), &platform).unwrap();
            let r = simulated_annealing(
                &g,
                &platform,
                &SaConfig {
                    seed,
                    restarts: 3,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(r.predicted_makespan <= base + 1e-15, "seed {seed}");
            assert!(area_valid(&g, &r.mapping, &platform));
        }
    }

    #[test]
    fn sa_is_deterministic() {
        let g = generate(&GeneratorConfig {
            node_count: 10,
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        let config = SaConfig {
            seed: 9,
            restarts: 4,
            ..Default::default()
        };
        let a = simulated_annealing(&g, &platform, &config).unwrap();
        let b = simulated_annealing(&g, &platform, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sa_counters_match_iterations() {
        let g = generate(&GeneratorConfig {
            node_count: 8,
            seed: 5,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        let config = SaConfig {
            seed: 1,
            restarts: 2,
            ..Default::default()
        };
        let r = simulated_annealing(&g, &platform, &config).unwrap();
        let per_chain = r.temperature_levels as u64 * config.iterations_per_level as u64;
        assert_eq!(r.accepted_moves + r.rejected_moves, per_chain * 2);
    }

    #[test]
    fn sa_is_scale_invariant() {
        let g = generate(&GeneratorConfig {
            node_count: 10,
            seed: 21,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        // scale all rates down 8x (a power of two, so every derived time
        // scales bit-exactly and the random walk is identical)
        let mut slow = platform.clone();
        for d in &mut slow.devices {
            match &mut d.kind {
                DeviceKind::Cpu { core_rate, .. } | DeviceKind::Gpu { core_rate, .. } => {
                    *core_rate /= 8.0
                }
                DeviceKind::Fpga {
                    stream_rate,
                    compute_rate,
                    ..
                } => {
                    *stream_rate /= 8.0;
                    *compute_rate /= 8.0;
                }
            }
        }
        slow.interconnect.host_bandwidth /= 8.0;
        slow.interconnect.transfer_latency *= 8.0;
        let config = SaConfig {
            seed: 4,
            restarts: 2,
            ..Default::default()
        };
        let a = simulated_annealing(&g, &platform, &config).unwrap();
        let b = simulated_annealing(&g, &slow, &config).unwrap();
        assert_eq!(a.mapping, b.mapping, "visited states must be identical");
        assert!((b.predicted_makespan / a.predicted_makespan - 8.0).abs() < 1e-12);
        assert_eq!(a.accepted_moves, b.accepted_moves);
    }

    #[test]
    fn brute_force_single_task_picks_argmin() {
        let g = TaskGraph::new(vec![task(0, 1.0, 1.0, 1)], vec![], 10_000_000).unwrap();
        let platform = default_platform();
        let m = brute_force(&g, &platform).unwrap();
        // p=1 task: GPU wins over CPU and FPGA
        assert_eq!(m.device_of(TaskId(0)), Some(DeviceId(1)));
    }

    #[test]
    fn brute_force_splits_independent_tasks_across_equal_cpus() {
        let platform = Platform::new(
            vec![
                Device {
                    id: DeviceId(0),
                    kind: DeviceKind::Cpu {
                        core_count: 1,
                        core_rate: 1e9,
                    },
                },
                Device {
                    id: DeviceId(1),
                    kind: DeviceKind::Cpu {
                        core_count: 1,
                        core_rate: 1e9,
                    },
                },
            ],
            Interconnect {
                host_bandwidth: 1e9,
                transfer_latency: 1e-4,
            },
        )
        .unwrap();
        let g = TaskGraph::new(
            vec![task(0, 1.0, 0.0, 1), task(1, 1.0, 0.0, 1)],
            vec![],
            1_000_000,
        )
        .unwrap();
        let m = brute_force(&g, &platform).unwrap();
        assert_ne!(m.device_of(TaskId(0)), m.device_of(TaskId(1)));
        // lexicographic tie-break puts task 0 on device 0
        assert_eq!(m.device_of(TaskId(0)), Some(DeviceId(0)));
    }

    #[test]
    fn brute_force_respects_area() {
        let g = TaskGraph::new(
            vec![task(0, 40.0, 0.0, 40), task(1, 40.0, 0.0, 40)],
            vec![],
            10_000_000,
        )
        .unwrap();
        let platform = default_platform();
        let m = brute_force(&g, &platform).unwrap();
        let on_fpga = [TaskId(0), TaskId(1)]
            .iter()
            .filter(|t| m.device_of(**t) == Some(DeviceId(2)))
            .count();
        assert!(on_fpga <= 1);
        assert!(area_valid(&g, &m, &platform));
    }

    #[test]
    fn brute_force_guard() {
        let g = generate(&GeneratorConfig {
            node_count: 11,
            seed: 0,
            ..Default::default()
        })
        .unwrap();
        assert!(matches!(
            brute_force(&g, &default_platform()),
            Err(MapError::TooLarge { actual: 11, .. })
        ));
    }

    #[test]
    fn sa_close_to_brute_force_on_small_graphs() {
        let platform = default_platform();
        let mut hits = 0;
        let total = 6;
        for seed in 0..total {
            let g = generate(&GeneratorConfig {
                node_count: 8,
                seed,
                ..Default::default()
            })
            .unwrap();
            let best = brute_force(&g, &platform).unwrap();
            let best_cost = predicted_makespan(&g, &best, &platform).unwrap();
            let r = simulated_annealing(
                &g,
                &platform,
                &SaConfig {
                    seed: seed + 100,
                    ..Default::default()
                },
            )
            .unwrap();
            if r.predicted_makespan <= best_cost * 1.05 {
                hits += 1;
            }
        }
        assert!(hits >= total - 1, "only {hits}/{total} runs near optimum");
    }

    #[test]
    fn edge_between_fpga_tasks_prefers_streaming() {
        // Two serial heavy tasks: streamed on the FPGA they cost max()
        // instead of a sum, so the optimum puts both there.
        let g = TaskGraph::new(
            vec![task(0, 8.0, 0.0, 8), task(1, 8.0, 0.0, 8)],
            vec![Edge {
                src: TaskId(0),
                dst: TaskId(1),
                bytes: 10_000_000,
            }],
            10_000_000,
        )
        .unwrap();
        let platform = default_platform();
        let m = brute_force(&g, &platform).unwrap();
        assert_eq!(m.device_of(TaskId(0)), Some(DeviceId(2)));
        assert_eq!(m.device_of(TaskId(1)), Some(DeviceId(2)));
    }
}
