//! Rapid analytical makespan prediction.
//!
//! Prediction runs in three steps. Tasks are processed level by level
//! (breadth-first over longest-path depth, ties by id). Same-FPGA tasks
//! connected by edges are greedily contracted into supernodes that execute
//! as one pipelined unit, skipping any contraction that would create a cycle
//! through an outside task. Finally per-device finish times advance in that
//! order: a task starts once its device is free and all inputs have arrived,
//! where incoming transfers serialize with the destination device's busy
//! intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::platform::{DeviceId, Platform};
use crate::taskgraph::{MappingRecord, TaskGraph, TaskId};
use crate::timeline::{TaskWindow, Timeline};

/// Total assignment of tasks to devices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Mapping {
    assignment: BTreeMap<TaskId, DeviceId>,
}

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("task {0} has no device assigned")]
    UnmappedTask(TaskId),
    #[error("mapping references unknown device {0}")]
    UnknownDevice(DeviceId),
    #[error("FPGA {device} area exceeded: demand {demand} > capacity {capacity}")]
    AreaExceeded {
        device: DeviceId,
        demand: u64,
        capacity: u32,
    },
}

impl Mapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, task: TaskId, device: DeviceId) {
        self.assignment.insert(task, device);
    }

    pub fn device_of(&self, task: TaskId) -> Option<DeviceId> {
        self.assignment.get(&task).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TaskId, DeviceId)> + '_ {
        self.assignment.iter().map(|(&t, &d)| (t, d))
    }

    pub fn from_records(records: &[MappingRecord]) -> Self {
        let mut m = Self::new();
        for r in records {
            m.assign(r.task, r.device);
        }
        m
    }

    pub fn to_records(&self) -> Vec<MappingRecord> {
        self.iter()
            .map(|(task, device)| MappingRecord { task, device })
            .collect()
    }

    /// Checks totality, device existence and the per-FPGA area constraint
    /// (summed streamability of FPGA-mapped tasks must fit the capacity).
    pub fn validate(&self, graph: &TaskGraph, platform: &Platform) -> Result<(), MappingError> {
        let mut area: BTreeMap<DeviceId, u64> = BTreeMap::new();
        for task in graph.tasks() {
            let device_id = self
                .device_of(task.id)
                .ok_or(MappingError::UnmappedTask(task.id))?;
            let device = platform
                .device(device_id)
                .ok_or(MappingError::UnknownDevice(device_id))?;
            if device.is_fpga() {
                *area.entry(device_id).or_insert(0) += task.streamability as u64;
            }
        }
        for (device_id, demand) in area {
            let capacity = platform
                .device(device_id)
                .and_then(|d| d.area_capacity())
                .unwrap_or(0);
            if demand > capacity as u64 {
                return Err(MappingError::AreaExceeded {
                    device: device_id,
                    demand,
                    capacity,
                });
            }
        }
        Ok(())
    }
}

/// A maximal group of same-FPGA tasks whose connecting edges stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supernode {
    pub device: DeviceId,
    /// Member ids in ascending order.
    pub members: Vec<TaskId>,
    /// Edges internal to the group, flagged as streamed.
    pub streamed_edges: Vec<(TaskId, TaskId)>,
}

/// Knobs for prediction variants; the defaults reproduce the reference
/// model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictorConfig {
    /// Charge transfer intervals on the source device as well as the
    /// destination (default: destination only).
    pub serialize_source_transfers: bool,
    /// Disable supernode grouping so every FPGA edge goes through memory.
    pub force_ram: bool,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self {
            serialize_source_transfers: false,
            force_ram: false,
        }
    }
}

/// Groups same-FPGA tasks into stream-connected supernodes.
///
/// Edges whose endpoints sit on the same FPGA are contracted greedily in
/// topological edge order; a contraction is skipped when the condensed graph
/// would acquire a cycle, i.e. when an outside task lies on a path between
/// the two groups. Every FPGA task ends up in exactly one supernode
/// (possibly a singleton).
pub fn group_supernodes(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
) -> Result<Vec<Supernode>, MappingError> {
    mapping.validate(graph, platform)?;
    let dense = dense_assignment(graph, mapping, platform);
    Ok(group_dense(graph, &dense, platform))
}

fn group_dense(graph: &TaskGraph, device_of_task: &[usize], platform: &Platform) -> Vec<Supernode> {
    let n = graph.tasks().len();
    let mut topo_index = vec![0usize; n];
    for (pos, id) in graph.topological_order().iter().enumerate() {
        topo_index[graph.task_index(*id).unwrap()] = pos;
    }

    let device_of = |id: TaskId| device_of_task[graph.task_index(id).unwrap()];
    let on_fpga = |id: TaskId| platform.devices[device_of(id)].is_fpga();

    // candidate edges in topological order
    let mut candidates: Vec<(usize, usize, usize)> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| device_of(e.src) == device_of(e.dst) && on_fpga(e.src))
        .map(|(k, e)| {
            let si = graph.task_index(e.src).unwrap();
            let di = graph.task_index(e.dst).unwrap();
            (topo_index[si], topo_index[di], k)
        })
        .collect();
    candidates.sort_unstable();

    // union-find over task indices
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    // condensed successor sets recomputed on demand; graphs are small
    let reaches = |parent: &mut Vec<usize>, from: usize, to: usize| -> bool {
        let mut frontier = vec![from];
        let mut seen = vec![false; n];
        seen[from] = true;
        while let Some(g) = frontier.pop() {
            for e in graph.edges() {
                let si = find(parent, graph.task_index(e.src).unwrap());
                if si != g {
                    continue;
                }
                let di = find(parent, graph.task_index(e.dst).unwrap());
                if di == to {
                    return true;
                }
                if !seen[di] {
                    seen[di] = true;
                    frontier.push(di);
                }
            }
        }
        false
    };

    for (_, _, k) in candidates {
        let e = graph.edges()[k];
        let a = find(&mut parent, graph.task_index(e.src).unwrap());
        let b = find(&mut parent, graph.task_index(e.dst).unwrap());
        if a == b {
            continue;
        }
        // Merging is illegal iff some path a -> ... -> b leaves the pair:
        // check every condensed successor of a other than b.
        let mut creates_cycle = false;
        for e2 in graph.edges() {
            let si = find(&mut parent, graph.task_index(e2.src).unwrap());
            if si != a {
                continue;
            }
            let di = find(&mut parent, graph.task_index(e2.dst).unwrap());
            if di == a || di == b {
                continue;
            }
            if reaches(&mut parent, di, b) {
                creates_cycle = true;
                break;
            }
        }
        if !creates_cycle {
            let (a, b) = (a.min(b), a.max(b));
            parent[b] = a;
        }
    }

    // collect groups of FPGA tasks
    let mut groups: BTreeMap<usize, Vec<TaskId>> = BTreeMap::new();
    for task in graph.tasks() {
        if on_fpga(task.id) {
            let root = find(&mut parent, graph.task_index(task.id).unwrap());
            groups.entry(root).or_default().push(task.id);
        }
    }
    groups
        .into_values()
        .map(|mut members| {
            members.sort_unstable();
            let streamed_edges = graph
                .edges()
                .iter()
                .filter(|e| {
                    members.binary_search(&e.src).is_ok() && members.binary_search(&e.dst).is_ok()
                })
                .map(|e| (e.src, e.dst))
                .collect();
            Supernode {
                device: platform.devices[device_of(members[0])].id,
                members,
                streamed_edges,
            }
        })
        .collect()
}

/// Predicts the timeline of a mapped graph under the default configuration.
pub fn predict(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
) -> Result<Timeline, MappingError> {
    predict_with(graph, mapping, platform, &PredictorConfig::default())
}

/// Convenience wrapper returning only the makespan.
pub fn predicted_makespan(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
) -> Result<f64, MappingError> {
    predict(graph, mapping, platform).map(|t| t.makespan)
}

/// Predicts the timeline of a mapped graph.
///
/// Units (supernodes plus all remaining tasks) are processed in topological
/// order with breadth-first priority: among ready units the one whose
/// earliest member has the smallest (level, id) goes first. For each unit,
/// incoming transfers are serialized with the destination device's busy
/// intervals in order of producer finish time, then the unit executes once
/// the device is free and all inputs have arrived. A supernode starts only
/// after all members' external inputs are available and occupies its FPGA
/// for the largest member execution time; streamed edges contribute no
/// transfer.
pub fn predict_with(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
    config: &PredictorConfig,
) -> Result<Timeline, MappingError> {
    mapping.validate(graph, platform)?;
    let device_of_task = dense_assignment(graph, mapping, platform);
    let (_, timeline) = predict_core::<true>(graph, &device_of_task, platform, config);
    Ok(timeline.unwrap())
}

fn dense_assignment(graph: &TaskGraph, mapping: &Mapping, platform: &Platform) -> Vec<usize> {
    let mut device_index: BTreeMap<DeviceId, usize> = BTreeMap::new();
    for (i, d) in platform.devices.iter().enumerate() {
        device_index.insert(d.id, i);
    }
    graph
        .tasks()
        .iter()
        .map(|t| device_index[&mapping.device_of(t.id).unwrap()])
        .collect()
}

/// Makespan for a pre-validated dense assignment (platform device index per
/// task index). Fast path for the annealing loop: skips timeline recording.
pub(crate) fn makespan_dense(
    graph: &TaskGraph,
    device_of_task: &[usize],
    platform: &Platform,
    config: &PredictorConfig,
) -> f64 {
    predict_core::<false>(graph, device_of_task, platform, config).0
}

fn predict_core<const RECORD: bool>(
    graph: &TaskGraph,
    device_of_task: &[usize],
    platform: &Platform,
    config: &PredictorConfig,
) -> (f64, Option<Timeline>) {
    let n = graph.tasks().len();
    let mut timeline = if RECORD {
        Some(Timeline::default())
    } else {
        None
    };
    if n == 0 {
        return (0.0, timeline);
    }

    // units: supernodes plus singleton units for every other task
    let mut unit_members: Vec<Vec<usize>> = Vec::new();
    let mut unit_of: Vec<usize> = vec![usize::MAX; n];
    let any_fpga = device_of_task
        .iter()
        .any(|&d| platform.devices[d].is_fpga());
    if any_fpga && !config.force_ram {
        for sn in group_dense(graph, device_of_task, platform) {
            if RECORD {
                let t = timeline.as_mut().unwrap();
                for &(src, dst) in &sn.streamed_edges {
                    t.streamed_edges.insert((src, dst));
                }
            }
            let members: Vec<usize> = sn
                .members
                .iter()
                .map(|id| graph.task_index(*id).unwrap())
                .collect();
            for &m in &members {
                unit_of[m] = unit_members.len();
            }
            unit_members.push(members);
        }
    }
    for i in 0..n {
        if unit_of[i] == usize::MAX {
            unit_of[i] = unit_members.len();
            unit_members.push(vec![i]);
        }
    }
    let units = unit_members.len();

    // priority key: earliest member by (level, id)
    let key_of: Vec<(u32, TaskId)> = unit_members
        .iter()
        .map(|members| {
            members
                .iter()
                .map(|&i| (graph.level_at(i), graph.tasks()[i].id))
                .min()
                .unwrap()
        })
        .collect();

    // cross-unit in-degree counts, one per incoming edge
    let mut pending: Vec<usize> = vec![0; units];
    for e in graph.edges() {
        let su = unit_of[graph.task_index(e.src).unwrap()];
        let du = unit_of[graph.task_index(e.dst).unwrap()];
        if su != du {
            pending[du] += 1;
        }
    }

    let mut heap = std::collections::BinaryHeap::new();
    for u in 0..units {
        if pending[u] == 0 {
            heap.push(std::cmp::Reverse((key_of[u], u)));
        }
    }

    let mut free = vec![0.0f64; platform.devices.len()];
    let mut finish = vec![0.0f64; n];
    let mut done = 0usize;
    let mut ext: Vec<(f64, TaskId, TaskId, u64, usize)> = Vec::new();

    while let Some(std::cmp::Reverse((_, u))) = heap.pop() {
        done += 1;
        let members = &unit_members[u];
        let dev_i = device_of_task[members[0]];
        let unit_device = platform.devices[dev_i].id;

        // external in-edges sorted by (producer finish, src id, dst id)
        ext.clear();
        for &m in members {
            let id = graph.tasks()[m].id;
            for e in graph.in_edges(id) {
                let si = graph.task_index(e.src).unwrap();
                if unit_of[si] == u {
                    continue;
                }
                ext.push((finish[si], e.src, e.dst, e.bytes, device_of_task[si]));
            }
        }
        ext.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.cmp(&b.2))
        });

        let mut ready = 0.0f64;
        for &(src_finish, _, _, bytes, src_i) in &ext {
            let tau = platform.transfer_time(bytes, platform.devices[src_i].id, unit_device);
            let arrival = if tau > 0.0 {
                let mut t0 = src_finish.max(free[dev_i]);
                if config.serialize_source_transfers {
                    t0 = t0.max(free[src_i]);
                }
                let t1 = t0 + tau;
                free[dev_i] = t1;
                if RECORD {
                    timeline.as_mut().unwrap().push_busy(unit_device, t0, t1);
                }
                if config.serialize_source_transfers {
                    free[src_i] = t1;
                    if RECORD {
                        timeline
                            .as_mut()
                            .unwrap()
                            .push_busy(platform.devices[src_i].id, t0, t1);
                    }
                }
                t1
            } else {
                src_finish
            };
            ready = ready.max(arrival);
        }

        let start = ready.max(free[dev_i]);
        let exec = members
            .iter()
            .map(|&m| {
                platform.devices[dev_i].exec_time(&graph.tasks()[m], graph.input_bytes_at(m))
            })
            .fold(0.0f64, f64::max);
        let end = start + exec;
        free[dev_i] = end;
        if RECORD {
            timeline.as_mut().unwrap().push_busy(unit_device, start, end);
        }

        for &m in members {
            let id = graph.tasks()[m].id;
            finish[m] = end;
            if RECORD {
                timeline.as_mut().unwrap().windows.insert(
                    id,
                    TaskWindow {
                        device: unit_device,
                        start,
                        finish: end,
                    },
                );
            }
            for e in graph.out_edges(id) {
                let du = unit_of[graph.task_index(e.dst).unwrap()];
                if du != u {
                    pending[du] -= 1;
                    if pending[du] == 0 {
                        heap.push(std::cmp::Reverse((key_of[du], du)));
                    }
                }
            }
        }
    }
    debug_assert_eq!(done, units, "condensed graph must stay acyclic");

    let makespan = finish.iter().copied().fold(0.0, f64::max);
    if let Some(t) = timeline.as_mut() {
        t.makespan = makespan;
    }
    (makespan, timeline)
}
