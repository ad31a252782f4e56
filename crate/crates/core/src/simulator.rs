//! Deterministic discrete-event ground-truth simulator.
//!
//! Reproduces the runtime behavior the predictor abstracts away: tasks are
//! scheduled dynamically as soon as their inputs are available, FPGA kernels
//! are co-scheduled with same-FPGA parents once all non-FPGA dependencies
//! are fulfilled, and FPGA-to-FPGA streaming falls back to memory when the
//! output FIFO fills before the consumer starts. Host transfers overlap
//! dataflow compute (configurable) but serialize with CPU/GPU compute, which
//! is where the analytical model's congestion pessimism shows up.
//!
//! Events are processed in (time, event class, id) order and every work item
//! owns deterministic state, so identical inputs give identical timelines.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::platform::Platform;
use crate::predictor::{Mapping, MappingError};
use crate::taskgraph::{TaskGraph, TaskId};
use crate::timeline::{StreamDecision, StreamMode, TaskWindow, Timeline};

/// Runtime parameters of the simulated system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Capacity, in data elements, of the FIFO between two FPGA kernels.
    pub fifo_capacity: u32,
    /// Whether host<->FPGA transfers proceed during FPGA pipeline compute.
    pub overlap_fpga_transfers: bool,
    /// Bytes per data element for FIFO rate arithmetic.
    pub element_bytes: u64,
}

impl SimConfig {
    /// Depth of the FIFO between adjacent pipeline stages inside a kernel.
    /// Fixed by the kernel architecture; fill latency is not modeled.
    pub const STAGE_FIFO_CAPACITY: u32 = 1;
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            fifo_capacity: 20,
            overlap_fpga_transfers: true,
            element_bytes: 1,
        }
    }
}

/// Simulated timeline plus the per-edge streaming decisions taken en route.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTimeline {
    pub timeline: Timeline,
    /// One entry per same-FPGA edge, sorted by (src, dst).
    pub decisions: Vec<StreamDecision>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
    #[error("simulation stalled with unfinished tasks")]
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EdgeMode {
    /// Same-FPGA edge that may still stream.
    StreamCandidate,
    /// Data moves through memory; `tau` is the transfer duration.
    Ram { tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Occupant {
    Free,
    Task(usize),
    Transfer(usize),
    Group(usize),
}

#[derive(Debug, Clone)]
struct Group {
    members: Vec<usize>,
    device: usize,
    first_start: f64,
    finish: f64,
    generation: u32,
    done: bool,
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    TaskFinish { task: usize },
    GroupFinish { group: usize, generation: u32 },
    TransferFinish { edge: usize, resource: Option<usize> },
    FifoDeadline { edge: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    /// 0 for completions/arrivals, 1 for FIFO deadlines: a consumer start
    /// enabled at exactly the deadline still streams.
    class: u8,
    key: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.class == other.class && self.key == other.key
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.class.cmp(&other.class))
            .then(self.key.cmp(&other.key))
    }
}

struct Sim<'a> {
    graph: &'a TaskGraph,
    platform: &'a Platform,
    config: SimConfig,
    device_of: Vec<usize>,
    is_fpga_dev: Vec<bool>,
    exec: Vec<f64>,
    // task state
    started: Vec<bool>,
    finished: Vec<bool>,
    start_time: Vec<f64>,
    finish_time: Vec<f64>,
    group_of: Vec<Option<usize>>,
    // edge state
    mode: Vec<EdgeMode>,
    arrived: Vec<bool>,
    data_ready: Vec<Option<f64>>,
    launched: Vec<bool>,
    // devices and groups
    occupant: Vec<Occupant>,
    groups: Vec<Group>,
    decisions: Vec<Option<StreamDecision>>,
    heap: BinaryHeap<Reverse<Event>>,
    timeline: Timeline,
}

/// Simulates the execution of a mapped graph.
///
/// Scheduling is as-soon-as-possible with no lookahead. A CPU/GPU task
/// starts once all input data has arrived and the device is idle; incoming
/// transfers occupy the destination device like compute does. An FPGA task
/// whose same-FPGA parents are streaming joins their running group as soon
/// as its non-FPGA inputs are fulfilled; the coupled group finishes at the
/// latest join plus the largest member execution time. A producer whose
/// output FIFO fills before the consumer starts (at
/// `start + fifo_capacity * element_period`) irrevocably falls back to
/// memory: it completes standalone and the consumer waits for its
/// completion.
pub fn simulate(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
    config: &SimConfig,
) -> Result<SimTimeline, SimError> {
    if config.fifo_capacity == 0 {
        return Err(SimError::InvalidConfig("fifo_capacity must be >= 1".into()));
    }
    if config.element_bytes == 0 {
        return Err(SimError::InvalidConfig("element_bytes must be >= 1".into()));
    }
    mapping.validate(graph, platform)?;

    let n = graph.tasks().len();
    let mut device_index = std::collections::BTreeMap::new();
    for (i, d) in platform.devices.iter().enumerate() {
        device_index.insert(d.id, i);
    }
    let device_of: Vec<usize> = graph
        .tasks()
        .iter()
        .map(|t| device_index[&mapping.device_of(t.id).unwrap()])
        .collect();
    let is_fpga_dev: Vec<bool> = platform.devices.iter().map(|d| d.is_fpga()).collect();
    let exec: Vec<f64> = graph
        .tasks()
        .iter()
        .enumerate()
        .map(|(i, t)| platform.devices[device_of[i]].exec_time(t, graph.input_bytes_at(i)))
        .collect();

    let edge_count = graph.edges().len();
    let mut sim = Sim {
        graph,
        platform,
        config: *config,
        device_of,
        is_fpga_dev,
        exec,
        started: vec![false; n],
        finished: vec![false; n],
        start_time: vec![0.0; n],
        finish_time: vec![0.0; n],
        group_of: vec![None; n],
        mode: Vec::with_capacity(edge_count),
        arrived: vec![false; edge_count],
        data_ready: vec![None; edge_count],
        launched: vec![false; edge_count],
        occupant: vec![Occupant::Free; platform.devices.len()],
        groups: Vec::new(),
        decisions: vec![None; edge_count],
        heap: BinaryHeap::new(),
        timeline: Timeline::default(),
    };
    sim.classify_edges();
    sim.run()?;
    Ok(sim.into_timeline())
}

/// Renders a simulated timeline as a fixed-width text table with one row
/// per task (sorted by start time, then id) followed by the streaming
/// decisions.
pub fn replay_report(result: &SimTimeline) -> String {
    let mut out = String::new();
    out.push_str("task  device        start [s]       finish [s]  streamed in\n");
    let mut rows: Vec<(&TaskId, &TaskWindow)> = result.timeline.windows.iter().collect();
    rows.sort_by(|a, b| a.1.start.total_cmp(&b.1.start).then(a.0.cmp(b.0)));
    for (task, w) in rows {
        let streamed: Vec<String> = result
            .timeline
            .streamed_edges
            .iter()
            .filter(|(_, dst)| dst == task)
            .map(|(src, _)| src.to_string())
            .collect();
        let streamed = if streamed.is_empty() {
            "-".to_string()
        } else {
            streamed.join(",")
        };
        out.push_str(&format!(
            "{:<5} {:<6} {:>14.9} {:>16.9}  {}\n",
            task.to_string(),
            w.device.to_string(),
            w.start,
            w.finish,
            streamed
        ));
    }
    if !result.decisions.is_empty() {
        out.push_str("decisions:\n");
        for d in &result.decisions {
            let mode = match d.mode {
                StreamMode::Streamed => "STREAMED",
                StreamMode::RamFallback => "RAM_FALLBACK",
                StreamMode::RamForced => "RAM_FORCED",
            };
            out.push_str(&format!("{} -> {}  {:<12} {}\n", d.src, d.dst, mode, d.reason));
        }
    }
    out
}

impl<'a> Sim<'a> {
    fn task_index(&self, id: TaskId) -> usize {
        self.graph.task_index(id).unwrap()
    }

    /// Splits edges into stream candidates and memory edges. A same-FPGA
    /// edge whose endpoints are also connected through a task on another
    /// device can never stream (the consumer transitively needs the
    /// producer's completed output), so it is forced to memory up front.
    fn classify_edges(&mut self) {
        for (k, e) in self.graph.edges().iter().enumerate() {
            let si = self.task_index(e.src);
            let di = self.task_index(e.dst);
            let same_fpga =
                self.device_of[si] == self.device_of[di] && self.is_fpga_dev[self.device_of[si]];
            if !same_fpga {
                let tau = self.platform.transfer_time(
                    e.bytes,
                    self.platform.devices[self.device_of[si]].id,
                    self.platform.devices[self.device_of[di]].id,
                );
                self.mode.push(EdgeMode::Ram { tau });
            } else if self.detour_through_other_device(k, si, di) {
                self.mode.push(EdgeMode::Ram { tau: 0.0 });
                self.decisions[k] = Some(StreamDecision {
                    src: e.src,
                    dst: e.dst,
                    mode: StreamMode::RamForced,
                    reason: "dependency path through another device".to_string(),
                });
            } else {
                self.mode.push(EdgeMode::StreamCandidate);
            }
        }
    }

    /// True when a path src -> ... -> dst other than the direct edge passes
    /// through a task that is not on the producer's FPGA.
    fn detour_through_other_device(&self, edge: usize, src: usize, dst: usize) -> bool {
        let fpga = self.device_of[src];
        // state: (task index, passed a node on another device yet)
        let mut stack = vec![(src, false)];
        let mut seen = vec![[false; 2]; self.graph.tasks().len()];
        seen[src][0] = true;
        while let Some((i, tainted)) = stack.pop() {
            let id = self.graph.tasks()[i].id;
            for (k2, e2) in self.graph.edges().iter().enumerate() {
                if e2.src != id || k2 == edge {
                    continue;
                }
                let j = self.task_index(e2.dst);
                let via_other = tainted || (i != src && self.device_of[i] != fpga);
                if j == dst {
                    if via_other {
                        return true;
                    }
                    continue;
                }
                let next = via_other || self.device_of[j] != fpga;
                if !seen[j][usize::from(next)] {
                    seen[j][usize::from(next)] = true;
                    stack.push((j, next));
                }
            }
        }
        false
    }

    fn run(&mut self) -> Result<(), SimError> {
        self.scheduling_pass(0.0);
        while let Some(&Reverse(head)) = self.heap.peek() {
            let now = head.time;
            // phase 1: completions and arrivals at `now`
            while self
                .heap
                .peek()
                .is_some_and(|Reverse(e)| e.time == now && e.class == 0)
            {
                let Reverse(e) = self.heap.pop().unwrap();
                self.apply_completion(e);
            }
            self.scheduling_pass(now);
            // phase 2: FIFO deadlines at `now`; consumers that started in
            // phase 1 keep their stream
            while self.heap.peek().is_some_and(|Reverse(e)| e.time == now) {
                let Reverse(e) = self.heap.pop().unwrap();
                debug_assert_eq!(e.class, 1);
                self.apply_deadline(e);
            }
        }
        if self.finished.iter().all(|&f| f) {
            Ok(())
        } else {
            Err(SimError::Stalled)
        }
    }

    fn apply_completion(&mut self, ev: Event) {
        match ev.kind {
            EventKind::TaskFinish { task } => {
                self.finished[task] = true;
                self.finish_time[task] = ev.time;
                let d = self.device_of[task];
                debug_assert_eq!(self.occupant[d], Occupant::Task(task));
                self.occupant[d] = Occupant::Free;
                self.timeline.push_busy(
                    self.platform.devices[d].id,
                    self.start_time[task],
                    ev.time,
                );
                self.release_outputs(task, ev.time);
            }
            EventKind::GroupFinish { group, generation } => {
                if self.groups[group].generation != generation || self.groups[group].done {
                    return;
                }
                let g = self.groups[group].clone();
                for &m in &g.members {
                    self.finished[m] = true;
                    self.finish_time[m] = ev.time;
                }
                self.occupant[g.device] = Occupant::Free;
                self.groups[group].done = true;
                self.timeline
                    .push_busy(self.platform.devices[g.device].id, g.first_start, ev.time);
                for &m in &g.members {
                    self.release_outputs(m, ev.time);
                }
            }
            EventKind::TransferFinish { edge, resource } => {
                self.arrived[edge] = true;
                if let Some(d) = resource {
                    debug_assert_eq!(self.occupant[d], Occupant::Transfer(edge));
                    self.occupant[d] = Occupant::Free;
                }
            }
            EventKind::FifoDeadline { .. } => unreachable!("deadlines are class 1"),
        }
    }

    /// Producer output became available: mark memory edges ready and launch
    /// transfers that need no device slot.
    fn release_outputs(&mut self, task: usize, now: f64) {
        let id = self.graph.tasks()[task].id;
        for (k, e) in self.graph.edges().iter().enumerate() {
            if e.src != id {
                continue;
            }
            match self.mode[k] {
                EdgeMode::Ram { tau } => {
                    if self.arrived[k] || self.launched[k] {
                        continue;
                    }
                    self.data_ready[k] = Some(now);
                    if tau == 0.0 {
                        self.arrived[k] = true;
                    } else if !self.transfer_needs_slot(k) {
                        self.launched[k] = true;
                        self.heap.push(Reverse(Event {
                            time: now + tau,
                            class: 0,
                            key: k as u64,
                            kind: EventKind::TransferFinish {
                                edge: k,
                                resource: None,
                            },
                        }));
                    }
                }
                // remaining candidates never overflowed: output is buffered
                // in the FIFO for the consumer to read later
                EdgeMode::StreamCandidate => self.data_ready[k] = Some(now),
            }
        }
    }

    /// Memory transfers occupy the destination device unless it is an FPGA
    /// and transfer/compute overlap is on.
    fn transfer_needs_slot(&self, edge: usize) -> bool {
        let di = self.task_index(self.graph.edges()[edge].dst);
        let d = self.device_of[di];
        !(self.is_fpga_dev[d] && self.config.overlap_fpga_transfers)
    }

    fn apply_deadline(&mut self, ev: Event) {
        let EventKind::FifoDeadline { edge } = ev.kind else {
            unreachable!();
        };
        let e = self.graph.edges()[edge];
        let di = self.task_index(e.dst);
        if self.started[di] || self.mode[edge] != EdgeMode::StreamCandidate {
            return;
        }
        self.mode[edge] = EdgeMode::Ram { tau: 0.0 };
        self.decisions[edge] = Some(StreamDecision {
            src: e.src,
            dst: e.dst,
            mode: StreamMode::RamFallback,
            reason: "output FIFO filled before consumer start".to_string(),
        });
    }

    fn inputs_satisfied(&self, task: usize) -> bool {
        let id = self.graph.tasks()[task].id;
        self.graph.edges().iter().enumerate().all(|(k, e)| {
            if e.dst != id {
                return true;
            }
            match self.mode[k] {
                EdgeMode::Ram { .. } => self.arrived[k],
                EdgeMode::StreamCandidate => self.started[self.task_index(e.src)],
            }
        })
    }

    /// Repeatedly starts whatever can start at `now`: compute first (in task
    /// id order; FPGA consumers join running stream groups), then queued
    /// transfers in data-ready order.
    fn scheduling_pass(&mut self, now: f64) {
        loop {
            let mut progressed = false;
            for task in 0..self.graph.tasks().len() {
                if self.started[task] || !self.inputs_satisfied(task) {
                    continue;
                }
                let d = self.device_of[task];
                if self.is_fpga_dev[d] {
                    if let Some(group) = self.running_producer_group(task) {
                        self.join_group(task, group, now);
                        progressed = true;
                    } else if self.occupant[d] == Occupant::Free {
                        self.start_fpga_group(task, now);
                        progressed = true;
                    }
                } else if self.occupant[d] == Occupant::Free {
                    self.start_software_task(task, now);
                    progressed = true;
                }
            }
            if progressed {
                continue;
            }
            // transfers, ordered by (ready time, src id, dst id)
            let mut pending: Vec<(f64, TaskId, TaskId, usize)> = Vec::new();
            for (k, e) in self.graph.edges().iter().enumerate() {
                if self.launched[k] || self.arrived[k] {
                    continue;
                }
                if let (EdgeMode::Ram { tau }, Some(ready)) = (self.mode[k], self.data_ready[k]) {
                    if tau > 0.0 && self.transfer_needs_slot(k) {
                        pending.push((ready, e.src, e.dst, k));
                    }
                }
            }
            pending.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            for (_, _, _, k) in pending {
                let di = self.task_index(self.graph.edges()[k].dst);
                let d = self.device_of[di];
                if self.occupant[d] != Occupant::Free {
                    continue;
                }
                let EdgeMode::Ram { tau } = self.mode[k] else {
                    unreachable!();
                };
                self.occupant[d] = Occupant::Transfer(k);
                self.launched[k] = true;
                self.timeline
                    .push_busy(self.platform.devices[d].id, now, now + tau);
                self.heap.push(Reverse(Event {
                    time: now + tau,
                    class: 0,
                    key: k as u64,
                    kind: EventKind::TransferFinish {
                        edge: k,
                        resource: Some(d),
                    },
                }));
                progressed = true;
            }
            if !progressed {
                break;
            }
        }
    }

    /// The running stream group this task would join, if any: the group of a
    /// currently-running producer behind a stream-candidate in-edge.
    fn running_producer_group(&self, task: usize) -> Option<usize> {
        let id = self.graph.tasks()[task].id;
        for (k, e) in self.graph.edges().iter().enumerate() {
            if e.dst != id || self.mode[k] != EdgeMode::StreamCandidate {
                continue;
            }
            let si = self.task_index(e.src);
            if self.started[si] && !self.finished[si] {
                return self.group_of[si];
            }
        }
        None
    }

    fn start_software_task(&mut self, task: usize, now: f64) {
        let d = self.device_of[task];
        self.started[task] = true;
        self.start_time[task] = now;
        self.occupant[d] = Occupant::Task(task);
        self.heap.push(Reverse(Event {
            time: now + self.exec[task],
            class: 0,
            key: task as u64,
            kind: EventKind::TaskFinish { task },
        }));
    }

    fn start_fpga_group(&mut self, task: usize, now: f64) {
        let d = self.device_of[task];
        let gid = self.groups.len();
        self.groups.push(Group {
            members: Vec::new(),
            device: d,
            first_start: now,
            finish: now + self.exec[task],
            generation: 0,
            done: false,
        });
        self.occupant[d] = Occupant::Group(gid);
        self.begin_fpga_task(task, gid, now);
        self.groups[gid].members.push(task);
        self.heap.push(Reverse(Event {
            time: self.groups[gid].finish,
            class: 0,
            key: task as u64,
            kind: EventKind::GroupFinish {
                group: gid,
                generation: 0,
            },
        }));
    }

    /// Couples `task` into the running group: the whole pipeline now
    /// finishes at this join plus the largest member execution time (the
    /// producer is rate-locked to its consumers).
    fn join_group(&mut self, task: usize, gid: usize, now: f64) {
        self.begin_fpga_task(task, gid, now);
        let longest = self.groups[gid]
            .members
            .iter()
            .map(|&m| self.exec[m])
            .fold(self.exec[task], f64::max);
        let g = &mut self.groups[gid];
        g.members.push(task);
        g.generation += 1;
        g.finish = now + longest;
        self.heap.push(Reverse(Event {
            time: g.finish,
            class: 0,
            key: task as u64,
            kind: EventKind::GroupFinish {
                group: gid,
                generation: g.generation,
            },
        }));
    }

    fn begin_fpga_task(&mut self, task: usize, gid: usize, now: f64) {
        self.started[task] = true;
        self.start_time[task] = now;
        self.group_of[task] = Some(gid);
        let id = self.graph.tasks()[task].id;
        // record stream decisions for the candidate in-edges feeding this start
        for (k, e) in self.graph.edges().iter().enumerate() {
            if e.dst != id || self.mode[k] != EdgeMode::StreamCandidate {
                continue;
            }
            let si = self.task_index(e.src);
            let reason = if self.finished[si] {
                "consumer read output buffered in FIFO"
            } else {
                "consumer co-scheduled with streaming producer"
            };
            self.decisions[k] = Some(StreamDecision {
                src: e.src,
                dst: e.dst,
                mode: StreamMode::Streamed,
                reason: reason.to_string(),
            });
            self.timeline.streamed_edges.insert((e.src, e.dst));
        }
        // arm FIFO deadlines towards not-yet-started stream consumers
        for (k, e) in self.graph.edges().iter().enumerate() {
            if e.src != id || self.mode[k] != EdgeMode::StreamCandidate {
                continue;
            }
            let di = self.task_index(e.dst);
            if self.started[di] {
                continue;
            }
            let fifo_bytes = self.config.fifo_capacity as u64 * self.config.element_bytes;
            if fifo_bytes >= e.bytes {
                continue; // whole output fits in the FIFO, never overflows
            }
            let deadline = now + (fifo_bytes as f64 / e.bytes as f64) * self.exec[task];
            self.heap.push(Reverse(Event {
                time: deadline,
                class: 1,
                key: k as u64,
                kind: EventKind::FifoDeadline { edge: k },
            }));
        }
    }

    fn into_timeline(mut self) -> SimTimeline {
        for (i, t) in self.graph.tasks().iter().enumerate() {
            self.timeline.windows.insert(
                t.id,
                TaskWindow {
                    device: self.platform.devices[self.device_of[i]].id,
                    start: self.start_time[i],
                    finish: self.finish_time[i],
                },
            );
        }
        self.timeline.makespan = self.finish_time.iter().copied().fold(0.0, f64::max);
        let mut decisions: Vec<StreamDecision> = self.decisions.into_iter().flatten().collect();
        decisions.sort_by_key(|d| (d.src, d.dst));
        SimTimeline {
            timeline: self.timeline,
            decisions,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platform::{default_platform, Device, DeviceId, DeviceKind, Interconnect};
    use crate::taskgraph::{Edge, Task};

    const CPU: DeviceId = DeviceId(0);
    const GPU: DeviceId = DeviceId(1);
    const FPGA: DeviceId = DeviceId(2);

    fn task(id: u32, c: f64, p: f64, s: u32) -> Task {
        Task {
            id: TaskId(id),
            complexity: c,
            parallelizability: p,
            streamability: s,
        }
    }

    fn edge(src: u32, dst: u32) -> Edge {
        Edge {
            src: TaskId(src),
            dst: TaskId(dst),
            bytes: 10_000_000,
        }
    }

    fn mapping(pairs: &[(u32, DeviceId)]) -> Mapping {
        let mut m = Mapping::new();
        for (t, d) in pairs {
            m.assign(TaskId(*t), *d);
        }
        m
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    /// Dyadic platform: every derived time is an exact f64, so boundary
    /// events land on exactly equal timestamps.
    fn dyadic_platform(extra_latency: f64) -> Platform {
        Platform::new(
            vec![
                Device {
                    id: DeviceId(0),
                    kind: DeviceKind::Cpu {
                        core_count: 1,
                        core_rate: (1u64 << 30) as f64,
                    },
                },
                Device {
                    id: DeviceId(1),
                    kind: DeviceKind::Fpga {
                        stream_rate: (1u64 << 28) as f64,
                        compute_rate: (1u64 << 28) as f64,
                        area_capacity: 64,
                    },
                },
            ],
            Interconnect {
                host_bandwidth: (1u64 << 31) as f64,
                transfer_latency: 7.0 / (1u64 << 14) as f64 + extra_latency,
            },
        )
        .unwrap()
    }

    /// F1 (FPGA source) feeds F2; F2 also needs CPU task C. With the dyadic
    /// numbers C's data arrives exactly at the FIFO deadline:
    /// C finish 2^-14, transfer 2^-11 + 7*2^-14, arrival 2^-10; F1 starts at
    /// 0 and the FIFO holds 1/4 of its output, deadline 2^-10.
    fn boundary_graph() -> TaskGraph {
        let n = 1u64 << 20;
        TaskGraph::new(
            vec![
                task(0, 1.0, 0.0, 1),
                task(1, 0.0625, 0.0, 1),
                task(2, 1.0, 0.0, 1),
            ],
            vec![
                Edge {
                    src: TaskId(0),
                    dst: TaskId(2),
                    bytes: n,
                },
                Edge {
                    src: TaskId(1),
                    dst: TaskId(2),
                    bytes: n,
                },
            ],
            n,
        )
        .unwrap()
    }

    fn boundary_config() -> SimConfig {
        SimConfig {
            fifo_capacity: 1,
            overlap_fpga_transfers: true,
            element_bytes: 1 << 18,
        }
    }

    #[test]
    fn consumer_start_exactly_at_deadline_still_streams() {
        let g = boundary_graph();
        let m = mapping(&[(0, DeviceId(1)), (1, DeviceId(0)), (2, DeviceId(1))]);
        let r = simulate(&g, &m, &dyadic_platform(0.0), &boundary_config()).unwrap();
        let d = r
            .decisions
            .iter()
            .find(|d| d.src == TaskId(0) && d.dst == TaskId(2))
            .unwrap();
        assert_eq!(d.mode, StreamMode::Streamed, "reason: {}", d.reason);
        let join = 1.0 / (1u64 << 10) as f64;
        // F2 reads both inputs: 2n bytes through a 2^28 B/s pipeline
        let t_f2 = 1.0 / (1u64 << 7) as f64;
        assert_eq!(r.timeline.windows[&TaskId(2)].start, join);
        assert_eq!(r.timeline.makespan, join + t_f2);
    }

    #[test]
    fn consumer_just_past_deadline_falls_back() {
        let g = boundary_graph();
        let m = mapping(&[(0, DeviceId(1)), (1, DeviceId(0)), (2, DeviceId(1))]);
        let eps = 1.0 / (1u64 << 30) as f64;
        let r = simulate(&g, &m, &dyadic_platform(eps), &boundary_config()).unwrap();
        let d = r
            .decisions
            .iter()
            .find(|d| d.src == TaskId(0) && d.dst == TaskId(2))
            .unwrap();
        assert_eq!(d.mode, StreamMode::RamFallback);
        // F2 waits for F1's completion and runs standalone after it.
        let t_f1 = 1.0 / (1u64 << 8) as f64;
        let t_f2 = 1.0 / (1u64 << 7) as f64;
        assert_eq!(r.timeline.windows[&TaskId(2)].start, t_f1);
        assert_eq!(r.timeline.makespan, t_f1 + t_f2);
        let w1 = &r.timeline.windows[&TaskId(0)];
        let w2 = &r.timeline.windows[&TaskId(2)];
        assert!(w1.finish <= w2.start);
    }

    #[test]
    fn fpga_pair_with_late_cpu_join_separates() {
        // The CPU-fed consumer misses the FIFO window, the pair separates,
        // and the producer runs in parallel with the CPU task.
        let g = TaskGraph::new(
            vec![
                task(0, 1.0, 0.0, 1), // source on CPU
                task(1, 4.0, 0.0, 4), // F1
                task(2, 2.0, 0.0, 1), // C, finishes after the FIFO window
                task(3, 8.0, 0.0, 4), // F2
            ],
            vec![edge(0, 1), edge(0, 2), edge(1, 3), edge(2, 3)],
            10_000_000,
        )
        .unwrap();
        let m = mapping(&[(0, CPU), (1, FPGA), (2, CPU), (3, FPGA)]);
        let r = simulate(&g, &m, &default_platform(), &SimConfig::default()).unwrap();
        let d = r
            .decisions
            .iter()
            .find(|d| d.src == TaskId(1) && d.dst == TaskId(3))
            .unwrap();
        assert_eq!(d.mode, StreamMode::RamFallback);
        let f1 = &r.timeline.windows[&TaskId(1)];
        let c = &r.timeline.windows[&TaskId(2)];
        let f2 = &r.timeline.windows[&TaskId(3)];
        assert!(f1.start < c.finish && c.start < f1.finish, "F1 overlaps C");
        assert!(f2.start >= f1.finish, "F2 waits for F1");
    }

    #[test]
    fn no_fpga_chain_matches_predictor() {
        let g = TaskGraph::new(
            vec![
                task(0, 2.0, 0.5, 1),
                task(1, 1.0, 1.0, 1),
                task(2, 3.0, 0.0, 1),
            ],
            vec![edge(0, 1), edge(1, 2)],
            10_000_000,
        )
        .unwrap();
        let m = mapping(&[(0, CPU), (1, GPU), (2, CPU)]);
        let platform = default_platform();
        let predicted = crate::predictor::predict(&g, &m, &platform).unwrap();
        let simulated = simulate(&g, &m, &platform, &SimConfig::default()).unwrap();
        assert!(
            (predicted.makespan - simulated.timeline.makespan).abs() <= 1e-9,
            "{} vs {}",
            predicted.makespan,
            simulated.timeline.makespan
        );
    }

    #[test]
    fn streamed_chain_runs_as_one_window() {
        let g = TaskGraph::new(
            vec![
                task(0, 1.0, 0.0, 2),
                task(1, 8.0, 0.0, 4),
                task(2, 1.0, 0.0, 2),
            ],
            vec![edge(0, 1), edge(1, 2)],
            10_000_000,
        )
        .unwrap();
        let m = mapping(&[(0, FPGA), (1, FPGA), (2, FPGA)]);
        let r = simulate(&g, &m, &default_platform(), &SimConfig::default()).unwrap();
        assert!(r.decisions.iter().all(|d| d.mode == StreamMode::Streamed));
        let expect = 2.0 * 1e7 / 1.6e9;
        assert!(
            close(r.timeline.makespan, expect, 1e-12),
            "{}",
            r.timeline.makespan
        );
        for id in [0, 1, 2] {
            assert_eq!(r.timeline.windows[&TaskId(id)].start, 0.0);
        }
    }

    #[test]
    fn transfer_overlaps_fpga_compute_but_not_cpu() {
        // An independent FPGA pair streams from t=0 while a CPU task's
        // output transfers to the FPGA inside that window; with overlap on,
        // the fed consumer starts right when the running group ends.
        let g = TaskGraph::new(
            vec![
                task(0, 1.0, 0.0, 1),  // CPU producer
                task(1, 10.0, 0.0, 4), // FPGA consumer of CPU data
                task(2, 4.0, 0.0, 8),  // FPGA pair
                task(3, 4.0, 0.0, 8),
            ],
            vec![edge(0, 1), edge(2, 3)],
            10_000_000,
        )
        .unwrap();
        let m = mapping(&[(0, CPU), (1, FPGA), (2, FPGA), (3, FPGA)]);
        let platform = default_platform();
        let overlapped = simulate(&g, &m, &platform, &SimConfig::default()).unwrap();
        let serialized = simulate(
            &g,
            &m,
            &platform,
            &SimConfig {
                overlap_fpga_transfers: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(overlapped.timeline.makespan < serialized.timeline.makespan);
        let w1 = &overlapped.timeline.windows[&TaskId(1)];
        let group_end = overlapped.timeline.windows[&TaskId(2)].finish;
        assert_eq!(w1.start, group_end);
    }

    #[test]
    fn forced_ram_on_detour_through_cpu() {
        let g = TaskGraph::new(
            vec![
                task(0, 1.0, 0.0, 2),
                task(1, 1.0, 0.5, 1),
                task(2, 1.0, 0.0, 2),
            ],
            vec![edge(0, 1), edge(0, 2), edge(1, 2)],
            10_000_000,
        )
        .unwrap();
        let m = mapping(&[(0, FPGA), (1, CPU), (2, FPGA)]);
        let r = simulate(&g, &m, &default_platform(), &SimConfig::default()).unwrap();
        let d = r
            .decisions
            .iter()
            .find(|d| d.src == TaskId(0) && d.dst == TaskId(2))
            .unwrap();
        assert_eq!(d.mode, StreamMode::RamForced);
    }

    #[test]
    fn detour_through_fpga_still_streams() {
        // F1 -> F2 -> F3 plus the shortcut F1 -> F3: everything on the
        // FPGA, so the whole chain co-starts and all edges stream.
        let g = TaskGraph::new(
            vec![
                task(0, 1.0, 0.0, 2),
                task(1, 1.0, 0.0, 2),
                task(2, 1.0, 0.0, 2),
            ],
            vec![edge(0, 1), edge(0, 2), edge(1, 2)],
            10_000_000,
        )
        .unwrap();
        let m = mapping(&[(0, FPGA), (1, FPGA), (2, FPGA)]);
        let r = simulate(&g, &m, &default_platform(), &SimConfig::default()).unwrap();
        assert_eq!(r.decisions.len(), 3);
        assert!(r.decisions.iter().all(|d| d.mode == StreamMode::Streamed));
    }

    #[test]
    fn every_fpga_edge_gets_exactly_one_decision() {
        let g = crate::taskgraph::generate(&crate::taskgraph::GeneratorConfig {
            node_count: 15,
            seed: 33,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        let mut m = Mapping::new();
        let mut area = 0u64;
        for t in g.tasks() {
            let d = if area + t.streamability as u64 <= 64 && t.id.0 % 2 == 0 {
                area += t.streamability as u64;
                FPGA
            } else {
                CPU
            };
            m.assign(t.id, d);
        }
        let r = simulate(&g, &m, &platform, &SimConfig::default()).unwrap();
        let fpga_edges: Vec<_> = g
            .edges()
            .iter()
            .filter(|e| m.device_of(e.src) == Some(FPGA) && m.device_of(e.dst) == Some(FPGA))
            .collect();
        assert_eq!(r.decisions.len(), fpga_edges.len());
        for e in fpga_edges {
            assert_eq!(
                r.decisions
                    .iter()
                    .filter(|d| d.src == e.src && d.dst == e.dst)
                    .count(),
                1
            );
        }
    }

    #[test]
    fn determinism() {
        let g = crate::taskgraph::generate(&crate::taskgraph::GeneratorConfig {
            node_count: 20,
            seed: 77,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        let mut m = Mapping::new();
        for (i, t) in g.tasks().iter().enumerate() {
            m.assign(t.id, if i % 3 == 0 { GPU } else { CPU });
        }
        let a = simulate(&g, &m, &platform, &SimConfig::default()).unwrap();
        let b = simulate(&g, &m, &platform, &SimConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_graph_report_has_header_only() {
        let g = TaskGraph::new(vec![], vec![], 1).unwrap();
        let m = Mapping::new();
        let r = simulate(&g, &m, &default_platform(), &SimConfig::default()).unwrap();
        assert_eq!(r.timeline.makespan, 0.0);
        let report = replay_report(&r);
        assert_eq!(report.lines().count(), 1);
    }

    #[test]
    fn single_task_report_has_one_row() {
        let g = TaskGraph::new(vec![task(0, 1.0, 0.0, 1)], vec![], 10_000_000).unwrap();
        let m = mapping(&[(0, CPU)]);
        let r = simulate(&g, &m, &default_platform(), &SimConfig::default()).unwrap();
        let report = replay_report(&r);
        assert_eq!(report.lines().count(), 2);
    }

    #[test]
    fn causality_and_exclusivity_hold() {
        let g = crate::taskgraph::generate(&crate::taskgraph::GeneratorConfig {
            node_count: 25,
            seed: 4,
            ..Default::default()
        })
        .unwrap();
        let platform = default_platform();
        let mut m = Mapping::new();
        for (i, t) in g.tasks().iter().enumerate() {
            m.assign(t.id, if i % 4 == 1 { GPU } else { CPU });
        }
        let r = simulate(&g, &m, &platform, &SimConfig::default()).unwrap();
        for e in g.edges() {
            let tau = platform.transfer_time(
                e.bytes,
                m.device_of(e.src).unwrap(),
                m.device_of(e.dst).unwrap(),
            );
            let u = &r.timeline.windows[&e.src];
            let v = &r.timeline.windows[&e.dst];
            assert!(v.start >= u.finish + tau - 1e-12);
        }
        for intervals in r.timeline.device_busy.values() {
            let mut sorted = intervals.clone();
            sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
            for w in sorted.windows(2) {
                assert!(w[0].end <= w[1].start + 1e-12);
            }
        }
    }
}
