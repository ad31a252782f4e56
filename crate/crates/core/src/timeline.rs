//! Execution timelines shared by the predictor and the simulator, plus the
//! JSON export format consumed by the CLI.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::platform::DeviceId;
use crate::taskgraph::TaskId;

/// Start/finish window of one task on its assigned device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskWindow {
    pub device: DeviceId,
    pub start: f64,
    pub finish: f64,
}

/// Half-open `[start, end)` interval during which a device is occupied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusyInterval {
    pub start: f64,
    pub end: f64,
}

/// Per-task windows, per-device busy intervals and the resulting makespan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Timeline {
    pub windows: BTreeMap<TaskId, TaskWindow>,
    pub device_busy: BTreeMap<DeviceId, Vec<BusyInterval>>,
    /// Edges whose data moved through an on-chip stream instead of memory.
    pub streamed_edges: BTreeSet<(TaskId, TaskId)>,
    pub makespan: f64,
}

impl Timeline {
    pub(crate) fn push_busy(&mut self, device: DeviceId, start: f64, end: f64) {
        if end > start {
            self.device_busy
                .entry(device)
                .or_default()
                .push(BusyInterval { start, end });
        }
    }
}

/// Why a same-FPGA edge did or did not stream at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StreamMode {
    Streamed,
    RamFallback,
    RamForced,
}

/// Per-edge streaming decision recorded by the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamDecision {
    pub src: TaskId,
    pub dst: TaskId,
    pub mode: StreamMode,
    pub reason: String,
}

/// One task row in a timeline file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimelineRow {
    pub task: TaskId,
    pub device: DeviceId,
    pub start: f64,
    pub finish: f64,
    /// Source ids of in-edges whose data streamed into this task.
    pub streamed_in_edges: Vec<TaskId>,
}

/// Serialized timeline: the predictor writes `tasks` + `makespan`, the
/// simulator additionally fills `decisions`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimelineFile {
    pub makespan: f64,
    pub tasks: Vec<TimelineRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decisions: Vec<StreamDecision>,
}

impl TimelineFile {
    pub fn new(timeline: &Timeline, decisions: &[StreamDecision]) -> Self {
        let tasks = timeline
            .windows
            .iter()
            .map(|(&task, w)| TimelineRow {
                task,
                device: w.device,
                start: w.start,
                finish: w.finish,
                streamed_in_edges: timeline
                    .streamed_edges
                    .iter()
                    .filter(|(_, dst)| *dst == task)
                    .map(|(src, _)| *src)
                    .collect(),
            })
            .collect();
        Self {
            makespan: timeline.makespan,
            tasks,
            decisions: decisions.to_vec(),
        }
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("timeline serialization");
        std::fs::write(path, text + "\n")
    }

    pub fn load(path: &Path) -> Result<Self, crate::taskgraph::GraphError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}
