//! Device and interconnect models.
//!
//! A [`Platform`] is a set of processing devices (CPUs, GPUs, FPGAs) plus a
//! host interconnect. It converts task annotations into execution times and
//! edge data volumes into transfer times; everything downstream (predictor,
//! simulator, mapper) works in terms of these two cost functions.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taskgraph::Task;

/// Identifier of a device within a platform.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct DeviceId(pub u32);

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

/// Device class together with its class-specific parameters.
///
/// Rates are bytes per second of complexity-1 work: a task with complexity
/// `c` over `n` input bytes takes `c * n / rate` seconds on a single core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DeviceKind {
    Cpu {
        core_count: u32,
        core_rate: f64,
    },
    Gpu {
        core_count: u32,
        core_rate: f64,
    },
    /// Dataflow device. `stream_rate` bounds element throughput through the
    /// board; `compute_rate` is the per-pipeline-stage rate; `area_capacity`
    /// limits the summed streamability of the tasks mapped onto it.
    Fpga {
        stream_rate: f64,
        compute_rate: f64,
        area_capacity: u32,
    },
}

/// A single processing device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Device {
    pub id: DeviceId,
    #[serde(flatten)]
    pub kind: DeviceKind,
}

impl Device {
    pub fn is_cpu(&self) -> bool {
        matches!(self.kind, DeviceKind::Cpu { .. })
    }

    pub fn is_fpga(&self) -> bool {
        matches!(self.kind, DeviceKind::Fpga { .. })
    }

    /// Area units available on a dataflow device; `None` for CPU/GPU.
    pub fn area_capacity(&self) -> Option<u32> {
        match self.kind {
            DeviceKind::Fpga { area_capacity, .. } => Some(area_capacity),
            _ => None,
        }
    }

    /// Execution time of `task` over `input_bytes` bytes of input data.
    ///
    /// CPU/GPU follow an Amdahl split: the serial fraction `1 - p` runs on
    /// one core, the parallel fraction is divided over
    /// `min(core_count, input_bytes)` workers. The FPGA runs an s-stage
    /// pipeline whose throughput is the slower of the board streaming rate
    /// and the per-stage compute rate for `c / s` work per element.
    pub fn exec_time(&self, task: &Task, input_bytes: u64) -> f64 {
        let n = input_bytes as f64;
        let c = task.complexity;
        match self.kind {
            DeviceKind::Cpu {
                core_count,
                core_rate,
            }
            | DeviceKind::Gpu {
                core_count,
                core_rate,
            } => {
                let p = task.parallelizability;
                let workers = (core_count as f64).min(n).max(1.0);
                (c * n / core_rate) * ((1.0 - p) + p / workers)
            }
            DeviceKind::Fpga {
                stream_rate,
                compute_rate,
                ..
            } => {
                let stage_rate = compute_rate * task.streamability as f64 / c;
                n / stream_rate.min(stage_rate)
            }
        }
    }
}

/// Host interconnect parameters: all cross-device traffic is staged through
/// host RAM at `host_bandwidth`, paying `transfer_latency` per hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interconnect {
    pub host_bandwidth: f64,
    pub transfer_latency: f64,
}

/// A set of devices plus the interconnect connecting them to host RAM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub devices: Vec<Device>,
    pub interconnect: Interconnect,
}

#[derive(Debug, Error)]
pub enum PlatformError {
    #[error("duplicate device id {0}")]
    DuplicateDevice(DeviceId),
    #[error("platform has no CPU device")]
    NoCpu,
    #[error("device {0} has a non-positive rate")]
    NonPositiveRate(DeviceId),
    #[error("device {0} has zero cores")]
    ZeroCores(DeviceId),
    #[error("interconnect bandwidth must be positive")]
    BadInterconnect,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed platform file: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Platform {
    /// Validates device ids, rates and the CPU-present invariant.
    pub fn new(devices: Vec<Device>, interconnect: Interconnect) -> Result<Self, PlatformError> {
        let mut seen = std::collections::BTreeSet::new();
        for d in &devices {
            if !seen.insert(d.id) {
                return Err(PlatformError::DuplicateDevice(d.id));
            }
            match d.kind {
                DeviceKind::Cpu {
                    core_count,
                    core_rate,
                }
                | DeviceKind::Gpu {
                    core_count,
                    core_rate,
                } => {
                    if core_rate <= 0.0 {
                        return Err(PlatformError::NonPositiveRate(d.id));
                    }
                    if core_count == 0 {
                        return Err(PlatformError::ZeroCores(d.id));
                    }
                }
                DeviceKind::Fpga {
                    stream_rate,
                    compute_rate,
                    ..
                } => {
                    if stream_rate <= 0.0 || compute_rate <= 0.0 {
                        return Err(PlatformError::NonPositiveRate(d.id));
                    }
                }
            }
        }
        if !devices.iter().any(Device::is_cpu) {
            return Err(PlatformError::NoCpu);
        }
        if interconnect.host_bandwidth <= 0.0 || interconnect.transfer_latency < 0.0 {
            return Err(PlatformError::BadInterconnect);
        }
        Ok(Self {
            devices,
            interconnect,
        })
    }

    pub fn device(&self, id: DeviceId) -> Option<&Device> {
        self.devices.iter().find(|d| d.id == id)
    }

    /// Time to move `bytes` from `from` to `to`.
    ///
    /// Same device: free. Each non-CPU endpoint adds one hop through host
    /// RAM (the CPU is co-located with host RAM), so CPU<->accelerator costs
    /// one hop and accelerator<->accelerator costs two.
    pub fn transfer_time(&self, bytes: u64, from: DeviceId, to: DeviceId) -> f64 {
        if from == to {
            return 0.0;
        }
        let hops = [from, to]
            .iter()
            .filter(|id| self.device(**id).map_or(false, |d| !d.is_cpu()))
            .count() as f64;
        hops * (bytes as f64 / self.interconnect.host_bandwidth + self.interconnect.transfer_latency)
    }

    pub fn save(&self, path: &Path) -> Result<(), PlatformError> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PlatformError> {
        let text = std::fs::read_to_string(path)?;
        let platform: Platform = serde_json::from_str(&text)?;
        Platform::new(platform.devices, platform.interconnect)
    }
}

/// Reference platform: a 16-core CPU at 11.3 GB/s per core, a 3584-core GPU
/// at 2.4 GB/s per core and an FPGA streaming at 1.6 GB/s with 64 area
/// units, connected through an 8 GB/s host link with 0.1 ms latency.
pub fn default_platform() -> Platform {
    Platform {
        devices: vec![
            Device {
                id: DeviceId(0),
                kind: DeviceKind::Cpu {
                    core_count: 16,
                    core_rate: 11.3e9,
                },
            },
            Device {
                id: DeviceId(1),
                kind: DeviceKind::Gpu {
                    core_count: 3584,
                    core_rate: 2.4e9,
                },
            },
            Device {
                id: DeviceId(2),
                kind: DeviceKind::Fpga {
                    stream_rate: 1.6e9,
                    compute_rate: 1.6e9,
                    area_capacity: 64,
                },
            },
        ],
        interconnect: Interconnect {
            host_bandwidth: 8e9,
            transfer_latency: 1e-4,
        },
    }
}
