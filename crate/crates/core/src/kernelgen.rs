//! Dummy-kernel source emission and its reference semantics.
//!
//! Every generated kernel reads k input arrays and accumulates them into a
//! result array element-wise, `r[i] = (r[i] + a_j[i]) mod 256`, repeated
//! `R = round(100 * c / 2)` times so a complexity of 1 costs 100 operations
//! per element. Software kernels split the repetitions into a per-element
//! parallel section and a first-work-item serial section according to the
//! parallelizability; FPGA kernels split them evenly across `s` pipeline
//! stages joined by single-element FIFOs, with stream adapters towards
//! other FPGA kernels.
//!
//! The emitted text is portable compute-kernel C; this crate never compiles
//! it. Correctness is pinned by [`reference_output`], whose closed form must
//! match a literal interpretation of the emitted loops.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::platform::{DeviceId, Platform};
use crate::predictor::{Mapping, MappingError};
use crate::taskgraph::{Task, TaskGraph, TaskId};

/// FIFO depth of the stream output adapter between FPGA kernels.
pub const OUTPUT_FIFO_DEPTH: u32 = 20;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("input array length {actual} does not match result length {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which architecture a kernel source targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFlavor {
    Software,
    Fpga,
}

/// Generated kernel source for one task.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSource {
    pub task: TaskId,
    pub flavor: KernelFlavor,
    pub text: String,
    /// In-edges served by stream input adapters (FPGA flavor).
    pub stream_in: Vec<TaskId>,
    /// Whether the output leaves through a stream adapter (FPGA flavor).
    pub stream_out: bool,
}

/// Number of repetitions of the two-operation update for complexity `c`:
/// `max(1, round(50 c))`.
pub fn repetitions(complexity: f64) -> u64 {
    ((50.0 * complexity).round() as u64).max(1)
}

/// Closed-form result of one kernel: `r[i] = (init[i] + R * sum_j a_j[i])
/// mod 256`. Equivalent to running the emitted loops literally, because the
/// update is associative and commutative modulo 256.
pub fn reference_output(
    initial: &[u8],
    inputs: &[&[u8]],
    complexity: f64,
) -> Result<Vec<u8>, KernelError> {
    for input in inputs {
        if input.len() != initial.len() {
            return Err(KernelError::LengthMismatch {
                expected: initial.len(),
                actual: input.len(),
            });
        }
    }
    let reps = repetitions(complexity);
    Ok(initial
        .iter()
        .enumerate()
        .map(|(i, &r0)| {
            let sum: u64 = inputs.iter().map(|a| a[i] as u64).sum();
            ((r0 as u64 + (reps % 256) * (sum % 256)) % 256) as u8
        })
        .collect())
}

/// Splits `reps` into (parallel, serial) shares so the parallel part covers
/// fraction `p`, totals conserved exactly.
pub fn split_repetitions(reps: u64, parallelizability: f64) -> (u64, u64) {
    let parallel = ((reps as f64 * parallelizability).round() as u64).min(reps);
    (parallel, reps - parallel)
}

/// Splits `reps` across `stages` pipeline stages, remainder to the earliest
/// stages; the counts always sum to `reps`.
pub fn stage_repetitions(reps: u64, stages: u32) -> Vec<u64> {
    let stages = stages.max(1) as u64;
    let base = reps / stages;
    let extra = reps % stages;
    (0..stages)
        .map(|i| if i < extra { base + 1 } else { base })
        .collect()
}

fn input_names(fan_in: usize) -> Vec<String> {
    (0..fan_in.max(1)).map(|j| format!("in{j}")).collect()
}

/// Emits the work-item kernel used for CPU and GPU mappings: a parallel
/// section where each work item owns one output element, and a serial
/// section where work item 0 sweeps the whole array.
pub fn emit_software_kernel(task: &Task, fan_in: usize) -> KernelSource {
    let reps = repetitions(task.complexity);
    let (parallel, serial) = split_repetitions(reps, task.parallelizability);
    let inputs = input_names(fan_in);
    let params: Vec<String> = inputs
        .iter()
        .map(|name| format!("global const uchar* {name}"))
        .collect();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "// task {}: complexity {:.6}, parallelizability {:.6}",
        task.id, task.complexity, task.parallelizability
    );
    let _ = writeln!(
        text,
        "// {} repetitions: {} parallel + {} serial",
        reps, parallel, serial
    );
    let _ = writeln!(
        text,
        "kernel void task_{}({}, global uchar* out, const uint n) {{",
        task.id,
        params.join(", ")
    );
    let _ = writeln!(text, "    const size_t gid = get_global_id(0);");
    if parallel > 0 {
        let _ = writeln!(text, "    uchar acc = out[gid];");
        let _ = writeln!(text, "    for (uint rep = 0; rep < {parallel}u; ++rep) {{");
        for name in &inputs {
            let _ = writeln!(text, "        acc = (uchar)((acc + {name}[gid]) & 0xff);");
        }
        let _ = writeln!(text, "    }}");
        let _ = writeln!(text, "    out[gid] = acc;");
    }
    if serial > 0 {
        if parallel > 0 {
            let _ = writeln!(text, "    barrier(CLK_GLOBAL_MEM_FENCE);");
        }
        let _ = writeln!(text, "    if (gid == 0) {{");
        let _ = writeln!(text, "        for (uint rep = 0; rep < {serial}u; ++rep) {{");
        let _ = writeln!(text, "            for (uint i = 0; i < n; ++i) {{");
        let _ = writeln!(text, "                uchar r = out[i];");
        for name in &inputs {
            let _ = writeln!(text, "                r = (uchar)((r + {name}[i]) & 0xff);");
        }
        let _ = writeln!(text, "                out[i] = r;");
        let _ = writeln!(text, "            }}");
        let _ = writeln!(text, "        }}");
        let _ = writeln!(text, "    }}");
    }
    let _ = writeln!(text, "}}");

    KernelSource {
        task: task.id,
        flavor: KernelFlavor::Software,
        text,
        stream_in: Vec::new(),
        stream_out: false,
    }
}

/// Emits the dataflow kernel for FPGA mappings: `s` subtask stages joined by
/// depth-1 FIFOs, stream input adapters for streamed in-edges, and a stream
/// output adapter (with memory fallback) when the output streams onwards.
///
/// `stream_in` lists (source task, streamed?) for every in-edge in id order.
pub fn emit_fpga_kernel(task: &Task, stream_in: &[(TaskId, bool)], stream_out: bool) -> KernelSource {
    let reps = repetitions(task.complexity);
    let stages = stage_repetitions(reps, task.streamability);
    let fan_in = stream_in.len();
    let inputs = input_names(fan_in);

    let mut text = String::new();
    let _ = writeln!(
        text,
        "// task {}: complexity {:.6}, streamability {} ({} repetitions)",
        task.id, task.complexity, task.streamability, reps
    );
    let _ = writeln!(
        text,
        "// stage repetition counts: [{}]",
        stages
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    );

    for (j, (src, streamed)) in stream_in.iter().enumerate() {
        if !streamed {
            continue;
        }
        let _ = writeln!(text, "kernel void task_{}_in{}(/* axi stream from task {} */) {{", task.id, j, src);
        let _ = writeln!(text, "    // collect stream elements into fifo_in{j} (depth 1)");
        let _ = writeln!(text, "    for (uint i = 0; i < N; ++i) {{");
        let _ = writeln!(text, "        fifo_in{j}.write(stream_in{j}.read());");
        let _ = writeln!(text, "    }}");
        let _ = writeln!(text, "}}");
    }

    let params: Vec<String> = inputs
        .iter()
        .zip(stream_in)
        .map(|(name, (_, streamed))| {
            if *streamed {
                format!("/* stream */ pipe uchar {name}")
            } else {
                format!("global const uchar* {name}")
            }
        })
        .collect();
    let _ = writeln!(
        text,
        "kernel void task_{}({}, global uchar* out, const uint n) {{",
        task.id,
        params.join(", ")
    );
    for (s, stage_reps) in stages.iter().enumerate() {
        let _ = writeln!(text, "    // subtask stage {s}: {stage_reps} repetitions");
        let _ = writeln!(text, "    stage_{s}: {{");
        let source = if s == 0 {
            "element inputs".to_string()
        } else {
            format!("fifo_{} (depth 1)", s - 1)
        };
        let _ = writeln!(text, "        // reads {source}");
        let _ = writeln!(text, "        for (uint rep = 0; rep < {stage_reps}u; ++rep) {{");
        for name in &inputs {
            let _ = writeln!(text, "            acc = (uchar)((acc + {name}_elem) & 0xff);");
        }
        let _ = writeln!(text, "        }}");
        if s + 1 < stages.len() {
            let _ = writeln!(text, "        fifo_{s}.write(acc); // depth 1");
        }
        let _ = writeln!(text, "    }}");
    }
    let _ = writeln!(text, "}}");

    if stream_out {
        let _ = writeln!(
            text,
            "kernel void task_{}_out(/* axi stream, fifo depth {} */) {{",
            task.id, OUTPUT_FIFO_DEPTH
        );
        let _ = writeln!(text, "    for (uint i = 0; i < N; ++i) {{");
        let _ = writeln!(text, "        if (fifo_out.full()) {{");
        let _ = writeln!(text, "            // consumer never attached in time: spill to RAM");
        let _ = writeln!(text, "            ram_fallback(fifo_out, out, i, N);");
        let _ = writeln!(text, "            return;");
        let _ = writeln!(text, "        }}");
        let _ = writeln!(text, "        fifo_out.write(result.read());");
        let _ = writeln!(text, "    }}");
        let _ = writeln!(text, "}}");
    }

    KernelSource {
        task: task.id,
        flavor: KernelFlavor::Fpga,
        text,
        stream_in: stream_in
            .iter()
            .filter(|(_, streamed)| *streamed)
            .map(|(src, _)| *src)
            .collect(),
        stream_out,
    }
}

/// How an edge's data is expected to move at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeHint {
    Ram,
    StreamCandidate,
}

/// One data endpoint of a task: an edge or the external world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataRef {
    External,
    Edge { src: TaskId, dst: TaskId },
}

/// Launch record for one task in the host program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub task: TaskId,
    pub device: DeviceId,
    pub flavor: KernelFlavor,
    pub inputs: Vec<DataRef>,
    pub outputs: Vec<DataRef>,
}

/// Per-edge transport hint for the host program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeModeHint {
    pub src: TaskId,
    pub dst: TaskId,
    pub mode: EdgeHint,
}

/// Host integration manifest: launch records in topological order plus the
/// per-edge transport hints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostManifest {
    pub launches: Vec<ManifestEntry>,
    pub edges: Vec<EdgeModeHint>,
}

/// Builds the host manifest for a mapped graph: one launch record per task
/// in topological order; same-FPGA edges are stream candidates, everything
/// else moves through memory.
pub fn emit_manifest(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
) -> Result<HostManifest, KernelError> {
    mapping.validate(graph, platform)?;
    let is_fpga = |t: TaskId| {
        platform
            .device(mapping.device_of(t).unwrap())
            .is_some_and(|d| d.is_fpga())
    };
    let launches = graph
        .topological_order()
        .iter()
        .map(|&id| {
            let device = mapping.device_of(id).unwrap();
            let mut inputs: Vec<DataRef> = graph
                .in_edges(id)
                .map(|e| DataRef::Edge {
                    src: e.src,
                    dst: e.dst,
                })
                .collect();
            if inputs.is_empty() {
                inputs.push(DataRef::External);
            }
            let mut outputs: Vec<DataRef> = graph
                .out_edges(id)
                .map(|e| DataRef::Edge {
                    src: e.src,
                    dst: e.dst,
                })
                .collect();
            if outputs.is_empty() {
                outputs.push(DataRef::External);
            }
            ManifestEntry {
                task: id,
                device,
                flavor: if is_fpga(id) {
                    KernelFlavor::Fpga
                } else {
                    KernelFlavor::Software
                },
                inputs,
                outputs,
            }
        })
        .collect();
    let edges = graph
        .edges()
        .iter()
        .map(|e| EdgeModeHint {
            src: e.src,
            dst: e.dst,
            mode: if is_fpga(e.src)
                && mapping.device_of(e.src) == mapping.device_of(e.dst)
            {
                EdgeHint::StreamCandidate
            } else {
                EdgeHint::Ram
            },
        })
        .collect();
    Ok(HostManifest { launches, edges })
}

/// Emits one source file per task plus `manifest.json` into `out_dir`.
/// File names follow `task_<id>_<flavor>.cl.txt`.
pub fn emit_kernel_tree(
    graph: &TaskGraph,
    mapping: &Mapping,
    platform: &Platform,
    out_dir: &Path,
) -> Result<HostManifest, KernelError> {
    let manifest = emit_manifest(graph, mapping, platform)?;
    std::fs::create_dir_all(out_dir)?;
    for entry in &manifest.launches {
        let task = graph.task(entry.task).unwrap();
        let source = match entry.flavor {
            KernelFlavor::Software => {
                let fan_in = graph.in_edges(entry.task).count().max(1);
                emit_software_kernel(task, fan_in)
            }
            KernelFlavor::Fpga => {
                let stream_in: Vec<(TaskId, bool)> = graph
                    .in_edges(entry.task)
                    .map(|e| {
                        let hint = manifest
                            .edges
                            .iter()
                            .find(|h| h.src == e.src && h.dst == e.dst)
                            .unwrap();
                        (e.src, hint.mode == EdgeHint::StreamCandidate)
                    })
                    .collect();
                let stream_in = if stream_in.is_empty() {
                    vec![(entry.task, false)] // placeholder slot for external input
                } else {
                    stream_in
                };
                let stream_out = graph.out_edges(entry.task).any(|e| {
                    manifest
                        .edges
                        .iter()
                        .any(|h| h.src == e.src && h.dst == e.dst && h.mode == EdgeHint::StreamCandidate)
                });
                emit_fpga_kernel(task, &stream_in, stream_out)
            }
        };
        let flavor = match entry.flavor {
            KernelFlavor::Software => "software",
            KernelFlavor::Fpga => "fpga",
        };
        let path = out_dir.join(format!("task_{}_{}.cl.txt", entry.task, flavor));
        std::fs::write(path, &source.text)?;
    }
    let manifest_text =
        serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    std::fs::write(out_dir.join("manifest.json"), manifest_text + "\n")?;
    Ok(manifest)
}
