//! Annotated task graphs: types, random series-parallel generation,
//! topological utilities and the JSON file format.
//!
//! Tasks carry three annotations. `complexity` is the number of operations
//! per data element (1.0 means 100 operations), `parallelizability` is the
//! Amdahl fraction that can be spread over cores, and `streamability` is the
//! number of pipeline stages a dataflow implementation can be split into
//! (which doubles as the task's FPGA area demand).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::platform::DeviceId;

/// Identifier of a task within a graph.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TaskId(pub u32);

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A task node with its three annotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub complexity: f64,
    pub parallelizability: f64,
    pub streamability: u32,
}

/// A data dependency carrying `bytes` of data from `src` to `dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: TaskId,
    pub dst: TaskId,
    pub bytes: u64,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("duplicate task id {0}")]
    DuplicateTask(TaskId),
    #[error("edge {0} -> {1} references a missing task")]
    DanglingEdge(TaskId, TaskId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(TaskId, TaskId),
    #[error("self loop on task {0}")]
    SelfLoop(TaskId),
    #[error("edge {0} -> {1} has zero data volume")]
    EmptyEdge(TaskId, TaskId),
    #[error("graph contains a cycle")]
    Cycle,
    #[error("task {0}: {1}")]
    InvalidTask(TaskId, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed graph file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// A validated directed acyclic task graph.
///
/// Construction checks all invariants (unique ids, edges between existing
/// tasks, annotation ranges, acyclicity), so holders of a `TaskGraph` can
/// rely on them. Tasks and edges are kept sorted by id for deterministic
/// iteration and byte-stable serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskGraph {
    tasks: Vec<Task>,
    edges: Vec<Edge>,
    data_bytes: u64,
    // adjacency caches, indices into `edges`
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    index_of: BTreeMap<TaskId, usize>,
    // derived once at construction; the predictor sits on a hot path
    topo: Vec<TaskId>,
    levels: Vec<u32>,
    input_bytes: Vec<u64>,
}

impl TaskGraph {
    /// Builds a graph from parts, validating every invariant.
    ///
    /// `data_bytes` is the size of the external input array read by source
    /// tasks (and by an isolated single task).
    pub fn new(
        mut tasks: Vec<Task>,
        mut edges: Vec<Edge>,
        data_bytes: u64,
    ) -> Result<Self, GraphError> {
        tasks.sort_by_key(|t| t.id);
        edges.sort_by_key(|e| (e.src, e.dst));

        let mut index_of = BTreeMap::new();
        for (i, t) in tasks.iter().enumerate() {
            if index_of.insert(t.id, i).is_some() {
                return Err(GraphError::DuplicateTask(t.id));
            }
            if !(t.complexity > 0.0) || !t.complexity.is_finite() {
                return Err(GraphError::InvalidTask(
                    t.id,
                    format!("complexity must be positive, got {}", t.complexity),
                ));
            }
            if !(0.0..=1.0).contains(&t.parallelizability) {
                return Err(GraphError::InvalidTask(
                    t.id,
                    format!(
                        "parallelizability must be in [0, 1], got {}",
                        t.parallelizability
                    ),
                ));
            }
            if t.streamability < 1 {
                return Err(GraphError::InvalidTask(
                    t.id,
                    "streamability must be at least 1".to_string(),
                ));
            }
        }

        let mut in_edges = vec![Vec::new(); tasks.len()];
        let mut out_edges = vec![Vec::new(); tasks.len()];
        let mut seen = BTreeSet::new();
        for (k, e) in edges.iter().enumerate() {
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src));
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(GraphError::DuplicateEdge(e.src, e.dst));
            }
            if e.bytes == 0 {
                return Err(GraphError::EmptyEdge(e.src, e.dst));
            }
            let (si, di) = match (index_of.get(&e.src), index_of.get(&e.dst)) {
                (Some(&s), Some(&d)) => (s, d),
                _ => return Err(GraphError::DanglingEdge(e.src, e.dst)),
            };
            out_edges[si].push(k);
            in_edges[di].push(k);
        }

        let mut graph = Self {
            tasks,
            edges,
            data_bytes,
            in_edges,
            out_edges,
            index_of,
            topo: Vec::new(),
            levels: Vec::new(),
            input_bytes: Vec::new(),
        };
        graph.topo = graph.compute_topo()?;
        graph.levels = graph.compute_levels();
        graph.input_bytes = (0..graph.tasks.len())
            .map(|i| {
                if graph.in_edges[i].is_empty() {
                    graph.data_bytes
                } else {
                    graph.in_edges[i].iter().map(|&k| graph.edges[k].bytes).sum()
                }
            })
            .collect();
        Ok(graph)
    }

    /// Unique topological order (ties by ascending id); errs on a cycle.
    fn compute_topo(&self) -> Result<Vec<TaskId>, GraphError> {
        let n = self.tasks.len();
        let mut indegree: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut heap = std::collections::BinaryHeap::new();
        for i in 0..n {
            if indegree[i] == 0 {
                heap.push(std::cmp::Reverse(self.tasks[i].id));
            }
        }
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(id)) = heap.pop() {
            order.push(id);
            let i = self.index_of[&id];
            for &k in &self.out_edges[i] {
                let d = self.index_of[&self.edges[k].dst];
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    heap.push(std::cmp::Reverse(self.edges[k].dst));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(GraphError::Cycle)
        }
    }

    fn compute_levels(&self) -> Vec<u32> {
        let mut levels = vec![0u32; self.tasks.len()];
        for id in &self.topo {
            let i = self.index_of[id];
            levels[i] = self.in_edges[i]
                .iter()
                .map(|&k| levels[self.index_of[&self.edges[k].src]] + 1)
                .max()
                .unwrap_or(0);
        }
        levels
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn data_bytes(&self) -> u64 {
        self.data_bytes
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.index_of.get(&id).map(|&i| &self.tasks[i])
    }

    pub fn task_index(&self, id: TaskId) -> Option<usize> {
        self.index_of.get(&id).copied()
    }

    pub fn in_edges(&self, id: TaskId) -> impl Iterator<Item = &Edge> {
        self.in_edges[self.index_of[&id]]
            .iter()
            .map(move |&k| &self.edges[k])
    }

    pub fn out_edges(&self, id: TaskId) -> impl Iterator<Item = &Edge> {
        self.out_edges[self.index_of[&id]]
            .iter()
            .map(move |&k| &self.edges[k])
    }

    /// Total input bytes of a task: the sum over its in-edges, or the
    /// external array size for sources.
    pub fn input_bytes(&self, id: TaskId) -> u64 {
        self.input_bytes[self.index_of[&id]]
    }

    pub(crate) fn input_bytes_at(&self, index: usize) -> u64 {
        self.input_bytes[index]
    }

    /// Unique topological order: every edge goes forward, ties broken by
    /// ascending task id.
    pub fn topological_order(&self) -> &[TaskId] {
        &self.topo
    }

    /// Longest-path depth from the sources: 0 for sources, otherwise one
    /// more than the deepest parent.
    pub fn breadth_levels(&self) -> BTreeMap<TaskId, u32> {
        self.tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id, self.levels[i]))
            .collect()
    }

    pub(crate) fn level_at(&self, index: usize) -> u32 {
        self.levels[index]
    }
}

/// Parameters of the random series-parallel generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub node_count: u32,
    /// Data volume on every edge and the external input size, in bytes.
    pub data_bytes: u64,
    pub lognormal_mu: f64,
    pub lognormal_sigma: f64,
    /// Fraction of tasks that get parallelizability exactly 1.0.
    pub parallel_full_fraction: f64,
    /// Probability that an expansion step is a series split rather than a
    /// parallel branch duplication.
    pub series_probability: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            node_count: 20,
            data_bytes: 10_000_000,
            lognormal_mu: 2.0,
            lognormal_sigma: 0.5,
            parallel_full_fraction: 0.5,
            series_probability: 0.5,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<(), GraphError> {
        if self.node_count == 0 {
            return Err(GraphError::InvalidConfig("node_count must be >= 1".into()));
        }
        if self.data_bytes == 0 {
            return Err(GraphError::InvalidConfig("data_bytes must be >= 1".into()));
        }
        if self.lognormal_sigma <= 0.0 {
            return Err(GraphError::InvalidConfig("sigma must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.parallel_full_fraction) {
            return Err(GraphError::InvalidConfig(
                "parallel_full_fraction must be in [0, 1]".into(),
            ));
        }
        if !(self.series_probability > 0.0 && self.series_probability < 1.0) {
            return Err(GraphError::InvalidConfig(
                "series_probability must be in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Generates a random annotated two-terminal series-parallel graph.
///
/// Topology: start from a single edge between two terminals and repeatedly
/// pick a uniformly random edge, then either series-split it (insert a node
/// on it) or duplicate it as a parallel one-node branch, until `node_count`
/// tasks exist. Both operations preserve series-parallelness and add exactly
/// one node.
///
/// Annotations: complexity and streamability are i.i.d. lognormal(mu, sigma)
/// samples, streamability rounded to the nearest integer with a floor of 1;
/// parallelizability is 1.0 with probability `parallel_full_fraction` and
/// uniform in [0, 1) otherwise. Every edge carries `data_bytes`.
///
/// Deterministic for a fixed config and seed.
pub fn generate(config: &GeneratorConfig) -> Result<TaskGraph, GraphError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Topology first, with its own draw sequence; annotations afterwards in
    // ascending id order so both phases are reproducible independently.
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut next_id = 1u32;
    if config.node_count > 1 {
        edges.push((0, 1));
        next_id = 2;
        while next_id < config.node_count {
            let pick = rng.random_range(0..edges.len());
            let (u, v) = edges[pick];
            let w = next_id;
            next_id += 1;
            if rng.random::<f64>() < config.series_probability {
                // series split: u -> w -> v replaces u -> v
                edges[pick] = (u, w);
                edges.push((w, v));
            } else {
                // parallel duplication: add branch u -> w -> v
                edges.push((u, w));
                edges.push((w, v));
            }
        }
    }

    let lognormal = LogNormal::new(config.lognormal_mu, config.lognormal_sigma)
        .map_err(|e| GraphError::InvalidConfig(e.to_string()))?;
    let mut tasks = Vec::with_capacity(next_id as usize);
    for id in 0..next_id {
        let complexity = lognormal.sample(&mut rng);
        let streamability = (lognormal.sample(&mut rng).round() as u32).max(1);
        let parallelizability = if rng.random::<f64>() < config.parallel_full_fraction {
            1.0
        } else {
            rng.random::<f64>()
        };
        tasks.push(Task {
            id: TaskId(id),
            complexity,
            parallelizability,
            streamability,
        });
    }

    let edges = edges
        .into_iter()
        .map(|(u, v)| Edge {
            src: TaskId(u),
            dst: TaskId(v),
            bytes: config.data_bytes,
        })
        .collect();
    TaskGraph::new(tasks, edges, config.data_bytes)
}

/// Recognizes two-terminal series-parallel graphs by reduction.
///
/// Repeatedly removes parallel duplicates (multi-edges in the working
/// multigraph) and series-contracts interior nodes with in- and out-degree
/// one; the graph is series-parallel iff this terminates in a single edge
/// between two nodes. Runs on the reduction rules alone and shares nothing
/// with [`generate`], so it doubles as an independent check of generator
/// output. A single task with no edges counts as series-parallel.
pub fn is_series_parallel(graph: &TaskGraph) -> bool {
    if graph.tasks().len() == 1 && graph.edges().is_empty() {
        return true;
    }
    if graph.edges().is_empty() {
        return false;
    }
    // multigraph as (src, dst) -> multiplicity
    let mut multi: BTreeMap<(TaskId, TaskId), u64> = BTreeMap::new();
    for e in graph.edges() {
        *multi.entry((e.src, e.dst)).or_insert(0) += 1;
    }
    loop {
        // parallel reduction: collapse multiplicities
        let mut changed = false;
        for (_, m) in multi.iter_mut() {
            if *m > 1 {
                *m = 1;
                changed = true;
            }
        }
        // series reduction: find a node with exactly one in and one out edge
        let mut indeg: BTreeMap<TaskId, u64> = BTreeMap::new();
        let mut outdeg: BTreeMap<TaskId, u64> = BTreeMap::new();
        for (&(s, d), &m) in &multi {
            *outdeg.entry(s).or_insert(0) += m;
            *indeg.entry(d).or_insert(0) += m;
        }
        let mut series_node = None;
        for (&(_, d), _) in &multi {
            if indeg.get(&d) == Some(&1) && outdeg.get(&d) == Some(&1) {
                series_node = Some(d);
                break;
            }
        }
        if let Some(w) = series_node {
            let (&(u, _), _) = multi.iter().find(|(&(_, d), _)| d == w).unwrap();
            let (&(_, v), _) = multi.iter().find(|(&(s, _), _)| s == w).unwrap();
            multi.remove(&(u, w));
            multi.remove(&(w, v));
            if u != v {
                *multi.entry((u, v)).or_insert(0) += 1;
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
    multi.len() == 1 && multi.values().all(|&m| m == 1)
}

// ---------------------------------------------------------------------------
// file format

/// A task-to-device assignment entry as stored in graph files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRecord {
    pub task: TaskId,
    pub device: DeviceId,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    tasks: Vec<Task>,
    edges: Vec<Edge>,
    #[serde(default = "default_data_bytes")]
    data_bytes: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mapping: Option<Vec<MappingRecord>>,
}

fn default_data_bytes() -> u64 {
    10_000_000
}

/// Writes a graph (and optionally a mapping) as a JSON document with arrays
/// sorted by id, so identical inputs produce byte-identical files.
pub fn save(
    path: &Path,
    graph: &TaskGraph,
    mapping: Option<&[MappingRecord]>,
) -> Result<(), GraphError> {
    let mut mapping = mapping.map(|m| m.to_vec());
    if let Some(m) = mapping.as_mut() {
        m.sort_by_key(|r| r.task);
    }
    let file = GraphFile {
        tasks: graph.tasks.clone(),
        edges: graph.edges.clone(),
        data_bytes: graph.data_bytes,
        mapping,
    };
    let text = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Loads and validates a graph file; returns the graph and the optional
/// stored mapping.
pub fn load(path: &Path) -> Result<(TaskGraph, Option<Vec<MappingRecord>>), GraphError> {
    let text = std::fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    let graph = TaskGraph::new(file.tasks, file.edges, file.data_bytes)?;
    Ok((graph, file.mapping))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn plain_task(id: u32) -> Task {
        Task {
            id: TaskId(id),
            complexity: 1.0,
            parallelizability: 0.5,
            streamability: 1,
        }
    }

    fn chain(n: u32) -> TaskGraph {
        let tasks = (0..n).map(plain_task).collect();
        let edges = (1..n)
            .map(|i| Edge {
                src: TaskId(i - 1),
                dst: TaskId(i),
                bytes: 100,
            })
            .collect();
        TaskGraph::new(tasks, edges, 100).unwrap()
    }

    #[test]
    fn single_node_graph() {
        let g = generate(&GeneratorConfig {
            node_count: 1,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(g.tasks().len(), 1);
        assert!(g.edges().is_empty());
        assert_eq!(g.input_bytes(TaskId(0)), g.data_bytes());
    }

    #[test]
    fn generator_is_deterministic() {
        let config = GeneratorConfig {
            node_count: 50,
            seed: 42,
            ..Default::default()
        };
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        let pa = dir.path().join("a.json");
        let pb = dir.path().join("b.json");
        save(&pa, &a, None).unwrap();
        save(&pb, &b, None).unwrap();
        assert_eq!(
            std::fs::read(&pa).unwrap(),
            std::fs::read(&pb).unwrap(),
            "serialized graphs must be byte-identical"
        );
    }

    #[test]
    fn generated_graphs_are_series_parallel() {
        for seed in 0..20 {
            let g = generate(&GeneratorConfig {
                node_count: 20,
                seed,
                ..Default::default()
            })
            .unwrap();
            assert!(is_series_parallel(&g), "seed {seed} failed SP reduction");
            assert_eq!(g.tasks().len(), 20);
        }
    }

    #[test]
    fn sp_recognizer_rejects_non_sp() {
        // The "N" graph: a->c, a->d, b->d is not two-terminal SP.
        let tasks = (0..4).map(plain_task).collect();
        let edges = vec![
            Edge {
                src: TaskId(0),
                dst: TaskId(2),
                bytes: 1,
            },
            Edge {
                src: TaskId(0),
                dst: TaskId(3),
                bytes: 1,
            },
            Edge {
                src: TaskId(1),
                dst: TaskId(3),
                bytes: 1,
            },
        ];
        let g = TaskGraph::new(tasks, edges, 1).unwrap();
        assert!(!is_series_parallel(&g));
    }

    #[test]
    fn lognormal_median_near_e_squared() {
        let config = GeneratorConfig {
            node_count: 10_000,
            seed: 7,
            ..Default::default()
        };
        let g = generate(&config).unwrap();
        let mut cs: Vec<f64> = g.tasks().iter().map(|t| t.complexity).collect();
        cs.sort_by(f64::total_cmp);
        let median = cs[cs.len() / 2];
        let expected = std::f64::consts::E.powi(2);
        assert!(
            (median - expected).abs() / expected < 0.05,
            "median {median} vs {expected}"
        );
    }

    #[test]
    fn parallel_fraction_matches_config() {
        let g = generate(&GeneratorConfig {
            node_count: 10_000,
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let full = g
            .tasks()
            .iter()
            .filter(|t| t.parallelizability == 1.0)
            .count() as f64;
        let frac = full / g.tasks().len() as f64;
        assert!((frac - 0.5).abs() < 0.03, "fraction {frac}");
    }

    #[test]
    fn topological_order_chain() {
        let g = chain(3);
        assert_eq!(
            g.topological_order(),
            vec![TaskId(0), TaskId(1), TaskId(2)]
        );
    }

    #[test]
    fn topological_order_single() {
        let g = chain(1);
        assert_eq!(g.topological_order(), vec![TaskId(0)]);
    }

    #[test]
    fn topological_order_diamond_tie_break() {
        let tasks = (0..4).map(plain_task).collect();
        let edges = vec![
            Edge {
                src: TaskId(0),
                dst: TaskId(1),
                bytes: 1,
            },
            Edge {
                src: TaskId(0),
                dst: TaskId(2),
                bytes: 1,
            },
            Edge {
                src: TaskId(1),
                dst: TaskId(3),
                bytes: 1,
            },
            Edge {
                src: TaskId(2),
                dst: TaskId(3),
                bytes: 1,
            },
        ];
        let g = TaskGraph::new(tasks, edges, 1).unwrap();
        assert_eq!(
            g.topological_order(),
            vec![TaskId(0), TaskId(1), TaskId(2), TaskId(3)]
        );
    }

    #[test]
    fn breadth_levels_chain_and_diamond() {
        let g = chain(3);
        let levels = g.breadth_levels();
        assert_eq!(levels[&TaskId(0)], 0);
        assert_eq!(levels[&TaskId(1)], 1);
        assert_eq!(levels[&TaskId(2)], 2);
    }

    #[test]
    fn breadth_levels_longest_path() {
        // a->b, a->c, b->c: c sits at level 2 even though a->c is direct.
        let tasks = (0..3).map(plain_task).collect();
        let edges = vec![
            Edge {
                src: TaskId(0),
                dst: TaskId(1),
                bytes: 1,
            },
            Edge {
                src: TaskId(0),
                dst: TaskId(2),
                bytes: 1,
            },
            Edge {
                src: TaskId(1),
                dst: TaskId(2),
                bytes: 1,
            },
        ];
        let g = TaskGraph::new(tasks, edges, 1).unwrap();
        let levels = g.breadth_levels();
        assert_eq!(levels[&TaskId(2)], 2);
    }

    #[test]
    fn cycle_is_rejected() {
        let tasks = (0..2).map(plain_task).collect();
        let edges = vec![
            Edge {
                src: TaskId(0),
                dst: TaskId(1),
                bytes: 1,
            },
            Edge {
                src: TaskId(1),
                dst: TaskId(0),
                bytes: 1,
            },
        ];
        assert!(matches!(
            TaskGraph::new(tasks, edges, 1),
            Err(GraphError::Cycle)
        ));
    }

    #[test]
    fn out_of_range_parallelizability_rejected() {
        let mut t = plain_task(0);
        t.parallelizability = 1.3;
        assert!(matches!(
            TaskGraph::new(vec![t], vec![], 1),
            Err(GraphError::InvalidTask(_, _))
        ));
    }

    #[test]
    fn save_load_roundtrip() {
        let g = generate(&GeneratorConfig {
            node_count: 12,
            seed: 9,
            ..Default::default()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let mapping = vec![MappingRecord {
            task: TaskId(0),
            device: DeviceId(1),
        }];
        save(&path, &g, Some(&mapping)).unwrap();
        let (h, m) = load(&path).unwrap();
        assert_eq!(g, h);
        assert_eq!(m.as_deref(), Some(&mapping[..]));
    }

    #[test]
    fn load_rejects_cycle_and_bad_annotations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{"tasks":[{"id":0,"complexity":1.0,"parallelizability":0.5,"streamability":1},
                         {"id":1,"complexity":1.0,"parallelizability":0.5,"streamability":1}],
                "edges":[{"src":0,"dst":1,"bytes":10},{"src":1,"dst":0,"bytes":10}]}"#,
        )
        .unwrap();
        assert!(matches!(load(&path), Err(GraphError::Cycle)));

        std::fs::write(
            &path,
            r#"{"tasks":[{"id":0,"complexity":1.0,"parallelizability":1.3,"streamability":1}],
                "edges":[]}"#,
        )
        .unwrap();
        assert!(matches!(load(&path), Err(GraphError::InvalidTask(_, _))));
    }

    #[test]
    fn input_bytes_sums_in_edges() {
        let tasks = (0..3).map(plain_task).collect();
        let edges = vec![
            Edge {
                src: TaskId(0),
                dst: TaskId(2),
                bytes: 100,
            },
            Edge {
                src: TaskId(1),
                dst: TaskId(2),
                bytes: 250,
            },
        ];
        let g = TaskGraph::new(tasks, edges, 999).unwrap();
        assert_eq!(g.input_bytes(TaskId(2)), 350);
        assert_eq!(g.input_bytes(TaskId(0)), 999);
    }
}
