// SPDX-License-Identifier: Apache-2.0

//! Critical-path and throughput analysis.
//!
//! Three estimators are provided. `approximate_cp` walks the topological
//! order, dropping the last node and every source and sink. `paper_exact_cp`
//! keeps the longest of the per-pair *shortest* paths between arguments and
//! sinks, so it can under-report depth when a shortcut edge exists.
//! `longest_path_cp` is the true longest source-to-sink path.
//!
//! Node set for all three: argument values (the sources) plus operators.
//! Sinks are operators none of whose results feed another operator. Depths
//! count operators only.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::cost::FabricConfig;
use crate::ir::{CircuitGraph, CycleError, Dependencies, OpId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CpMethod {
    #[serde(rename = "approx")]
    Approximate,
    PaperExact,
    #[serde(rename = "longest")]
    LongestPath,
}

impl CpMethod {
    pub const ALL: [CpMethod; 3] = [
        CpMethod::Approximate,
        CpMethod::PaperExact,
        CpMethod::LongestPath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CpMethod::Approximate => "approx",
            CpMethod::PaperExact => "paper-exact",
            CpMethod::LongestPath => "longest",
        }
    }

    pub fn run(
        self,
        graph: &CircuitGraph,
        fabric: &FabricConfig,
    ) -> Result<CriticalPathResult, CycleError> {
        match self {
            CpMethod::Approximate => approximate_cp(graph, fabric),
            CpMethod::PaperExact => paper_exact_cp(graph, fabric),
            CpMethod::LongestPath => longest_path_cp(graph, fabric),
        }
    }
}

impl fmt::Display for CpMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPathResult {
    pub method: CpMethod,
    pub ops: Vec<OpId>,
    pub depth: usize,
    pub latency_unit_time: f64,
}

impl CriticalPathResult {
    fn new(method: CpMethod, ops: Vec<OpId>, fabric: &FabricConfig) -> Self {
        let depth = ops.len();
        CriticalPathResult {
            method,
            ops,
            depth,
            latency_unit_time: depth as f64 * fabric.unit_time_per_gate,
        }
    }
}

/// Operator ids in dependency order (Kahn's algorithm, ready set ordered by
/// id).
pub fn topological_sort(graph: &CircuitGraph) -> Result<Vec<OpId>, CycleError> {
    Ok(graph
        .topological_positions()?
        .into_iter()
        .map(|pos| graph.operators[pos].id)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Source(usize),
    Op(usize),
}

pub fn approximate_cp(
    graph: &CircuitGraph,
    fabric: &FabricConfig,
) -> Result<CriticalPathResult, CycleError> {
    let deps = Dependencies::new(graph);
    // Arguments have no predecessors and sort ahead of every operator, so
    // the combined order is all sources followed by the operator order.
    let mut order: Vec<Node> = (0..graph.arguments.len()).map(Node::Source).collect();
    order.extend(graph.topological_positions()?.into_iter().map(Node::Op));
    order.pop();
    let ops = order
        .into_iter()
        .filter_map(|node| match node {
            Node::Op(pos) if !deps.is_sink(pos) => Some(graph.operators[pos].id),
            _ => None,
        })
        .collect();
    Ok(CriticalPathResult::new(CpMethod::Approximate, ops, fabric))
}

pub fn paper_exact_cp(
    graph: &CircuitGraph,
    fabric: &FabricConfig,
) -> Result<CriticalPathResult, CycleError> {
    graph.topological_positions()?;
    let deps = Dependencies::new(graph);
    let mut sinks: Vec<usize> = (0..graph.operators.len())
        .filter(|p| deps.is_sink(*p))
        .collect();
    sinks.sort_by_key(|p| graph.operators[*p].id);

    let mut best: Vec<usize> = Vec::new();
    let mut best_len = 0usize;
    for src in 0..graph.arguments.len() {
        let parents = bfs_from_source(&deps, src, graph.operators.len());
        for &sink in &sinks {
            let Some(path) = path_to(&parents, sink) else {
                continue;
            };
            // Node count including the source argument.
            let len = path.len() + 1;
            if len > best_len {
                best_len = len;
                best = path;
            }
        }
    }
    let ops = best.into_iter().map(|p| graph.operators[p].id).collect();
    Ok(CriticalPathResult::new(CpMethod::PaperExact, ops, fabric))
}

/// BFS tree from one argument. Operators fed directly by the argument have
/// no parent.
struct Parents {
    reached: Vec<bool>,
    parent: Vec<Option<usize>>,
}

fn bfs_from_source(deps: &Dependencies, src: usize, n: usize) -> Parents {
    let mut reached = vec![false; n];
    let mut parent = vec![None; n];
    let mut queue = VecDeque::new();
    for &op in &deps.arg_consumers[src] {
        reached[op] = true;
        queue.push_back(op);
    }
    while let Some(u) = queue.pop_front() {
        for &v in &deps.succs[u] {
            if !reached[v] {
                reached[v] = true;
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    Parents { reached, parent }
}

fn path_to(parents: &Parents, sink: usize) -> Option<Vec<usize>> {
    if !parents.reached[sink] {
        return None;
    }
    let mut path = vec![sink];
    let mut cur = sink;
    while let Some(p) = parents.parent[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    Some(path)
}

/// Longest source-to-sink operator chain; ties go to the lexicographically
/// smallest sequence of operator ids.
pub fn longest_path_cp(
    graph: &CircuitGraph,
    fabric: &FabricConfig,
) -> Result<CriticalPathResult, CycleError> {
    let order = graph.topological_positions()?;
    let deps = Dependencies::new(graph);
    let n = graph.operators.len();
    // Ops on the longest chain starting at each operator.
    let mut down = vec![0usize; n];
    for &pos in order.iter().rev() {
        down[pos] = 1 + deps.succs[pos].iter().map(|s| down[*s]).max().unwrap_or(0);
    }
    let id = |p: usize| graph.operators[p].id;
    let Some(mut cur) = (0..n).max_by(|a, b| down[*a].cmp(&down[*b]).then(id(*b).cmp(&id(*a))))
    else {
        return Ok(CriticalPathResult::new(
            CpMethod::LongestPath,
            Vec::new(),
            fabric,
        ));
    };
    let mut ops = vec![id(cur)];
    while down[cur] > 1 {
        cur = *deps.succs[cur]
            .iter()
            .filter(|s| down[**s] == down[cur] - 1)
            .min_by_key(|s| id(**s))
            .expect("a successor continues the chain");
        ops.push(id(cur));
    }
    Ok(CriticalPathResult::new(CpMethod::LongestPath, ops, fabric))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Throughput {
    pub depth: usize,
    pub batch: u64,
    pub latency_unit_time: f64,
    pub outputs_per_batch_window: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ThroughputError {
    #[error("no compute ops on critical path")]
    EmptyPath,
    #[error("batch size must be positive")]
    EmptyBatch,
}

/// Pipelined throughput: the first output appears after `depth` gate
/// times, and a batch window of `batch` yields `batch / depth` outputs.
pub fn throughput(
    depth: usize,
    batch: u64,
    fabric: &FabricConfig,
) -> Result<Throughput, ThroughputError> {
    if depth == 0 {
        return Err(ThroughputError::EmptyPath);
    }
    if batch == 0 {
        return Err(ThroughputError::EmptyBatch);
    }
    Ok(Throughput {
        depth,
        batch,
        latency_unit_time: depth as f64 * fabric.unit_time_per_gate,
        outputs_per_batch_window: batch / depth as u64,
    })
}
