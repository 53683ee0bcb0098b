// SPDX-License-Identifier: Apache-2.0

//! Seeded random circuit generators and independent oracles shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fabric_est::ir::{CircuitGraph, GraphBuilder, OpId, OpKind, ValueId, ValueType};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const GATES: [OpKind; 6] = [
    OpKind::And,
    OpKind::Nand,
    OpKind::Nor,
    OpKind::Or,
    OpKind::Xor,
    OpKind::XNor,
];

/// Returns every value that no operator consumes, plus a few random extras.
fn pick_returns(
    rng: &mut ChaCha8Rng,
    b: &mut GraphBuilder,
    pool: &[ValueId],
    consumed: &BTreeSet<ValueId>,
    first_result: usize,
) {
    let mut rets: Vec<ValueId> = pool[first_result..]
        .iter()
        .filter(|v| !consumed.contains(v))
        .copied()
        .collect();
    for _ in 0..rng.gen_range(0..=2) {
        rets.push(*pool.choose(rng).expect("pool has arguments"));
    }
    if rets.is_empty() {
        rets.push(*pool.last().expect("pool has arguments"));
    }
    b.ret(&rets);
}

/// Random Boolean circuit. With `evaluable` every `lut_lincomb` uses
/// distinct power-of-two coefficients so its index always lands in the
/// table; otherwise coefficients are arbitrary small integers.
pub fn random_boolean(rng: &mut ChaCha8Rng, max_ops: usize, evaluable: bool) -> CircuitGraph {
    let mut b = GraphBuilder::new("rand_bool");
    let n_args = rng.gen_range(1..=4);
    let mut pool: Vec<ValueId> = (0..n_args)
        .map(|i| b.arg(&format!("in{i}"), ValueType::LweCiphertext))
        .collect();
    let mut consumed = BTreeSet::new();
    let n_ops = rng.gen_range(0..=max_ops);
    for _ in 0..n_ops {
        let kind = random_boolean_kind(rng, evaluable);
        let operands: Vec<ValueId> = (0..kind.arity())
            .map(|_| *pool.choose(rng).expect("non-empty"))
            .collect();
        consumed.extend(operands.iter().copied());
        let results = b.op_multi(kind, &operands);
        pool.extend(results);
    }
    pick_returns(rng, &mut b, &pool, &consumed, n_args);
    b.finish()
}

fn coeffs(rng: &mut ChaCha8Rng, k: usize, evaluable: bool) -> Vec<i64> {
    if evaluable {
        let mut c: Vec<i64> = (0..k).map(|i| 1 << i).collect();
        c.shuffle(rng);
        c
    } else {
        (0..k).map(|_| rng.gen_range(-4..=4)).collect()
    }
}

fn random_boolean_kind(rng: &mut ChaCha8Rng, evaluable: bool) -> OpKind {
    match rng.gen_range(0..12) {
        0..=5 => GATES[rng.gen_range(0..6)].clone(),
        6 => OpKind::Not,
        7 => OpKind::Packed,
        8 => OpKind::Lut2 {
            lut: rng.gen_range(0..16),
        },
        9 => OpKind::Lut3 {
            lut: rng.gen_range(0..256),
        },
        10 => {
            let k = rng.gen_range(1..=3);
            OpKind::LutLinComb {
                coeffs: coeffs(rng, k, evaluable),
                lut: rng.gen_range(0..1u64 << (1 << k)),
            }
        }
        _ => {
            let k = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=3);
            OpKind::MultiLutLinComb {
                coeffs: coeffs(rng, k, evaluable),
                luts: (0..n).map(|_| rng.gen_range(0..1u64 << (1 << k))).collect(),
            }
        }
    }
}

/// Random circuit of named gates and NOT only.
pub fn random_gate_circuit(rng: &mut ChaCha8Rng, max_ops: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new("rand_gates");
    let n_args = rng.gen_range(1..=4);
    let mut pool: Vec<ValueId> = (0..n_args)
        .map(|i| b.arg(&format!("in{i}"), ValueType::LweCiphertext))
        .collect();
    let mut consumed = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=max_ops) {
        let kind = if rng.gen_bool(0.2) {
            OpKind::Not
        } else {
            GATES[rng.gen_range(0..6)].clone()
        };
        let operands: Vec<ValueId> = (0..kind.arity())
            .map(|_| *pool.choose(rng).expect("non-empty"))
            .collect();
        consumed.extend(operands.iter().copied());
        pool.push(b.op(kind, &operands));
    }
    pick_returns(rng, &mut b, &pool, &consumed, n_args);
    b.finish()
}

/// Random CKKS circuit over ciphertext and (optionally) plaintext inputs.
pub fn random_ckks(rng: &mut ChaCha8Rng, max_ops: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new("rand_ckks");
    let n_ct = rng.gen_range(1..=3);
    let n_pt = rng.gen_range(0..=2);
    let mut cts: Vec<ValueId> = (0..n_ct)
        .map(|i| b.arg(&format!("c{i}"), ValueType::CkksCiphertext))
        .collect();
    let pts: Vec<ValueId> = (0..n_pt)
        .map(|i| b.arg(&format!("p{i}"), ValueType::CkksPlaintext))
        .collect();
    let mut consumed = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=max_ops) {
        let choice = rng.gen_range(0..9);
        let (kind, operands) = match choice {
            0..=2 => {
                let kind = [OpKind::Add, OpKind::Sub, OpKind::Mul][choice].clone();
                (
                    kind,
                    vec![*cts.choose(rng).unwrap(), *cts.choose(rng).unwrap()],
                )
            }
            3 if !pts.is_empty() => {
                let kind = [OpKind::AddPlain, OpKind::SubPlain, OpKind::MulPlain]
                    [rng.gen_range(0..3)]
                .clone();
                (
                    kind,
                    vec![*cts.choose(rng).unwrap(), *pts.choose(rng).unwrap()],
                )
            }
            4 => (
                OpKind::Rotate {
                    offset: rng.gen_range(-9..=9),
                },
                vec![*cts.choose(rng).unwrap()],
            ),
            5 => (
                OpKind::Extract {
                    index: rng.gen_range(0..8),
                },
                vec![*cts.choose(rng).unwrap()],
            ),
            _ => {
                let kind = [OpKind::Negate, OpKind::Relinearize, OpKind::Rescale]
                    [rng.gen_range(0..3)]
                .clone();
                (kind, vec![*cts.choose(rng).unwrap()])
            }
        };
        consumed.extend(operands.iter().copied());
        cts.push(b.op(kind, &operands));
    }
    pick_returns(rng, &mut b, &cts, &consumed, n_ct);
    b.finish()
}

/// Operator-to-operator consumer edges by position, computed from scratch.
pub fn consumers(graph: &CircuitGraph) -> Vec<Vec<usize>> {
    let mut producer: HashMap<ValueId, usize> = HashMap::new();
    for (pos, op) in graph.operators.iter().enumerate() {
        for r in &op.results {
            producer.insert(*r, pos);
        }
    }
    let mut out: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); graph.operators.len()];
    for (pos, op) in graph.operators.iter().enumerate() {
        for v in &op.operands {
            if let Some(&p) = producer.get(v) {
                out[p].insert(pos);
            }
        }
    }
    out.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Enumerates every operator path and keeps the longest, breaking ties by
/// the lexicographically smallest id sequence.
pub fn brute_force_longest_path(graph: &CircuitGraph) -> Vec<OpId> {
    let succ = consumers(graph);
    let ids: Vec<OpId> = graph.operators.iter().map(|op| op.id).collect();
    let mut best: Vec<OpId> = Vec::new();
    fn walk(
        pos: usize,
        succ: &[Vec<usize>],
        ids: &[OpId],
        path: &mut Vec<OpId>,
        best: &mut Vec<OpId>,
    ) {
        path.push(ids[pos]);
        if path.len() > best.len() || (path.len() == best.len() && *path < *best) {
            *best = path.clone();
        }
        for &s in &succ[pos] {
            walk(s, succ, ids, path, best);
        }
        path.pop();
    }
    let mut path = Vec::new();
    for pos in 0..graph.operators.len() {
        walk(pos, &succ, &ids, &mut path, &mut best);
    }
    best
}

/// Operator positions in a dependency-respecting order (DFS post-order).
pub fn any_topological_order(graph: &CircuitGraph) -> Vec<usize> {
    let succ = consumers(graph);
    let n = graph.operators.len();
    let mut seen = vec![false; n];
    let mut post = Vec::with_capacity(n);
    fn dfs(u: usize, succ: &[Vec<usize>], seen: &mut [bool], post: &mut Vec<usize>) {
        seen[u] = true;
        for &v in &succ[u] {
            if !seen[v] {
                dfs(v, succ, seen, post);
            }
        }
        post.push(u);
    }
    for u in 0..n {
        if !seen[u] {
            dfs(u, &succ, &mut seen, &mut post);
        }
    }
    post.reverse();
    post
}

/// Sum of per-tag FCs from a plain walk of the operator list.
pub fn oracle_fcs(
    graph: &CircuitGraph,
    per_op: impl Fn(&OpKind) -> u64,
) -> (u64, BTreeMap<String, u64>) {
    let mut per_kind = BTreeMap::new();
    let mut total = 0;
    for op in &graph.operators {
        let c = per_op(&op.kind);
        total += c;
        *per_kind.entry(op.kind.tag().to_string()).or_insert(0) += c;
    }
    (total, per_kind)
}

pub fn to_bits(v: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| v >> i & 1 == 1).collect()
}

pub fn from_bits(bits: &[bool]) -> u64 {
    bits.iter().enumerate().map(|(i, b)| (*b as u64) << i).sum()
}
