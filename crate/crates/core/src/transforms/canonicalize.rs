// SPDX-License-Identifier: Apache-2.0

use std::collections::{HashMap, HashSet};

use super::lower::gate_truth_table;
use crate::ir::{CircuitGraph, OpKind, ValueId};

/// Runs dead-op elimination, double-negation folding and two-gate LUT
/// fusion until none of them changes the graph.
///
/// Fusion merges a two-input named gate with the single-use named gate that
/// feeds it into one `lut2`/`lut3` whose mask is the composite truth table.
/// Operand order of the fused LUT is the inner gate's operands followed by
/// the outer gate's other operand, duplicates removed.
pub fn canonicalize(graph: &CircuitGraph) -> CircuitGraph {
    let mut g = graph.clone();
    loop {
        let mut changed = eliminate_dead_ops(&mut g);
        changed |= fold_double_negation(&mut g);
        changed |= fuse_gates(&mut g);
        if !changed {
            return g;
        }
    }
}

fn eliminate_dead_ops(g: &mut CircuitGraph) -> bool {
    let Ok(order) = g.topological_positions() else {
        return false;
    };
    let mut live: HashSet<ValueId> = g.returns.iter().copied().collect();
    let mut keep = vec![false; g.operators.len()];
    for &pos in order.iter().rev() {
        let op = &g.operators[pos];
        if op.results.iter().any(|r| live.contains(r)) {
            keep[pos] = true;
            live.extend(op.operands.iter().copied());
        }
    }
    let before = g.operators.len();
    let mut it = keep.into_iter();
    g.operators.retain(|_| it.next().unwrap_or(false));
    g.operators.len() != before
}

fn producers(g: &CircuitGraph) -> HashMap<ValueId, usize> {
    let mut map = HashMap::new();
    for (pos, op) in g.operators.iter().enumerate() {
        for &r in &op.results {
            map.insert(r, pos);
        }
    }
    map
}

fn replace_uses(g: &mut CircuitGraph, from: ValueId, to: ValueId) -> bool {
    let mut changed = false;
    let slots = g
        .operators
        .iter_mut()
        .flat_map(|op| op.operands.iter_mut())
        .chain(g.returns.iter_mut());
    for slot in slots {
        if *slot == from {
            *slot = to;
            changed = true;
        }
    }
    changed
}

fn fold_double_negation(g: &mut CircuitGraph) -> bool {
    let Ok(order) = g.topological_positions() else {
        return false;
    };
    let mut changed = false;
    for pos in order {
        if g.operators[pos].kind != OpKind::Not {
            continue;
        }
        let producer = producers(g);
        let outer = &g.operators[pos];
        let Some(&inner_pos) = outer.operands.first().and_then(|v| producer.get(v)) else {
            continue;
        };
        let inner = &g.operators[inner_pos];
        if inner.kind != OpKind::Not {
            continue;
        }
        let (from, to) = (outer.results[0], inner.operands[0]);
        changed |= replace_uses(g, from, to);
    }
    changed
}

fn use_counts(g: &CircuitGraph) -> HashMap<ValueId, usize> {
    let mut uses = HashMap::new();
    for v in g
        .operators
        .iter()
        .flat_map(|op| &op.operands)
        .chain(&g.returns)
    {
        *uses.entry(*v).or_insert(0) += 1;
    }
    uses
}

fn fuse_gates(g: &mut CircuitGraph) -> bool {
    let Ok(order) = g.topological_positions() else {
        return false;
    };
    let mut removed = vec![false; g.operators.len()];
    let mut changed = false;
    for pos in order {
        let Some(outer_table) = gate_truth_table(&g.operators[pos].kind) else {
            continue;
        };
        let uses = use_counts(g);
        let producer = producers(g);
        let candidate = (0..2).find_map(|k| {
            let v = g.operators[pos].operands[k];
            let &inner_pos = producer.get(&v)?;
            if removed[inner_pos] || uses.get(&v) != Some(&1) {
                return None;
            }
            let inner_table = gate_truth_table(&g.operators[inner_pos].kind)?;
            Some((k, inner_pos, inner_table))
        });
        let Some((k, inner_pos, inner_table)) = candidate else {
            continue;
        };

        let inner_operands = g.operators[inner_pos].operands.clone();
        let other = g.operators[pos].operands[1 - k];
        let mut inputs: Vec<ValueId> = Vec::with_capacity(3);
        for v in inner_operands.iter().copied().chain([other]) {
            if !inputs.contains(&v) {
                inputs.push(v);
            }
        }
        let width = inputs.len().max(2);
        let mut mask = 0u64;
        for idx in 0..(1u64 << width) {
            let value = |v: ValueId| {
                let j = inputs.iter().position(|x| *x == v).expect("input listed");
                (idx >> j) & 1
            };
            let inner_idx = value(inner_operands[0]) | (value(inner_operands[1]) << 1);
            let inner_out = (inner_table >> inner_idx) & 1;
            let outer_idx = if k == 0 {
                inner_out | (value(other) << 1)
            } else {
                value(other) | (inner_out << 1)
            };
            mask |= ((outer_table >> outer_idx) & 1) << idx;
        }
        while inputs.len() < 2 {
            inputs.push(*inputs.last().expect("gates have operands"));
        }
        let op = &mut g.operators[pos];
        op.kind = if width == 2 {
            OpKind::Lut2 { lut: mask }
        } else {
            OpKind::Lut3 { lut: mask }
        };
        op.operands = inputs;
        g.operators[inner_pos].operands.clear();
        removed[inner_pos] = true;
        changed = true;
    }
    let mut it = removed.into_iter();
    g.operators.retain(|_| !it.next().unwrap_or(false));
    changed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_bits;
    use crate::ir::{validate, GraphBuilder, ValueType};
    use crate::text::print;

    fn args(b: &mut GraphBuilder, n: usize) -> Vec<ValueId> {
        (0..n)
            .map(|i| b.arg(&format!("x{i}"), ValueType::LweCiphertext))
            .collect()
    }

    fn assert_equivalent(a: &CircuitGraph, b: &CircuitGraph) {
        let n = a.arguments.len();
        for combo in 0..(1u32 << n) {
            let bits: Vec<bool> = (0..n).map(|i| combo >> i & 1 == 1).collect();
            assert_eq!(
                evaluate_bits(a, &bits).unwrap(),
                evaluate_bits(b, &bits).unwrap()
            );
        }
    }

    #[test]
    fn xor_of_and_fuses_into_lut3() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 3);
        let t = b.op(OpKind::And, &[x[0], x[1]]);
        let r = b.op(OpKind::Xor, &[t, x[2]]);
        b.ret(&[r]);
        let g = b.finish();
        let c = canonicalize(&g);
        assert_eq!(c.operators.len(), 1);
        // (a & b) ^ c over idx = a + 2b + 4c is 1 at 3, 4, 5, 6.
        assert_eq!(c.operators[0].kind, OpKind::Lut3 { lut: 0b0111_1000 });
        assert_eq!(c.operators[0].operands, vec![x[0], x[1], x[2]]);
        assert!(validate(&c).is_empty());
        assert_equivalent(&g, &c);
    }

    #[test]
    fn fusion_with_shared_input_gives_lut2() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 2);
        let t = b.op(OpKind::Or, &[x[0], x[1]]);
        let r = b.op(OpKind::Nand, &[x[1], t]);
        b.ret(&[r]);
        let g = b.finish();
        let c = canonicalize(&g);
        assert_eq!(c.operators.len(), 1);
        assert!(matches!(c.operators[0].kind, OpKind::Lut2 { .. }));
        assert_equivalent(&g, &c);
    }

    #[test]
    fn degenerate_single_input_fusion() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 1);
        let t = b.op(OpKind::And, &[x[0], x[0]]);
        let r = b.op(OpKind::Xor, &[t, x[0]]);
        b.ret(&[r]);
        let g = b.finish();
        let c = canonicalize(&g);
        assert_eq!(c.operators.len(), 1);
        assert_eq!(c.operators[0].operands, vec![x[0], x[0]]);
        assert_equivalent(&g, &c);
    }

    #[test]
    fn multi_use_inner_gate_is_not_fused() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 3);
        let t = b.op(OpKind::And, &[x[0], x[1]]);
        let r = b.op(OpKind::Xor, &[t, x[2]]);
        b.ret(&[r, t]);
        let g = b.finish();
        assert_eq!(canonicalize(&g), g);
    }

    #[test]
    fn double_negation_returns_argument() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 1);
        let n1 = b.op(OpKind::Not, &[x[0]]);
        let n2 = b.op(OpKind::Not, &[n1]);
        b.ret(&[n2]);
        let c = canonicalize(&b.finish());
        assert!(c.operators.is_empty());
        assert_eq!(c.returns, vec![x[0]]);
    }

    #[test]
    fn dead_ops_are_removed() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 2);
        let _unused = b.op(OpKind::And, &[x[0], x[1]]);
        let r = b.op(OpKind::Not, &[x[0]]);
        b.ret(&[r]);
        let c = canonicalize(&b.finish());
        assert_eq!(c.operators.len(), 1);
        assert_eq!(c.operators[0].kind, OpKind::Not);
    }

    #[test]
    fn chains_fuse_pairwise_and_result_is_a_fixed_point() {
        let mut b = GraphBuilder::new("f");
        let x = args(&mut b, 4);
        let mut v = x[0];
        for (i, kind) in [OpKind::And, OpKind::Or, OpKind::Xor, OpKind::Nor]
            .into_iter()
            .enumerate()
        {
            v = b.op(kind, &[v, x[(i + 1) % 4]]);
        }
        let n = b.op(OpKind::Not, &[v]);
        let nn = b.op(OpKind::Not, &[n]);
        b.ret(&[nn]);
        let g = b.finish();
        let c = canonicalize(&g);
        assert!(c.operators.len() < g.operators.len());
        assert_equivalent(&g, &c);
        assert_eq!(print(&canonicalize(&c)), print(&c));
    }
}
