// SPDX-License-Identifier: Apache-2.0

use crate::ir::{CircuitGraph, OpKind};

/// Truth table of a two-input named gate indexed by `b * 2 + a`, where `a`
/// is operand 0. `None` for anything that is not such a gate.
pub fn gate_truth_table(kind: &OpKind) -> Option<u64> {
    let f: fn(bool, bool) -> bool = match kind {
        OpKind::And => |a, b| a & b,
        OpKind::Nand => |a, b| !(a & b),
        OpKind::Nor => |a, b| !(a | b),
        OpKind::Or => |a, b| a | b,
        OpKind::Xor => |a, b| a ^ b,
        OpKind::XNor => |a, b| !(a ^ b),
        _ => return None,
    };
    Some((0..4u64).fold(0, |mask, idx| {
        mask | ((f(idx & 1 == 1, idx & 2 == 2) as u64) << idx)
    }))
}

/// Rewrites every named Boolean gate into a single `lut_lincomb`.
///
/// Two-input gates become `coeffs = [1, 2]` over the gate's truth table;
/// NOT becomes `coeffs = [1], lut = 0b01`. Operator ids, results and
/// sections are kept, so consumers and returns are untouched.
pub fn lower_gates(graph: &CircuitGraph) -> CircuitGraph {
    let mut out = graph.clone();
    for op in &mut out.operators {
        if let Some(lut) = gate_truth_table(&op.kind) {
            op.kind = OpKind::LutLinComb {
                coeffs: vec![1, 2],
                lut,
            };
        } else if op.kind == OpKind::Not {
            op.kind = OpKind::LutLinComb {
                coeffs: vec![1],
                lut: 0b01,
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_bits;
    use crate::ir::{validate, GraphBuilder, ValueType};

    #[test]
    fn truth_tables() {
        assert_eq!(gate_truth_table(&OpKind::And), Some(0b1000));
        assert_eq!(gate_truth_table(&OpKind::Nand), Some(0b0111));
        assert_eq!(gate_truth_table(&OpKind::Nor), Some(0b0001));
        assert_eq!(gate_truth_table(&OpKind::Or), Some(0b1110));
        assert_eq!(gate_truth_table(&OpKind::Xor), Some(0b0110));
        assert_eq!(gate_truth_table(&OpKind::XNor), Some(0b1001));
        assert_eq!(gate_truth_table(&OpKind::Not), None);
    }

    #[test]
    fn lowering_preserves_gate_semantics() {
        for kind in [
            OpKind::And,
            OpKind::Nand,
            OpKind::Nor,
            OpKind::Or,
            OpKind::Xor,
            OpKind::XNor,
        ] {
            let mut b = GraphBuilder::new("g");
            let x = b.arg("a", ValueType::LweCiphertext);
            let y = b.arg("b", ValueType::LweCiphertext);
            let r = b.op(kind.clone(), &[x, y]);
            b.ret(&[r]);
            let g = b.finish();
            let lowered = lower_gates(&g);
            assert!(validate(&lowered).is_empty());
            assert!(matches!(
                lowered.operators[0].kind,
                OpKind::LutLinComb { .. }
            ));
            for idx in 0..4 {
                let bits = [idx & 1 == 1, idx & 2 == 2];
                assert_eq!(
                    evaluate_bits(&g, &bits).unwrap(),
                    evaluate_bits(&lowered, &bits).unwrap(),
                    "{kind:?} {bits:?}"
                );
            }
        }
    }

    #[test]
    fn lut_ops_pass_through_and_lowering_is_idempotent() {
        let mut b = GraphBuilder::new("g");
        let x = b.arg("a", ValueType::LweCiphertext);
        let y = b.arg("b", ValueType::LweCiphertext);
        let z = b.arg("c", ValueType::LweCiphertext);
        let l = b.op(OpKind::Lut3 { lut: 0x96 }, &[x, y, z]);
        let n = b.op(OpKind::Not, &[l]);
        let p = b.op(OpKind::Packed, &[n]);
        b.ret(&[p]);
        let g = b.finish();
        let once = lower_gates(&g);
        assert_eq!(once.operators[0].kind, g.operators[0].kind);
        assert_eq!(
            once.operators[1].kind,
            OpKind::LutLinComb {
                coeffs: vec![1],
                lut: 1
            }
        );
        assert_eq!(once.operators[2].kind, OpKind::Packed);
        assert_eq!(lower_gates(&once), once);
    }
}
