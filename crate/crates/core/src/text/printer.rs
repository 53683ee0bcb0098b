// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use crate::ir::{CircuitGraph, OpKind, Operator, ValueType};

fn join_types(types: impl Iterator<Item = ValueType>) -> String {
    types.map(|t| t.mnemonic()).collect::<Vec<_>>().join(", ")
}

fn int_list<T: ToString>(items: &[T]) -> String {
    let parts: Vec<_> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn attributes(op: &Operator) -> Vec<(&'static str, String)> {
    let mut attrs = match &op.kind {
        OpKind::Lut2 { lut } | OpKind::Lut3 { lut } => vec![("lut", lut.to_string())],
        OpKind::LutLinComb { coeffs, lut } => {
            vec![("coeffs", int_list(coeffs)), ("lut", lut.to_string())]
        }
        OpKind::MultiLutLinComb { coeffs, luts } => {
            vec![("coeffs", int_list(coeffs)), ("luts", int_list(luts))]
        }
        OpKind::Rotate { offset } => vec![("offset", offset.to_string())],
        OpKind::Extract { index } => vec![("index", index.to_string())],
        _ => Vec::new(),
    };
    if let Some(section) = op.section {
        attrs.push(("section", section.to_string()));
    }
    attrs.sort_by_key(|(k, _)| *k);
    attrs
}

/// Canonical text of `graph`: one statement per line, two-space indent,
/// attributes sorted by name, LF line endings.
pub fn print(graph: &CircuitGraph) -> String {
    let name = |v| graph.value_name(v);
    let ty = |v| graph.value_type(v).unwrap_or(ValueType::LweCiphertext);
    let mut out = String::new();

    let args: Vec<_> = graph
        .arguments
        .iter()
        .map(|&a| format!("{}: {}", name(a), ty(a)))
        .collect();
    let ret_types = join_types(graph.returns.iter().map(|&v| ty(v)));
    let arrow = if ret_types.is_empty() {
        "->".to_string()
    } else {
        format!("-> {ret_types}")
    };
    let _ = writeln!(
        out,
        "func @{}({}) {} {{",
        graph.name,
        args.join(", "),
        arrow
    );

    for op in &graph.operators {
        let results: Vec<_> = op.results.iter().map(|&r| name(r)).collect();
        let operands: Vec<_> = op.operands.iter().map(|&v| name(v)).collect();
        let result_ty = op
            .results
            .first()
            .map(|&r| ty(r))
            .unwrap_or_else(|| op.kind.result_type());
        let _ = write!(
            out,
            "  {} = {}",
            results.join(", "),
            op.kind.tag().op_name()
        );
        if !operands.is_empty() {
            let _ = write!(out, " {}", operands.join(", "));
        }
        let attrs = attributes(op);
        if !attrs.is_empty() {
            let body: Vec<_> = attrs.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            let _ = write!(out, " {{{}}}", body.join(", "));
        }
        let _ = writeln!(out, " : {result_ty}");
    }

    let rets: Vec<_> = graph.returns.iter().map(|&v| name(v)).collect();
    if rets.is_empty() {
        out.push_str("  return :\n");
    } else {
        let _ = writeln!(out, "  return {} : {}", rets.join(", "), ret_types);
    }
    out.push_str("}\n");
    out
}
