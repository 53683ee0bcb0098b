// SPDX-License-Identifier: Apache-2.0

//! Plaintext reference semantics.
//!
//! Boolean circuits run on bits and CKKS circuits on real vectors; no
//! encryption is involved. Transforms and fixtures are checked against this
//! evaluator.

use std::collections::BTreeMap;

use crate::ir::{CircuitGraph, OpKind, ValueId, ValueType};

#[derive(Debug, Clone, PartialEq)]
pub enum PlainValue {
    Bit(bool),
    Vector(Vec<f64>),
}

impl PlainValue {
    pub fn as_bit(&self) -> Option<bool> {
        match self {
            PlainValue::Bit(b) => Some(*b),
            PlainValue::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            PlainValue::Vector(v) => Some(v),
            PlainValue::Bit(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("missing input for argument {0}")]
    MissingInput(String),
    #[error("input given for {0}, which is not an argument")]
    ExtraInput(String),
    #[error("expected {expected} argument values, got {found}")]
    ArgumentCount { expected: usize, found: usize },
    #[error("input for {value} does not match its type {ty}")]
    InputType { value: String, ty: ValueType },
    #[error("vector inputs must all have the same length")]
    LengthMismatch,
    #[error("linear combination index {index} outside LUT range [0, {size}) at operator {op}")]
    LutIndexOutOfRange { op: String, index: i64, size: u64 },
    #[error("extract index {index} outside vector of {len} slots")]
    ExtractOutOfRange { index: u64, len: usize },
    #[error("graph is not valid: {0}")]
    InvalidGraph(String),
}

pub type Valuation = BTreeMap<ValueId, PlainValue>;

/// Evaluates every value of `graph` given one input per argument.
pub fn evaluate(
    graph: &CircuitGraph,
    inputs: &BTreeMap<ValueId, PlainValue>,
) -> Result<Valuation, EvalError> {
    for v in inputs.keys() {
        if !graph.arguments.contains(v) {
            return Err(EvalError::ExtraInput(graph.value_name(*v)));
        }
    }
    let mut env: Valuation = BTreeMap::new();
    let mut slots: Option<usize> = None;
    for &arg in &graph.arguments {
        let value = inputs
            .get(&arg)
            .ok_or_else(|| EvalError::MissingInput(graph.value_name(arg)))?;
        let ty = graph
            .value_type(arg)
            .ok_or_else(|| EvalError::InvalidGraph(format!("unknown argument {}", arg.0)))?;
        match (ty, value) {
            (ValueType::LweCiphertext, PlainValue::Bit(_)) => {}
            (ValueType::CkksCiphertext | ValueType::CkksPlaintext, PlainValue::Vector(v)) => {
                if *slots.get_or_insert(v.len()) != v.len() {
                    return Err(EvalError::LengthMismatch);
                }
            }
            _ => {
                return Err(EvalError::InputType {
                    value: graph.value_name(arg),
                    ty,
                })
            }
        }
        env.insert(arg, value.clone());
    }

    let order = graph
        .topological_positions()
        .map_err(|e| EvalError::InvalidGraph(e.to_string()))?;
    for pos in order {
        let op = &graph.operators[pos];
        let args = op
            .operands
            .iter()
            .map(|v| {
                env.get(v).ok_or_else(|| {
                    EvalError::InvalidGraph(format!("use-before-def {}", graph.value_name(*v)))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = apply(&op.kind, &args).map_err(|e| match e {
            ApplyError::Index(index, size) => EvalError::LutIndexOutOfRange {
                op: format!("{} ({})", op.id, op.kind.tag().op_name()),
                index,
                size,
            },
            ApplyError::Extract(index, len) => EvalError::ExtractOutOfRange { index, len },
            ApplyError::Shape => EvalError::InvalidGraph(format!(
                "operand shapes do not fit {} at operator {}",
                op.kind.tag().op_name(),
                op.id
            )),
        })?;
        if outputs.len() != op.results.len() {
            return Err(EvalError::InvalidGraph(format!(
                "operator {} has {} results, kind produces {}",
                op.id,
                op.results.len(),
                outputs.len()
            )));
        }
        for (r, value) in op.results.iter().zip(outputs) {
            env.insert(*r, value);
        }
    }
    Ok(env)
}

/// Evaluates with positional argument values and returns the returned values
/// in order.
pub fn evaluate_returns(
    graph: &CircuitGraph,
    args: &[PlainValue],
) -> Result<Vec<PlainValue>, EvalError> {
    if args.len() != graph.arguments.len() {
        return Err(EvalError::ArgumentCount {
            expected: graph.arguments.len(),
            found: args.len(),
        });
    }
    let inputs = graph
        .arguments
        .iter()
        .copied()
        .zip(args.iter().cloned())
        .collect();
    let env = evaluate(graph, &inputs)?;
    graph
        .returns
        .iter()
        .map(|v| {
            env.get(v).cloned().ok_or_else(|| {
                EvalError::InvalidGraph(format!("use-before-def {}", graph.value_name(*v)))
            })
        })
        .collect()
}

/// Bit-level convenience wrapper over [`evaluate_returns`].
pub fn evaluate_bits(graph: &CircuitGraph, args: &[bool]) -> Result<Vec<bool>, EvalError> {
    let args: Vec<_> = args.iter().map(|b| PlainValue::Bit(*b)).collect();
    evaluate_returns(graph, &args)?
        .into_iter()
        .map(|v| {
            v.as_bit()
                .ok_or_else(|| EvalError::InvalidGraph("returned value is not a bit".into()))
        })
        .collect()
}

enum ApplyError {
    Index(i64, u64),
    Extract(u64, usize),
    Shape,
}

fn lut_bit(mask: u64, index: u64) -> bool {
    index < 64 && (mask >> index) & 1 == 1
}

fn lincomb_index(coeffs: &[i64], bits: &[bool]) -> Result<u64, ApplyError> {
    let size = 1u64 << coeffs.len().min(63);
    let index: i64 = coeffs
        .iter()
        .zip(bits)
        .map(|(c, b)| if *b { *c } else { 0 })
        .sum();
    if index < 0 || index as u64 >= size {
        Err(ApplyError::Index(index, size))
    } else {
        Ok(index as u64)
    }
}

fn apply(kind: &OpKind, args: &[&PlainValue]) -> Result<Vec<PlainValue>, ApplyError> {
    if kind.dialect() == crate::ir::Dialect::Boolean {
        let bits = args
            .iter()
            .map(|v| v.as_bit().ok_or(ApplyError::Shape))
            .collect::<Result<Vec<_>, _>>()?;
        let bit = |i: usize| bits.get(i).copied().ok_or(ApplyError::Shape);
        let packed_index = || {
            bits.iter()
                .enumerate()
                .fold(0u64, |acc, (i, b)| acc | ((*b as u64) << i))
        };
        let out = match kind {
            OpKind::And => bit(0)? & bit(1)?,
            OpKind::Nand => !(bit(0)? & bit(1)?),
            OpKind::Nor => !(bit(0)? | bit(1)?),
            OpKind::Or => bit(0)? | bit(1)?,
            OpKind::Xor => bit(0)? ^ bit(1)?,
            OpKind::XNor => !(bit(0)? ^ bit(1)?),
            OpKind::Not => !bit(0)?,
            OpKind::Packed => bit(0)?,
            OpKind::Lut2 { lut } | OpKind::Lut3 { lut } => lut_bit(*lut, packed_index()),
            OpKind::LutLinComb { coeffs, lut } => lut_bit(*lut, lincomb_index(coeffs, &bits)?),
            OpKind::MultiLutLinComb { coeffs, luts } => {
                let index = lincomb_index(coeffs, &bits)?;
                return Ok(luts
                    .iter()
                    .map(|lut| PlainValue::Bit(lut_bit(*lut, index)))
                    .collect());
            }
            _ => unreachable!("boolean dialect covers every boolean kind"),
        };
        return Ok(vec![PlainValue::Bit(out)]);
    }

    let vecs = args
        .iter()
        .map(|v| v.as_vector().ok_or(ApplyError::Shape))
        .collect::<Result<Vec<_>, _>>()?;
    let vec = |i: usize| vecs.get(i).copied().ok_or(ApplyError::Shape);
    let zip = |f: fn(f64, f64) -> f64| -> Result<Vec<f64>, ApplyError> {
        let (a, b) = (vec(0)?, vec(1)?);
        if a.len() != b.len() {
            return Err(ApplyError::Shape);
        }
        Ok(a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
    };
    let out = match kind {
        OpKind::Add | OpKind::AddPlain => zip(|x, y| x + y)?,
        OpKind::Sub | OpKind::SubPlain => zip(|x, y| x - y)?,
        OpKind::Mul | OpKind::MulPlain => zip(|x, y| x * y)?,
        OpKind::Rotate { offset } => {
            let v = vec(0)?;
            if v.is_empty() {
                Vec::new()
            } else {
                let shift = offset.rem_euclid(v.len() as i64) as usize;
                let mut out = v.to_vec();
                out.rotate_left(shift);
                out
            }
        }
        OpKind::Extract { index } => {
            let v = vec(0)?;
            let slot = *v
                .get(*index as usize)
                .ok_or(ApplyError::Extract(*index, v.len()))?;
            vec![slot; v.len()]
        }
        OpKind::Negate => vec(0)?.iter().map(|x| -x).collect(),
        OpKind::Relinearize | OpKind::Rescale => vec(0)?.to_vec(),
        _ => unreachable!("ckks dialect covers every ckks kind"),
    };
    Ok(vec![PlainValue::Vector(out)])
}
