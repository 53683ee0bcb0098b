// SPDX-License-Identifier: Apache-2.0

//! SSA circuit graph shared by every pass and analysis.
//!
//! A [`CircuitGraph`] is a single function: typed arguments, an ordered list
//! of operators and an ordered list of returned values. Values are addressed
//! by [`ValueId`], an index into the graph's value table, and operators carry
//! a stable [`OpId`] that survives reordering and rewriting.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};

/// Widest LUT a linear-combination op may address: a 2^6-entry table fills
/// a `u64` mask.
pub const MAX_LINCOMB_ARITY: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId(pub u32);

impl ValueId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct OpId(pub u32);

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    LweCiphertext,
    CkksCiphertext,
    CkksPlaintext,
}

impl ValueType {
    pub fn mnemonic(self) -> &'static str {
        match self {
            ValueType::LweCiphertext => "!lwe",
            ValueType::CkksCiphertext => "!ct",
            ValueType::CkksPlaintext => "!pt",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        match s {
            "!lwe" => Some(ValueType::LweCiphertext),
            "!ct" => Some(ValueType::CkksCiphertext),
            "!pt" => Some(ValueType::CkksPlaintext),
            _ => None,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dialect {
    Boolean,
    Ckks,
}

impl Dialect {
    pub fn prefix(self) -> &'static str {
        match self {
            Dialect::Boolean => "scifr_bool",
            Dialect::Ckks => "scifr_ckks",
        }
    }
}

macro_rules! op_tags {
    ($($tag:ident => $dialect:ident, $mnemonic:literal, $label:literal;)*) => {
        /// Attribute-free operator kind; the key of the cost table.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum OpTag {
            $($tag,)*
        }

        impl OpTag {
            pub const ALL: &'static [OpTag] = &[$(OpTag::$tag,)*];
            pub const COUNT: usize = Self::ALL.len();

            pub fn dialect(self) -> Dialect {
                match self {
                    $(OpTag::$tag => Dialect::$dialect,)*
                }
            }

            /// Short name used in IR text and config files, e.g. `lut_lincomb`.
            pub fn mnemonic(self) -> &'static str {
                match self {
                    $(OpTag::$tag => $mnemonic,)*
                }
            }

            /// Report label, e.g. `LutLinCombOp`.
            pub fn label(self) -> &'static str {
                match self {
                    $(OpTag::$tag => $label,)*
                }
            }
        }
    };
}

op_tags! {
    And => Boolean, "and", "AndOp";
    Nand => Boolean, "nand", "NandOp";
    Nor => Boolean, "nor", "NorOp";
    Or => Boolean, "or", "OrOp";
    Xor => Boolean, "xor", "XorOp";
    XNor => Boolean, "xnor", "XNorOp";
    Not => Boolean, "not", "NotOp";
    Packed => Boolean, "packed", "PackedOp";
    Lut2 => Boolean, "lut2", "Lut2Op";
    Lut3 => Boolean, "lut3", "Lut3Op";
    LutLinComb => Boolean, "lut_lincomb", "LutLinCombOp";
    MultiLutLinComb => Boolean, "multi_lut_lincomb", "MultiLutLinCombOp";
    Add => Ckks, "add", "AddOp";
    AddPlain => Ckks, "add_plain", "AddPlainOp";
    Sub => Ckks, "sub", "SubOp";
    SubPlain => Ckks, "sub_plain", "SubPlainOp";
    Mul => Ckks, "mul", "MulOp";
    MulPlain => Ckks, "mul_plain", "MulPlainOp";
    Rotate => Ckks, "rotate", "RotateOp";
    Extract => Ckks, "extract", "ExtractOp";
    Negate => Ckks, "negate", "NegateOp";
    Relinearize => Ckks, "relinearize", "RelinearizeOp";
    Rescale => Ckks, "rescale", "RescaleOp";
}

impl OpTag {
    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|t| t.mnemonic() == s)
    }

    /// Fully qualified op name, e.g. `scifr_bool.and`.
    pub fn op_name(self) -> String {
        format!("{}.{}", self.dialect().prefix(), self.mnemonic())
    }

    pub fn from_op_name(s: &str) -> Option<Self> {
        let (prefix, mnemonic) = s.split_once('.')?;
        let tag = Self::from_mnemonic(mnemonic)?;
        (tag.dialect().prefix() == prefix).then_some(tag)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// True for the six two-input named gates.
    pub fn is_binary_gate(self) -> bool {
        matches!(
            self,
            OpTag::And | OpTag::Nand | OpTag::Nor | OpTag::Or | OpTag::Xor | OpTag::XNor
        )
    }
}

impl fmt::Display for OpTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

impl Serialize for OpTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.mnemonic())
    }
}

/// Operator kind together with its attributes.
///
/// LUT masks are little-endian truth tables: bit `i` is the output for input
/// combination `i`, where operand 0 supplies the least significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpKind {
    And,
    Nand,
    Nor,
    Or,
    Xor,
    XNor,
    Not,
    Packed,
    Lut2 { lut: u64 },
    Lut3 { lut: u64 },
    LutLinComb { coeffs: Vec<i64>, lut: u64 },
    MultiLutLinComb { coeffs: Vec<i64>, luts: Vec<u64> },
    Add,
    AddPlain,
    Sub,
    SubPlain,
    Mul,
    MulPlain,
    Rotate { offset: i64 },
    Extract { index: u64 },
    Negate,
    Relinearize,
    Rescale,
}

impl OpKind {
    pub fn tag(&self) -> OpTag {
        match self {
            OpKind::And => OpTag::And,
            OpKind::Nand => OpTag::Nand,
            OpKind::Nor => OpTag::Nor,
            OpKind::Or => OpTag::Or,
            OpKind::Xor => OpTag::Xor,
            OpKind::XNor => OpTag::XNor,
            OpKind::Not => OpTag::Not,
            OpKind::Packed => OpTag::Packed,
            OpKind::Lut2 { .. } => OpTag::Lut2,
            OpKind::Lut3 { .. } => OpTag::Lut3,
            OpKind::LutLinComb { .. } => OpTag::LutLinComb,
            OpKind::MultiLutLinComb { .. } => OpTag::MultiLutLinComb,
            OpKind::Add => OpTag::Add,
            OpKind::AddPlain => OpTag::AddPlain,
            OpKind::Sub => OpTag::Sub,
            OpKind::SubPlain => OpTag::SubPlain,
            OpKind::Mul => OpTag::Mul,
            OpKind::MulPlain => OpTag::MulPlain,
            OpKind::Rotate { .. } => OpTag::Rotate,
            OpKind::Extract { .. } => OpTag::Extract,
            OpKind::Negate => OpTag::Negate,
            OpKind::Relinearize => OpTag::Relinearize,
            OpKind::Rescale => OpTag::Rescale,
        }
    }

    pub fn dialect(&self) -> Dialect {
        self.tag().dialect()
    }

    /// Number of operands this kind requires.
    pub fn arity(&self) -> usize {
        match self {
            OpKind::Not
            | OpKind::Packed
            | OpKind::Negate
            | OpKind::Relinearize
            | OpKind::Rescale
            | OpKind::Rotate { .. }
            | OpKind::Extract { .. } => 1,
            OpKind::Lut3 { .. } => 3,
            OpKind::LutLinComb { coeffs, .. } | OpKind::MultiLutLinComb { coeffs, .. } => {
                coeffs.len()
            }
            _ => 2,
        }
    }

    pub fn result_count(&self) -> usize {
        match self {
            OpKind::MultiLutLinComb { luts, .. } => luts.len(),
            _ => 1,
        }
    }

    /// Expected type of operand `index`.
    pub fn operand_type(&self, index: usize) -> ValueType {
        match self.dialect() {
            Dialect::Boolean => ValueType::LweCiphertext,
            Dialect::Ckks => match self {
                OpKind::AddPlain | OpKind::SubPlain | OpKind::MulPlain if index == 1 => {
                    ValueType::CkksPlaintext
                }
                _ => ValueType::CkksCiphertext,
            },
        }
    }

    pub fn result_type(&self) -> ValueType {
        match self.dialect() {
            Dialect::Boolean => ValueType::LweCiphertext,
            Dialect::Ckks => ValueType::CkksCiphertext,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub id: OpId,
    pub kind: OpKind,
    pub operands: Vec<ValueId>,
    pub results: Vec<ValueId>,
    pub section: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueInfo {
    /// Name without the leading `%`.
    pub name: String,
    pub ty: ValueType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitGraph {
    pub name: String,
    pub values: Vec<ValueInfo>,
    pub arguments: Vec<ValueId>,
    pub operators: Vec<Operator>,
    pub returns: Vec<ValueId>,
}

impl CircuitGraph {
    pub fn value(&self, id: ValueId) -> Option<&ValueInfo> {
        self.values.get(id.index())
    }

    pub fn value_name(&self, id: ValueId) -> String {
        match self.value(id) {
            Some(info) => format!("%{}", info.name),
            None => format!("%<{}>", id.0),
        }
    }

    pub fn value_type(&self, id: ValueId) -> Option<ValueType> {
        self.value(id).map(|v| v.ty)
    }

    pub fn op(&self, id: OpId) -> Option<&Operator> {
        self.operators.iter().find(|op| op.id == id)
    }

    /// Dialects used by the operators; empty for an operator-free graph.
    pub fn dialects(&self) -> BTreeSet<Dialect> {
        self.operators.iter().map(|op| op.kind.dialect()).collect()
    }

    /// Next unused operator id.
    pub fn fresh_op_id(&self) -> OpId {
        OpId(
            self.operators
                .iter()
                .map(|op| op.id.0 + 1)
                .max()
                .unwrap_or(0),
        )
    }

    /// Operator positions in dependency order. The ready set is ordered by
    /// operator id, so the result is deterministic.
    pub fn topological_positions(&self) -> Result<Vec<usize>, CycleError> {
        let deps = Dependencies::new(self);
        let mut indegree: Vec<usize> = deps.preds.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<(OpId, usize)> = indegree
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == 0)
            .map(|(pos, _)| (self.operators[pos].id, pos))
            .collect();
        let mut order = Vec::with_capacity(self.operators.len());
        while let Some((_, pos)) = ready.pop_first() {
            order.push(pos);
            for &succ in &deps.succs[pos] {
                indegree[succ] -= 1;
                if indegree[succ] == 0 {
                    ready.insert((self.operators[succ].id, succ));
                }
            }
        }
        if order.len() == self.operators.len() {
            Ok(order)
        } else {
            let stuck = (0..self.operators.len())
                .filter(|pos| indegree[*pos] > 0)
                .min_by_key(|pos| self.operators[*pos].id)
                .expect("incomplete order leaves a stuck operator");
            Err(CycleError {
                position: stuck,
                op: self.operators[stuck].id,
            })
        }
    }

    /// Structural equality up to value names and operator ids: same argument
    /// types, same operator sequence (kinds, attributes, sections, edges) and
    /// the same returns.
    pub fn is_isomorphic(&self, other: &CircuitGraph) -> bool {
        fn canonical(g: &CircuitGraph) -> Option<Canonical> {
            let mut numbering = HashMap::new();
            let mut next = 0usize;
            let mut number = |v: ValueId, numbering: &mut HashMap<ValueId, usize>| {
                numbering.entry(v).or_insert_with(|| {
                    next += 1;
                    next - 1
                });
            };
            let mut args = Vec::new();
            for &a in &g.arguments {
                number(a, &mut numbering);
                args.push(g.value_type(a)?);
            }
            for op in &g.operators {
                for &r in &op.results {
                    number(r, &mut numbering);
                }
            }
            let mut ops = Vec::new();
            for op in &g.operators {
                let operands = op
                    .operands
                    .iter()
                    .map(|v| numbering.get(v).copied())
                    .collect::<Option<Vec<_>>>()?;
                let results = op
                    .results
                    .iter()
                    .map(|v| Some((numbering[v], g.value_type(*v)?)))
                    .collect::<Option<Vec<_>>>()?;
                ops.push((op.kind.clone(), op.section, operands, results));
            }
            let rets = g
                .returns
                .iter()
                .map(|v| numbering.get(v).copied())
                .collect::<Option<Vec<_>>>()?;
            Some((args, ops, rets))
        }
        type Canonical = (
            Vec<ValueType>,
            Vec<(OpKind, Option<u32>, Vec<usize>, Vec<(usize, ValueType)>)>,
            Vec<usize>,
        );
        match (canonical(self), canonical(other)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("dependency cycle through operator {op}")]
pub struct CycleError {
    pub position: usize,
    pub op: OpId,
}

/// Operator-to-operator dependency edges, indexed by operator position.
///
/// Edges are deduplicated; successor and predecessor lists are sorted by
/// operator id. Operands that are undefined or defined by arguments produce
/// no edge.
#[derive(Debug, Clone)]
pub struct Dependencies {
    pub preds: Vec<Vec<usize>>,
    pub succs: Vec<Vec<usize>>,
    /// For each argument position, the consuming operator positions.
    pub arg_consumers: Vec<Vec<usize>>,
}

impl Dependencies {
    pub fn new(graph: &CircuitGraph) -> Self {
        let n = graph.operators.len();
        let mut producer: HashMap<ValueId, usize> = HashMap::new();
        for (pos, op) in graph.operators.iter().enumerate() {
            for &r in &op.results {
                producer.entry(r).or_insert(pos);
            }
        }
        let arg_pos: HashMap<ValueId, usize> = graph
            .arguments
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        let mut arg_consumers = vec![Vec::new(); graph.arguments.len()];
        for (pos, op) in graph.operators.iter().enumerate() {
            for v in &op.operands {
                if let Some(&p) = producer.get(v) {
                    preds[pos].push(p);
                    succs[p].push(pos);
                } else if let Some(&a) = arg_pos.get(v) {
                    arg_consumers[a].push(pos);
                }
            }
        }
        let by_id = |list: &mut Vec<usize>| {
            list.sort_by_key(|p| (graph.operators[*p].id, *p));
            list.dedup();
        };
        preds.iter_mut().for_each(by_id);
        succs.iter_mut().for_each(by_id);
        arg_consumers.iter_mut().for_each(by_id);
        Dependencies {
            preds,
            succs,
            arg_consumers,
        }
    }

    /// Operators none of whose results feed another operator.
    pub fn is_sink(&self, pos: usize) -> bool {
        self.succs[pos].is_empty()
    }
}

/// Where in a graph a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Argument(usize),
    Operator { position: usize, part: OpPart },
    Return(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpPart {
    Name,
    Operand(usize),
    Result(usize),
    Attr(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    UseBeforeDef {
        value: String,
    },
    DoubleDef {
        value: String,
    },
    DuplicateOpId {
        id: OpId,
    },
    ArityMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    ResultCountMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    TypeMismatch {
        what: String,
        expected: ValueType,
        found: ValueType,
    },
    LutMaskOutOfRange {
        mask: u64,
        limit: u128,
    },
    LinCombTooWide {
        arity: usize,
    },
    EmptyCoefficients,
    Cycle {
        op: OpId,
    },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::UseBeforeDef { value } => write!(f, "use-before-def {value}"),
            ViolationKind::DoubleDef { value } => write!(f, "double-def {value}"),
            ViolationKind::DuplicateOpId { id } => write!(f, "duplicate operator id {id}"),
            ViolationKind::ArityMismatch { op, expected, found } => write!(
                f,
                "arity mismatch: {op} takes {expected} operand(s), found {found}"
            ),
            ViolationKind::ResultCountMismatch { op, expected, found } => write!(
                f,
                "result count mismatch: {op} produces {expected} result(s), found {found}"
            ),
            ViolationKind::TypeMismatch {
                what,
                expected,
                found,
            } => write!(f, "type mismatch: {what} must be {expected}, found {found}"),
            ViolationKind::LutMaskOutOfRange { mask, limit } => {
                write!(f, "LUT mask out of range: {mask} must be below {limit}")
            }
            ViolationKind::LinCombTooWide { arity } => write!(
                f,
                "linear-combination LUT over {arity} operands exceeds the {MAX_LINCOMB_ARITY}-operand limit"
            ),
            ViolationKind::EmptyCoefficients => {
                f.write_str("linear combination needs at least one coefficient")
            }
            ViolationKind::Cycle { op } => write!(f, "dependency cycle through operator {op}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: Location,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Checks every structural invariant of `graph` and returns all violations
/// found, in a deterministic order. An empty vector means the graph is valid.
pub fn validate(graph: &CircuitGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut defined: HashSet<ValueId> = HashSet::new();

    let mut push = |kind, location| out.push(Violation { kind, location });

    for (i, &arg) in graph.arguments.iter().enumerate() {
        if graph.value(arg).is_none() || !defined.insert(arg) {
            push(
                ViolationKind::DoubleDef {
                    value: graph.value_name(arg),
                },
                Location::Argument(i),
            );
        }
    }

    let mut ids = HashSet::new();
    for (position, op) in graph.operators.iter().enumerate() {
        if !ids.insert(op.id) {
            push(
                ViolationKind::DuplicateOpId { id: op.id },
                Location::Operator {
                    position,
                    part: OpPart::Name,
                },
            );
        }
        for (r, &res) in op.results.iter().enumerate() {
            if graph.value(res).is_none() || !defined.insert(res) {
                push(
                    ViolationKind::DoubleDef {
                        value: graph.value_name(res),
                    },
                    Location::Operator {
                        position,
                        part: OpPart::Result(r),
                    },
                );
            }
        }
    }

    for (position, op) in graph.operators.iter().enumerate() {
        let at = |part| Location::Operator { position, part };
        let name = op.kind.tag().op_name();
        check_attributes(&op.kind, &mut |kind, part| push(kind, at(part)));

        let arity = op.kind.arity();
        if op.operands.len() != arity {
            push(
                ViolationKind::ArityMismatch {
                    op: name.clone(),
                    expected: arity,
                    found: op.operands.len(),
                },
                at(OpPart::Name),
            );
        }
        let results = op.kind.result_count();
        if op.results.len() != results {
            push(
                ViolationKind::ResultCountMismatch {
                    op: name.clone(),
                    expected: results,
                    found: op.results.len(),
                },
                at(OpPart::Name),
            );
        }

        for (i, &v) in op.operands.iter().enumerate() {
            if !defined.contains(&v) {
                push(
                    ViolationKind::UseBeforeDef {
                        value: graph.value_name(v),
                    },
                    at(OpPart::Operand(i)),
                );
                continue;
            }
            if i >= arity {
                continue;
            }
            let expected = op.kind.operand_type(i);
            let found = graph
                .value_type(v)
                .expect("defined values are in the table");
            if found != expected {
                push(
                    ViolationKind::TypeMismatch {
                        what: format!("operand {i} of {name}"),
                        expected,
                        found,
                    },
                    at(OpPart::Operand(i)),
                );
            }
        }
        for (i, &r) in op.results.iter().enumerate() {
            let Some(found) = graph.value_type(r) else {
                continue;
            };
            let expected = op.kind.result_type();
            if found != expected {
                push(
                    ViolationKind::TypeMismatch {
                        what: format!("result {i} of {name}"),
                        expected,
                        found,
                    },
                    at(OpPart::Result(i)),
                );
            }
        }
    }

    for (i, &v) in graph.returns.iter().enumerate() {
        if !defined.contains(&v) {
            push(
                ViolationKind::UseBeforeDef {
                    value: graph.value_name(v),
                },
                Location::Return(i),
            );
        }
    }

    if let Err(cycle) = graph.topological_positions() {
        push(
            ViolationKind::Cycle { op: cycle.op },
            Location::Operator {
                position: cycle.position,
                part: OpPart::Name,
            },
        );
    }

    out
}

fn check_attributes(kind: &OpKind, push: &mut dyn FnMut(ViolationKind, OpPart)) {
    let mut check_mask = |mask: u64, arity: usize, attr: &'static str| {
        let limit = 1u128 << (1u32 << arity.min(MAX_LINCOMB_ARITY));
        if (mask as u128) >= limit {
            push(
                ViolationKind::LutMaskOutOfRange { mask, limit },
                OpPart::Attr(attr),
            );
        }
    };
    match kind {
        OpKind::Lut2 { lut } => check_mask(*lut, 2, "lut"),
        OpKind::Lut3 { lut } => check_mask(*lut, 3, "lut"),
        OpKind::LutLinComb { coeffs, lut } => {
            check_mask(*lut, coeffs.len(), "lut");
        }
        OpKind::MultiLutLinComb { coeffs, luts } => {
            for &lut in luts {
                check_mask(lut, coeffs.len(), "luts");
            }
        }
        _ => {}
    }
    if let OpKind::LutLinComb { coeffs, .. } | OpKind::MultiLutLinComb { coeffs, .. } = kind {
        if coeffs.is_empty() {
            push(ViolationKind::EmptyCoefficients, OpPart::Attr("coeffs"));
        } else if coeffs.len() > MAX_LINCOMB_ARITY {
            push(
                ViolationKind::LinCombTooWide {
                    arity: coeffs.len(),
                },
                OpPart::Attr("coeffs"),
            );
        }
    }
}

/// Incremental constructor for well-formed graphs.
///
/// Value names are made unique; results without an explicit name are
/// numbered in definition order.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    graph: CircuitGraph,
    names: HashSet<String>,
    next_auto: usize,
}

impl GraphBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GraphBuilder {
            graph: CircuitGraph {
                name: name.into(),
                values: Vec::new(),
                arguments: Vec::new(),
                operators: Vec::new(),
                returns: Vec::new(),
            },
            names: HashSet::new(),
            next_auto: 0,
        }
    }

    fn new_value(&mut self, name: Option<&str>, ty: ValueType) -> ValueId {
        let name = match name {
            Some(base) => {
                let mut candidate = base.to_string();
                let mut suffix = 0;
                while self.names.contains(&candidate) {
                    suffix += 1;
                    candidate = format!("{base}_{suffix}");
                }
                candidate
            }
            None => loop {
                let candidate = self.next_auto.to_string();
                self.next_auto += 1;
                if !self.names.contains(&candidate) {
                    break candidate;
                }
            },
        };
        self.names.insert(name.clone());
        let id = ValueId(self.graph.values.len() as u32);
        self.graph.values.push(ValueInfo { name, ty });
        id
    }

    pub fn arg(&mut self, name: &str, ty: ValueType) -> ValueId {
        let id = self.new_value(Some(name), ty);
        self.graph.arguments.push(id);
        id
    }

    /// Appends a single-result operator and returns its result.
    pub fn op(&mut self, kind: OpKind, operands: &[ValueId]) -> ValueId {
        self.op_multi(kind, operands)[0]
    }

    pub fn op_multi(&mut self, kind: OpKind, operands: &[ValueId]) -> Vec<ValueId> {
        let ty = kind.result_type();
        let results = (0..kind.result_count())
            .map(|_| self.new_value(None, ty))
            .collect();
        self.push_op(kind, operands, results)
    }

    /// Appends a single-result operator whose result gets `name`.
    pub fn named_op(&mut self, name: &str, kind: OpKind, operands: &[ValueId]) -> ValueId {
        let ty = kind.result_type();
        let result = self.new_value(Some(name), ty);
        self.push_op(kind, operands, vec![result])[0]
    }

    fn push_op(
        &mut self,
        kind: OpKind,
        operands: &[ValueId],
        results: Vec<ValueId>,
    ) -> Vec<ValueId> {
        let id = OpId(self.graph.operators.len() as u32);
        self.graph.operators.push(Operator {
            id,
            kind,
            operands: operands.to_vec(),
            results: results.clone(),
            section: None,
        });
        results
    }

    pub fn ret(&mut self, values: &[ValueId]) {
        self.graph.returns.extend_from_slice(values);
    }

    pub fn finish(self) -> CircuitGraph {
        self.graph
    }
}
