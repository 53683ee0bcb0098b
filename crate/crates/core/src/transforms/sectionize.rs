// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cost::CostTable;
use crate::ir::{CircuitGraph, CycleError, OpId};

/// Assignment of operators to capacity-bounded sections that execute one
/// after another on the fabric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionPlan {
    pub section_count: u32,
    pub assignment: BTreeMap<OpId, u32>,
    pub capacity_fcs: u64,
}

impl SectionPlan {
    /// Operators of section `s`, by id.
    pub fn section_ops(&self, s: u32) -> Vec<OpId> {
        self.assignment
            .iter()
            .filter(|(_, sec)| **sec == s)
            .map(|(op, _)| *op)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SectionError {
    #[error("section capacity must be positive")]
    ZeroCapacity,
    #[error("operator {op} ({name}) needs {fcs} FCs, which exceeds section capacity {capacity}")]
    OperatorTooLarge {
        op: OpId,
        name: String,
        fcs: u64,
        capacity: u64,
    },
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

/// Greedy packing in topological order: an operator joins the open section
/// while the section's FC sum stays within `capacity_fcs`, otherwise it
/// opens the next one. Every operator gets its `section` attribute set.
pub fn sectionize(
    graph: &CircuitGraph,
    capacity_fcs: u64,
    costs: &CostTable,
) -> Result<(CircuitGraph, SectionPlan), SectionError> {
    if capacity_fcs == 0 {
        return Err(SectionError::ZeroCapacity);
    }
    for op in &graph.operators {
        let fcs = costs.get(op.kind.tag()).fcs;
        if fcs > capacity_fcs {
            return Err(SectionError::OperatorTooLarge {
                op: op.id,
                name: op.kind.tag().op_name(),
                fcs,
                capacity: capacity_fcs,
            });
        }
    }

    let mut out = graph.clone();
    let mut assignment = BTreeMap::new();
    let mut section = 0u32;
    let mut used = 0u64;
    for pos in graph.topological_positions()? {
        let fcs = costs.get(graph.operators[pos].kind.tag()).fcs;
        if used + fcs > capacity_fcs {
            section += 1;
            used = 0;
        }
        used += fcs;
        out.operators[pos].section = Some(section);
        assignment.insert(graph.operators[pos].id, section);
    }
    let plan = SectionPlan {
        section_count: section + 1,
        assignment,
        capacity_fcs,
    };
    Ok((out, plan))
}
