// SPDX-License-Identifier: Apache-2.0

//! Graph-to-graph passes. Each pass takes its input by reference and returns
//! a fresh graph.

mod canonicalize;
mod lower;
mod sectionize;

pub use canonicalize::canonicalize;
pub use lower::{gate_truth_table, lower_gates};
pub use sectionize::{sectionize, SectionError, SectionPlan};
