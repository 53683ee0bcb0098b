// SPDX-License-Identifier: Apache-2.0

//! Hardware model and cumulative resource estimation.
//!
//! Every operator is priced by its tag alone. Estimation walks the operator
//! list once, accumulates FCs (and the memory/tile hooks) per tag, then packs
//! the FC total into chips at the configured occupancy and chips into boards.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ir::{CircuitGraph, OpTag};

pub const PAPER_DEFAULT_PROFILE: &str = "paper-default";

/// FCs charged for a bootstrapped Boolean operator (PBS + KS + constant).
pub const BOOTSTRAPPED_GATE_FCS: u64 = 256;
/// FCs charged for the unbootstrapped NOT gate.
pub const NOT_GATE_FCS: u64 = 16;
/// FCs charged for every CKKS operator.
pub const CKKS_OP_FCS: u64 = 512;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourceCost {
    pub fcs: u64,
    pub hbm_bytes: u64,
    pub ddr_bytes: u64,
    pub tiles: u64,
}

impl ResourceCost {
    pub fn fcs(fcs: u64) -> Self {
        ResourceCost {
            fcs,
            ..Default::default()
        }
    }
}

/// One [`ResourceCost`] for every operator tag of both dialects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostTable {
    entries: [ResourceCost; OpTag::COUNT],
}

impl CostTable {
    pub fn uniform(cost: ResourceCost) -> Self {
        CostTable {
            entries: [cost; OpTag::COUNT],
        }
    }

    pub fn paper_default() -> Self {
        let mut table = CostTable::uniform(ResourceCost::fcs(BOOTSTRAPPED_GATE_FCS));
        for &tag in OpTag::ALL {
            let fcs = match tag.dialect() {
                crate::ir::Dialect::Ckks => CKKS_OP_FCS,
                crate::ir::Dialect::Boolean if tag == OpTag::Not => NOT_GATE_FCS,
                crate::ir::Dialect::Boolean => BOOTSTRAPPED_GATE_FCS,
            };
            table.set(tag, ResourceCost::fcs(fcs));
        }
        table
    }

    pub fn get(&self, tag: OpTag) -> ResourceCost {
        self.entries[tag.index()]
    }

    pub fn set(&mut self, tag: OpTag, cost: ResourceCost) {
        self.entries[tag.index()] = cost;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FabricConfig {
    pub fcs_per_chip: u64,
    pub occupancy: f64,
    pub chips_per_board: u64,
    pub unit_time_per_gate: f64,
    pub slots: u64,
}

impl Default for FabricConfig {
    fn default() -> Self {
        FabricConfig {
            fcs_per_chip: 4096,
            occupancy: 0.5,
            chips_per_board: 4,
            unit_time_per_gate: 1.0,
            slots: 8,
        }
    }
}

impl FabricConfig {
    /// FCs a mapped circuit may occupy on one chip.
    pub fn usable_fcs_per_chip(&self) -> u64 {
        (self.fcs_per_chip as f64 * self.occupancy).floor() as u64
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let bad = |msg: &str| Err(ConfigError::OutOfRange(msg.to_string()));
        if self.fcs_per_chip == 0 {
            return bad("fcs_per_chip must be positive");
        }
        if !(self.occupancy > 0.0 && self.occupancy <= 1.0) {
            return bad("occupancy must be in (0,1]");
        }
        if self.chips_per_board == 0 {
            return bad("chips_per_board must be positive");
        }
        if !(self.unit_time_per_gate.is_finite() && self.unit_time_per_gate > 0.0) {
            return bad("unit_time_per_gate must be a positive number");
        }
        if !self.slots.is_power_of_two() {
            return bad("slots must be a positive power of two");
        }
        if self.usable_fcs_per_chip() < 1 {
            return bad("fcs_per_chip x occupancy must leave at least one usable FC");
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown op '{0}' in costs")]
    UnknownOp(String),
    #[error("missing cost for op '{0}'")]
    MissingCost(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("unknown profile '{0}'")]
    UnknownProfile(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    #[serde(default)]
    fabric: FabricConfig,
    #[serde(default)]
    costs: BTreeMap<String, ResourceCost>,
}

/// Parses a JSON config document into a checked fabric model and a complete
/// cost table.
pub fn load_config_str(text: &str) -> Result<(FabricConfig, CostTable), ConfigError> {
    let doc: ConfigDocument = serde_json::from_str(text)?;
    doc.fabric.check()?;
    if let Some(unknown) = doc.costs.keys().find(|k| OpTag::from_mnemonic(k).is_none()) {
        return Err(ConfigError::UnknownOp(unknown.clone()));
    }
    let mut table = CostTable::uniform(ResourceCost::default());
    for &tag in OpTag::ALL {
        let cost = doc
            .costs
            .get(tag.mnemonic())
            .ok_or_else(|| ConfigError::MissingCost(tag.mnemonic().to_string()))?;
        table.set(tag, *cost);
    }
    Ok((doc.fabric, table))
}

pub fn load_config(path: &Path) -> Result<(FabricConfig, CostTable), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_config_str(&text)
}

/// Built-in configuration by name.
pub fn load_profile(name: &str) -> Result<(FabricConfig, CostTable), ConfigError> {
    match name {
        PAPER_DEFAULT_PROFILE => Ok((FabricConfig::default(), CostTable::paper_default())),
        other => Err(ConfigError::UnknownProfile(other.to_string())),
    }
}

/// Serializes a configuration in the format [`load_config_str`] reads.
pub fn config_to_json(fabric: &FabricConfig, costs: &CostTable) -> String {
    #[derive(Serialize)]
    struct Doc<'a> {
        fabric: &'a FabricConfig,
        costs: BTreeMap<&'static str, ResourceCost>,
    }
    let doc = Doc {
        fabric,
        costs: OpTag::ALL
            .iter()
            .map(|&t| (t.mnemonic(), costs.get(t)))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("config serializes") + "\n"
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub function_name: String,
    pub op_count: usize,
    /// FC totals for every tag, including zeros.
    pub per_kind_fcs: BTreeMap<OpTag, u64>,
    pub total_fcs: u64,
    pub total_hbm_bytes: u64,
    pub total_ddr_bytes: u64,
    pub total_tiles: u64,
    pub chips: u64,
    pub boards: u64,
}

/// Chips needed for `total_fcs`, never fewer than one.
pub fn chips_for(total_fcs: u64, fabric: &FabricConfig) -> u64 {
    total_fcs.div_ceil(fabric.usable_fcs_per_chip()).max(1)
}

pub fn boards_for(chips: u64, fabric: &FabricConfig) -> u64 {
    chips.div_ceil(fabric.chips_per_board).max(1)
}

/// Cumulative resource estimate for `graph`. A multi-result operator is
/// charged once.
pub fn estimate(graph: &CircuitGraph, fabric: &FabricConfig, costs: &CostTable) -> ResourceReport {
    let mut per_kind: BTreeMap<OpTag, u64> = OpTag::ALL.iter().map(|&t| (t, 0)).collect();
    let mut total = ResourceCost::default();
    for op in &graph.operators {
        let tag = op.kind.tag();
        let cost = costs.get(tag);
        *per_kind.get_mut(&tag).expect("every tag present") += cost.fcs;
        total.fcs += cost.fcs;
        total.hbm_bytes += cost.hbm_bytes;
        total.ddr_bytes += cost.ddr_bytes;
        total.tiles += cost.tiles;
    }
    let chips = chips_for(total.fcs, fabric);
    ResourceReport {
        function_name: graph.name.clone(),
        op_count: graph.operators.len(),
        per_kind_fcs: per_kind,
        total_fcs: total.fcs,
        total_hbm_bytes: total.hbm_bytes,
        total_ddr_bytes: total.ddr_bytes,
        total_tiles: total.tiles,
        chips,
        boards: boards_for(chips, fabric),
    }
}
