//! `blockscope-report v1`: canonical JSON.
//!
//! Object keys are sorted, rows keep registry order, delays are integers,
//! power figures have three decimals and switching factors four. Rendering a
//! parsed document reproduces it byte for byte.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Number;
use thiserror::Error;

use super::CombinedReport;
use crate::area::{BlockArea, ResourceKind};
use crate::delay::PathResult;
use crate::power::SCORE_NOTICE;

pub const SCHEMA: &str = "blockscope-report v1";

#[derive(Debug, Error)]
pub enum StructuredError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema {found:?}, expected {SCHEMA:?}")]
    Schema { found: String },
}

/// A decimal printed with exactly `P` fractional digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed<const P: usize>(pub f64);

impl<const P: usize> Serialize for Fixed<P> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text = format!("{:.*}", P, super::positive_zero(self.0));
        Number::from_str(&text)
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de, const P: usize> Deserialize<'de> for Fixed<P> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = Number::deserialize(d)?;
        n.to_string()
            .parse::<f64>()
            .map(Fixed)
            .map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataDoc {
    pub tool_version: String,
    pub device: Option<String>,
    pub group_depth: Option<usize>,
    pub inputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaRow {
    pub block: String,
    pub counts: BTreeMap<String, u64>,
    pub unpaired_ff: u64,
    pub weighted_area: Fixed<3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaDoc {
    pub blocks: Vec<AreaRow>,
    pub totals: AreaRow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDoc {
    pub total_ps: u64,
    pub logic_ps: u64,
    pub network_ps: u64,
    pub path: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayRow {
    pub block: String,
    pub critical: bool,
    pub system: PathDoc,
    pub block_delay: PathDoc,
    pub set_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayDoc {
    pub block_delay_scope: String,
    pub blocks: Vec<DelayRow>,
    pub global_critical: PathDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerRow {
    pub block: String,
    pub static_uw: Fixed<3>,
    pub dynamic_pj: Fixed<3>,
    pub alpha: Fixed<4>,
    pub active_cycles: u64,
    pub cycles: u64,
    pub events: u64,
    pub absent: bool,
    pub dynamic_uw: Fixed<3>,
    pub avg_uw: Fixed<3>,
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerDoc {
    pub notice: String,
    pub frequency_hz: Fixed<3>,
    pub blocks: Vec<PowerRow>,
    pub ranking: Vec<String>,
}

/// Typed form of the structured document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuredReport {
    pub schema: String,
    pub metadata: MetadataDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<AreaDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<DelayDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerDoc>,
}

fn area_row(block: &str, a: &BlockArea) -> AreaRow {
    AreaRow {
        block: block.to_owned(),
        counts: ResourceKind::ALL
            .iter()
            .map(|k| (k.name().to_owned(), a.count(*k)))
            .collect(),
        unpaired_ff: a.unpaired_ff,
        weighted_area: Fixed(a.weighted_area),
    }
}

fn path_doc(p: &PathResult) -> PathDoc {
    PathDoc {
        total_ps: p.total_delay,
        logic_ps: p.logic_delay,
        network_ps: p.network_delay,
        path: p.path.clone(),
    }
}

impl From<&CombinedReport> for StructuredReport {
    fn from(r: &CombinedReport) -> Self {
        let m = &r.metadata;
        StructuredReport {
            schema: SCHEMA.to_owned(),
            metadata: MetadataDoc {
                tool_version: m.tool_version.clone(),
                device: m.device.clone(),
                group_depth: m.group_depth,
                inputs: m.inputs.clone(),
            },
            area: r.area.as_ref().map(|a| AreaDoc {
                blocks: a
                    .per_block
                    .iter()
                    .map(|(k, b)| area_row(k.name(), b))
                    .collect(),
                totals: area_row("total", &a.totals),
            }),
            delay: r.delay.as_ref().map(|d| DelayDoc {
                block_delay_scope: d.scope.name().to_owned(),
                blocks: d
                    .per_block
                    .iter()
                    .map(|(k, b)| DelayRow {
                        block: k.name().to_owned(),
                        critical: r.is_critical(k),
                        system: path_doc(&b.system),
                        block_delay: path_doc(&b.block),
                        set_sizes: b.set_sizes.clone(),
                    })
                    .collect(),
                global_critical: path_doc(&d.global_critical),
            }),
            power: r.power.as_ref().map(|p| PowerDoc {
                notice: SCORE_NOTICE.to_owned(),
                frequency_hz: Fixed(p.frequency_hz),
                blocks: p
                    .per_block
                    .iter()
                    .map(|(k, b)| PowerRow {
                        block: k.name().to_owned(),
                        static_uw: Fixed(b.static_uw),
                        dynamic_pj: Fixed(b.dynamic_pj),
                        alpha: Fixed(b.alpha),
                        active_cycles: b.activity.active_cycles,
                        cycles: b.activity.cycles,
                        events: b.activity.events,
                        absent: b.activity.absent,
                        dynamic_uw: Fixed(b.dynamic_uw),
                        avg_uw: Fixed(b.avg_uw),
                        rank: r.rank(k),
                    })
                    .collect(),
                ranking: p.ranking.iter().map(|l| l.as_str().to_owned()).collect(),
            }),
        }
    }
}

/// Canonical text of a document: sorted keys, two-space indent, final newline.
pub fn render_document(doc: &StructuredReport) -> String {
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(doc).expect("report documents are plain data");
    let mut out = serde_json::to_string_pretty(&value).expect("values always serialize");
    out.push('\n');
    out
}

pub fn render_structured(report: &CombinedReport) -> String {
    render_document(&StructuredReport::from(report))
}

pub fn parse_structured(text: &str) -> Result<StructuredReport, StructuredError> {
    let doc: StructuredReport = serde_json::from_str(text)?;
    if doc.schema != SCHEMA {
        return Err(StructuredError::Schema { found: doc.schema });
    }
    Ok(doc)
}
