//! Power-model and device-profile configuration files.
//!
//! Power model (no header; unspecified coefficients keep their defaults):
//!
//! ```text
//! static <KIND> <uW>
//! dynamic <KIND> <pJ>
//! frequency <Hz>
//! ```
//!
//! `KIND` is a resource kind: `LUT1`..`LUT6`, `FF`, `CLK`, `IN`, `OUT`, `MEM_IN`.
//!
//! Device profile:
//!
//! ```text
//! blockscope-device v1
//! name <id>
//! lut6 <ps>
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{decode, lex, split_header, ParseError};
use crate::area::ResourceKind;
use crate::device::DeviceProfile;
use crate::power::PowerModel;

pub const DEVICE_HEADER: &str = "blockscope-device v1";

pub fn parse_power_model(bytes: &[u8]) -> Result<PowerModel, ParseError> {
    let text = decode(bytes)?;
    let mut model = PowerModel::default();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    for line in lex(text) {
        let directive = line.text(0);
        match directive {
            "static" | "dynamic" => {
                line.expect_len(3, &format!("{directive} <KIND> <value>"))?;
                let kind = ResourceKind::from_name(line.text(1)).ok_or_else(|| {
                    line.error(1, format!("unknown resource kind {}", line.text(1)))
                })?;
                let value = line.decimal(2, "coefficient")?;
                if !seen.insert((directive.to_owned(), kind.name().to_owned())) {
                    return Err(
                        line.semantic(format!("duplicate {directive} coefficient for {kind}"))
                    );
                }
                let table = if directive == "static" {
                    &mut model.static_uw
                } else {
                    &mut model.dynamic_pj
                };
                table.insert(kind, value);
            }
            "frequency" => {
                line.expect_len(2, "frequency <Hz>")?;
                let hz = line.decimal(1, "frequency")?;
                if hz <= 0.0 {
                    return Err(line.error(1, "frequency must be positive"));
                }
                if !seen.insert(("frequency".into(), String::new())) {
                    return Err(line.semantic("duplicate frequency"));
                }
                model.frequency_hz = hz;
            }
            other => return Err(line.error(0, format!("unknown directive {other}"))),
        }
    }
    Ok(model)
}

pub fn serialize_power_model(model: &PowerModel) -> String {
    let mut out = String::new();
    for (k, v) in &model.static_uw {
        let _ = writeln!(out, "static {k} {v}");
    }
    for (k, v) in &model.dynamic_pj {
        let _ = writeln!(out, "dynamic {k} {v}");
    }
    let _ = writeln!(out, "frequency {}", model.frequency_hz);
    out
}

pub fn parse_device_profile(bytes: &[u8]) -> Result<DeviceProfile, ParseError> {
    let text = decode(bytes)?;
    let lines = lex(text);
    let body = split_header(&lines, DEVICE_HEADER)?;
    let mut name = None;
    let mut lut6 = None;
    for line in body {
        match line.text(0) {
            "name" => {
                line.expect_len(2, "name <id>")?;
                if name
                    .replace(line.id(1, "device name")?.to_owned())
                    .is_some()
                {
                    return Err(line.semantic("duplicate name"));
                }
            }
            "lut6" => {
                line.expect_len(2, "lut6 <ps>")?;
                if lut6.replace(line.unsigned(1, "LUT6 delay")?).is_some() {
                    return Err(line.semantic("duplicate lut6 delay"));
                }
            }
            other => return Err(line.error(0, format!("unknown directive {other}"))),
        }
    }
    let last = lines.last().map_or(1, |l| l.number);
    match (name, lut6) {
        (Some(name), Some(lut6)) => Ok(DeviceProfile::new(name, lut6)),
        (None, _) => Err(ParseError::Semantic {
            line: last,
            message: "missing name".into(),
        }),
        (_, None) => Err(ParseError::Semantic {
            line: last,
            message: "missing lut6 delay".into(),
        }),
    }
}
