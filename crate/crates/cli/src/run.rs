use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use blockscope_core::fixtures::FixtureSpec;
use blockscope_core::io::{
    parse_device_profile, parse_netlist, parse_power_model, parse_profile, serialize_netlist,
    serialize_profile, ParseError,
};
use blockscope_core::report::{render_csv, render_structured, render_text};
use blockscope_core::{
    area_report, build_registry, delay_report, group_to_depth, override_delays, power_score,
    AnalysisError, AnnotationError, AreaWeights, BlockDelayScope, CircuitGraph, CombinedReport,
    DeviceProfile, Metadata, PowerModel,
};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or bad input files: exit 1.
    #[error("{0}")]
    Input(String),
    /// A broken internal invariant: exit 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Metric {
    Area,
    Delay,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeviceChoice {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub netlist_path: PathBuf,
    pub profile_path: Option<PathBuf>,
    pub power_model_path: Option<PathBuf>,
    pub device: Option<DeviceChoice>,
    pub override_delays: bool,
    /// Empty means the default set: area and delay, plus power with a profile.
    pub metrics: Vec<Metric>,
    pub group_depth: Option<usize>,
    pub format: Format,
    pub block_delay_scope: BlockDelayScope,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Prefixes every line of a parse error with the file name.
fn in_file(path: &Path, err: ParseError) -> CliError {
    let shown = path.display();
    let text = match err {
        ParseError::Invalid(violations) => violations
            .iter()
            .map(|v| match v.line {
                Some(l) => format!("{shown}: line {l}: [{}] {}", v.rule, v.message),
                None => format!("{shown}: [{}] {}", v.rule, v.message),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => format!("{shown}: {other}"),
    };
    CliError::Input(text)
}

fn analysis(path: &Path, lines: &BTreeMap<String, usize>, err: AnalysisError) -> CliError {
    match err {
        AnalysisError::Annotation(AnnotationError::MalformedLabel { ref cell, .. }) => {
            match lines.get(cell) {
                Some(l) => CliError::Input(format!("{}: line {l}: {err}", path.display())),
                None => CliError::Input(format!("{}: {err}", path.display())),
            }
        }
        AnalysisError::Invalid(_) => CliError::Input(format!("{}: {err}", path.display())),
        other => CliError::Internal(other.to_string()),
    }
}

fn resolve_device(
    choice: &DeviceChoice,
    inputs: &mut BTreeMap<String, String>,
) -> Result<DeviceProfile, CliError> {
    match choice {
        DeviceChoice::Builtin(name) => DeviceProfile::builtin(name).ok_or_else(|| {
            CliError::Input(format!(
                "unknown device {name} (expected spartan6, virtex5 or virtex7)"
            ))
        }),
        DeviceChoice::File(path) => {
            let bytes = read(path)?;
            inputs.insert("device".into(), digest(&bytes));
            parse_device_profile(&bytes).map_err(|e| in_file(path, e))
        }
    }
}

/// Parses, analyzes and renders; returns the report bytes for standard output.
pub fn run(config: &RunConfig) -> Result<String, CliError> {
    let mut metrics = config.metrics.clone();
    if metrics.is_empty() {
        metrics = vec![Metric::Area, Metric::Delay];
        if config.profile_path.is_some() {
            metrics.push(Metric::Power);
        }
    }
    metrics.sort();
    metrics.dedup();
    if metrics.contains(&Metric::Power) && config.profile_path.is_none() {
        return Err(CliError::Input("power metric requires --profile".into()));
    }
    if config.group_depth == Some(0) {
        return Err(CliError::Input("--group-depth must be at least 1".into()));
    }

    let mut inputs = BTreeMap::new();
    let netlist_bytes = read(&config.netlist_path)?;
    inputs.insert("netlist".to_owned(), digest(&netlist_bytes));
    let doc = parse_netlist(&netlist_bytes).map_err(|e| in_file(&config.netlist_path, e))?;

    let device = match &config.device {
        Some(choice) => Some(resolve_device(choice, &mut inputs)?),
        None => None,
    };
    let netlist = match (&device, config.override_delays) {
        (Some(d), true) => override_delays(&doc.netlist, d),
        (None, true) => {
            return Err(CliError::Input(
                "--override-delays requires --device or --device-file".into(),
            ))
        }
        (_, false) => doc.netlist.clone(),
    };

    let fail = |e| analysis(&config.netlist_path, &doc.lines, e);
    let mut registry = build_registry(&netlist).map_err(|e| fail(e.into()))?;
    if let Some(depth) = config.group_depth {
        registry = group_to_depth(&registry, depth);
    }

    let mut report = CombinedReport {
        metadata: Metadata {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            device: device
                .as_ref()
                .filter(|_| config.override_delays)
                .map(|d| d.name.clone()),
            group_depth: config.group_depth,
            inputs: BTreeMap::new(),
        },
        ..CombinedReport::default()
    };

    if metrics.contains(&Metric::Area) {
        report.area =
            Some(area_report(&netlist, &registry, &AreaWeights::default()).map_err(fail)?);
    }
    if metrics.contains(&Metric::Delay) {
        let graph = CircuitGraph::new(&netlist).map_err(|e| fail(e.into()))?;
        report.delay =
            Some(delay_report(&graph, &registry, config.block_delay_scope).map_err(fail)?);
    }
    if metrics.contains(&Metric::Power) {
        let path = config.profile_path.as_ref().expect("checked above");
        let bytes = read(path)?;
        inputs.insert("profile".into(), digest(&bytes));
        let mut profile = parse_profile(&bytes).map_err(|e| in_file(path, e))?;
        if let Some(depth) = config.group_depth {
            profile = profile.grouped(depth);
        }
        let model = match &config.power_model_path {
            Some(path) => {
                let bytes = read(path)?;
                inputs.insert("power_model".into(), digest(&bytes));
                parse_power_model(&bytes).map_err(|e| in_file(path, e))?
            }
            None => PowerModel::default(),
        };
        report.power = Some(power_score(&netlist, &registry, &model, &profile).map_err(fail)?);
    }
    report.metadata.inputs = inputs;

    if !report.is_consistent() {
        return Err(CliError::Internal(
            "report sections disagree on block rows".into(),
        ));
    }
    Ok(match config.format {
        Format::Text => render_text(&report),
        Format::Csv => render_csv(&report),
        Format::Structured => render_structured(&report),
    })
}

/// Writes the named fixture into `out_dir`; returns the written paths.
pub fn write_fixture(
    name: &str,
    out_dir: &Path,
    width: Option<usize>,
    device: &str,
) -> Result<Vec<PathBuf>, CliError> {
    let mut spec: FixtureSpec = name
        .parse()
        .map_err(|e: blockscope_core::fixtures::FixtureError| CliError::Input(e.to_string()))?;
    if let Some(w) = width {
        match spec {
            FixtureSpec::Gcd { .. } => spec = FixtureSpec::Gcd { width: w },
            _ => {
                return Err(CliError::Input(
                    "--width only applies to the gcd fixture".into(),
                ))
            }
        }
    }
    let device = DeviceProfile::builtin(device)
        .ok_or_else(|| CliError::Input(format!("unknown device {device}")))?;
    let netlist = spec
        .netlist(&device)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let text = serialize_netlist(&netlist)
        .map_err(|e| CliError::Internal(format!("generated fixture is invalid: {e}")))?;

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    let mut emit = |file: String, body: &str| -> Result<(), CliError> {
        let path = out_dir.join(file);
        fs::write(&path, body).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        written.push(path);
        Ok(())
    };
    emit(format!("{}.bnl", spec.stem()), &text)?;
    if let Some(profile) = spec.profile() {
        emit(format!("{}.bpf", spec.stem()), &serialize_profile(&profile))?;
    }
    Ok(written)
}
