//! Maps post-synthesis area, delay and power of an FPGA netlist back onto the
//! architectural blocks named in its cell ids.
//!
//! ```
//! use blockscope_core::{build_registry, fixtures::gen_fig6, CircuitGraph, delay_report, BlockDelayScope};
//!
//! let netlist = gen_fig6();
//! let registry = build_registry(&netlist).unwrap();
//! let graph = CircuitGraph::new(&netlist).unwrap();
//! let report = delay_report(&graph, &registry, BlockDelayScope::default()).unwrap();
//! assert_eq!(report.global_critical.total_delay, 5);
//! ```

pub mod annotation;
pub mod area;
pub mod delay;
pub mod device;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod netlist;
pub mod oracle;
pub mod power;
pub mod report;

pub use annotation::{
    build_registry, extract_block_label, group_to_depth, BlockKey, BlockLabel, BlockRegistry,
    UNANNOTATED,
};
pub use area::{area_report, AreaReport, AreaWeights, BlockArea, ResourceKind};
pub use delay::{
    block_delay, delay_report, BlockDelay, BlockDelayScope, DelayReport, PathResult, WeightingMode,
};
pub use device::{override_delays, DeviceProfile};
pub use error::{AnalysisError, AnnotationError, Rule, ValidationReport, Violation};
pub use io::{parse_netlist, parse_profile, serialize_netlist, serialize_profile, ParseError};
pub use netlist::{
    topological_order, validate, Cell, CellKind, CircuitGraph, FfPair, Net, Netlist, Picoseconds,
};
pub use power::{power_score, ActivityProfile, PowerModel, PowerScore};
pub use report::{CombinedReport, Metadata};
