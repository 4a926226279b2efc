//! Shared inputs for the criterion benchmarks.

use blockscope_core::fixtures::gen_random;
use blockscope_core::Netlist;

/// Random netlists used as benchmark workloads, one per size.
pub fn workloads(sizes: &[usize]) -> Vec<(usize, Netlist)> {
    sizes
        .iter()
        .map(|&n| {
            (
                n,
                gen_random(0xB10C + n as u64, n).expect("sizes are at least 2"),
            )
        })
        .collect()
}
