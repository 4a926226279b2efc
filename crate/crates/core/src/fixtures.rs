//! Deterministic fixture generators.
//!
//! - `gcd`: the swap/subtract GCD machine with two registers of `width` bits.
//! - `fig6`: one four-cell block whose expansion splits into two trees.
//! - `random:<seed>:<n>`: a seeded random valid netlist of `n` cells.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::annotation::BlockLabel;
use crate::device::DeviceProfile;
use crate::netlist::{Cell, CellKind, FfPair, Net, Netlist, Picoseconds};
use crate::power::ActivityProfile;

/// Net delay used throughout the GCD fixture.
pub const GCD_NET_DELAY_PS: Picoseconds = 50;

pub const GCD_MAX_WIDTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("bit width {0} out of range 1..=8")]
    Width(usize),
    #[error("random fixtures need at least 2 cells, got {0}")]
    TooSmall(usize),
    #[error("unknown fixture {0:?} (expected gcd, fig6 or random:<seed>:<n>)")]
    UnknownName(String),
}

/// A named, reproducible fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureSpec {
    Gcd { width: usize },
    Fig6,
    Random { seed: u64, cells: usize },
}

impl FixtureSpec {
    /// File stem of the emitted fixture.
    pub fn stem(&self) -> String {
        match self {
            FixtureSpec::Gcd { .. } => "gcd".into(),
            FixtureSpec::Fig6 => "fig6".into(),
            FixtureSpec::Random { seed, cells } => format!("random_{seed}_{cells}"),
        }
    }

    pub fn netlist(&self, device: &DeviceProfile) -> Result<Netlist, FixtureError> {
        match *self {
            FixtureSpec::Gcd { width } => gen_gcd_for(width, device).map(|(n, _)| n),
            FixtureSpec::Fig6 => Ok(gen_fig6()),
            FixtureSpec::Random { seed, cells } => gen_random(seed, cells),
        }
    }

    pub fn profile(&self) -> Option<ActivityProfile> {
        matches!(self, FixtureSpec::Gcd { .. }).then(gcd_profile)
    }
}

impl FromStr for FixtureSpec {
    type Err = FixtureError;

    /// `gcd` parses with width 2; pick another width with [`FixtureSpec::Gcd`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || FixtureError::UnknownName(s.to_owned());
        match s {
            "gcd" => Ok(FixtureSpec::Gcd { width: 2 }),
            "fig6" => Ok(FixtureSpec::Fig6),
            _ => {
                let mut parts = s.split(':');
                if parts.next() != Some("random") {
                    return Err(unknown());
                }
                let seed = parts
                    .next()
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(unknown)?;
                let cells = parts
                    .next()
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(unknown)?;
                if parts.next().is_some() {
                    return Err(unknown());
                }
                if cells < 2 {
                    return Err(FixtureError::TooSmall(cells));
                }
                Ok(FixtureSpec::Random { seed, cells })
            }
        }
    }
}

impl fmt::Display for FixtureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureSpec::Gcd { .. } => f.write_str("gcd"),
            FixtureSpec::Fig6 => f.write_str("fig6"),
            FixtureSpec::Random { seed, cells } => write!(f, "random:{seed}:{cells}"),
        }
    }
}

struct Builder {
    cells: Vec<Cell>,
    nets: Vec<Net>,
    pairs: Vec<FfPair>,
    device: DeviceProfile,
    net_delay: Picoseconds,
}

impl Builder {
    fn port(&mut self, id: String, kind: CellKind) -> String {
        self.cells.push(Cell::new(id.clone(), kind, 0));
        id
    }

    /// A LUT sized to its fan-in, driven by `inputs`.
    fn lut(&mut self, id: String, inputs: &[&str]) -> String {
        let k = inputs.len() as u8;
        let kind = CellKind::lut(k).expect("fan-in between 1 and 6");
        self.cells
            .push(Cell::new(id.clone(), kind, self.device.lut_delay(k)));
        for src in inputs {
            self.nets.push(Net::new(*src, id.clone(), self.net_delay));
        }
        id
    }

    fn wire(&mut self, src: &str, dst: &str) {
        self.nets.push(Net::new(src, dst, self.net_delay));
    }

    fn build(self) -> Netlist {
        Netlist::new(self.cells, self.nets, self.pairs)
    }
}

/// GCD fixture with Spartan-6 LUT delays.
pub fn gen_gcd(width: usize) -> Result<(Netlist, ActivityProfile), FixtureError> {
    gen_gcd_for(width, &DeviceProfile::spartan6())
}

/// The swap/subtract GCD machine.
///
/// Registers `x` and `y` hold `width` flip-flops each. Rule `swap` fires when
/// `x > y` and `y != 0`; rule `subtract` computes `y - x`. Both rules drive
/// per-bit multiplexers owned by the registers they update.
pub fn gen_gcd_for(
    width: usize,
    device: &DeviceProfile,
) -> Result<(Netlist, ActivityProfile), FixtureError> {
    if !(1..=GCD_MAX_WIDTH).contains(&width) {
        return Err(FixtureError::Width(width));
    }
    let mut b = Builder {
        cells: Vec::new(),
        nets: Vec::new(),
        pairs: Vec::new(),
        device: device.clone(),
        net_delay: GCD_NET_DELAY_PS,
    };

    let mut xq = Vec::new();
    let mut yq = Vec::new();
    for reg in ["x", "y"] {
        for i in 0..width {
            let d = b.port(format!("{reg}__d{i}"), CellKind::FfD);
            let q = b.port(format!("{reg}__q{i}"), CellKind::FfQ);
            b.pairs.push(FfPair::new(d, q.clone()));
            if reg == "x" {
                xq.push(q)
            } else {
                yq.push(q)
            }
        }
    }

    // Ripple comparator (or borrow chain) and a zero detector on y.
    let chain = |b: &mut Builder, block: &str, stem: &str| -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for i in 0..width {
            let id = format!("{block}__{stem}{i}");
            let cell = match out.last().cloned() {
                None => b.lut(id, &[&xq[i], &yq[i]]),
                Some(prev) => b.lut(id, &[&xq[i], &yq[i], &prev]),
            };
            out.push(cell);
        }
        out
    };
    let nonzero = |b: &mut Builder, block: &str| -> String {
        let mut prev: Option<String> = None;
        for (i, q) in yq.iter().enumerate() {
            let id = format!("{block}__nz{i}");
            prev = Some(match prev {
                None => b.lut(id, &[q]),
                Some(p) => b.lut(id, &[q, &p]),
            });
        }
        prev.expect("width >= 1")
    };

    let gt = chain(&mut b, "swap", "gt");
    let swap_nz = nonzero(&mut b, "swap");
    let swap_fire = b.lut("swap__fire".into(), &[&gt[width - 1], &swap_nz]);

    let borrow = chain(&mut b, "subtract", "borrow");
    let mut diff = Vec::new();
    for i in 0..width {
        let id = format!("subtract__diff{i}");
        diff.push(if i == 0 {
            b.lut(id, &[&xq[i], &yq[i]])
        } else {
            b.lut(id, &[&xq[i], &yq[i], &borrow[i - 1]])
        });
    }
    let sub_nz = nonzero(&mut b, "subtract");
    let sub_fire = b.lut("subtract__fire".into(), &[&borrow[width - 1], &sub_nz]);

    for i in 0..width {
        let mx = b.lut(format!("x__mux{i}"), &[&swap_fire, &yq[i], &xq[i]]);
        b.wire(&mx, &format!("x__d{i}"));
        let my = b.lut(
            format!("y__mux{i}"),
            &[&swap_fire, &sub_fire, &xq[i], &diff[i], &yq[i]],
        );
        b.wire(&my, &format!("y__d{i}"));
    }

    Ok((b.build(), gcd_profile()))
}

/// Ten profiled cycles of the GCD machine. At most one rule fires per cycle:
/// `swap` at {1, 3}, `subtract` at {2, 4, 5}; `swap` writes both registers,
/// `subtract` writes `y` and reads both.
pub fn gcd_profile() -> ActivityProfile {
    let label = |s: &str| BlockLabel::parse(s).expect("static label");
    let mut p = ActivityProfile {
        cycles: 10,
        ..ActivityProfile::default()
    };
    p.rule_block.insert("swap".into(), label("swap"));
    p.rule_block.insert("subtract".into(), label("subtract"));
    p.firings.insert("swap".into(), vec![1, 3]);
    p.firings.insert("subtract".into(), vec![2, 4, 5]);
    for (rule, state) in [("swap", "x"), ("swap", "y"), ("subtract", "y")] {
        p.writes.insert((rule.into(), state.into()));
    }
    for state in ["x", "y"] {
        p.reads.insert((label("subtract"), state.into()));
    }
    p
}

/// One annotated block `blue` of four LUTs, unit logic delays, zero net delays.
///
/// Its expansion yields two trees: `ck0 -> a1 -> n1 -> n2 -> n3 -> a2 -> r0_d`
/// (7 cells) and `ck1 -> n4 -> {b1 -> r1_d, r2_d}` (5 cells). The side
/// input `ck0 -> z1 -> a2` reaches the block's sink but not the block, so it
/// stays outside the expansion. Thirteen cells keep it within oracle reach.
pub fn gen_fig6() -> Netlist {
    let lut = |id: &str, k| Cell::new(id, CellKind::lut(k).expect("valid size"), 1);
    let cells = vec![
        Cell::new("ck0", CellKind::Clk, 0),
        Cell::new("ck1", CellKind::Clk, 0),
        lut("a1", 1),
        lut("blue__n1", 1),
        lut("blue__n2", 1),
        lut("blue__n3", 1),
        lut("a2", 2),
        lut("blue__n4", 1),
        lut("b1", 1),
        lut("z1", 1),
        Cell::new("r0_d", CellKind::FfD, 0),
        Cell::new("r1_d", CellKind::FfD, 0),
        Cell::new("r2_d", CellKind::FfD, 0),
    ];
    let edges = [
        ("ck0", "a1"),
        ("a1", "blue__n1"),
        ("blue__n1", "blue__n2"),
        ("blue__n2", "blue__n3"),
        ("blue__n3", "a2"),
        ("a2", "r0_d"),
        ("ck1", "blue__n4"),
        ("blue__n4", "b1"),
        ("b1", "r1_d"),
        ("blue__n4", "r2_d"),
        ("ck0", "z1"),
        ("z1", "a2"),
    ];
    let nets = edges.iter().map(|(s, d)| Net::new(*s, *d, 0)).collect();
    Netlist::new(cells, nets, vec![])
}

const LABEL_POOL: [&str; 7] = [
    "alu",
    "lsu",
    "top.fetch",
    "top.decode",
    "top.exec",
    "mem.ctrl",
    "mem.array",
];

/// Seeded random valid netlist.
///
/// Cell 0 is a source and the last cell a sink; every other cell draws a
/// random kind. Non-source cells get one to three drivers among earlier
/// non-sink cells. Between 60% and 100% of the cells carry one of one to
/// five block labels.
pub fn gen_random(seed: u64, n_cells: usize) -> Result<Netlist, FixtureError> {
    if n_cells < 2 {
        return Err(FixtureError::TooSmall(n_cells));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n_labels = rng.gen_range(1..=5);
    let mut pool = LABEL_POOL.to_vec();
    pool.shuffle(&mut rng);
    let labels = &pool[..n_labels];

    let min_annotated = (n_cells * 3).div_ceil(5);
    let n_annotated = rng.gen_range(min_annotated..=n_cells);
    let annotated: BTreeSet<usize> = sample(&mut rng, n_cells, n_annotated).into_iter().collect();

    let sources = [CellKind::Clk, CellKind::In, CellKind::FfQ];
    let sinks = [CellKind::FfD, CellKind::MemIn, CellKind::Out];
    let mut kinds = Vec::with_capacity(n_cells);
    for pos in 0..n_cells {
        let kind = if pos == 0 {
            *sources.choose(&mut rng).expect("non-empty")
        } else if pos == n_cells - 1 {
            *sinks.choose(&mut rng).expect("non-empty")
        } else {
            *CellKind::ALL.choose(&mut rng).expect("non-empty")
        };
        kinds.push(kind);
    }

    let mut label_turn = 0;
    let ids: Vec<String> = (0..n_cells)
        .map(|pos| {
            if annotated.contains(&pos) {
                // The first annotated cells cover every chosen label once.
                let label = if label_turn < labels.len() {
                    labels[label_turn]
                } else {
                    labels[rng.gen_range(0..labels.len())]
                };
                label_turn += 1;
                format!("{label}__c{pos}")
            } else {
                format!("u{pos}")
            }
        })
        .collect();

    let mut cells = Vec::with_capacity(n_cells);
    let mut nets = Vec::new();
    for pos in 0..n_cells {
        let kind = kinds[pos];
        let delay = if kind.is_source() {
            0
        } else {
            rng.gen_range(1..=1000)
        };
        cells.push(Cell::new(ids[pos].clone(), kind, delay));
        if kind.is_source() {
            continue;
        }
        let drivers: Vec<usize> = (0..pos).filter(|&p| !kinds[p].is_sink()).collect();
        if drivers.is_empty() {
            continue;
        }
        let fan_in = rng.gen_range(1..=3).min(drivers.len());
        let mut chosen: Vec<usize> = sample(&mut rng, drivers.len(), fan_in)
            .into_iter()
            .map(|i| drivers[i])
            .collect();
        chosen.sort_unstable();
        for src in chosen {
            nets.push(Net::new(
                ids[src].clone(),
                ids[pos].clone(),
                rng.gen_range(1..=1000),
            ));
        }
    }

    let mut ds: Vec<usize> = (0..n_cells)
        .filter(|&p| kinds[p] == CellKind::FfD)
        .collect();
    let mut qs: Vec<usize> = (0..n_cells)
        .filter(|&p| kinds[p] == CellKind::FfQ)
        .collect();
    ds.shuffle(&mut rng);
    qs.shuffle(&mut rng);
    let pairs = ds
        .iter()
        .zip(&qs)
        .filter(|_| rng.gen_bool(0.7))
        .map(|(&d, &q)| FfPair::new(ids[d].clone(), ids[q].clone()))
        .collect();

    Ok(Netlist::new(cells, nets, pairs))
}

/// Seeded random activity profile over `blocks` (a default pool when empty).
///
/// Rules, firings, writes and reads are all drawn at random, but every
/// reference is declared, so the profile always parses back.
pub fn gen_random_profile(seed: u64, blocks: &[BlockLabel]) -> ActivityProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<BlockLabel> = if blocks.is_empty() {
        LABEL_POOL[..3]
            .iter()
            .map(|l| BlockLabel::parse(l).expect("static label"))
            .collect()
    } else {
        blocks.to_vec()
    };

    let cycles = rng.gen_range(1..=24u64);
    let mut p = ActivityProfile {
        cycles,
        ..ActivityProfile::default()
    };
    let n_rules = rng.gen_range(1..=5);
    for r in 0..n_rules {
        let rule = format!("r{r}");
        p.rule_block
            .insert(rule.clone(), pool[rng.gen_range(0..pool.len())].clone());
        let fired: Vec<u64> = (0..cycles).filter(|_| rng.gen_bool(0.35)).collect();
        if !fired.is_empty() {
            p.firings.insert(rule.clone(), fired);
        }
        for s in 0..3 {
            if rng.gen_bool(0.4) {
                p.writes.insert((rule.clone(), format!("s{s}")));
            }
        }
    }
    let states: BTreeSet<String> = p.writes.iter().map(|(_, s)| s.clone()).collect();
    let owners: BTreeSet<BlockLabel> = p.rule_block.values().cloned().collect();
    for block in &owners {
        for state in &states {
            if rng.gen_bool(0.5) {
                p.reads.insert((block.clone(), state.clone()));
            }
        }
    }
    p
}
