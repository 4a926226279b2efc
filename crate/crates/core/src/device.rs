//! Device profiles: per-family LUT delays.
//!
//! A profile fixes the LUT6 logic delay; a k-input LUT takes `LUT6 * k / 6`,
//! rounded half up to whole picoseconds. Profiles never touch graph
//! structure, so they leave area untouched.

use crate::netlist::{CellKind, Netlist, Picoseconds};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceProfile {
    pub name: String,
    pub lut6_delay_ps: Picoseconds,
}

impl DeviceProfile {
    pub fn new(name: impl Into<String>, lut6_delay_ps: Picoseconds) -> Self {
        DeviceProfile {
            name: name.into(),
            lut6_delay_ps,
        }
    }

    pub fn spartan6() -> Self {
        DeviceProfile::new("spartan6", 200)
    }

    pub fn virtex5() -> Self {
        DeviceProfile::new("virtex5", 80)
    }

    pub fn virtex7() -> Self {
        DeviceProfile::new("virtex7", 40)
    }

    pub fn builtins() -> [DeviceProfile; 3] {
        [Self::spartan6(), Self::virtex5(), Self::virtex7()]
    }

    pub fn builtin(name: &str) -> Option<DeviceProfile> {
        Self::builtins().into_iter().find(|p| p.name == name)
    }

    /// Logic delay of a `k`-input LUT, `k` in `1..=6`.
    pub fn lut_delay(&self, inputs: u8) -> Picoseconds {
        let k = Picoseconds::from(inputs.clamp(1, 6));
        (self.lut6_delay_ps * k + 3) / 6
    }

    /// Logic delay for a cell kind; non-LUT cells keep `fallback`.
    pub fn delay_for(&self, kind: CellKind, fallback: Picoseconds) -> Picoseconds {
        kind.lut_inputs().map_or(fallback, |k| self.lut_delay(k))
    }
}

/// Replaces every LUT's logic delay with the profile's value.
pub fn override_delays(netlist: &Netlist, profile: &DeviceProfile) -> Netlist {
    netlist.map_cells(|c| {
        let mut c = c.clone();
        c.logic_delay = profile.delay_for(c.kind, c.logic_delay);
        c
    })
}
