//! Registered experiment presets.

use anyhow::Result;

use crate::config::{ConfigError, Layers};
use crate::experiments::{self, Ctx, Outcome};

pub type Pipeline = fn(&Ctx) -> Result<Outcome>;

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    /// Overrides layered over the defaults before any user input.
    pub settings: &'static [&'static str],
    pub run: Pipeline,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "sphere-shrink",
        about: "round sphere against the exact shrinking solution",
        settings: &["geometry.shape=sphere", "geometry.nodes=400", "flow.snapshot_dt=0.01"],
        run: experiments::sphere_shrink,
    },
    Preset {
        name: "pinch-preserve",
        about: "pinching preservation on an ellipsoid",
        settings: &["geometry.shape=ellipsoid", "audit.estimate=pinching"],
        run: experiments::pinching,
    },
    Preset {
        name: "umbilic-audit",
        about: "umbilic estimate on an ellipsoid at two resolutions",
        settings: &["geometry.shape=ellipsoid", "audit.estimate=umbilic"],
        run: experiments::umbilic,
    },
    Preset {
        name: "interior-audit",
        about: "interior estimate on shrinking spheres at two resolutions",
        settings: &[
            "geometry.shape=sphere",
            "audit.estimate=interior",
            "flow.snapshot_dt=0.005",
            "audit.stability=0.05",
        ],
        run: experiments::interior,
    },
    Preset {
        name: "barrier-audit",
        about: "barrier identity for the axial height function",
        settings: &["geometry.shape=ellipsoid", "audit.estimate=barrier", "flow.t_end=0.05"],
        run: experiments::barrier,
    },
    Preset {
        name: "point-pick-demo",
        about: "doubling point selection on seeded random curvature fields",
        settings: &[],
        run: experiments::pick,
    },
    Preset {
        name: "bowl-scan",
        about: "bowl translator: residuals, identities and decay",
        settings: &["soliton.kind=translator"],
        run: experiments::soliton,
    },
    Preset {
        name: "expander-scan",
        about: "convex expander: residuals, identities and decay",
        settings: &["soliton.kind=expander"],
        run: experiments::soliton,
    },
    Preset {
        name: "existence-construction",
        about: "truncate, mollify and flow a paraboloid across a refinement matrix",
        settings: &[],
        run: experiments::existence,
    },
    Preset {
        name: "type-classify",
        about: "singularity-type evidence on a shrinking sphere",
        settings: &["geometry.shape=sphere", "flow.snapshot_dt=0.005"],
        run: experiments::classify,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

impl Preset {
    pub fn apply(&self, layers: &mut Layers) -> Result<(), ConfigError> {
        for s in self.settings {
            layers.apply_override(s)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        for p in PRESETS {
            let mut layers = Layers::default();
            p.apply(&mut layers).unwrap();
            layers.resolve().unwrap();
        }
    }

    #[test]
    fn names_are_unique() {
        for (i, a) in PRESETS.iter().enumerate() {
            assert!(PRESETS[i + 1..].iter().all(|b| b.name != a.name));
        }
    }
}
