//! Run configuration files.
//!
//! A config is a TOML document with the sections `atom`, `drive`, `probe`,
//! `grid`, `cell`, `solver` and `output`. Keys ending in `_hz` are ordinary
//! frequencies and are multiplied by 2π when the scenario is built; the
//! document itself keeps the values as written, so loading and dumping a
//! config gives back the same keys and values. Unknown keys are rejected.
//!
//! ```toml
//! [atom]
//! lambda_m = 794.979e-9
//! density_m3 = 1e18
//! gamma_r_hz = 5.75e6
//! gamma_cb_hz = 500.0
//!
//! [drive]
//! pattern = "interference"
//! omega0_hz = 1.5e6
//! fringe_period_m = 8e-4
//! x0_m = 4e-4
//!
//! [probe]
//! shape = "gaussian"
//! amplitude_hz = 1e4
//! waist_m = 7e-4
//!
//! [cell]
//! length_m = 0.04
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::DEFAULT_MIN_PROMINENCE;
use crate::atomic::AtomicParams;
use crate::error::{Error, Result};
use crate::fields::DriveDescriptor;
use crate::propagation::{Boundary, Solver};
use crate::scenario::{CellSpec, Lens, ProbeShape, ProbeSpec, Scenario};

pub const DEFAULT_GRID_N: usize = 4096;
/// Default window, in units of the widest beam feature.
pub const DEFAULT_WINDOW_FACTOR: f64 = 8.0;
pub const DEFAULT_PAD_FRACTION: f64 = 0.1;

const TAU: f64 = 2.0 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub atom: AtomSection,
    pub drive: DriveSection,
    pub probe: ProbeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    pub cell: CellSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSection {
    pub lambda_m: f64,
    pub density_m3: f64,
    pub gamma_r_hz: f64,
    /// Defaults to `gamma_r_hz / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_hz: Option<f64>,
    pub gamma_cb_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Interference,
    ParabolicMax,
    ParabolicNull,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub pattern: Pattern,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fringe_period_m: Option<f64>,
    #[serde(default, rename = "L_m", skip_serializing_if = "Option::is_none")]
    pub l_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0_m: Option<f64>,
    /// Relative paths are resolved against the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Gaussian,
    Plane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    pub shape: Shape,
    pub amplitude_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lens_focal_m: Option<f64>,
    /// Lens to cell entrance; by default the cell is centred on the focus.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lens_distance_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    pub length_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dz_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    SplitStep,
    BeerLambert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Periodic,
    Absorbing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<SolverKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundaryKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots_every: Option<usize>,
}

fn require(value: Option<f64>, key: &str, pattern: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("drive.{key} is required for pattern `{pattern}`")))
}

fn forbid<T>(value: &Option<T>, key: &str, pattern: &str) -> Result<()> {
    match value {
        Some(_) => Err(Error::Config(format!(
            "drive.{key} is not used by pattern `{pattern}`"
        ))),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn output_dir(&self) -> Option<&Path> {
        self.output.as_ref().and_then(|o| o.dir.as_deref())
    }

    pub fn snapshots_every(&self) -> Option<usize> {
        self.output.as_ref().and_then(|o| o.snapshots_every)
    }

    fn atom(&self) -> Result<AtomicParams> {
        let a = &self.atom;
        AtomicParams::new(
            a.lambda_m,
            a.density_m3,
            TAU * a.gamma_r_hz,
            a.gamma_hz.map(|g| TAU * g),
            TAU * a.gamma_cb_hz,
            TAU * a.detuning_hz.unwrap_or(0.0),
        )
        .map_err(|e| Error::Config(format!("[atom]: {e}")))
    }

    fn drive(&self, base_dir: &Path) -> Result<DriveDescriptor> {
        let d = &self.drive;
        let omega0 = |name: &str| require(d.omega0_hz, "omega0_hz", name).map(|o| TAU * o);
        Ok(match d.pattern {
            Pattern::Interference => {
                let name = "interference";
                forbid(&d.l_m, "L_m", name)?;
                forbid(&d.file, "file", name)?;
                DriveDescriptor::Interference {
                    omega0: omega0(name)?,
                    period: require(d.fringe_period_m, "fringe_period_m", name)?,
                    x0: d.x0_m.unwrap_or(0.0),
                }
            }
            Pattern::ParabolicMax => {
                let name = "parabolic_max";
                forbid(&d.fringe_period_m, "fringe_period_m", name)?;
                forbid(&d.file, "file", name)?;
                DriveDescriptor::ParabolicMax {
                    omega0: omega0(name)?,
                    length: require(d.l_m, "L_m", name)?,
                    x0: d.x0_m.unwrap_or(0.0),
                }
            }
            Pattern::ParabolicNull => {
                let name = "parabolic_null";
                forbid(&d.fringe_period_m, "fringe_period_m", name)?;
                forbid(&d.file, "file", name)?;
                forbid(&d.x0_m, "x0_m", name)?;
                DriveDescriptor::ParabolicNull {
                    omega0: omega0(name)?,
                    length: require(d.l_m, "L_m", name)?,
                }
            }
            Pattern::File => {
                let name = "file";
                forbid(&d.omega0_hz, "omega0_hz", name)?;
                forbid(&d.fringe_period_m, "fringe_period_m", name)?;
                forbid(&d.l_m, "L_m", name)?;
                forbid(&d.x0_m, "x0_m", name)?;
                let file = d.file.as_ref().ok_or_else(|| {
                    Error::Config("drive.file is required for pattern `file`".into())
                })?;
                DriveDescriptor::FromFile {
                    path: base_dir.join(file),
                }
            }
        })
    }

    fn probe(&self) -> Result<ProbeSpec> {
        let p = &self.probe;
        let shape = match p.shape {
            Shape::Gaussian => ProbeShape::Gaussian {
                waist: p.waist_m.ok_or_else(|| {
                    Error::Config("probe.waist_m is required for a gaussian probe".into())
                })?,
                center: p.center_m.unwrap_or(0.0),
            },
            Shape::Plane => {
                if p.waist_m.is_some() || p.center_m.is_some() {
                    return Err(Error::Config(
                        "probe.waist_m and probe.center_m do not apply to a plane probe".into(),
                    ));
                }
                ProbeShape::Plane
            }
        };
        let lens = match (p.lens_focal_m, p.lens_distance_m) {
            (Some(focal), distance) => Some(Lens { focal, distance }),
            (None, Some(_)) => {
                return Err(Error::Config(
                    "probe.lens_distance_m needs probe.lens_focal_m".into(),
                ))
            }
            (None, None) => None,
        };
        Ok(ProbeSpec {
            shape,
            amplitude: TAU * p.amplitude_hz,
            lens,
        })
    }

    fn default_width(&self) -> Result<f64> {
        let probe = self.probe.waist_m.map(|w| 2.0 * w);
        let drive = self
            .drive
            .fringe_period_m
            .or(self.drive.l_m.map(|l| 2.0 * l));
        match probe.into_iter().chain(drive).reduce(f64::max) {
            Some(widest) => Ok(DEFAULT_WINDOW_FACTOR * widest),
            None => Err(Error::Config(
                "grid.width_m is required when no beam feature sets a scale".into(),
            )),
        }
    }

    /// Builds the scenario; relative drive-file paths resolve against `base_dir`.
    pub fn to_scenario(&self, base_dir: &Path) -> Result<Scenario> {
        let grid = self.grid.clone().unwrap_or(GridSection {
            n: None,
            width_m: None,
        });
        let grid_width = match grid.width_m {
            Some(w) => w,
            None => self.default_width()?,
        };
        let solver = self.solver.clone().unwrap_or(SolverSection {
            kind: None,
            boundary: None,
            pad_fraction: None,
        });
        let boundary = match solver.boundary.unwrap_or(BoundaryKind::Periodic) {
            BoundaryKind::Periodic => {
                if solver.pad_fraction.is_some() {
                    return Err(Error::Config(
                        "solver.pad_fraction needs boundary = \"absorbing\"".into(),
                    ));
                }
                Boundary::Periodic
            }
            BoundaryKind::Absorbing => {
                let f = solver.pad_fraction.unwrap_or(DEFAULT_PAD_FRACTION);
                if !(0.0..=0.45).contains(&f) {
                    return Err(Error::Config(format!(
                        "solver.pad_fraction = {f} is outside [0, 0.45]"
                    )));
                }
                Boundary::AbsorbingPad(f)
            }
        };
        let solver = match solver.kind.unwrap_or(SolverKind::SplitStep) {
            SolverKind::SplitStep => Solver::SplitStep,
            SolverKind::BeerLambert => Solver::BeerLambert,
        };
        if let Some(dz) = self.cell.dz_m {
            if !(dz > 0.0 && dz <= self.cell.length_m) {
                return Err(Error::Config(format!(
                    "cell.dz_m = {dz} must lie in (0, cell.length_m]"
                )));
            }
        }
        if !(self.cell.length_m > 0.0) {
            return Err(Error::Config("cell.length_m must be positive".into()));
        }
        let n = grid.n.unwrap_or(DEFAULT_GRID_N);
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid.n = {n} must be a power of two >= 16"
            )));
        }
        Ok(Scenario {
            atom: self.atom()?,
            drive: self.drive(base_dir)?,
            probe: self.probe()?,
            grid_n: n,
            grid_width,
            cell: CellSpec {
                length: self.cell.length_m,
                dz: self.cell.dz_m,
                solver,
                boundary,
                snapshot_every: self.snapshots_every(),
            },
            min_prominence: DEFAULT_MIN_PROMINENCE,
        })
    }
}
