//! A complete single experiment: build the fields, propagate, measure.

use crate::analysis::{
    absorbance, measure, narrowing_report, predicted_width_low_od, ratio_r, BeamMetrics,
    NarrowingReport,
};
use crate::atomic::AtomicParams;
use crate::error::{Error, Result};
use crate::fields::{
    drive_from_file, gaussian_probe, interference_drive, lens_phase, make_grid, parabolic_drive,
    plane_probe, ComplexField, DriveDescriptor, DriveProfile, ParabolicBranch, TransverseGrid,
};
use crate::propagation::{
    auto_step, free_space, propagate, Boundary, PropagationConfig, PropagationRecord, Solver,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeShape {
    Plane,
    Gaussian { waist: f64, center: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lens {
    pub focal: f64,
    /// Lens to cell entrance; `None` centres the cell on the Gaussian-beam waist.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub shape: ProbeShape,
    pub amplitude: f64,
    pub lens: Option<Lens>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub length: f64,
    /// `None` picks the step with [`auto_step`].
    pub dz: Option<f64>,
    pub solver: Solver,
    pub boundary: Boundary,
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub atom: AtomicParams,
    pub drive: DriveDescriptor,
    pub probe: ProbeSpec,
    pub grid_n: usize,
    pub grid_width: f64,
    pub cell: CellSpec,
    pub min_prominence: f64,
}

/// What the transmitted probe is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Transmission peaks under drive maxima; widths of the transmitted intensity.
    Peaks,
    /// An absorption dip at a drive null; widths of the optical-depth profile
    /// `-ln(I_out/I_in)`.
    Dip,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub mode: FeatureMode,
    pub drive: DriveProfile,
    pub record: PropagationRecord,
    pub drive_metrics: BeamMetrics,
    pub probe_metrics: BeamMetrics,
    pub input_metrics: Option<BeamMetrics>,
    pub report: NarrowingReport,
}

impl Scenario {
    pub fn feature_mode(&self) -> FeatureMode {
        match self.drive {
            DriveDescriptor::ParabolicNull { .. } => FeatureMode::Dip,
            _ => FeatureMode::Peaks,
        }
    }

    pub fn grid(&self) -> Result<TransverseGrid> {
        make_grid(self.grid_n, self.grid_width)
    }

    pub fn drive_profile(&self, grid: &TransverseGrid) -> Result<DriveProfile> {
        match &self.drive {
            DriveDescriptor::Interference { omega0, period, x0 } => {
                interference_drive(grid, *omega0, *period, *x0)
            }
            DriveDescriptor::ParabolicMax { omega0, length, x0 } => {
                parabolic_drive(grid, ParabolicBranch::Max, *omega0, *length, *x0)
            }
            DriveDescriptor::ParabolicNull { omega0, length } => {
                parabolic_drive(grid, ParabolicBranch::Null, *omega0, *length, 0.0)
            }
            DriveDescriptor::FromFile { path } => drive_from_file(grid, path),
        }
    }

    /// Probe at the cell entrance, after the optional lens and free flight.
    pub fn probe_field(&self, grid: &TransverseGrid) -> Result<ComplexField> {
        let lambda = self.atom.lambda();
        let k = self.atom.wavenumber();
        let field = match self.probe.shape {
            ProbeShape::Plane => plane_probe(grid, self.probe.amplitude),
            ProbeShape::Gaussian { waist, center } => {
                gaussian_probe(grid, self.probe.amplitude, waist, center)?
            }
        };
        let Some(lens) = &self.probe.lens else {
            return Ok(field);
        };
        let distance = match (lens.distance, &self.probe.shape) {
            (Some(d), _) => d,
            (None, ProbeShape::Gaussian { waist, .. }) => {
                let z_r = k * waist * waist / 2.0;
                let focus = lens.focal / (1.0 + (lens.focal / z_r).powi(2));
                focus - self.cell.length / 2.0
            }
            (None, ProbeShape::Plane) => lens.focal - self.cell.length / 2.0,
        };
        if distance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "lens sits inside the cell (distance {distance:e} m)"
            )));
        }
        let lensed = lens_phase(&field, lens.focal, lambda)?;
        Ok(free_space(&lensed, k, distance))
    }

    pub fn propagation_config(
        &self,
        grid: &TransverseGrid,
        drive: &DriveProfile,
    ) -> Result<PropagationConfig> {
        let k = self.atom.wavenumber();
        let dz = match self.cell.dz {
            Some(dz) => dz,
            None => auto_step(grid, drive, &self.atom, k, self.cell.length)?,
        };
        Ok(PropagationConfig::new(
            self.cell.length,
            dz,
            self.cell.solver,
            self.cell.boundary,
            k,
        )?
        .with_snapshots(self.cell.snapshot_every))
    }

    /// Narrowing predicted from the width laws: `R` at drive maxima, `L/Δx`
    /// at a drive null.
    pub fn predicted_ratio(&self) -> Option<f64> {
        let omega0 = self.drive.omega0()?;
        match self.feature_mode() {
            FeatureMode::Peaks => ratio_r(&self.atom, omega0, self.cell.length).ok(),
            FeatureMode::Dip => {
                let length = self.drive.curvature_length()?;
                let dx = predicted_width_low_od(&self.atom, omega0, length).ok()?;
                (dx > 0.0).then(|| length / dx)
            }
        }
    }

    pub fn run(&self) -> Result<RunOutcome> {
        let grid = self.grid()?;
        let drive = self.drive_profile(&grid)?;
        let probe = self.probe_field(&grid)?;
        let cfg = self.propagation_config(&grid, &drive)?;
        let record = propagate(&probe, &drive, &self.atom, &cfg)?;
        self.evaluate(drive, record)
    }

    fn evaluate(&self, drive: DriveProfile, record: PropagationRecord) -> Result<RunOutcome> {
        let grid = &drive.grid;
        let prom = self.min_prominence;
        let mode = self.feature_mode();
        let (drive_metrics, probe_metrics, input_metrics) = match mode {
            FeatureMode::Peaks => (
                measure(grid, &drive.intensity, prom)?,
                measure(grid, &record.output.intensity(), prom)?,
                measure(grid, &record.input.intensity(), prom).ok(),
            ),
            FeatureMode::Dip => {
                // The drive feature is its dark region: where |Ω_d|² sits below |Ω₀|².
                let peak = drive.descriptor.omega0().map(|o| o * o).unwrap_or(1.0);
                let darkness: Vec<f64> = drive
                    .intensity
                    .iter()
                    .map(|&i| (1.0 - i / peak).max(0.0))
                    .collect();
                (
                    measure(grid, &darkness, prom)?,
                    measure(
                        grid,
                        &absorbance(&record.input.values, &record.output.values),
                        prom,
                    )?,
                    None,
                )
            }
        };
        let mut report = narrowing_report(&drive_metrics, &probe_metrics, self.predicted_ratio());
        report.self_narrowing = input_metrics
            .as_ref()
            .map(|m| m.mean_fwhm() / probe_metrics.mean_fwhm());
        report.power_fraction = Some(record.power_fraction());
        Ok(RunOutcome {
            mode,
            drive,
            record,
            drive_metrics,
            probe_metrics,
            input_metrics,
            report,
        })
    }
}
