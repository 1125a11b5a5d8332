//! Families of runs over one scenario parameter.
//!
//! Rows are independent and run on a rayon pool; results come back in axis
//! order whatever the worker count.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::DriveDescriptor;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// Probe detuning, Hz.
    Detuning,
    /// Cell length, m.
    CellLength,
    /// Drive Rabi frequency Ω₀, Hz.
    DriveStrength,
    /// Atomic density, m⁻³.
    Density,
}

impl AxisKind {
    pub fn name(self) -> &'static str {
        match self {
            AxisKind::Detuning => "detuning_hz",
            AxisKind::CellLength => "cell_length_m",
            AxisKind::DriveStrength => "omega0_hz",
            AxisKind::Density => "density_m3",
        }
    }
}

impl FromStr for AxisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            AxisKind::Detuning,
            AxisKind::CellLength,
            AxisKind::DriveStrength,
            AxisKind::Density,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown sweep axis `{s}` (expected detuning_hz, cell_length_m, omega0_hz or density_m3)"
            ))
        })
    }
}

impl fmt::Display for AxisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axis values are kept in the units of the axis name (Hz, m, m⁻³).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub kind: AxisKind,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(kind: AxisKind, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("sweep axis is empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "sweep axis has non-finite values".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "sweep axis values must be strictly increasing".into(),
            ));
        }
        Ok(Self { kind, values })
    }

    /// Parses `name=start:stop:count`, endpoints inclusive.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("axis spec `{spec}`: {why}"));
        let (name, range) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected name=start:stop:count"))?;
        let kind: AxisKind = name.trim().parse()?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad("expected start:stop:count"));
        };
        let start: f64 = start
            .trim()
            .parse()
            .map_err(|_| bad("start is not a number"))?;
        let stop: f64 = stop
            .trim()
            .parse()
            .map_err(|_| bad("stop is not a number"))?;
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| bad("count is not a non-negative integer"))?;
        let values = match count {
            0 => return Err(bad("count must be at least 1")),
            1 if start != stop => return Err(bad("a single-point axis needs start == stop")),
            1 => vec![start],
            _ => {
                let m = (count - 1) as f64;
                (0..count)
                    .map(|i| (start * (m - i as f64) + stop * i as f64) / m)
                    .collect()
            }
        };
        Self::new(kind, values).map_err(|e| bad(&e.to_string()))
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: SweepAxis,
    pub output_dir: Option<PathBuf>,
    /// Worker threads; `None` uses every available processor.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowMetrics {
    pub probe_fwhm: f64,
    pub drive_fwhm: f64,
    pub ratio_measured: f64,
    pub ratio_predicted: Option<f64>,
    pub power_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub result: std::result::Result<RowMetrics, String>,
}

/// The scenario at one axis value.
pub fn scenario_at(base: &Scenario, kind: AxisKind, value: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match kind {
        AxisKind::Detuning => s.atom = s.atom.with_detuning(2.0 * PI * value)?,
        AxisKind::Density => s.atom = s.atom.with_density(value)?,
        AxisKind::CellLength => {
            if !(value > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "cell length {value} must be positive"
                )));
            }
            s.cell.length = value;
            s.cell.dz = s.cell.dz.map(|dz| dz.min(value));
        }
        AxisKind::DriveStrength => {
            let omega = 2.0 * PI * value;
            s.drive = match s.drive {
                DriveDescriptor::Interference { period, x0, .. } => DriveDescriptor::Interference {
                    omega0: omega,
                    period,
                    x0,
                },
                DriveDescriptor::ParabolicMax { length, x0, .. } => DriveDescriptor::ParabolicMax {
                    omega0: omega,
                    length,
                    x0,
                },
                DriveDescriptor::ParabolicNull { length, .. } => DriveDescriptor::ParabolicNull {
                    omega0: omega,
                    length,
                },
                DriveDescriptor::FromFile { .. } => {
                    return Err(Error::InvalidArgument(
                        "drive strength cannot be swept for a tabulated drive".into(),
                    ))
                }
            };
        }
    }
    Ok(s)
}

fn run_row(base: &Scenario, kind: AxisKind, value: f64) -> SweepRow {
    let result = scenario_at(base, kind, value)
        .and_then(|s| s.run())
        .map(|o| RowMetrics {
            probe_fwhm: o.report.probe_fwhm,
            drive_fwhm: o.report.drive_fwhm,
            ratio_measured: o.report.fwhm_ratio,
            ratio_predicted: o.report.predicted_ratio,
            power_fraction: o.report.power_fraction.unwrap_or(0.0),
        })
        .map_err(|e| e.to_string());
    SweepRow {
        axis_value: value,
        result,
    }
}

/// Runs every axis value. Individual failures are kept in their rows; the
/// sweep itself fails only when no row succeeds.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = spec.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let kind = spec.axis.kind;
    let rows: Vec<SweepRow> = pool.install(|| {
        spec.axis
            .values
            .par_iter()
            .map(|&v| run_row(&spec.base, kind, v))
            .collect()
    });
    if let Some(first) = rows.iter().find_map(|r| r.result.as_ref().err()) {
        if rows.iter().all(|r| r.result.is_err()) {
            return Err(Error::SweepFailed(first.clone()));
        }
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str =
    "axis_name,axis_value,probe_fwhm_m,drive_fwhm_m,ratio_measured,ratio_predicted,power_fraction,error";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_sweep_csv<W: Write>(
    mut out: W,
    kind: AxisKind,
    rows: &[SweepRow],
) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        match &row.result {
            Ok(m) => writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e},",
                kind.name(),
                row.axis_value,
                m.probe_fwhm,
                m.drive_fwhm,
                m.ratio_measured,
                m.ratio_predicted
                    .map(|r| format!("{r:.12e}"))
                    .unwrap_or_default(),
                m.power_fraction,
            )?,
            Err(e) => writeln!(
                out,
                "{},{:.12e},,,,,,{}",
                kind.name(),
                row.axis_value,
                csv_field(e)
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inclusive_ranges() {
        let a = SweepAxis::parse("detuning_hz=-2e6:2e6:21").unwrap();
        assert_eq!(a.kind, AxisKind::Detuning);
        assert_eq!(a.values.len(), 21);
        assert_eq!(a.values[0], -2e6);
        assert_eq!(a.values[10], 0.0);
        assert_eq!(a.values[20], 2e6);
        for i in 0..21 {
            assert_eq!(a.values[i], -a.values[20 - i]);
        }
        let a = SweepAxis::parse("detuning_hz=0:0:1").unwrap();
        assert_eq!(a.values, vec![0.0]);
        let a = SweepAxis::parse("cell_length_m=0.01:0.04:4").unwrap();
        assert_eq!(a.values, vec![0.01, 0.02, 0.03, 0.04]);
    }

    #[test]
    fn rejects_malformed_axes() {
        for spec in [
            "detuning_hz=0:1:0",
            "detuning_hz=0:1",
            "detuning_hz",
            "detuning=0:1:3",
            "detuning_hz=1:0:3",
            "detuning_hz=0:1:1",
            "detuning_hz=a:1:3",
            "detuning_hz=0:1:-3",
        ] {
            assert!(SweepAxis::parse(spec).is_err(), "{spec}");
        }
        assert!(SweepAxis::new(AxisKind::Density, vec![]).is_err());
        assert!(SweepAxis::new(AxisKind::Density, vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn error_rows_are_quoted_when_needed() {
        let rows = vec![SweepRow {
            axis_value: 1.0,
            result: Err("bad, \"very\"".into()),
        }];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, AxisKind::Density, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.ends_with("density_m3,1.000000000000e0,,,,,,\"bad, \"\"very\"\"\"\n"));
    }
}
