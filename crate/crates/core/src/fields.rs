//! Transverse grids, probe fields and drive intensity profiles.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Uniform 1-D grid centred on x = 0 with `x_i = (i - n/2)·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseGrid {
    n: usize,
    width: f64,
    dx: f64,
    kx: Vec<f64>,
}

impl TransverseGrid {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.dx
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }

    /// Angular spatial frequencies in FFT order: 0, 1, …, n/2-1, -n/2, …, -1 (times 2π/width).
    pub fn kx(&self) -> &[f64] {
        &self.kx
    }

    pub fn max_kx(&self) -> f64 {
        PI / self.dx
    }

    /// Sample index nearest to `x`, clamped to the window.
    pub fn index_of(&self, x: f64) -> usize {
        let i = (x / self.dx).round() + (self.n / 2) as f64;
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }
}

pub fn make_grid(n: usize, width: f64) -> Result<TransverseGrid> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size must be a power of two >= 16, got {n}"
        )));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid width must be positive, got {width}"
        )));
    }
    let dk = 2.0 * PI / width;
    let kx = (0..n)
        .map(|j| {
            let f = if j < n / 2 {
                j as i64
            } else {
                j as i64 - n as i64
            };
            f as f64 * dk
        })
        .collect();
    Ok(TransverseGrid {
        n,
        width,
        dx: width / n as f64,
        kx,
    })
}

/// Complex probe Rabi frequency Ω_p(x) [rad/s].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: TransverseGrid,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: TransverseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a grid of {}",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite { step: 0, index: i });
        }
        Ok(Self { grid, values })
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn amplitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Σ|Ω_p|²·dx.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn plane_probe(grid: &TransverseGrid, amplitude: f64) -> ComplexField {
    ComplexField {
        grid: grid.clone(),
        values: vec![Complex64::new(amplitude, 0.0); grid.n()],
    }
}

/// `Ω_p0·exp(-(x - center)²/w₀²)`, flat phase.
pub fn gaussian_probe(
    grid: &TransverseGrid,
    amplitude: f64,
    waist: f64,
    center: f64,
) -> Result<ComplexField> {
    if !(waist > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "waist must be positive, got {waist}"
        )));
    }
    let values = grid
        .positions()
        .map(|x| {
            let u = (x - center) / waist;
            Complex64::new(amplitude * (-u * u).exp(), 0.0)
        })
        .collect();
    Ok(ComplexField {
        grid: grid.clone(),
        values,
    })
}

/// Thin lens of focal length `focal` at wavelength `lambda`.
///
/// The phase `exp(+i·k·x²/(2f))` converges the beam under the propagator of
/// [`crate::propagation`], whose free-space step multiplies each mode by
/// `exp(+i·k_x²·z/(2k))`.
pub fn lens_phase(field: &ComplexField, focal: f64, lambda: f64) -> Result<ComplexField> {
    if focal == 0.0 || focal.is_nan() {
        return Err(Error::InvalidArgument(
            "focal length must be nonzero".into(),
        ));
    }
    let k = 2.0 * PI / lambda;
    let values = field
        .values
        .iter()
        .zip(field.grid.positions())
        .map(|(v, x)| v * Complex64::from_polar(1.0, k * x * x / (2.0 * focal)))
        .collect();
    Ok(ComplexField {
        grid: field.grid.clone(),
        values,
    })
}

/// Analytic description of a drive pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum DriveDescriptor {
    /// `|Ω₀|² cos²(π(x - x₀)/Λ)`.
    Interference {
        omega0: f64,
        period: f64,
        x0: f64,
    },
    /// `|Ω₀|² max(0, 1 - ((x - x₀)/L)²)`.
    ParabolicMax {
        omega0: f64,
        length: f64,
        x0: f64,
    },
    /// `|Ω₀|² (x/L)²`.
    ParabolicNull {
        omega0: f64,
        length: f64,
    },
    FromFile {
        path: PathBuf,
    },
}

impl DriveDescriptor {
    /// Drive Rabi frequency Ω₀ at the pattern extremum, when known analytically.
    pub fn omega0(&self) -> Option<f64> {
        match *self {
            DriveDescriptor::Interference { omega0, .. }
            | DriveDescriptor::ParabolicMax { omega0, .. }
            | DriveDescriptor::ParabolicNull { omega0, .. } => Some(omega0),
            DriveDescriptor::FromFile { .. } => None,
        }
    }

    /// Curvature length L of the pattern near its extrema.
    pub fn curvature_length(&self) -> Option<f64> {
        match *self {
            DriveDescriptor::Interference { period, .. } => {
                Some(equivalent_parabolic_length(period))
            }
            DriveDescriptor::ParabolicMax { length, .. }
            | DriveDescriptor::ParabolicNull { length, .. } => Some(length),
            DriveDescriptor::FromFile { .. } => None,
        }
    }
}

/// Drive intensity |Ω_d(x)|² [rad²/s²], constant along z.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveProfile {
    pub grid: TransverseGrid,
    pub intensity: Vec<f64>,
    pub descriptor: DriveDescriptor,
}

impl DriveProfile {
    pub fn max_intensity(&self) -> f64 {
        self.intensity.iter().copied().fold(0.0, f64::max)
    }
}

pub fn interference_drive(
    grid: &TransverseGrid,
    omega0: f64,
    period: f64,
    x0: f64,
) -> Result<DriveProfile> {
    if !(period > 2.0 * grid.dx()) {
        return Err(Error::UnresolvedFringe {
            period,
            dx: grid.dx(),
        });
    }
    let peak = omega0 * omega0;
    let intensity = grid
        .positions()
        .map(|x| {
            let c = (PI * (x - x0) / period).cos();
            peak * c * c
        })
        .collect();
    Ok(DriveProfile {
        grid: grid.clone(),
        intensity,
        descriptor: DriveDescriptor::Interference { omega0, period, x0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabolicBranch {
    Max,
    Null,
}

/// The two local forms of the drive near its extrema. The `Null` branch is
/// centred on x = 0 and ignores `x0`.
pub fn parabolic_drive(
    grid: &TransverseGrid,
    branch: ParabolicBranch,
    omega0: f64,
    length: f64,
    x0: f64,
) -> Result<DriveProfile> {
    if !(length > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "curvature length must be positive, got {length}"
        )));
    }
    let peak = omega0 * omega0;
    let (intensity, descriptor) = match branch {
        ParabolicBranch::Max => (
            grid.positions()
                .map(|x| {
                    let u = (x - x0) / length;
                    peak * (1.0 - u * u).max(0.0)
                })
                .collect(),
            DriveDescriptor::ParabolicMax { omega0, length, x0 },
        ),
        ParabolicBranch::Null => (
            grid.positions()
                .map(|x| {
                    let u = x / length;
                    peak * u * u
                })
                .collect(),
            DriveDescriptor::ParabolicNull { omega0, length },
        ),
    };
    Ok(DriveProfile {
        grid: grid.clone(),
        intensity,
        descriptor,
    })
}

/// Curvature length L of the parabola `1 - (x/L)²` osculating `cos²(πx/Λ)` at
/// a fringe maximum (equal second derivatives): `L = Λ/π`.
pub fn equivalent_parabolic_length(period: f64) -> f64 {
    period / PI
}

#[derive(Debug, Deserialize)]
struct DriveSample {
    x_m: f64,
    omega_d_sq: f64,
}

/// Reads a `x_m,omega_d_sq` CSV and interpolates it linearly onto `grid`.
/// Positions outside the tabulated range take the nearest end value.
pub fn drive_from_file(grid: &TransverseGrid, path: &Path) -> Result<DriveProfile> {
    let fail = |msg: String| Error::DriveFile {
        path: path.to_path_buf(),
        msg,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| fail(e.to_string()))?;
    let headers = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x_m", "omega_d_sq"] {
        return Err(fail(format!(
            "expected header `x_m,omega_d_sq`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut table: Vec<DriveSample> = Vec::new();
    for (line, row) in reader.deserialize().enumerate() {
        let s: DriveSample = row.map_err(|e| fail(e.to_string()))?;
        if !(s.x_m.is_finite() && s.omega_d_sq.is_finite()) {
            return Err(fail(format!("non-finite value on data row {}", line + 1)));
        }
        if s.omega_d_sq < 0.0 {
            return Err(fail(format!("negative intensity on data row {}", line + 1)));
        }
        if let Some(prev) = table.last() {
            if s.x_m <= prev.x_m {
                return Err(fail(format!(
                    "x not strictly increasing at data row {}",
                    line + 1
                )));
            }
        }
        table.push(s);
    }
    if table.is_empty() {
        return Err(fail("no data rows".into()));
    }
    let intensity = grid.positions().map(|x| interpolate(&table, x)).collect();
    Ok(DriveProfile {
        grid: grid.clone(),
        intensity,
        descriptor: DriveDescriptor::FromFile {
            path: path.to_path_buf(),
        },
    })
}

fn interpolate(table: &[DriveSample], x: f64) -> f64 {
    let first = &table[0];
    let last = &table[table.len() - 1];
    if x <= first.x_m {
        return first.omega_d_sq;
    }
    if x >= last.x_m {
        return last.omega_d_sq;
    }
    let hi = table.partition_point(|s| s.x_m <= x);
    let (a, b) = (&table[hi - 1], &table[hi]);
    let t = (x - a.x_m) / (b.x_m - a.x_m);
    a.omega_d_sq + t * (b.omega_d_sq - a.omega_d_sq)
}
