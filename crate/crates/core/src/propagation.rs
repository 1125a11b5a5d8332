//! Probe propagation through the cell.
//!
//! The probe obeys the paraxial equation
//!
//! ```text
//! ∂Ω_p/∂z = -κ(x) Ω_p - (i/2k) ∂²Ω_p/∂x²
//! ```
//!
//! with κ from [`crate::atomic::kappa`] at the local drive intensity. In the
//! spectral domain the diffraction term multiplies each mode by
//! `exp(+i·k_x²·z/(2k))`. The split-step solver applies half a diffraction
//! step, the full medium factor `exp(-κ·dz)`, then another half step. The
//! Beer–Lambert solver drops diffraction and evaluates `exp(-κ·z)` directly.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::atomic::{kappa, AtomicParams};
use crate::error::{Error, Result};
use crate::fields::{ComplexField, DriveProfile, TransverseGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    SplitStep,
    BeerLambert,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Super-Gaussian absorber over this fraction of the window on each side.
    AbsorbingPad(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationConfig {
    cell_length: f64,
    steps: usize,
    solver: Solver,
    boundary: Boundary,
    k: f64,
    snapshot_every: Option<usize>,
}

impl PropagationConfig {
    /// `k = f64::INFINITY` switches diffraction off while keeping the
    /// split-step machinery.
    pub fn new(
        cell_length: f64,
        dz: f64,
        solver: Solver,
        boundary: Boundary,
        k: f64,
    ) -> Result<Self> {
        if !(cell_length > 0.0 && cell_length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cell length must be positive, got {cell_length}"
            )));
        }
        if !(dz > 0.0 && dz <= cell_length) {
            return Err(Error::InvalidArgument(format!(
                "step must satisfy 0 < dz <= cell length, got {dz}"
            )));
        }
        if let Boundary::AbsorbingPad(f) = boundary {
            if !(0.0..=0.45).contains(&f) {
                return Err(Error::InvalidArgument(format!(
                    "pad fraction must lie in [0, 0.45], got {f}"
                )));
            }
        }
        if !(k > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "wavenumber must be positive, got {k}"
            )));
        }
        let steps = ((cell_length / dz).round() as usize).max(1);
        Ok(Self {
            cell_length,
            steps,
            solver,
            boundary,
            k,
            snapshot_every: None,
        })
    }

    pub fn with_snapshots(mut self, every: Option<usize>) -> Self {
        self.snapshot_every = every.filter(|&m| m > 0);
        self
    }

    pub fn with_cell_length(&self, cell_length: f64) -> Result<Self> {
        let dz = self.dz().min(cell_length);
        Ok(
            Self::new(cell_length, dz, self.solver, self.boundary, self.k)?
                .with_snapshots(self.snapshot_every),
        )
    }

    pub fn cell_length(&self) -> f64 {
        self.cell_length
    }
    pub fn steps(&self) -> usize {
        self.steps
    }
    /// Step actually taken: the cell length divided by the rounded step count.
    pub fn dz(&self) -> f64 {
        self.cell_length / self.steps as f64
    }
    pub fn solver(&self) -> Solver {
        self.solver
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn snapshot_every(&self) -> Option<usize> {
        self.snapshot_every
    }
}

/// Largest step with `|κ|·dz <= 0.05` and `max(k_x²)·dz/(2k) <= 0.5`,
/// capped at the cell length.
pub fn auto_step(
    grid: &TransverseGrid,
    drive: &DriveProfile,
    p: &AtomicParams,
    k: f64,
    cell_length: f64,
) -> Result<f64> {
    let kappa_max = drive
        .intensity
        .iter()
        .map(|&i| kappa(p, i).map(|c| c.norm()))
        .try_fold(0.0f64, |m, c| c.map(|c| m.max(c)))?;
    let mut dz = cell_length;
    if kappa_max > 0.0 {
        dz = dz.min(0.05 / kappa_max);
    }
    let kmax = grid.max_kx();
    if k.is_finite() {
        dz = dz.min(0.5 * 2.0 * k / (kmax * kmax));
    }
    Ok(dz)
}

#[derive(Debug, Clone)]
pub struct PropagationRecord {
    pub input: ComplexField,
    pub output: ComplexField,
    /// `(step index, field after that step)`.
    pub snapshots: Vec<(usize, ComplexField)>,
    /// Σ|Ω_p|²·dx at the input and after every step.
    pub power_trace: Vec<f64>,
    pub dz: f64,
}

impl PropagationRecord {
    pub fn power_fraction(&self) -> f64 {
        let p_in = self.input.power();
        if p_in == 0.0 {
            return 0.0;
        }
        (self.output.power() / p_in).clamp(0.0, 1.0)
    }
}

fn check_grids(field: &ComplexField, drive: &DriveProfile) -> Result<()> {
    if field.grid != drive.grid {
        return Err(Error::GridMismatch(format!(
            "probe grid (n={}, width={:e}) differs from drive grid (n={}, width={:e})",
            field.grid.n(),
            field.grid.width(),
            drive.grid.n(),
            drive.grid.width()
        )));
    }
    if drive.intensity.len() != drive.grid.n() {
        return Err(Error::GridMismatch(
            "drive samples do not match its grid".into(),
        ));
    }
    Ok(())
}

fn kappa_profile(drive: &DriveProfile, p: &AtomicParams) -> Result<Vec<Complex64>> {
    drive.intensity.iter().map(|&i| kappa(p, i)).collect()
}

/// Smooth absorber: 1 in the interior, `exp(-(s/0.3)^4)` at normalised depth
/// `s ∈ [0, 1]` into a pad of `fraction·width` on each side.
pub fn absorbing_mask(grid: &TransverseGrid, fraction: f64) -> Vec<f64> {
    let pad = fraction * grid.width();
    if pad <= 0.0 {
        return vec![1.0; grid.n()];
    }
    let inner = grid.width() / 2.0 - pad;
    grid.positions()
        .map(|x| {
            let s = ((x.abs() - inner) / pad).max(0.0);
            (-(s / 0.3).powi(4)).exp()
        })
        .collect()
}

/// Precomputed operators for repeated symmetric split steps on one grid.
pub struct SplitStepper {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Half-step diffraction phase, with the 1/n inverse-FFT normalisation folded in.
    half_phase: Vec<Complex64>,
    /// Medium factor times boundary mask.
    medium: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(
        drive: &DriveProfile,
        p: &AtomicParams,
        k: f64,
        dz: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        let grid = &drive.grid;
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scale = 1.0 / n as f64;
        let half_phase = grid
            .kx()
            .iter()
            .map(|&kx| {
                let phase = if k.is_finite() {
                    kx * kx * dz / (4.0 * k)
                } else {
                    0.0
                };
                Complex64::from_polar(scale, phase)
            })
            .collect();
        let mask = match boundary {
            Boundary::Periodic => vec![1.0; n],
            Boundary::AbsorbingPad(f) => absorbing_mask(grid, f),
        };
        let medium = kappa_profile(drive, p)?
            .into_iter()
            .zip(mask)
            .map(|(kap, m)| (-kap * dz).exp() * m)
            .collect();
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            forward,
            inverse,
            half_phase,
            medium,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    fn half_diffraction(&mut self, values: &mut [Complex64]) {
        self.forward.process_with_scratch(values, &mut self.scratch);
        for (v, ph) in values.iter_mut().zip(&self.half_phase) {
            *v *= ph;
        }
        self.inverse.process_with_scratch(values, &mut self.scratch);
    }

    /// One symmetric step in place.
    pub fn step(&mut self, values: &mut [Complex64]) {
        self.half_diffraction(values);
        for (v, m) in values.iter_mut().zip(&self.medium) {
            *v *= m;
        }
        self.half_diffraction(values);
    }
}

fn first_non_finite(values: &[Complex64]) -> Option<usize> {
    values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
}

/// A single symmetric split step of length `cfg.dz()`.
pub fn step_splitstep(
    field: &ComplexField,
    drive: &DriveProfile,
    p: &AtomicParams,
    cfg: &PropagationConfig,
) -> Result<ComplexField> {
    check_grids(field, drive)?;
    let mut stepper = SplitStepper::new(drive, p, cfg.k(), cfg.dz(), cfg.boundary())?;
    let mut values = field.values.clone();
    stepper.step(&mut values);
    if let Some(index) = first_non_finite(&values) {
        return Err(Error::NonFinite { step: 1, index });
    }
    Ok(ComplexField {
        grid: field.grid.clone(),
        values,
    })
}

/// Exact paraxial free-space propagation over `distance` in one spectral step.
pub fn free_space(field: &ComplexField, k: f64, distance: f64) -> ComplexField {
    let n = field.grid.n();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut values = field.values.clone();
    forward.process(&mut values);
    let scale = 1.0 / n as f64;
    for (v, &kx) in values.iter_mut().zip(field.grid.kx()) {
        *v *= Complex64::from_polar(scale, kx * kx * distance / (2.0 * k));
    }
    inverse.process(&mut values);
    ComplexField {
        grid: field.grid.clone(),
        values,
    }
}

/// Propagates the probe through the whole cell.
pub fn propagate(
    field: &ComplexField,
    drive: &DriveProfile,
    p: &AtomicParams,
    cfg: &PropagationConfig,
) -> Result<PropagationRecord> {
    check_grids(field, drive)?;
    let probe_max = field.max_amplitude();
    let drive_max = drive.max_intensity().sqrt();
    if p.eta() > 0.0 && probe_max > 0.1 * drive_max {
        log::warn!(
            "probe is not weak: max|Ω_p| = {probe_max:e} exceeds 0.1·max|Ω_d| = {:e}",
            0.1 * drive_max
        );
    }
    match cfg.solver() {
        Solver::BeerLambert => beer_lambert(field, drive, p, cfg),
        Solver::SplitStep => split_step(field, drive, p, cfg),
    }
}

fn beer_lambert(
    field: &ComplexField,
    drive: &DriveProfile,
    p: &AtomicParams,
    cfg: &PropagationConfig,
) -> Result<PropagationRecord> {
    let z = cfg.cell_length();
    let values: Vec<Complex64> = field
        .values
        .iter()
        .zip(kappa_profile(drive, p)?)
        .map(|(v, kap)| v * (-kap * z).exp())
        .collect();
    if let Some(index) = first_non_finite(&values) {
        return Err(Error::NonFinite { step: 1, index });
    }
    let output = ComplexField {
        grid: field.grid.clone(),
        values,
    };
    Ok(PropagationRecord {
        power_trace: vec![field.power(), output.power()],
        input: field.clone(),
        output,
        snapshots: Vec::new(),
        dz: z,
    })
}

fn split_step(
    field: &ComplexField,
    drive: &DriveProfile,
    p: &AtomicParams,
    cfg: &PropagationConfig,
) -> Result<PropagationRecord> {
    let mut stepper = SplitStepper::new(drive, p, cfg.k(), cfg.dz(), cfg.boundary())?;
    let mut values = field.values.clone();
    let dx = field.grid.dx();
    let mut power_trace = Vec::with_capacity(cfg.steps() + 1);
    power_trace.push(field.power());
    let mut snapshots = Vec::new();
    for step in 1..=cfg.steps() {
        stepper.step(&mut values);
        if let Some(index) = first_non_finite(&values) {
            return Err(Error::NonFinite { step, index });
        }
        power_trace.push(values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx);
        if let Some(m) = cfg.snapshot_every() {
            if step % m == 0 {
                snapshots.push((
                    step,
                    ComplexField {
                        grid: field.grid.clone(),
                        values: values.clone(),
                    },
                ));
            }
        }
    }
    Ok(PropagationRecord {
        input: field.clone(),
        output: ComplexField {
            grid: field.grid.clone(),
            values,
        },
        snapshots,
        power_trace,
        dz: cfg.dz(),
    })
}

/// Per-sample excitation proxy `Re κ(x)·|Ω_p(x)|²` (local absorbed power density).
pub fn excited_population_map(
    field: &ComplexField,
    drive: &DriveProfile,
    p: &AtomicParams,
) -> Result<Vec<f64>> {
    check_grids(field, drive)?;
    field
        .values
        .iter()
        .zip(&drive.intensity)
        .map(|(v, &i)| kappa(p, i).map(|k| k.re * v.norm_sqr()))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::analysis::e_fold_width;
    use crate::fields::{
        gaussian_probe, interference_drive, lens_phase, make_grid, parabolic_drive, plane_probe,
        ParabolicBranch,
    };

    const LAMBDA: f64 = 795e-9;

    fn vacuum() -> AtomicParams {
        AtomicParams::new(LAMBDA, 0.0, 3.6e7, None, 6.0e3, 0.0).unwrap()
    }

    fn flat_drive(grid: &TransverseGrid, intensity: f64) -> DriveProfile {
        DriveProfile {
            grid: grid.clone(),
            intensity: vec![intensity; grid.n()],
            descriptor: crate::fields::DriveDescriptor::ParabolicMax {
                omega0: intensity.sqrt(),
                length: f64::INFINITY,
                x0: 0.0,
            },
        }
    }

    #[test]
    fn config_validation() {
        let k = 2.0 * PI / LAMBDA;
        assert!(
            PropagationConfig::new(0.04, 0.0, Solver::SplitStep, Boundary::Periodic, k).is_err()
        );
        assert!(
            PropagationConfig::new(0.04, 0.05, Solver::SplitStep, Boundary::Periodic, k).is_err()
        );
        assert!(PropagationConfig::new(
            0.04,
            0.01,
            Solver::SplitStep,
            Boundary::AbsorbingPad(0.5),
            k
        )
        .is_err());
        let c =
            PropagationConfig::new(0.04, 0.0031, Solver::SplitStep, Boundary::Periodic, k).unwrap();
        assert_eq!(c.steps(), 13);
        assert!((c.dz() * 13.0 - 0.04).abs() < 1e-15);
    }

    #[test]
    fn zero_density_step_is_free_space() {
        let g = make_grid(512, 2e-3).unwrap();
        let f = gaussian_probe(&g, 1.0, 5e-5, 0.0).unwrap();
        let d = interference_drive(&g, 1e7, 3e-4, 0.0).unwrap();
        let k = 2.0 * PI / LAMBDA;
        let cfg =
            PropagationConfig::new(0.01, 0.01, Solver::SplitStep, Boundary::Periodic, k).unwrap();
        let stepped = step_splitstep(&f, &d, &vacuum(), &cfg).unwrap();
        let exact = free_space(&f, k, 0.01);
        for (a, b) in stepped.values.iter().zip(&exact.values) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_uniform_drive_attenuates_uniformly() {
        let g = make_grid(64, 1e-3).unwrap();
        let p = vacuum().with_density(1e15).unwrap();
        let d = flat_drive(&g, 1e13);
        let f = plane_probe(&g, 2.0);
        let cfg = PropagationConfig::new(
            1e-3,
            1e-3,
            Solver::SplitStep,
            Boundary::Periodic,
            p.wavenumber(),
        )
        .unwrap();
        let out = step_splitstep(&f, &d, &p, &cfg).unwrap();
        let expected = 2.0 * (-kappa(&p, 1e13).unwrap().re * 1e-3).exp();
        for v in &out.values {
            assert!((v.norm() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_spreads_by_root_two_over_rayleigh_range() {
        let g = make_grid(4096, 4e-3).unwrap();
        let w0 = 1e-4;
        let k = 2.0 * PI / LAMBDA;
        let z_r = k * w0 * w0 / 2.0;
        let f = gaussian_probe(&g, 1.0, w0, 0.0).unwrap();
        let d = flat_drive(&g, 0.0);
        let p = vacuum().with_eta(0.0).unwrap();
        let cfg =
            PropagationConfig::new(z_r, z_r / 200.0, Solver::SplitStep, Boundary::Periodic, k)
                .unwrap();
        let rec = propagate(&f, &d, &p, &cfg).unwrap();
        let ratio = e_fold_width(&rec.output.grid, &rec.output.amplitude()).unwrap() / (2.0 * w0);
        assert!((ratio - 2f64.sqrt()).abs() / 2f64.sqrt() < 5e-3, "{ratio}");
    }

    #[test]
    fn lens_focuses_to_gaussian_beam_waist() {
        let g = make_grid(4096, 8e-3).unwrap();
        let w0 = 7e-4;
        let focal = 0.75;
        let k = 2.0 * PI / LAMBDA;
        let f = gaussian_probe(&g, 1.0, w0, 0.0).unwrap();
        let lensed = lens_phase(&f, focal, LAMBDA).unwrap();
        let z_r = k * w0 * w0 / 2.0;
        // Waist location and size behind a thin lens for a collimated input.
        let z_focus = focal / (1.0 + (focal / z_r).powi(2));
        let expected = w0 * (focal / z_r) / (1.0 + (focal / z_r).powi(2)).sqrt();
        let at_focus = free_space(&lensed, k, z_focus);
        let w = e_fold_width(&g, &at_focus.amplitude()).unwrap() / 2.0;
        assert!((w - expected).abs() / expected < 5e-3, "{w} vs {expected}");
        // The far-field estimate λf/(πw₀) ≈ 271 µm overshoots by ~7% at f/z_R ≈ 0.39.
        assert!((LAMBDA * focal / (PI * w0) - expected) / expected < 0.1);
        // Converging, not diverging, halfway to the focus.
        let half = free_space(&lensed, k, z_focus / 2.0);
        assert!(e_fold_width(&g, &half.amplitude()).unwrap() < 2.0 * w0);
    }

    #[test]
    fn free_space_conserves_power() {
        let g = make_grid(1024, 2e-3).unwrap();
        let f = gaussian_probe(&g, 1.0, 5e-5, 1e-4).unwrap();
        let d = flat_drive(&g, 0.0);
        let p = vacuum().with_eta(0.0).unwrap();
        let k = p.wavenumber();
        let cfg = PropagationConfig::new(
            0.05,
            0.05 / 1000.0,
            Solver::SplitStep,
            Boundary::Periodic,
            k,
        )
        .unwrap();
        let rec = propagate(&f, &d, &p, &cfg).unwrap();
        let p0 = rec.power_trace[0];
        for p in &rec.power_trace {
            assert!((p - p0).abs() / p0 < 1e-12);
        }
    }

    #[test]
    fn absorbing_pad_removes_edge_field() {
        let g = make_grid(256, 1.0).unwrap();
        let m = absorbing_mask(&g, 0.2);
        assert_eq!(m[g.index_of(0.0)], 1.0);
        assert_eq!(m[g.index_of(0.29)], 1.0);
        assert!(m[0] < 1e-40);
        assert!(m.windows(2).take(128).all(|w| w[1] >= w[0]));
        assert!(absorbing_mask(&g, 0.0).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn power_trace_non_increasing_for_absorber() {
        let g = make_grid(512, 2e-3).unwrap();
        let f = gaussian_probe(&g, 1.0, 3e-4, 0.0).unwrap();
        let d = interference_drive(&g, 2.0 * PI * 1e6, 4e-4, 0.0).unwrap();
        let p = AtomicParams::new(LAMBDA, 1e16, 3.6e7, None, 6.0e3, 0.0).unwrap();
        let cfg = PropagationConfig::new(
            0.02,
            1e-4,
            Solver::SplitStep,
            Boundary::Periodic,
            p.wavenumber(),
        )
        .unwrap();
        let rec = propagate(&f, &d, &p, &cfg).unwrap();
        assert!(rec
            .power_trace
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let g1 = make_grid(64, 1e-3).unwrap();
        let g2 = make_grid(128, 1e-3).unwrap();
        let f = plane_probe(&g1, 1.0);
        let d = flat_drive(&g2, 1.0);
        let p = vacuum();
        let cfg = PropagationConfig::new(
            1e-3,
            1e-3,
            Solver::BeerLambert,
            Boundary::Periodic,
            p.wavenumber(),
        )
        .unwrap();
        assert!(matches!(
            propagate(&f, &d, &p, &cfg),
            Err(Error::GridMismatch(_))
        ));
        assert!(matches!(
            excited_population_map(&f, &d, &p),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn excitation_vanishes_in_perfect_dark_state() {
        let g = make_grid(256, 2e-3).unwrap();
        let p = AtomicParams::new(LAMBDA, 1e16, 3.6e7, None, 0.0, 0.0).unwrap();
        let d = interference_drive(&g, 1e6, 5e-4, 1.25e-4).unwrap();
        let f = plane_probe(&g, 1.0);
        let map = excited_population_map(&f, &d, &p).unwrap();
        for (m, i) in map.iter().zip(&d.intensity) {
            if *i > 0.0 {
                assert_eq!(*m, 0.0);
            }
        }
    }

    #[test]
    fn excitation_half_width_matches_low_density_width() {
        let g = make_grid(4096, 2e-3).unwrap();
        let tau = 2.0 * PI;
        let p = AtomicParams::new(LAMBDA, 1e15, tau * 5.75e6, None, tau * 1e3, 0.0).unwrap();
        let (omega, length) = (tau * 1e6, 1e-3);
        let d = parabolic_drive(&g, ParabolicBranch::Null, omega, length, 0.0).unwrap();
        let f = plane_probe(&g, 1.0);
        let map = excited_population_map(&f, &d, &p).unwrap();
        let centre = g.index_of(0.0);
        let half = map[centre] / 2.0;
        let mut i = centre;
        while map[i + 1] > half {
            i += 1;
        }
        let x = g.x(i) + (map[i] - half) / (map[i] - map[i + 1]) * g.dx();
        let expected = length * (p.gamma() * p.gamma_cb()).sqrt() / omega;
        assert!((x - expected).abs() / expected < 0.01, "{x} vs {expected}");
        // Excitation peaks in the null and is suppressed under strong drive.
        let far = g.index_of(5.0 * expected);
        assert!(map[far] < 0.05 * map[centre]);
    }

    #[test]
    fn monotone_transparency() {
        let g = make_grid(64, 1e-3).unwrap();
        let p = AtomicParams::new(LAMBDA, 1e16, 3.6e7, None, 6.0e3, 0.0).unwrap();
        let weak = flat_drive(&g, 1e12);
        let mut strong = weak.clone();
        for (j, v) in strong.intensity.iter_mut().enumerate() {
            *v *= 1.0 + j as f64;
        }
        let f = plane_probe(&g, 1.0);
        let cfg = PropagationConfig::new(
            0.04,
            0.04,
            Solver::BeerLambert,
            Boundary::Periodic,
            p.wavenumber(),
        )
        .unwrap();
        let a = propagate(&f, &weak, &p, &cfg).unwrap().output.amplitude();
        let b = propagate(&f, &strong, &p, &cfg).unwrap().output.amplitude();
        assert!(a.iter().zip(&b).all(|(a, b)| b >= a));
    }

    #[test]
    fn snapshots_are_recorded() {
        let g = make_grid(64, 1e-3).unwrap();
        let p = vacuum();
        let d = flat_drive(&g, 1.0);
        let f = plane_probe(&g, 1.0);
        let cfg = PropagationConfig::new(
            1e-3,
            1e-4,
            Solver::SplitStep,
            Boundary::Periodic,
            p.wavenumber(),
        )
        .unwrap()
        .with_snapshots(Some(4));
        let rec = propagate(&f, &d, &p, &cfg).unwrap();
        let steps: Vec<usize> = rec.snapshots.iter().map(|s| s.0).collect();
        assert_eq!(steps, vec![4, 8]);
        assert_eq!(rec.power_trace.len(), 11);
    }
}
