//! Profile measurements and the analytic width laws.
//!
//! Peaks are local maxima of a sampled intensity. Their width is the full
//! width at half height above the local valley floor, where the floor is the
//! higher of the minima separating the peak from its detected neighbours.
//! A side facing the window edge has no neighbour; it only sets the floor
//! when the peak has no neighbour at all.

use std::fmt;

use num_complex::Complex64;

use crate::atomic::{complex_rates, AtomicParams};
use crate::error::{Error, Result};
use crate::fields::TransverseGrid;

pub const DEFAULT_MIN_PROMINENCE: f64 = 0.2;

/// Detected peaks closer than this many samples apart are merged.
const MIN_PEAK_SEPARATION: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamMetrics {
    pub peak_positions: Vec<f64>,
    pub peak_fwhm: Vec<f64>,
    /// Mean distance between adjacent peaks; `None` for a single peak.
    pub peak_spacing: Option<f64>,
    /// Spacing over mean FWHM; `None` for a single peak.
    pub finesse: Option<f64>,
    /// Σ intensity·dx.
    pub total_power: f64,
    /// Lowest valley floor between adjacent peaks, or the floor of a lone peak.
    pub valley_minimum: f64,
}

impl BeamMetrics {
    pub fn mean_fwhm(&self) -> f64 {
        self.peak_fwhm.iter().sum::<f64>() / self.peak_fwhm.len() as f64
    }

    pub fn peak_count(&self) -> usize {
        self.peak_positions.len()
    }
}

/// Index of every strict local maximum in the interior; a flat top counts
/// once, at its leftmost sample.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                peaks.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Height above the higher of the two bases found by walking outwards until a
/// higher sample or the window edge.
fn prominence(y: &[f64], peak: usize) -> f64 {
    let h = y[peak];
    let mut left_min = h;
    for &v in y[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &y[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

fn min_between(y: &[f64], a: usize, b: usize) -> f64 {
    y[a..=b].iter().copied().fold(f64::INFINITY, f64::min)
}

enum Crossing {
    At(f64),
    /// Ran into the window edge above the level.
    Edge,
}

fn crossing(y: &[f64], peak: usize, level: f64, rightwards: bool) -> Crossing {
    let mut i = peak;
    loop {
        let next = if rightwards {
            if i + 1 >= y.len() {
                return Crossing::Edge;
            }
            i + 1
        } else {
            if i == 0 {
                return Crossing::Edge;
            }
            i - 1
        };
        if y[next] <= level {
            let t = (y[i] - level) / (y[i] - y[next]);
            let pos = if rightwards {
                i as f64 + t
            } else {
                i as f64 - t
            };
            return Crossing::At(pos);
        }
        i = next;
    }
}

/// Peaks, widths, spacing and finesse of `intensity` sampled on `grid`.
///
/// Peaks with prominence below `min_prominence·max(intensity)` are ignored.
/// A peak whose half-height crossing runs off a window edge with no
/// neighbour beyond it is a fringe cut by the window and is dropped, unless
/// it is the only peak, which is an error.
pub fn measure(
    grid: &TransverseGrid,
    intensity: &[f64],
    min_prominence: f64,
) -> Result<BeamMetrics> {
    if intensity.len() != grid.n() {
        return Err(Error::GridMismatch(format!(
            "{} samples on a grid of {}",
            intensity.len(),
            grid.n()
        )));
    }
    let global_max = intensity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(global_max > 0.0) || !global_max.is_finite() {
        return Err(Error::NoPeak);
    }
    let threshold = min_prominence * global_max;

    let mut peaks: Vec<usize> = Vec::new();
    for p in local_maxima(intensity) {
        if prominence(intensity, p) < threshold {
            continue;
        }
        match peaks.last() {
            Some(&q) if p - q < MIN_PEAK_SEPARATION => {
                if intensity[p] > intensity[q] {
                    *peaks.last_mut().unwrap() = p;
                }
            }
            _ => peaks.push(p),
        }
    }
    if peaks.is_empty() {
        return Err(Error::NoPeak);
    }

    let n = intensity.len();
    let mut kept: Vec<(usize, f64, f64)> = Vec::new();
    for (j, &p) in peaks.iter().enumerate() {
        let left = (j > 0).then(|| min_between(intensity, peaks[j - 1], p));
        let right = (j + 1 < peaks.len()).then(|| min_between(intensity, p, peaks[j + 1]));
        let floor = match (left, right) {
            (Some(l), Some(r)) => l.max(r),
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => min_between(intensity, 0, p).max(min_between(intensity, p, n - 1)),
        };
        let level = floor + 0.5 * (intensity[p] - floor);
        match (
            crossing(intensity, p, level, false),
            crossing(intensity, p, level, true),
        ) {
            (Crossing::At(l), Crossing::At(r)) => kept.push((p, (r - l) * grid.dx(), floor)),
            _ if peaks.len() > 1 => {
                log::debug!("dropping window-truncated peak at sample {p}");
            }
            _ => return Err(Error::UnresolvedPeak { index: p }),
        }
    }
    if kept.is_empty() {
        return Err(Error::UnresolvedPeak { index: peaks[0] });
    }

    let peak_positions: Vec<f64> = kept.iter().map(|k| grid.x(k.0)).collect();
    let peak_fwhm: Vec<f64> = kept.iter().map(|k| k.1).collect();
    let valley_minimum = if kept.len() > 1 {
        kept.windows(2)
            .map(|w| min_between(intensity, w[0].0, w[1].0))
            .fold(f64::INFINITY, f64::min)
    } else {
        kept[0].2
    };
    let peak_spacing = (kept.len() > 1)
        .then(|| (peak_positions[kept.len() - 1] - peak_positions[0]) / (kept.len() - 1) as f64);
    let mean_fwhm = peak_fwhm.iter().sum::<f64>() / peak_fwhm.len() as f64;
    Ok(BeamMetrics {
        finesse: peak_spacing.map(|s| s / mean_fwhm),
        peak_spacing,
        peak_positions,
        peak_fwhm,
        total_power: intensity.iter().sum::<f64>() * grid.dx(),
        valley_minimum,
    })
}

/// Full width between the points where `amplitude` falls to `1/e` of its
/// maximum, linearly interpolated. For a Gaussian `exp(-x²/w²)` this is `2w`.
pub fn e_fold_width(grid: &TransverseGrid, amplitude: &[f64]) -> Result<f64> {
    if amplitude.len() != grid.n() {
        return Err(Error::GridMismatch(format!(
            "{} samples on a {}-point grid",
            amplitude.len(),
            grid.n()
        )));
    }
    let (imax, &amax) = amplitude
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .ok_or(Error::NoPeak)?;
    if !(amax > 0.0) {
        return Err(Error::NoPeak);
    }
    let level = amax / std::f64::consts::E;
    let a = amplitude;
    let mut r = imax;
    while r + 1 < a.len() && a[r + 1] > level {
        r += 1;
    }
    let mut l = imax;
    while l > 0 && a[l - 1] > level {
        l -= 1;
    }
    if r + 1 == a.len() || l == 0 {
        return Err(Error::UnresolvedPeak { index: imax });
    }
    let right = r as f64 + (a[r] - level) / (a[r] - a[r + 1]);
    let left = l as f64 - (a[l] - level) / (a[l] - a[l - 1]);
    Ok((right - left) * grid.dx())
}

/// Optical depth `-ln(|out|²/|in|²)` per sample; samples without input light are 0.
pub fn absorbance(input: &[Complex64], output: &[Complex64]) -> Vec<f64> {
    input
        .iter()
        .zip(output)
        .map(|(a, b)| {
            let (i_in, i_out) = (a.norm_sqr(), b.norm_sqr());
            if i_in > 0.0 {
                -(i_out / i_in).ln()
            } else {
                0.0
            }
        })
        .collect()
}

/// Width of the excited region around a drive null at low optical density,
/// `L·√|Γ_ab Γ_cb| / |Ω|`.
pub fn predicted_width_low_od(p: &AtomicParams, omega: f64, length: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::ZeroDrive);
    }
    let (ab, cb) = complex_rates(p);
    let product = Complex64::from(ab) * Complex64::from(cb);
    Ok(length * product.norm().sqrt() / omega.abs())
}

/// Width of the transmitted peaks at a drive maximum at high optical density
/// and zero detuning, `L·|Ω| / √(η γ_cb z)`.
pub fn predicted_width_high_od(p: &AtomicParams, omega: f64, length: f64, z: f64) -> Result<f64> {
    let denom = p.eta() * p.gamma_cb() * z;
    if !(denom > 0.0) {
        return Err(Error::ZeroDenominator(format!(
            "eta·gamma_cb·z = {denom:e} must be positive"
        )));
    }
    Ok(length * omega.abs() / denom.sqrt())
}

/// Narrowing ratio `R = √(η z (γ_cb/|Ω|² + 2γω²/|Ω|⁴))`.
pub fn ratio_r(p: &AtomicParams, omega: f64, z: f64) -> Result<f64> {
    if omega == 0.0 {
        return Err(Error::ZeroDrive);
    }
    if !(p.eta() > 0.0 && z > 0.0) {
        return Err(Error::ZeroDenominator(format!(
            "eta = {:e} and z = {z:e} must be positive",
            p.eta()
        )));
    }
    let o2 = omega * omega;
    let w2 = p.detuning() * p.detuning();
    Ok((p.eta() * z * (p.gamma_cb() / o2 + 2.0 * p.gamma() * w2 / (o2 * o2))).sqrt())
}

/// Drive and transmitted-probe features side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct NarrowingReport {
    pub drive_fwhm: f64,
    pub probe_fwhm: f64,
    /// Drive FWHM over probe FWHM; above 1 when the probe features are narrower.
    pub fwhm_ratio: f64,
    /// Probe finesse over drive finesse, when both show at least two peaks.
    pub finesse_ratio: Option<f64>,
    pub drive_finesse: Option<f64>,
    pub probe_finesse: Option<f64>,
    pub predicted_ratio: Option<f64>,
    /// Input probe FWHM over output probe FWHM, when the input has a measurable peak.
    pub self_narrowing: Option<f64>,
    pub power_fraction: Option<f64>,
}

pub fn narrowing_report(
    drive: &BeamMetrics,
    probe: &BeamMetrics,
    predicted_ratio: Option<f64>,
) -> NarrowingReport {
    let drive_fwhm = drive.mean_fwhm();
    let probe_fwhm = probe.mean_fwhm();
    NarrowingReport {
        drive_fwhm,
        probe_fwhm,
        fwhm_ratio: drive_fwhm / probe_fwhm,
        finesse_ratio: probe.finesse.zip(drive.finesse).map(|(p, d)| p / d),
        drive_finesse: drive.finesse,
        probe_finesse: probe.finesse,
        predicted_ratio,
        self_narrowing: None,
        power_fraction: None,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.12e}")).unwrap_or_default()
}

impl NarrowingReport {
    pub const CSV_HEADER: &'static str = "drive_fwhm_m,probe_fwhm_m,fwhm_ratio,finesse_ratio,drive_finesse,probe_finesse,ratio_predicted,self_narrowing,power_fraction";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{:.12e},{},{},{},{},{},{}",
            self.drive_fwhm,
            self.probe_fwhm,
            self.fwhm_ratio,
            opt(self.finesse_ratio),
            opt(self.drive_finesse),
            opt(self.probe_finesse),
            opt(self.predicted_ratio),
            opt(self.self_narrowing),
            opt(self.power_fraction),
        )
    }
}

impl fmt::Display for NarrowingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let na = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into());
        writeln!(f, "drive_fwhm_m       = {:.6e}", self.drive_fwhm)?;
        writeln!(f, "probe_fwhm_m       = {:.6e}", self.probe_fwhm)?;
        writeln!(f, "fwhm_ratio         = {:.6}", self.fwhm_ratio)?;
        writeln!(f, "drive_finesse      = {}", na(self.drive_finesse))?;
        writeln!(f, "probe_finesse      = {}", na(self.probe_finesse))?;
        writeln!(f, "finesse_ratio      = {}", na(self.finesse_ratio))?;
        writeln!(f, "ratio_predicted    = {}", na(self.predicted_ratio))?;
        writeln!(f, "self_narrowing     = {}", na(self.self_narrowing))?;
        writeln!(f, "power_fraction     = {}", na(self.power_fraction))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fields::make_grid;

    fn params(eta: f64, gamma: f64, gamma_cb: f64, detuning: f64) -> AtomicParams {
        AtomicParams::new(795e-9, 1.0, gamma, Some(gamma), gamma_cb, detuning)
            .unwrap()
            .with_eta(eta)
            .unwrap()
    }

    #[test]
    fn gaussian_fwhm() {
        let g = make_grid(4096, 1.0).unwrap();
        let sigma = 0.03;
        let y: Vec<f64> = g
            .positions()
            .map(|x| (-x * x / (2.0 * sigma * sigma)).exp())
            .collect();
        let m = measure(&g, &y, DEFAULT_MIN_PROMINENCE).unwrap();
        assert_eq!(m.peak_count(), 1);
        let expected = 2.0 * (2.0 * 2f64.ln()).sqrt() * sigma;
        assert!((m.peak_fwhm[0] - expected).abs() / expected < 5e-3);
        assert_eq!(m.peak_spacing, None);
        assert_eq!(m.finesse, None);
    }

    #[test]
    fn fringe_metrics() {
        let g = make_grid(4096, 8.0).unwrap();
        let period = 1.0;
        let y: Vec<f64> = g
            .positions()
            .map(|x| (PI * x / period).cos().powi(2))
            .collect();
        let m = measure(&g, &y, DEFAULT_MIN_PROMINENCE).unwrap();
        assert_eq!(m.peak_count(), 7);
        assert!((m.peak_spacing.unwrap() - period).abs() < 1e-12);
        for w in &m.peak_fwhm {
            assert!((w - period / 2.0).abs() < 1e-5);
        }
        assert!((m.finesse.unwrap() - 2.0).abs() < 1e-4);
        assert!(m.valley_minimum < 1e-6);
    }

    #[test]
    fn truncated_edge_fringes_are_dropped() {
        // Window edges cut the outermost fringes at different phases.
        let g = make_grid(2048, 7.3).unwrap();
        let y: Vec<f64> = g
            .positions()
            .map(|x| (PI * (x - 0.21)).cos().powi(2))
            .collect();
        let m = measure(&g, &y, DEFAULT_MIN_PROMINENCE).unwrap();
        for w in &m.peak_fwhm {
            assert!((w - 0.5).abs() < 1e-4, "{w}");
        }
        assert!((m.finesse.unwrap() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn measure_errors() {
        let g = make_grid(64, 1.0).unwrap();
        assert!(matches!(
            measure(&g, &vec![0.0; 64], 0.2),
            Err(Error::NoPeak)
        ));
        let ramp: Vec<f64> = (0..64).map(|i| i as f64).collect();
        assert!(matches!(measure(&g, &ramp, 0.2), Err(Error::NoPeak)));
        // Two peaks whose outer half-height crossings both fall off the window.
        let mut y = vec![0.0; 64];
        y[..3].copy_from_slice(&[6.0, 9.0, 10.0]);
        y[61..].copy_from_slice(&[10.0, 9.0, 6.0]);
        assert!(matches!(
            measure(&g, &y, 0.0),
            Err(Error::UnresolvedPeak { .. })
        ));
        assert!(matches!(
            measure(&g, &[1.0; 3], 0.2),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn plateau_and_close_peaks() {
        let g = make_grid(16, 16.0).unwrap();
        let y = [
            0., 0., 1., 3., 3., 3., 1., 0., 0., 2., 1., 2.5, 0., 0., 0., 0.,
        ];
        let m = measure(&g, &y, 0.1).unwrap();
        // Plateau reported at its leftmost sample; the peaks at 9 and 11 merge to 11.
        assert_eq!(m.peak_positions, vec![g.x(3), g.x(11)]);
    }

    #[test]
    fn valley_referenced_widths() {
        // Two equal Gaussians on a pedestal between them: half height is
        // taken from the valley floor, not from zero.
        let g = make_grid(4096, 10.0).unwrap();
        let s = 0.4;
        let y: Vec<f64> = g
            .positions()
            .map(|x| {
                (-(x - 1.0f64).powi(2) / (2.0 * s * s)).exp()
                    + (-(x + 1.0f64).powi(2) / (2.0 * s * s)).exp()
            })
            .collect();
        let m = measure(&g, &y, 0.1).unwrap();
        assert_eq!(m.peak_count(), 2);
        let floor = m.valley_minimum;
        assert!(floor > 0.0);
        let top = y[g.index_of(m.peak_positions[1])];
        let level = floor + 0.5 * (top - floor);
        let x_right = m.peak_positions[1] + m.peak_fwhm[1] / 2.0;
        let approx = y[g.index_of(x_right)];
        assert!((approx - level).abs() < 0.02, "{approx} vs {level}");
    }

    #[test]
    fn low_density_width_examples() {
        let p = params(1.0, 1.0, 0.01, 0.0);
        assert!((predicted_width_low_od(&p, 1.0, 1e-3).unwrap() - 1e-4).abs() < 1e-18);
        let a = predicted_width_low_od(&p, 1.0, 1e-3).unwrap();
        let b = predicted_width_low_od(&p, 2.0, 1e-3).unwrap();
        assert!((a / b - 2.0).abs() < 1e-15);
        let p0 = params(1.0, 1.0, 0.0, 0.0);
        assert_eq!(predicted_width_low_od(&p0, 1.0, 1e-3).unwrap(), 0.0);
        assert!(matches!(
            predicted_width_low_od(&p, 0.0, 1e-3),
            Err(Error::ZeroDrive)
        ));
    }

    #[test]
    fn high_density_width_examples() {
        let p = params(100.0, 1.0, 0.01, 0.0);
        assert!((predicted_width_high_od(&p, 1.0, 1e-3, 1.0).unwrap() - 1e-3).abs() < 1e-15);
        let a = predicted_width_high_od(&p, 1.0, 1e-3, 1.0).unwrap();
        let b = predicted_width_high_od(&p, 1.0, 1e-3, 4.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-15);
        assert!(predicted_width_high_od(&p, 1.0, 1e-3, 0.0).is_err());
        let r = ratio_r(&p, 1.0, 1.0).unwrap();
        assert!((1e-3 / a - r).abs() / r < 1e-14);
    }

    #[test]
    fn ratio_examples() {
        let p = params(100.0, 1.0, 0.01, 0.0);
        assert!((ratio_r(&p, 2.0, 1.0).unwrap() - (100.0f64 * 0.01).sqrt() / 2.0).abs() < 1e-15);
        let p = params(100.0, 1.0, 0.01, 1.0);
        assert!((ratio_r(&p, 1.0, 1.0).unwrap() - 201f64.sqrt()).abs() < 1e-12);
        assert!((201f64.sqrt() - 14.177).abs() < 1e-3);
        let q = params(100.0, 1.0, 0.01, -1.0);
        assert_eq!(
            ratio_r(&p, 1.0, 1.0).unwrap(),
            ratio_r(&q, 1.0, 1.0).unwrap()
        );
        assert!(matches!(ratio_r(&p, 0.0, 1.0), Err(Error::ZeroDrive)));
    }

    fn metrics(fwhm: f64, spacing: f64) -> BeamMetrics {
        BeamMetrics {
            peak_positions: vec![-spacing / 2.0, spacing / 2.0],
            peak_fwhm: vec![fwhm, fwhm],
            peak_spacing: Some(spacing),
            finesse: Some(spacing / fwhm),
            total_power: 1.0,
            valley_minimum: 0.0,
        }
    }

    #[test]
    fn report_ratios() {
        let r = narrowing_report(&metrics(0.4e-3, 0.8e-3), &metrics(0.1e-3, 0.8e-3), None);
        assert!((r.fwhm_ratio - 4.0).abs() < 1e-12);
        assert!((r.finesse_ratio.unwrap() - 4.0).abs() < 1e-12);
        let r = narrowing_report(&metrics(165e-6, 3e-4), &metrics(93e-6, 3e-4), None);
        assert!((r.fwhm_ratio - 1.774).abs() < 1e-3);
        let m = metrics(1e-4, 3e-4);
        let r = narrowing_report(&m, &m, Some(1.0));
        assert_eq!((r.fwhm_ratio, r.finesse_ratio), (1.0, Some(1.0)));
        assert_eq!(
            r.csv_row().split(',').count(),
            NarrowingReport::CSV_HEADER.split(',').count()
        );
    }
}
