//! Linear response of the driven three-level Λ medium.
//!
//! The probe couples |b⟩ ↔ |a⟩, the drive couples |c⟩ ↔ |a⟩. In steady state and
//! to first order in the probe, the amplitude of the probe obeys
//! `dΩ_p/dz = -κ Ω_p` with
//!
//! ```text
//! κ = η Γ_cb / (Γ_ab Γ_cb + |Ω_d|²),   Γ_ab = γ + iω,   Γ_cb = γ_cb + iω
//! ```
//!
//! and `η = 3 λ² N γ_r / 8π`. All rates are angular frequencies (rad/s),
//! lengths are metres.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Atomic and medium constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicParams {
    lambda: f64,
    density: f64,
    gamma_r: f64,
    gamma: f64,
    gamma_cb: f64,
    detuning: f64,
    eta: f64,
}

fn coupling_constant(lambda: f64, density: f64, gamma_r: f64) -> f64 {
    3.0 * lambda * lambda * density * gamma_r / (8.0 * PI)
}

impl AtomicParams {
    /// Builds and validates a parameter set. `gamma = None` selects the
    /// radiative value `gamma_r / 2`.
    pub fn new(
        lambda: f64,
        density: f64,
        gamma_r: f64,
        gamma: Option<f64>,
        gamma_cb: f64,
        detuning: f64,
    ) -> Result<Self> {
        let gamma = gamma.unwrap_or(gamma_r / 2.0);
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(lambda > 0.0 && lambda.is_finite()) {
            return bad("lambda must be positive");
        }
        if !(density >= 0.0 && density.is_finite()) {
            return bad("density must be non-negative");
        }
        if !(gamma_r > 0.0 && gamma_r.is_finite()) {
            return bad("gamma_r must be positive");
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return bad("gamma must be positive");
        }
        if !(gamma_cb >= 0.0 && gamma_cb.is_finite()) {
            return bad("gamma_cb must be non-negative");
        }
        if !detuning.is_finite() {
            return bad("detuning must be finite");
        }
        if gamma < gamma_r / 2.0 {
            return bad("gamma must be at least gamma_r / 2");
        }
        Ok(Self {
            lambda,
            density,
            gamma_r,
            gamma,
            gamma_cb,
            detuning,
            eta: coupling_constant(lambda, density, gamma_r),
        })
    }

    /// Same medium with the density rescaled so that the coupling constant is `eta`.
    pub fn with_eta(self, eta: f64) -> Result<Self> {
        let density = 8.0 * PI * eta / (3.0 * self.lambda * self.lambda * self.gamma_r);
        let mut p = Self::new(
            self.lambda,
            density,
            self.gamma_r,
            Some(self.gamma),
            self.gamma_cb,
            self.detuning,
        )?;
        // Keep the requested value rather than the round-tripped one.
        p.eta = eta;
        Ok(p)
    }

    pub fn with_density(self, density: f64) -> Result<Self> {
        Self::new(
            self.lambda,
            density,
            self.gamma_r,
            Some(self.gamma),
            self.gamma_cb,
            self.detuning,
        )
    }

    pub fn with_detuning(self, detuning: f64) -> Result<Self> {
        Self::new(
            self.lambda,
            self.density,
            self.gamma_r,
            Some(self.gamma),
            self.gamma_cb,
            detuning,
        )
        .map(|p| Self { eta: self.eta, ..p })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn gamma_r(&self) -> f64 {
        self.gamma_r
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn gamma_cb(&self) -> f64 {
        self.gamma_cb
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Probe wavenumber 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda
    }
}

/// A complex decay rate `re + i·im` (relaxation + i·detuning).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexRate {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexRate> for Complex64 {
    fn from(r: ComplexRate) -> Self {
        Complex64::new(r.re, r.im)
    }
}

/// Returns `(Γ_ab, Γ_cb)`.
pub fn complex_rates(p: &AtomicParams) -> (ComplexRate, ComplexRate) {
    (
        ComplexRate {
            re: p.gamma,
            im: p.detuning,
        },
        ComplexRate {
            re: p.gamma_cb,
            im: p.detuning,
        },
    )
}

/// Complex amplitude absorption coefficient κ [1/m] at local drive intensity
/// `drive_intensity = |Ω_d|²` [rad²/s²].
///
/// `Re κ` attenuates the probe amplitude, `Im κ` is the dispersive phase per
/// unit length.
pub fn kappa(p: &AtomicParams, drive_intensity: f64) -> Result<Complex64> {
    if !(drive_intensity >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "drive intensity must be non-negative, got {drive_intensity}"
        )));
    }
    let (ab, cb) = complex_rates(p);
    let (ab, cb) = (Complex64::from(ab), Complex64::from(cb));
    let denom = ab * cb + drive_intensity;
    if denom.re == 0.0 && denom.im == 0.0 {
        return Err(Error::DegenerateMedium);
    }
    Ok(p.eta * cb / denom)
}

/// Quadratic expansion of Re κ near a drive maximum `|Ω_d|² = |Ω|²(1 - (x/L)²)`,
/// valid for `|Ω|²` large compared with `|Γ_ab Γ_cb|`.
pub fn kappa_expanded(p: &AtomicParams, omega0_sq: f64, x_over_l: f64) -> Result<f64> {
    if !(omega0_sq > 0.0) {
        return Err(Error::ZeroDrive);
    }
    let w2 = p.detuning * p.detuning;
    let o4 = omega0_sq * omega0_sq;
    let u2 = x_over_l * x_over_l;
    let constant = p.gamma_cb / omega0_sq + p.gamma * w2 / o4;
    let curvature = p.gamma_cb / omega0_sq + 2.0 * p.gamma * w2 / o4;
    Ok(p.eta * (constant + curvature * u2))
}

/// Ground-state superposition decoupled from both fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkState {
    pub amp_c: f64,
    pub amp_b: f64,
}

impl DarkState {
    /// Matrix element `⟨a|H|D⟩/ħ` with the probe on |b⟩↔|a⟩ and the drive
    /// on |c⟩↔|a⟩; zero for a dark state.
    pub fn coupling(&self, omega_p: f64, omega_d: f64) -> f64 {
        omega_p * self.amp_b + omega_d * self.amp_c
    }

    pub fn norm_sq(&self) -> f64 {
        self.amp_c * self.amp_c + self.amp_b * self.amp_b
    }
}

/// `|D⟩ = (Ω_p|c⟩ - Ω_d|b⟩) / √(Ω_p² + Ω_d²)`.
pub fn dark_state(omega_p: f64, omega_d: f64) -> Result<DarkState> {
    if omega_p == 0.0 && omega_d == 0.0 {
        return Err(Error::UndefinedState);
    }
    if !(omega_p.is_finite() && omega_d.is_finite()) {
        return Err(Error::InvalidArgument(
            "Rabi frequencies must be finite".into(),
        ));
    }
    let norm = omega_p.hypot(omega_d);
    Ok(DarkState {
        amp_c: omega_p / norm,
        amp_b: -omega_d / norm,
    })
}
