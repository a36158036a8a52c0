//! Physical constants, unit conversions, parameter types and validation.
//!
//! All energies cross the API boundary in explicit physical units (μeV, meV,
//! K); internally every frequency is angular, in rad/ps, obtained by dividing
//! energies by ħ. The round trip is exact to machine precision.

use serde::{Deserialize, Serialize};

use crate::bath::mean_displacement;
use crate::error::{Error, Result};

/// Reduced Planck constant in meV·ps.
pub const HBAR_MEV_PS: f64 = 0.6582119569;
/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: f64 = 0.08617333;
/// Phonon-bath correlation time in ps, used as a timescale yardstick.
pub const TAU_PH_PS: f64 = 2.0;

/// Energy in μeV to angular frequency in rad/ps.
pub fn uev_to_angular(e_uev: f64) -> f64 {
    e_uev * 1e-3 / HBAR_MEV_PS
}

/// Energy in meV to angular frequency in rad/ps.
pub fn mev_to_angular(e_mev: f64) -> f64 {
    e_mev / HBAR_MEV_PS
}

/// Angular frequency in rad/ps to energy in μeV.
pub fn angular_to_uev(w: f64) -> f64 {
    w * HBAR_MEV_PS * 1e3
}

/// Angular frequency in rad/ps to energy in meV.
pub fn angular_to_mev(w: f64) -> f64 {
    w * HBAR_MEV_PS
}

/// Spectral-density parameters of the acoustic-phonon bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhononBathParams {
    /// Exciton–phonon coupling strength α_p in ps².
    pub alpha_p_ps2: f64,
    /// Phonon cutoff frequency ω_b in meV.
    pub omega_b_mev: f64,
}

impl PhononBathParams {
    /// Bath parameters used throughout the reference figures:
    /// α_p = 0.06 ps², ω_b = 1 meV.
    pub fn default_ingaas() -> Self {
        Self { alpha_p_ps2: 0.06, omega_b_mev: 1.0 }
    }

    /// Cutoff frequency in rad/ps.
    pub fn omega_b_angular(&self) -> f64 {
        mev_to_angular(self.omega_b_mev)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_p_ps2 >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "alpha_p_ps2",
                reason: format!("must be >= 0, got {}", self.alpha_p_ps2),
            });
        }
        if !(self.omega_b_mev > 0.0) {
            return Err(Error::InvalidParameter {
                field: "omega_b_mev",
                reason: format!("must be > 0, got {}", self.omega_b_mev),
            });
        }
        Ok(())
    }
}

/// Complete description of one experiment point.
///
/// The drive and coupling inputs are the *renormalized* quantities Ω_R and
/// g_R; the bare Ω = Ω_R/⟨B⟩ is derived where needed. The exciton–laser
/// detuning is the polaron-shifted Δ̃_xl; the polaron shift is never
/// subtracted again internally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Renormalized Rabi frequency Ω_R (μeV).
    pub omega_r_uev: f64,
    /// Renormalized dot–cavity coupling g_R (μeV).
    pub g_r_uev: f64,
    /// Cavity decay rate κ (μeV).
    pub kappa_uev: f64,
    /// Exciton radiative decay rate γ (μeV).
    pub gamma_uev: f64,
    /// Pure dephasing rate γ' (μeV).
    pub gamma_prime_uev: f64,
    /// Polaron-shifted exciton–laser detuning Δ̃_xl (μeV).
    pub delta_xl_uev: f64,
    /// Cavity–laser detuning Δ_cl (μeV).
    pub delta_cl_uev: f64,
    /// Phonon-bath temperature (K).
    pub temperature_k: f64,
    /// Whether the four phonon-induced incoherent channels are active.
    pub phonons_enabled: bool,
    /// Maximum cavity photon number N retained in the Fock space.
    pub fock_truncation: usize,
    pub bath: PhononBathParams,
}

impl PhysicalParams {
    /// Cavity–exciton detuning Δ_cx = Δ_cl − Δ̃_xl (μeV).
    pub fn delta_cx_uev(&self) -> f64 {
        self.delta_cl_uev - self.delta_xl_uev
    }

    pub fn omega_r(&self) -> f64 {
        uev_to_angular(self.omega_r_uev)
    }
    pub fn g_r(&self) -> f64 {
        uev_to_angular(self.g_r_uev)
    }
    pub fn kappa(&self) -> f64 {
        uev_to_angular(self.kappa_uev)
    }
    pub fn gamma(&self) -> f64 {
        uev_to_angular(self.gamma_uev)
    }
    pub fn gamma_prime(&self) -> f64 {
        uev_to_angular(self.gamma_prime_uev)
    }
    pub fn delta_xl(&self) -> f64 {
        uev_to_angular(self.delta_xl_uev)
    }
    pub fn delta_cl(&self) -> f64 {
        uev_to_angular(self.delta_cl_uev)
    }
    pub fn delta_cx(&self) -> f64 {
        uev_to_angular(self.delta_cx_uev())
    }
}

/// Non-fatal warnings from the §-level validity checks.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidityWarning {
    /// (Ω/ω_b)²(1 − ⟨B⟩⁴) exceeded the effective-regime threshold 0.05.
    PolaronRegime { metric: f64 },
    /// 2πħ/Ω_R is not comfortably longer than the phonon correlation time.
    DriveTimescale { timescale_ps: f64 },
}

/// Parameters that passed every type invariant, plus any validity warnings.
#[derive(Debug, Clone)]
pub struct ValidatedParams {
    params: PhysicalParams,
    warnings: Vec<ValidityWarning>,
}

impl ValidatedParams {
    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }
    pub fn warnings(&self) -> &[ValidityWarning] {
        &self.warnings
    }
}

impl std::ops::Deref for ValidatedParams {
    type Target = PhysicalParams;
    fn deref(&self) -> &PhysicalParams {
        &self.params
    }
}

/// Output of [`validity_metric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityMetric {
    /// (Ω/ω_b)²(1 − ⟨B⟩⁴), evaluated with the bare Ω = Ω_R/⟨B⟩.
    pub metric: f64,
    /// 2πħ/Ω in ps, for comparison against τ_ph ≈ 2 ps.
    pub timescale_ps: f64,
}

/// Polaron-regime validity metric (Ω/ω_b)²(1 − ⟨B⟩⁴).
///
/// `omega_r_uev` is the renormalized Rabi frequency; the bare Ω = Ω_R/⟨B⟩
/// is used inside the metric.
pub fn validity_metric(
    omega_r_uev: f64,
    bath: &PhononBathParams,
    b_mean: f64,
) -> Result<ValidityMetric> {
    if !(b_mean > 0.0 && b_mean <= 1.0) {
        return Err(Error::InvalidParameter {
            field: "b_mean",
            reason: format!("must be in (0, 1], got {b_mean}"),
        });
    }
    bath.validate()?;
    let omega_bare_uev = omega_r_uev / b_mean;
    let ratio = omega_bare_uev * 1e-3 / bath.omega_b_mev;
    let metric = ratio * ratio * (1.0 - b_mean.powi(4));
    let timescale_ps = if omega_bare_uev > 0.0 {
        2.0 * std::f64::consts::PI / uev_to_angular(omega_bare_uev)
    } else {
        f64::INFINITY
    };
    Ok(ValidityMetric { metric, timescale_ps })
}

/// Field amplitude, intensity and power required to drive a dipole at a
/// given Rabi frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiPower {
    /// Field amplitude E = ħΩ/p in V/m.
    pub field_v_per_m: f64,
    /// Intensity I = ½cε₀E² in W/m².
    pub intensity_w_per_m2: f64,
    /// Power P = I × spot area in W.
    pub power_w: f64,
}

/// Laser power needed for a Rabi frequency `omega_uev` on a dipole
/// `dipole_cm` (C·m) over a beam spot `spot_area_m2` (m²).
pub fn rabi_to_power(omega_uev: f64, dipole_cm: f64, spot_area_m2: f64) -> Result<RabiPower> {
    const HBAR_SI: f64 = 1.054571817e-34; // J s
    const E_CHARGE: f64 = 1.602176634e-19; // C
    const C_LIGHT: f64 = 299792458.0; // m/s
    const EPS0: f64 = 8.8541878128e-12; // F/m

    for (name, v) in [
        ("omega_uev", omega_uev),
        ("dipole_cm", dipole_cm),
        ("spot_area_m2", spot_area_m2),
    ] {
        if !(v >= 0.0) || (name != "omega_uev" && v == 0.0) {
            return Err(Error::InvalidParameter {
                field: match name {
                    "omega_uev" => "omega_uev",
                    "dipole_cm" => "dipole_cm",
                    _ => "spot_area_m2",
                },
                reason: format!("must be positive, got {v}"),
            });
        }
    }
    let omega_rad_s = omega_uev * 1e-6 * E_CHARGE / HBAR_SI;
    let field = HBAR_SI * omega_rad_s / dipole_cm;
    let intensity = 0.5 * C_LIGHT * EPS0 * field * field;
    Ok(RabiPower {
        field_v_per_m: field,
        intensity_w_per_m2: intensity,
        power_w: intensity * spot_area_m2,
    })
}

/// Enforce every type invariant and attach §-level validity warnings.
pub fn validate_params(p: &PhysicalParams) -> Result<ValidatedParams> {
    let nonneg: [(&'static str, f64); 6] = [
        ("omega_r_uev", p.omega_r_uev),
        ("g_r_uev", p.g_r_uev),
        ("kappa_uev", p.kappa_uev),
        ("gamma_uev", p.gamma_uev),
        ("gamma_prime_uev", p.gamma_prime_uev),
        ("temperature_k", p.temperature_k),
    ];
    for (field, v) in nonneg {
        if !(v >= 0.0) {
            return Err(Error::InvalidParameter {
                field,
                reason: format!("must be >= 0, got {v}"),
            });
        }
    }
    for (field, v) in [("delta_xl_uev", p.delta_xl_uev), ("delta_cl_uev", p.delta_cl_uev)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                field,
                reason: format!("must be finite, got {v}"),
            });
        }
    }
    if p.fock_truncation < 1 {
        return Err(Error::InvalidParameter {
            field: "fock_truncation",
            reason: format!("must be >= 1, got {}", p.fock_truncation),
        });
    }
    p.bath.validate()?;

    let mut warnings = Vec::new();
    if p.phonons_enabled && p.bath.alpha_p_ps2 > 0.0 && p.omega_r_uev > 0.0 {
        let b = mean_displacement(&p.bath, p.temperature_k)?;
        let vm = validity_metric(p.omega_r_uev, &p.bath, b)?;
        if vm.metric > 0.05 {
            warnings.push(ValidityWarning::PolaronRegime { metric: vm.metric });
        }
        let drive_timescale = 2.0 * std::f64::consts::PI / p.omega_r();
        if drive_timescale < 5.0 * TAU_PH_PS {
            warnings.push(ValidityWarning::DriveTimescale { timescale_ps: drive_timescale });
        }
    }

    Ok(ValidatedParams { params: p.clone(), warnings })
}
