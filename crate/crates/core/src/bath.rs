//! Phonon-bath quadratures: spectral density J(ω), mean displacement ⟨B⟩,
//! polaron shift Δ_P, bath correlation function φ(τ), polaron Green
//! functions, and the four phonon-induced incoherent rates.
//!
//! All frequencies are angular (rad/ps). The spectral density is
//! super-Ohmic with a Gaussian cutoff, J(ω) = α_p ω³ exp(−ω²/2ω_b²), so
//! every integral here lives on an effectively finite support: ω-integrals
//! are cut at 8ω_b, τ-integrals at a tail-extended τ_max.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_complex, QuadOptions};
use crate::units::{
    angular_to_uev, PhononBathParams, ValidatedParams, HBAR_MEV_PS, KB_MEV_PER_K,
};

/// x·coth(x), stable through x = 0.
fn x_coth(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 3.0 - x2 * x2 / 45.0
    } else {
        x / x.tanh()
    }
}

/// Thermal factor ω·coth(ħω/2k_BT) in rad/ps; reduces to ω at T = 0.
fn omega_coth(omega: f64, temperature_k: f64) -> f64 {
    if temperature_k <= 0.0 {
        omega
    } else {
        // c = ħ/(2 k_B T) in ps
        let c = HBAR_MEV_PS / (2.0 * KB_MEV_PER_K * temperature_k);
        x_coth(c * omega) / c
    }
}

/// Phonon spectral density J(ω) = α_p ω³ exp(−ω²/2ω_b²), ω in rad/ps.
pub fn spectral_density(omega: f64, params: &PhononBathParams) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "omega",
            reason: format!("spectral density is defined for omega >= 0, got {omega}"),
        });
    }
    let wb = params.omega_b_angular();
    Ok(params.alpha_p_ps2 * omega.powi(3) * (-omega * omega / (2.0 * wb * wb)).exp())
}

/// Upper cutoff for ω-quadratures; the Gaussian factor is ~1e-14 there.
fn omega_cutoff(params: &PhononBathParams) -> f64 {
    8.0 * params.omega_b_angular()
}

/// Mean phonon displacement ⟨B⟩ = exp[−½∫dω J(ω)/ω² coth(ħω/2k_BT)].
pub fn mean_displacement(params: &PhononBathParams, temperature_k: f64) -> Result<f64> {
    params.validate()?;
    if !(temperature_k >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "temperature_k",
            reason: format!("must be >= 0, got {temperature_k}"),
        });
    }
    if params.alpha_p_ps2 == 0.0 {
        return Ok(1.0);
    }
    let wb = params.omega_b_angular();
    let ap = params.alpha_p_ps2;
    // J/ω² · coth = α_p e^{−ω²/2ω_b²} · ω coth(...): smooth at ω = 0.
    let opts = QuadOptions { rel_tol: 1e-10, abs_tol: 1e-14, context: "mean displacement", ..QuadOptions::default() };
    let integral = integrate(
        |w| ap * (-w * w / (2.0 * wb * wb)).exp() * omega_coth(w, temperature_k),
        0.0,
        omega_cutoff(params),
        &opts,
    )?;
    Ok((-0.5 * integral.value.re).exp())
}

/// Polaron shift Δ_P = ∫dω J(ω)/ω in μeV.
pub fn polaron_shift(params: &PhononBathParams) -> Result<f64> {
    params.validate()?;
    if params.alpha_p_ps2 == 0.0 {
        return Ok(0.0);
    }
    let wb = params.omega_b_angular();
    let ap = params.alpha_p_ps2;
    let opts = QuadOptions { rel_tol: 1e-10, abs_tol: 1e-14, context: "polaron shift", ..QuadOptions::default() };
    let integral = integrate(
        |w| ap * w * w * (-w * w / (2.0 * wb * wb)).exp(),
        0.0,
        omega_cutoff(params),
        &opts,
    )?;
    Ok(angular_to_uev(integral.value.re))
}

/// Closed form of the polaron shift, √π/4 · α_p (2ω_b²)^{3/2}, in μeV.
pub fn polaron_shift_closed_form(params: &PhononBathParams) -> f64 {
    let wb = params.omega_b_angular();
    let shift = std::f64::consts::PI.sqrt() / 4.0 * params.alpha_p_ps2 * (2.0 * wb * wb).powf(1.5);
    angular_to_uev(shift)
}

/// The four phonon-induced Lindblad rates of the effective master equation,
/// in rad/ps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncoherentRates {
    /// Γ^{σ+}: incoherent exciton excitation.
    pub sigma_plus: f64,
    /// Γ^{σ−}: incoherent exciton de-excitation.
    pub sigma_minus: f64,
    /// Γ^{σ+a}: cavity photon annihilation with exciton excitation.
    pub sigma_plus_a: f64,
    /// Γ^{a†σ−}: cavity photon creation with exciton de-excitation.
    pub a_dag_sigma_minus: f64,
}

impl IncoherentRates {
    pub fn zero() -> Self {
        Self { sigma_plus: 0.0, sigma_minus: 0.0, sigma_plus_a: 0.0, a_dag_sigma_minus: 0.0 }
    }

    /// The same four rates expressed in μeV.
    pub fn in_uev(&self) -> [f64; 4] {
        [
            angular_to_uev(self.sigma_plus),
            angular_to_uev(self.sigma_minus),
            angular_to_uev(self.sigma_plus_a),
            angular_to_uev(self.a_dag_sigma_minus),
        ]
    }
}

/// Immutable phonon-bath model: cached ⟨B⟩, Δ_P and a dense φ(τ) table.
///
/// Construction performs every quadrature once; all queries afterwards are
/// read-only and cheap, so a single model can be shared across sweep
/// workers.
///
/// The table has two uniform segments: a dense one through the fast
/// initial decay, and a coarse one for the slow algebraic tail that
/// appears at very low temperature (φ ~ −α_p/τ² as T → 0).
#[derive(Debug, Clone)]
pub struct PhononBathModel {
    params: PhononBathParams,
    temperature_k: f64,
    b_mean: f64,
    delta_p_uev: f64,
    tau_max: f64,
    dense: PhiSegment,
    tail: Option<PhiSegment>,
}

#[derive(Debug, Clone)]
struct PhiSegment {
    start: f64,
    step: f64,
    values: Vec<C64>,
}

impl PhiSegment {
    fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    /// 4-point cubic Lagrange on the uniform grid, one-sided at the ends.
    fn interp(&self, tau: f64) -> C64 {
        let n = self.values.len();
        let pos = (tau - self.start) / self.step;
        let i = (pos.floor() as usize).min(n - 2);
        let i0 = i.saturating_sub(1).min(n - 4);
        let u = pos - i0 as f64;
        let mut out = C64::new(0.0, 0.0);
        for (j, &fj) in self.values[i0..i0 + 4].iter().enumerate() {
            let mut w = 1.0;
            for k in 0..4 {
                if k != j {
                    w *= (u - k as f64) / (j as f64 - k as f64);
                }
            }
            out += w * fj;
        }
        out
    }
}

/// Grid step of the dense φ(τ) segment in ps.
const TAU_STEP_PS: f64 = 0.01;
/// End of the dense segment and initial τ_max.
const TAU_DENSE_END_PS: f64 = 20.0;
/// Grid step of the tail segment in ps.
const TAU_TAIL_STEP_PS: f64 = 0.25;
const TAU_MAX_CAP_PS: f64 = 400.0;
/// Negative Re K(Δ) beyond this magnitude signals a convention or
/// quadrature bug rather than rounding residue.
const RATE_RESIDUE_TOL: f64 = 1e-12;

impl PhononBathModel {
    pub fn new(params: PhononBathParams, temperature_k: f64) -> Result<Self> {
        let b_mean = mean_displacement(&params, temperature_k)?;
        let delta_p_uev = polaron_shift(&params)?;

        let mut tau_max = TAU_DENSE_END_PS;
        if params.alpha_p_ps2 > 0.0 {
            while phi_direct_at(tau_max, &params, temperature_k)?.norm() > 1e-10 {
                tau_max += 20.0;
                if tau_max > TAU_MAX_CAP_PS {
                    let tail = phi_direct_at(TAU_MAX_CAP_PS, &params, temperature_k)?.norm();
                    if tail > 1e-6 {
                        return Err(Error::NumericalFailure {
                            context: "phi table tail extension",
                            requested: 1e-6,
                            achieved: tail,
                        });
                    }
                    tau_max = TAU_MAX_CAP_PS;
                    break;
                }
            }
        }

        let sample = |start: f64, step: f64, count: usize| -> Result<PhiSegment> {
            let mut values = Vec::with_capacity(count);
            for k in 0..count {
                let tau = start + k as f64 * step;
                values.push(if params.alpha_p_ps2 == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    phi_direct_at(tau, &params, temperature_k)?
                });
            }
            Ok(PhiSegment { start, step, values })
        };

        let dense_end = tau_max.min(TAU_DENSE_END_PS);
        let dense_count = (dense_end / TAU_STEP_PS).round() as usize + 1;
        let dense = sample(0.0, TAU_STEP_PS, dense_count)?;
        let tail = if tau_max > dense_end {
            let count = ((tau_max - dense_end) / TAU_TAIL_STEP_PS).ceil() as usize + 1;
            Some(sample(dense_end, TAU_TAIL_STEP_PS, count)?)
        } else {
            None
        };
        let tau_max = tail.as_ref().map_or(dense.end(), PhiSegment::end);

        Ok(Self { params, temperature_k, b_mean, delta_p_uev, tau_max, dense, tail })
    }

    /// Model for a parameter point; with phonons disabled the coupling is
    /// zeroed so construction is trivial and every rate vanishes.
    pub fn for_params(p: &crate::units::PhysicalParams) -> Result<Self> {
        let bath = if p.phonons_enabled {
            p.bath
        } else {
            PhononBathParams { alpha_p_ps2: 0.0, ..p.bath }
        };
        Self::new(bath, p.temperature_k)
    }

    pub fn params(&self) -> &PhononBathParams {
        &self.params
    }
    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }
    /// Cached ⟨B⟩.
    pub fn mean_displacement(&self) -> f64 {
        self.b_mean
    }
    /// Cached polaron shift in μeV.
    pub fn polaron_shift_uev(&self) -> f64 {
        self.delta_p_uev
    }
    /// End of the tabulated τ range in ps.
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    /// Bath correlation function φ(τ), interpolated from the table.
    ///
    /// Falls back to direct quadrature beyond τ_max (where |φ| < 1e-10
    /// anyway by construction).
    pub fn correlation_phi(&self, tau: f64) -> Result<C64> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "tau",
                reason: format!("must be >= 0, got {tau}"),
            });
        }
        if self.params.alpha_p_ps2 == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        if tau > self.tau_max {
            return self.correlation_phi_direct(tau);
        }
        Ok(self.phi_interp(tau))
    }

    /// φ(τ) by direct adaptive quadrature, bypassing the table.
    pub fn correlation_phi_direct(&self, tau: f64) -> Result<C64> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "tau",
                reason: format!("must be >= 0, got {tau}"),
            });
        }
        phi_direct_at(tau, &self.params, self.temperature_k)
    }

    fn phi_interp(&self, tau: f64) -> C64 {
        match &self.tail {
            Some(tail) if tau > self.dense.end() => tail.interp(tau),
            _ => self.dense.interp(tau),
        }
    }

    /// Polaron Green functions G_g(τ) = ⟨B⟩²(cosh φ − 1) and
    /// G_u(τ) = ⟨B⟩² sinh φ.
    pub fn green_functions(&self, tau: f64) -> Result<(C64, C64)> {
        let phi = self.correlation_phi(tau)?;
        let b2 = self.b_mean * self.b_mean;
        Ok((b2 * (phi.cosh() - 1.0), b2 * phi.sinh()))
    }

    /// Half-line Fourier kernel K(Δ) = ∫₀^{τ_max} e^{iΔτ}(e^{φ(τ)} − 1) dτ,
    /// in ps, Δ in rad/ps.
    pub fn half_fourier_kernel(&self, delta: f64) -> Result<C64> {
        if self.params.alpha_p_ps2 == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let opts = self.kernel_quad_options(delta, "half-line Fourier kernel");
        let r = integrate_complex(
            |tau| (C64::i() * delta * tau).exp() * (self.phi_interp(tau).exp() - 1.0),
            0.0,
            self.tau_max,
            &opts,
        )?;
        Ok(r.value)
    }

    /// Half-line Fourier transforms of the Green functions,
    /// Ĝ_m(Δ) = ∫₀^{τ_max} G_m(τ) e^{−iΔτ} dτ for m = g, u.
    pub fn green_half_fourier(&self, delta: f64) -> Result<(C64, C64)> {
        if self.params.alpha_p_ps2 == 0.0 {
            return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        }
        let b2 = self.b_mean * self.b_mean;
        let opts = self.kernel_quad_options(delta, "Green-function Fourier kernel");
        let g = integrate_complex(
            |tau| (-C64::i() * delta * tau).exp() * b2 * (self.phi_interp(tau).cosh() - 1.0),
            0.0,
            self.tau_max,
            &opts,
        )?;
        let u = integrate_complex(
            |tau| (-C64::i() * delta * tau).exp() * b2 * self.phi_interp(tau).sinh(),
            0.0,
            self.tau_max,
            &opts,
        )?;
        Ok((g.value, u.value))
    }

    fn kernel_quad_options(&self, delta: f64, context: &'static str) -> QuadOptions {
        let oscillation_panels = (self.tau_max * delta.abs() / std::f64::consts::PI).ceil() as usize;
        QuadOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-13,
            initial_panels: oscillation_panels.clamp(16, 2048),
            max_panels: 8192,
            context,
        }
    }

    /// The four incoherent rates of the effective master equation:
    /// Γ^{σ+} = (Ω_R²/2)·Re K(−Δ̃_xl), Γ^{σ−} = (Ω_R²/2)·Re K(+Δ̃_xl),
    /// Γ^{σ+a} = 2g_R²·Re K(+Δ_cx), Γ^{a†σ−} = 2g_R²·Re K(−Δ_cx).
    pub fn incoherent_rates(&self, p: &ValidatedParams) -> Result<IncoherentRates> {
        if !p.phonons_enabled || self.params.alpha_p_ps2 == 0.0 {
            return Ok(IncoherentRates::zero());
        }
        if p.bath != self.params || p.temperature_k != self.temperature_k {
            return Err(Error::InvalidParameter {
                field: "bath model",
                reason: "model was built for different bath parameters or temperature".into(),
            });
        }
        let dxl = p.delta_xl();
        let dcx = p.delta_cx();
        let half_omega2 = 0.5 * p.omega_r() * p.omega_r();
        let two_g2 = 2.0 * p.g_r() * p.g_r();
        Ok(IncoherentRates {
            sigma_plus: half_omega2 * clamp_rate(self.half_fourier_kernel(-dxl)?.re)?,
            sigma_minus: half_omega2 * clamp_rate(self.half_fourier_kernel(dxl)?.re)?,
            sigma_plus_a: two_g2 * clamp_rate(self.half_fourier_kernel(dcx)?.re)?,
            a_dag_sigma_minus: two_g2 * clamp_rate(self.half_fourier_kernel(-dcx)?.re)?,
        })
    }
}

fn clamp_rate(re_kernel: f64) -> Result<f64> {
    if re_kernel >= 0.0 {
        Ok(re_kernel)
    } else if re_kernel > -RATE_RESIDUE_TOL {
        Ok(0.0)
    } else {
        Err(Error::ModelViolation {
            context: "incoherent rates",
            detail: format!("Re K = {re_kernel:e} is negative beyond numerical residue"),
        })
    }
}

fn phi_direct_at(tau: f64, params: &PhononBathParams, temperature_k: f64) -> Result<C64> {
    let wb = params.omega_b_angular();
    let ap = params.alpha_p_ps2;
    let cutoff = omega_cutoff(params);
    let oscillation_panels = (cutoff * tau / std::f64::consts::PI).ceil() as usize;
    let opts = QuadOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-15,
        initial_panels: oscillation_panels.clamp(8, 1024),
        max_panels: 8192,
        context: "bath correlation function",
    };
    // J/ω² [coth cos(ωτ) − i sin(ωτ)] = α_p ω e^{−ω²/2ω_b²}[...]/ω,
    // written with the ω·coth product to stay smooth at ω = 0.
    let r = integrate_complex(
        |w| {
            let envelope = ap * (-w * w / (2.0 * wb * wb)).exp();
            let re = envelope * omega_coth(w, temperature_k) * (w * tau).cos();
            let im = -envelope * w * (w * tau).sin();
            C64::new(re, im)
        },
        0.0,
        cutoff,
        &opts,
    )?;
    Ok(r.value)
}
