//! Steady-state solution of L(ρ) = 0 with Tr ρ = 1, a fixed-step
//! time-propagation oracle, and Fock-truncation convergence control.

use faer::prelude::*;
use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::bath::PhononBathModel;
use crate::error::{Error, Result};
use crate::hilbert::{build_operators, DensityMatrix, SpaceDescriptor};
use crate::liouvillian::{
    build_effective_liouvillian, build_full_generator, unvectorize, vectorize, Superoperator,
};
use crate::squeezing::{report, SqueezingReport};
use crate::units::{validate_params, ValidatedParams};

/// Which generator the steady-state pipeline assembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorPath {
    /// Four phonon-induced Lindblad channels with kernel rates.
    Effective,
    /// Second-order generator with eigenbasis-twiddled operators.
    Full,
}

/// Assemble the generator for `p` on its configured truncation.
pub fn build_generator(
    p: &ValidatedParams,
    model: &PhononBathModel,
    path: GeneratorPath,
) -> Result<Superoperator> {
    match path {
        GeneratorPath::Effective => build_effective_liouvillian(p, model),
        GeneratorPath::Full => {
            let space = SpaceDescriptor::new(p.fock_truncation)?;
            let ops = build_operators(space);
            build_full_generator(p, model, &ops)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveDiagnostics {
    /// Hilbert-space dimension (the linear system is dim² × dim²).
    pub dim: usize,
    /// ‖L vec(ρ)‖∞ of the returned, hermitized state.
    pub residual: f64,
    /// ‖L‖∞ used for the residual bound.
    pub generator_inf_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SteadyStateSolution {
    pub rho: DensityMatrix,
    pub diagnostics: SolveDiagnostics,
}

/// Residual must stay below this multiple of ‖L‖∞.
const RESIDUAL_REL_BOUND: f64 = 1e-9;
/// Eigenvalue negativity allowed in a solved steady state.
const STEADY_POSITIVITY_TOL: f64 = 1e-7;

/// Solve the dim²×dim² system with one row replaced by the trace
/// constraint, then hermitize and check physicality.
pub fn steady_state(l: &Superoperator) -> Result<SteadyStateSolution> {
    let space = l.space();
    let dim = space.dim();
    let d2 = dim * dim;

    let lm = l.matrix();
    let mut a = Mat::<c64>::from_fn(d2, d2, |i, j| {
        let z = lm[(i, j)];
        c64::new(z.re, z.im)
    });
    // row 0 becomes vec(1)†: picks out Σ_k ρ_kk
    for j in 0..d2 {
        a[(0, j)] = c64::new(0.0, 0.0);
    }
    for k in 0..dim {
        a[(0, k * dim + k)] = c64::new(1.0, 0.0);
    }
    let mut b = Mat::<c64>::zeros(d2, 1);
    b[(0, 0)] = c64::new(1.0, 0.0);

    let x = a.partial_piv_lu().solve(&b);

    let mut x_max: f64 = 0.0;
    let mut vec_rho = DVector::<C64>::zeros(d2);
    for i in 0..d2 {
        let z = x[(i, 0)];
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::DegenerateSteadyState);
        }
        x_max = x_max.max(z.re.hypot(z.im));
        vec_rho[i] = C64::new(z.re, z.im);
    }

    let raw = unvectorize(&vec_rho, dim);
    let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);

    let residual = (lm * vectorize(&herm)).camax();
    let inf_norm = l.linf_norm();
    let bound = RESIDUAL_REL_BOUND * inf_norm.max(f64::MIN_POSITIVE);
    if residual > bound {
        if x_max > 1e6 {
            return Err(Error::DegenerateSteadyState);
        }
        return Err(Error::NumericalFailure {
            context: "steady-state solve",
            requested: bound,
            achieved: residual,
        });
    }

    let rho = DensityMatrix::new(space, herm, STEADY_POSITIVITY_TOL)?;
    Ok(SteadyStateSolution {
        rho,
        diagnostics: SolveDiagnostics { dim, residual, generator_inf_norm: inf_norm },
    })
}

/// Trace drift beyond this aborts the propagation.
const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Fixed-step RK4 integration of vec(ρ̇) = L vec(ρ) up to `t_final`.
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if rho0.space() != l.space() {
        return Err(Error::SpaceMismatch {
            left: "initial state",
            right: "generator",
            left_dim: rho0.space().dim(),
            right_dim: l.space().dim(),
        });
    }
    if !(t_final >= 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t_final/dt",
            reason: format!("need t_final >= 0 and dt > 0, got {t_final}, {dt}"),
        });
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }

    let dim = l.space().dim();
    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let m = l.matrix();

    let mut v = vectorize(rho0.matrix());
    let mut k1 = DVector::zeros(v.len());
    let mut k2 = DVector::zeros(v.len());
    let mut k3 = DVector::zeros(v.len());
    let mut k4 = DVector::zeros(v.len());
    let mut tmp = DVector::zeros(v.len());

    let trace_of = |v: &DVector<C64>| -> C64 {
        (0..dim).map(|k| v[k * dim + k]).sum()
    };

    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5, 0.0);
    for step in 0..steps {
        k1.gemv(C64::new(1.0, 0.0), m, &v, C64::new(0.0, 0.0));
        tmp.copy_from(&v);
        tmp.axpy(hc * half, &k1, C64::new(1.0, 0.0));
        k2.gemv(C64::new(1.0, 0.0), m, &tmp, C64::new(0.0, 0.0));
        tmp.copy_from(&v);
        tmp.axpy(hc * half, &k2, C64::new(1.0, 0.0));
        k3.gemv(C64::new(1.0, 0.0), m, &tmp, C64::new(0.0, 0.0));
        tmp.copy_from(&v);
        tmp.axpy(hc, &k3, C64::new(1.0, 0.0));
        k4.gemv(C64::new(1.0, 0.0), m, &tmp, C64::new(0.0, 0.0));

        let sixth = hc / C64::new(6.0, 0.0);
        for i in 0..v.len() {
            v[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        if step % 64 == 0 || step + 1 == steps {
            let drift = (trace_of(&v) - C64::new(1.0, 0.0)).norm();
            if drift > TRACE_DRIFT_LIMIT {
                return Err(Error::StepInstability { drift, limit: TRACE_DRIFT_LIMIT });
            }
        }
    }

    Ok(DensityMatrix::from_matrix_unchecked(l.space(), unvectorize(&v, dim)))
}

/// A step size comfortably inside the RK4 stability region for `l`.
pub fn suggest_dt(l: &Superoperator) -> f64 {
    2.0 / l.linf_norm().max(1e-6)
}

/// Result of the Fock-truncation doubling procedure.
#[derive(Debug, Clone)]
pub struct TruncationConvergence {
    /// Smallest N whose doubling moved the variance by < 1e-4.
    pub n_star: usize,
    pub solution: SteadyStateSolution,
    pub report: SqueezingReport,
}

const VARIANCE_CONVERGENCE_TOL: f64 = 1e-4;
const TAIL_OCCUPATION_TOL: f64 = 1e-6;
const TRUNCATION_CAP: usize = 64;

fn solve_at(
    p: &ValidatedParams,
    model: &PhononBathModel,
    path: GeneratorPath,
    n: usize,
) -> Result<(SteadyStateSolution, SqueezingReport)> {
    let mut raw = p.params().clone();
    raw.fock_truncation = n;
    let p_n = validate_params(&raw)?;
    let l = build_generator(&p_n, model, path)?;
    let sol = steady_state(&l)?;
    let ops = build_operators(sol.rho.space());
    let rep = report(&sol.rho, &ops)?;
    Ok((sol, rep))
}

/// Double N from the configured start until the variance moves by less
/// than 1e-4 and the top Fock level holds less than 1e-6 population.
pub fn converge_truncation(
    p: &ValidatedParams,
    model: &PhononBathModel,
    path: GeneratorPath,
) -> Result<TruncationConvergence> {
    let mut n = p.fock_truncation.max(1);
    let mut current = solve_at(p, model, path, n)?;
    let mut last_change = f64::NAN;
    loop {
        if 2 * n > TRUNCATION_CAP {
            return Err(Error::TruncationOverflow { cap: TRUNCATION_CAP, last_change });
        }
        let doubled = solve_at(p, model, path, 2 * n)?;
        last_change = (current.1.variance_min - doubled.1.variance_min).abs();
        if last_change < VARIANCE_CONVERGENCE_TOL
            && current.0.rho.top_fock_occupation() < TAIL_OCCUPATION_TOL
        {
            return Ok(TruncationConvergence {
                n_star: n,
                solution: current.0,
                report: current.1,
            });
        }
        n *= 2;
        current = doubled;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::PhononBathModel;
    use crate::hilbert::Level;
    use crate::units::{uev_to_angular, PhononBathParams, PhysicalParams};
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn model_4k() -> &'static PhononBathModel {
        static MODEL: OnceLock<PhononBathModel> = OnceLock::new();
        MODEL.get_or_init(|| PhononBathModel::new(PhononBathParams::default_ingaas(), 4.0).unwrap())
    }

    fn params(
        omega_r: f64,
        g_r: f64,
        kappa: f64,
        gamma: f64,
        gamma_prime: f64,
        dxl: f64,
        dcl: f64,
        n: usize,
        phonons: bool,
    ) -> ValidatedParams {
        validate_params(&PhysicalParams {
            omega_r_uev: omega_r,
            g_r_uev: g_r,
            kappa_uev: kappa,
            gamma_uev: gamma,
            gamma_prime_uev: gamma_prime,
            delta_xl_uev: dxl,
            delta_cl_uev: dcl,
            temperature_k: 4.0,
            phonons_enabled: phonons,
            fock_truncation: n,
            bath: PhononBathParams::default_ingaas(),
        })
        .unwrap()
    }

    /// Closed-form resonant two-level steady state (optical Bloch):
    /// population and |coherence|² for Δ = 0, γ' = 0.
    fn bloch_resonant(omega: f64, gamma: f64) -> (f64, f64) {
        let s = omega * omega / 2.0;
        let d = s + gamma * gamma / 4.0;
        (s / (2.0 * d), (omega * omega * gamma * gamma / 16.0) / (d * d))
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let p = params(0.0, 0.0, 90.0, 2.0, 0.5, 50.0, 70.0, 2, false);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        let sol = steady_state(&l).unwrap();
        let expected = DensityMatrix::ground_state(sol.rho.space());
        assert!(sol.rho.trace_distance(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn bloch_oracle_population_and_coherence() {
        // phonons off, g = 0, γ' = 0, Δ̃_xl = 0
        let omega_uev = 3.0;
        let gamma_uev = 2.0;
        let p = params(omega_uev, 0.0, 90.0, gamma_uev, 0.0, 0.0, 0.0, 1, false);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        let sol = steady_state(&l).unwrap();
        let ops = build_operators(sol.rho.space());
        let pop = sol.rho.expectation(&(&ops.sigma_plus * &ops.sigma_minus)).unwrap().re;
        let coh = sol.rho.expectation(&ops.sigma_minus).unwrap();
        let (pop_expected, coh2_expected) =
            bloch_resonant(uev_to_angular(omega_uev), uev_to_angular(gamma_uev));
        assert_relative_eq!(pop, pop_expected, max_relative = 1e-9);
        assert_relative_eq!(coh.norm_sqr(), coh2_expected, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_generator_is_refused() {
        let p = params(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1, false);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        match steady_state(&l) {
            Err(Error::DegenerateSteadyState) => {}
            other => panic!("expected degeneracy refusal, got {other:?}"),
        }
    }

    #[test]
    fn evolve_identity_cases() {
        let p = params(80.0, 40.0, 90.0, 2.0, 0.5, 20.0, 30.0, 2, false);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        let rho0 = DensityMatrix::basis_state(l.space(), Level::Excited, 1);
        let same = evolve(&l, &rho0, 0.0, 0.1).unwrap();
        assert_eq!(same.matrix(), rho0.matrix());

        let zero = Superoperator::zeros(l.space());
        let still = evolve(&zero, &rho0, 50.0, 0.5).unwrap();
        assert!((still.matrix() - rho0.matrix()).camax() < 1e-12);
    }

    #[test]
    fn evolve_relaxes_to_steady_state() {
        let p = params(50.0, 30.0, 45.0, 2.0, 0.5, 50.0, 70.7, 4, true);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        let sol = steady_state(&l).unwrap();
        let rho0 = DensityMatrix::ground_state(l.space());
        let gamma_rate = uev_to_angular(2.0);
        let t_final = 20.0 / gamma_rate;
        let rho_t = evolve(&l, &rho0, t_final, suggest_dt(&l)).unwrap();
        let dist = sol.rho.trace_distance(&rho_t).unwrap();
        assert!(dist < 1e-5, "distance {dist}");
    }

    #[test]
    fn truncation_converges_at_minimum_for_empty_cavity() {
        let p = params(30.0, 0.0, 90.0, 2.0, 0.5, 0.0, 0.0, 1, false);
        let conv = converge_truncation(&p, model_4k(), GeneratorPath::Effective).unwrap();
        assert_eq!(conv.n_star, 1);
    }

    #[test]
    fn truncation_converges_quickly_at_figure_parameters() {
        let p = params(200.0, 120.0, 180.0, 2.0, 0.5, -200.0, -282.84, 4, true);
        let conv = converge_truncation(&p, model_4k(), GeneratorPath::Effective).unwrap();
        assert!(conv.n_star <= 16, "N* = {}", conv.n_star);
        assert!(conv.report.photon_number < 0.2);
    }

    #[test]
    fn photon_number_decreases_with_cavity_decay() {
        // at the variance minimum, raising κ at fixed g empties the cavity
        let mut previous = f64::INFINITY;
        for kappa in [120.0, 180.0, 260.0, 380.0] {
            let p = params(200.0, 120.0, kappa, 2.0, 0.5, 200.0, 282.84, 5, false);
            let l = build_effective_liouvillian(&p, model_4k()).unwrap();
            let sol = steady_state(&l).unwrap();
            let ops = build_operators(sol.rho.space());
            let n = sol.rho.expectation(&(&ops.a_dag * &ops.a)).unwrap().re;
            assert!(n < previous, "kappa {kappa}: {n} !< {previous}");
            previous = n;
        }
    }
}
