//! Squeezing figures of merit: θ-resolved normally ordered quadrature
//! variance, its phase-optimal minimum, and the decibel conversion.
//!
//! With E⁺ ∝ σ− and the proportionality constant set to one, the two-level
//! algebra gives ⟨:ΔE_θ²:⟩ = 2(⟨σ+σ−⟩ − |⟨σ−⟩|²) − 2|⟨σ−⟩|² cos 2(θ − arg⟨σ−⟩),
//! minimized at θ* = arg⟨σ−⟩ (mod π) where it equals 2[⟨σ+σ−⟩ − 2|⟨σ−⟩|²].
//! Negative values mean quadrature noise below the vacuum level.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, OperatorSet};

/// Squeezing observables of one steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingReport {
    /// Exciton population ⟨σ+σ−⟩.
    pub population: f64,
    /// Exciton coherence ⟨σ−⟩.
    pub coherence: C64,
    /// 2|⟨σ−⟩|², the coherence measure plotted in the reference figures.
    pub coherence_sq: f64,
    /// Phase-optimal normally ordered variance 2[⟨σ+σ−⟩ − 2|⟨σ−⟩|²].
    pub variance_min: f64,
    /// Optimal quadrature phase, arg⟨σ−⟩ mod π.
    pub theta_star: f64,
    /// Noise reduction below vacuum in dB; 0 dB at variance 0.
    pub squeezing_db: f64,
    /// Cavity photon number ⟨a†a⟩, for truncation diagnostics.
    pub photon_number: f64,
}

fn exciton_moments(rho: &DensityMatrix, ops: &OperatorSet) -> Result<(f64, C64)> {
    let population = rho.expectation(&(&ops.sigma_plus * &ops.sigma_minus))?.re;
    let coherence = rho.expectation(&ops.sigma_minus)?;
    Ok((population, coherence))
}

/// Normally ordered variance of the quadrature at phase `theta`.
pub fn variance_theta(rho: &DensityMatrix, ops: &OperatorSet, theta: f64) -> Result<f64> {
    let (population, coherence) = exciton_moments(rho, ops)?;
    let r2 = coherence.norm_sqr();
    let phase = coherence.arg();
    Ok(2.0 * (population - r2) - 2.0 * r2 * (2.0 * (theta - phase)).cos())
}

/// The θ-minimum of [`variance_theta`] and the phase attaining it.
pub fn min_variance(rho: &DensityMatrix, ops: &OperatorSet) -> Result<(f64, f64)> {
    let (population, coherence) = exciton_moments(rho, ops)?;
    let variance = 2.0 * (population - 2.0 * coherence.norm_sqr());
    let theta_star = coherence.arg().rem_euclid(std::f64::consts::PI);
    Ok((variance, theta_star))
}

/// Noise relative to the vacuum quadrature variance ¼ in these units:
/// dB = −10·log₁₀(1 + 4·variance). Defined for variance > −0.25.
pub fn squeezing_db(variance: f64) -> Result<f64> {
    if !(variance > -0.25) {
        return Err(Error::DbDomain { variance });
    }
    Ok(-10.0 * (1.0 + 4.0 * variance).log10())
}

/// Bundle population, coherence, optimal variance, dB value and photon
/// number for one state.
pub fn report(rho: &DensityMatrix, ops: &OperatorSet) -> Result<SqueezingReport> {
    let (population, coherence) = exciton_moments(rho, ops)?;
    let (variance_min, theta_star) = min_variance(rho, ops)?;
    let photon_number = rho.expectation(&(&ops.a_dag * &ops.a))?.re;
    Ok(SqueezingReport {
        population,
        coherence,
        coherence_sq: 2.0 * coherence.norm_sqr(),
        variance_min,
        theta_star,
        squeezing_db: squeezing_db(variance_min)?,
        photon_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_operators, DensityMatrix, Level, SpaceDescriptor};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use num_complex::Complex64 as C64;

    fn ops(n: usize) -> crate::hilbert::OperatorSet {
        build_operators(SpaceDescriptor::new(n).unwrap())
    }

    #[test]
    fn ground_state_report_is_all_zero() {
        let ops = ops(2);
        let rho = DensityMatrix::ground_state(ops.space);
        let r = report(&rho, &ops).unwrap();
        assert_eq!(r.population, 0.0);
        assert_eq!(r.coherence, C64::new(0.0, 0.0));
        assert_eq!(r.variance_min, 0.0);
        assert_eq!(r.squeezing_db, 0.0);
        assert_eq!(r.photon_number, 0.0);
        for theta in [0.0, 0.7, 2.1] {
            assert_eq!(variance_theta(&rho, &ops, theta).unwrap(), 0.0);
        }
    }

    #[test]
    fn inverted_exciton_has_variance_two() {
        let ops = ops(2);
        let rho = DensityMatrix::basis_state(ops.space, Level::Excited, 0);
        for theta in [0.0, 1.0, 3.0] {
            assert_relative_eq!(variance_theta(&rho, &ops, theta).unwrap(), 2.0, epsilon = 1e-12);
        }
        let (v, _) = min_variance(&rho, &ops).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn optimal_pure_state_reaches_physical_bound() {
        // (√3|g⟩ + |e⟩)/2 ⊗ |0⟩: population 1/4, |⟨σ−⟩|² = 3/16,
        // minimum variance 2(1/4 − 3/8) = −1/4.
        let ops = ops(1);
        let mut ket = DVector::zeros(ops.space.dim());
        ket[ops.space.index(Level::Ground, 0)] = C64::new(3.0f64.sqrt(), 0.0);
        ket[ops.space.index(Level::Excited, 0)] = C64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(ops.space, &ket).unwrap();
        let (v, theta) = min_variance(&rho, &ops).unwrap();
        assert_relative_eq!(v, -0.25, epsilon = 1e-12);
        assert_relative_eq!(theta, 0.0, epsilon = 1e-12);
        let grid_min = (0..720)
            .map(|k| variance_theta(&rho, &ops, k as f64 * std::f64::consts::PI / 360.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(grid_min, -0.25, epsilon = 1e-6);
    }

    #[test]
    fn no_coherence_means_no_squeezing() {
        // mixed state with zero coherence: variance = 2·population ≥ 0
        let ops = ops(1);
        let dim = ops.space.dim();
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        m[(ops.space.index(Level::Ground, 0), ops.space.index(Level::Ground, 0))] =
            C64::new(0.7, 0.0);
        m[(ops.space.index(Level::Excited, 0), ops.space.index(Level::Excited, 0))] =
            C64::new(0.3, 0.0);
        let rho = DensityMatrix::new(ops.space, m, 1e-8).unwrap();
        let (v, _) = min_variance(&rho, &ops).unwrap();
        assert_relative_eq!(v, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn variance_theta_is_pi_periodic_and_min_matches() {
        // superposition with a complex phase on the coherence
        let ops = ops(1);
        let mut ket = DVector::zeros(ops.space.dim());
        ket[ops.space.index(Level::Ground, 0)] = C64::new(0.8, 0.0);
        ket[ops.space.index(Level::Excited, 0)] = C64::from_polar(0.6, 1.1);
        let rho = DensityMatrix::pure(ops.space, &ket).unwrap();
        let (v_min, theta_star) = min_variance(&rho, &ops).unwrap();

        let pi = std::f64::consts::PI;
        for k in 0..12 {
            let theta = k as f64 * 0.43;
            let a = variance_theta(&rho, &ops, theta).unwrap();
            let b = variance_theta(&rho, &ops, theta + pi).unwrap();
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
        let grid_min = (0..720)
            .map(|k| variance_theta(&rho, &ops, k as f64 * pi / 720.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((grid_min - v_min).abs() < 1e-4);
        assert_relative_eq!(
            variance_theta(&rho, &ops, theta_star).unwrap(),
            v_min,
            epsilon = 1e-12
        );
    }

    #[test]
    fn db_conversion_reference_points() {
        assert_relative_eq!(squeezing_db(-0.175).unwrap(), 5.2, epsilon = 0.05);
        assert_relative_eq!(squeezing_db(-0.056).unwrap(), 1.1, epsilon = 0.05);
        assert_relative_eq!(squeezing_db(-0.125).unwrap(), 3.0103, epsilon = 1e-4);
        assert_eq!(squeezing_db(0.0).unwrap(), 0.0);
        assert!(squeezing_db(-0.25).is_err());
        assert!(squeezing_db(-0.3).is_err());
    }

    #[test]
    fn db_conversion_is_monotone() {
        let mut previous = f64::NEG_INFINITY;
        for k in 0..100 {
            let v = -0.249 + 0.01 * k as f64;
            let db = squeezing_db(v).unwrap();
            assert!(db < previous || previous == f64::NEG_INFINITY);
            if previous != f64::NEG_INFINITY {
                assert!(db < previous);
            }
            previous = db;
        }
    }
}
