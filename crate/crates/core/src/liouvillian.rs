//! Generators of the dissipative dynamics as superoperators on
//! column-stacked density matrices.
//!
//! Two paths are provided. The effective path adds four phonon-induced
//! Lindblad channels (σ+, σ−, σ+a, a†σ−) with rates from the half-line
//! Fourier kernel of e^{φ(τ)} − 1. The full path keeps the second-order
//! generator: X̃_m = ∫₀^∞ G_m(τ) e^{−iHτ} X_m e^{iHτ} dτ evaluated in the
//! eigenbasis of the system Hamiltonian, assembled as
//! −Σ_m ([X_m, X̃_m ρ] + H.c.). Vectorization is column-stacking, so
//! vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::bath::PhononBathModel;
use crate::error::{Error, Result};
use crate::hilbert::{build_operators, Operator, OperatorSet, SpaceDescriptor};
use crate::units::ValidatedParams;

/// Column-stacked vectorization of a square matrix.
pub fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &DVector<C64>, dim: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// The polaron-frame system Hamiltonian, ħ = 1, entries in rad/ps.
#[derive(Debug, Clone)]
pub struct SystemHamiltonian {
    pub operator: Operator,
}

/// H = Δ̃_xl σ+σ− + Δ_cl a†a + (Ω_R/2)(σ+ + σ−) + g_R(σ+a + a†σ−).
///
/// With phonons disabled the same form is used with the inputs read as bare
/// couplings; nothing else changes.
pub fn build_hamiltonian(p: &ValidatedParams, ops: &OperatorSet) -> SystemHamiltonian {
    let half_omega = C64::new(0.5 * p.omega_r(), 0.0);
    let g = C64::new(p.g_r(), 0.0);
    let population = &ops.sigma_plus * &ops.sigma_minus;
    let photons = &ops.a_dag * &ops.a;
    let drive = (&ops.sigma_plus + &ops.sigma_minus).scale(half_omega);
    let exchange = (&(&ops.sigma_plus * &ops.a) + &(&ops.a_dag * &ops.sigma_minus)).scale(g);
    let h = &(&population.scale(C64::new(p.delta_xl(), 0.0))
        + &photons.scale(C64::new(p.delta_cl(), 0.0)))
        + &(&drive + &exchange);
    SystemHamiltonian { operator: h }
}

/// The Hermitian interaction operators that couple to the phonon
/// fluctuations, built from the *bare* couplings Ω = Ω_R/⟨B⟩, g = g_R/⟨B⟩.
#[derive(Debug, Clone)]
pub struct InteractionOperators {
    pub x_g: Operator,
    pub x_u: Operator,
}

pub fn interaction_operators(omega_bare: f64, g_bare: f64, ops: &OperatorSet) -> InteractionOperators {
    let half_omega = C64::new(0.5 * omega_bare, 0.0);
    let g = C64::new(g_bare, 0.0);
    let i = C64::i();
    let up = &ops.sigma_plus * &ops.a;
    let down = &ops.a_dag * &ops.sigma_minus;
    let x_g = &(&ops.sigma_plus + &ops.sigma_minus).scale(half_omega) + &(&up + &down).scale(g);
    let x_u = &(&ops.sigma_plus - &ops.sigma_minus).scale(i * half_omega)
        + &(&up - &down).scale(i * g);
    InteractionOperators { x_g, x_u }
}

/// A linear map on vectorized density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    space: SpaceDescriptor,
    matrix: DMatrix<C64>,
}

impl Superoperator {
    pub fn zeros(space: SpaceDescriptor) -> Self {
        let d2 = space.dim() * space.dim();
        Self { space, matrix: DMatrix::zeros(d2, d2) }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Apply to a density-matrix-shaped operator.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        unvectorize(&(&self.matrix * vectorize(rho)), self.space.dim())
    }

    /// Max |vec(1)† L| entry; zero for a trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        let dim = self.space.dim();
        let d2 = dim * dim;
        let mut worst: f64 = 0.0;
        for j in 0..d2 {
            let mut acc = C64::new(0.0, 0.0);
            for d in 0..dim {
                acc += self.matrix[(d * dim + d, j)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    /// Max absolute row sum.
    pub fn linf_norm(&self) -> f64 {
        let d2 = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..d2 {
            let mut acc = 0.0;
            for j in 0..d2 {
                acc += self.matrix[(i, j)].norm();
            }
            worst = worst.max(acc);
        }
        worst
    }

}

/// Accumulate α·vec(AρB) = α·(Bᵀ ⊗ A) into `acc`, skipping zero entries
/// of the sparse factors.
fn accumulate_sandwich(acc: &mut DMatrix<C64>, dim: usize, alpha: C64, a: &DMatrix<C64>, b: &DMatrix<C64>) {
    for p in 0..dim {
        for r in 0..dim {
            let bt = b[(r, p)];
            if bt == C64::new(0.0, 0.0) {
                continue;
            }
            let w = alpha * bt;
            for s in 0..dim {
                for q in 0..dim {
                    let av = a[(q, s)];
                    if av != C64::new(0.0, 0.0) {
                        acc[(p * dim + q, r * dim + s)] += w * av;
                    }
                }
            }
        }
    }
}

fn accumulate_commutator(acc: &mut DMatrix<C64>, dim: usize, h: &DMatrix<C64>) {
    let id = DMatrix::<C64>::identity(dim, dim);
    accumulate_sandwich(acc, dim, -C64::i(), h, &id);
    accumulate_sandwich(acc, dim, C64::i(), &id, h);
}

fn accumulate_dissipator(acc: &mut DMatrix<C64>, dim: usize, c: &DMatrix<C64>, rate: f64) {
    if rate == 0.0 {
        return;
    }
    let id = DMatrix::<C64>::identity(dim, dim);
    let c_dag = c.adjoint();
    let cdc = &c_dag * c;
    accumulate_sandwich(acc, dim, C64::new(rate, 0.0), c, &c_dag);
    accumulate_sandwich(acc, dim, C64::new(-0.5 * rate, 0.0), &cdc, &id);
    accumulate_sandwich(acc, dim, C64::new(-0.5 * rate, 0.0), &id, &cdc);
}

/// −i[H, ·] as a superoperator.
pub fn hamiltonian_superoperator(h: &SystemHamiltonian) -> Superoperator {
    let space = h.operator.space();
    let dim = space.dim();
    let mut matrix = DMatrix::zeros(dim * dim, dim * dim);
    accumulate_commutator(&mut matrix, dim, h.operator.matrix());
    Superoperator { space, matrix }
}

/// (rate/2)·𝓔[c] with 𝓔[c]ρ = 2cρc† − c†cρ − ρc†c, i.e. the GKSL
/// dissipator with decay rate `rate`.
pub fn lindblad_dissipator(c: &Operator, rate: f64) -> Result<Superoperator> {
    if !(rate >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "rate",
            reason: format!("dissipator rate must be >= 0, got {rate}"),
        });
    }
    let space = c.space();
    let dim = space.dim();
    let mut matrix = DMatrix::zeros(dim * dim, dim * dim);
    accumulate_dissipator(&mut matrix, dim, c.matrix(), rate);
    Ok(Superoperator { space, matrix })
}

/// The effective generator: −i[H, ·] plus the phenomenological channels
/// (γ, γ', κ) and the four phonon-induced channels.
pub fn build_effective_liouvillian(
    p: &ValidatedParams,
    model: &PhononBathModel,
) -> Result<Superoperator> {
    let space = SpaceDescriptor::new(p.fock_truncation)?;
    let ops = build_operators(space);
    let rates = model.incoherent_rates(p)?;
    let dim = space.dim();

    let h = build_hamiltonian(p, &ops);
    let population = &ops.sigma_plus * &ops.sigma_minus;
    let photon_up = &ops.sigma_plus * &ops.a;
    let photon_down = &ops.a_dag * &ops.sigma_minus;

    let mut matrix = DMatrix::zeros(dim * dim, dim * dim);
    accumulate_commutator(&mut matrix, dim, h.operator.matrix());
    accumulate_dissipator(&mut matrix, dim, ops.sigma_minus.matrix(), p.gamma() + rates.sigma_minus);
    accumulate_dissipator(&mut matrix, dim, ops.sigma_plus.matrix(), rates.sigma_plus);
    accumulate_dissipator(&mut matrix, dim, population.matrix(), p.gamma_prime());
    accumulate_dissipator(&mut matrix, dim, ops.a.matrix(), p.kappa());
    accumulate_dissipator(&mut matrix, dim, photon_down.matrix(), rates.a_dag_sigma_minus);
    accumulate_dissipator(&mut matrix, dim, photon_up.matrix(), rates.sigma_plus_a);
    Ok(Superoperator { space, matrix })
}

/// The full second-order generator, with the twiddled operators evaluated
/// in the exact eigenbasis of H (no further approximation): for eigenpairs
/// (λ_j, v_j), (X̃_m)_{jk} = (X_m)_{jk} Ĝ_m(λ_j − λ_k).
pub fn build_full_generator(
    p: &ValidatedParams,
    model: &PhononBathModel,
    ops: &OperatorSet,
) -> Result<Superoperator> {
    let space = ops.space;
    let dim = space.dim();
    let h = build_hamiltonian(p, ops);
    let population = &ops.sigma_plus * &ops.sigma_minus;

    let mut matrix = DMatrix::zeros(dim * dim, dim * dim);
    accumulate_commutator(&mut matrix, dim, h.operator.matrix());
    accumulate_dissipator(&mut matrix, dim, ops.sigma_minus.matrix(), p.gamma());
    accumulate_dissipator(&mut matrix, dim, population.matrix(), p.gamma_prime());
    accumulate_dissipator(&mut matrix, dim, ops.a.matrix(), p.kappa());
    let mut l = Superoperator { space, matrix };

    if !p.phonons_enabled || model.params().alpha_p_ps2 == 0.0 {
        return Ok(l);
    }

    let b = model.mean_displacement();
    let interaction = interaction_operators(p.omega_r() / b, p.g_r() / b, ops);

    let eig = nalgebra::SymmetricEigen::new(h.operator.matrix().clone());
    let v = &eig.eigenvectors;
    let v_dag = v.adjoint();
    let dim = space.dim();
    let id = DMatrix::<C64>::identity(dim, dim);

    // Ĝ_g and Ĝ_u cached per Bohr frequency (keyed at 1e-9 rad/ps).
    let mut cache: BTreeMap<i64, (C64, C64)> = BTreeMap::new();
    let mut green_at = |freq: f64| -> Result<(C64, C64)> {
        let key = (freq * 1e9).round() as i64;
        if let Some(&hit) = cache.get(&key) {
            return Ok(hit);
        }
        let value = model.green_half_fourier(freq)?;
        cache.insert(key, value);
        Ok(value)
    };

    for (which, x) in [(0usize, &interaction.x_g), (1usize, &interaction.x_u)] {
        let x_eig = &v_dag * x.matrix() * v;
        let mut x_twiddle_eig = DMatrix::<C64>::zeros(dim, dim);
        for j in 0..dim {
            for k in 0..dim {
                let amplitude = x_eig[(j, k)];
                if amplitude.norm() < 1e-14 {
                    continue;
                }
                let (g_hat, u_hat) = green_at(eig.eigenvalues[j] - eig.eigenvalues[k])?;
                x_twiddle_eig[(j, k)] = amplitude * if which == 0 { g_hat } else { u_hat };
            }
        }
        let x_twiddle = v * x_twiddle_eig * &v_dag;

        let xm = x.matrix();
        let x_xt = xm * &x_twiddle;
        let xtd_x = x_twiddle.adjoint() * xm;
        let x_twiddle_dag = x_twiddle.adjoint();
        let one = C64::new(1.0, 0.0);
        // −(X X̃ ρ − X̃ ρ X + ρ X̃†X − X ρ X̃†)
        accumulate_sandwich(&mut l.matrix, dim, -one, &x_xt, &id);
        accumulate_sandwich(&mut l.matrix, dim, one, &x_twiddle, xm);
        accumulate_sandwich(&mut l.matrix, dim, -one, &id, &xtd_x);
        accumulate_sandwich(&mut l.matrix, dim, one, xm, &x_twiddle_dag);
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{DensityMatrix, Level};
    use crate::units::{validate_params, PhononBathParams, PhysicalParams};
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

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

    fn model_4k() -> &'static PhononBathModel {
        static MODEL: OnceLock<PhononBathModel> = OnceLock::new();
        MODEL.get_or_init(|| PhononBathModel::new(PhononBathParams::default_ingaas(), 4.0).unwrap())
    }

    #[test]
    fn hamiltonian_is_diagonal_without_couplings() {
        let p = params(0.0, 0.0, 90.0, 2.0, 0.5, 150.0, 100.0, 2, false);
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let h = build_hamiltonian(&p, &ops);
        let m = h.operator.matrix();
        let dxl = p.delta_xl();
        let dcl = p.delta_cl();
        for level in [Level::Ground, Level::Excited] {
            for n in 0..=2usize {
                let i = ops.space.index(level, n);
                let expected = n as f64 * dcl
                    + if level == Level::Excited { dxl } else { 0.0 };
                assert_relative_eq!(m[(i, i)].re, expected, epsilon = 1e-14);
                for j in 0..ops.space.dim() {
                    if j != i {
                        assert_eq!(m[(i, j)], C64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let p = params(137.0, 61.0, 90.0, 2.0, 0.5, -850.0, 333.0, 3, false);
        let ops = build_operators(SpaceDescriptor::new(3).unwrap());
        let h = build_hamiltonian(&p, &ops);
        assert!(h.operator.is_hermitian(1e-12));
    }

    #[test]
    fn vacuum_rabi_doublet() {
        // N = 1, Ω_R = 0: on {|e,0⟩, |g,1⟩} the eigenvalues are
        // (Δ̃_xl + Δ_cl)/2 ± sqrt((Δ_cx/2)² + g_R²).
        let p = params(0.0, 45.0, 90.0, 2.0, 0.5, 120.0, 80.0, 1, false);
        let ops = build_operators(SpaceDescriptor::new(1).unwrap());
        let h = build_hamiltonian(&p, &ops);
        let eig = nalgebra::SymmetricEigen::new(h.operator.matrix().clone());
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        let mid = 0.5 * (p.delta_xl() + p.delta_cl());
        let split = (0.25 * p.delta_cx() * p.delta_cx() + p.g_r() * p.g_r()).sqrt();
        // spectrum: {0, mid − split, mid + split, Δ̃_xl + Δ_cl}
        let mut expected = vec![0.0, mid - split, mid + split, p.delta_xl() + p.delta_cl()];
        expected.sort_by(f64::total_cmp);
        for (got, want) in values.iter().zip(expected.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn interaction_operators_are_hermitian() {
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let inter = interaction_operators(0.3, 0.2, &ops);
        assert!(inter.x_g.is_hermitian(1e-14));
        assert!(inter.x_u.is_hermitian(1e-14));
    }

    #[test]
    fn dissipator_zero_rate_is_zero() {
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let d = lindblad_dissipator(&ops.sigma_minus, 0.0).unwrap();
        assert_eq!(d.matrix().camax(), 0.0);
        assert!(lindblad_dissipator(&ops.sigma_minus, -1.0).is_err());
    }

    #[test]
    fn amplitude_damping_moves_population_down() {
        let ops = build_operators(SpaceDescriptor::new(1).unwrap());
        let gamma = 0.25;
        let d = lindblad_dissipator(&ops.sigma_minus, gamma).unwrap();
        let rho = DensityMatrix::basis_state(ops.space, Level::Excited, 0);
        let drho = d.apply(rho.matrix());
        let ie = ops.space.index(Level::Excited, 0);
        let ig = ops.space.index(Level::Ground, 0);
        assert_relative_eq!(drho[(ie, ie)].re, -gamma, epsilon = 1e-14);
        assert_relative_eq!(drho[(ig, ig)].re, gamma, epsilon = 1e-14);
    }

    #[test]
    fn dephasing_leaves_populations_invariant() {
        // c = σ+σ− is idempotent, so the diagonal of the dissipator output
        // vanishes for every state.
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let c = &ops.sigma_plus * &ops.sigma_minus;
        let d = lindblad_dissipator(&c, 0.7).unwrap();
        let dim = ops.space.dim();
        let mut seed = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw = DMatrix::from_fn(dim, dim, |_, _| C64::new(next(), next()));
        let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let out = d.apply(&herm);
        for i in 0..dim {
            assert!(out[(i, i)].norm() < 1e-13);
        }
    }

    #[test]
    fn effective_generator_preserves_trace() {
        let p = params(180.0, 95.0, 140.0, 2.0, 0.5, -310.0, 170.0, 3, true);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        assert!(l.trace_residual() < 1e-10 * l.linf_norm().max(1.0));
    }

    #[test]
    fn effective_generator_preserves_hermiticity() {
        let p = params(120.0, 72.0, 108.0, 2.0, 0.5, 120.0, 170.0, 2, true);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        let dim = l.space().dim();
        let mut seed = 0xDEADBEEFCAFEF00Du64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw = DMatrix::from_fn(dim, dim, |_, _| C64::new(next(), next()));
        let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let out = l.apply(&herm);
        assert!((&out - out.adjoint()).camax() < 1e-10);
    }

    #[test]
    fn pure_unitary_generator_is_anti_hermitian() {
        let p = params(140.0, 80.0, 0.0, 0.0, 0.0, 95.0, 55.0, 2, false);
        let l = build_effective_liouvillian(&p, model_4k()).unwrap();
        let sum = l.matrix() + l.matrix().adjoint();
        assert!(sum.camax() < 1e-12);
    }

    #[test]
    fn full_generator_reduces_to_effective_without_phonons() {
        let model = PhononBathModel::new(PhononBathParams { alpha_p_ps2: 0.0, omega_b_mev: 1.0 }, 4.0).unwrap();
        let mut raw = params(150.0, 90.0, 135.0, 2.0, 0.5, 150.0, 210.0, 2, true).params().clone();
        raw.bath.alpha_p_ps2 = 0.0;
        let p = validate_params(&raw).unwrap();
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let full = build_full_generator(&p, &model, &ops).unwrap();
        let eff = build_effective_liouvillian(&p, &model).unwrap();
        assert!((full.matrix() - eff.matrix()).camax() < 1e-15);
    }

    #[test]
    fn full_generator_preserves_trace_and_hermiticity() {
        let p = params(100.0, 100.0, 90.0, 2.0, 0.5, -500.0, 300.0, 2, true);
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let l = build_full_generator(&p, model_4k(), &ops).unwrap();
        assert!(l.trace_residual() < 1e-8 * l.linf_norm().max(1.0));

        let dim = l.space().dim();
        let mut seed = 0x123456789ABCDEFu64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw = DMatrix::from_fn(dim, dim, |_, _| C64::new(next(), next()));
        let herm = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
        let out = l.apply(&herm);
        assert!((&out - out.adjoint()).camax() < 1e-10);
    }

    #[test]
    fn full_generator_ground_pumping_rate_matches_sigma_plus_channel() {
        // With detunings far above the couplings the dressed Bohr
        // frequencies approach the bare detunings, so the incoherent
        // pumping rate out of |g,0⟩ approaches Γ^{σ+}.
        let p = params(10.0, 10.0, 90.0, 2.0, 0.5, -1000.0, -700.0, 2, true);
        let ops = build_operators(SpaceDescriptor::new(2).unwrap());
        let l = build_full_generator(&p, model_4k(), &ops).unwrap();
        let rho = DensityMatrix::ground_state(ops.space);
        let drho = l.apply(rho.matrix());
        let pop = &ops.sigma_plus * &ops.sigma_minus;
        let mut pump = C64::new(0.0, 0.0);
        let dim = ops.space.dim();
        for i in 0..dim {
            for j in 0..dim {
                pump += pop.matrix()[(i, j)] * drho[(j, i)];
            }
        }
        let rates = model_4k().incoherent_rates(&p).unwrap();
        assert_relative_eq!(pump.re, rates.sigma_plus, max_relative = 2e-2);
    }

    #[test]
    fn vectorization_round_trip() {
        let dim = 4;
        let m = DMatrix::from_fn(dim, dim, |i, j| C64::new(i as f64, j as f64));
        let v = vectorize(&m);
        assert_eq!(unvectorize(&v, dim), m);
        // column stacking: entry (row=1, col=2) sits at index 2*dim + 1
        assert_eq!(v[2 * dim + 1], m[(1, 2)]);
    }
}
