//! Configuration-driven parameter sweeps, figure presets, and tabular
//! output.
//!
//! A sweep point runs the whole pipeline: kernel rates → generator →
//! steady state (with per-point truncation convergence) → squeezing
//! report. Failures are isolated per row; identical configs produce
//! byte-identical CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bath::PhononBathModel;
use crate::error::{Error, Result};
use crate::steady::{converge_truncation, GeneratorPath};
use crate::units::{validate_params, PhysicalParams, ValidatedParams};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A sweepable parameter, named after its config-schema key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisParam {
    OmegaR,
    GR,
    Kappa,
    Gamma,
    GammaPrime,
    DeltaXl,
    DeltaCl,
    Temperature,
    AlphaP,
    OmegaB,
}

impl AxisParam {
    pub fn from_config_key(key: &str) -> Result<Self> {
        Ok(match key {
            "omega_R_ueV" => Self::OmegaR,
            "g_R_ueV" => Self::GR,
            "kappa_ueV" => Self::Kappa,
            "gamma_ueV" => Self::Gamma,
            "gamma_prime_ueV" => Self::GammaPrime,
            "delta_xl_ueV" => Self::DeltaXl,
            "delta_cl_ueV" => Self::DeltaCl,
            "temperature_K" => Self::Temperature,
            "alpha_p_ps2" => Self::AlphaP,
            "omega_b_meV" => Self::OmegaB,
            other => {
                return Err(Error::Config(format!(
                    "`{other}` is not a sweepable parameter (use a config-schema key)"
                )))
            }
        })
    }

    /// Column base name and unit for emitted tables.
    pub fn column(&self) -> (&'static str, &'static str) {
        match self {
            Self::OmegaR => ("omega_r", "uev"),
            Self::GR => ("g_r", "uev"),
            Self::Kappa => ("kappa", "uev"),
            Self::Gamma => ("gamma", "uev"),
            Self::GammaPrime => ("gamma_prime", "uev"),
            Self::DeltaXl => ("delta_xl", "uev"),
            Self::DeltaCl => ("delta_cl", "uev"),
            Self::Temperature => ("temperature", "k"),
            Self::AlphaP => ("alpha_p", "ps2"),
            Self::OmegaB => ("omega_b", "mev"),
        }
    }

    fn apply(&self, p: &mut PhysicalParams, value: f64) {
        match self {
            Self::OmegaR => p.omega_r_uev = value,
            Self::GR => p.g_r_uev = value,
            Self::Kappa => p.kappa_uev = value,
            Self::Gamma => p.gamma_uev = value,
            Self::GammaPrime => p.gamma_prime_uev = value,
            Self::DeltaXl => p.delta_xl_uev = value,
            Self::DeltaCl => p.delta_cl_uev = value,
            Self::Temperature => p.temperature_k = value,
            Self::AlphaP => p.bath.alpha_p_ps2 = value,
            Self::OmegaB => p.bath.omega_b_mev = value,
        }
    }

    fn read(&self, p: &PhysicalParams) -> f64 {
        match self {
            Self::OmegaR => p.omega_r_uev,
            Self::GR => p.g_r_uev,
            Self::Kappa => p.kappa_uev,
            Self::Gamma => p.gamma_uev,
            Self::GammaPrime => p.gamma_prime_uev,
            Self::DeltaXl => p.delta_xl_uev,
            Self::DeltaCl => p.delta_cl_uev,
            Self::Temperature => p.temperature_k,
            Self::AlphaP => p.bath.alpha_p_ps2,
            Self::OmegaB => p.bath.omega_b_mev,
        }
    }
}

/// How an axis value maps onto a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Scale {
    /// parameter = scale × axis value.
    Const(f64),
    /// parameter = axis value × √(Ω_R² + Δ̃_xl²), resolved after all
    /// constant-scale targets have been applied.
    NormalizedDetuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisTarget {
    pub param: AxisParam,
    pub scale: Scale,
}

/// One sweep axis: a grid of values applied to one or more parameters.
#[derive(Debug, Clone, Serialize)]
pub struct SweepAxis {
    pub targets: Vec<AxisTarget>,
    pub values: Vec<f64>,
    /// Column base name for the normalized-axis column.
    pub label: String,
}

impl SweepAxis {
    pub fn single(param: AxisParam, values: Vec<f64>) -> Self {
        let label = param.column().0.to_string();
        Self { targets: vec![AxisTarget { param, scale: Scale::Const(1.0) }], values, label }
    }

    fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::Config("sweep axis has no target parameter".into()));
        }
        if self.values.is_empty() {
            return Err(Error::Config("sweep axis has an empty grid".into()));
        }
        let ascending = self.values.windows(2).all(|w| w[1] > w[0]);
        let descending = self.values.windows(2).all(|w| w[1] < w[0]);
        if self.values.len() > 1 && !ascending && !descending {
            return Err(Error::Config(format!(
                "sweep grid for `{}` must be strictly monotone",
                self.label
            )));
        }
        Ok(())
    }

    fn has_normalized_target(&self) -> bool {
        self.targets.iter().any(|t| matches!(t.scale, Scale::NormalizedDetuning))
    }
}

/// Report fields a sweep can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputField {
    Variance,
    Population,
    CoherenceSq,
    PhotonNumber,
    ThetaStar,
    SqueezingDb,
    NStar,
    RateSigmaPlus,
    RateSigmaMinus,
    RateSigmaPlusA,
    RateADagSigmaMinus,
    PopulationNoCavity,
    CoherenceSqNoCavity,
}

impl OutputField {
    pub fn column_name(&self) -> &'static str {
        match self {
            Self::Variance => "variance",
            Self::Population => "population",
            Self::CoherenceSq => "coherence_sq",
            Self::PhotonNumber => "photon_number",
            Self::ThetaStar => "theta_star_rad",
            Self::SqueezingDb => "squeezing_db",
            Self::NStar => "n_star",
            Self::RateSigmaPlus => "rate_sigma_plus_perps",
            Self::RateSigmaMinus => "rate_sigma_minus_perps",
            Self::RateSigmaPlusA => "rate_sigma_plus_a_perps",
            Self::RateADagSigmaMinus => "rate_a_dag_sigma_minus_perps",
            Self::PopulationNoCavity => "population_no_cavity",
            Self::CoherenceSqNoCavity => "coherence_sq_no_cavity",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "variance" => Self::Variance,
            "population" => Self::Population,
            "coherence_sq" => Self::CoherenceSq,
            "photon_number" => Self::PhotonNumber,
            "theta_star" => Self::ThetaStar,
            "squeezing_db" => Self::SqueezingDb,
            "n_star" => Self::NStar,
            "rate_sigma_plus" => Self::RateSigmaPlus,
            "rate_sigma_minus" => Self::RateSigmaMinus,
            "rate_sigma_plus_a" => Self::RateSigmaPlusA,
            "rate_a_dag_sigma_minus" => Self::RateADagSigmaMinus,
            "population_no_cavity" => Self::PopulationNoCavity,
            "coherence_sq_no_cavity" => Self::CoherenceSqNoCavity,
            other => return Err(Error::Config(format!("unknown output field `{other}`"))),
        })
    }

    fn needs_steady(&self) -> bool {
        matches!(
            self,
            Self::Variance
                | Self::Population
                | Self::CoherenceSq
                | Self::PhotonNumber
                | Self::ThetaStar
                | Self::SqueezingDb
                | Self::NStar
        )
    }

    fn needs_rates(&self) -> bool {
        matches!(
            self,
            Self::RateSigmaPlus | Self::RateSigmaMinus | Self::RateSigmaPlusA | Self::RateADagSigmaMinus
        )
    }

    fn needs_baseline(&self) -> bool {
        matches!(self, Self::PopulationNoCavity | Self::CoherenceSqNoCavity)
    }
}

pub fn default_outputs() -> Vec<OutputField> {
    vec![
        OutputField::Variance,
        OutputField::Population,
        OutputField::CoherenceSq,
        OutputField::PhotonNumber,
        OutputField::NStar,
    ]
}

/// A complete sweep description.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub base: PhysicalParams,
    pub axis1: SweepAxis,
    pub axis2: Option<SweepAxis>,
    pub outputs: Vec<OutputField>,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Worker-pool size; 0 picks the rayon default.
    pub threads: usize,
    pub path: GeneratorPath,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { threads: 1, path: GeneratorPath::Effective }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableMeta {
    pub config_hash: String,
    pub tool_version: String,
    pub n_star_max: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub values: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ResultTable {
    pub meta: TableMeta,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count).map(|k| start + step * k as f64).collect()
}

fn resolve_point(spec: &SweepSpec, value2: Option<f64>, value1: f64) -> PhysicalParams {
    let mut p = spec.base.clone();
    let mut normalized: Vec<(AxisParam, f64)> = Vec::new();
    if let (Some(axis2), Some(v2)) = (&spec.axis2, value2) {
        for t in &axis2.targets {
            match t.scale {
                Scale::Const(s) => t.param.apply(&mut p, s * v2),
                Scale::NormalizedDetuning => normalized.push((t.param, v2)),
            }
        }
    }
    for t in &spec.axis1.targets {
        match t.scale {
            Scale::Const(s) => t.param.apply(&mut p, s * value1),
            Scale::NormalizedDetuning => normalized.push((t.param, value1)),
        }
    }
    for (param, v) in normalized {
        let norm = (p.omega_r_uev * p.omega_r_uev + p.delta_xl_uev * p.delta_xl_uev).sqrt();
        param.apply(&mut p, v * norm);
    }
    p
}

fn model_key(p: &PhysicalParams) -> (u64, u64, u64) {
    // phonon-off rows share a zero-coupling model
    let alpha = if p.phonons_enabled { p.bath.alpha_p_ps2 } else { 0.0 };
    (
        alpha.to_bits(),
        p.bath.omega_b_mev.to_bits(),
        p.temperature_k.to_bits(),
    )
}

struct RowPlan {
    axis_params: Vec<AxisParam>,
    norm_axes: Vec<usize>, // indices into [axis2, axis1] that emit a norm column
}

fn column_plan(spec: &SweepSpec) -> (Vec<Column>, RowPlan) {
    let mut columns = Vec::new();
    let mut axis_params = Vec::new();
    let mut seen = Vec::new();
    let axes: Vec<&SweepAxis> = spec.axis2.iter().chain(std::iter::once(&spec.axis1)).collect();
    for axis in &axes {
        for t in &axis.targets {
            if !seen.contains(&t.param) {
                seen.push(t.param);
                axis_params.push(t.param);
                let (name, unit) = t.param.column();
                columns.push(Column { name: format!("{name}_{unit}"), unit: unit.to_string() });
            }
        }
    }
    let mut norm_axes = Vec::new();
    for (i, axis) in axes.iter().enumerate() {
        if axis.has_normalized_target() {
            norm_axes.push(i);
            columns.push(Column { name: format!("{}_norm", axis.label), unit: "dimensionless".into() });
        }
    }
    for field in &spec.outputs {
        let name = field.column_name().to_string();
        let unit = if name.ends_with("_perps") {
            "perps".to_string()
        } else if name.ends_with("_rad") {
            "rad".to_string()
        } else {
            "dimensionless".to_string()
        };
        columns.push(Column { name, unit });
    }
    (columns, RowPlan { axis_params, norm_axes })
}

fn compute_row(
    spec: &SweepSpec,
    plan: &RowPlan,
    opts: &RunOptions,
    models: &BTreeMap<(u64, u64, u64), std::result::Result<Arc<PhononBathModel>, String>>,
    value2: Option<f64>,
    value1: f64,
) -> Row {
    let p_raw = resolve_point(spec, value2, value1);
    let width = plan.axis_params.len()
        + plan.norm_axes.len()
        + spec.outputs.len();

    let mut values = Vec::with_capacity(width);
    for param in &plan.axis_params {
        values.push(param.read(&p_raw));
    }
    for &axis_idx in &plan.norm_axes {
        let raw = if spec.axis2.is_some() && axis_idx == 0 {
            value2.unwrap_or(f64::NAN)
        } else {
            value1
        };
        values.push(raw);
    }

    let outcome = (|| -> Result<Vec<f64>> {
        let p = validate_params(&p_raw)?;
        let model = models
            .get(&model_key(&p_raw))
            .expect("model prebuilt for every grid temperature")
            .as_ref()
            .map_err(|e| Error::Config(e.clone()))?;

        let needs_rates = spec.outputs.iter().any(OutputField::needs_rates);
        let needs_steady = spec.outputs.iter().any(OutputField::needs_steady);
        let needs_baseline = spec.outputs.iter().any(OutputField::needs_baseline);

        let rates = if needs_rates { Some(model.incoherent_rates(&p)?) } else { None };
        let steady = if needs_steady {
            Some(converge_truncation(&p, model, opts.path)?)
        } else {
            None
        };
        let baseline = if needs_baseline {
            let mut raw = p_raw.clone();
            raw.g_r_uev = 0.0;
            let pb = validate_params(&raw)?;
            Some(converge_truncation(&pb, model, opts.path)?)
        } else {
            None
        };

        let mut out = Vec::with_capacity(spec.outputs.len());
        for field in &spec.outputs {
            let v = match field {
                OutputField::Variance => steady.as_ref().unwrap().report.variance_min,
                OutputField::Population => steady.as_ref().unwrap().report.population,
                OutputField::CoherenceSq => steady.as_ref().unwrap().report.coherence_sq,
                OutputField::PhotonNumber => steady.as_ref().unwrap().report.photon_number,
                OutputField::ThetaStar => steady.as_ref().unwrap().report.theta_star,
                OutputField::SqueezingDb => steady.as_ref().unwrap().report.squeezing_db,
                OutputField::NStar => steady.as_ref().unwrap().n_star as f64,
                OutputField::RateSigmaPlus => rates.as_ref().unwrap().sigma_plus,
                OutputField::RateSigmaMinus => rates.as_ref().unwrap().sigma_minus,
                OutputField::RateSigmaPlusA => rates.as_ref().unwrap().sigma_plus_a,
                OutputField::RateADagSigmaMinus => rates.as_ref().unwrap().a_dag_sigma_minus,
                OutputField::PopulationNoCavity => baseline.as_ref().unwrap().report.population,
                OutputField::CoherenceSqNoCavity => baseline.as_ref().unwrap().report.coherence_sq,
            };
            out.push(v);
        }
        Ok(out)
    })();

    match outcome {
        Ok(out) => {
            values.extend(out);
            Row { values, error: None }
        }
        Err(e) => {
            values.extend(std::iter::repeat(f64::NAN).take(spec.outputs.len()));
            Row { values, error: Some(e.to_string()) }
        }
    }
}

/// Run every grid point of `spec`: rates → generator → steady state →
/// report, with per-point truncation convergence and per-row failure
/// isolation.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<ResultTable> {
    spec.axis1.validate()?;
    if let Some(axis2) = &spec.axis2 {
        axis2.validate()?;
    }
    if spec.outputs.is_empty() {
        return Err(Error::Config("sweep requests no outputs".into()));
    }
    validate_params(&spec.base)?;

    let config_hash = hash_spec(spec);
    let (columns, plan) = column_plan(spec);

    let values2: Vec<Option<f64>> = match &spec.axis2 {
        Some(axis2) => axis2.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let grid: Vec<(Option<f64>, f64)> = values2
        .iter()
        .flat_map(|v2| spec.axis1.values.iter().map(move |v1| (*v2, *v1)))
        .collect();

    // Bath models are shared across rows; build one per distinct
    // (alpha_p, omega_b, temperature) before going parallel.
    let mut models: BTreeMap<(u64, u64, u64), std::result::Result<Arc<PhononBathModel>, String>> =
        BTreeMap::new();
    for (v2, v1) in &grid {
        let p = resolve_point(spec, *v2, *v1);
        models.entry(model_key(&p)).or_insert_with(|| {
            PhononBathModel::for_params(&p)
                .map(Arc::new)
                .map_err(|e| e.to_string())
        });
    }

    let run = || -> Vec<Row> {
        grid.par_iter()
            .map(|(v2, v1)| compute_row(spec, &plan, opts, &models, *v2, *v1))
            .collect()
    };
    let rows = if opts.threads == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
        pool.install(run)
    };

    if rows.iter().all(|r| r.error.is_some()) {
        let first = rows
            .first()
            .and_then(|r| r.error.clone())
            .unwrap_or_else(|| "empty grid".into());
        return Err(Error::SweepAllFailed { rows: rows.len(), first });
    }

    let n_star_max = spec
        .outputs
        .iter()
        .position(|f| matches!(f, OutputField::NStar))
        .map(|pos| plan.axis_params.len() + plan.norm_axes.len() + pos)
        .and_then(|col| {
            rows.iter()
                .filter(|r| r.error.is_none())
                .map(|r| r.values[col] as usize)
                .max()
        });

    Ok(ResultTable {
        meta: TableMeta {
            config_hash,
            tool_version: TOOL_VERSION.to_string(),
            n_star_max,
        },
        columns,
        rows,
    })
}

fn hash_spec(spec: &SweepSpec) -> String {
    let serialized = serde_json::to_string(spec).expect("spec serialization");
    let digest = Sha256::digest(serialized.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// The reference figures this tool reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fig1" => Self::Fig1,
            "fig2" => Self::Fig2,
            "fig3a" => Self::Fig3a,
            "fig3b" => Self::Fig3b,
            "fig4a" => Self::Fig4a,
            "fig4b" => Self::Fig4b,
            "fig5a" => Self::Fig5a,
            "fig5b" => Self::Fig5b,
            other => return Err(Error::UnknownFigure(other.to_string())),
        })
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4a => "fig4a",
            Self::Fig4b => "fig4b",
            Self::Fig5a => "fig5a",
            Self::Fig5b => "fig5b",
        };
        f.write_str(s)
    }
}

/// Shared dot and bath constants of the reference parameter set:
/// γ = 2 μeV, γ' = 0.5 μeV, α_p = 0.06 ps², ω_b = 1 meV.
fn reference_base(phonons: bool, temperature_k: f64) -> PhysicalParams {
    PhysicalParams {
        omega_r_uev: 100.0,
        g_r_uev: 60.0,
        kappa_uev: 90.0,
        gamma_uev: 2.0,
        gamma_prime_uev: 0.5,
        delta_xl_uev: 100.0,
        delta_cl_uev: 0.0,
        temperature_k,
        phonons_enabled: phonons,
        fock_truncation: 6,
        bath: crate::units::PhononBathParams::default_ingaas(),
    }
}

/// Axis that drives Ω_R and ties g_R = 0.6Ω_R, κ = 0.9Ω_R,
/// Δ̃_xl = ±Ω_R to it.
fn rabi_curve_axis(detuning_sign: f64, values: Vec<f64>) -> SweepAxis {
    SweepAxis {
        targets: vec![
            AxisTarget { param: AxisParam::OmegaR, scale: Scale::Const(1.0) },
            AxisTarget { param: AxisParam::GR, scale: Scale::Const(0.6) },
            AxisTarget { param: AxisParam::Kappa, scale: Scale::Const(0.9) },
            AxisTarget { param: AxisParam::DeltaXl, scale: Scale::Const(detuning_sign) },
        ],
        values,
        label: "omega_r".into(),
    }
}

fn normalized_detuning_axis(count: usize, lo: f64, hi: f64) -> SweepAxis {
    SweepAxis {
        targets: vec![AxisTarget { param: AxisParam::DeltaCl, scale: Scale::NormalizedDetuning }],
        values: linspace(lo, hi, count),
        label: "delta_cl".into(),
    }
}

/// The exact parameter sets of the reference figures.
pub fn figure_preset(id: FigureId) -> SweepSpec {
    match id {
        FigureId::Fig1 => {
            // Rate profiles at Ω_R = g_R = 100 μeV, T ∈ {4, 10} K; the
            // axis drives Δ̃_xl and sets Δ_cl = 2Δ̃_xl so that
            // Δ_cx = Δ̃_xl: all four rates are profiled at the same
            // argument.
            let mut base = reference_base(true, 4.0);
            base.g_r_uev = 100.0;
            SweepSpec {
                base,
                axis1: SweepAxis {
                    targets: vec![
                        AxisTarget { param: AxisParam::DeltaXl, scale: Scale::Const(1.0) },
                        AxisTarget { param: AxisParam::DeltaCl, scale: Scale::Const(2.0) },
                    ],
                    values: linspace(-2000.0, 2000.0, 81),
                    label: "delta_xl".into(),
                },
                axis2: Some(SweepAxis::single(AxisParam::Temperature, vec![4.0, 10.0])),
                outputs: vec![
                    OutputField::RateSigmaPlus,
                    OutputField::RateSigmaMinus,
                    OutputField::RateSigmaPlusA,
                    OutputField::RateADagSigmaMinus,
                ],
            }
        }
        FigureId::Fig2 => SweepSpec {
            base: reference_base(false, 0.0),
            axis1: normalized_detuning_axis(121, -3.0, 3.0),
            axis2: Some(rabi_curve_axis(1.0, vec![50.0, 100.0, 200.0])),
            outputs: default_outputs(),
        },
        FigureId::Fig3a => SweepSpec {
            base: reference_base(true, 4.0),
            axis1: normalized_detuning_axis(121, -3.0, 3.0),
            axis2: Some(rabi_curve_axis(1.0, vec![50.0, 100.0, 200.0])),
            outputs: default_outputs(),
        },
        FigureId::Fig3b => SweepSpec {
            base: reference_base(true, 4.0),
            axis1: normalized_detuning_axis(121, -3.0, 3.0),
            axis2: Some(rabi_curve_axis(-1.0, vec![50.0, 100.0, 200.0])),
            outputs: default_outputs(),
        },
        FigureId::Fig4a | FigureId::Fig4b => {
            let phonons = id == FigureId::Fig4b;
            let sign = if phonons { -1.0 } else { 1.0 };
            let mut base = reference_base(phonons, if phonons { 4.0 } else { 0.0 });
            base.omega_r_uev = 200.0;
            base.g_r_uev = 120.0;
            base.kappa_uev = 180.0;
            base.delta_xl_uev = sign * 200.0;
            SweepSpec {
                base,
                axis1: normalized_detuning_axis(121, -3.0, 3.0),
                axis2: None,
                outputs: vec![
                    OutputField::Population,
                    OutputField::CoherenceSq,
                    OutputField::Variance,
                    OutputField::PhotonNumber,
                    OutputField::PopulationNoCavity,
                    OutputField::CoherenceSqNoCavity,
                    OutputField::NStar,
                ],
            }
        }
        FigureId::Fig5a | FigureId::Fig5b => {
            let phonons = id == FigureId::Fig5b;
            let sign = if phonons { -1.0 } else { 1.0 };
            let mut base = reference_base(phonons, if phonons { 4.0 } else { 0.0 });
            base.omega_r_uev = 200.0;
            base.g_r_uev = 120.0;
            base.kappa_uev = 180.0;
            base.delta_xl_uev = sign * 200.0;
            // cavity fixed at the variance-optimal detuning ±√(Ω_R²+Δ̃_xl²)
            base.delta_cl_uev = sign * (200.0f64 * 200.0 + 200.0 * 200.0).sqrt();
            SweepSpec {
                base,
                axis1: SweepAxis::single(AxisParam::GammaPrime, linspace(0.5, 18.0, 36)),
                axis2: Some(SweepAxis::single(AxisParam::Gamma, linspace(1.0, 3.0, 21))),
                outputs: vec![
                    OutputField::Variance,
                    OutputField::Population,
                    OutputField::CoherenceSq,
                    OutputField::NStar,
                ],
            }
        }
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// CSV with `# key=value` provenance comments, 12-significant-digit
/// floats, and a trailing `error` column for failed rows.
pub fn emit_csv<W: std::io::Write>(table: &ResultTable, w: &mut W) -> Result<()> {
    writeln!(w, "# config_hash={}", table.meta.config_hash)?;
    writeln!(w, "# tool_version={}", table.meta.tool_version)?;
    if let Some(n) = table.meta.n_star_max {
        writeln!(w, "# n_star_max={n}")?;
    }
    let header: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
    writeln!(w, "{},error", header.join(","))?;
    for row in &table.rows {
        let mut line = String::new();
        for (i, v) in row.values.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format_value(*v));
        }
        line.push(',');
        if let Some(e) = &row.error {
            let escaped = e.replace('"', "\"\"");
            let _ = write!(line, "\"{escaped}\"");
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonTable<'a> {
    meta: JsonMeta<'a>,
    rows: Vec<Vec<f64>>,
    row_errors: Vec<Option<&'a str>>,
}

#[derive(Serialize)]
struct JsonMeta<'a> {
    config_hash: &'a str,
    tool_version: &'a str,
    n_star_max: Option<usize>,
    columns: &'a [Column],
}

/// JSON mirror of the CSV content: a `meta` object plus `rows`.
pub fn emit_json<W: std::io::Write>(table: &ResultTable, w: &mut W) -> Result<()> {
    let doc = JsonTable {
        meta: JsonMeta {
            config_hash: &table.meta.config_hash,
            tool_version: &table.meta.tool_version,
            n_star_max: table.meta.n_star_max,
            columns: &table.columns,
        },
        rows: table.rows.iter().map(|r| r.values.clone()).collect(),
        row_errors: table.rows.iter().map(|r| r.error.as_deref()).collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)
        .map_err(|e| Error::Config(format!("json emit: {e}")))?;
    writeln!(w)?;
    Ok(())
}

/// Run one parameter point through the full pipeline and return its report
/// together with the converged truncation.
pub fn run_single_point(
    p: &ValidatedParams,
    opts: &RunOptions,
) -> Result<crate::steady::TruncationConvergence> {
    let model = PhononBathModel::for_params(p.params())?;
    converge_truncation(p, &model, opts.path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-3.0, 3.0, 121);
        assert_eq!(v.len(), 121);
        assert_eq!(v[0], -3.0);
        assert_eq!(*v.last().unwrap(), 3.0);
    }

    #[test]
    fn preset_fidelity_fig2() {
        let spec = figure_preset(FigureId::Fig2);
        assert_eq!(spec.base.gamma_uev, 2.0);
        assert_eq!(spec.base.gamma_prime_uev, 0.5);
        assert!(!spec.base.phonons_enabled);
        let axis2 = spec.axis2.as_ref().unwrap();
        assert_eq!(axis2.values, vec![50.0, 100.0, 200.0]);
        let scales: Vec<f64> = axis2
            .targets
            .iter()
            .map(|t| match t.scale {
                Scale::Const(s) => s,
                _ => f64::NAN,
            })
            .collect();
        assert_eq!(scales, vec![1.0, 0.6, 0.9, 1.0]);
    }

    #[test]
    fn preset_fidelity_fig5b() {
        let spec = figure_preset(FigureId::Fig5b);
        assert!(spec.base.phonons_enabled);
        assert_eq!(spec.base.temperature_k, 4.0);
        assert_eq!(spec.base.delta_xl_uev, -spec.base.omega_r_uev);
        assert_relative_eq!(spec.base.delta_cl_uev, -282.8427, epsilon = 1e-3);
        assert_eq!(spec.axis1.values.len(), 36);
        assert_eq!(spec.axis2.as_ref().unwrap().values.len(), 21);
        assert_eq!(spec.axis1.values[0], 0.5);
        assert_eq!(*spec.axis1.values.last().unwrap(), 18.0);
    }

    #[test]
    fn preset_fig1_has_four_rate_columns() {
        let spec = figure_preset(FigureId::Fig1);
        assert_eq!(spec.outputs.len(), 4);
        assert!(spec.outputs.iter().all(OutputField::needs_rates));
        // Δ_cl = 2Δ̃_xl makes Δ_cx equal to the swept detuning
        let scales: Vec<f64> = spec
            .axis1
            .targets
            .iter()
            .map(|t| match t.scale {
                Scale::Const(s) => s,
                _ => f64::NAN,
            })
            .collect();
        assert_eq!(scales, vec![1.0, 2.0]);
    }

    #[test]
    fn resolve_point_normalized_detuning() {
        let spec = figure_preset(FigureId::Fig2);
        let p = resolve_point(&spec, Some(200.0), 1.0);
        assert_eq!(p.omega_r_uev, 200.0);
        assert_eq!(p.g_r_uev, 120.0);
        assert_eq!(p.kappa_uev, 180.0);
        assert_eq!(p.delta_xl_uev, 200.0);
        assert_relative_eq!(p.delta_cl_uev, (2.0f64 * 200.0 * 200.0).sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn unknown_figure_is_an_error() {
        assert!(matches!("fig9".parse::<FigureId>(), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn axis_rejects_non_monotone_grid() {
        let mut axis = SweepAxis::single(AxisParam::Gamma, vec![1.0, 3.0, 2.0]);
        assert!(axis.validate().is_err());
        axis.values = vec![3.0, 2.0, 1.0];
        assert!(axis.validate().is_ok());
    }

    #[test]
    fn csv_emission_shape() {
        let table = ResultTable {
            meta: TableMeta {
                config_hash: "abcd".into(),
                tool_version: "0.0.0".into(),
                n_star_max: Some(6),
            },
            columns: vec![
                Column { name: "x_uev".into(), unit: "uev".into() },
                Column { name: "variance".into(), unit: "dimensionless".into() },
            ],
            rows: vec![
                Row { values: vec![1.0, -0.125], error: None },
                Row { values: vec![2.0, f64::NAN], error: Some("bad, \"quoted\"".into()) },
            ],
        };
        let mut buf = Vec::new();
        emit_csv(&table, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config_hash=abcd");
        assert_eq!(lines[3], "x_uev,variance,error");
        assert!(lines[4].starts_with("1.00000000000e0,-1.25000000000e-1,"));
        assert!(lines[5].contains("NaN"));
        assert!(lines[5].contains("\"bad, \"\"quoted\"\"\""));
    }

    #[test]
    fn empty_table_emits_header_only() {
        let table = ResultTable {
            meta: TableMeta { config_hash: "x".into(), tool_version: "v".into(), n_star_max: None },
            columns: vec![Column { name: "a".into(), unit: "".into() }],
            rows: vec![],
        };
        let mut buf = Vec::new();
        emit_csv(&table, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }

    #[test]
    fn csv_round_trip_at_12_digits() {
        let values = [1.2345678901234e-7, -0.12345678901234, 282.84271247462];
        for v in values {
            let printed = format_value(v);
            let parsed: f64 = printed.parse().unwrap();
            assert_relative_eq!(parsed, v, max_relative = 1e-11);
            // printing again reproduces the same bytes
            assert_eq!(format_value(parsed), printed);
        }
    }
}
