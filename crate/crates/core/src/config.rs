//! JSON configuration schema with explicit-unit keys.
//!
//! Unknown keys are a hard error. A parameter file holds exactly the keys
//! of [`ParamsConfig`]; a sweep file nests one under `params` and adds an
//! `axis` (and optionally `axis2` and `outputs`).

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::sweep::{default_outputs, linspace, AxisParam, OutputField, SweepAxis, SweepSpec};
use crate::units::{PhononBathParams, PhysicalParams};

fn default_fock_truncation() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(rename = "omega_R_ueV")]
    pub omega_r_uev: f64,
    #[serde(rename = "g_R_ueV")]
    pub g_r_uev: f64,
    #[serde(rename = "kappa_ueV")]
    pub kappa_uev: f64,
    #[serde(rename = "gamma_ueV")]
    pub gamma_uev: f64,
    #[serde(rename = "gamma_prime_ueV")]
    pub gamma_prime_uev: f64,
    #[serde(rename = "delta_xl_ueV")]
    pub delta_xl_uev: f64,
    #[serde(rename = "delta_cl_ueV")]
    pub delta_cl_uev: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub phonons_enabled: bool,
    #[serde(default = "default_fock_truncation")]
    pub fock_truncation: usize,
    pub alpha_p_ps2: f64,
    #[serde(rename = "omega_b_meV")]
    pub omega_b_mev: f64,
}

impl ParamsConfig {
    pub fn into_params(self) -> PhysicalParams {
        PhysicalParams {
            omega_r_uev: self.omega_r_uev,
            g_r_uev: self.g_r_uev,
            kappa_uev: self.kappa_uev,
            gamma_uev: self.gamma_uev,
            gamma_prime_uev: self.gamma_prime_uev,
            delta_xl_uev: self.delta_xl_uev,
            delta_cl_uev: self.delta_cl_uev,
            temperature_k: self.temperature_k,
            phonons_enabled: self.phonons_enabled,
            fock_truncation: self.fock_truncation,
            bath: PhononBathParams {
                alpha_p_ps2: self.alpha_p_ps2,
                omega_b_mev: self.omega_b_mev,
            },
        }
    }
}

fn default_scale() -> String {
    "linear".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    /// A config-schema key, e.g. `delta_cl_ueV`.
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_scale")]
    pub scale: String,
}

impl AxisConfig {
    fn into_axis(self) -> Result<SweepAxis> {
        if self.scale != "linear" {
            return Err(Error::Config(format!(
                "axis scale must be `linear`, got `{}`",
                self.scale
            )));
        }
        if self.count == 0 {
            return Err(Error::Config("axis count must be >= 1".into()));
        }
        let param = AxisParam::from_config_key(&self.parameter)?;
        Ok(SweepAxis::single(param, linspace(self.start, self.stop, self.count)))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub params: ParamsConfig,
    pub axis: AxisConfig,
    #[serde(default)]
    pub axis2: Option<AxisConfig>,
    #[serde(default)]
    pub outputs: Option<Vec<String>>,
}

impl SweepConfig {
    pub fn into_spec(self) -> Result<SweepSpec> {
        let outputs = match self.outputs {
            None => default_outputs(),
            Some(names) => {
                if names.is_empty() {
                    return Err(Error::Config("outputs list is empty".into()));
                }
                names
                    .iter()
                    .map(|n| OutputField::from_name(n))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(SweepSpec {
            base: self.params.into_params(),
            axis1: self.axis.into_axis()?,
            axis2: self.axis2.map(AxisConfig::into_axis).transpose()?,
            outputs,
        })
    }
}

/// Parse a parameter file.
pub fn parse_params_json(text: &str) -> Result<PhysicalParams> {
    let cfg: ParamsConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(cfg.into_params())
}

/// Parse a sweep file.
pub fn parse_sweep_json(text: &str) -> Result<SweepSpec> {
    let cfg: SweepConfig =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.into_spec()
}
