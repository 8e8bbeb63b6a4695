use serde::{Deserialize, Serialize};
use std::path::Path;

use super::SweepSpec;
use crate::channel::{FadingParams, NodeGeometry};
use crate::error::{Error, Result};
use crate::phy::dbm_to_watts;

/// Noise power used by the figure presets, in dBm.
pub const FIGURE_N0_DBM: f64 = -90.0;

/// Flat key/value sweep description as read from a TOML file. Every key is
/// optional and falls back to the reference scenario; units are part of
/// the key names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub bs_xy: [f64; 2],
    pub bs_h: f64,
    pub ris_xy: [f64; 2],
    pub ris_h: f64,
    pub mc_xy: [f64; 2],
    pub mc_h: f64,
    pub ue_xy: [f64; 2],
    pub ue_h: f64,

    pub ref_loss_db: f64,
    pub exp_bs_ris: f64,
    pub exp_ris_ue: f64,
    pub exp_ris_mc: f64,
    pub rician_k_db: f64,

    pub n0_watts: f64,
    pub ps_grid_watts: Vec<f64>,
    pub n_list: Vec<usize>,
    pub gamma_th1_db: f64,
    pub gamma_th2_list_db: Vec<f64>,

    pub realizations: usize,
    pub master_seed: u64,
    pub a1_init: f64,
    pub max_iters: usize,
    pub listing_scaling: bool,
    pub workers: usize,
    pub output_path: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let geo = NodeGeometry::reference_scenario();
        let fading = FadingParams::default();
        Self {
            bs_xy: geo.bs_xy,
            bs_h: geo.bs_h,
            ris_xy: geo.ris_xy,
            ris_h: geo.ris_h,
            mc_xy: geo.mc_xy,
            mc_h: geo.mc_h,
            ue_xy: geo.ue_xy,
            ue_h: geo.ue_h,
            ref_loss_db: fading.ref_loss_db,
            exp_bs_ris: fading.exp_bs_ris,
            exp_ris_ue: fading.exp_ris_ue,
            exp_ris_mc: fading.exp_ris_mc,
            rician_k_db: fading.rician_k_db,
            n0_watts: dbm_to_watts(-80.0),
            ps_grid_watts: vec![20.0, 25.0, 30.0, 35.0, 40.0],
            n_list: vec![64],
            gamma_th1_db: 10.0,
            gamma_th2_list_db: vec![20.0],
            realizations: 100,
            master_seed: 1,
            a1_init: 0.9,
            max_iters: 2,
            listing_scaling: false,
            workers: 0,
            output_path: "sweep.csv".into(),
        }
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Average rate and `α₁` against transmit power for several surface sizes.
    pub fn figure2() -> Self {
        Self {
            n0_watts: dbm_to_watts(FIGURE_N0_DBM),
            n_list: vec![16, 36, 64],
            gamma_th2_list_db: vec![20.0],
            output_path: "figure2.csv".into(),
            ..Self::default()
        }
    }

    /// Average rate and `α₁` against transmit power for several control
    /// thresholds at `N = 64`.
    pub fn figure3() -> Self {
        Self {
            n0_watts: dbm_to_watts(FIGURE_N0_DBM),
            n_list: vec![64],
            gamma_th2_list_db: vec![5.0, 15.0, 25.0],
            output_path: "figure3.csv".into(),
            ..Self::default()
        }
    }

    pub fn into_spec(self) -> Result<SweepSpec> {
        let spec = SweepSpec {
            geometry: NodeGeometry {
                bs_xy: self.bs_xy,
                ris_xy: self.ris_xy,
                mc_xy: self.mc_xy,
                ue_xy: self.ue_xy,
                bs_h: self.bs_h,
                ris_h: self.ris_h,
                mc_h: self.mc_h,
                ue_h: self.ue_h,
            },
            fading: FadingParams {
                ref_loss_db: self.ref_loss_db,
                exp_bs_ris: self.exp_bs_ris,
                exp_ris_ue: self.exp_ris_ue,
                exp_ris_mc: self.exp_ris_mc,
                rician_k_db: self.rician_k_db,
                seed: self.master_seed,
            },
            ps_grid: self.ps_grid_watts,
            n_list: self.n_list,
            gamma_th1_db: self.gamma_th1_db,
            gamma_th2_list_db: self.gamma_th2_list_db,
            n0_watts: self.n0_watts,
            realizations: self.realizations,
            master_seed: self.master_seed,
            a1_init: self.a1_init,
            max_iters: self.max_iters,
            listing_scaling: self.listing_scaling,
            workers: self.workers,
            output_path: self.output_path,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_scenario() {
        let cfg = SweepConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, SweepConfig::default());
        let spec = cfg.into_spec().unwrap();
        assert_eq!(spec.geometry, NodeGeometry::reference_scenario());
        assert_eq!(spec.n0_watts, 1e-11);
    }

    #[test]
    fn keys_override_defaults() {
        let cfg = SweepConfig::from_toml_str(
            "n_list = [4, 8]\ngamma_th2_list_db = [5.0]\nrician_k_db = -inf\nue_xy = [10.0, 20.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.n_list, vec![4, 8]);
        assert_eq!(cfg.rician_k_db, f64::NEG_INFINITY);
        assert_eq!(cfg.ue_xy, [10.0, 20.0]);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(matches!(SweepConfig::from_toml_str("ps_watts = 3"), Err(Error::Config(_))));
        assert!(matches!(SweepConfig::from_toml_str("n_list = 3"), Err(Error::Config(_))));
        let cfg = SweepConfig::from_toml_str("ps_grid_watts = [40.0, 20.0]").unwrap();
        assert!(matches!(cfg.into_spec(), Err(Error::Config(_))));
    }

    #[test]
    fn missing_file_is_a_config_error() {
        assert!(matches!(SweepConfig::load(Path::new("/nonexistent/sweep.toml")), Err(Error::Config(_))));
    }

    #[test]
    fn serialized_config_round_trips() {
        for cfg in [SweepConfig::default(), SweepConfig::figure2(), SweepConfig::figure3()] {
            assert_eq!(SweepConfig::from_toml_str(&cfg.to_toml_string()).unwrap(), cfg);
        }
    }

    #[test]
    fn shipped_example_parses() {
        let text = include_str!("../../../../configs/reference_scenario.toml");
        let cfg = SweepConfig::from_toml_str(text).unwrap();
        cfg.into_spec().unwrap();
    }
}
