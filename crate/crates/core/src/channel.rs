//! Node geometry, large-scale path loss and seeded small-scale fading for the
//! three cascaded links BS→RIS, RIS→UE and RIS→MC.
//!
//! Large-scale gain follows `C0 · d^(−exponent)` with `C0` given in dB at
//! 1 m. Small-scale fading is Rician with unit mean power; a K-factor of
//! `−∞ dB` degenerates to Rayleigh and `+∞ dB` to a pure line-of-sight term
//! with a random phase. There is no direct BS→UE link.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::rng::{realization_stream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGeometry {
    pub bs_xy: [f64; 2],
    pub ris_xy: [f64; 2],
    pub mc_xy: [f64; 2],
    pub ue_xy: [f64; 2],
    pub bs_h: f64,
    pub ris_h: f64,
    pub mc_h: f64,
    pub ue_h: f64,
}

impl NodeGeometry {
    /// BS at (0, 0, 30), RIS at (75, 75, 10), MC at (75, 76, 10) and UE at
    /// (150, 0, 1.5), all in meters.
    pub fn reference_scenario() -> Self {
        Self {
            bs_xy: [0.0, 0.0],
            ris_xy: [75.0, 75.0],
            mc_xy: [75.0, 76.0],
            ue_xy: [150.0, 0.0],
            bs_h: 30.0,
            ris_h: 10.0,
            mc_h: 10.0,
            ue_h: 1.5,
        }
    }

    fn nodes(&self) -> [(&'static str, [f64; 3]); 4] {
        let p = |xy: [f64; 2], h: f64| [xy[0], xy[1], h];
        [
            ("bs", p(self.bs_xy, self.bs_h)),
            ("ris", p(self.ris_xy, self.ris_h)),
            ("mc", p(self.mc_xy, self.mc_h)),
            ("ue", p(self.ue_xy, self.ue_h)),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let nodes = self.nodes();
        for (name, pos) in &nodes {
            if !pos.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} position is not finite")));
            }
            if pos[2] <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} height must be positive")));
            }
        }
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if distance3(nodes[i].1, nodes[j].1) <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "{} and {} are colocated",
                        nodes[i].0, nodes[j].0
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Default for NodeGeometry {
    fn default() -> Self {
        Self::reference_scenario()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    /// Path gain at 1 m, in dB.
    pub ref_loss_db: f64,
    pub exp_bs_ris: f64,
    pub exp_ris_ue: f64,
    pub exp_ris_mc: f64,
    /// Rician K-factor in dB; `-inf` selects Rayleigh fading.
    pub rician_k_db: f64,
    pub seed: u64,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self {
            ref_loss_db: -30.0,
            exp_bs_ris: 2.2,
            exp_ris_ue: 2.8,
            exp_ris_mc: 2.2,
            rician_k_db: 3.0,
            seed: 0,
        }
    }
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        if !self.ref_loss_db.is_finite() {
            return Err(Error::InvalidParameter("ref_loss_db must be finite".into()));
        }
        for (name, e) in [
            ("exp_bs_ris", self.exp_bs_ris),
            ("exp_ris_ue", self.exp_ris_ue),
            ("exp_ris_mc", self.exp_ris_mc),
        ] {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        if self.rician_k_db.is_nan() {
            return Err(Error::InvalidParameter("rician_k_db is NaN".into()));
        }
        Ok(())
    }

    pub fn exponent(&self, link: Link) -> f64 {
        match link {
            Link::BsRis => self.exp_bs_ris,
            Link::RisUe => self.exp_ris_ue,
            Link::RisMc => self.exp_ris_mc,
        }
    }

    /// Weights `(los, scatter)` such that `los² + scatter² = 1`.
    fn rician_weights(&self) -> (f64, f64) {
        if self.rician_k_db == f64::INFINITY {
            return (1.0, 0.0);
        }
        let k = 10f64.powf(self.rician_k_db / 10.0);
        ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    BsRis,
    RisUe,
    RisMc,
}

/// Per-element channel coefficients for one coherence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRealization {
    /// BS → element i.
    pub h1: Vec<Complex64>,
    /// Element i → UE.
    pub h2: Vec<Complex64>,
    /// Element i → MC.
    pub g: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn new(h1: Vec<Complex64>, h2: Vec<Complex64>, g: Vec<Complex64>) -> Result<Self> {
        if h1.is_empty() {
            return Err(Error::InvalidParameter("channel needs at least one element".into()));
        }
        for v in [&h2, &g] {
            if v.len() != h1.len() {
                return Err(Error::DimensionMismatch { expected: h1.len(), got: v.len() });
            }
        }
        if h1.iter().chain(&h2).chain(&g).any(|z| !z.is_finite()) {
            return Err(Error::InvalidParameter("channel coefficients must be finite".into()));
        }
        Ok(Self { h1, h2, g })
    }

    pub fn len(&self) -> usize {
        self.h1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h1.is_empty()
    }
}

fn distance3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn link_distance(geometry: &NodeGeometry, link: Link) -> f64 {
    let [bs, ris, mc, ue] = geometry.nodes().map(|(_, p)| p);
    match link {
        Link::BsRis => distance3(bs, ris),
        Link::RisUe => distance3(ris, ue),
        Link::RisMc => distance3(ris, mc),
    }
}

/// Linear large-scale power gain `10^(ref_loss_db/10) · d^(−exponent)`.
pub fn path_gain(distance: f64, params: &FadingParams, exponent: f64) -> f64 {
    10f64.powf(params.ref_loss_db / 10.0) * distance.powf(-exponent)
}

/// Draws realization 0 of the seed in `params`.
pub fn generate_channels(
    geometry: &NodeGeometry,
    params: &FadingParams,
    n_elements: usize,
) -> Result<ChannelRealization> {
    generate_channels_for(geometry, params, n_elements, 0)
}

/// Draws the channel of Monte Carlo realization `index` from its own
/// substream of `params.seed`.
pub fn generate_channels_for(
    geometry: &NodeGeometry,
    params: &FadingParams,
    n_elements: usize,
    index: u64,
) -> Result<ChannelRealization> {
    if n_elements == 0 {
        return Err(Error::InvalidParameter("n_elements must be at least 1".into()));
    }
    geometry.validate()?;
    params.validate()?;

    let mut rng = realization_stream(params.seed, index, Purpose::Channel);
    let (los, scatter) = params.rician_weights();
    let mut draw_link = |link: Link| -> Vec<Complex64> {
        let amplitude = path_gain(link_distance(geometry, link), params, params.exponent(link)).sqrt();
        (0..n_elements)
            .map(|_| {
                // Always draw all three numbers so that changing K reuses the
                // same underlying randomness.
                let phase = rng.random::<f64>() * TAU;
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let diffuse = Complex64::new(re, im) * FRAC_1_SQRT_2;
                (Complex64::from_polar(los, phase) + diffuse * scatter) * amplitude
            })
            .collect()
    };
    let h1 = draw_link(Link::BsRis);
    let h2 = draw_link(Link::RisUe);
    let g = draw_link(Link::RisMc);
    Ok(ChannelRealization { h1, h2, g })
}
