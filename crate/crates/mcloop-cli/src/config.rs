//! Config file schema. TOML, strictly validated: unknown keys are rejected
//! so a typo cannot silently fall back to a default.

use serde::Deserialize;

use mcloop::analysis::DesignSpec;
use mcloop::boundary::{LigandReceptorParams, TransmembraneParams};
use mcloop::diffusion::DiffusionChannel;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub channel: ChannelCfg,
    pub transmembrane: Option<MembraneCfg>,
    pub ligand_receptor: Option<ReceptorCfg>,
    pub sweep: Option<SweepCfg>,
    pub cutoff: Option<CutoffCfg>,
    pub design: Option<DesignCfg>,
    pub sim: Option<SimCfg>,
    pub compare: Option<CompareCfg>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelCfg {
    /// Diffusion coefficient, um^2/s.
    pub mu: f64,
    /// Communication distance, um.
    pub distance: f64,
    /// Boundary kinds at (0, L): "dd", "dn", "nd" or "nn". Defaults to "dn",
    /// the transmembrane-to-receptor layout.
    pub boundaries: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembraneCfg {
    /// Membrane transport rate, 1/s.
    pub k: f64,
    /// Boundary-layer thickness, um (default 1).
    pub dr: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceptorCfg {
    pub k_on: f64,
    pub k_off: f64,
    pub k_re: f64,
    pub receptors: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    /// Transfer functions to dump, one CSV each. Defaults to
    /// ["gamma_0l", "s0", "h0_12", "g_21", "hl_11", "m0l_exact", "m0l_approx"].
    pub outputs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffCfg {
    /// Boundary pair of the crossing gain to search; defaults to the
    /// channel's own.
    pub boundary: Option<String>,
    /// "absolute" (-6 dB) or "from-steady" (6 dB below the steady gain).
    pub target: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignCfg {
    pub band_hi: f64,
    pub l_min: f64,
    pub l_max: f64,
    /// Safety factor for the desorption separation condition (default 10).
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimCfg {
    pub amplitude: f64,
    pub omega: f64,
    /// Cell count; defaults to one cell per boundary-layer thickness.
    pub n_cells: Option<usize>,
    pub cfl: Option<f64>,
    pub duration: Option<f64>,
    pub record_stride: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareCfg {
    pub omegas: Vec<f64>,
    pub distances: Vec<f64>,
    /// Pass/fail bar on |analytic - empirical|, dB (default 0.5).
    pub tolerance_db: Option<f64>,
    /// Grid resolution (default 1 cell per um).
    pub cells_per_um: Option<f64>,
    pub amplitude: Option<f64>,
    pub cfl: Option<f64>,
    /// Run length in seconds; the default (8 drive periods or five diffusion
    /// times, whichever is longer) always settles.
    pub duration: Option<f64>,
}

pub fn load(path: &std::path::Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
}

impl RunConfig {
    pub fn channel(&self) -> Result<DiffusionChannel, mcloop::Error> {
        let kinds = self.channel.boundaries.as_deref().unwrap_or("dn");
        DiffusionChannel::with_kinds(self.channel.mu, self.channel.distance, kinds)
    }

    pub fn membrane(&self) -> Result<TransmembraneParams, String> {
        let m = self
            .transmembrane
            .as_ref()
            .ok_or("config needs a [transmembrane] section for this command")?;
        Ok(TransmembraneParams {
            k: m.k,
            mu: self.channel.mu,
            dr: m.dr.unwrap_or(1.0),
        })
    }

    pub fn receptor(&self) -> Result<LigandReceptorParams, String> {
        let r = self
            .ligand_receptor
            .as_ref()
            .ok_or("config needs a [ligand_receptor] section for this command")?;
        Ok(LigandReceptorParams {
            k_on: r.k_on,
            k_off: r.k_off,
            k_re: r.k_re,
            receptors: r.receptors,
            mu: self.channel.mu,
        })
    }

    pub fn design_spec(&self) -> Result<DesignSpec, String> {
        let d = self
            .design
            .as_ref()
            .ok_or("config needs a [design] section for this command")?;
        let m = self.membrane()?;
        let r = self.receptor()?;
        Ok(DesignSpec {
            band_hi: d.band_hi,
            l_min: d.l_min,
            l_max: d.l_max,
            dr: m.dr,
            mu: self.channel.mu,
            k: m.k,
            k_on: r.k_on,
            k_off: r.k_off,
            k_re: r.k_re,
            receptors: r.receptors,
            margin: d.margin.unwrap_or(10.0),
        })
    }
}
