//! JSON run configuration. Every field is optional; missing values fall back
//! to the fitted ring parameters and the default grids.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cli::format::{io_error, Format};
use crate::error::{Error, Result};
use crate::fock::{SectorKey, Spin};
use crate::greens::{Channel, TimeGrid};
use crate::hamiltonian::HubbardParams;
use crate::reference_values as refv;
use crate::spectral::FrequencyGrid;
use crate::ucc::UccAngles;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub u: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub sites: usize,
}

impl Default for ParamsSection {
    fn default() -> Self {
        let p = HubbardParams::<f64>::default();
        ParamsSection {
            u: p.u,
            t0: p.t0,
            t1: p.t1,
            t2: p.t2,
            sites: p.sites,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnglesSection {
    pub theta1: f64,
    pub theta3: f64,
    pub theta4: f64,
}

/// Exact-state amplitudes the UCC angles are derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AmplitudesSection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for AmplitudesSection {
    fn default() -> Self {
        AmplitudesSection {
            alpha: refv::ALPHA,
            beta: refv::BETA,
            gamma: refv::GAMMA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub t_max: f64,
    pub dt: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            t_max: 40.0,
            dt: 0.02,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralSection {
    pub eta: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub d_omega: f64,
}

impl Default for SpectralSection {
    fn default() -> Self {
        SpectralSection {
            eta: 0.1,
            omega_min: -3.0,
            omega_max: 3.0,
            d_omega: 0.005,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSection {
    pub n_up: usize,
    pub n_down: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            format: "csv".into(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsSection,
    /// Explicit angles; when absent they are computed from `amplitudes`.
    pub angles: Option<AnglesSection>,
    pub amplitudes: AmplitudesSection,
    pub grid: GridSection,
    pub spectral: SpectralSection,
    /// Ground-state sector; half filling when absent.
    pub sector: Option<SectorSection>,
    /// Channel labels (`k1_up`, `r0-0_dn`, `local`); all momentum channels
    /// plus the local one when empty.
    pub channels: Vec<String>,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
        let key = key.trim();
        let value = value.trim();
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("override {key}: '{value}' is not a number")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("override {key}: '{value}' is not a count")))
        };
        let angles = |cfg: &mut RunConfig| {
            *cfg.angles.get_or_insert(AnglesSection {
                theta1: 0.0,
                theta3: 0.0,
                theta4: 0.0,
            })
        };
        match key {
            "u" | "U" => self.params.u = num()?,
            "t0" => self.params.t0 = num()?,
            "t1" => self.params.t1 = num()?,
            "t2" => self.params.t2 = num()?,
            "sites" | "V" => self.params.sites = count()?,
            "alpha" => self.amplitudes.alpha = num()?,
            "beta" => self.amplitudes.beta = num()?,
            "gamma" => self.amplitudes.gamma = num()?,
            "theta1" | "theta3" | "theta4" => {
                let mut a = angles(self);
                let v = num()?;
                match key {
                    "theta1" => a.theta1 = v,
                    "theta3" => a.theta3 = v,
                    _ => a.theta4 = v,
                }
                self.angles = Some(a);
            }
            "t_max" | "tmax" => self.grid.t_max = num()?,
            "dt" => self.grid.dt = num()?,
            "eta" => self.spectral.eta = num()?,
            "omega_min" => self.spectral.omega_min = num()?,
            "omega_max" => self.spectral.omega_max = num()?,
            "d_omega" => self.spectral.d_omega = num()?,
            "n_up" | "n_down" => {
                let half = self.params.sites / 2;
                let mut s = self.sector.unwrap_or(SectorSection {
                    n_up: half,
                    n_down: half,
                });
                if key == "n_up" {
                    s.n_up = count()?;
                } else {
                    s.n_down = count()?;
                }
                self.sector = Some(s);
            }
            _ => return Err(Error::Config(format!("unknown override key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.grid.t_max <= 0.0 || self.grid.dt <= 0.0 || !self.grid.t_max.is_finite() {
            return cfg(format!(
                "grid needs t_max > 0 and dt > 0 (got {}, {})",
                self.grid.t_max, self.grid.dt
            ));
        }
        if self.spectral.eta <= 0.0 || !self.spectral.eta.is_finite() {
            return cfg(format!("eta must be positive (got {})", self.spectral.eta));
        }
        if self.spectral.d_omega <= 0.0 || self.spectral.omega_max <= self.spectral.omega_min {
            return cfg("frequency grid needs omega_max > omega_min and d_omega > 0".into());
        }
        self.hubbard_params()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        let key = self.ground_sector();
        key.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.channel_list()?;
        Format::parse(&self.output.format)?;
        Ok(())
    }

    pub fn hubbard_params(&self) -> HubbardParams<f64> {
        let p = &self.params;
        HubbardParams {
            u: p.u,
            t0: p.t0,
            t1: p.t1,
            t2: p.t2,
            sites: p.sites,
        }
    }

    pub fn ground_sector(&self) -> SectorKey {
        let v = self.params.sites;
        match self.sector {
            Some(s) => SectorKey::new(v, s.n_up, s.n_down),
            None => SectorKey::new(v, v / 2, v / 2),
        }
    }

    pub fn time_grid(&self) -> Result<TimeGrid<f64>> {
        TimeGrid::new(self.grid.t_max, self.grid.dt)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid<f64>> {
        let s = &self.spectral;
        FrequencyGrid::new(s.omega_min, s.omega_max, s.d_omega)
    }

    pub fn format(&self) -> Format {
        Format::parse(&self.output.format).unwrap_or(Format::Csv)
    }

    pub fn channel_list(&self) -> Result<Vec<Channel>> {
        let v = self.params.sites;
        if self.channels.is_empty() {
            let mut out: Vec<Channel> = (0..v).map(|n| Channel::momentum(n, Spin::Up)).collect();
            out.push(Channel::local(Spin::Up));
            return Ok(out);
        }
        self.channels
            .iter()
            .map(|s| {
                let c: Channel = s.parse()?;
                c.validate(v).map_err(|e| Error::Config(e.to_string()))?;
                Ok(c)
            })
            .collect()
    }

    /// Explicit angles, or angles computed from the configured amplitudes.
    pub fn ucc_angles(&self) -> Result<UccAngles<f64>> {
        match self.angles {
            Some(a) => Ok(UccAngles::new(a.theta1, a.theta3, a.theta4)),
            None => {
                let a = &self.amplitudes;
                crate::ucc::compute_angles(a.alpha, a.beta, a.gamma)
            }
        }
    }
}
