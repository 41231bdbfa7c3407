//! Experiment configuration, stored as TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use latwave::lattice::{Domain, LatticeSpec};
use latwave::spectral::{DataFunction, Forcing};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::E1,
        ExperimentId::E2,
        ExperimentId::E3,
        ExperimentId::E4,
        ExperimentId::E5,
        ExperimentId::E6,
        ExperimentId::E7,
        ExperimentId::E8,
    ];

    pub fn title(self) -> &'static str {
        match self {
            ExperimentId::E1 => "joint limit of the scheme",
            ExperimentId::E2 => "difference-quotient convergence",
            ExperimentId::E3 => "integrator limit at fixed dx",
            ExperimentId::E4 => "semidiscrete limit under dx refinement",
            ExperimentId::E5 => "CFL violation and limit order",
            ExperimentId::E6 => "forced problems",
            ExperimentId::E7 => "variable coefficients by splitting",
            ExperimentId::E8 => "propagator bound audit",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ExperimentId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment `{s}` (expected E1..E8)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub dx: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Number of lattices in a refinement study, the base lattice included.
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub f: DataFunction,
    #[serde(default = "zero")]
    pub g: DataFunction,
    /// Boundary values.
    #[serde(default = "zero")]
    pub h: DataFunction,
    #[serde(default = "no_forcing")]
    pub w: Forcing,
    /// `a = 1 + b`.
    #[serde(default = "zero")]
    pub b: DataFunction,
    #[serde(default = "zero")]
    pub sigma: DataFunction,
}

fn zero() -> DataFunction {
    DataFunction::Zero
}

fn no_forcing() -> Forcing {
    Forcing::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub order_min: f64,
    pub order_max: f64,
    /// Absolute tolerance for oracle comparisons.
    pub abs_tol: f64,
    /// Relative tail tolerance of the spectral references.
    pub oracle_tol: f64,
    /// Errors below this are treated as the oracle floor.
    pub floor: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        Self {
            order_min: 1.7,
            order_max: 2.3,
            abs_tol: 1e-6,
            oracle_tol: latwave::spectral::synthesis::DEFAULT_TAIL_TOL,
            floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Half-width `a` of the comparison window `[−a, a]ⁿ`.
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub lattice: LatticeSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    pub data: DataSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

impl ExperimentConfig {
    /// Built-in configuration of an experiment at dimension `n`.
    pub fn default_for(id: ExperimentId, n: usize) -> Self {
        let gaussian = |w: f64| DataFunction::gaussian(vec![0.0; n], w);
        let mut cfg = ExperimentConfig {
            experiment: id,
            n,
            seed: 0,
            window: 1.5,
            out: None,
            lattice: LatticeSection {
                dx: 0.25,
                dt: 0.125,
                horizon: 1.0,
                levels: 5,
            },
            domain: None,
            data: DataSection {
                f: gaussian(0.5),
                g: DataFunction::Zero,
                h: DataFunction::Zero,
                w: Forcing::Zero,
                b: DataFunction::Zero,
                sigma: DataFunction::Zero,
            },
            tolerances: ToleranceSection::default(),
        };
        match id {
            ExperimentId::E1 | ExperimentId::E2 => {}
            ExperimentId::E3 => {
                cfg.lattice = LatticeSection {
                    dx: 0.1,
                    dt: 0.05,
                    horizon: 1.0,
                    levels: 5,
                };
                cfg.window = 1.0;
                cfg.tolerances.order_min = 3.2;
                cfg.tolerances.order_max = 4.8;
            }
            ExperimentId::E4 => {
                cfg.lattice = LatticeSection {
                    dx: 0.2,
                    dt: 0.1,
                    horizon: 1.0,
                    levels: 5,
                };
                cfg.window = 1.2;
            }
            ExperimentId::E5 => {
                let dx = 0.01;
                let dt = 1.05 * dx / (n as f64).sqrt();
                cfg.lattice = LatticeSection {
                    dx,
                    dt,
                    horizon: 100.0 * dt,
                    levels: 4,
                };
                cfg.window = 0.5;
                cfg.data.f = DataFunction::SeparableCosine {
                    alpha: vec![std::f64::consts::PI / dx; n],
                    amplitude: 1.0,
                };
            }
            ExperimentId::E6 => {
                cfg.lattice = LatticeSection {
                    dx: 0.05,
                    dt: 0.025,
                    horizon: 1.0,
                    levels: 1,
                };
                cfg.window = 2.0;
                cfg.data.f = gaussian(1.0);
                cfg.data.w = Forcing::StandingWaveResidual {
                    profile: gaussian(1.0),
                    frequency: 1.0,
                };
            }
            ExperimentId::E7 => {
                let bump = DataFunction::SmoothBump {
                    center: vec![0.0; n],
                    radius: 0.8,
                    amplitude: 1.0,
                };
                cfg.lattice = LatticeSection {
                    dx: 0.05,
                    dt: 0.025,
                    horizon: 1.0,
                    levels: 4,
                };
                cfg.window = 1.0;
                cfg.domain = Some(Domain::Box {
                    lower: vec![-1.0; n],
                    upper: vec![1.0; n],
                });
                cfg.data = DataSection {
                    f: DataFunction::Sum {
                        terms: vec![DataFunction::Constant { value: 1.0 }, gaussian(0.12)],
                    },
                    g: DataFunction::Zero,
                    h: DataFunction::Constant { value: 1.0 },
                    w: Forcing::Zero,
                    b: scale(&bump, 0.1),
                    sigma: scale(&bump, 0.05),
                };
                cfg.tolerances.order_min = 1.0;
                cfg.tolerances.order_max = f64::INFINITY;
            }
            ExperimentId::E8 => {
                cfg.seed = 2024;
                cfg.lattice = LatticeSection {
                    dx: 0.05,
                    dt: 0.02,
                    horizon: 1.0,
                    levels: 4,
                };
                cfg.tolerances.order_min = 1.9;
                cfg.tolerances.order_max = f64::INFINITY;
            }
        }
        cfg
    }

    pub fn base_spec(&self) -> Result<LatticeSpec, HarnessError> {
        LatticeSpec::new(self.n, self.lattice.dx, self.lattice.dt, self.lattice.horizon).map_err(HarnessError::from)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(1..=3).contains(&self.n) {
            return Err(HarnessError::Config(format!("n = {} is outside 1..=3", self.n)));
        }
        if self.lattice.levels == 0 {
            return Err(HarnessError::Config("levels must be at least 1".into()));
        }
        if !(self.window > 0.0) {
            return Err(HarnessError::Config("window half-width must be positive".into()));
        }
        let l = &self.lattice;
        if !(l.dx > 0.0 && l.dt > 0.0 && l.horizon > 0.0) {
            return Err(HarnessError::Config("dx, dt and horizon must be positive".into()));
        }
        // E5 runs outside the CFL range on purpose
        if self.experiment != ExperimentId::E5 {
            self.base_spec()?.require_admissible()?;
        }
        let d = &self.data;
        for (name, datum) in [("f", &d.f), ("g", &d.g), ("h", &d.h), ("b", &d.b), ("sigma", &d.sigma)] {
            if let Some(m) = datum.dim() {
                if m != self.n {
                    return Err(HarnessError::Config(format!("data `{name}` has dimension {m}, expected {}", self.n)));
                }
            }
        }
        d.w.validate(self.n)?;
        if let Some(dom) = &self.domain {
            if dom.dim() != self.n {
                return Err(HarnessError::Config("domain dimension does not match n".into()));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// `c·d` within the catalog.
pub fn scale(d: &DataFunction, c: f64) -> DataFunction {
    let mut out = d.clone();
    match &mut out {
        DataFunction::Zero => {}
        DataFunction::Constant { value } => *value *= c,
        DataFunction::Affine { offset, slope } => {
            *offset *= c;
            slope.iter_mut().for_each(|s| *s *= c);
        }
        DataFunction::Gaussian { amplitude, .. }
        | DataFunction::ModulatedGaussian { amplitude, .. }
        | DataFunction::PlaneWave { amplitude, .. }
        | DataFunction::SeparableCosine { amplitude, .. }
        | DataFunction::SmoothBump { amplitude, .. } => *amplitude *= c,
        DataFunction::Sum { terms } => {
            for t in terms.iter_mut() {
                *t = scale(t, c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for id in ExperimentId::ALL {
            for n in 1..=2 {
                let cfg = ExperimentConfig::default_for(id, n);
                cfg.validate().unwrap();
                let text = cfg.to_toml().unwrap();
                let back = ExperimentConfig::from_toml(&text).unwrap();
                assert_eq!(back, cfg, "{id} n={n}\n{text}");
            }
        }
    }

    #[test]
    fn unknown_catalog_item_is_rejected() {
        let mut text = ExperimentConfig::default_for(ExperimentId::E1, 1).to_toml().unwrap();
        text = text.replace("\"gaussian\"", "\"triangle\"");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(HarnessError::Config(_))));
    }

    #[test]
    fn ids_parse() {
        assert_eq!("e4".parse::<ExperimentId>().unwrap(), ExperimentId::E4);
        assert!("E9".parse::<ExperimentId>().is_err());
    }
}
