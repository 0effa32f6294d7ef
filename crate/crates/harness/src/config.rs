use std::path::{Path, PathBuf};

use husimi_grid::{GridConfig, GridSpec, Potential, PotentialKind, TestFunction};
use husimi_manybody::orbitals::OrbitalFamily;
use husimi_phasespace::{CoherentFrame, PhaseLattice};
use husimi_residues::ALPHA_GRID;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

/// How `hbar` relates to `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `hbar = N^(-1/d)`.
    Coupled,
    /// `hbar` and `N` chosen independently.
    Decoupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Gaussian,
    Bump,
}

impl FrameKind {
    pub fn build(self, grid: &GridSpec) -> Result<CoherentFrame, HarnessError> {
        Ok(match self {
            FrameKind::Gaussian => CoherentFrame::gaussian(grid)?,
            FrameKind::Bump => CoherentFrame::bump(grid)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeSpec {
    /// Power-of-two strides with spacing at most `sqrt(hbar)/2`.
    Default,
    Full,
    Strided {
        q: usize,
        p: usize,
    },
}

impl LatticeSpec {
    pub fn build(&self, grid: &GridSpec) -> Result<PhaseLattice, HarnessError> {
        Ok(match *self {
            LatticeSpec::Default => PhaseLattice::default_for(grid),
            LatticeSpec::Full => PhaseLattice::full(grid),
            LatticeSpec::Strided { q, p } => PhaseLattice::strided(grid, q, p)?,
        })
    }
}

/// Centre and radius of a bump test function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFnSpec {
    pub center: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepLists {
    #[serde(default)]
    pub hbar: Vec<f64>,
    pub n: Vec<usize>,
    pub alpha1: Vec<f64>,
    pub alpha2: Vec<f64>,
    pub s: Vec<u32>,
}

impl Default for SweepLists {
    fn default() -> Self {
        Self {
            hbar: Vec::new(),
            n: vec![2, 3, 4],
            alpha1: vec![0.6, 0.75, 0.9],
            alpha2: ALPHA_GRID.to_vec(),
            s: vec![1, 2, 3],
        }
    }
}

/// Everything a run depends on. Serialized as TOML or JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub preset: Preset,
    pub frame: FrameKind,
    pub orbitals: OrbitalFamily,
    /// Momentum boost `e^{i kick x / hbar}` applied to every orbital.
    #[serde(default)]
    pub kick: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Conservation is checked at this many evenly spaced times.
    pub checkpoints: usize,
    pub lattice: LatticeSpec,
    pub phi_q: TestFnSpec,
    pub phi_p: TestFnSpec,
    pub smoothness: usize,
    #[serde(default)]
    pub sweep: SweepLists,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    /// `N = 1`, `V = 0`, `T = 0.1`.
    pub fn minimal() -> Self {
        Self {
            grid: GridConfig {
                d: 1,
                m: 64,
                l: 16.0,
                hbar: 1.0,
                n: 1,
                potential: PotentialKind::Zero,
            },
            preset: Preset::Coupled,
            frame: FrameKind::Gaussian,
            orbitals: OrbitalFamily::Hermite { omega: 1.0 },
            kick: 0.5,
            horizon: 0.1,
            dt: 0.002,
            checkpoints: 5,
            lattice: LatticeSpec::Default,
            phi_q: TestFnSpec {
                center: 0.3,
                radius: 2.0,
            },
            phi_p: TestFnSpec {
                center: 0.2,
                radius: 2.0,
            },
            smoothness: 2,
            sweep: SweepLists::default(),
            seed: 0,
            out: PathBuf::from("runs"),
        }
    }

    /// Coupled point `hbar = 1/N` with oscillator orbitals and a bump
    /// potential. The box fits the Gaussian window for `N >= 2`.
    pub fn coupled(n: usize) -> Self {
        let mut c = Self::minimal();
        c.grid.l = 12.0;
        c.grid.potential = PotentialKind::Bump {
            amplitude: 1.0,
            radius: 2.0,
        };
        c.kick = 0.0;
        c.with_particles(n)
    }

    /// Same config at `N` particles; on the coupled preset `hbar` follows.
    pub fn with_particles(mut self, n: usize) -> Self {
        self.grid.n = n;
        if self.preset == Preset::Coupled {
            self.grid.hbar = coupled_hbar(n, self.grid.d);
        }
        self
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Pretty JSON with keys sorted.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// Compact JSON with sorted keys and shortest round-trip decimals.
    pub fn canonical_json(&self) -> String {
        // `Value` maps are ordered by key.
        let v = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&v).expect("value serializes")
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if !(self.dt > 0.0) || !(self.horizon >= 0.0) {
            return bad(format!(
                "need dt > 0 and horizon >= 0, got {} and {}",
                self.dt, self.horizon
            ));
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return bad(format!(
                "horizon {} is not a whole number of steps of {}",
                self.horizon, self.dt
            ));
        }
        if self.checkpoints == 0 {
            return bad("need at least one checkpoint".into());
        }
        if self.preset == Preset::Coupled {
            let want = coupled_hbar(self.grid.n, self.grid.d);
            if (self.grid.hbar - want).abs() > 1e-12 * want {
                return bad(format!(
                    "coupled preset needs hbar = N^(-1/d) = {want}, got {}",
                    self.grid.hbar
                ));
            }
        }
        if self.smoothness == 0 {
            return bad("test-function smoothness must be positive".into());
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<(GridSpec, Potential), HarnessError> {
        Ok(self.grid.build()?)
    }

    pub fn test_functions(&self) -> (TestFunction, TestFunction) {
        let f = |t: TestFnSpec| {
            TestFunction::on_points(Vec::new(), t.center, t.radius, self.smoothness)
        };
        (f(self.phi_q), f(self.phi_p))
    }

    /// One config per sweep point: `N` over `sweep.n` on the coupled
    /// preset, `(hbar, N)` over `sweep.hbar x sweep.n` otherwise.
    pub fn expand(&self, preset: Preset) -> Vec<RunConfig> {
        let mut out = Vec::new();
        for &n in &self.sweep.n {
            match preset {
                Preset::Coupled => {
                    let mut c = self.clone();
                    c.preset = Preset::Coupled;
                    out.push(c.with_particles(n));
                }
                Preset::Decoupled => {
                    for &h in &self.sweep.hbar {
                        let mut c = self.clone();
                        c.preset = Preset::Decoupled;
                        c.grid.n = n;
                        c.grid.hbar = h;
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

pub fn coupled_hbar(n: usize, d: usize) -> f64 {
    (n as f64).powf(-1.0 / d as f64)
}
