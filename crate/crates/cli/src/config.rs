//! Run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use anyhow::Context;
use qkahler::cocycle::{SearchConfig, BOUND_TOL};
use qkahler::hyp4::QuadConfig;
use serde::{Deserialize, Serialize};

/// Pass thresholds of the verification suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative imaginary part allowed for `(z, w, Pi_L w)`.
    pub realproj: f64,
    /// Verdict tolerance of the totally-real test.
    pub totreal: f64,
    /// Minimum share of non-real verdicts among generic triples.
    pub nonreal_fraction: f64,
    /// Relative size below which a Gram eigenvalue counts as zero.
    pub signature: f64,
    /// Relative error of round-trip distances after embedding.
    pub distance: f64,
    /// Relative disagreement of `|c|` between two reduction lines.
    pub cross_line: f64,
    /// Bound on `|c| / v4` for totally real tuples.
    pub vanish: f64,
    /// Bound on the alternating face sum, in units of `v4`.
    pub coboundary: f64,
    /// Absolute slack on `|c| <= v4`.
    pub bound: f64,
    /// Distance of the extrapolated ideal regular volume from `v4`.
    pub ideal: f64,
    /// Distance of a near-ideal triangle area from `pi`.
    pub ideal_triangle: f64,
    /// Agreement of quadrature areas with the angle defect.
    pub defect: f64,
    /// Monte Carlo agreement, in standard errors.
    pub mc_sigmas: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            realproj: 1e-8,
            totreal: 1e-6,
            nonreal_fraction: 0.99,
            signature: 1e-8,
            distance: 1e-8,
            cross_line: 1e-4,
            vanish: 1e-8,
            coboundary: 1e-6,
            bound: BOUND_TOL,
            ideal: 1e-3,
            ideal_triangle: 1e-4,
            defect: 1e-8,
            mc_sigmas: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub quad: QuadConfig,
    pub search: SearchConfig,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 2,
            seed: 0,
            samples: 1000,
            tolerances: Tolerances::default(),
            quad: QuadConfig::default(),
            search: SearchConfig::default(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.n >= 1, "n must be at least 1");
        anyhow::ensure!(self.quad.tol > 0.0, "quadrature tolerance must be positive");
        anyhow::ensure!(self.search.n >= 1, "search n must be at least 1");
        Ok(())
    }
}
