//! Experiment configuration: one flat TOML file per experiment.
//!
//! ```toml
//! xi = ["0", "1", "0"]     # rank probabilities; numbers or "p/q" strings
//! alpha = 0.0
//! n0 = 100
//! steps = 1000000
//! seed = 1
//! initial_tree = "random_recursive"   # or "path"
//! replicas = 1
//! snapshots = [10000, 1000000]        # default: [steps]
//! x_grid = 101
//! k_list = [1, 2, 3, 5, 10]
//! bins = 50
//! fit_k_min = 10                      # default 10
//! fit_k_max = 300                     # default: largest k with >= 100 vertices of degree >= k
//! mu_k_max = 1000
//! panels = 2048
//! sweep_alphas = [-0.4, 0.0, 0.5]
//! ```

use std::path::Path;

use prefchoice::choice::parse_probability;
use prefchoice::constants::{DEFAULT_BINS, DEFAULT_PANELS, FIT_K_MIN};
use prefchoice::{ChoiceVector, InitialTree, ModelParams};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Probability {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum TreeName {
    #[default]
    RandomRecursive,
    Path,
}

fn default_n0() -> usize {
    100
}

fn default_replicas() -> usize {
    1
}

fn default_x_grid() -> usize {
    101
}

fn default_k_list() -> Vec<u64> {
    vec![1, 2, 3, 4, 5, 10, 15, 20, 25]
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_mu_k_max() -> u64 {
    1000
}

fn default_panels() -> usize {
    DEFAULT_PANELS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    xi: Vec<Probability>,
    alpha: f64,
    #[serde(default = "default_n0")]
    n0: usize,
    steps: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    initial_tree: TreeName,
    #[serde(default = "default_replicas")]
    replicas: usize,
    snapshots: Option<Vec<u64>>,
    #[serde(default = "default_x_grid")]
    x_grid: usize,
    #[serde(default = "default_k_list")]
    k_list: Vec<u64>,
    #[serde(default = "default_bins")]
    bins: usize,
    fit_k_min: Option<u64>,
    fit_k_max: Option<u64>,
    #[serde(default = "default_mu_k_max")]
    mu_k_max: u64,
    #[serde(default = "default_panels")]
    panels: usize,
    #[serde(default)]
    sweep_alphas: Vec<f64>,
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub replicas: usize,
    pub snapshots: Vec<u64>,
    pub x_grid: usize,
    pub k_list: Vec<u64>,
    pub bins: usize,
    pub fit_k_min: u64,
    pub fit_k_max: Option<u64>,
    pub mu_k_max: u64,
    pub panels: usize,
    pub sweep_alphas: Vec<f64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::MissingInput {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let raw: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let probs = raw
            .xi
            .iter()
            .map(|p| match p {
                Probability::Number(x) => Ok(*x),
                Probability::Text(s) => parse_probability(s),
            })
            .collect::<prefchoice::Result<Vec<f64>>>()?;
        let choice = ChoiceVector::new(probs)?;
        let initial_tree = match raw.initial_tree {
            TreeName::RandomRecursive => InitialTree::RandomRecursive,
            TreeName::Path => InitialTree::Path,
        };
        let params = ModelParams::new(choice, raw.alpha, raw.n0, raw.steps, raw.seed)?
            .with_initial_tree(initial_tree);
        let config = Self {
            params,
            replicas: raw.replicas,
            snapshots: raw.snapshots.unwrap_or_else(|| vec![raw.steps]),
            x_grid: raw.x_grid,
            k_list: raw.k_list,
            bins: raw.bins,
            fit_k_min: raw.fit_k_min.unwrap_or(FIT_K_MIN),
            fit_k_max: raw.fit_k_max,
            mu_k_max: raw.mu_k_max,
            panels: raw.panels,
            sweep_alphas: raw.sweep_alphas,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.replicas < 1 {
            return fail("replicas must be at least 1".into());
        }
        if self.snapshots.is_empty() {
            return fail("the snapshot schedule is empty".into());
        }
        if self.snapshots.windows(2).any(|w| w[0] >= w[1]) {
            return fail("snapshots must be strictly increasing".into());
        }
        if *self.snapshots.last().unwrap() > self.params.steps {
            return fail(format!(
                "snapshot {} lies beyond the {} steps of the run",
                self.snapshots.last().unwrap(),
                self.params.steps
            ));
        }
        if self.x_grid < 2 {
            return fail("x_grid needs at least 2 points".into());
        }
        if self.bins < 1 {
            return fail("bins must be at least 1".into());
        }
        if self.k_list.is_empty() {
            return fail("k_list is empty".into());
        }
        if self.mu_k_max < 1 {
            return fail("mu_k_max must be at least 1".into());
        }
        if self.panels < 64 || self.panels % 2 != 0 {
            return fail("panels must be even and at least 64".into());
        }
        if let Some(k_max) = self.fit_k_max {
            if k_max <= self.fit_k_min {
                return fail("fit_k_max must exceed fit_k_min".into());
            }
        }
        Ok(())
    }

    /// Final snapshot step; compare and sweep work at this step.
    pub fn final_step(&self) -> u64 {
        *self.snapshots.last().unwrap()
    }

    /// SHA-256 over the fields that define the experiment. Seed, replica count,
    /// output directory and thread count are excluded, so replicas and reruns
    /// with other seeds share a hash.
    pub fn hash(&self) -> String {
        let p = &self.params;
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let canonical = format!(
            "xi={}\nalpha={}\nn0={}\nsteps={}\ninitial_tree={:?}\nsnapshots={}\nx_grid={}\n\
             k_list={}\nbins={}\nfit_k_min={}\nfit_k_max={}\nmu_k_max={}\npanels={}\nsweep_alphas={}\n",
            p.choice
                .probs()
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
            p.alpha,
            p.n0,
            p.steps,
            p.initial_tree,
            join(&self.snapshots),
            self.x_grid,
            join(&self.k_list),
            self.bins,
            self.fit_k_min,
            self.fit_k_max.map_or("auto".to_string(), |k| k.to_string()),
            self.mu_k_max,
            self.panels,
            self.sweep_alphas
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
xi = ["0", "1", "0"]
alpha = 0.0
steps = 1000
"#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::parse(BASIC).unwrap();
        assert_eq!(c.params.n0, 100);
        assert_eq!(c.snapshots, vec![1000]);
        assert_eq!(c.bins, 50);
        assert_eq!(c.replicas, 1);
        assert_eq!(c.params.choice, ChoiceVector::middle_of_three());
    }

    #[test]
    fn fractions_and_numbers() {
        let text = "xi = [0, \"1/3\", 0, 0, 0, \"2/3\", 0]\nalpha = 0.5\nsteps = 10\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.params.choice.r(), 7);
        assert!((c.params.choice.prob(6) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hash_ignores_seed_and_replicas() {
        let a = ExperimentConfig::parse(BASIC).unwrap();
        let b = ExperimentConfig::parse(&format!("{BASIC}seed = 9\nreplicas = 4\n")).unwrap();
        let c = ExperimentConfig::parse(&BASIC.replace("alpha = 0.0", "alpha = 0.1")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "xi = [0.5, 0.6]\nalpha = 0\nsteps = 1\n",
            "xi = [1, 0]\nalpha = -1\nsteps = 1\n",
            "xi = [1, 0]\nalpha = 0\nsteps = 10\nsnapshots = [20]\n",
            "xi = [1, 0]\nalpha = 0\nsteps = 10\nsnapshots = [5, 5]\n",
            "xi = [1, 0]\nalpha = 0\nsteps = 10\nx_grid = 1\n",
            "xi = [1, 0]\nalpha = 0\nsteps = 10\nreplicas = 0\n",
            "xi = [1, 0]\nalpha = 0\nsteps = 10\ncolour = 3\n",
        ] {
            assert!(ExperimentConfig::parse(bad).is_err(), "{bad}");
        }
    }
}
