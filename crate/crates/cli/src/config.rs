//! The experiment file: one TOML document with schema `ehpo-config/1`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use ehpo_core::adversary::Mode;
use ehpo_core::reasoners::{ConclusionPolicy, DefenseParams};
use ehpo_core::{HpPoint, HyperHpConfig, SyntheticTask};
use serde::{Deserialize, Serialize};

pub const CONFIG_SCHEMA: &str = "ehpo-config/1";
const DEFAULT_OUT: &str = "ehpo-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConfig {
    pub name: String,
    #[serde(flatten)]
    pub config: HyperHpConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefenseSection {
    /// Random-search config whose distribution generates the groups.
    pub config: String,
    pub k: usize,
    pub r: usize,
    pub kappa: usize,
    pub sample_budget: usize,
    pub delta: f64,
    /// Thresholds `1 - delta` to report; defaults to the one from `delta`.
    #[serde(default)]
    pub thresholds: Option<Vec<f64>>,
}

impl DefenseSection {
    pub fn params(&self) -> DefenseParams {
        DefenseParams {
            k: self.k,
            r: self.r,
            kappa: self.kappa,
            sample_budget: self.sample_budget,
            delta: self.delta,
        }
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.thresholds
            .clone()
            .unwrap_or_else(|| vec![1.0 - self.delta])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReasonerKind {
    Naive,
    Defended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeKind {
    Exact,
    MonteCarlo,
}

fn default_reasoners() -> Vec<ReasonerKind> {
    vec![ReasonerKind::Naive, ReasonerKind::Defended]
}

fn default_samples() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemonSection {
    #[serde(default = "default_reasoners")]
    pub reasoners: Vec<ReasonerKind>,
    /// Allowable config names; all configs when absent.
    #[serde(default)]
    pub allowable: Option<Vec<String>>,
    #[serde(default = "default_mode")]
    pub mode: ModeKind,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Group count of the defended reasoner; the certified R when absent.
    #[serde(default)]
    pub defended_r: Option<usize>,
    /// Rerun-until-success repetitions per witness (0 skips simulation).
    #[serde(default)]
    pub simulations: usize,
}

fn default_mode() -> ModeKind {
    ModeKind::Exact
}

impl Default for DemonSection {
    fn default() -> Self {
        Self {
            reasoners: default_reasoners(),
            allowable: None,
            mode: ModeKind::Exact,
            samples: default_samples(),
            defended_r: None,
            simulations: 0,
        }
    }
}

impl DemonSection {
    pub fn mode(&self, seed: u64) -> Mode {
        match self.mode {
            ModeKind::Exact => Mode::Exact,
            ModeKind::MonteCarlo => Mode::MonteCarlo {
                samples: self.samples,
                seed,
            },
        }
    }
}

fn default_audit() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    #[serde(default = "default_audit")]
    pub audit_samples: usize,
    #[serde(default)]
    pub allowable: Option<Vec<String>>,
}

impl Default for CertifySection {
    fn default() -> Self {
        Self {
            audit_samples: default_audit(),
            allowable: None,
        }
    }
}

fn default_scout_n() -> usize {
    7
}

fn default_scout_rounds() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoutSection {
    pub algorithm: String,
    pub dim: String,
    #[serde(default)]
    pub fixed: HpPoint,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_scout_n")]
    pub n: usize,
    #[serde(default = "default_scout_rounds")]
    pub max_rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub master_seed: u64,
    /// Time budget `t`, in trials.
    pub budget: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Algorithms every run covers; the policy's algorithms when absent.
    #[serde(default)]
    pub algorithms: Option<Vec<String>>,
    pub task: SyntheticTask,
    pub configs: Vec<NamedConfig>,
    pub policy: ConclusionPolicy,
    #[serde(default)]
    pub defense: Option<DefenseSection>,
    #[serde(default)]
    pub demon: Option<DemonSection>,
    #[serde(default)]
    pub certify: Option<CertifySection>,
    #[serde(default)]
    pub scout: Option<ScoutSection>,
}

/// Command-line overrides; nothing scientific can be changed this way
/// beyond the seed and the budget.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(s) = o.seed {
            self.master_seed = s;
        }
        if let Some(t) = o.budget {
            self.budget = t;
        }
        if let Some(out) = &o.out {
            self.output_dir = Some(out.clone());
        }
        self.validate()
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn algorithms(&self) -> Vec<String> {
        match &self.algorithms {
            Some(a) => a.clone(),
            None => self
                .policy
                .algorithms()
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }

    pub fn find(&self, name: &str) -> Result<&HyperHpConfig> {
        match self.configs.iter().find(|c| c.name == name) {
            Some(c) => Ok(&c.config),
            None => bail!("unknown HPO config `{name}`"),
        }
    }

    /// Named configs listed in `allowable`, or all of them.
    pub fn allowable(
        &self,
        allowable: Option<&Vec<String>>,
    ) -> Result<Vec<(String, HyperHpConfig)>> {
        match allowable {
            None => Ok(self
                .configs
                .iter()
                .map(|c| (c.name.clone(), c.config.clone()))
                .collect()),
            Some(names) => names
                .iter()
                .map(|n| Ok((n.clone(), self.find(n)?.clone())))
                .collect(),
        }
    }

    pub fn demon(&self) -> DemonSection {
        self.demon.clone().unwrap_or_default()
    }

    pub fn certify(&self) -> CertifySection {
        self.certify.clone().unwrap_or_default()
    }

    /// Reject anything unresolved before a single trial runs.
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.schema == CONFIG_SCHEMA,
            "unsupported config schema `{}` (expected `{CONFIG_SCHEMA}`)",
            self.schema
        );
        ensure!(
            self.budget > 0.0 && self.budget.is_finite(),
            "budget must be positive"
        );
        self.task.validate()?;
        ensure!(!self.configs.is_empty(), "no HPO configs declared");
        let mut names = BTreeSet::new();
        for c in &self.configs {
            ensure!(
                names.insert(&c.name),
                "HPO config `{}` declared twice",
                c.name
            );
            c.config
                .validate()
                .with_context(|| format!("HPO config `{}`", c.name))?;
        }
        self.policy.validate()?;
        for a in self.policy.algorithms() {
            self.task.rule(a).context("policy")?;
        }
        for a in self.algorithms() {
            self.task.rule(&a)?;
        }
        if let Some(d) = &self.defense {
            ensure!(
                self.find(&d.config)?.is_random_search(),
                "defense config `{}` must be a random search",
                d.config
            );
            if let Some(bad) = d.thresholds().iter().find(|t| !(0.0..=1.0).contains(*t)) {
                bail!("threshold {bad} outside [0, 1]");
            }
        }
        if let Some(d) = &self.demon {
            self.allowable(d.allowable.as_ref())?;
            if d.reasoners.contains(&ReasonerKind::Defended) {
                ensure!(
                    self.defense.is_some(),
                    "the defended reasoner needs a [defense] section"
                );
            }
        }
        if let Some(c) = &self.certify {
            self.allowable(c.allowable.as_ref())?;
        }
        if let Some(s) = &self.scout {
            self.task.rule(&s.algorithm)?;
            ensure!(
                self.task.hp_domain.contains_key(&s.dim),
                "scout dimension `{}` is not part of the task",
                s.dim
            );
        }
        Ok(())
    }
}
