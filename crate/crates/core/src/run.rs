//! End-to-end runs: load a topology, simulate one failure scenario, build the
//! surface and write every output file. A run's manifest is enough to replay
//! it bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::failure::{self, FailureScenario, Ranking, RunPlan, SEED_MIX_DESCRIPTION};
use crate::io;
use crate::metrics::{self, CharacterizationStats};
use crate::pca::{PcaModel, DEFAULT_ALPHA};
use crate::surface::{self, RobustnessSurface, SurfaceSummary};

pub const DEFAULT_P_MAX: u32 = 70;
pub const DEFAULT_RANDOM_CONFIGS: usize = 500;
pub const DEFAULT_TARGETED_CONFIGS: usize = 100;
/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_2015;

pub const OMEGA_FILE: &str = "omega.csv";
pub const OMEGA_UNSORTED_FILE: &str = "omega_unsorted.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PCA_FILE: &str = "pca.json";
pub const SURFACE_FILE: &str = "surface.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const HEATMAP_FILE: &str = "heatmap.ppm";

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub topology: PathBuf,
    pub scenario: FailureScenario,
    pub p_max: u32,
    pub configs: usize,
    pub master_seed: u64,
    pub alpha: f64,
    pub ranking: Ranking,
    pub out_dir: PathBuf,
    pub heatmap: bool,
}

impl RunConfig {
    /// Defaults: `p_max` 70, 500 configurations for random failures and 100
    /// for targeted ones, α = 0.9, adaptive ranking, output into the current
    /// directory.
    pub fn new(topology: impl Into<PathBuf>, scenario: FailureScenario) -> Self {
        RunConfig {
            topology: topology.into(),
            scenario,
            p_max: DEFAULT_P_MAX,
            configs: default_configs(scenario),
            master_seed: DEFAULT_SEED,
            alpha: DEFAULT_ALPHA,
            ranking: Ranking::default(),
            out_dir: PathBuf::from("."),
            heatmap: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=100).contains(&self.p_max) {
            return Err(Error::Config(format!(
                "p_max must lie in 1..=100, got {}",
                self.p_max
            )));
        }
        if self.configs < 2 {
            return Err(Error::Config(format!(
                "at least 2 configurations are required, got {}",
                self.configs
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

pub fn default_configs(scenario: FailureScenario) -> usize {
    if scenario.strategy().is_targeted() {
        DEFAULT_TARGETED_CONFIGS
    } else {
        DEFAULT_RANDOM_CONFIGS
    }
}

/// Everything needed to reproduce a run. Contains no output location and no
/// timestamps, so replays write an identical copy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub topology: PathBuf,
    pub topology_sha256: String,
    pub scenario: FailureScenario,
    pub ranking: Ranking,
    pub percentages: Vec<u32>,
    pub config_count: usize,
    pub master_seed: u64,
    pub seed_derivation: String,
    pub config_seeds: Vec<u64>,
    pub alpha: f64,
    pub heatmap: bool,
}

/// Metadata written next to the surface CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMetadata {
    pub scenario: FailureScenario,
    pub percentages: Vec<u32>,
    pub config_seeds: Vec<u64>,
    pub metric_names: Vec<String>,
    pub normalized_component: Vec<f64>,
    pub t0: Vec<f64>,
    pub alpha: f64,
    pub selected_components: usize,
    pub r_star_init: f64,
    /// Heatmap ramp: blue at the first bound, red at the second.
    pub color_scale: [f64; 2],
    pub negative_values: usize,
    pub min_value: f64,
    pub area_under_mean: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub model: PcaModel,
    pub surface: RobustnessSurface,
    pub summary: SurfaceSummary,
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let text = io::read_to_string(&config.topology)?;
    let plan = RunPlan::from_master_seed(config.p_max, config.configs, config.master_seed)?
        .with_ranking(config.ranking);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        topology: config.topology.clone(),
        topology_sha256: sha256_hex(text.as_bytes()),
        scenario: config.scenario,
        ranking: config.ranking,
        percentages: plan.percentages().to_vec(),
        config_count: plan.config_count(),
        master_seed: config.master_seed,
        seed_derivation: SEED_MIX_DESCRIPTION.to_string(),
        config_seeds: plan.seeds().to_vec(),
        alpha: config.alpha,
        heatmap: config.heatmap,
    };
    execute(&text, manifest, plan, &config.out_dir)
}

/// Re-runs the experiment recorded in `manifest_path`. Outputs go to `out_dir`,
/// or next to the manifest when `None`. A relative topology path is looked up
/// from the working directory first, then from the manifest's directory.
pub fn replay(manifest_path: &Path, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let manifest: Manifest = serde_json::from_str(&io::read_to_string(manifest_path)?)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let topology = if manifest.topology.is_relative() && !manifest.topology.exists() {
        base.join(&manifest.topology)
    } else {
        manifest.topology.clone()
    };
    let text = io::read_to_string(&topology)?;
    let digest = sha256_hex(text.as_bytes());
    if digest != manifest.topology_sha256 {
        return Err(Error::Input(format!(
            "{} has sha256 {digest}, the manifest records {}",
            topology.display(),
            manifest.topology_sha256
        )));
    }
    if manifest.config_seeds.len() != manifest.config_count {
        return Err(Error::Config(format!(
            "manifest lists {} seeds for {} configurations",
            manifest.config_seeds.len(),
            manifest.config_count
        )));
    }
    if manifest.config_count < 2 || !(manifest.alpha > 0.0 && manifest.alpha <= 1.0) {
        return Err(Error::Config(
            "manifest has an invalid configuration count or alpha".into(),
        ));
    }
    let plan = RunPlan::new(manifest.percentages.clone(), manifest.config_seeds.clone())?
        .with_ranking(manifest.ranking);
    execute(&text, manifest, plan, out_dir.unwrap_or(base))
}

fn execute(text: &str, manifest: Manifest, plan: RunPlan, out_dir: &Path) -> Result<RunOutcome> {
    let g = io::parse_edge_list(text)?;
    log::info!(
        "{} ({} ranking): {} nodes, {} links; {} x {} cells",
        manifest.scenario,
        manifest.ranking,
        g.node_count(),
        g.link_count(),
        plan.percentages().len(),
        plan.config_count()
    );
    let scenario_run = failure::run_scenario(&g, manifest.scenario, &plan)?;
    let (model, surface) = surface::build_surface(&scenario_run, manifest.alpha)?;
    let summary = surface::summarize(&surface);
    if surface.negative_count() > 0 {
        log::warn!(
            "{} surface values are negative (minimum {})",
            surface.negative_count(),
            surface.min_value()
        );
    }

    fs::create_dir_all(out_dir).map_err(|e| io::with_path(e, out_dir))?;
    let metadata = SurfaceMetadata {
        scenario: surface.scenario,
        percentages: surface.percentages.clone(),
        config_seeds: plan.seeds().to_vec(),
        metric_names: model.metric_names.clone(),
        normalized_component: model.normalized.clone(),
        t0: model.t0.clone(),
        alpha: model.alpha,
        selected_components: model.selected_components,
        r_star_init: surface.r_star_init,
        color_scale: [0.0, surface.max_value()],
        negative_values: surface.negative_count(),
        min_value: surface.min_value(),
        area_under_mean: summary.area_under_mean,
    };

    let mut buf = Vec::new();
    io::write_surface_csv(&mut buf, &surface.percentages, &surface.omega)?;
    write(out_dir, OMEGA_FILE, &buf)?;
    buf.clear();
    io::write_surface_csv(&mut buf, &surface.percentages, &surface.unsorted)?;
    write(out_dir, OMEGA_UNSORTED_FILE, &buf)?;
    buf.clear();
    io::write_summary_csv(&mut buf, &surface.percentages, &summary)?;
    write(out_dir, SUMMARY_FILE, &buf)?;
    write(out_dir, PCA_FILE, &to_json(&model)?)?;
    write(out_dir, SURFACE_FILE, &to_json(&metadata)?)?;
    write(out_dir, MANIFEST_FILE, &to_json(&manifest)?)?;
    if manifest.heatmap {
        write(out_dir, HEATMAP_FILE, &io::render_heatmap(&surface)?)?;
    }

    Ok(RunOutcome {
        manifest,
        model,
        surface,
        summary,
    })
}

/// Loads a topology and computes its structural statistics.
pub fn characterize(topology: &Path) -> Result<CharacterizationStats> {
    metrics::characterize(&io::load_edge_list(topology)?)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io::with_path(e, &path))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
