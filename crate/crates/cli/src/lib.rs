//! Experiment runner: configuration, orchestration and artifact emission.

pub mod config;
pub mod experiments;
pub mod svg;

use std::path::{Path, PathBuf};

use nematic_membrane::energy3d::Energy3dError;
use nematic_membrane::fem::FemError;
use nematic_membrane::microstructure::MicrostructureError;
use nematic_membrane::qtensor::QTensorError;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{parse_config, parse_config_str, ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Project,
    Microstructure,
    SolveMembrane,
    GammaSweep,
    Energy3dDirect,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Self::Project, Self::Microstructure, Self::SolveMembrane, Self::GammaSweep, Self::Energy3dDirect];

    pub fn name(self) -> &'static str {
        match self {
            Self::Project => "project",
            Self::Microstructure => "microstructure",
            Self::SolveMembrane => "solve-membrane",
            Self::GammaSweep => "gamma-sweep",
            Self::Energy3dDirect => "energy3d-direct",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "projection-validate" => Some(Self::Project),
            _ => Self::ALL.into_iter().find(|e| e.name() == s),
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Self::Project => "weighted and Euclidean projections against reference solvers",
            Self::Microstructure => "laminate basis, compatibility and convergence of f_n",
            Self::SolveMembrane => "minimize the limit membrane energy on a rectangle",
            Self::GammaSweep => "recovery-sequence energy gap over a decreasing epsilon list",
            Self::Energy3dDirect => "direct 3D quadrature of one recovery state",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{experiment}: {source}")]
    Experiment {
        experiment: &'static str,
        #[source]
        source: Box<CliError>,
    },
    #[error(transparent)]
    QTensor(#[from] QTensorError),
    #[error(transparent)]
    Microstructure(#[from] MicrostructureError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Energy3d(#[from] Energy3dError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("no experiment selected (give a subcommand or `experiment =` in the config)")]
    NoExperiment,
}

impl CliError {
    /// 2 for invalid input, 3 for numerical non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Experiment { source, .. } => source.exit_code(),
            Self::Config(_) | Self::NoExperiment => 2,
            Self::QTensor(QTensorError::NoConvergence { .. }) | Self::Fem(FemError::NoConvergence { .. }) => 3,
            Self::Fem(FemError::Projection(QTensorError::NoConvergence { .. })) => 3,
            Self::QTensor(_) => 2,
            Self::Microstructure(MicrostructureError::NotBiaxial { .. }) => 2,
            Self::Energy3d(Energy3dError::InvalidScaling(_) | Energy3dError::InvalidGrain) => 2,
            Self::Energy3d(Energy3dError::ResolutionTooCoarse { .. } | Energy3dError::RhoTooLarge { .. }) => 2,
            Self::Energy3d(Energy3dError::QTensor(QTensorError::NoConvergence { .. })) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: &str, contents: String) -> Self {
        Self { name: name.into(), contents }
    }
}

pub fn run_experiment(exp: Experiment, cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let run = match exp {
        Experiment::Project => experiments::projection,
        Experiment::Microstructure => experiments::microstructure,
        Experiment::SolveMembrane => experiments::solve_membrane,
        Experiment::GammaSweep => experiments::gamma_sweep,
        Experiment::Energy3dDirect => experiments::energy3d_direct,
    };
    run(cfg).map_err(|e| CliError::Experiment { experiment: exp.name(), source: Box::new(e) })
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Manifest of inputs, versions and checksums; no timestamps.
pub fn manifest(exp: Experiment, cfg: &RunConfig, config_bytes: Option<&[u8]>, artifacts: &[Artifact]) -> String {
    let mut out = String::new();
    out.push_str(&format!("tool = nmembrane {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("experiment = {}\n", exp.name()));
    out.push_str(&format!("seed = {}\n", cfg.seed));
    if let Some(b) = config_bytes {
        out.push_str(&format!("config.sha256 = {}\n", sha256(b)));
    }
    for line in cfg.canonical().lines() {
        out.push_str(&format!("input {line}\n"));
    }
    for a in artifacts {
        out.push_str(&format!("output {} sha256 = {}\n", a.name, sha256(a.contents.as_bytes())));
    }
    out
}

pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub artifacts: Vec<Artifact>,
}

/// Runs one experiment and writes its artifacts, `manifest.txt` and `run_info.txt`.
pub fn execute(
    exp: Experiment,
    cfg: &RunConfig,
    config_bytes: Option<&[u8]>,
    out_dir: &Path,
) -> Result<RunOutcome, CliError> {
    let artifacts = run_experiment(exp, cfg)?;
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    for a in &artifacts {
        let p = out_dir.join(&a.name);
        std::fs::write(&p, &a.contents).map_err(io(&p))?;
    }
    let p = out_dir.join("manifest.txt");
    std::fs::write(&p, manifest(exp, cfg, config_bytes, &artifacts)).map_err(io(&p))?;
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let p = out_dir.join("run_info.txt");
    std::fs::write(&p, format!("finished_unix_seconds = {secs}\n")).map_err(io(&p))?;
    Ok(RunOutcome { out_dir: out_dir.to_path_buf(), artifacts })
}
