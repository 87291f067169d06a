//! Flat `section.key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nematic_membrane::energy3d::{LadderOverrides, Model, ScalingParams};
use nematic_membrane::qtensor::MaterialParams;
use thiserror::Error;

use crate::Experiment;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path}:{line}: {key}: {invariant} violated: {detail}")]
    Validation { path: String, line: usize, key: String, invariant: String, detail: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Condition on one side of the membrane rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeSpec {
    Free,
    Fixed([f64; 2]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub eps: Vec<f64>,
    pub ubar: [f64; 2],
    /// `(q11, q22, q12, q13, q23)`, or `None` for the pointwise optimum.
    pub qbar: Option<[f64; 5]>,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSpec {
    pub epsilon: f64,
    pub bonding: [usize; 3],
    pub film: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub material: MaterialParams,
    pub geometry: Geometry,
    /// left, right, bottom, top
    pub boundary: [EdgeSpec; 4],
    pub load: [f64; 2],
    pub tol: f64,
    pub max_iters: usize,
    pub ladder: LadderOverrides,
    pub sweep: SweepSpec,
    pub direct: DirectSpec,
    pub microstructure_q: [f64; 5],
    pub microstructure_n: Vec<usize>,
    pub projection_samples: usize,
    pub projection_scale: f64,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            material: MaterialParams::unit(),
            geometry: Geometry { x: [0.0, 1.0], y: [0.0, 1.0], nx: 16, ny: 16 },
            boundary: [EdgeSpec::Fixed([0.0, 0.0]), EdgeSpec::Free, EdgeSpec::Free, EdgeSpec::Free],
            load: [0.0, 0.0],
            tol: 1e-8,
            max_iters: 20_000,
            ladder: LadderOverrides::default(),
            sweep: SweepSpec { eps: vec![0.2, 0.1, 0.05, 0.025], ubar: [1.0, 0.0], qbar: None, model: Model::Uniaxial },
            direct: DirectSpec { epsilon: 0.2, bonding: [1000, 24, 200], film: [64, 64, 4] },
            microstructure_q: [0.0; 5],
            microstructure_n: vec![4, 8, 16, 32],
            projection_samples: 50,
            projection_scale: 0.5,
            output_dir: None,
            seed: 42,
        }
    }
}

pub const KEYS: &[&str] = &[
    "experiment",
    "material.lambda",
    "material.mu",
    "geometry.x0",
    "geometry.x1",
    "geometry.y0",
    "geometry.y1",
    "mesh.nx",
    "mesh.ny",
    "boundary.left",
    "boundary.right",
    "boundary.bottom",
    "boundary.top",
    "load.fx",
    "load.fy",
    "solver.tol",
    "solver.max_iters",
    "scaling.delta_eps",
    "scaling.eta",
    "scaling.delta",
    "scaling.rho",
    "sweep.eps",
    "sweep.u1",
    "sweep.u2",
    "sweep.qbar",
    "sweep.model",
    "direct.epsilon",
    "direct.bonding",
    "direct.film",
    "microstructure.q",
    "microstructure.n",
    "projection.samples",
    "projection.scale",
    "output.dir",
    "seed",
];

/// Raw entries with the line each came from.
#[derive(Debug, Clone, Default)]
pub struct Entries {
    path: String,
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    pub fn parse(path: &str, text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { path: path.into(), line, message };
            let (k, v) = body.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(err(format!("unknown key `{k}`")));
            }
            if v.is_empty() {
                return Err(err(format!("empty value for `{k}`")));
            }
            if let Some((first, _)) = map.insert(k.to_string(), (line, v.to_string())) {
                return Err(err(format!("duplicate key `{k}` (first set on line {first})")));
            }
        }
        Ok(Self { path: path.into(), map })
    }

    fn line_of(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn parse_err(&self, key: &str, message: String) -> ConfigError {
        ConfigError::Parse { path: self.path.clone(), line: self.line_of(key), message: format!("{key}: {message}") }
    }

    fn invalid(&self, key: &str, invariant: &str, detail: impl Into<String>) -> ConfigError {
        ConfigError::Validation {
            path: self.path.clone(),
            line: self.line_of(key),
            key: key.into(),
            invariant: invariant.into(),
            detail: detail.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|(_, v)| v.as_str())
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| self.parse_err(key, format!("cannot parse `{v}`"))),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| self.parse_err(key, format!("cannot parse `{}`", s.trim()))))
                .collect(),
        }
    }

    fn fixed<T: std::str::FromStr + Copy, const N: usize>(&self, key: &str, default: [T; N]) -> Result<[T; N], ConfigError> {
        let v = self.list(key, default.to_vec())?;
        v.try_into().map_err(|v: Vec<T>| self.parse_err(key, format!("expected {N} comma-separated values, got {}", v.len())))
    }

    fn edge(&self, key: &str, default: EdgeSpec) -> Result<EdgeSpec, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some("free") => Ok(EdgeSpec::Free),
            Some(_) => Ok(EdgeSpec::Fixed(self.fixed(key, [0.0, 0.0])?)),
        }
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config_str(&path.display().to_string(), &text)
}

pub fn parse_config_str(path: &str, text: &str) -> Result<RunConfig, ConfigError> {
    let e = Entries::parse(path, text)?;
    let d = RunConfig::default();

    let experiment = match e.raw("experiment") {
        None => None,
        Some(v) => Some(
            Experiment::from_name(v).ok_or_else(|| e.parse_err("experiment", format!("unknown experiment `{v}`")))?,
        ),
    };
    let lambda = e.get("material.lambda", 1.0)?;
    let mu = e.get("material.mu", 1.0)?;
    let key = if e.raw("material.lambda").is_some() { "material.lambda" } else { "material.mu" };
    let material = MaterialParams::new(lambda, mu).map_err(|err| e.invalid(key, "Lamé inequality", err.to_string()))?;

    let geometry = Geometry {
        x: [e.get("geometry.x0", 0.0)?, e.get("geometry.x1", 1.0)?],
        y: [e.get("geometry.y0", 0.0)?, e.get("geometry.y1", 1.0)?],
        nx: e.get("mesh.nx", d.geometry.nx)?,
        ny: e.get("mesh.ny", d.geometry.ny)?,
    };
    if !(geometry.x[1] > geometry.x[0]) {
        return Err(e.invalid("geometry.x1", "x0 < x1", format!("{:?}", geometry.x)));
    }
    if !(geometry.y[1] > geometry.y[0]) {
        return Err(e.invalid("geometry.y1", "y0 < y1", format!("{:?}", geometry.y)));
    }
    if geometry.nx == 0 || geometry.ny == 0 {
        return Err(e.invalid("mesh.nx", "positive mesh size", format!("{} x {}", geometry.nx, geometry.ny)));
    }
    let boundary = [
        e.edge("boundary.left", d.boundary[0])?,
        e.edge("boundary.right", d.boundary[1])?,
        e.edge("boundary.bottom", d.boundary[2])?,
        e.edge("boundary.top", d.boundary[3])?,
    ];
    let tol = e.get("solver.tol", d.tol)?;
    if !(tol > 0.0) {
        return Err(e.invalid("solver.tol", "positive tolerance", tol.to_string()));
    }

    let opt = |k: &str| -> Result<Option<f64>, ConfigError> {
        e.raw(k).map(|_| e.get(k, 0.0)).transpose()
    };
    let ladder = LadderOverrides {
        delta_eps: opt("scaling.delta_eps")?,
        eta: opt("scaling.eta")?,
        delta: opt("scaling.delta")?,
        rho: opt("scaling.rho")?,
    };
    let eps = e.list("sweep.eps", d.sweep.eps.clone())?;
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(e.invalid("sweep.eps", "strictly decreasing epsilon list", format!("{eps:?}")));
    }
    let direct_eps = e.get("direct.epsilon", d.direct.epsilon)?;
    let ladder_key = ["scaling.eta", "scaling.delta_eps", "scaling.delta", "scaling.rho"]
        .into_iter()
        .find(|k| e.raw(k).is_some())
        .unwrap_or("sweep.eps");
    for &x in eps.iter().chain([direct_eps].iter()) {
        ScalingParams::with_overrides(x, ladder)
            .map_err(|err| e.invalid(ladder_key, "scaling ladder", format!("at epsilon = {x}: {err}")))?;
    }
    let qbar = match e.raw("sweep.qbar") {
        None | Some("optimal") => None,
        Some(_) => Some(e.fixed("sweep.qbar", [0.0; 5])?),
    };
    let model = match e.raw("sweep.model") {
        None | Some("uniaxial") => Model::Uniaxial,
        Some("biaxial") => Model::Biaxial,
        Some(v) => return Err(e.parse_err("sweep.model", format!("expected `uniaxial` or `biaxial`, got `{v}`"))),
    };
    let sweep = SweepSpec { eps, ubar: [e.get("sweep.u1", 1.0)?, e.get("sweep.u2", 0.0)?], qbar, model };
    let direct = DirectSpec {
        epsilon: direct_eps,
        bonding: e.fixed("direct.bonding", d.direct.bonding)?,
        film: e.fixed("direct.film", d.direct.film)?,
    };
    let microstructure_n = e.list("microstructure.n", d.microstructure_n.clone())?;
    if microstructure_n.contains(&0) {
        return Err(e.invalid("microstructure.n", "positive frequency", format!("{microstructure_n:?}")));
    }
    let projection_scale = e.get("projection.scale", d.projection_scale)?;
    if !(projection_scale > 0.0) {
        return Err(e.invalid("projection.scale", "positive scale", projection_scale.to_string()));
    }
    Ok(RunConfig {
        experiment,
        material,
        geometry,
        boundary,
        load: [e.get("load.fx", 0.0)?, e.get("load.fy", 0.0)?],
        tol,
        max_iters: e.get("solver.max_iters", d.max_iters)?,
        ladder,
        sweep,
        direct,
        microstructure_q: e.fixed("microstructure.q", d.microstructure_q)?,
        microstructure_n,
        projection_samples: e.get("projection.samples", d.projection_samples)?,
        projection_scale,
        output_dir: e.raw("output.dir").map(PathBuf::from),
        seed: e.get("seed", d.seed)?,
    })
}

fn pair(v: [f64; 2]) -> String {
    format!("{}, {}", v[0], v[1])
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Fully resolved configuration in the input syntax, one key per line.
    pub fn canonical(&self) -> String {
        let edge = |s: &EdgeSpec| match s {
            EdgeSpec::Free => "free".to_string(),
            EdgeSpec::Fixed(v) => pair(*v),
        };
        let mut out = Vec::new();
        if let Some(x) = self.experiment {
            out.push(format!("experiment = {}", x.name()));
        }
        out.push(format!("material.lambda = {}", self.material.lambda()));
        out.push(format!("material.mu = {}", self.material.mu()));
        out.push(format!("geometry.x0 = {}", self.geometry.x[0]));
        out.push(format!("geometry.x1 = {}", self.geometry.x[1]));
        out.push(format!("geometry.y0 = {}", self.geometry.y[0]));
        out.push(format!("geometry.y1 = {}", self.geometry.y[1]));
        out.push(format!("mesh.nx = {}", self.geometry.nx));
        out.push(format!("mesh.ny = {}", self.geometry.ny));
        for (k, s) in ["left", "right", "bottom", "top"].iter().zip(&self.boundary) {
            out.push(format!("boundary.{k} = {}", edge(s)));
        }
        out.push(format!("load.fx = {}", self.load[0]));
        out.push(format!("load.fy = {}", self.load[1]));
        out.push(format!("solver.tol = {}", self.tol));
        out.push(format!("solver.max_iters = {}", self.max_iters));
        let l = &self.ladder;
        for (k, v) in [("delta_eps", l.delta_eps), ("eta", l.eta), ("delta", l.delta), ("rho", l.rho)] {
            if let Some(v) = v {
                out.push(format!("scaling.{k} = {v}"));
            }
        }
        out.push(format!("sweep.eps = {}", join(&self.sweep.eps)));
        out.push(format!("sweep.u1 = {}", self.sweep.ubar[0]));
        out.push(format!("sweep.u2 = {}", self.sweep.ubar[1]));
        out.push(format!(
            "sweep.qbar = {}",
            self.sweep.qbar.map_or("optimal".to_string(), |q| join(&q))
        ));
        out.push(format!(
            "sweep.model = {}",
            match self.sweep.model {
                Model::Uniaxial => "uniaxial",
                Model::Biaxial => "biaxial",
            }
        ));
        out.push(format!("direct.epsilon = {}", self.direct.epsilon));
        out.push(format!("direct.bonding = {}", join(&self.direct.bonding)));
        out.push(format!("direct.film = {}", join(&self.direct.film)));
        out.push(format!("microstructure.q = {}", join(&self.microstructure_q)));
        out.push(format!("microstructure.n = {}", join(&self.microstructure_n)));
        out.push(format!("projection.samples = {}", self.projection_samples));
        out.push(format!("projection.scale = {}", self.projection_scale));
        out.push(format!("seed = {}", self.seed));
        out.join("\n") + "\n"
    }
}
