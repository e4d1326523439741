//! Flat `key = value` experiment configurations.
//!
//! Keys are namespaced (`grid.N`, `potential.kind`, ...). Unknown keys are
//! rejected. A key written as `case.<label>.<key>` overrides the base value
//! for one case of a multi-case experiment.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use crate::classical::{FlowOptions, Integrator, Potential};
use crate::error::{Error, Result};
use crate::grid::{Grid, MixedNormSpec};
use crate::modspace::WindowEvolution;
use crate::schrod::free_propagate;
use crate::transport::RemainderSpec;
use crate::wpt::{ComplexField, Window};

/// Every accepted key, excluding the `case.<label>.` prefix.
pub const KNOWN_KEYS: &[&str] = &[
    "experiment.name",
    "experiment.kind",
    "output.dir",
    "check.golden",
    "grid.n",
    "grid.N",
    "grid.L",
    "potential.kind",
    "potential.A",
    "potential.v",
    "potential.sign",
    "potential.H",
    "potential.b",
    "potential.omega",
    "initial.kind",
    "initial.center",
    "initial.momentum",
    "initial.width",
    "initial.focus",
    "initial.k",
    "initial.path",
    "window.kind",
    "window.width",
    "window.k",
    "window.mode",
    "norm.pq",
    "norm.p",
    "norm.q",
    "time.list",
    "time.range",
    "solver.dt",
    "flow.integrator",
    "flow.ds",
    "flow.tmax",
    "picard.K",
    "picard.tol",
    "picard.dtau",
    "picard.theta_nodes",
    "samples.count",
    "samples.seed",
    "samples.span",
    "samples.extent",
    "fd.h",
];

/// The raw key-value pairs of one file, with per-case overrides split off.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    pub base: BTreeMap<String, String>,
    /// Case labels in file order, each with its overrides.
    pub cases: Vec<(String, BTreeMap<String, String>)>,
    /// Directory that relative paths are resolved against.
    pub root: PathBuf,
}

impl RawConfig {
    pub fn parse(text: &str, root: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg = Self {
            root: root.into(),
            ..Self::default()
        };
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let (case, key) = match key.strip_prefix("case.") {
                Some(rest) => {
                    let (label, key) = rest
                        .split_once('.')
                        .ok_or_else(|| Error::Config(format!("line {}: `case.<label>.<key>` expected", lineno + 1)))?;
                    (Some(label.to_string()), key)
                }
                None => (None, key),
            };
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            let map = match case {
                None => &mut cfg.base,
                Some(label) => {
                    let pos = match cfg.cases.iter().position(|(l, _)| *l == label) {
                        Some(p) => p,
                        None => {
                            cfg.cases.push((label, BTreeMap::new()));
                            cfg.cases.len() - 1
                        }
                    };
                    &mut cfg.cases[pos].1
                }
            };
            if map.insert(key.to_string(), value).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(cfg)
    }

    /// Sets or replaces a base key, as a command-line override would.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.base.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, root)
    }

    /// Resolved settings for each case, or the base alone when there are none.
    pub fn resolve(&self) -> Result<Vec<ExperimentConfig>> {
        if self.cases.is_empty() {
            return Ok(vec![ExperimentConfig::from_map(&self.base, None, &self.root)?]);
        }
        self.cases
            .iter()
            .map(|(label, over)| {
                let mut merged = self.base.clone();
                merged.extend(over.iter().map(|(k, v)| (k.clone(), v.clone())));
                ExperimentConfig::from_map(&merged, Some(label.clone()), &self.root)
            })
            .collect()
    }
}

/// Parses a real number, accepting `pi` factors such as `pi/4`, `2*pi`, `-pi`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad number `{s}`"));
    if s.eq_ignore_ascii_case("inf") {
        return Ok(f64::INFINITY);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    if !body.contains("pi") {
        return body.parse::<f64>().map(|v| sign * v).map_err(|_| bad());
    }
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let factor = match num.strip_suffix("pi").map(str::trim) {
        Some("") => 1.0,
        Some(c) => c.trim_end_matches('*').trim().parse::<f64>().map_err(|_| bad())?,
        None => return Err(bad()),
    };
    Ok(sign * factor * PI / den)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_real).collect()
}

fn parse_usize(key: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` must be a non-negative integer, got `{s}`")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    FreeConservation,
    HarmonicConservation,
    Rotation,
    Liouville,
    FlowJacobian,
    TrajectoryBounds,
    TransportExact,
    PicardTransport,
    Boundedness,
    GrowthExponent,
    Identities,
    /// A plain norm series with no pass criterion beyond finiteness.
    NormSeries,
}

impl ExperimentKind {
    pub const ALL: [Self; 12] = [
        Self::FreeConservation,
        Self::HarmonicConservation,
        Self::Rotation,
        Self::Liouville,
        Self::FlowJacobian,
        Self::TrajectoryBounds,
        Self::TransportExact,
        Self::PicardTransport,
        Self::Boundedness,
        Self::GrowthExponent,
        Self::Identities,
        Self::NormSeries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FreeConservation => "free_conservation",
            Self::HarmonicConservation => "harmonic_conservation",
            Self::Rotation => "rotation",
            Self::Liouville => "liouville",
            Self::FlowJacobian => "flow_jacobian",
            Self::TrajectoryBounds => "trajectory_bounds",
            Self::TransportExact => "transport_exact",
            Self::PicardTransport => "picard_transport",
            Self::Boundedness => "boundedness",
            Self::GrowthExponent => "growth_exponent",
            Self::Identities => "identities",
            Self::NormSeries => "norm_series",
        }
    }

    /// The property the experiment reproduces, for the summary table.
    pub fn claim(self) -> &'static str {
        match self {
            Self::FreeConservation => "free evolution preserves M^{p,q} with evolved window",
            Self::HarmonicConservation => "harmonic evolution preserves M^{p,p} with same-equation window",
            Self::Rotation => "quarter-period harmonic evolution swaps x and xi",
            Self::Liouville => "characteristic flow has unit Jacobian",
            Self::FlowJacobian => "flow is differentiable with variational matrix M",
            Self::TrajectoryBounds => "trajectories stay polynomially close to free motion",
            Self::TransportExact => "leading transport is exact for V = 0",
            Self::PicardTransport => "characteristic representation reproduces the solution",
            Self::Boundedness => "M^{p,q} norms stay bounded on finite time intervals",
            Self::GrowthExponent => "static-window M^{inf,1} growth rate (1+t)^{1/2}",
            Self::Identities => "inversion, Plancherel and split-step unitarity",
            Self::NormSeries => "norm series",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Gaussian {
        center: Vec<f64>,
        momentum: Vec<f64>,
        width: f64,
        /// Free evolution backwards by this time, so the data refocuses at `t = focus`.
        focus: f64,
    },
    Hermite {
        k: usize,
        width: f64,
    },
    File(PathBuf),
}

impl InitialSpec {
    pub fn build(&self, grid: &Grid) -> Result<ComplexField> {
        match self {
            Self::Gaussian {
                center,
                momentum,
                width,
                focus,
            } => {
                let g = ComplexField::gaussian(grid, center, momentum, *width);
                Ok(if *focus == 0.0 { g } else { free_propagate(&g, -focus) })
            }
            Self::Hermite { k, width } => Ok(ComplexField::hermite(grid, *k, *width)),
            Self::File(path) => {
                let file = fs::File::open(path)?;
                ComplexField::read_text(grid, std::io::BufReader::new(file))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec {
    pub hermite: Option<usize>,
    pub width: f64,
    pub mode: WindowEvolution,
}

impl WindowSpec {
    pub fn build(&self, grid: &Grid) -> Result<Window> {
        match self.hermite {
            None => Window::gaussian(grid, self.width),
            Some(k) => Window::new(ComplexField::hermite(grid, k, self.width)),
        }
    }
}

/// Fully resolved settings for one experiment case.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub case: Option<String>,
    pub kind: ExperimentKind,
    pub dim: usize,
    pub count: usize,
    /// `None` selects the square grid `L = sqrt(π N / 2)`, where `Δx = Δξ`.
    pub half_width: Option<f64>,
    pub potential: Potential,
    pub initial: InitialSpec,
    pub window: WindowSpec,
    pub norms: Vec<MixedNormSpec>,
    pub times: Vec<f64>,
    pub dt: f64,
    pub flow: FlowOptions,
    pub picard: RemainderSpec,
    pub samples: usize,
    pub seed: u64,
    pub span: f64,
    pub extent: f64,
    pub fd_h: f64,
    pub output_dir: Option<PathBuf>,
    pub golden: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Display label `name` or `name/case`.
    pub fn label(&self) -> String {
        match &self.case {
            Some(c) => format!("{}/{c}", self.name),
            None => self.name.clone(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let l = self
            .half_width
            .unwrap_or_else(|| (PI * self.count as f64 / 2.0).sqrt());
        Grid::uniform(self.dim, self.count, l)
    }

    fn from_map(map: &BTreeMap<String, String>, case: Option<String>, root: &Path) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let real = |k: &str, default: f64| -> Result<f64> { get(k).map_or(Ok(default), parse_real) };
        let list = |k: &str| -> Result<Option<Vec<f64>>> { get(k).map(parse_list).transpose() };
        let path = |k: &str| get(k).map(|p| root.join(p));

        let kind: ExperimentKind = get("experiment.kind").unwrap_or("norm_series").parse()?;
        let name = get("experiment.name").unwrap_or(kind.name()).to_string();
        let dim = get("grid.n").map_or(Ok(1), |s| parse_usize("grid.n", s))?;
        let count = get("grid.N").map_or(Ok(256), |s| parse_usize("grid.N", s))?;
        let half_width = match get("grid.L") {
            None | Some("square") => None,
            Some(s) => Some(parse_real(s)?),
        };

        let amplitude = real("potential.A", 1.0)?;
        let wavevector = list("potential.v")?.unwrap_or_else(|| vec![1.0; dim]);
        let potential = match get("potential.kind").unwrap_or("free") {
            "free" => Potential::free(dim),
            "harmonic" => Potential::Harmonic {
                dim,
                sign: real("potential.sign", 1.0)?,
            },
            "quadratic" => Potential::Quadratic {
                hessian: list("potential.H")?.ok_or_else(|| Error::Config("quadratic potential needs potential.H".into()))?,
                linear: list("potential.b")?.unwrap_or_else(|| vec![0.0; dim]),
            },
            "cosine" => Potential::Cosine { amplitude, wavevector },
            "harmonic_cosine" => Potential::HarmonicCosine { amplitude, wavevector },
            "pulsed_cosine" => Potential::PulsedCosine {
                amplitude,
                frequency: real("potential.omega", 1.0)?,
                wavevector,
            },
            other => return Err(Error::Config(format!("unknown potential `{other}`"))),
        };

        let width = real("initial.width", 1.0)?;
        let initial = match get("initial.kind").unwrap_or("gaussian") {
            "gaussian" => InitialSpec::Gaussian {
                center: list("initial.center")?.unwrap_or_else(|| vec![0.0; dim]),
                momentum: list("initial.momentum")?.unwrap_or_else(|| vec![0.0; dim]),
                width,
                focus: real("initial.focus", 0.0)?,
            },
            "hermite" => InitialSpec::Hermite {
                k: get("initial.k").map_or(Ok(0), |s| parse_usize("initial.k", s))?,
                width,
            },
            "file" => InitialSpec::File(path("initial.path").ok_or_else(|| Error::Config("file data needs initial.path".into()))?),
            other => return Err(Error::Config(format!("unknown initial data `{other}`"))),
        };

        let window = WindowSpec {
            hermite: match get("window.kind").unwrap_or("gaussian") {
                "gaussian" => None,
                "hermite" => Some(get("window.k").map_or(Ok(0), |s| parse_usize("window.k", s))?),
                other => return Err(Error::Config(format!("unknown window `{other}`"))),
            },
            width: real("window.width", 1.0)?,
            mode: get("window.mode").map_or(Ok(WindowEvolution::Static), str::parse)?,
        };

        let norms = match (get("norm.pq"), get("norm.p"), get("norm.q")) {
            (Some(pq), None, None) => pq
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<MixedNormSpec>>>()?,
            (None, Some(p), q) => vec![MixedNormSpec::new(p.parse()?, q.unwrap_or(p).parse()?)],
            (None, None, None) => vec![MixedNormSpec::from_values(2.0, 2.0)?],
            _ => return Err(Error::Config("use either norm.pq or norm.p/norm.q".into())),
        };

        let times = match (get("time.list"), get("time.range")) {
            (Some(l), None) => parse_list(l)?,
            (None, Some(r)) => {
                let parts: Vec<&str> = r.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::Config("time.range is start:stop:count".into()));
                }
                let (a, b) = (parse_real(parts[0])?, parse_real(parts[1])?);
                let n = parse_usize("time.range", parts[2])?;
                if n < 2 {
                    return Err(Error::Config("time.range needs at least two points".into()));
                }
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
            (None, None) => vec![1.0],
            _ => return Err(Error::Config("use either time.list or time.range".into())),
        };

        let mut flow = FlowOptions::default();
        if let Some(s) = get("flow.integrator") {
            flow.integrator = s.parse::<Integrator>()?;
        }
        flow.step = real("flow.ds", flow.step)?;
        flow.max_span = real("flow.tmax", flow.max_span)?;
        if !(flow.step > 0.0) {
            return Err(Error::Config("flow.ds must be positive".into()));
        }
        if let Some(t) = times.iter().find(|t| t.abs() > flow.max_span) {
            return Err(Error::Config(format!("time {t} exceeds the horizon {}", flow.max_span)));
        }

        let mut picard = RemainderSpec::default();
        if let Some(s) = get("picard.K") {
            picard.max_iterations = parse_usize("picard.K", s)?;
        }
        if let Some(s) = get("picard.theta_nodes") {
            picard.theta_nodes = parse_usize("picard.theta_nodes", s)?;
        }
        picard.tolerance = real("picard.tol", picard.tolerance)?;
        picard.tau_step = real("picard.dtau", picard.tau_step)?;

        let dt = real("solver.dt", 1e-3)?;
        if !(dt > 0.0) {
            return Err(Error::Config("solver.dt must be positive".into()));
        }

        Ok(Self {
            name,
            case,
            kind,
            dim,
            count,
            half_width,
            potential,
            initial,
            window,
            norms,
            times,
            dt,
            flow,
            picard,
            samples: get("samples.count").map_or(Ok(100), |s| parse_usize("samples.count", s))?,
            seed: get("samples.seed").map_or(Ok(0), |s| parse_usize("samples.seed", s))? as u64,
            span: real("samples.span", 4.0)?,
            extent: real("samples.extent", 3.0)?,
            fd_h: real("fd.h", 1e-4)?,
            output_dir: path("output.dir"),
            golden: path("check.golden"),
        })
    }
}
