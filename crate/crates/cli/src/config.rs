//! Experiment configuration files: flat `key = value` text with one
//! section per concern. Every field is always serialized, so
//! `parse(serialize(cfg)) == cfg` holds exactly.
//!
//! ```text
//! kind = bias
//! seed = 42
//! out = out
//! scale = 1
//!
//! [model]
//! type = curie_weiss
//! n = 100
//! alpha = 0.5
//!
//! [delay]
//! family = geometric
//! tau = 4
//!
//! [run]
//! count = 5000
//! burn_in = experiment
//! ...
//! ```

use anyhow::{anyhow, bail, Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    Stationarity,
    Sample,
    DelayProbe,
    TauVsThreads,
    CoupledHamming,
    Bias,
    Variance,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Stationarity => "stationarity",
            ExperimentKind::Sample => "sample",
            ExperimentKind::DelayProbe => "delay-probe",
            ExperimentKind::TauVsThreads => "tau-vs-threads",
            ExperimentKind::CoupledHamming => "coupled-hamming",
            ExperimentKind::Bias => "bias",
            ExperimentKind::Variance => "variance",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "stationarity" => ExperimentKind::Stationarity,
            "sample" => ExperimentKind::Sample,
            "delay-probe" => ExperimentKind::DelayProbe,
            "tau-vs-threads" => ExperimentKind::TauVsThreads,
            "coupled-hamming" => ExperimentKind::CoupledHamming,
            "bias" => ExperimentKind::Bias,
            "variance" => ExperimentKind::Variance,
            other => bail!("unknown experiment kind `{other}`"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    CurieWeiss { n: usize, alpha: f64 },
    TorusGrid { k: usize, alpha: f64 },
    File { path: PathBuf },
}

impl ModelSpec {
    /// Instantiate; for sweep experiments the node count is overridden
    /// per point instead.
    pub fn build(&self) -> Result<hogwild_gibbs::model::IsingModel> {
        use hogwild_gibbs::model::{load_model, IsingModel};
        Ok(match self {
            ModelSpec::CurieWeiss { n, alpha } => IsingModel::curie_weiss(*n, *alpha)?,
            ModelSpec::TorusGrid { k, alpha } => IsingModel::torus_grid(*k, *alpha)?,
            ModelSpec::File { path } => load_model(path)?,
        })
    }

    /// Same family at a different size (used by `ns` sweeps). `n` must be a
    /// perfect square for grid families.
    pub fn build_sized(&self, n: usize) -> Result<hogwild_gibbs::model::IsingModel> {
        use hogwild_gibbs::model::IsingModel;
        Ok(match self {
            ModelSpec::CurieWeiss { alpha, .. } => IsingModel::curie_weiss(n, *alpha)?,
            ModelSpec::TorusGrid { alpha, .. } => {
                let k = (n as f64).sqrt().round() as usize;
                if k * k != n {
                    bail!("grid sweep size {n} is not a perfect square");
                }
                IsingModel::torus_grid(k, *alpha)?
            }
            ModelSpec::File { .. } => bail!("size sweeps need a parametric model family"),
        })
    }

    pub fn describe(&self) -> String {
        match self {
            ModelSpec::CurieWeiss { n, alpha } => format!("curie_weiss(n={n}, alpha={alpha})"),
            ModelSpec::TorusGrid { k, alpha } => format!("torus_grid(k={k}, alpha={alpha})"),
            ModelSpec::File { path } => format!("file({})", path.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DelaySpec {
    Constant { value: u64 },
    UniformInt { max: u64 },
    Geometric { tau: f64 },
}

impl DelaySpec {
    pub fn build(&self) -> Result<hogwild_gibbs::hogwild::DelayModel> {
        use hogwild_gibbs::hogwild::DelayModel;
        Ok(match self {
            DelaySpec::Constant { value } => DelayModel::constant(*value),
            DelaySpec::UniformInt { max } => DelayModel::uniform_int(*max),
            DelaySpec::Geometric { tau } => DelayModel::geometric_with_mean(*tau)?,
        })
    }

    /// Declared average contention bound τ.
    pub fn tau(&self) -> f64 {
        match self {
            DelaySpec::Constant { value } => *value as f64,
            DelaySpec::UniformInt { max } => *max as f64 / 2.0,
            DelaySpec::Geometric { tau } => *tau,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DelaySpec::Constant { value } => format!("constant({value})"),
            DelaySpec::UniformInt { max } => format!("uniform_int(0..={max})"),
            DelaySpec::Geometric { tau } => format!("geometric(tau={tau})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BurnInRule {
    /// `ceil(10 · n · log₂ n)`.
    Experiment,
    /// `ceil(n/(1−α) · ln(n/ε))` with the model's Dobrushin coefficient.
    Theory { eps: f64 },
    Steps { steps: u64 },
}

impl BurnInRule {
    pub fn steps_for(&self, model: &hogwild_gibbs::model::IsingModel) -> Result<u64> {
        use hogwild_gibbs::sampler::{mixing_budget_experiment, mixing_budget_theory};
        Ok(match self {
            BurnInRule::Experiment => mixing_budget_experiment(model.n()),
            BurnInRule::Theory { eps } => {
                mixing_budget_theory(model.n(), model.dobrushin_alpha()?, *eps)?
            }
            BurnInRule::Steps { steps } => *steps,
        })
    }

    fn serialize(&self) -> String {
        match self {
            BurnInRule::Experiment => "experiment".into(),
            BurnInRule::Theory { eps } => format!("theory:{eps}"),
            BurnInRule::Steps { steps } => format!("steps:{steps}"),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        if s == "experiment" {
            return Ok(BurnInRule::Experiment);
        }
        if let Some(eps) = s.strip_prefix("theory:") {
            return Ok(BurnInRule::Theory { eps: eps.parse()? });
        }
        if let Some(steps) = s.strip_prefix("steps:") {
            return Ok(BurnInRule::Steps {
                steps: steps.parse()?,
            });
        }
        bail!("unknown burn_in rule `{s}` (expected experiment | theory:<eps> | steps:<k>)")
    }
}

/// A fully resolved experiment description. Every simulated experiment is
/// deterministic given this structure.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub out: PathBuf,
    pub scale: u64,
    pub model: ModelSpec,
    pub delay: DelaySpec,
    pub count: usize,
    pub burn_in: BurnInRule,
    /// Thinning stride for stationarity runs; 0 means "every n steps".
    pub thin: u64,
    pub retained: usize,
    pub moments: u32,
    pub coupled_runs: usize,
    pub ns: Vec<usize>,
    pub threads: Vec<usize>,
    pub writes: u64,
    pub function: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn default_for(kind: ExperimentKind) -> Self {
        let mut cfg = ExperimentConfig {
            kind,
            seed: 42,
            out: PathBuf::from("out"),
            scale: 1,
            model: ModelSpec::CurieWeiss { n: 100, alpha: 0.5 },
            delay: DelaySpec::Geometric { tau: 4.0 },
            count: 5_000,
            burn_in: BurnInRule::Experiment,
            thin: 0,
            retained: 100_000,
            moments: 2,
            coupled_runs: 50,
            ns: vec![25, 100, 225, 400],
            threads: vec![2, 4, 8, 16],
            writes: 50_000,
            function: None,
        };
        match kind {
            ExperimentKind::Stationarity => {
                cfg.model = ModelSpec::CurieWeiss { n: 8, alpha: 0.5 };
            }
            ExperimentKind::CoupledHamming => {
                cfg.model = ModelSpec::CurieWeiss { n: 200, alpha: 0.5 };
            }
            ExperimentKind::Variance => {
                cfg.ns = vec![50, 100, 200];
            }
            ExperimentKind::DelayProbe | ExperimentKind::TauVsThreads => {
                cfg.ns = (1..=10).map(|k| k * 100).collect();
            }
            _ => {}
        }
        cfg
    }

    pub fn effective_count(&self) -> usize {
        (self.count / self.scale as usize).max(2)
    }

    pub fn effective_retained(&self) -> usize {
        (self.retained / self.scale as usize).max(100)
    }

    pub fn effective_coupled_runs(&self) -> usize {
        (self.coupled_runs / self.scale as usize).max(2)
    }

    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind = {}", self.kind.name());
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out.display());
        let _ = writeln!(s, "scale = {}", self.scale);
        let _ = writeln!(s);
        let _ = writeln!(s, "[model]");
        match &self.model {
            ModelSpec::CurieWeiss { n, alpha } => {
                let _ = writeln!(s, "type = curie_weiss");
                let _ = writeln!(s, "n = {n}");
                let _ = writeln!(s, "alpha = {alpha}");
            }
            ModelSpec::TorusGrid { k, alpha } => {
                let _ = writeln!(s, "type = torus_grid");
                let _ = writeln!(s, "k = {k}");
                let _ = writeln!(s, "alpha = {alpha}");
            }
            ModelSpec::File { path } => {
                let _ = writeln!(s, "type = file");
                let _ = writeln!(s, "path = {}", path.display());
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[delay]");
        match &self.delay {
            DelaySpec::Constant { value } => {
                let _ = writeln!(s, "family = constant");
                let _ = writeln!(s, "value = {value}");
            }
            DelaySpec::UniformInt { max } => {
                let _ = writeln!(s, "family = uniform");
                let _ = writeln!(s, "max = {max}");
            }
            DelaySpec::Geometric { tau } => {
                let _ = writeln!(s, "family = geometric");
                let _ = writeln!(s, "tau = {tau}");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "count = {}", self.count);
        let _ = writeln!(s, "burn_in = {}", self.burn_in.serialize());
        let _ = writeln!(s, "thin = {}", self.thin);
        let _ = writeln!(s, "retained = {}", self.retained);
        let _ = writeln!(s, "moments = {}", self.moments);
        let _ = writeln!(s, "coupled_runs = {}", self.coupled_runs);
        let _ = writeln!(s, "ns = {}", join(&self.ns));
        let _ = writeln!(s, "threads = {}", join(&self.threads));
        let _ = writeln!(s, "writes = {}", self.writes);
        if let Some(path) = &self.function {
            let _ = writeln!(s, "function = {}", path.display());
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut kind = None;
        let mut cfg_fields: Vec<(String, String, String, usize)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("line {lineno}: malformed section header `{line}`"))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {lineno}: expected `key = value`, got `{line}`"))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if section.is_empty() && key == "kind" {
                kind = Some(ExperimentKind::parse(&value).context(format!("line {lineno}"))?);
            } else {
                cfg_fields.push((section.clone(), key, value, lineno));
            }
        }
        let kind = kind.ok_or_else(|| anyhow!("missing `kind` field"))?;
        let mut cfg = ExperimentConfig::default_for(kind);
        let mut model_fields: Vec<(String, String, usize)> = Vec::new();
        let mut delay_fields: Vec<(String, String, usize)> = Vec::new();
        for (section, key, value, lineno) in cfg_fields {
            let fail = |what: &str| anyhow!("line {lineno}: {what}");
            match (section.as_str(), key.as_str()) {
                ("", "seed") => cfg.seed = value.parse().map_err(|_| fail("bad seed"))?,
                ("", "out") => cfg.out = PathBuf::from(value),
                ("", "scale") => {
                    cfg.scale = value.parse().map_err(|_| fail("bad scale"))?;
                    if cfg.scale == 0 {
                        bail!("line {lineno}: scale must be at least 1");
                    }
                }
                ("model", _) => model_fields.push((key, value, lineno)),
                ("delay", _) => delay_fields.push((key, value, lineno)),
                ("run", "count") => cfg.count = value.parse().map_err(|_| fail("bad count"))?,
                ("run", "burn_in") => cfg.burn_in = BurnInRule::parse(&value)?,
                ("run", "thin") => cfg.thin = value.parse().map_err(|_| fail("bad thin"))?,
                ("run", "retained") => {
                    cfg.retained = value.parse().map_err(|_| fail("bad retained"))?
                }
                ("run", "moments") => cfg.moments = value.parse().map_err(|_| fail("bad moments"))?,
                ("run", "coupled_runs") => {
                    cfg.coupled_runs = value.parse().map_err(|_| fail("bad coupled_runs"))?
                }
                ("run", "ns") => cfg.ns = parse_list(&value).map_err(|_| fail("bad ns list"))?,
                ("run", "threads") => {
                    cfg.threads = parse_list(&value).map_err(|_| fail("bad threads list"))?
                }
                ("run", "writes") => cfg.writes = value.parse().map_err(|_| fail("bad writes"))?,
                ("run", "function") => cfg.function = Some(PathBuf::from(value)),
                (sec, key) => bail!("line {lineno}: unknown field `{key}` in section `[{sec}]`"),
            }
        }
        if !model_fields.is_empty() {
            cfg.model = parse_model_spec(&model_fields)?;
        }
        if !delay_fields.is_empty() {
            cfg.delay = parse_delay_spec(&delay_fields)?;
        }
        if cfg.count == 0 {
            bail!("run count must be at least 1");
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        ExperimentConfig::parse(&text)
            .with_context(|| format!("in config {}", path.display()))
    }
}

fn parse_model_spec(fields: &[(String, String, usize)]) -> Result<ModelSpec> {
    let get = |name: &str| fields.iter().find(|(k, _, _)| k == name).map(|(_, v, _)| v);
    let ty = get("type").ok_or_else(|| anyhow!("[model] section missing `type`"))?;
    match ty.as_str() {
        "curie_weiss" => Ok(ModelSpec::CurieWeiss {
            n: get("n")
                .ok_or_else(|| anyhow!("[model] curie_weiss needs `n`"))?
                .parse()?,
            alpha: get("alpha")
                .ok_or_else(|| anyhow!("[model] curie_weiss needs `alpha`"))?
                .parse()?,
        }),
        "torus_grid" => Ok(ModelSpec::TorusGrid {
            k: get("k")
                .ok_or_else(|| anyhow!("[model] torus_grid needs `k`"))?
                .parse()?,
            alpha: get("alpha")
                .ok_or_else(|| anyhow!("[model] torus_grid needs `alpha`"))?
                .parse()?,
        }),
        "file" => Ok(ModelSpec::File {
            path: PathBuf::from(
                get("path").ok_or_else(|| anyhow!("[model] file needs `path`"))?,
            ),
        }),
        other => bail!("unknown model type `{other}`"),
    }
}

fn parse_delay_spec(fields: &[(String, String, usize)]) -> Result<DelaySpec> {
    let get = |name: &str| fields.iter().find(|(k, _, _)| k == name).map(|(_, v, _)| v);
    let family = get("family").ok_or_else(|| anyhow!("[delay] section missing `family`"))?;
    match family.as_str() {
        "constant" => Ok(DelaySpec::Constant {
            value: get("value")
                .ok_or_else(|| anyhow!("[delay] constant needs `value`"))?
                .parse()?,
        }),
        "uniform" => Ok(DelaySpec::UniformInt {
            max: get("max")
                .ok_or_else(|| anyhow!("[delay] uniform needs `max`"))?
                .parse()?,
        }),
        "geometric" => Ok(DelaySpec::Geometric {
            tau: get("tau")
                .ok_or_else(|| anyhow!("[delay] geometric needs `tau`"))?
                .parse()?,
        }),
        other => bail!("unknown delay family `{other}`"),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Debug,
{
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|e| anyhow!("bad list element `{tok}`: {e:?}"))
        })
        .collect()
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
