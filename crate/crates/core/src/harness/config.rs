use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::besov::{BesovQuadrature, QExponent, SupGrid};
use crate::error::{Error, Result};
use crate::quadrature::TimeQuadrature;

/// Report serialization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Config(format!("unknown format `{other}` (json, csv, text)"))),
        }
    }
}

/// Pass/fail thresholds used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub orthonormality: f64,
    pub mehler: f64,
    pub subordination: f64,
    pub kernel: f64,
    /// Relative, per coefficient.
    pub operator: f64,
    pub c_half: f64,
    pub inversion: f64,
    pub monotone: f64,
    pub kdecay_stability: f64,
    pub forward_difference: f64,
    pub difference_identity: f64,
    pub hardy: f64,
    pub refinement: f64,
    pub scaling: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            orthonormality: 1e-10,
            mehler: 1e-8,
            subordination: 1e-6,
            kernel: 1e-6,
            operator: 1e-6,
            c_half: 1e-7,
            inversion: 1e-12,
            monotone: crate::besov::MONOTONE_SLACK,
            kdecay_stability: 1e-2,
            forward_difference: 1e-9,
            difference_identity: 1e-5,
            hardy: 1e-6,
            refinement: 5e-3,
            scaling: 1e-12,
        }
    }
}

impl Tolerances {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "orthonormality" => &mut self.orthonormality,
            "mehler" => &mut self.mehler,
            "subordination" => &mut self.subordination,
            "kernel" => &mut self.kernel,
            "operator" => &mut self.operator,
            "c_half" => &mut self.c_half,
            "inversion" => &mut self.inversion,
            "monotone" => &mut self.monotone,
            "kdecay_stability" => &mut self.kdecay_stability,
            "forward_difference" => &mut self.forward_difference,
            "difference_identity" => &mut self.difference_identity,
            "hardy" => &mut self.hardy,
            "refinement" => &mut self.refinement,
            "scaling" => &mut self.scaling,
            _ => return None,
        })
    }

    fn entries(&self) -> [(&'static str, f64); 14] {
        [
            ("orthonormality", self.orthonormality),
            ("mehler", self.mehler),
            ("subordination", self.subordination),
            ("kernel", self.kernel),
            ("operator", self.operator),
            ("c_half", self.c_half),
            ("inversion", self.inversion),
            ("monotone", self.monotone),
            ("kdecay_stability", self.kdecay_stability),
            ("forward_difference", self.forward_difference),
            ("difference_identity", self.difference_identity),
            ("hardy", self.hardy),
            ("refinement", self.refinement),
            ("scaling", self.scaling),
        ]
    }
}

/// Settings shared by every experiment.
///
/// File grammar, one entry per line:
///
/// ```text
/// # comment
/// seed = 7
/// dimension = 1
/// alpha = 0.5, 0.9
/// q = 2, inf
/// tol.inversion = 1e-12
/// ```
///
/// Keys: `seed`, `dimension`, `family_size`, `max_degree`, `alpha`, `beta`,
/// `p`, `q`, `grid_nodes`, `v_min`, `v_max`, `n_points`, `out`, `format` and
/// `tol.<name>` for any field of [`Tolerances`]. The parameter lists drive
/// the boundedness experiments (`beta` also the inversion and operator
/// checks); unset lists fall back to per-experiment defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub dimension: usize,
    pub family_size: usize,
    pub max_degree: u32,
    pub alpha: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<QExponent>>,
    /// Spatial nodes per axis; `None` picks the grid from degree and `p`.
    pub grid_nodes: Option<usize>,
    pub v_min: f64,
    pub v_max: f64,
    pub n_points: usize,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let time = BesovQuadrature::default().time;
        ExperimentConfig {
            seed: 7,
            dimension: 1,
            family_size: 50,
            max_degree: 8,
            alpha: None,
            beta: None,
            p: None,
            q: None,
            grid_nodes: None,
            v_min: time.v_min(),
            v_max: time.v_max(),
            n_points: time.n_points(),
            tolerances: Tolerances::default(),
            out: None,
            format: OutputFormat::Json,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(|s| parse(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("`{key}`: empty list")));
    }
    Ok(items)
}

fn parse_q(value: &str) -> Result<QExponent> {
    let v = value.trim();
    if v == "inf" || v == "∞" {
        Ok(QExponent::Infinite)
    } else {
        Ok(QExponent::Finite(parse("q", v)?))
    }
}

fn join<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Defaults overridden by the entries of a config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Sets one key, as from a config line or a `--set key=value` flag.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse(key, value)?,
            "dimension" => self.dimension = parse(key, value)?,
            "family_size" => self.family_size = parse(key, value)?,
            "max_degree" => self.max_degree = parse(key, value)?,
            "alpha" => self.alpha = Some(parse_list(key, value)?),
            "beta" => self.beta = Some(parse_list(key, value)?),
            "p" => self.p = Some(parse_list(key, value)?),
            "q" => self.q = Some(value.split(',').map(parse_q).collect::<Result<_>>()?),
            "grid_nodes" => self.grid_nodes = Some(parse(key, value)?),
            "v_min" => self.v_min = parse(key, value)?,
            "v_max" => self.v_max = parse(key, value)?,
            "n_points" => self.n_points = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            _ => {
                let slot = key
                    .strip_prefix("tol.")
                    .and_then(|name| self.tolerances.slot(name))
                    .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
                *slot = parse(key, value)?;
            }
        }
        Ok(())
    }

    /// Checks the settings every experiment depends on.
    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dimension) {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {}", self.dimension)));
        }
        if self.family_size == 0 {
            return Err(Error::Config("family_size must be at least 1".into()));
        }
        self.besov_quadrature()?;
        Ok(())
    }

    pub fn besov_quadrature(&self) -> Result<BesovQuadrature> {
        Ok(BesovQuadrature {
            time: TimeQuadrature::new(self.v_min, self.v_max, self.n_points)?,
            sup: SupGrid::default(),
        })
    }

    /// Every setting that influences results, one `key=value` per line in a
    /// fixed order; hashed into report provenance.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "dimension={}", self.dimension);
        let _ = writeln!(s, "family_size={}", self.family_size);
        let _ = writeln!(s, "max_degree={}", self.max_degree);
        let opt = |v: &Option<Vec<f64>>| v.as_deref().map(join).unwrap_or_else(|| "default".into());
        let _ = writeln!(s, "alpha={}", opt(&self.alpha));
        let _ = writeln!(s, "beta={}", opt(&self.beta));
        let _ = writeln!(s, "p={}", opt(&self.p));
        let q = self.q.as_deref().map(join).unwrap_or_else(|| "default".into());
        let _ = writeln!(s, "q={q}");
        let nodes = self.grid_nodes.map(|m| m.to_string()).unwrap_or_else(|| "auto".into());
        let _ = writeln!(s, "grid_nodes={nodes}");
        let _ = writeln!(s, "v_min={:e}", self.v_min);
        let _ = writeln!(s, "v_max={:e}", self.v_max);
        let _ = writeln!(s, "n_points={}", self.n_points);
        for (name, v) in self.tolerances.entries() {
            let _ = writeln!(s, "tol.{name}={v:e}");
        }
        s
    }
}
