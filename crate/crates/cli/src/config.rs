//! Scenario files: TOML with one section per block, checked in full before
//! anything runs.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::path::PathBuf;

use lindblad_speed::models::{
    bec_model, dephasing_model, pt_model, su2_coherent_state, BECParams, DephasingParams,
    HusimiSpec, PTParams,
};
use lindblad_speed::{
    gell_mann_basis, unembed, BlochVector, CMatrix, DensityMatrix, HermitianOperator,
    LindbladModel, C,
};
use toml::{Table, Value};

/// Largest dimension for which outputs expanded over the full operator
/// basis (and the affine backend) are offered.
pub const MAX_BASIS_DIM: usize = 8;

const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Speed,
    Spectrum,
    Husimi,
    Navigate,
    Trajectory,
}

impl Output {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "speed" => Self::Speed,
            "spectrum" => Self::Spectrum,
            "husimi" => Self::Husimi,
            "navigate" => Self::Navigate,
            "trajectory" => Self::Trajectory,
            _ => return None,
        })
    }

    fn needs_basis(self) -> bool {
        matches!(self, Self::Spectrum | Self::Navigate | Self::Trajectory)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendChoice {
    /// Affine for dimensions up to [`MAX_BASIS_DIM`], operator above.
    Auto,
    Affine,
    Operator,
}

impl BackendChoice {
    pub fn uses_affine(self, dim: usize) -> bool {
        match self {
            Self::Auto => dim <= MAX_BASIS_DIM,
            Self::Affine => true,
            Self::Operator => false,
        }
    }
}

/// One trajectory to compute. Sweeps produce several.
#[derive(Clone, Debug)]
pub struct RunSpec {
    /// File name suffix, empty without a sweep.
    pub label: String,
    pub model: LindbladModel<f64>,
    pub rho0: DensityMatrix<f64>,
    /// Set for the condensate model, enables the coherence column.
    pub n_particles: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub runs: Vec<RunSpec>,
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
    pub outputs: Vec<Output>,
    pub output_dir: PathBuf,
    pub backend: BackendChoice,
    pub max_step_norm: Option<f64>,
    pub husimi_times: Vec<f64>,
    pub husimi_spec: HusimiSpec,
    /// Re-evaluate the best-perturbation norm at every sample.
    pub navigate_path: bool,
}

impl Scenario {
    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}

/// Parses `section.key=value` and stores it in `table`. The value is read as
/// a TOML value when possible and as a bare string otherwise.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<String, String> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override `{assignment}` is not of the form key=value"))?;
    let path = path.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("override key `{path}` is malformed"));
    }
    let mut cursor = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cursor = match entry {
            Value::Table(t) => t,
            _ => return Err(format!("override key `{path}`: `{part}` is not a section")),
        };
    }
    cursor.insert(parts[parts.len() - 1].to_string(), value);
    Ok(path.to_string())
}

/// Parses `text`, applies `overrides` and checks the whole scenario.
pub fn load(text: &str, overrides: &[String], output_dir: Option<PathBuf>) -> Result<Scenario, Vec<Diagnostic>> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
        vec![Diagnostic {
            line,
            path: "(syntax)".into(),
            message: e.message().to_string(),
        }]
    })?;
    let mut overridden = BTreeSet::new();
    let mut diags = Vec::new();
    for o in overrides {
        match apply_override(&mut table, o) {
            Ok(p) => {
                overridden.insert(p);
            }
            Err(message) => diags.push(Diagnostic {
                line: None,
                path: "--set".into(),
                message,
            }),
        }
    }
    let mut checker = Checker {
        locator: Locator::new(text, overridden),
        diags,
    };
    let scenario = checker.scenario(&table, output_dir);
    checker.diags.sort_by_key(|d| d.line.unwrap_or(usize::MAX));
    match scenario {
        Some(s) if checker.diags.is_empty() => Ok(s),
        _ => Err(checker.diags),
    }
}

struct Locator<'a> {
    lines: Vec<&'a str>,
    overridden: BTreeSet<String>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

impl<'a> Locator<'a> {
    fn new(text: &'a str, overridden: BTreeSet<String>) -> Self {
        Self {
            lines: text.lines().collect(),
            overridden,
        }
    }

    fn header_index(&self, section: &str, index: Option<usize>) -> Option<usize> {
        let want = match index {
            Some(_) => format!("[[{section}]]"),
            None => format!("[{section}]"),
        };
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, l)| strip_comment(l).replace(' ', "") == want)
            .nth(index.unwrap_or(0))
            .map(|(i, _)| i)
    }

    fn key_index(&self, section: &Sec, key: &str) -> Option<usize> {
        let start = if section.header.is_empty() {
            0
        } else {
            self.header_index(&section.header, section.index)? + 1
        };
        for (i, line) in self.lines.iter().enumerate().skip(start) {
            let l = strip_comment(line);
            if l.starts_with('[') {
                break;
            }
            if let Some(rest) = l.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i);
                }
            }
        }
        None
    }

    /// 1-based line for a key, falling back to its own sub-table header and
    /// then to the enclosing section header.
    fn line(&self, section: &Sec, key: Option<&str>) -> Option<usize> {
        let found = match key {
            Some(k) => self.key_index(section, k).or_else(|| {
                let sub = if section.header.is_empty() {
                    k.to_string()
                } else {
                    format!("{}.{k}", section.header)
                };
                self.header_index(&sub, None)
            }),
            None => None,
        };
        found
            .or_else(|| {
                if section.header.is_empty() {
                    None
                } else {
                    self.header_index(&section.header, section.index)
                }
            })
            .map(|i| i + 1)
    }
}

/// A table being checked, with where it lives in the file.
#[derive(Clone)]
struct Sec<'t> {
    /// Dotted header, empty for the top level.
    header: String,
    index: Option<usize>,
    table: &'t Table,
}

impl<'t> Sec<'t> {
    fn path(&self, key: &str) -> String {
        let base = match self.index {
            Some(i) => format!("{}[{i}]", self.header),
            None => self.header.clone(),
        };
        if base.is_empty() {
            key.to_string()
        } else if key.is_empty() {
            base
        } else {
            format!("{base}.{key}")
        }
    }
}

struct Checker<'a> {
    locator: Locator<'a>,
    diags: Vec<Diagnostic>,
}

enum Kind {
    Dephasing,
    Pt,
    Bec,
    Custom,
}

impl Kind {
    fn keys(&self) -> &'static [&'static str] {
        match self {
            Self::Dephasing | Self::Pt => &["kind", "g", "gamma"],
            Self::Bec => &["kind", "omega", "u", "gamma", "n_particles", "theta", "phi"],
            Self::Custom => &["kind", "hamiltonian", "lindblad"],
        }
    }

    fn sweepable(&self) -> &'static [&'static str] {
        match self {
            Self::Custom => &[],
            _ => &self.keys()[1..],
        }
    }
}

/// Result of building a model: the operator form plus what the initial
/// state needs to know about it.
struct Built {
    model: LindbladModel<f64>,
    bec: Option<BECParams<f64>>,
}

impl<'a> Checker<'a> {
    fn error(&mut self, sec: &Sec, key: Option<&str>, message: impl Into<String>) {
        let path = sec.path(key.unwrap_or(""));
        let (line, message) = if self.locator.overridden.contains(&path) {
            (None, format!("{} (set on the command line)", message.into()))
        } else {
            (self.locator.line(sec, key), message.into())
        };
        self.diags.push(Diagnostic { line, path, message });
    }

    fn section<'t>(&mut self, parent: &Sec<'t>, key: &str, required: bool) -> Option<Sec<'t>> {
        match parent.table.get(key) {
            Some(Value::Table(t)) => Some(Sec {
                header: parent.path(key),
                index: None,
                table: t,
            }),
            Some(_) => {
                self.error(parent, Some(key), "expected a section");
                None
            }
            None => {
                if required {
                    self.error(parent, Some(key), "missing required section");
                }
                None
            }
        }
    }

    fn known_keys(&mut self, sec: &Sec, allowed: &[&str]) {
        for key in sec.table.keys() {
            if !allowed.contains(&key.as_str()) {
                let msg = format!("unknown key (expected one of: {})", allowed.join(", "));
                self.error(sec, Some(key), msg);
            }
        }
    }

    fn number(&mut self, sec: &Sec, key: &str) -> Option<f64> {
        match self.opt_number(sec, key) {
            Some(v) => v,
            None => {
                self.error(sec, Some(key), "missing required field");
                None
            }
        }
    }

    /// Outer `None` when absent, inner `None` when present but invalid.
    fn opt_number(&mut self, sec: &Sec, key: &str) -> Option<Option<f64>> {
        let v = sec.table.get(key)?;
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            _ => {
                self.error(sec, Some(key), "expected a number");
                return Some(None);
            }
        };
        if !x.is_finite() {
            self.error(sec, Some(key), "must be finite");
            return Some(None);
        }
        Some(Some(x))
    }

    fn rate(&mut self, sec: &Sec, key: &str) -> Option<f64> {
        let x = self.number(sec, key)?;
        if x < 0.0 {
            self.error(sec, Some(key), format!("must be non-negative, got {x}"));
            return None;
        }
        Some(x)
    }

    fn count(&mut self, sec: &Sec, key: &str, min: usize) -> Option<Option<usize>> {
        let v = sec.table.get(key)?;
        match v {
            Value::Integer(i) if *i >= min as i64 => Some(Some(*i as usize)),
            Value::Integer(i) => {
                self.error(sec, Some(key), format!("must be at least {min}, got {i}"));
                Some(None)
            }
            _ => {
                self.error(sec, Some(key), "expected an integer");
                Some(None)
            }
        }
    }

    fn string<'t>(&mut self, sec: &Sec<'t>, key: &str) -> Option<Option<&'t str>> {
        match sec.table.get(key)? {
            Value::String(s) => Some(Some(s.as_str())),
            _ => {
                self.error(sec, Some(key), "expected a string");
                Some(None)
            }
        }
    }

    fn numbers(&mut self, sec: &Sec, key: &str) -> Option<Vec<f64>> {
        let Value::Array(items) = sec.table.get(key)? else {
            self.error(sec, Some(key), "expected an array of numbers");
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item {
                Value::Float(x) if x.is_finite() => out.push(*x),
                Value::Integer(i) => out.push(*i as f64),
                _ => {
                    self.error(sec, Some(key), "expected an array of finite numbers");
                    return None;
                }
            }
        }
        Some(out)
    }

    fn angle(&mut self, sec: &Sec, key: &str) -> Option<f64> {
        let x = self.number(sec, key)?;
        let ok = if key == "theta" {
            (0.0..=PI).contains(&x)
        } else {
            (0.0..TAU).contains(&x)
        };
        if !ok {
            let range = if key == "theta" { "[0, pi]" } else { "[0, 2 pi)" };
            self.error(sec, Some(key), format!("{x} is out of range {range}"));
            return None;
        }
        Some(x)
    }

    fn scenario(&mut self, table: &Table, output_dir: Option<PathBuf>) -> Option<Scenario> {
        let root = Sec {
            header: String::new(),
            index: None,
            table,
        };
        self.known_keys(&root, &["model", "initial_state", "time", "output", "husimi", "sweep"]);

        let time = self.section(&root, "time", true);
        let (t_start, t_end, n_samples) = match &time {
            Some(sec) => self.time(sec),
            None => (Some(0.0), None, None),
        };

        let output = self.section(&root, "output", true);
        let (outputs, dir, backend, max_step_norm, navigate_path) = match &output {
            Some(sec) => self.output(sec),
            None => (None, None, Some(BackendChoice::Auto), None, false),
        };
        let output_dir = output_dir
            .or(dir)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));

        let husimi = self.section(&root, "husimi", false);
        let (husimi_times, husimi_spec) = match &husimi {
            Some(sec) => self.husimi(sec, t_start, t_end),
            None => (None, HusimiSpec::default()),
        };
        let wants_husimi = outputs.as_ref().is_some_and(|o| o.contains(&Output::Husimi));
        let times_given = husimi.as_ref().is_some_and(|h| h.table.contains_key("times"));
        if wants_husimi && !times_given {
            let out_sec = output.clone().expect("outputs come from the output section");
            self.error(&out_sec, Some("outputs"), "`husimi` needs `times` in a [husimi] section");
        }

        let runs = self.runs(&root);

        if let (Some(outputs), Some(runs)) = (&outputs, &runs) {
            let out_sec = output.clone().expect("outputs come from the output section");
            let max_dim = runs.iter().map(|r| r.model.dim()).max().unwrap_or(0);
            if max_dim > MAX_BASIS_DIM {
                for o in outputs.iter().filter(|o| o.needs_basis()) {
                    let msg = format!(
                        "`{}` needs dimension at most {MAX_BASIS_DIM}, model has {max_dim}",
                        format!("{o:?}").to_lowercase()
                    );
                    self.error(&out_sec, Some("outputs"), msg);
                }
                if backend == Some(BackendChoice::Affine) {
                    let msg = format!("affine backend needs dimension at most {MAX_BASIS_DIM}, model has {max_dim}");
                    self.error(&out_sec, Some("backend"), msg);
                }
            }
        }

        Some(Scenario {
            runs: runs?,
            t_start: t_start?,
            t_end: t_end?,
            n_samples: n_samples?,
            outputs: outputs?,
            output_dir,
            backend: backend?,
            max_step_norm,
            husimi_times: husimi_times.unwrap_or_default(),
            husimi_spec,
            navigate_path,
        })
    }

    fn time(&mut self, sec: &Sec) -> (Option<f64>, Option<f64>, Option<usize>) {
        self.known_keys(sec, &["t_start", "t_end", "n_samples"]);
        let t_start = self.opt_number(sec, "t_start").unwrap_or(Some(0.0));
        let mut t_end = self.number(sec, "t_end");
        if let (Some(a), Some(b)) = (t_start, t_end) {
            if b <= a {
                self.error(sec, Some("t_end"), format!("must exceed t_start = {a}, got {b}"));
                t_end = None;
            }
        }
        let n_samples = match self.count(sec, "n_samples", 2) {
            Some(n) => n,
            None => {
                self.error(sec, Some("n_samples"), "missing required field");
                None
            }
        };
        (t_start, t_end, n_samples)
    }

    #[allow(clippy::type_complexity)]
    fn output(
        &mut self,
        sec: &Sec,
    ) -> (Option<Vec<Output>>, Option<PathBuf>, Option<BackendChoice>, Option<f64>, bool) {
        self.known_keys(sec, &["outputs", "dir", "backend", "max_step_norm", "navigate_path"]);
        let outputs = match sec.table.get("outputs") {
            Some(Value::Array(items)) => {
                let mut seen = Vec::new();
                let mut ok = true;
                for item in items {
                    match item.as_str().and_then(Output::parse) {
                        Some(o) if !seen.contains(&o) => seen.push(o),
                        Some(_) => {
                            self.error(sec, Some("outputs"), format!("duplicate entry {item}"));
                            ok = false;
                        }
                        None => {
                            let msg = format!(
                                "unknown output {item} (expected speed, spectrum, husimi, navigate or trajectory)"
                            );
                            self.error(sec, Some("outputs"), msg);
                            ok = false;
                        }
                    }
                }
                if seen.is_empty() && ok {
                    self.error(sec, Some("outputs"), "must list at least one output");
                    ok = false;
                }
                seen.sort();
                ok.then_some(seen)
            }
            Some(_) => {
                self.error(sec, Some("outputs"), "expected an array of strings");
                None
            }
            None => {
                self.error(sec, Some("outputs"), "missing required field");
                None
            }
        };
        let dir = self.string(sec, "dir").flatten().map(PathBuf::from);
        let backend = match self.string(sec, "backend") {
            None => Some(BackendChoice::Auto),
            Some(None) => None,
            Some(Some(s)) => match s {
                "auto" => Some(BackendChoice::Auto),
                "affine" => Some(BackendChoice::Affine),
                "operator" => Some(BackendChoice::Operator),
                other => {
                    let msg = format!("unknown backend \"{other}\" (expected auto, affine or operator)");
                    self.error(sec, Some("backend"), msg);
                    None
                }
            },
        };
        let max_step_norm = match self.opt_number(sec, "max_step_norm") {
            Some(Some(x)) if x > 0.0 => Some(x),
            Some(Some(x)) => {
                self.error(sec, Some("max_step_norm"), format!("must be positive, got {x}"));
                None
            }
            _ => None,
        };
        let navigate_path = match sec.table.get("navigate_path") {
            None => false,
            Some(Value::Boolean(b)) => *b,
            Some(_) => {
                self.error(sec, Some("navigate_path"), "expected true or false");
                false
            }
        };
        (outputs, dir, backend, max_step_norm, navigate_path)
    }

    fn husimi(&mut self, sec: &Sec, t_start: Option<f64>, t_end: Option<f64>) -> (Option<Vec<f64>>, HusimiSpec) {
        self.known_keys(sec, &["times", "theta_samples", "phi_samples"]);
        let mut spec = HusimiSpec::default();
        if let Some(Some(n)) = self.count(sec, "theta_samples", 2) {
            spec.theta_samples = n;
        }
        if let Some(Some(n)) = self.count(sec, "phi_samples", 1) {
            spec.phi_samples = n;
        }
        let times = self.numbers(sec, "times");
        if let (Some(ts), Some(a), Some(b)) = (&times, t_start, t_end) {
            for &t in ts {
                if t < a || t > b {
                    self.error(sec, Some("times"), format!("time {t} lies outside [{a}, {b}]"));
                }
            }
            if ts.is_empty() {
                self.error(sec, Some("times"), "must list at least one time");
            }
        }
        (times, spec)
    }

    fn runs(&mut self, root: &Sec) -> Option<Vec<RunSpec>> {
        let model_sec = self.section(root, "model", true)?;
        let kind = match self.string(&model_sec, "kind") {
            None => {
                self.error(&model_sec, Some("kind"), "missing required field");
                return None;
            }
            Some(None) => return None,
            Some(Some("dephasing")) => Kind::Dephasing,
            Some(Some("pt")) => Kind::Pt,
            Some(Some("bec")) => Kind::Bec,
            Some(Some("custom")) => Kind::Custom,
            Some(Some(other)) => {
                let msg = format!("unknown model \"{other}\" (expected dephasing, pt, bec or custom)");
                self.error(&model_sec, Some("kind"), msg);
                return None;
            }
        };
        self.known_keys(&model_sec, kind.keys());
        let state_sec = self.section(root, "initial_state", false);
        if state_sec.is_none() && !matches!(kind, Kind::Bec) {
            self.error(root, Some("initial_state"), "missing required section");
        }

        let sweep = match self.section(root, "sweep", false) {
            Some(sec) => Some(self.sweep(&sec, &kind)?),
            None => None,
        };
        let Some((param, values, sweep_sec)) = sweep else {
            let built = self.model(&model_sec, &kind);
            let rho0 = self.initial_state(state_sec.as_ref(), built.as_ref());
            let (built, rho0) = (built?, rho0?);
            return Some(vec![RunSpec {
                label: String::new(),
                n_particles: built.bec.map(|p| p.n_particles),
                model: built.model,
                rho0,
            }]);
        };

        let mut runs = Vec::with_capacity(values.len());
        let mut failed = false;
        for v in values {
            let mut table = model_sec.table.clone();
            let value = if param == "n_particles" {
                Value::Integer(v as i64)
            } else {
                Value::Float(v)
            };
            table.insert(param.clone(), value);
            let variant = Sec {
                table: &table,
                ..model_sec.clone()
            };
            let before = self.diags.len();
            let built = self.model(&variant, &kind);
            let rho0 = self.initial_state(state_sec.as_ref(), built.as_ref());
            self.relocate_sweep_errors(before, &model_sec.path(&param), &sweep_sec, &param, v);
            match (built, rho0) {
                (Some(b), Some(rho0)) => runs.push(RunSpec {
                    label: format!("_{param}_{v}"),
                    n_particles: b.bec.map(|p| p.n_particles),
                    model: b.model,
                    rho0,
                }),
                _ => failed = true,
            }
        }
        (!failed).then_some(runs)
    }

    /// Errors raised while building one sweep variant: those about the swept
    /// parameter point at `sweep.values`, the rest are reported once.
    fn relocate_sweep_errors(&mut self, from: usize, swept: &str, sweep: &Sec, param: &str, v: f64) {
        let fresh: Vec<Diagnostic> = self.diags.drain(from..).collect();
        for d in fresh {
            let d = if d.path == swept {
                Diagnostic {
                    line: self.locator.line(sweep, Some("values")),
                    path: sweep.path("values"),
                    message: format!("with {param} = {v}: {}", d.message),
                }
            } else {
                d
            };
            if !self.diags.contains(&d) {
                self.diags.push(d);
            }
        }
    }

    fn sweep<'t>(&mut self, sec: &Sec<'t>, kind: &Kind) -> Option<(String, Vec<f64>, Sec<'t>)> {
        self.known_keys(sec, &["parameter", "values"]);
        let param = match self.string(sec, "parameter") {
            None => {
                self.error(sec, Some("parameter"), "missing required field");
                None
            }
            Some(p) => p,
        };
        let param = param.and_then(|p| {
            if kind.sweepable().contains(&p) {
                Some(p.to_string())
            } else {
                let msg = if kind.sweepable().is_empty() {
                    "custom models have no scalar parameters to sweep".to_string()
                } else {
                    format!("cannot sweep \"{p}\" (expected one of: {})", kind.sweepable().join(", "))
                };
                self.error(sec, Some("parameter"), msg);
                None
            }
        });
        let values = match sec.table.get("values") {
            None => {
                self.error(sec, Some("values"), "missing required field");
                None
            }
            Some(_) => self.numbers(sec, "values"),
        };
        let values = values.and_then(|vs| {
            if vs.is_empty() {
                self.error(sec, Some("values"), "must list at least one value");
                return None;
            }
            if param.as_deref() == Some("n_particles") && vs.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                self.error(sec, Some("values"), "n_particles values must be positive integers");
                return None;
            }
            Some(vs)
        });
        Some((param?, values?, sec.clone()))
    }

    fn model(&mut self, sec: &Sec, kind: &Kind) -> Option<Built> {
        match kind {
            Kind::Dephasing => {
                let g = self.number(sec, "g");
                let gamma = self.rate(sec, "gamma");
                let p = DephasingParams { g: g?, gamma: gamma? };
                self.core(sec, dephasing_model(&p)).map(|model| Built { model, bec: None })
            }
            Kind::Pt => {
                let g = self.number(sec, "g");
                let gamma = self.rate(sec, "gamma");
                let p = PTParams { g: g?, gamma: gamma? };
                self.core(sec, pt_model(&p)).map(|model| Built { model, bec: None })
            }
            Kind::Bec => {
                let omega = self.number(sec, "omega");
                let u = self.rate(sec, "u");
                let gamma = self.rate(sec, "gamma");
                let n_particles = match self.count(sec, "n_particles", 1) {
                    Some(n) => n,
                    None => {
                        self.error(sec, Some("n_particles"), "missing required field");
                        None
                    }
                };
                let theta = self.angle(sec, "theta");
                let phi = self.angle(sec, "phi");
                let p = BECParams {
                    omega: omega?,
                    u: u?,
                    gamma: gamma?,
                    n_particles: n_particles?,
                    theta: theta?,
                    phi: phi?,
                };
                self.core(sec, bec_model(&p)).map(|model| Built { model, bec: Some(p) })
            }
            Kind::Custom => self.custom(sec),
        }
    }

    fn core<T>(&mut self, sec: &Sec, r: lindblad_speed::Result<T>) -> Option<T> {
        r.map_err(|e| self.error(sec, None, e.to_string())).ok()
    }

    fn custom(&mut self, sec: &Sec) -> Option<Built> {
        let h = match sec.table.get("hamiltonian") {
            Some(Value::Table(t)) => {
                let hs = Sec {
                    header: sec.path("hamiltonian"),
                    index: None,
                    table: t,
                };
                self.matrix(&hs)
            }
            Some(_) => {
                self.error(sec, Some("hamiltonian"), "expected a table with `re` and optional `im`");
                None
            }
            None => {
                self.error(sec, Some("hamiltonian"), "missing required field");
                None
            }
        };
        let h = h.and_then(|m| match HermitianOperator::new(m) {
            Ok(h) if h.dim() >= 2 => Some(h),
            Ok(h) => {
                self.error(sec, Some("hamiltonian"), format!("dimension must be at least 2, got {}", h.dim()));
                None
            }
            Err(e) => {
                self.error(sec, Some("hamiltonian"), e.to_string());
                None
            }
        });

        let mut jumps = Vec::new();
        let mut ok = true;
        match sec.table.get("lindblad") {
            None => {}
            Some(Value::Array(items)) => {
                for (i, item) in items.iter().enumerate() {
                    let Value::Table(t) = item else {
                        self.error(sec, Some("lindblad"), "expected an array of tables");
                        ok = false;
                        continue;
                    };
                    let ls = Sec {
                        header: sec.path("lindblad"),
                        index: Some(i),
                        table: t,
                    };
                    match self.matrix(&ls) {
                        Some(m) => {
                            if let Some(h) = &h {
                                if m.dim() != h.dim() {
                                    let msg = format!("dimension {} does not match the Hamiltonian ({})", m.dim(), h.dim());
                                    self.error(&ls, None, msg);
                                    ok = false;
                                }
                            }
                            jumps.push(m);
                        }
                        None => ok = false,
                    }
                }
            }
            Some(_) => {
                self.error(sec, Some("lindblad"), "expected an array of tables ([[model.lindblad]])");
                ok = false;
            }
        }
        let h = h?;
        if !ok {
            return None;
        }
        self.core(sec, LindbladModel::new(h, jumps))
            .map(|model| Built { model, bec: None })
    }

    /// Square complex matrix from `re` and optional `im` row arrays.
    fn matrix(&mut self, sec: &Sec) -> Option<CMatrix<f64>> {
        self.known_keys(sec, &["re", "im"]);
        let re = match sec.table.get("re") {
            Some(_) => self.rows(sec, "re"),
            None => {
                self.error(sec, Some("re"), "missing required field");
                None
            }
        }?;
        let n = re.len();
        let im = match sec.table.get("im") {
            Some(_) => {
                let im = self.rows(sec, "im")?;
                if im.len() != n {
                    self.error(sec, Some("im"), format!("shape {}x{} does not match `re` ({n}x{n})", im.len(), im.len()));
                    return None;
                }
                im
            }
            None => vec![vec![0.0; n]; n],
        };
        let data = re
            .iter()
            .zip(&im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| C::new(a, b)))
            .collect();
        self.core(sec, CMatrix::from_vec(n, data))
    }

    fn rows(&mut self, sec: &Sec, key: &str) -> Option<Vec<Vec<f64>>> {
        let bad = |c: &mut Self| {
            c.error(sec, Some(key), "expected a square array of number rows");
            None
        };
        let Some(Value::Array(rows)) = sec.table.get(key) else {
            return bad(self);
        };
        let n = rows.len();
        let mut out = Vec::with_capacity(n);
        for row in rows {
            let Value::Array(items) = row else {
                return bad(self);
            };
            if items.len() != n {
                return bad(self);
            }
            let mut r = Vec::with_capacity(n);
            for x in items {
                match x {
                    Value::Float(v) if v.is_finite() => r.push(*v),
                    Value::Integer(i) => r.push(*i as f64),
                    _ => return bad(self),
                }
            }
            out.push(r);
        }
        if n == 0 {
            return bad(self);
        }
        Some(out)
    }

    /// Without a model only the schema of the section is checked.
    fn initial_state(&mut self, sec: Option<&Sec>, built: Option<&Built>) -> Option<DensityMatrix<f64>> {
        let n = built.map(|b| b.model.dim());
        let Some(sec) = sec else {
            let p = built?.bec.as_ref()?;
            return Some(p.initial_state().expect("validated parameters"));
        };
        self.known_keys(sec, &["kind", "name", "components", "theta", "phi"]);
        let kind = match self.string(sec, "kind") {
            None => {
                self.error(sec, Some("kind"), "missing required field");
                return None;
            }
            Some(k) => k?,
        };
        match kind {
            "named" => {
                let name = match self.string(sec, "name") {
                    None => {
                        self.error(sec, Some("name"), "missing required field");
                        return None;
                    }
                    Some(s) => s?,
                };
                if !["up", "down", "plus", "minus", "mixed"].contains(&name) {
                    let msg = format!("unknown state \"{name}\" (expected up, down, plus, minus or mixed)");
                    self.error(sec, Some("name"), msg);
                    return None;
                }
                let n = n?;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let state = match name {
                    "up" => DensityMatrix::basis_state(n, 0),
                    "down" => DensityMatrix::basis_state(n, n - 1),
                    "mixed" => DensityMatrix::maximally_mixed(n),
                    _ if n == 2 => {
                        let sign = if name == "plus" { s } else { -s };
                        DensityMatrix::from_pure(&[C::new(s, 0.0), C::new(sign, 0.0)])
                    }
                    _ => {
                        self.error(sec, Some("name"), format!("\"{name}\" is only defined for dimension 2, model has {n}"));
                        return None;
                    }
                };
                self.core(sec, state)
            }
            "bloch" => {
                let comps = match sec.table.get("components") {
                    None => {
                        self.error(sec, Some("components"), "missing required field");
                        return None;
                    }
                    Some(_) => self.numbers(sec, "components")?,
                };
                let n = n?;
                if n > MAX_BASIS_DIM {
                    self.error(sec, Some("kind"), format!("Bloch components need dimension at most {MAX_BASIS_DIM}, model has {n}"));
                    return None;
                }
                if comps.len() != n * n - 1 {
                    let msg = format!("expected {} components for dimension {n}, got {}", n * n - 1, comps.len());
                    self.error(sec, Some("components"), msg);
                    return None;
                }
                let r = match BlochVector::new(n, comps) {
                    Ok(r) => r,
                    Err(e) => {
                        self.error(sec, Some("components"), format!("unphysical initial state: {e}"));
                        return None;
                    }
                };
                let basis = gell_mann_basis(n).expect("dimension at least 2");
                match unembed(&r, &basis) {
                    Ok(rho) => Some(rho),
                    Err(e) => {
                        self.error(sec, Some("components"), format!("unphysical initial state: {e}"));
                        None
                    }
                }
            }
            "coherent" => {
                let theta = self.angle(sec, "theta");
                let phi = self.angle(sec, "phi");
                let psi = su2_coherent_state(n? - 1, theta?, phi?);
                self.core(sec, psi.and_then(|psi| DensityMatrix::from_pure(&psi)))
            }
            other => {
                let msg = format!("unknown initial state kind \"{other}\" (expected named, bloch or coherent)");
                self.error(sec, Some("kind"), msg);
                None
            }
        }
    }
}
