//! Run configuration: `[section]` headers, `key = value` lines, `#` comments.
//!
//! ```text
//! [problem]
//! p = 4
//! a = 0.5
//!
//! [potential]
//! kind = zero
//!
//! [grid]
//! kind = radial
//! n = 2048
//! widths = 40
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::energy::ProblemParams;
use crate::error::{Error, Result};
use crate::mesh::{BoxGrid, Grid, RadialGrid};
use crate::potentials::PotentialSpec;
use crate::solver::{auto_radial_grid, GroundStateOptions, HomotopyLeg, HomotopySchedule, NewtonOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridConfig {
    /// `r_max` given directly.
    Radial { n: usize, r_max: f64 },
    /// `r_max = widths·σ*` with `σ*` the Gaussian width of the problem.
    RadialAuto { n: usize, widths: f64 },
    /// Cube `[-L, L]³`.
    Box { n: usize, half_width: f64 },
}

impl GridConfig {
    pub fn build(&self, params: &ProblemParams) -> Result<Grid> {
        Ok(match *self {
            GridConfig::Radial { n, r_max } => RadialGrid::new(r_max, n)?.into(),
            GridConfig::RadialAuto { n, widths } => auto_radial_grid(params, n, widths)?.into(),
            GridConfig::Box { n, half_width } => BoxGrid::new(half_width, n)?.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol_newton: f64,
    pub max_newton: usize,
    pub descent_step: f64,
    pub max_descent: usize,
    pub legs: HomotopySchedule,
    /// Radial nodes of the reference autonomous solve used for `c_a` on boxes.
    pub reference_n: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let g = GroundStateOptions::default();
        Self {
            tol_newton: g.newton.tol,
            max_newton: g.newton.max_iter,
            descent_step: g.descent_step,
            max_descent: g.max_descent,
            legs: HomotopySchedule::default(),
            reference_n: 16384,
        }
    }
}

impl SolverConfig {
    pub fn ground_state_options(&self, seed: Option<u64>) -> GroundStateOptions {
        GroundStateOptions {
            newton: self.newton_options(),
            descent_step: self.descent_step,
            max_descent: self.max_descent,
            seed,
            ..GroundStateOptions::default()
        }
    }

    pub fn newton_options(&self) -> NewtonOptions {
        NewtonOptions { tol: self.tol_newton, max_iter: self.max_newton, ..NewtonOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub emit_svg: bool,
    pub seed: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), emit_svg: false, seed: 0 }
    }
}

/// Inputs of `check-potential` that the potential itself does not fix.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub theta: f64,
    pub eta: f64,
    pub q: f64,
    /// Embedding constant; the Gaussian lower bound when absent.
    pub c_q: Option<f64>,
    pub alpha: f64,
    pub delta: f64,
    pub radii: Vec<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { theta: 0.3, eta: 0.3, q: 3.0, c_q: None, alpha: 1.0, delta: 0.5, radii: vec![10.0, 20.0, 40.0, 80.0] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub potential: PotentialSpec,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
    pub check: CheckConfig,
    /// Mass ladder of `sweep`.
    pub sweep: Vec<f64>,
}

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

const SECTIONS: [(&str, &[&str]); 7] = [
    ("problem", &["p", "a", "s"]),
    ("potential", &["kind", "c", "alpha", "beta", "sigma", "amplitude", "base", "file", "scale"]),
    ("grid", &["kind", "n", "r_max", "widths", "L"]),
    ("solver", &["tol_newton", "max_newton", "descent_step", "max_descent", "legs", "reference_n"]),
    ("output", &["directory", "emit_svg", "seed"]),
    ("check", &["theta", "eta", "q", "c_q", "alpha", "delta", "radii"]),
    ("sweep", &["a"]),
];

fn err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Config { line, message: message.into() })
}

fn tokenize(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(line, format!("malformed section header '{body}'"));
            };
            let name = name.trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return err(line, format!("unknown section [{name}]"));
            }
            if sections.contains_key(name) {
                return err(line, format!("duplicate section [{name}]"));
            }
            sections.insert(name.to_string(), Section { line, entries: BTreeMap::new() });
            current = Some(name.to_string());
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return err(line, format!("expected 'key = value', got '{body}'"));
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(sec) = current.as_ref() else {
            return err(line, format!("key '{k}' outside of any section"));
        };
        let allowed = SECTIONS.iter().find(|(s, _)| s == sec).map(|(_, keys)| *keys).unwrap_or(&[]);
        if !allowed.contains(&k) {
            return err(line, format!("unknown key '{k}' in [{sec}]"));
        }
        if v.is_empty() {
            return err(line, format!("key '{k}' has no value"));
        }
        let entries = &mut sections.get_mut(sec).expect("section exists").entries;
        if let Some(prev) = entries.get(k) {
            return err(line, format!("duplicate key '{k}' in [{sec}] (first set on line {})", prev.line));
        }
        entries.insert(k.to_string(), Entry { value: unquote(v).to_string(), line });
    }
    Ok(sections)
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v)
}

/// Typed access to one section.
struct View<'a> {
    name: &'static str,
    sec: Option<&'a Section>,
}

impl<'a> View<'a> {
    fn entry(&self, key: &str) -> Option<&'a Entry> {
        self.sec.and_then(|s| s.entries.get(key))
    }

    fn line(&self) -> usize {
        self.sec.map_or(0, |s| s.line)
    }

    fn has(&self, key: &str) -> bool {
        self.entry(key).is_some()
    }

    fn line_of(&self, key: &str) -> usize {
        self.entry(key).map_or(self.line(), |e| e.line)
    }

    fn str(&self, key: &str) -> Option<&'a str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => match e.value.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(Some(x)),
                _ => err(e.line, format!("'{key}' must be a finite number, got '{}'", e.value)),
            },
        }
    }

    fn required_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.map_or_else(|| err(self.line(), format!("[{}] needs '{key}'", self.name)), Ok)
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<usize>()
                .map(Some)
                .or_else(|_| err(e.line, format!("'{key}' must be a nonnegative integer, got '{}'", e.value))),
        }
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(Some(true)),
                "false" | "no" | "0" => Ok(Some(false)),
                v => err(e.line, format!("'{key}' must be true or false, got '{v}'")),
            },
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        let mut out = Vec::new();
        for item in e.value.split(',') {
            match item.trim().parse::<f64>() {
                Ok(x) if x.is_finite() => out.push(x),
                _ => return err(e.line, format!("'{key}' must be a comma separated list of numbers")),
            }
        }
        Ok(Some(out))
    }
}

/// Parses and validates a configuration. Relative table paths are resolved
/// against `base_dir`.
pub fn parse_config_in(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let secs = tokenize(text)?;
    let view = |name: &'static str| View { name, sec: secs.get(name) };

    let prob = view("problem");
    if prob.sec.is_none() {
        return Err(Error::ConfigGeneral("missing [problem] section".into()));
    }
    let p = prob.required_f64("p")?;
    if !(p > 10.0 / 3.0 && p < 6.0) {
        return err(prob.line_of("p"), "p must lie in the open interval (10/3, 6)");
    }
    let a = prob.required_f64("a")?;
    if !(a > 0.0) {
        return err(prob.line_of("a"), "a must be positive");
    }
    let s = prob.f64("s")?.unwrap_or(1.0);
    if !(0.5..=1.0).contains(&s) {
        return err(prob.line_of("s"), "s must lie in [1/2, 1]");
    }
    let params = ProblemParams { p, a, s };

    let potential = parse_potential(&view("potential"), base_dir)?;
    let grid = parse_grid(&view("grid"))?;

    let sv = view("solver");
    let mut solver = SolverConfig::default();
    if let Some(x) = sv.f64("tol_newton")? {
        if !(x > 0.0) {
            return err(sv.line_of("tol_newton"), "tol_newton must be positive");
        }
        solver.tol_newton = x;
    }
    solver.max_newton = sv.usize("max_newton")?.unwrap_or(solver.max_newton);
    if let Some(x) = sv.f64("descent_step")? {
        if !(x > 0.0) {
            return err(sv.line_of("descent_step"), "descent_step must be positive");
        }
        solver.descent_step = x;
    }
    solver.max_descent = sv.usize("max_descent")?.unwrap_or(solver.max_descent);
    solver.reference_n = sv.usize("reference_n")?.unwrap_or(solver.reference_n);
    if let Some(legs) = sv.str("legs") {
        let line = sv.line_of("legs");
        let parsed = legs
            .split(',')
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.parse::<HomotopyLeg>())
            .collect::<Result<Vec<_>>>()
            .or_else(|e| err(line, e.to_string()))?;
        solver.legs = HomotopySchedule::new(parsed);
    }

    let ov = view("output");
    let mut output = OutputConfig::default();
    if let Some(d) = ov.str("directory") {
        output.directory = base_dir.join(d);
    }
    output.emit_svg = ov.bool("emit_svg")?.unwrap_or(false);
    output.seed = ov.usize("seed")?.unwrap_or(0) as u64;

    let cv = view("check");
    let mut check = CheckConfig::default();
    check.theta = cv.f64("theta")?.unwrap_or(check.theta);
    check.eta = cv.f64("eta")?.unwrap_or(check.eta);
    check.q = cv.f64("q")?.unwrap_or(check.q);
    check.c_q = cv.f64("c_q")?;
    check.alpha = cv.f64("alpha")?.unwrap_or(check.alpha);
    check.delta = cv.f64("delta")?.unwrap_or(check.delta);
    if let Some(r) = cv.list("radii")? {
        check.radii = r;
    }

    let sweep = view("sweep").list("a")?.unwrap_or_default();
    if sweep.windows(2).any(|w| w[1] < w[0]) || sweep.iter().any(|x| !(*x > 0.0)) {
        return err(view("sweep").line_of("a"), "sweep masses must be positive and nondecreasing");
    }

    Ok(RunConfig { params, potential, grid, solver, output, check, sweep })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_in(text, Path::new("."))
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigGeneral(format!("cannot read {}: {e}", path.display())))?;
    parse_config_in(&text, path.parent().unwrap_or(Path::new(".")))
}

fn parse_grid(v: &View) -> Result<GridConfig> {
    if v.sec.is_none() {
        return Err(Error::ConfigGeneral("missing [grid] section".into()));
    }
    let kind = v.str("kind").unwrap_or("radial");
    let n = v.usize("n")?.map_or_else(|| err(v.line(), "[grid] needs 'n'"), Ok)?;
    let g = match kind {
        "radial" => {
            if v.has("L") {
                return err(v.line_of("L"), "'L' applies to box grids; use 'r_max' or 'widths'");
            }
            match (v.f64("r_max")?, v.f64("widths")?) {
                (Some(r_max), None) => GridConfig::Radial { n, r_max },
                (None, Some(widths)) => GridConfig::RadialAuto { n, widths },
                (Some(_), Some(_)) => return err(v.line_of("widths"), "give either 'r_max' or 'widths', not both"),
                (None, None) => return err(v.line(), "radial grid needs 'r_max' or 'widths'"),
            }
        }
        "box" => {
            if v.has("r_max") || v.has("widths") {
                return err(v.line_of(if v.has("r_max") { "r_max" } else { "widths" }), "box grids take 'L'");
            }
            GridConfig::Box { n, half_width: v.required_f64("L")? }
        }
        k => return err(v.line_of("kind"), format!("unknown grid kind '{k}'")),
    };
    // catch bad sizes at parse time
    let probe = ProblemParams { p: 4.0, a: 1.0, s: 1.0 };
    g.build(&probe).map_err(|e| Error::Config { line: v.line(), message: e.to_string() })?;
    Ok(g)
}

const POTENTIAL_KEYS: [(&str, &[&str]); 6] = [
    ("zero", &[]),
    ("power_decay", &["c", "alpha"]),
    ("piecewise_power", &["c", "alpha", "beta"]),
    ("gaussian_well", &["c", "sigma"]),
    ("angular_modulated", &["base", "amplitude", "c", "alpha", "beta", "sigma"]),
    ("table", &["file"]),
];

fn parse_potential(v: &View, base_dir: &Path) -> Result<PotentialSpec> {
    if v.sec.is_none() {
        return Ok(PotentialSpec::Zero);
    }
    let kind = v.str("kind").unwrap_or("zero");
    let Some((_, keys)) = POTENTIAL_KEYS.iter().find(|(k, _)| *k == kind) else {
        return err(v.line_of("kind"), format!("unknown potential kind '{kind}'"));
    };
    if let Some(sec) = v.sec {
        for (k, e) in &sec.entries {
            if k != "kind" && k != "scale" && !keys.contains(&k.as_str()) {
                return err(e.line, format!("key '{k}' does not apply to potential kind '{kind}'"));
            }
        }
    }
    let at = |e: Error| Error::Config { line: v.line(), message: e.to_string() };
    let spec = match kind {
        "angular_modulated" => {
            let base_kind = v.str("base").unwrap_or("power_decay");
            if base_kind == "angular_modulated" || base_kind == "table" {
                return err(v.line_of("base"), format!("angular modulation of '{base_kind}' is not supported"));
            }
            if !POTENTIAL_KEYS.iter().any(|(k, _)| *k == base_kind) {
                return err(v.line_of("base"), format!("unknown potential kind '{base_kind}'"));
            }
            let base = simple_potential(v, base_kind)?;
            PotentialSpec::AngularModulated { base: Box::new(base), amplitude: v.required_f64("amplitude")? }
        }
        "table" => {
            let file = v.str("file").map_or_else(|| err(v.line(), "table potential needs 'file'"), Ok)?;
            read_table(&base_dir.join(file)).map_err(at)?
        }
        k => simple_potential(v, k)?,
    };
    let spec = match v.f64("scale")? {
        Some(f) => spec.scaled(f),
        None => spec,
    };
    spec.validate().map_err(at)?;
    Ok(spec)
}

fn simple_potential(v: &View, kind: &str) -> Result<PotentialSpec> {
    Ok(match kind {
        "zero" => PotentialSpec::Zero,
        "power_decay" => PotentialSpec::PowerDecay { c: v.required_f64("c")?, alpha: v.required_f64("alpha")? },
        "piecewise_power" => PotentialSpec::PiecewisePower {
            c: v.required_f64("c")?,
            alpha: v.required_f64("alpha")?,
            beta: v.required_f64("beta")?,
        },
        "gaussian_well" => PotentialSpec::GaussianWell { c: v.required_f64("c")?, sigma: v.required_f64("sigma")? },
        k => return err(v.line_of("kind"), format!("unknown potential kind '{k}'")),
    })
}

/// CSV with columns `r, V` and optionally `dV/dr`; a header row is skipped.
pub fn read_table(path: &Path) -> Result<PotentialSpec> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let (mut radii, mut values, mut derivs) = (Vec::new(), Vec::new(), Vec::new());
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let nums: std::result::Result<Vec<f64>, _> = rec.iter().map(|x| x.parse::<f64>()).collect();
        let Ok(nums) = nums else {
            if i == 0 {
                continue;
            }
            return Err(Error::Format(format!("non-numeric row {} in {}", i + 1, path.display())));
        };
        if !(nums.len() == 2 || nums.len() == 3) || width.is_some_and(|w| w != nums.len()) {
            return Err(Error::Format(format!(
                "row {} of {} must have 2 or 3 columns throughout",
                i + 1,
                path.display()
            )));
        }
        width = Some(nums.len());
        radii.push(nums[0]);
        values.push(nums[1]);
        if nums.len() == 3 {
            derivs.push(nums[2]);
        }
    }
    let derivatives = if width == Some(3) { Some(derivs) } else { None };
    Ok(PotentialSpec::CustomTable { radii, values, derivatives })
}
