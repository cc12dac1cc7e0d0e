//! Run configuration: a `key = value` file, overridden by `--key value` flags.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Evolve,
    Instability,
    Quantize,
    Angular,
    Validate,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Evolve, Command::Instability, Command::Quantize, Command::Angular, Command::Validate];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Instability => "instability",
            Command::Quantize => "quantize",
            Command::Angular => "angular",
            Command::Validate => "validate",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| CliError::usage(format!("unknown command `{name}`")))
    }

    pub fn schema(self) -> &'static [Key] {
        match self {
            Command::Evolve => EVOLVE,
            Command::Instability => INSTABILITY,
            Command::Quantize => QUANTIZE,
            Command::Angular => ANGULAR,
            Command::Validate => VALIDATE,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Float,
    Positive,
    Int { min: i64 },
    PowerOfTwo,
    Choice(&'static [&'static str]),
    /// Comma-separated floats.
    FloatList,
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Key {
    Key { name, kind, default, help }
}

const GRID_N: Key = key("n", Kind::PowerOfTwo, "4096", "grid points (power of two, >= 16)");

static EVOLVE: &[Key] = &[
    key("initial", Kind::Choice(&["pair", "gaussian", "ground"]), "pair", "initial state"),
    key("solver", Kind::Choice(&["spectral", "madelung"]), "spectral", "time integrator"),
    key("potential", Kind::Choice(&["free", "harmonic"]), "free", "external potential"),
    key("kappa", Kind::Positive, "1", "harmonic strength, V = kappa x^2"),
    key("L", Kind::Positive, "10", "pair half-separation"),
    key("sigma", Kind::Positive, "1", "packet dispersion"),
    key("p0", Kind::Float, "2", "drift momentum"),
    key("x0", Kind::Float, "0", "packet centre (gaussian, ground)"),
    key("drift", Kind::Choice(&["approach", "verbatim"]), "approach", "approach: right packet moves left; verbatim: e^{i p0 x} as written"),
    key("x_min", Kind::Float, "-40", "left edge of the box"),
    key("x_max", Kind::Float, "40", "right edge of the box"),
    GRID_N,
    key("dt", Kind::Positive, "1e-3", "time step"),
    key("steps", Kind::Int { min: 1 }, "5000", "number of steps"),
    key("record_every", Kind::Int { min: 1 }, "500", "snapshot stride"),
];

static INSTABILITY: &[Key] = &[
    key("profile", Kind::Choice(&["plateau", "pair"]), "plateau", "initial density family"),
    key("eps", Kind::FloatList, "1e-1,1e-2,1e-3,1e-4,1e-5", "perturbation sizes (comma separated)"),
    key("N", Kind::Int { min: 2 }, "2", "plateau exponent, rho = eps^N"),
    key("ell", Kind::Positive, "1", "half-width of the probe interval"),
    key("sigma", Kind::Positive, "1", "pair dispersion"),
    key("p0", Kind::Float, "2", "pair drift momentum"),
    key("shoulder", Kind::Positive, "1", "plateau shoulder width"),
    key("x_min", Kind::Float, "-16", "plateau box left edge"),
    key("x_max", Kind::Float, "16", "plateau box right edge"),
    GRID_N,
];

static QUANTIZE: &[Key] = &[
    key("jmax", Kind::Int { min: 0 }, "7", "highest level reported"),
    key("box", Kind::Positive, "12", "finite-difference box half-width"),
    GRID_N,
    key("energies", Kind::FloatList, "1,1.5,3,3.3,5,5.3,5.7,7", "energies for the tail diagnosis"),
    key("x_probe", Kind::Float, "6", "probe position of the tail diagnosis"),
    key("j_cut", Kind::Int { min: 20 }, "200", "series truncation index"),
];

static ANGULAR: &[Key] = &[
    key("jmax", Kind::Int { min: 0 }, "10", "highest angular index"),
    key("offset", Kind::Float, "0.5", "offset added to j(j+1) for the off-lattice diagnosis"),
    key("j_cut", Kind::Int { min: 20 }, "10000", "series truncation index"),
    key("c1", Kind::Float, "1", "radial coefficient"),
    key("m", Kind::Float, "0.5", "azimuthal number for the single-valuedness witness"),
];

static VALIDATE: &[Key] = &[
    key("scenario", Kind::Choice(&["displaced", "stationary", "pair"]), "displaced", "initial state"),
    key("x0", Kind::Float, "1", "displacement of the harmonic ground state"),
    key("kappa", Kind::Positive, "1", "harmonic strength"),
    key("L", Kind::Positive, "10", "pair half-separation"),
    key("sigma", Kind::Positive, "1", "pair dispersion"),
    key("p0", Kind::Float, "2", "pair drift momentum (pair moves together)"),
    key("x_min", Kind::Float, "-24", "left edge of the box"),
    key("x_max", Kind::Float, "24", "right edge of the box"),
    key("n", Kind::PowerOfTwo, "2048", "grid points (power of two, >= 16)"),
    key("dt", Kind::Positive, "1e-4", "time step"),
    key("t_final", Kind::Positive, "0.2", "end time"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
    FloatList(Vec<f64>),
}

fn parse_value(key: &Key, raw: &str) -> Result<Value> {
    let bad = |what: &str| CliError::usage(format!("`{}`: expected {what}, got `{raw}`", key.name));
    let float = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    match key.kind {
        Kind::Float => float(raw).map(Value::Float).ok_or_else(|| bad("a finite number")),
        Kind::Positive => float(raw).filter(|v| *v > 0.0).map(Value::Float).ok_or_else(|| bad("a positive number")),
        Kind::Int { min } => raw
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|v| *v >= min)
            .map(Value::Int)
            .ok_or_else(|| bad(&format!("an integer >= {min}"))),
        Kind::PowerOfTwo => raw
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|v| *v >= 16 && (*v as u64).is_power_of_two())
            .map(Value::Int)
            .ok_or_else(|| bad("a power of two >= 16")),
        Kind::Choice(options) => options
            .iter()
            .find(|o| **o == raw.trim())
            .map(|o| Value::Text(o.to_string()))
            .ok_or_else(|| bad(&format!("one of {}", options.join("|")))),
        Kind::FloatList => raw
            .split(',')
            .map(float)
            .collect::<Option<Vec<f64>>>()
            .filter(|v| !v.is_empty())
            .map(Value::FloatList)
            .ok_or_else(|| bad("a comma-separated list of numbers")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Every schema key, with defaults filled in, as given.
    pub raw: BTreeMap<String, String>,
    pub params: BTreeMap<String, Value>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    fn get(&self, name: &str) -> &Value {
        self.params.get(name).unwrap_or_else(|| panic!("`{name}` is not in the {} schema", self.command))
    }

    pub fn f64(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Float(v) => *v,
            Value::Int(v) => *v as f64,
            other => panic!("`{name}` is not numeric: {other:?}"),
        }
    }

    pub fn int(&self, name: &str) -> i64 {
        match self.get(name) {
            Value::Int(v) => *v,
            other => panic!("`{name}` is not an integer: {other:?}"),
        }
    }

    pub fn usize(&self, name: &str) -> usize {
        self.int(name) as usize
    }

    pub fn text(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Text(v) => v,
            other => panic!("`{name}` is not text: {other:?}"),
        }
    }

    pub fn list(&self, name: &str) -> &[f64] {
        match self.get(name) {
            Value::FloatList(v) => v,
            other => panic!("`{name}` is not a list: {other:?}"),
        }
    }
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("{}:{}: expected `key = value`", path.display(), lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Builds a config from the arguments following the command name:
/// `[--config FILE] [--key value ...] --out DIR`.
pub fn parse_config(command: &str, args: &[String]) -> Result<RunConfig> {
    let command = Command::parse(command)?;
    let mut flags = Vec::new();
    let mut config_file = None;
    let mut output_dir = None;
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let name = arg
            .strip_prefix("--")
            .ok_or_else(|| CliError::usage(format!("expected `--key value`, got `{arg}`")))?;
        let (name, value) = match name.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| CliError::usage(format!("`--{name}` needs a value")))?;
                (name.to_string(), v.clone())
            }
        };
        match name.as_str() {
            "config" => config_file = Some(PathBuf::from(value)),
            "out" => output_dir = Some(PathBuf::from(value)),
            _ => flags.push((name, value)),
        }
    }
    let output_dir = output_dir.ok_or_else(|| CliError::usage("missing required `--out DIR`"))?;
    let mut pairs = match &config_file {
        Some(path) => read_config_file(path)?,
        None => Vec::new(),
    };
    pairs.extend(flags);
    build(command, pairs, output_dir)
}

/// Applies `pairs` in order (later wins) on top of the schema defaults.
pub fn build(command: Command, pairs: Vec<(String, String)>, output_dir: PathBuf) -> Result<RunConfig> {
    let schema = command.schema();
    let mut raw: BTreeMap<String, String> = schema.iter().map(|k| (k.name.to_string(), k.default.to_string())).collect();
    for (k, v) in pairs {
        if !raw.contains_key(&k) {
            let known: Vec<&str> = schema.iter().map(|k| k.name).collect();
            return Err(CliError::usage(format!("unknown key `{k}` for `{command}` (known: {})", known.join(", "))));
        }
        raw.insert(k, v);
    }
    let params = schema
        .iter()
        .map(|k| Ok((k.name.to_string(), parse_value(k, &raw[k.name])?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(RunConfig { command, raw, params, output_dir })
}

/// Human-readable schema listing for `--help`.
pub fn schema_help() -> String {
    let mut out = String::new();
    for c in Command::ALL {
        out.push_str(&format!("\n{c}:\n"));
        for k in c.schema() {
            out.push_str(&format!("  --{:<13} {} [default: {}]\n", k.name, k.help, k.default));
        }
    }
    out
}
