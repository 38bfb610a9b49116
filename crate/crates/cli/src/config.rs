use std::fmt;
use std::path::PathBuf;

use cocycle_core::asymptotics::EstimatorParams;
use cocycle_core::cocycle::golden_mean;
use cocycle_core::FourierPotential;
use toml::{Table, Value};

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub key: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax(String),
    Invalid(Vec<Violation>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ConfigError::Invalid(vs) => {
                writeln!(f, "{} violation(s):", vs.len())?;
                for v in vs {
                    writeln!(f, "  {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub potential: FourierPotential,
    /// Preset name, or `custom`.
    pub potential_label: String,
    pub alpha: f64,
    pub rho: Option<f64>,
    pub lambdas: Vec<f64>,
    pub energies: Vec<f64>,
    pub mus: Vec<f64>,
    pub heights: Vec<f64>,
    pub estimator: EstimatorParams,
    pub stratum: Option<(f64, f64)>,
    pub deltas: Vec<f64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub precision: Option<usize>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            potential: FourierPotential::amo(),
            potential_label: "amo".into(),
            alpha: golden_mean(),
            rho: None,
            lambdas: Vec::new(),
            energies: Vec::new(),
            mus: Vec::new(),
            heights: vec![0.0],
            estimator: EstimatorParams::default(),
            stratum: None,
            deltas: vec![0.05, 0.1],
            out_dir: None,
            format: None,
            precision: None,
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("potential", &["preset", "coefficients", "h"]),
    ("campaign", &["alpha", "rho", "lambda", "energy", "mu", "heights"]),
    ("estimator", &["n", "m", "t"]),
    ("stratum", &["mu1", "mu2"]),
    ("bounds", &["delta"]),
    ("output", &["dir", "format", "precision"]),
];

fn suggest<'a>(word: &str, candidates: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .map(|c| (strsim::damerau_levenshtein(word, c), c))
        .filter(|&(d, c)| d <= 2 && d < c.len())
        .min()
        .map(|(_, c)| c)
}

fn unknown(key: &str, what: &str, candidates: &[&str]) -> Violation {
    let leaf = key.rsplit('.').next().unwrap_or(key);
    let hint = match suggest(leaf, candidates.iter().copied()) {
        Some(s) => format!("; did you mean \"{s}\"?"),
        None => String::new(),
    };
    Violation {
        key: key.into(),
        message: format!("unknown {what} \"{leaf}\"{hint}"),
    }
}

struct Reader<'a> {
    section: &'a str,
    table: Option<&'a Table>,
    out: &'a mut Vec<Violation>,
}

impl Reader<'_> {
    fn key(&self, k: &str) -> String {
        format!("{}.{k}", self.section)
    }

    fn bad(&mut self, k: &str, msg: impl Into<String>) {
        let key = self.key(k);
        self.out.push(Violation { key, message: msg.into() });
    }

    fn get(&self, k: &str) -> Option<&Value> {
        self.table.and_then(|t| t.get(k))
    }

    fn float(&mut self, k: &str) -> Option<f64> {
        match self.get(k)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            other => {
                let ty = other.type_str();
                self.bad(k, format!("expected a number, found {ty}"));
                None
            }
        }
    }

    fn int(&mut self, k: &str) -> Option<i64> {
        match self.get(k)? {
            Value::Integer(i) => Some(*i),
            other => {
                let ty = other.type_str();
                self.bad(k, format!("expected an integer, found {ty}"));
                None
            }
        }
    }

    fn string(&mut self, k: &str) -> Option<String> {
        match self.get(k)? {
            Value::String(s) => Some(s.clone()),
            other => {
                let ty = other.type_str();
                self.bad(k, format!("expected a string, found {ty}"));
                None
            }
        }
    }

    /// A number or an array of numbers.
    fn floats(&mut self, k: &str) -> Option<Vec<f64>> {
        let v = self.get(k)?.clone();
        let items = match v {
            Value::Array(a) => a,
            other => vec![other],
        };
        let mut xs = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            match item {
                Value::Float(x) => xs.push(*x),
                Value::Integer(n) => xs.push(*n as f64),
                other => {
                    let ty = other.type_str();
                    self.bad(k, format!("element {i}: expected a number, found {ty}"));
                    return None;
                }
            }
        }
        if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
            self.bad(k, format!("non-finite value {x}"));
            return None;
        }
        Some(xs)
    }
}

/// Parses and validates a campaign configuration, collecting every violation.
pub fn parse_config(text: &str) -> Result<CampaignConfig, ConfigError> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string().trim().to_string()))?;
    let mut out = Vec::new();
    let names: Vec<&str> = SECTIONS.iter().map(|(s, _)| *s).collect();
    for (k, v) in &doc {
        match SECTIONS.iter().find(|(s, _)| s == k) {
            None => out.push(unknown(k, "section", &names)),
            Some((_, keys)) => match v {
                Value::Table(t) => {
                    for key in t.keys() {
                        if !keys.contains(&key.as_str()) {
                            out.push(unknown(&format!("{k}.{key}"), "key", keys));
                        }
                    }
                }
                _ => out.push(Violation {
                    key: k.clone(),
                    message: "expected a section".into(),
                }),
            },
        }
    }
    let section = |name: &str| doc.get(name).and_then(Value::as_table);
    let mut cfg = CampaignConfig::default();

    let mut r = Reader { section: "potential", table: section("potential"), out: &mut out };
    let preset = r.string("preset");
    let h = r.float("h");
    let coeffs = r.get("coefficients").cloned();
    match (preset, coeffs) {
        (Some(_), Some(_)) => r.bad("preset", "give either preset or coefficients, not both"),
        (Some(name), None) => match FourierPotential::preset(&name) {
            Some(p) => {
                cfg.potential_label = name;
                cfg.potential = match h {
                    Some(h) => match p.with_strip_height(h) {
                        Ok(p) => p,
                        Err(e) => {
                            r.bad("h", e.to_string());
                            p
                        }
                    },
                    None => p,
                };
            }
            None => {
                let hint = suggest(&name, ["amo", "bichromatic"].into_iter())
                    .map(|s| format!("; did you mean \"{s}\"?"))
                    .unwrap_or_default();
                r.bad("preset", format!("unknown preset \"{name}\"{hint}"));
            }
        },
        (None, Some(v)) => match parse_triples(&v) {
            Err(msg) => r.bad("coefficients", msg),
            Ok(triples) => match h {
                None => r.bad("h", "h is required with coefficients"),
                Some(h) => match FourierPotential::from_triples(&triples, h) {
                    Ok(p) => {
                        cfg.potential = p;
                        cfg.potential_label = "custom".into();
                    }
                    Err(e) => r.bad("coefficients", e.to_string()),
                },
            },
        },
        (None, None) => {
            if let Some(h) = h {
                match cfg.potential.with_strip_height(h) {
                    Ok(p) => cfg.potential = p,
                    Err(e) => r.bad("h", e.to_string()),
                }
            }
        }
    }
    let h = cfg.potential.strip_height();

    let mut r = Reader { section: "campaign", table: section("campaign"), out: &mut out };
    if let Some(a) = r.float("alpha") {
        if a > 0.0 && a < 1.0 {
            cfg.alpha = a;
        } else {
            r.bad("alpha", format!("alpha must satisfy 0 < alpha < 1, got {a}"));
        }
    }
    if let Some(rho) = r.float("rho") {
        let limit = h.min(1.0) / 2.0;
        if rho > 0.0 && rho < limit {
            cfg.rho = Some(rho);
        } else {
            r.bad("rho", format!("rho must satisfy 0 < rho < min(h,1)/2 = {limit}, got {rho}"));
        }
    }
    if let Some(ls) = r.floats("lambda") {
        if ls.contains(&0.0) {
            r.bad("lambda", "coupling must be nonzero");
        }
        cfg.lambdas = ls;
    }
    if let Some(es) = r.floats("energy") {
        cfg.energies = es;
    }
    if let Some(ms) = r.floats("mu") {
        cfg.mus = ms;
    }
    if let Some(ys) = r.floats("heights") {
        if let Some(y) = ys.iter().find(|y| y.abs() > h) {
            r.bad("heights", format!("height {y} outside the strip |y| <= h = {h}"));
        } else if ys.is_empty() {
            r.bad("heights", "at least one height is needed");
        } else {
            cfg.heights = ys;
        }
    }

    let mut r = Reader { section: "estimator", table: section("estimator"), out: &mut out };
    if let Some(n) = r.int("n") {
        if n >= 2 {
            cfg.estimator.n = n as usize;
        } else {
            r.bad("n", format!("n must be at least 2, got {n}"));
        }
    }
    if let Some(m) = r.int("m") {
        if m >= 16 {
            cfg.estimator.m = m as usize;
        } else {
            r.bad("m", format!("M must be at least 16, got {m}"));
        }
    }
    if let Some(t) = r.float("t") {
        if t > 0.0 && t <= 1e-2 {
            cfg.estimator.t = t;
        } else {
            r.bad("t", format!("t must satisfy 0 < t <= 0.01, got {t}"));
        }
    }

    let mut r = Reader { section: "stratum", table: section("stratum"), out: &mut out };
    match (r.float("mu1"), r.float("mu2")) {
        (Some(a), Some(b)) if a < b => cfg.stratum = Some((a, b)),
        (Some(a), Some(b)) => r.bad("mu1", format!("need mu1 < mu2, got [{a}, {b}]")),
        (None, None) => {}
        (Some(_), None) => r.bad("mu2", "mu2 is required with mu1"),
        (None, Some(_)) => r.bad("mu1", "mu1 is required with mu2"),
    }

    let mut r = Reader { section: "bounds", table: section("bounds"), out: &mut out };
    if let Some(ds) = r.floats("delta") {
        if let Some(d) = ds.iter().find(|&&d| d <= 0.0) {
            r.bad("delta", format!("delta must be positive, got {d}"));
        }
        if let (Some(rho), Some(d)) = (cfg.rho, ds.iter().find(|&&d| d >= cfg.rho.unwrap_or(f64::INFINITY))) {
            r.bad("delta", format!("delta must satisfy delta < rho = {rho}, got {d}"));
        }
        cfg.deltas = ds;
    }

    let mut r = Reader { section: "output", table: section("output"), out: &mut out };
    if let Some(d) = r.string("dir") {
        cfg.out_dir = Some(PathBuf::from(d));
    }
    if let Some(f) = r.string("format") {
        match Format::parse(&f) {
            Some(f) => cfg.format = Some(f),
            None => r.bad("format", format!("format must be csv or json, got \"{f}\"")),
        }
    }
    if let Some(p) = r.int("precision") {
        if (1..=17).contains(&p) {
            cfg.precision = Some(p as usize);
        } else {
            r.bad("precision", format!("precision must be between 1 and 17, got {p}"));
        }
    }

    if out.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(out))
    }
}

fn parse_triples(v: &Value) -> Result<Vec<(i64, f64, f64)>, String> {
    let arr = v.as_array().ok_or("expected an array of [k, re, im] triples")?;
    arr.iter()
        .enumerate()
        .map(|(i, t)| {
            let t = t
                .as_array()
                .filter(|t| t.len() == 3 || t.len() == 2)
                .ok_or(format!("element {i}: expected [k, re] or [k, re, im]"))?;
            let k = t[0].as_integer().ok_or(format!("element {i}: mode must be an integer"))?;
            let num = |v: &Value| v.as_float().or(v.as_integer().map(|n| n as f64));
            let re = num(&t[1]).ok_or(format!("element {i}: real part must be a number"))?;
            let im = match t.get(2) {
                Some(v) => num(v).ok_or(format!("element {i}: imaginary part must be a number"))?,
                None => 0.0,
            };
            Ok((k, re, im))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal() {
        let cfg = parse_config("[potential]\npreset = \"amo\"\n[campaign]\nlambda = [40]\nenergy = [0]\n").unwrap();
        assert_eq!(cfg.lambdas, vec![40.0]);
        assert_eq!(cfg.energies, vec![0.0]);
        assert_eq!(cfg.potential, FourierPotential::amo());
    }

    #[test]
    fn rho_violation() {
        let err = parse_config("[potential]\npreset = \"amo\"\nh = 0.5\n[campaign]\nrho = 0.6\n").unwrap_err();
        let ConfigError::Invalid(vs) = err else { panic!() };
        assert!(vs[0].message.starts_with("rho must satisfy 0 < rho < min(h,1)/2"));
    }

    #[test]
    fn unknown_key_suggestion() {
        let err = parse_config("[campaign]\nlamda = [40]\n").unwrap_err();
        let ConfigError::Invalid(vs) = err else { panic!() };
        assert_eq!(vs.len(), 1);
        assert!(vs[0].message.contains("did you mean \"lambda\""), "{}", vs[0]);
    }

    #[test]
    fn collects_all_violations() {
        let err = parse_config("[campaign]\nalpha = 2\nrho = -1\n[estimator]\nn = 1\nm = 4\n[outptu]\n").unwrap_err();
        let ConfigError::Invalid(vs) = err else { panic!() };
        assert_eq!(vs.len(), 5, "{vs:?}");
        assert!(vs.iter().any(|v| v.message.contains("did you mean \"output\"")));
    }

    #[test]
    fn syntax_error_has_line() {
        let err = parse_config("[campaign]\nlambda = [40,\n\nrho = \n").unwrap_err();
        let ConfigError::Syntax(msg) = err else { panic!() };
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn custom_coefficients() {
        let cfg = parse_config("[potential]\ncoefficients = [[-1, 1.0], [1, 1.0]]\nh = 0.5\n").unwrap();
        assert_eq!(cfg.potential, FourierPotential::amo());
        assert_eq!(cfg.potential_label, "custom");
    }
}
