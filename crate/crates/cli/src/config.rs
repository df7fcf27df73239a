//! Line-oriented `key = value` configuration.
//!
//! A file is UTF-8 text. `#` starts a comment that runs to the end of the line, blank lines are
//! ignored, and every other line is `key = value`. Command-line `key=value` arguments use the same
//! syntax and override the file. Values are typed by each experiment's parameter table, and every
//! problem found is reported with its line before anything is computed.

use std::collections::BTreeMap;
use std::fmt;

/// Where a setting came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line { file: String, line: usize },
    Arg(usize),
    Flag(&'static str),
    Default,
}

impl Origin {
    /// Sort key: file lines in order, then arguments, then flags.
    pub fn rank(&self) -> (u8, usize) {
        match self {
            Origin::Line { line, .. } => (0, *line),
            Origin::Arg(i) => (1, *i),
            Origin::Flag(_) => (2, 0),
            Origin::Default => (3, 0),
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line { file, line } => write!(f, "{file}:{line}"),
            Origin::Arg(i) => write!(f, "argument {i}"),
            Origin::Flag(name) => write!(f, "{name}"),
            Origin::Default => write!(f, "default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub origin: Origin,
    pub message: String,
}

impl Diagnostic {
    pub fn new(origin: Origin, message: impl Into<String>) -> Self {
        Self { origin, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.origin, self.message)
    }
}

/// One unvalidated `key = value` setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

fn split_setting(text: &str, origin: Origin) -> Result<Entry, Diagnostic> {
    let Some((key, value)) = text.split_once('=') else {
        return Err(Diagnostic::new(origin, format!("expected `key = value`, found `{text}`")));
    };
    let (key, value) = (key.trim(), value.trim());
    let well_formed = key.chars().next().is_some_and(|c| c.is_ascii_lowercase())
        && key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if !well_formed {
        return Err(Diagnostic::new(origin, format!("malformed key `{key}`")));
    }
    if value.is_empty() {
        return Err(Diagnostic::new(origin, format!("missing value for `{key}`")));
    }
    Ok(Entry { key: key.to_string(), value: value.to_string(), origin })
}

/// Splits a configuration file into settings; syntax errors are collected, not fatal.
pub fn parse_file(text: &str, file: &str) -> (Vec<Entry>, Vec<Diagnostic>) {
    let mut entries = Vec::new();
    let mut diags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match split_setting(line, Origin::Line { file: file.to_string(), line: i + 1 }) {
            Ok(e) => entries.push(e),
            Err(d) => diags.push(d),
        }
    }
    (entries, diags)
}

/// Settings given as trailing command-line arguments, numbered from 1.
pub fn parse_args(args: &[String]) -> (Vec<Entry>, Vec<Diagnostic>) {
    let mut entries = Vec::new();
    let mut diags = Vec::new();
    for (i, a) in args.iter().enumerate() {
        match split_setting(a, Origin::Arg(i + 1)) {
            Ok(e) => entries.push(e),
            Err(d) => diags.push(d),
        }
    }
    (entries, diags)
}

/// Admissible interval of a numeric parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_open: false, hi_open: false }
    }
    pub const fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_open: true, hi_open: true }
    }
    pub const fn left_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_open: true, hi_open: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |x: f64| if x.is_infinite() { "∞".to_string() } else { format!("{x}") };
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { "(" } else { "[" },
            end(self.lo),
            end(self.hi),
            if self.hi_open { ")" } else { "]" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Int { min: i64, max: i64 },
    Float(Interval),
    /// Comma-separated numbers, each in the interval.
    Floats(Interval),
    /// Comma-separated `a:b` pairs.
    Pairs { first: Interval, second: Interval },
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    /// `None` makes the parameter optional with an experiment-chosen fallback.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Floats(Vec<f64>),
    Pairs(Vec<(f64, f64)>),
}

impl Value {
    /// Canonical text; equal values always print identically.
    pub fn canonical(&self) -> String {
        let num = |x: &f64| format!("{x:?}");
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => num(x),
            Value::Floats(v) => v.iter().map(num).collect::<Vec<_>>().join(","),
            Value::Pairs(v) => v.iter().map(|(a, b)| format!("{}:{}", num(a), num(b))).collect::<Vec<_>>().join(","),
        }
    }
}

fn parse_number(text: &str, range: Interval) -> Result<f64, String> {
    let x: f64 = text.trim().parse().map_err(|_| format!("`{}` is not a number", text.trim()))?;
    if !x.is_finite() {
        return Err(format!("`{}` is not finite", text.trim()));
    }
    if !range.contains(x) {
        return Err(format!("{x} is outside {range}"));
    }
    Ok(x)
}

pub fn parse_value(text: &str, kind: Kind) -> Result<Value, String> {
    match kind {
        Kind::Int { min, max } => {
            let i: i64 = text.parse().map_err(|_| format!("`{text}` is not an integer"))?;
            if i < min || i > max {
                return Err(format!("{i} is outside [{min}, {max}]"));
            }
            Ok(Value::Int(i))
        }
        Kind::Float(range) => parse_number(text, range).map(Value::Float),
        Kind::Floats(range) => {
            let v = text.split(',').map(|t| parse_number(t, range)).collect::<Result<Vec<_>, _>>()?;
            Ok(Value::Floats(v))
        }
        Kind::Pairs { first, second } => {
            let mut out = Vec::new();
            for item in text.split(',') {
                let Some((a, b)) = item.split_once(':') else {
                    return Err(format!("`{}` is not an `a:b` pair", item.trim()));
                };
                out.push((parse_number(a, first)?, parse_number(b, second)?));
            }
            Ok(Value::Pairs(out))
        }
    }
}

/// Validated parameters with the origin of each value.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<&'static str, Value>,
    origins: BTreeMap<&'static str, Origin>,
}

impl Params {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    fn expect(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or_else(|| panic!("parameter `{key}` is not in the table"))
    }

    pub fn int(&self, key: &str) -> i64 {
        match self.expect(key) {
            Value::Int(i) => *i,
            v => panic!("`{key}` is {v:?}, not an integer"),
        }
    }

    pub fn uint(&self, key: &str) -> u32 {
        u32::try_from(self.int(key)).expect("integer ranges are validated")
    }

    pub fn float(&self, key: &str) -> f64 {
        self.opt_float(key).unwrap_or_else(|| panic!("`{key}` has no value"))
    }

    pub fn opt_float(&self, key: &str) -> Option<f64> {
        match self.values.get(key)? {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            v => panic!("`{key}` is {v:?}, not a number"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.expect(key) {
            Value::Floats(v) => v,
            v => panic!("`{key}` is {v:?}, not a list"),
        }
    }

    pub fn pairs(&self, key: &str) -> &[(f64, f64)] {
        match self.expect(key) {
            Value::Pairs(v) => v,
            v => panic!("`{key}` is {v:?}, not a pair list"),
        }
    }

    pub fn origin(&self, key: &str) -> Origin {
        self.origins.get(key).cloned().unwrap_or(Origin::Default)
    }

    /// A diagnostic attached to where `key` was set.
    pub fn diag(&self, key: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(self.origin(key), format!("{key}: {}", message.into()))
    }

    /// `key=value` lines in key order, the input of the config hash.
    pub fn canonical(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={}\n", v.canonical())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map = self
            .values
            .iter()
            .map(|(k, v)| {
                let j = match v {
                    Value::Int(i) => serde_json::json!(i),
                    Value::Float(x) => serde_json::json!(x),
                    Value::Floats(v) => serde_json::json!(v),
                    Value::Pairs(v) => serde_json::json!(v),
                };
                (k.to_string(), j)
            })
            .collect();
        serde_json::Value::Object(map)
    }
}

/// Checks settings against a parameter table. Later settings override earlier ones from a
/// different source; repeating a key within one source is an error.
pub fn resolve(table: &[Param], entries: &[Entry]) -> Result<Params, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut values = BTreeMap::new();
    let mut origins: BTreeMap<&'static str, Origin> = BTreeMap::new();
    let mut seen: BTreeMap<&'static str, Origin> = BTreeMap::new();
    for e in entries {
        let Some(param) = table.iter().find(|p| p.key == e.key) else {
            let known: Vec<&str> = table.iter().map(|p| p.key).collect();
            diags.push(Diagnostic::new(e.origin.clone(), format!("unknown key `{}` (expected one of: {})", e.key, known.join(", "))));
            continue;
        };
        if let Some(prev) = seen.insert(param.key, e.origin.clone()) {
            let same_source = match (&prev, &e.origin) {
                (Origin::Line { file: a, .. }, Origin::Line { file: b, .. }) => a == b,
                (Origin::Arg(_), Origin::Arg(_)) => true,
                _ => false,
            };
            if same_source {
                diags.push(Diagnostic::new(e.origin.clone(), format!("`{}` is already set at {prev}", e.key)));
                seen.insert(param.key, prev);
                continue;
            }
        }
        match parse_value(&e.value, param.kind) {
            Ok(v) => {
                values.insert(param.key, v);
                origins.insert(param.key, e.origin.clone());
            }
            Err(msg) => diags.push(Diagnostic::new(e.origin.clone(), format!("{}: {msg}", e.key))),
        }
    }
    for p in table {
        if values.contains_key(p.key) {
            continue;
        }
        if let Some(text) = p.default {
            let v = parse_value(text, p.kind).unwrap_or_else(|m| panic!("bad default for `{}`: {m}", p.key));
            values.insert(p.key, v);
        }
    }
    if diags.is_empty() {
        Ok(Params { values, origins })
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: [Param; 3] = [
        Param { key: "p", kind: Kind::Float(Interval::open(1.0, f64::INFINITY)), default: Some("2"), help: "" },
        Param { key: "n", kind: Kind::Int { min: 1, max: 9 }, default: None, help: "" },
        Param {
            key: "cases",
            kind: Kind::Pairs { first: Interval::closed(0.0, 1.0), second: Interval::closed(0.0, 1.0) },
            default: Some("0:1"),
            help: "",
        },
    ];

    #[test]
    fn comments_blank_lines_and_whitespace() {
        let (e, d) = parse_file("# header\n\n  p = 3.5   # trailing\nn=4\n", "c");
        assert!(d.is_empty());
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].origin, Origin::Line { file: "c".into(), line: 3 });
        let p = resolve(&TABLE, &e).unwrap();
        assert_eq!(p.float("p"), 3.5);
        assert_eq!(p.int("n"), 4);
        assert_eq!(p.pairs("cases"), &[(0.0, 1.0)]);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let (_, d) = parse_file("p = 2\nnonsense\nP = 3\nn =\n", "c");
        let lines: Vec<String> = d.iter().map(|x| x.origin.to_string()).collect();
        assert_eq!(lines, ["c:2", "c:3", "c:4"]);
    }

    #[test]
    fn range_type_unknown_and_duplicate_keys() {
        let (e, _) = parse_file("p = 1\nn = 2.5\nq = 1\ncases = 0.5:2\np = 3\n", "c");
        let d = resolve(&TABLE, &e).unwrap_err();
        let text: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        assert_eq!(text.len(), 5, "{text:?}");
        assert!(text[0].starts_with("c:1: p: 1 is outside (1, ∞)"));
        assert!(text[1].contains("not an integer"));
        assert!(text[2].contains("unknown key `q`"));
        assert!(text[3].contains("2 is outside [0, 1]"));
        assert!(text[4].contains("already set at c:1"));
    }

    #[test]
    fn arguments_override_the_file() {
        let (mut e, _) = parse_file("p = 3\n", "c");
        let (a, _) = parse_args(&["p=4".to_string()]);
        e.extend(a);
        let p = resolve(&TABLE, &e).unwrap();
        assert_eq!(p.float("p"), 4.0);
        assert_eq!(p.origin("p"), Origin::Arg(1));
        assert!(p.opt_float("n").is_none());
    }

    #[test]
    fn canonical_text_ignores_spelling() {
        let a = resolve(&TABLE, &parse_args(&["p=2.0".into(), "cases=0:1".into()]).0).unwrap();
        let b = resolve(&TABLE, &parse_args(&["p=2".into()]).0).unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }
}
