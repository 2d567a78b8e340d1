//! Flat `key = value` configuration with optional `[section]` headers.
//!
//! Sections only group keys; every key name is unique across the file and is
//! the same as the command-line flag that overrides it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use stable_rerank::{BrConfig, Completion, Format, KnnConfig, SplitRatios};

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "dataset",
    "format",
    "ratios",
    "seed",
    "scorer",
    "neighbors",
    "min-overlap",
    "scores",
    "k",
    "rerankers",
    "cap",
    "alpha",
    "completion",
    "on-exhaustion",
    "caps",
    "interval",
    "out",
];

#[derive(Debug, Clone)]
struct Value {
    text: String,
    /// Directory relative paths in this value resolve against.
    base: PathBuf,
    origin: String,
}

#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, Value>,
}

impl RawConfig {
    pub fn parse(text: &str, base: &Path, origin: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let at = format!("{origin}:{}", n + 1);
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') || line.len() < 3 {
                    return Err(CliError::config(format!("{at}: malformed section header")));
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!("{at}: expected `key = value`")));
            };
            let key = key.trim().to_owned();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!("{at}: unknown key {key:?}")));
            }
            let value = Value {
                text: value.trim().to_owned(),
                base: base.to_owned(),
                origin: at.clone(),
            };
            if let Some(prev) = values.insert(key.clone(), value) {
                return Err(CliError::config(format!(
                    "{at}: key {key:?} already set at {}",
                    prev.origin
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("")).to_owned();
        Self::parse(&text, &base, &path.display().to_string())
    }

    /// Sets `key` from a command-line flag, replacing any file value.
    pub fn set_flag(&mut self, key: &str, text: String) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(
            key.to_owned(),
            Value {
                text,
                base: PathBuf::new(),
                origin: format!("--{key}"),
            },
        );
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CapSpec {
    Uniform(usize),
    LowerBound,
    File(PathBuf),
}

impl CapSpec {
    fn parse(text: &str, base: &Path) -> Self {
        let text = text.trim();
        if text == "lower-bound" {
            CapSpec::LowerBound
        } else if let Ok(c) = text.parse() {
            CapSpec::Uniform(c)
        } else {
            CapSpec::File(base.join(text))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reranker {
    Identity,
    Br(f64),
    Mmda(CapSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scorer {
    Knn(KnnConfig),
    External(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhaustion {
    Fail,
    Fill,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub dataset: Option<PathBuf>,
    pub format: Option<Format>,
    pub ratios: SplitRatios,
    pub seed: u64,
    pub scorer: Scorer,
    pub k: usize,
    pub rerankers: Vec<Reranker>,
    pub cap: CapSpec,
    pub completion: Completion,
    pub exhaustion: Exhaustion,
    pub sweep_caps: Option<Vec<CapSpec>>,
    pub interval: usize,
    pub out: PathBuf,
}

fn bad(v: &Value, what: &str) -> CliError {
    CliError::config(format!("{}: invalid {what} {:?}", v.origin, v.text))
}

fn number<T: std::str::FromStr>(raw: &RawConfig, key: &str, default: T) -> CliResult<T> {
    match raw.get(key) {
        None => Ok(default),
        Some(v) => v.text.parse().map_err(|_| bad(v, key)),
    }
}

fn alpha_of(text: &str, v: &Value) -> CliResult<f64> {
    let a: f64 = text.trim().parse().map_err(|_| bad(v, "alpha"))?;
    BrConfig::new(a).map_err(|e| CliError::config(format!("{}: {e}", v.origin)))?;
    Ok(a)
}

/// Splits on commas outside parentheses.
fn top_level_items(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (p, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..p].trim());
                start = p + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

fn parse_reranker(item: &str, v: &Value, alpha: f64, cap: &CapSpec) -> CliResult<Reranker> {
    let (name, arg) = match item.split_once('(') {
        Some((name, rest)) => {
            let Some(arg) = rest.strip_suffix(')') else {
                return Err(bad(v, "reranker"));
            };
            (name.trim(), Some(arg.trim()))
        }
        None => (item, None),
    };
    match (name, arg) {
        ("identity", None) => Ok(Reranker::Identity),
        ("br", None) => Ok(Reranker::Br(alpha)),
        ("br", Some(a)) => Ok(Reranker::Br(alpha_of(a, v)?)),
        ("mmda", None) => Ok(Reranker::Mmda(cap.clone())),
        ("mmda", Some(c)) => Ok(Reranker::Mmda(CapSpec::parse(c, &v.base))),
        _ => Err(CliError::config(format!(
            "{}: unknown reranker {item:?} (expected identity, br[(alpha)] or mmda[(cap)])",
            v.origin
        ))),
    }
}

impl Settings {
    pub fn resolve(raw: &RawConfig) -> CliResult<Self> {
        let path = |key: &str| raw.get(key).map(|v| v.base.join(&v.text));

        let format = match raw.get("format") {
            None => None,
            Some(v) => Some(
                v.text
                    .parse::<Format>()
                    .map_err(|e| CliError::config(format!("{}: {e}", v.origin)))?,
            ),
        };

        let ratios = match raw.get("ratios") {
            None => SplitRatios::default(),
            Some(v) => {
                let parts: Vec<f64> = v
                    .text
                    .split(',')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(v, "ratios"))?;
                let [a, b, c] = parts[..] else {
                    return Err(bad(v, "ratios (expected train,validation,test)"));
                };
                SplitRatios::new(a, b, c)
                    .map_err(|e| CliError::config(format!("{}: {e}", v.origin)))?
            }
        };

        let neighbors = number(raw, "neighbors", 10usize)?;
        let min_overlap = number(raw, "min-overlap", 1usize)?;
        let scorer = match raw.get("scorer").map(|v| (v.text.as_str(), v)) {
            None | Some(("knn", _)) => Scorer::Knn(
                KnnConfig::new(neighbors, min_overlap).map_err(CliError::from)?,
            ),
            Some(("external", v)) => Scorer::External(path("scores").ok_or_else(|| {
                CliError::config(format!("{}: scorer external needs a scores file", v.origin))
            })?),
            Some((_, v)) => return Err(bad(v, "scorer (expected knn or external)")),
        };

        let k = number(raw, "k", 10usize)?;
        if k == 0 {
            return Err(CliError::config("k must be at least 1"));
        }

        let alpha = match raw.get("alpha") {
            None => 0.01,
            Some(v) => alpha_of(&v.text, v)?,
        };
        let cap = raw
            .get("cap")
            .map_or(CapSpec::LowerBound, |v| CapSpec::parse(&v.text, &v.base));
        if cap == CapSpec::Uniform(0) {
            return Err(CliError::config("cap must be at least 1"));
        }

        let rerankers = match raw.get("rerankers") {
            None => vec![
                Reranker::Identity,
                Reranker::Br(alpha),
                Reranker::Mmda(cap.clone()),
            ],
            Some(v) => top_level_items(&v.text)
                .into_iter()
                .map(|item| parse_reranker(item, v, alpha, &cap))
                .collect::<CliResult<_>>()?,
        };
        if rerankers.is_empty() {
            return Err(CliError::config("at least one reranker is required"));
        }

        let completion = match raw.get("completion").map(|v| (v.text.as_str(), v)) {
            None | Some(("append-unscored", _)) => Completion::AppendUnscored,
            Some(("scored-only", _)) => Completion::ScoredOnly,
            Some((_, v)) => return Err(bad(v, "completion (expected append-unscored or scored-only)")),
        };
        let exhaustion = match raw.get("on-exhaustion").map(|v| (v.text.as_str(), v)) {
            None | Some(("fail", _)) => Exhaustion::Fail,
            Some(("fill", _)) => Exhaustion::Fill,
            Some((_, v)) => return Err(bad(v, "on-exhaustion (expected fail or fill)")),
        };

        let sweep_caps = match raw.get("caps") {
            None => None,
            Some(v) => Some(
                v.text
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| match CapSpec::parse(s, &v.base) {
                        CapSpec::File(_) | CapSpec::Uniform(0) => Err(bad(v, "cap list")),
                        c => Ok(c),
                    })
                    .collect::<CliResult<_>>()?,
            ),
        };

        let interval = number(raw, "interval", 1000usize)?;
        if interval == 0 {
            return Err(CliError::config("interval must be at least 1"));
        }

        Ok(Self {
            dataset: path("dataset"),
            format,
            ratios,
            seed: number(raw, "seed", 42u64)?,
            scorer,
            k,
            rerankers,
            cap,
            completion,
            exhaustion,
            sweep_caps,
            interval,
            out: path("out").unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(text: &str) -> CliResult<Settings> {
        Settings::resolve(&RawConfig::parse(text, Path::new("/cfg"), "test.ini")?)
    }

    #[test]
    fn defaults() {
        let s = settings("").unwrap();
        assert_eq!(s.k, 10);
        assert_eq!(s.cap, CapSpec::LowerBound);
        assert_eq!(
            s.rerankers,
            vec![Reranker::Identity, Reranker::Br(0.01), Reranker::Mmda(CapSpec::LowerBound)]
        );
        assert_eq!(s.ratios, SplitRatios::default());
        assert_eq!(s.out, PathBuf::from("out"));
    }

    #[test]
    fn sections_comments_and_relative_paths() {
        let s = settings(
            "# experiment\n[dataset]\ndataset = ml/ratings.dat\nformat = movielens-dat\n\n\
             [rerank]\nk = 5 ; not a comment\n",
        );
        assert!(s.is_err());
        let s = settings("[dataset]\ndataset = ml/ratings.dat\n; note\n[rerank]\nk = 5\n").unwrap();
        assert_eq!(s.dataset, Some(PathBuf::from("/cfg/ml/ratings.dat")));
        assert_eq!(s.k, 5);
    }

    #[test]
    fn reranker_list() {
        let s = settings("alpha = 0.5\ncap = 7\nrerankers = identity, br(0.01), br, mmda(20), mmda, mmda(lower-bound)")
            .unwrap();
        assert_eq!(
            s.rerankers,
            vec![
                Reranker::Identity,
                Reranker::Br(0.01),
                Reranker::Br(0.5),
                Reranker::Mmda(CapSpec::Uniform(20)),
                Reranker::Mmda(CapSpec::Uniform(7)),
                Reranker::Mmda(CapSpec::LowerBound),
            ]
        );
        let s = settings("rerankers = mmda(caps.csv)").unwrap();
        assert_eq!(s.rerankers, vec![Reranker::Mmda(CapSpec::File("/cfg/caps.csv".into()))]);
    }

    #[test]
    fn flags_override_file_values() {
        let mut raw = RawConfig::parse("k = 5\nout = results", Path::new("/cfg"), "t").unwrap();
        raw.set_flag("k", "3".into());
        raw.set_flag("out", "elsewhere".into());
        let s = Settings::resolve(&raw).unwrap();
        assert_eq!(s.k, 3);
        assert_eq!(s.out, PathBuf::from("elsewhere"));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "ratios = 0.5,0.5,0.5",
            "ratios = 0.8,0.2",
            "k = 0",
            "k = ten",
            "alpha = -1",
            "rerankers = ",
            "rerankers = foo",
            "rerankers = br(x)",
            "cap = 0",
            "caps = 12,0",
            "interval = 0",
            "scorer = external",
            "colour = blue",
            "k = 1\nk = 2",
            "just text",
            "[broken",
        ] {
            let err = settings(text).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}: {err}");
        }
    }
}
