//! Pipeline stages. Each command reads the artifacts of earlier stages from
//! the output directory when they exist and computes (and writes) them
//! otherwise; `split` and `score` always recompute their own artifact.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use stable_rerank::metrics::REPORT_CSV_HEADER;
use stable_rerank::{
    bayesian_rerank, build_preferences, evaluate, knn_scores, load_external_scores,
    load_interactions, mmda_rerank, mmda_rerank_filled, mmda_trace, read_manifest, split_dataset,
    topk_identity, validate_feasibility, BrConfig, CapacityConfig, Error, Format, Matching,
    PreferenceProfile, Report, Role, Scores, Split,
};

use crate::config::{CapSpec, Exhaustion, Reranker, Scorer, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, write_text};

pub const SPLIT_FILE: &str = "split.csv";
pub const SCORES_FILE: &str = "scores.csv";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const TRACE_FILE: &str = "trace.csv";

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn lower_bound(split: &Split, k: usize) -> usize {
    let data = split.source();
    CapacityConfig::lower_bound(data.n_users(), k, data.n_items())
}

fn load_source(s: &Settings) -> CliResult<stable_rerank::Dataset> {
    let path = s.dataset.as_deref().ok_or_else(|| {
        CliError::config("no dataset given (set `dataset` in the config or pass --dataset)")
    })?;
    let format = s.format.unwrap_or_else(|| {
        if path.extension().is_some_and(|e| e == "dat") {
            Format::MovielensDat
        } else {
            Format::Csv
        }
    });
    load_interactions(open(path)?, format).map_err(|e| CliError::at(path, e))
}

fn compute_split(s: &Settings) -> CliResult<Split> {
    let data = load_source(s)?;
    let split = split_dataset(&data, s.ratios, s.seed)?;
    write_atomic(&s.out.join(SPLIT_FILE), |w| split.write_manifest(w))?;
    Ok(split)
}

fn obtain_split(s: &Settings) -> CliResult<Split> {
    let path = s.out.join(SPLIT_FILE);
    if path.exists() {
        read_manifest(open(&path)?).map_err(|e| CliError::at(&path, e))
    } else {
        compute_split(s)
    }
}

fn compute_scores(s: &Settings, split: &Split) -> CliResult<Scores> {
    let scores = match &s.scorer {
        Scorer::Knn(cfg) => knn_scores(&split.train, cfg)?,
        Scorer::External(path) => {
            load_external_scores(open(path)?, &split.train).map_err(|e| CliError::at(path, e))?
        }
    };
    let data = split.source();
    write_atomic(&s.out.join(SCORES_FILE), |w| {
        scores.write(w, data.users(), data.items())
    })?;
    Ok(scores)
}

fn obtain_scores(s: &Settings, split: &Split) -> CliResult<Scores> {
    let path = s.out.join(SCORES_FILE);
    if path.exists() {
        load_external_scores(open(&path)?, &split.train).map_err(|e| CliError::at(&path, e))
    } else {
        compute_scores(s, split)
    }
}

/// Everything the re-rankers need, loaded or computed once.
struct Inputs {
    split: Split,
    scores: Scores,
    prefs: PreferenceProfile,
}

fn inputs(s: &Settings) -> CliResult<Inputs> {
    let split = obtain_split(s)?;
    let scores = obtain_scores(s, &split)?;
    let prefs = build_preferences(&scores, None, s.completion)?;
    Ok(Inputs {
        split,
        scores,
        prefs,
    })
}

fn read_cap_file(path: &Path, k: usize, split: &Split) -> CliResult<CapacityConfig> {
    let items = split.source().items();
    let mut caps = vec![None; items.len()];
    for (n, line) in BufReader::new(open(path)?).lines().enumerate() {
        let at = |msg: String| CliError::data(format!("{}:{}: {msg}", path.display(), n + 1));
        let line = line.map_err(|e| at(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || (n == 0 && line == "item,cap") {
            continue;
        }
        let Some((id, cap)) = line.split_once(',') else {
            return Err(at("expected item,cap".into()));
        };
        let item = items
            .index_of(id.trim())
            .ok_or_else(|| at(format!("unknown item {id:?}")))?;
        let cap: usize = cap
            .trim()
            .parse()
            .map_err(|_| at(format!("bad cap {cap:?}")))?;
        if caps[item].replace(cap).is_some() {
            return Err(at(format!("item {id:?} listed twice")));
        }
    }
    let caps = caps
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                CliError::data(format!("{}: no cap for item {:?}", path.display(), items.id(i)))
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    CapacityConfig::new(k, caps).map_err(|e| CliError::at(path, e))
}

fn resolve_caps(spec: &CapSpec, k: usize, split: &Split) -> CliResult<CapacityConfig> {
    let n_items = split.source().n_items();
    match spec {
        CapSpec::Uniform(c) => Ok(CapacityConfig::uniform(k, *c, n_items)?),
        CapSpec::LowerBound => Ok(CapacityConfig::uniform(k, lower_bound(split, k), n_items)?),
        CapSpec::File(path) => read_cap_file(path, k, split),
    }
}

/// Adds the lower-bound hint to capacity failures.
fn explain(e: Error, split: &Split, k: usize) -> CliError {
    explain_ref(&e, split, k)
}

fn explain_ref(e: &Error, split: &Split, k: usize) -> CliError {
    let hint = matches!(e, Error::InfeasibleCapacity { .. });
    let mut out = CliError::from_ref(e);
    if hint {
        let data = split.source();
        out.message = format!(
            "{}; a uniform cap cannot be smaller (lower bound) than ceil({} users * k = {k} / {} items) = {}",
            out.message,
            data.n_users(),
            data.n_items(),
            lower_bound(split, k)
        );
    }
    out
}

enum Method {
    Identity,
    Br(BrConfig<f64>),
    Mmda(CapacityConfig),
}

struct Plan {
    method: &'static str,
    params: String,
    run: Method,
}

impl Plan {
    fn new(r: &Reranker, s: &Settings, split: &Split) -> CliResult<Self> {
        Ok(match r {
            Reranker::Identity => Plan {
                method: "identity",
                params: String::new(),
                run: Method::Identity,
            },
            Reranker::Br(alpha) => Plan {
                method: "br",
                params: format!("alpha={alpha}"),
                run: Method::Br(BrConfig::new(*alpha)?),
            },
            Reranker::Mmda(spec) => {
                let caps = resolve_caps(spec, s.k, split)?;
                let params = match spec {
                    CapSpec::File(p) => format!(
                        "caps={}",
                        p.file_stem().map_or("file".into(), |f| f.to_string_lossy())
                    ),
                    _ => format!("cap={}", caps.cap(0)),
                };
                Plan {
                    method: "mmda",
                    params,
                    run: Method::Mmda(caps),
                }
            }
        })
    }

    fn caps(&self) -> Option<&CapacityConfig> {
        match &self.run {
            Method::Mmda(c) => Some(c),
            _ => None,
        }
    }

    fn file(&self, out: &Path) -> PathBuf {
        let label = if self.params.is_empty() {
            self.method.to_owned()
        } else {
            format!("{}_{}", self.method, self.params)
        };
        let label: String = label
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '-' })
            .collect();
        out.join(format!("matching_{label}.csv"))
    }

    fn execute(&self, s: &Settings, inp: &Inputs) -> CliResult<Matching> {
        match &self.run {
            Method::Identity => Ok(topk_identity(&inp.prefs, s.k)?),
            Method::Br(cfg) => Ok(bayesian_rerank(&inp.scores, cfg, s.k, s.completion)?),
            Method::Mmda(caps) => {
                let m = match s.exhaustion {
                    Exhaustion::Fail => mmda_rerank(&inp.prefs, caps),
                    Exhaustion::Fill => mmda_rerank_filled(&inp.prefs, caps, &inp.scores).map(|f| {
                        if !f.filled_users.is_empty() {
                            eprintln!(
                                "warning: {} {}: {} user(s) ran out of preferences and were topped up by score",
                                self.method,
                                self.params,
                                f.filled_users.len()
                            );
                        }
                        f.matching
                    }),
                }
                .map_err(|e| explain(e, &inp.split, s.k))?;
                Ok(m.sorted_by_preference(&inp.prefs))
            }
        }
    }
}

fn plans(s: &Settings, split: &Split) -> CliResult<Vec<Plan>> {
    s.rerankers.iter().map(|r| Plan::new(r, s, split)).collect()
}

pub fn split(s: &Settings) -> CliResult<()> {
    let split = compute_split(s)?;
    let data = split.source();
    println!(
        "split: {} users, {} items; {} train, {} validation, {} test -> {}",
        data.n_users(),
        data.n_items(),
        split.part(Role::Train).len(),
        split.part(Role::Validation).len(),
        split.part(Role::Test).len(),
        s.out.join(SPLIT_FILE).display()
    );
    Ok(())
}

pub fn score(s: &Settings) -> CliResult<()> {
    let split = obtain_split(s)?;
    let scores = compute_scores(s, &split)?;
    println!(
        "score: {} scored pairs for {} users -> {}",
        scores.len(),
        scores.n_users(),
        s.out.join(SCORES_FILE).display()
    );
    Ok(())
}

pub fn rerank(s: &Settings) -> CliResult<()> {
    let inp = inputs(s)?;
    let plans = plans(s, &inp.split)?;
    for caps in plans.iter().filter_map(Plan::caps) {
        validate_feasibility(&inp.prefs, caps).map_err(|e| explain(e, &inp.split, s.k))?;
    }
    let data = inp.split.source();
    for plan in &plans {
        let m = plan.execute(s, &inp)?;
        let path = plan.file(&s.out);
        write_atomic(&path, |w| m.write_csv(w, data.users(), data.items()))?;
        println!("rerank: {} {} -> {}", plan.method, plan.params, path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportRow<'a> {
    method: &'a str,
    params: &'a str,
    #[serde(flatten)]
    report: Report,
}

pub fn evaluate_cmd(s: &Settings) -> CliResult<()> {
    let inp = inputs(s)?;
    let data = inp.split.source();
    let mut rows = Vec::new();
    for plan in plans(s, &inp.split)? {
        let path = plan.file(&s.out);
        if !path.exists() {
            return Err(CliError::data(format!(
                "{}: matching file not found (run `rerank` first)",
                path.display()
            )));
        }
        let m = Matching::read_csv(open(&path)?, data.users(), data.items())
            .map_err(|e| CliError::at(&path, e))?;
        let report = evaluate(&m, &inp.prefs, &inp.split, s.k, plan.caps())
            .map_err(|e| CliError::at(&path, e))?;
        rows.push((plan, report));
    }
    let mut table = format!("{REPORT_CSV_HEADER}\n");
    for (plan, r) in &rows {
        table.push_str(&r.csv_row(plan.method, &plan.params));
        table.push('\n');
    }
    let json_rows: Vec<ReportRow> = rows
        .iter()
        .map(|(p, r)| ReportRow {
            method: p.method,
            params: &p.params,
            report: *r,
        })
        .collect();
    let json = serde_json::to_string_pretty(&json_rows)
        .map_err(|e| CliError::data(format!("serializing report: {e}")))?;
    write_text(&s.out.join(REPORT_CSV), &table)?;
    write_text(&s.out.join(REPORT_JSON), &(json + "\n"))?;
    print!("{table}");
    Ok(())
}

/// Resolves a cap list to distinct integers in ascending order, warning
/// about duplicates.
pub fn sweep_caps(specs: &[CapSpec], lb: usize) -> Vec<usize> {
    let mut caps: Vec<usize> = specs
        .iter()
        .map(|c| match c {
            CapSpec::Uniform(c) => *c,
            _ => lb,
        })
        .collect();
    caps.sort_unstable();
    let before = caps.len();
    caps.dedup();
    if caps.len() < before {
        eprintln!(
            "warning: {} duplicate cap(s) removed from the sweep",
            before - caps.len()
        );
    }
    caps
}

pub fn sweep(s: &Settings) -> CliResult<()> {
    let specs = s.sweep_caps.as_deref().ok_or_else(|| {
        CliError::config("sweep needs a cap list (set `caps` in the config or pass --caps)")
    })?;
    if specs.is_empty() {
        return Err(CliError::config("the sweep cap list is empty"));
    }
    let inp = inputs(s)?;
    let lb = lower_bound(&inp.split, s.k);
    let caps = sweep_caps(specs, lb);
    let n_items = inp.split.source().n_items();
    let rows: Vec<(usize, Result<(Report, &str), Error>)> = caps
        .par_iter()
        .map(|&cap| {
            let row = (|| {
                let cfg = CapacityConfig::uniform(s.k, cap, n_items)?;
                let (m, status) = match (mmda_rerank(&inp.prefs, &cfg), s.exhaustion) {
                    (Ok(m), _) => (m, "ok"),
                    (Err(Error::ExhaustedPreferences { .. }), Exhaustion::Fill) => {
                        (mmda_rerank_filled(&inp.prefs, &cfg, &inp.scores)?.matching, "filled")
                    }
                    (Err(e), _) => return Err(e),
                };
                let m = m.sorted_by_preference(&inp.prefs);
                Ok((evaluate(&m, &inp.prefs, &inp.split, s.k, Some(&cfg))?, status))
            })();
            (cap, row)
        })
        .collect();

    let mut table = format!("{REPORT_CSV_HEADER},status\n");
    let mut failed = 0;
    for (cap, row) in rows.iter() {
        match row {
            Ok((r, status)) => {
                table.push_str(&r.csv_row("mmda", &format!("cap={cap}")));
                table.push_str(&format!(",{status}\n"));
            }
            Err(e) => {
                failed += 1;
                let status = match e {
                    Error::ExhaustedPreferences { .. } => "exhausted",
                    _ => "infeasible",
                };
                eprintln!("warning: cap {cap}: {}", explain_ref(e, &inp.split, s.k));
                table.push_str(&format!("mmda,cap={cap}{},{status}\n", ",".repeat(8)));
            }
        }
    }
    write_text(&s.out.join(SWEEP_FILE), &table)?;
    println!(
        "sweep: {} caps ({} failed, lower bound {lb}) -> {}",
        rows.len(),
        failed,
        s.out.join(SWEEP_FILE).display()
    );
    Ok(())
}

pub fn trace(s: &Settings) -> CliResult<()> {
    let inp = inputs(s)?;
    let caps = resolve_caps(&s.cap, s.k, &inp.split)?;
    let (_, trace) = mmda_trace::<f64>(&inp.prefs, &caps, s.interval)
        .map_err(|e| explain(e, &inp.split, s.k))?;
    let path = s.out.join(TRACE_FILE);
    write_atomic(&path, |w| trace.write_csv(w))?;
    let last = trace.snapshots.last();
    println!(
        "trace: {} snapshots every {} proposals, {} proposals in total -> {}",
        trace.snapshots.len(),
        s.interval,
        last.map_or(0, |l| l.proposals),
        path.display()
    );
    Ok(())
}
