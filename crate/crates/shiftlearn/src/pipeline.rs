//! The four commands as library calls: `gen`, `extract`, `solve`, `evaluate`.
//!
//! Data directory layout (paths come from [`RunConfig`]):
//!
//! ```text
//! demand.csv  catalogue.toml  manifest.json
//! rosters/YYYY-MM.csv     history
//! requests/YYYY-MM.csv    history and months to solve
//! truth/YYYY-MM.csv       ground truth of generated target months
//! out/constraints.txt  out/margins.csv  out/flexibility.csv
//! out/schedules/YYYY-MM.csv  out/reports/YYYY-MM.csv
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use log::{info, warn};
use shiftlearn_core::compile::{compile, CompilePolicy, SoftWeights};
use shiftlearn_core::eval::{compare_runs, evaluate_roster, Comparison, ViolationReport};
use shiftlearn_core::model::ShiftMapping;
use shiftlearn_core::relax::{solve_with_relaxation_stop, RelaxationTrace};
use shiftlearn_core::solver::{Schedule, ScheduleProblem};
use shiftlearn_core::template::{extract_constraints, Extraction};
use shiftlearn_core::{DemandTable, MonthId, RequestSet, Roster, ShiftSymbol};

use crate::catalogue::Catalogue;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::files::{self, ScheduleMeta};
use crate::report;
use crate::synth::{self, Corpus, GenSettings};

/// Writes a generated corpus under `dir`.
pub fn cmd_gen(settings: &GenSettings, dir: &Path) -> Result<Corpus> {
    let corpus = synth::generate(settings)?;
    files::write_text(&dir.join("demand.csv"), &files::demand_csv(&corpus.demand))?;
    for (r, q) in &corpus.history {
        files::write_text(
            &files::month_file(&dir.join("rosters"), r.month()),
            &files::roster_csv(r, &[]),
        )?;
        files::write_text(
            &files::month_file(&dir.join("requests"), q.month()),
            &files::requests_csv(q),
        )?;
    }
    for (r, q) in &corpus.targets {
        files::write_text(
            &files::month_file(&dir.join("truth"), r.month()),
            &files::roster_csv(r, &[]),
        )?;
        files::write_text(
            &files::month_file(&dir.join("requests"), q.month()),
            &files::requests_csv(q),
        )?;
    }
    let manifest = serde_json::to_string_pretty(&corpus.manifest).expect("manifest serializes") + "\n";
    files::write_text(&dir.join("manifest.json"), &manifest)?;
    files::write_text(&dir.join("catalogue.toml"), &corpus.catalogue.to_toml())?;
    files::write_text(
        &dir.join("synthetic.toml"),
        &toml::to_string(settings).expect("settings serializes"),
    )?;
    info!(
        "generated {} history and {} target months in {}",
        corpus.history.len(),
        corpus.targets.len(),
        dir.display()
    );
    Ok(corpus)
}

fn mapping(cfg: &RunConfig) -> Result<Option<ShiftMapping>> {
    cfg.mapping
        .as_ref()
        .map(|p| files::read_mapping(&cfg.path(p)))
        .transpose()
}

/// History rosters in month order.
pub fn load_history(cfg: &RunConfig) -> Result<Vec<Roster>> {
    let dir = cfg.path(&cfg.rosters);
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let map = mapping(cfg)?;
    files::month_files(&dir)?
        .into_iter()
        .map(|(_, p)| files::read_roster(&p, map.as_ref()))
        .collect()
}

fn requests_for(cfg: &RunConfig, month: MonthId) -> Result<Option<RequestSet>> {
    let p = files::month_file(&cfg.path(&cfg.requests), month);
    if p.is_file() {
        files::read_requests(&p).map(Some)
    } else {
        Ok(None)
    }
}

fn demand(cfg: &RunConfig) -> Result<Option<DemandTable>> {
    let p = cfg.path(&cfg.demand);
    if p.is_file() {
        files::read_demand(&p).map(Some)
    } else {
        Ok(None)
    }
}

/// Mines the history and writes the constraint listing and the gate reports.
pub fn cmd_extract(cfg: &RunConfig) -> Result<Extraction> {
    let params = cfg.params()?;
    let rosters = load_history(cfg)?;
    let table = demand(cfg)?;
    if rosters.is_empty() {
        return Err(CliError::Config(format!(
            "no history rosters under {}{}",
            cfg.path(&cfg.rosters).display(),
            if table.is_none() {
                " and no demand file to fall back on"
            } else {
                ""
            }
        )));
    }
    if table.is_none() {
        warn!(
            "no demand file at {}; bootstrapping demand from the history",
            cfg.path(&cfg.demand).display()
        );
    }
    let mut requests = Vec::new();
    for r in &rosters {
        if let Some(q) = requests_for(cfg, r.month())? {
            requests.push(q);
        }
    }
    let started = Instant::now();
    let e = extract_constraints(&rosters, &requests, table.as_ref(), &params, cfg.exclusion)?;
    info!(
        "mined {} constraints from {} months in {:.2?} (exclusion {})",
        e.constraints.len(),
        rosters.len(),
        started.elapsed(),
        if cfg.exclusion { "on" } else { "off" }
    );
    let out = cfg.out_dir();
    files::write_text(&out.join("constraints.txt"), &files::mined_listing(&e.constraints))?;
    files::write_text(&out.join("margins.csv"), &files::margins_csv(&e.margins, params.tau_u))?;
    files::write_text(
        &out.join("flexibility.csv"),
        &files::flexibility_csv(&e.flexibility, params.tau_f),
    )?;
    Ok(e)
}

#[derive(Debug, Clone)]
pub struct SolvedMonth {
    pub month: MonthId,
    pub schedule: Schedule,
    pub trace: RelaxationTrace,
    pub path: PathBuf,
}

/// Months with a request file but no history roster.
pub fn target_months(cfg: &RunConfig) -> Result<Vec<MonthId>> {
    let dir = cfg.path(&cfg.requests);
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let history: BTreeSet<MonthId> = match cfg.path(&cfg.rosters) {
        p if p.is_dir() => files::month_files(&p)?.into_iter().map(|(m, _)| m).collect(),
        _ => BTreeSet::new(),
    };
    Ok(files::month_files(&dir)?
        .into_iter()
        .map(|(m, _)| m)
        .filter(|m| !history.contains(m))
        .collect())
}

/// The compiled problem for one month. Staff come from the latest history
/// roster up to that month.
pub fn build_problem(cfg: &RunConfig, history: &[Roster], month: MonthId) -> Result<ScheduleProblem> {
    let listing = cfg.out_dir().join("constraints.txt");
    if !listing.is_file() {
        return Err(CliError::Config(format!(
            "{} is missing; run `extract` first",
            listing.display()
        )));
    }
    let mined = files::read_mined(&listing)?;
    let requests = requests_for(cfg, month)?.ok_or_else(|| {
        CliError::data(
            files::month_file(&cfg.path(&cfg.requests), month),
            format!("no requests file for {month}, so there is no such month to solve"),
        )
    })?;
    let base = history
        .iter()
        .rev()
        .find(|r| r.month() <= month)
        .or(history.first())
        .ok_or_else(|| CliError::Config("no history roster to take the staff list from".into()))?;

    let mut shifts: BTreeSet<ShiftSymbol> = history.iter().flat_map(|r| r.symbols()).collect();
    shifts.extend(mined.iter().filter_map(|c| c.sequence()).flatten().copied());
    shifts.remove(&ShiftSymbol::off());
    let mut shifts: Vec<ShiftSymbol> = shifts.into_iter().collect();
    shifts.insert(0, ShiftSymbol::off());

    let mut policy = CompilePolicy::new(month, base.staff().to_vec(), requests);
    policy.t3_slack = cfg.t3_slack;
    policy.t4_slack_lo = cfg.t4_slack_lo;
    policy.t4_slack_hi = cfg.t4_slack_hi;
    policy.weights = SoftWeights {
        demoted_t2: cfg.demoted_weight,
        ..SoftWeights::default()
    };
    if let Some(m) = &cfg.manual {
        let p = cfg.path(m);
        policy.manual = files::parse_manual(&p, &files::read_text(&p)?)?;
    }
    let set = compile(&mined, &policy)?;
    for (c, why) in &set.skipped {
        warn!("{month}: skipped {c}: {why}");
    }
    let mut problem = ScheduleProblem::new(month, base.staff().to_vec(), shifts, set);
    problem.time_budget_secs = cfg.time_budget;
    problem.seed = cfg.seed ^ ((month.year() as u64) << 8 | month.month() as u64);
    Ok(problem)
}

pub fn schedule_path(cfg: &RunConfig, month: MonthId) -> PathBuf {
    files::month_file(&cfg.out_dir().join("schedules"), month)
}

fn solve_one(cfg: &RunConfig, history: &[Roster], month: MonthId) -> Result<SolvedMonth> {
    let problem = build_problem(cfg, history, month)?;
    let started = Instant::now();
    let deadline = started + Duration::from_secs(cfg.time_budget);
    let (schedule, trace) = solve_with_relaxation_stop(&problem, cfg.demoted_weight, &|| Instant::now() >= deadline)?;
    info!(
        "{month}: {} objective={} hard={} after {} attempt(s) in {:.2?}; {trace}",
        schedule.status.label(),
        schedule.objective,
        schedule.hard_violations,
        trace.attempts,
        started.elapsed()
    );
    let meta = ScheduleMeta {
        status: schedule.status.label().into(),
        objective: schedule.objective,
        hard: schedule.hard_violations,
        trace: Some(trace.to_string()),
    };
    let path = schedule_path(cfg, month);
    files::write_text(&path, &files::roster_csv(&schedule.roster, &meta.lines()))?;
    Ok(SolvedMonth {
        month,
        schedule,
        trace,
        path,
    })
}

/// Solves `month`, or every target month when `month` is None, on up to
/// `cfg.jobs` threads. Results come back in month order whatever the
/// thread interleaving.
pub fn cmd_solve(cfg: &RunConfig, month: Option<MonthId>) -> Result<Vec<SolvedMonth>> {
    let history = load_history(cfg)?;
    let months = match month {
        Some(m) => vec![m],
        None => target_months(cfg)?,
    };
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SolvedMonth>>>> = Mutex::new((0..months.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.min(months.len()).max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&m) = months.get(i) else { break };
                let r = solve_one(cfg, &history, m);
                results.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every month was taken"))
        .collect()
}

pub fn load_catalogue(cfg: &RunConfig) -> Result<Catalogue> {
    let p = cfg.path(&cfg.catalogue);
    let text = std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    Catalogue::from_toml(&text)
}

/// Scores one schedule file against the catalogue; the report goes to
/// `out/reports/<stem><suffix>.csv`.
pub fn evaluate_file(cfg: &RunConfig, schedule: &Path, id: &str, suffix: &str) -> Result<ViolationReport> {
    let (roster, meta) = files::read_schedule(schedule)?;
    let requests = requests_for(cfg, roster.month())?.unwrap_or_else(|| RequestSet::new(roster.month()));
    let config = load_catalogue(cfg)?.config(demand(cfg)?, Some(requests))?;
    let mut r = evaluate_roster(&roster, &config, id)?;
    r.feasible = meta.is_ok();
    r.trace = meta.trace;
    let stem = schedule.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let dir = cfg.out_dir().join("reports");
    files::write_text(&dir.join(format!("{stem}{suffix}.csv")), &report::report_csv(&r))?;
    files::write_text(
        &dir.join(format!("{stem}{suffix}.staff.csv")),
        &report::per_staff_csv(&r),
    )?;
    Ok(r)
}

/// Evaluates `a`, and `b` against it when given.
pub fn cmd_evaluate(cfg: &RunConfig, a: &Path, b: Option<&Path>) -> Result<(ViolationReport, Option<Comparison>)> {
    let id = |p: &Path| p.display().to_string();
    let ra = evaluate_file(cfg, a, &id(a), "")?;
    let cmp = match b {
        Some(b) => {
            let rb = evaluate_file(cfg, b, &id(b), ".b")?;
            let c = compare_runs(&ra, &rb)?;
            let stem = a.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
            files::write_text(
                &cfg.out_dir().join("reports").join(format!("{stem}.compare.csv")),
                &report::comparison_csv(&c),
            )?;
            Some(c)
        }
        None => None,
    };
    Ok((ra, cmp))
}
