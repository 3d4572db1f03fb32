//! On-disk formats. Every writer produces bytes that depend only on its input,
//! so reruns with the same seed compare equal with `cmp`.
//!
//! * roster / schedule: `staff,1,2,..,L` then one row per staff member;
//!   schedules carry `# key=value` lines above the header
//! * requests: `staff,day,symbol`
//! * demand: `weekday,shift,count`
//! * mapping: `detailed,abstract`
//! * mined constraints: `# T1`..`# T4` section headers, one constraint per line
//! * manual constraints: `hardness|template|constraint`, e.g. `hard|T1|(10005, 1N, 1N)`

use std::fs;
use std::path::{Path, PathBuf};

use shiftlearn_core::compile::{Hardness, ManualConstraint};
use shiftlearn_core::exception::{Flexibility, FlexibilityScore, MarginProfile};
use shiftlearn_core::model::{abstract_roster, DetailedRoster, ShiftMapping};
use shiftlearn_core::template::{MinedConstraint, TemplateId};
use shiftlearn_core::{DemandTable, MonthId, RequestSet, Roster, ShiftSymbol, StaffId, Weekday};

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Month named by a `YYYY-MM.csv` file.
pub fn month_of(path: &Path) -> Result<MonthId> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
    stem.parse()
        .map_err(|_| CliError::data(path, "file name is not YYYY-MM.csv"))
}

/// The `YYYY-MM.csv` files of `dir`, in month order.
pub fn month_files(dir: &Path) -> Result<Vec<(MonthId, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = Vec::new();
    for e in entries {
        let path = e.map_err(|e| CliError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "csv") {
            if let Ok(m) = month_of(&path) {
                out.push((m, path));
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn month_file(dir: &Path, month: MonthId) -> PathBuf {
    dir.join(format!("{month}.csv"))
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn records(path: &Path, text: &str) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut r = reader(text);
    let header = r
        .headers()
        .map_err(|e| CliError::data(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(|e| CliError::data(path, e.to_string()))?);
    }
    Ok((header, rows))
}

fn expect_header(path: &Path, got: &[String], want: &[&str]) -> Result<()> {
    if got.iter().map(String::as_str).ne(want.iter().copied()) {
        return Err(CliError::data(
            path,
            format!("expected header `{}`, got `{}`", want.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn symbol(path: &Path, s: &str) -> Result<ShiftSymbol> {
    s.parse()
        .map_err(|e: shiftlearn_core::Error| CliError::data(path, e.to_string()))
}

/// Reads a roster grid. Without a mapping the cells must already be abstract
/// symbols; with one, they are detailed codes and get abstracted.
pub fn parse_roster(path: &Path, text: &str, month: MonthId, mapping: Option<&ShiftMapping>) -> Result<Roster> {
    let (header, rows) = records(path, text)?;
    let days = header.len().saturating_sub(1) as u32;
    if header.first().map(String::as_str) != Some("staff") || days == 0 {
        return Err(CliError::data(path, "header must be `staff,1,2,..`"));
    }
    for (i, h) in header[1..].iter().enumerate() {
        if h.parse::<u32>().ok() != Some(i as u32 + 1) {
            return Err(CliError::data(path, format!("day column {} is labelled `{h}`", i + 1)));
        }
    }
    let mut staff = Vec::new();
    let mut codes = Vec::new();
    for rec in &rows {
        if rec.len() != header.len() {
            return Err(CliError::data(
                path,
                format!(
                    "row `{}` has {} cells, expected {}",
                    rec.get(0).unwrap_or(""),
                    rec.len() - 1,
                    days
                ),
            ));
        }
        staff.push(StaffId::new(&rec[0]));
        codes.extend(rec.iter().skip(1).map(str::to_string));
    }
    let roster = match mapping {
        Some(map) => {
            if days != month.last_day() {
                return Err(CliError::data(
                    path,
                    format!("{days} day columns for a {}-day month", month.last_day()),
                ));
            }
            abstract_roster(
                &DetailedRoster {
                    month,
                    staff,
                    cells: codes,
                },
                map,
            )?
        }
        None => {
            let cells = codes.iter().map(|c| symbol(path, c)).collect::<Result<Vec<_>>>()?;
            Roster::with_days(month, days, staff, cells).map_err(|e| CliError::data(path, e.to_string()))?
        }
    };
    Ok(roster)
}

pub fn read_roster(path: &Path, mapping: Option<&ShiftMapping>) -> Result<Roster> {
    parse_roster(path, &read_text(path)?, month_of(path)?, mapping)
}

/// `lines` go above the header as `# ` comments.
pub fn roster_csv(roster: &Roster, lines: &[String]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str("# ");
        out.push_str(l);
        out.push('\n');
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let days = roster.last_day();
    let mut header = vec!["staff".to_string()];
    header.extend((1..=days).map(|d| d.to_string()));
    w.write_record(&header).expect("in-memory write");
    for (i, s) in roster.staff().iter().enumerate() {
        let mut rec = vec![s.to_string()];
        rec.extend(roster.row(i).iter().map(|c| c.to_string()));
        w.write_record(&rec).expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
    out
}

pub fn parse_requests(path: &Path, text: &str, month: MonthId) -> Result<RequestSet> {
    let (header, rows) = records(path, text)?;
    expect_header(path, &header, &["staff", "day", "symbol"])?;
    let mut q = RequestSet::new(month);
    for rec in &rows {
        if rec.len() != 3 {
            return Err(CliError::data(path, format!("expected 3 fields, got {}", rec.len())));
        }
        let day: u32 = rec[1]
            .parse()
            .map_err(|_| CliError::data(path, format!("bad day `{}`", &rec[1])))?;
        if day == 0 || day > month.last_day() {
            return Err(CliError::data(path, format!("day {day} is outside {month}")));
        }
        q.insert(StaffId::new(&rec[0]), day, symbol(path, &rec[2])?)
            .map_err(|e| CliError::data(path, e.to_string()))?;
    }
    Ok(q)
}

pub fn read_requests(path: &Path) -> Result<RequestSet> {
    parse_requests(path, &read_text(path)?, month_of(path)?)
}

pub fn requests_csv(q: &RequestSet) -> String {
    let mut out = String::from("staff,day,symbol\n");
    for (s, d, v) in q.iter() {
        out.push_str(&format!("{s},{d},{v}\n"));
    }
    out
}

pub fn parse_demand(path: &Path, text: &str) -> Result<DemandTable> {
    let (header, rows) = records(path, text)?;
    expect_header(path, &header, &["weekday", "shift", "count"])?;
    let mut t = DemandTable::new();
    for rec in &rows {
        if rec.len() != 3 {
            return Err(CliError::data(path, format!("expected 3 fields, got {}", rec.len())));
        }
        let w: Weekday = rec[0]
            .parse()
            .map_err(|e: shiftlearn_core::Error| CliError::data(path, e.to_string()))?;
        let n: u32 = rec[2]
            .parse()
            .map_err(|_| CliError::data(path, format!("bad count `{}`", &rec[2])))?;
        t.set(w, symbol(path, &rec[1])?, n);
    }
    Ok(t)
}

pub fn read_demand(path: &Path) -> Result<DemandTable> {
    parse_demand(path, &read_text(path)?)
}

pub fn demand_csv(t: &DemandTable) -> String {
    let mut out = String::from("weekday,shift,count\n");
    for (w, s, n) in t.iter() {
        out.push_str(&format!("{},{s},{n}\n", w.token()));
    }
    out
}

pub fn read_mapping(path: &Path) -> Result<ShiftMapping> {
    let text = read_text(path)?;
    let (header, rows) = records(path, &text)?;
    expect_header(path, &header, &["detailed", "abstract"])?;
    let mut m = ShiftMapping::new();
    for rec in &rows {
        if rec.len() != 2 {
            return Err(CliError::data(path, format!("expected 2 fields, got {}", rec.len())));
        }
        m.insert(&rec[0], symbol(path, &rec[1])?);
    }
    Ok(m)
}

/// Constraint listing with one `# Tk` section per template.
pub fn mined_listing(constraints: &[MinedConstraint]) -> String {
    let mut out = String::new();
    for t in [TemplateId::T1, TemplateId::T2, TemplateId::T3, TemplateId::T4] {
        out.push_str(&format!("# {t}\n"));
        for c in constraints.iter().filter(|c| c.template() == t) {
            out.push_str(&format!("{c}\n"));
        }
    }
    out
}

pub fn parse_mined(path: &Path, text: &str) -> Result<Vec<MinedConstraint>> {
    let mut section = None;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            section = Some(
                h.trim()
                    .parse::<TemplateId>()
                    .map_err(|_| CliError::data(path, format!("line {}: `{line}` is not a template header", n + 1)))?,
            );
            continue;
        }
        let t = section
            .ok_or_else(|| CliError::data(path, format!("line {}: constraint before any `# Tk` header", n + 1)))?;
        out.push(MinedConstraint::parse(t, line).map_err(|e| CliError::data(path, format!("line {}: {e}", n + 1)))?);
    }
    Ok(out)
}

pub fn read_mined(path: &Path) -> Result<Vec<MinedConstraint>> {
    parse_mined(path, &read_text(path)?)
}

pub fn parse_manual(path: &Path, text: &str) -> Result<Vec<ManualConstraint>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: String| CliError::data(path, format!("line {}: {m}", n + 1));
        let mut parts = line.splitn(3, '|');
        let (Some(h), Some(t), Some(body)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected `hardness|template|constraint`".into()));
        };
        let hardness = match h.trim() {
            "hard" => Hardness::Hard,
            s => match s.strip_prefix("soft:").and_then(|w| w.parse().ok()) {
                Some(w) => Hardness::Soft(w),
                None if s == "soft" => Hardness::Soft(1),
                None => return Err(bad(format!("hardness `{s}` is neither `hard` nor `soft:<weight>`"))),
            },
        };
        let t: TemplateId = t.parse().map_err(|e: shiftlearn_core::Error| bad(e.to_string()))?;
        let constraint = MinedConstraint::parse(t, body).map_err(|e| bad(e.to_string()))?;
        out.push(ManualConstraint { hardness, constraint });
    }
    Ok(out)
}

/// Key-value lines written above a schedule grid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScheduleMeta {
    pub status: String,
    pub objective: u64,
    pub hard: u64,
    pub trace: Option<String>,
}

impl ScheduleMeta {
    pub fn lines(&self) -> Vec<String> {
        let mut v = vec![format!(
            "status={} objective={} hard={}",
            self.status, self.objective, self.hard
        )];
        if let Some(t) = &self.trace {
            v.push(format!("trace {t}"));
        }
        v
    }

    pub fn is_ok(&self) -> bool {
        matches!(self.status.as_str(), "optimal" | "feasible")
    }
}

pub fn read_schedule(path: &Path) -> Result<(Roster, ScheduleMeta)> {
    let text = read_text(path)?;
    let roster = parse_roster(path, &text, month_of(path)?, None)?;
    let mut meta = ScheduleMeta::default();
    for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
        if let Some(t) = line.strip_prefix("trace ") {
            meta.trace = Some(t.to_string());
            continue;
        }
        for kv in line.split_whitespace() {
            match kv.split_once('=') {
                Some(("status", v)) => meta.status = v.to_string(),
                Some(("objective", v)) => meta.objective = v.parse().unwrap_or(0),
                Some(("hard", v)) => meta.hard = v.parse().unwrap_or(0),
                _ => {}
            }
        }
    }
    if meta.status.is_empty() {
        // A bare roster, e.g. a ground-truth month.
        meta.status = "feasible".into();
    }
    Ok((roster, meta))
}

pub fn margins_csv(profiles: &[MarginProfile], tau_u: shiftlearn_core::Rational) -> String {
    let mut out = String::from("month,day,available,required,u_d,gated\n");
    for p in profiles {
        for d in &p.days {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.month,
                d.day,
                d.available,
                d.required,
                d.margin,
                d.margin < tau_u
            ));
        }
    }
    out
}

pub fn flexibility_csv(scores: &[FlexibilityScore], tau_f: shiftlearn_core::Rational) -> String {
    let mut out = String::from("month,staff,requested,assigned,u_f,excluded\n");
    for s in scores {
        let u = match s.score {
            Flexibility::Score(u) => u.to_string(),
            Flexibility::NeverAssigned => "n/a".into(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.month,
            s.staff,
            s.requested,
            s.assigned,
            u,
            !s.passes(tau_f)
        ));
    }
    out
}
