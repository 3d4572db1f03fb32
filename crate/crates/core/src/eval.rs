//! Scores a schedule against the interview-style rule catalogue (H1–H5,
//! S1–S6). Nothing here looks at mined constraints; the catalogue is
//! supplied separately.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{DemandTable, MonthId, RequestSet, Roster, ShiftKind, ShiftSymbol, StaffId};
use crate::solver::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    H1,
    H2,
    H3,
    H4,
    H5,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
}

impl Class {
    pub const ALL: [Class; 11] = [
        Class::H1,
        Class::H2,
        Class::H3,
        Class::H4,
        Class::H5,
        Class::S1,
        Class::S2,
        Class::S3,
        Class::S4,
        Class::S5,
        Class::S6,
    ];

    pub fn is_hard(self) -> bool {
        matches!(self, Class::H1 | Class::H2 | Class::H3 | Class::H4 | Class::H5)
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::H1 => "H1",
            Class::H2 => "H2",
            Class::H3 => "H3",
            Class::H4 => "H4",
            Class::H5 => "H5",
            Class::S1 => "S1",
            Class::S2 => "S2",
            Class::S3 => "S3",
            Class::S4 => "S4",
            Class::S5 => "S5",
            Class::S6 => "S6",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Nominal hours per shift and a monthly cap per staff member.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HourLimits {
    pub per_shift: BTreeMap<ShiftSymbol, u32>,
    pub limit: BTreeMap<StaffId, u32>,
}

/// The rule catalogue. Every section is required; a missing one is reported
/// with the class it would have fed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvaluationConfig {
    pub working_days: Option<BTreeMap<StaffId, (u32, u32)>>,
    /// Shifts each staff member may take besides Off.
    pub feasible: Option<BTreeMap<StaffId, BTreeSet<ShiftSymbol>>>,
    pub hours: Option<HourLimits>,
    pub demand: Option<DemandTable>,
    /// Headcount tolerance (below, above) around the demand table.
    pub demand_tolerance: (u32, u32),
    pub requests: Option<RequestSet>,
    /// Longest allowed run of day shifts.
    pub s5_limit: u32,
}

impl EvaluationConfig {
    pub fn new() -> Self {
        EvaluationConfig {
            demand_tolerance: (1, 1),
            s5_limit: 4,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationReport {
    pub schedule_id: String,
    pub month: MonthId,
    /// Schedule status was Optimal or Feasible.
    pub feasible: bool,
    /// One value per class; S4 is the spread of night counts, not a count.
    pub counts: BTreeMap<Class, u64>,
    pub per_staff: BTreeMap<StaffId, BTreeMap<Class, u64>>,
    /// Relaxation trace line, when the schedule came out of the ladder.
    pub trace: Option<String>,
}

impl ViolationReport {
    pub fn count(&self, c: Class) -> u64 {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    pub fn hard_total(&self) -> u64 {
        Class::ALL.iter().filter(|c| c.is_hard()).map(|&c| self.count(c)).sum()
    }
}

fn need<'a, T>(section: &'a Option<T>, name: &'static str, class: &'static str) -> Result<&'a T> {
    section.as_ref().ok_or(Error::MissingSection { section: name, class })
}

fn is_night(s: ShiftSymbol) -> bool {
    s.kind() == ShiftKind::Night
}

fn is_day(s: ShiftSymbol) -> bool {
    s.kind() == ShiftKind::Day
}

/// Maximal runs `(start, len)` (0-based) of cells satisfying `same` pairwise
/// with the run's first cell and `keep`.
fn runs(
    row: &[ShiftSymbol],
    keep: impl Fn(ShiftSymbol) -> bool,
    same: impl Fn(ShiftSymbol, ShiftSymbol) -> bool,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < row.len() {
        if !keep(row[i]) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < row.len() && keep(row[j]) && same(row[i], row[j]) {
            j += 1;
        }
        out.push((i, j - i));
        i = j;
    }
    out
}

/// H5: one violation per run of a single night symbol with odd length.
/// A run touching either end of the month may continue in the neighbouring
/// month and is not counted.
pub fn h5_row(row: &[ShiftSymbol]) -> u64 {
    runs(row, is_night, |a, b| a == b)
        .into_iter()
        .filter(|&(s, n)| n % 2 == 1 && s > 0 && s + n < row.len())
        .count() as u64
}

/// S1 and S2 for one row. S1: the day after a night block is Off. S2: where
/// S1 fails, the block continues with D then Off.
pub fn s1_s2_row(row: &[ShiftSymbol]) -> (u64, u64) {
    let (mut s1, mut s2) = (0, 0);
    for (s, n) in runs(row, is_night, |_, _| true) {
        let end = s + n;
        if end >= row.len() || row[end].is_off() {
            continue;
        }
        s1 += 1;
        let d_ok = is_day(row[end]);
        let off_ok = end + 1 >= row.len() || row[end + 1].is_off();
        if !(d_ok && off_ok) {
            s2 += 1;
        }
    }
    (s1, s2)
}

/// S3: windows (night, Off, night).
pub fn s3_row(row: &[ShiftSymbol]) -> u64 {
    row.windows(3)
        .filter(|w| is_night(w[0]) && w[1].is_off() && is_night(w[2]))
        .count() as u64
}

/// S5: windows of `limit + 1` consecutive day shifts, so a run of length
/// `L > limit` costs `L - limit`.
pub fn s5_row(row: &[ShiftSymbol], limit: u32) -> u64 {
    let w = limit as usize + 1;
    runs(row, is_day, |_, _| true)
        .into_iter()
        .map(|(_, n)| n.saturating_sub(w - 1) as u64)
        .sum()
}

pub fn evaluate(schedule: &Schedule, config: &EvaluationConfig, schedule_id: &str) -> Result<ViolationReport> {
    let mut report = evaluate_roster(&schedule.roster, config, schedule_id)?;
    report.feasible = schedule.status.is_ok();
    Ok(report)
}

/// Evaluation of a bare roster (treated as feasible for comparison purposes).
pub fn evaluate_roster(roster: &Roster, config: &EvaluationConfig, schedule_id: &str) -> Result<ViolationReport> {
    let working = need(&config.working_days, "working_days", "H1")?;
    let feasible = need(&config.feasible, "feasible_shifts", "H2")?;
    let hours = need(&config.hours, "hours", "H3")?;
    let demand = need(&config.demand, "demand", "H4")?;
    let requests = need(&config.requests, "requests", "S6")?;
    if requests.month() != roster.month() {
        return Err(Error::MonthMismatch {
            a: roster.month(),
            b: requests.month(),
        });
    }

    let mut per_staff: BTreeMap<StaffId, BTreeMap<Class, u64>> = BTreeMap::new();
    let mut counts: BTreeMap<Class, u64> = Class::ALL.iter().map(|&c| (c, 0)).collect();
    let mut bump = |staff: Option<&StaffId>, c: Class, n: u64, counts: &mut BTreeMap<Class, u64>| {
        if n == 0 {
            return;
        }
        *counts.get_mut(&c).unwrap() += n;
        if let Some(s) = staff {
            *per_staff.entry(s.clone()).or_default().entry(c).or_default() += n;
        }
    };

    let mut nights: Vec<u64> = Vec::new();
    for (i, staff) in roster.staff().iter().enumerate() {
        let row = roster.row(i);
        let worked = row.iter().filter(|s| !s.is_off()).count() as u32;

        if let Some(&(lo, hi)) = working.get(staff) {
            bump(Some(staff), Class::H1, (worked < lo || worked > hi) as u64, &mut counts);
        }
        if let Some(allowed) = feasible.get(staff) {
            let bad = row.iter().filter(|s| !s.is_off() && !allowed.contains(s)).count();
            bump(Some(staff), Class::H2, bad as u64, &mut counts);
            if allowed.iter().any(|&s| is_night(s)) {
                nights.push(row.iter().filter(|&&s| is_night(s)).count() as u64);
            }
        }
        if let Some(&cap) = hours.limit.get(staff) {
            let total: u32 = row.iter().map(|s| hours.per_shift.get(s).copied().unwrap_or(0)).sum();
            bump(Some(staff), Class::H3, (total > cap) as u64, &mut counts);
        }
        bump(Some(staff), Class::H5, h5_row(row), &mut counts);
        let (s1, s2) = s1_s2_row(row);
        bump(Some(staff), Class::S1, s1, &mut counts);
        bump(Some(staff), Class::S2, s2, &mut counts);
        bump(Some(staff), Class::S3, s3_row(row), &mut counts);
        bump(Some(staff), Class::S5, s5_row(row, config.s5_limit), &mut counts);
    }

    let (tol_lo, tol_hi) = config.demand_tolerance;
    for d in 1..=roster.last_day() {
        let wd = roster.month().weekday(d);
        for (w, shift, required) in demand.iter() {
            if w != wd || shift.is_off() {
                continue;
            }
            let h = roster.headcount(d, shift);
            let bad = h + tol_lo < required || h > required + tol_hi;
            bump(None, Class::H4, bad as u64, &mut counts);
        }
    }

    for (staff, day, symbol) in requests.iter() {
        if day > roster.last_day() {
            continue;
        }
        let Some(i) = roster.staff_index(staff) else { continue };
        bump(
            Some(staff),
            Class::S6,
            (roster.get(i, day) != symbol) as u64,
            &mut counts,
        );
    }

    let spread = match (nights.iter().max(), nights.iter().min()) {
        (Some(a), Some(b)) => a - b,
        _ => 0,
    };
    counts.insert(Class::S4, spread);

    Ok(ViolationReport {
        schedule_id: schedule_id.into(),
        month: roster.month(),
        feasible: true,
        counts,
        per_staff,
        trace: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub class: Class,
    pub a: u64,
    pub b: u64,
    pub delta: i64,
    /// `a` is strictly better than `b`.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub month: MonthId,
    pub a_id: String,
    pub b_id: String,
    pub rows: Vec<ComparisonRow>,
}

pub fn compare_runs(a: &ViolationReport, b: &ViolationReport) -> Result<Comparison> {
    if a.month != b.month {
        return Err(Error::MonthMismatch { a: a.month, b: b.month });
    }
    let mut rows = Vec::new();
    for c in Class::ALL {
        let (x, y) = (a.count(c), b.count(c));
        if c.is_hard() && a.feasible && b.feasible && x != y {
            return Err(Error::HardMismatch { class: c.name() });
        }
        rows.push(ComparisonRow {
            class: c,
            a: x,
            b: y,
            delta: x as i64 - y as i64,
            flagged: x < y,
        });
    }
    Ok(Comparison {
        month: a.month,
        a_id: a.schedule_id.clone(),
        b_id: b.schedule_id.clone(),
        rows,
    })
}
