//! Staffing margin and flexibility, the two gates that keep understaffed days
//! and overloaded staff out of mining.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{DemandTable, MonthId, RequestSet, Roster, ShiftSymbol, StaffId, Weekday};
use crate::Rational;

/// Default gate thresholds.
pub fn default_tau_u() -> Rational {
    Rational::new(5, 4)
}

pub fn default_tau_f() -> Rational {
    Rational::new(1, 2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayMargin {
    pub day: u32,
    pub available: u32,
    pub required: u32,
    pub margin: Rational,
}

/// u_d for every day of a month.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginProfile {
    pub month: MonthId,
    pub days: Vec<DayMargin>,
}

impl MarginProfile {
    pub fn margin(&self, d: u32) -> Rational {
        self.days[d as usize - 1].margin
    }

    /// `u_d >= tau_u` for every day of `first..=last`.
    pub fn passes(&self, first: u32, last: u32, tau_u: Rational) -> bool {
        (first..=last).all(|d| self.margin(d) >= tau_u)
    }

    /// Smallest margin over `first..=last`.
    pub fn min_over(&self, first: u32, last: u32) -> Rational {
        (first..=last).map(|d| self.margin(d)).min().expect("non-empty window")
    }
}

/// a_d = |staff| - leave requests on d (counted among `staff` only),
/// r_d = sum of the demand rows for weekday(d).
pub fn staffing_margin(
    month: MonthId,
    requests: &RequestSet,
    demand: &DemandTable,
    staff: &[StaffId],
) -> Result<MarginProfile> {
    let mut days = Vec::with_capacity(month.last_day() as usize);
    for d in 1..=month.last_day() {
        let w = month.weekday(d);
        if !demand.covers(w) {
            return Err(Error::MissingDemand(w));
        }
        let required = demand.total(w);
        if required == 0 {
            return Err(Error::ZeroRequirement { month, day: d });
        }
        let on_leave = requests.leaves_on(d).filter(|s| staff.contains(s)).count() as u32;
        let available = staff.len() as u32 - on_leave;
        days.push(DayMargin {
            day: d,
            available,
            required,
            margin: Rational::new(available as i64, required as i64),
        });
    }
    Ok(MarginProfile { month, days })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flexibility {
    Score(Rational),
    /// The staff member holds no working day in the month; u_f is undefined.
    NeverAssigned,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlexibilityScore {
    pub staff: StaffId,
    pub month: MonthId,
    pub requested: u32,
    pub assigned: u32,
    pub score: Flexibility,
}

impl FlexibilityScore {
    pub fn passes(&self, tau_f: Rational) -> bool {
        matches!(self.score, Flexibility::Score(u) if u >= tau_f)
    }
}

/// u_f = 1 - N_r / N_a with N_a the non-Off days of the historical roster.
pub fn flexibility(
    staff: &StaffId,
    month: MonthId,
    requests: &RequestSet,
    roster: &Roster,
) -> Result<FlexibilityScore> {
    let i = roster
        .staff_index(staff)
        .ok_or_else(|| Error::InvalidProblem(alloc::format!("staff {staff} not in roster for {month}")))?;
    let assigned = roster.row(i).iter().filter(|s| !s.is_off()).count() as u32;
    let requested = requests.leaves_of(staff);
    let score = if assigned == 0 {
        Flexibility::NeverAssigned
    } else {
        Flexibility::Score(Rational::from_integer(1) - Rational::new(requested as i64, assigned as i64))
    };
    Ok(FlexibilityScore {
        staff: staff.clone(),
        month,
        requested,
        assigned,
        score,
    })
}

/// Staff of `staff` with u_f >= tau_f, order preserved.
pub fn eligibles(
    staff: &[StaffId],
    month: MonthId,
    requests: &RequestSet,
    roster: &Roster,
    tau_f: Rational,
) -> Result<Vec<StaffId>> {
    let mut out = Vec::new();
    for s in staff {
        if flexibility(s, month, requests, roster)?.passes(tau_f) {
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Fallback r_d when no demand table is configured: for each (weekday, shift)
/// the smallest headcount ever observed on that weekday across `rosters`.
/// Off is not a demand.
pub fn bootstrap_demand(rosters: &[Roster]) -> DemandTable {
    let mut shifts: Vec<ShiftSymbol> = Vec::new();
    for r in rosters {
        for s in r.symbols() {
            if !s.is_off() && !shifts.contains(&s) {
                shifts.push(s);
            }
        }
    }
    let mut min: BTreeMap<(Weekday, ShiftSymbol), u32> = BTreeMap::new();
    for r in rosters {
        for d in 1..=r.last_day() {
            let w = r.month().weekday(d);
            for &s in &shifts {
                let h = r.headcount(d, s);
                min.entry((w, s)).and_modify(|m| *m = (*m).min(h)).or_insert(h);
            }
        }
    }
    let mut table = DemandTable::new();
    for ((w, s), c) in min {
        table.set(w, s, c);
    }
    table
}
