//! Monthly schedule search.
//!
//! Every call first runs cheap infeasibility certificates on the hard
//! instances (per-row automata, count ranges, day-level pigeonhole). If none
//! fires, a branch and bound in lexicographic (day, staff, symbol) order runs
//! under a node budget; when that budget is spent without a proof, a
//! late-acceptance local search takes over. Whatever comes back is
//! re-evaluated from scratch before it is reported.

mod exact;
mod local;
mod model;
mod rows;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::compile::CompiledSet;
use crate::error::{Error, Result};
use crate::model::{MonthId, Roster, ShiftSymbol, StaffId};

use self::model::Model;
use self::rows::RowAutomaton;

/// Largest instance [`brute_force_oracle`] accepts.
pub const ORACLE_CELL_LIMIT: usize = 20;

/// Deterministic work limits. Wall-clock budgets are layered on top through
/// the stop callback of [`solve_with_stop`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Branch-and-bound nodes before falling back to local search.
    pub max_nodes: u64,
    pub restarts: u32,
    pub moves_per_restart: u64,
    /// Moves spent on the soft objective once hard-feasible.
    pub polish_moves: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_nodes: 400_000,
            restarts: 6,
            moves_per_restart: 3_000_000,
            polish_moves: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleProblem {
    pub month: MonthId,
    /// Planning horizon `1..=days`; the month's length unless a test cuts it short.
    pub days: u32,
    pub staff: Vec<StaffId>,
    /// Symbol order for tie-breaking; must contain Off.
    pub shifts: Vec<ShiftSymbol>,
    pub constraints: CompiledSet,
    pub time_budget_secs: u64,
    pub seed: u64,
    pub limits: SearchLimits,
}

impl ScheduleProblem {
    /// Full-month problem with a 60 s budget and seed 0.
    pub fn new(month: MonthId, staff: Vec<StaffId>, shifts: Vec<ShiftSymbol>, constraints: CompiledSet) -> Self {
        ScheduleProblem {
            month,
            days: month.last_day(),
            staff,
            shifts,
            constraints,
            time_budget_secs: 60,
            seed: 0,
            limits: SearchLimits::default(),
        }
    }

    pub fn cells(&self) -> usize {
        self.staff.len() * self.days as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Infeasibility {
    /// These hard instances cannot hold together.
    Conflict { instances: Vec<u32>, reason: String },
    /// The complete search tree holds no hard-feasible assignment.
    Exhausted,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::Conflict { instances, reason } => {
                write!(f, "{reason} (instances")?;
                for i in instances {
                    write!(f, " {i}")?;
                }
                f.write_str(")")
            }
            Infeasibility::Exhausted => f.write_str("search space exhausted"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible(Infeasibility),
    TimedOut,
}

impl SolveStatus {
    /// Optimal or Feasible.
    pub fn is_ok(&self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible(_) => "infeasible",
            SolveStatus::TimedOut => "timed_out",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub roster: Roster,
    /// Weighted soft violations of `roster`.
    pub objective: u64,
    pub status: SolveStatus,
    /// Hard violations of `roster`; zero whenever the status is ok.
    pub hard_violations: u64,
    pub lower_bound: Option<u64>,
    /// Branch-and-bound nodes and local-search moves spent.
    pub nodes: u64,
    pub moves: u64,
}

struct Prepared {
    model: Model,
    autos: Vec<RowAutomaton>,
}

fn validate(problem: &ScheduleProblem) -> Result<Prepared> {
    if problem.days == 0 || problem.days > problem.month.last_day() {
        return Err(Error::InvalidProblem(format!(
            "horizon of {} days does not fit {}",
            problem.days, problem.month
        )));
    }
    if problem.time_budget_secs == 0 {
        return Err(Error::InvalidProblem("time budget must be positive".into()));
    }
    if !problem.shifts.iter().any(|s| s.is_off()) {
        return Err(Error::InvalidProblem("the shift list must contain Off".into()));
    }
    let model = Model::build(
        &problem.staff,
        problem.days as usize,
        &problem.shifts,
        &problem.constraints,
    )?;
    let autos = (0..model.rows).map(|r| rows::build(&model, r)).collect();
    Ok(Prepared { model, autos })
}

fn decode(problem: &ScheduleProblem, m: &Model, cells: &[u8]) -> Result<Roster> {
    let symbols = cells.iter().map(|&c| m.symbols[c as usize]).collect();
    Roster::with_days(problem.month, problem.days, problem.staff.clone(), symbols)
}

fn schedule(
    problem: &ScheduleProblem,
    p: &Prepared,
    cells: &[u8],
    status: SolveStatus,
    lower: Option<u64>,
) -> Result<Schedule> {
    // The reported numbers always come from a fresh evaluation.
    let t = p.model.totals(cells);
    let status = match status {
        SolveStatus::Optimal | SolveStatus::Feasible if t.hard > 0 => SolveStatus::TimedOut,
        s => s,
    };
    Ok(Schedule {
        roster: decode(problem, &p.model, cells)?,
        objective: t.soft,
        status,
        hard_violations: t.hard,
        lower_bound: lower,
        nodes: 0,
        moves: 0,
    })
}

fn infeasible(problem: &ScheduleProblem, p: &Prepared, why: Infeasibility) -> Result<Schedule> {
    let off = p.model.symbols.iter().position(|s| s.is_off()).unwrap_or(0) as u8;
    let cells = alloc::vec![off; p.model.rows * p.model.days];
    schedule(problem, p, &cells, SolveStatus::Infeasible(why), None)
}

/// Instance ids of the hard patterns and pins that shape row `r`.
fn row_hard_ids(m: &Model, set: &CompiledSet, r: usize) -> BTreeSet<u32> {
    let mut ids = BTreeSet::new();
    for &p in &m.row_patterns[r] {
        if m.patterns[p].hard {
            ids.insert(set.instances[m.patterns[p].inst].id);
        }
    }
    for d in 0..m.days {
        for &p in &m.cell_pins[m.cell(r, d)] {
            if m.pins[p].hard {
                ids.insert(set.instances[m.pins[p].inst].id);
            }
        }
    }
    ids
}

/// Certificates that need no search.
fn certificate(problem: &ScheduleProblem, p: &Prepared) -> Option<Infeasibility> {
    let m = &p.model;
    let set = &problem.constraints;
    let conflict = |ids: BTreeSet<u32>, reason: String| Infeasibility::Conflict {
        instances: ids.into_iter().collect(),
        reason,
    };

    for (r, auto) in p.autos.iter().enumerate() {
        if !auto.feasible() {
            return Some(conflict(
                row_hard_ids(m, set, r),
                format!(
                    "no row for staff {} satisfies its hard patterns and pins",
                    problem.staff[r]
                ),
            ));
        }
        for (j, &c) in auto.counts.iter().enumerate() {
            let cc = &m.counts[c];
            let (lo, hi) = auto.range[j];
            if (hi as u32) < cc.lo || (lo as u32) > cc.hi {
                let mut ids = row_hard_ids(m, set, r);
                ids.insert(set.instances[cc.inst].id);
                return Some(conflict(
                    ids,
                    format!(
                        "staff {} can reach between {lo} and {hi} matching days, outside {}..{}",
                        problem.staff[r], cc.lo, cc.hi
                    ),
                ));
            }
        }
    }

    // Per day: every set of symbols needs at least its summed hard lower
    // bounds in rows able to take one of them, and at most its summed upper
    // bounds of rows forced into them.
    let n_sym = m.symbols.len();
    if n_sym > 10 {
        return None;
    }
    for d in 0..m.days {
        let mut lo = alloc::vec![0u32; n_sym];
        let mut hi = alloc::vec![u32::MAX; n_sym];
        let mut lo_id = alloc::vec![None; n_sym];
        let mut hi_id = alloc::vec![None; n_sym];
        for &c in &m.day_demands[d] {
            let dc = &m.demands[c];
            if !dc.hard {
                continue;
            }
            if dc.lo > lo[dc.sym] {
                lo[dc.sym] = dc.lo;
                lo_id[dc.sym] = Some(set.instances[dc.inst].id);
            }
            if dc.hi < hi[dc.sym] {
                hi[dc.sym] = dc.hi;
                hi_id[dc.sym] = Some(set.instances[dc.inst].id);
            }
            if dc.lo > dc.hi {
                return Some(conflict(
                    [set.instances[dc.inst].id].into(),
                    format!("demand on day {} has an empty range {}..{}", d + 1, dc.lo, dc.hi),
                ));
            }
        }
        for subset in 1u32..(1 << n_sym) {
            let need: u64 = (0..n_sym).filter(|s| subset >> s & 1 == 1).map(|s| lo[s] as u64).sum();
            let cap: u64 = (0..n_sym).filter(|s| subset >> s & 1 == 1).map(|s| hi[s] as u64).sum();
            let able: Vec<usize> = (0..m.rows).filter(|&r| p.autos[r].support[d] & subset != 0).collect();
            let forced: Vec<usize> = (0..m.rows).filter(|&r| p.autos[r].support[d] & !subset == 0).collect();
            let short = need > able.len() as u64;
            let over = (forced.len() as u64) > cap;
            if !(short || over) {
                continue;
            }
            let ids_of = |v: &[Option<u32>]| -> BTreeSet<u32> {
                (0..n_sym)
                    .filter(|s| subset >> s & 1 == 1)
                    .filter_map(|s| v[s])
                    .collect()
            };
            let names: Vec<String> = (0..n_sym)
                .filter(|s| subset >> s & 1 == 1)
                .map(|s| format!("{}", m.symbols[s]))
                .collect();
            let mut ids = ids_of(if short { &lo_id } else { &hi_id });
            // The rows that cannot help (or cannot leave) are fixed by their own hard instances.
            for r in 0..m.rows {
                let excluded = if short { !able.contains(&r) } else { forced.contains(&r) };
                if excluded && p.autos[r].support[d].count_ones() < n_sym as u32 {
                    ids.extend(row_hard_ids(m, set, r));
                }
            }
            let reason = if short {
                format!(
                    "day {}: {need} staff needed on {} but only {} can take it",
                    d + 1,
                    names.join("/"),
                    able.len()
                )
            } else {
                format!(
                    "day {}: {} staff are forced onto {} but at most {cap} are allowed",
                    d + 1,
                    forced.len(),
                    names.join("/")
                )
            };
            return Some(conflict(ids, reason));
        }
    }
    None
}

/// [`solve_with_stop`] without an external stop signal.
pub fn solve(problem: &ScheduleProblem) -> Result<Schedule> {
    solve_with_stop(problem, &|| false)
}

/// Solves `problem`, polling `stop` periodically; once it returns true the
/// best point found so far is reported.
pub fn solve_with_stop(problem: &ScheduleProblem, stop: &dyn Fn() -> bool) -> Result<Schedule> {
    let p = validate(problem)?;
    if let Some(why) = certificate(problem, &p) {
        return infeasible(problem, &p, why);
    }
    let m = &p.model;
    let bb = exact::branch_and_bound(m, &p.autos, problem.limits.max_nodes, stop);
    if bb.complete {
        return match bb.best {
            Some((cells, cost)) => schedule(problem, &p, &cells, SolveStatus::Optimal, Some(cost)),
            None => infeasible(problem, &p, Infeasibility::Exhausted),
        }
        .map(|s| Schedule { nodes: bb.nodes, ..s });
    }
    if let Some((cells, 0)) = &bb.best {
        // Nothing can beat zero.
        return schedule(problem, &p, cells, SolveStatus::Optimal, Some(0)).map(|s| Schedule { nodes: bb.nodes, ..s });
    }
    let budget = local::Budget {
        restarts: problem.limits.restarts,
        moves: problem.limits.moves_per_restart,
        polish_moves: problem.limits.polish_moves,
    };
    let ls = local::search(m, &p.autos, problem.seed, budget, stop);
    let mut cells = ls.cells;
    let mut hard = ls.hard;
    let mut soft = ls.soft;
    if let Some((bc, bs)) = bb.best {
        if hard > 0 || bs as i64 <= soft {
            cells = bc;
            hard = 0;
            soft = bs as i64;
        }
    }
    let status = if hard > 0 {
        SolveStatus::TimedOut
    } else if soft == 0 {
        SolveStatus::Optimal
    } else {
        SolveStatus::Feasible
    };
    let lower = (soft == 0 && hard == 0).then_some(0);
    let out = schedule(problem, &p, &cells, status, lower)?;
    Ok(Schedule {
        nodes: bb.nodes,
        moves: ls.moves,
        ..out
    })
}

/// Exhaustive enumeration for instances of at most [`ORACLE_CELL_LIMIT`]
/// cells. Among optimal assignments the lexicographically first in
/// (day, staff, symbol) order is returned, the same tie-break `solve` uses.
pub fn brute_force_oracle(problem: &ScheduleProblem) -> Result<Schedule> {
    let cells = problem.cells();
    if cells > ORACLE_CELL_LIMIT {
        return Err(Error::InstanceTooLarge {
            cells,
            limit: ORACLE_CELL_LIMIT,
        });
    }
    let p = validate(problem)?;
    let (best, t) = exact::enumerate(&p.model);
    if t.hard > 0 {
        return infeasible(problem, &p, Infeasibility::Exhausted);
    }
    schedule(problem, &p, &best, SolveStatus::Optimal, Some(t.soft))
}

/// Violation count per instance of `set`, in instance order. Pattern sets
/// count offending windows, everything else is 0 or 1.
pub fn check_violations(roster: &Roster, set: &CompiledSet) -> Result<Vec<(u32, u64)>> {
    let mut symbols: Vec<ShiftSymbol> = roster.symbols().into_iter().collect();
    for c in &set.instances {
        use crate::compile::{Body, ShiftFilter};
        let extra: Vec<ShiftSymbol> = match &c.body {
            Body::AllowedPatternSet { allowed, .. } => allowed.iter().flatten().copied().collect(),
            Body::CountRange {
                shift: ShiftFilter::Shift(s),
                ..
            } => alloc::vec![*s],
            Body::DemandRange { shift, .. } => alloc::vec![*shift],
            Body::RequestPin { symbol, .. } => alloc::vec![*symbol],
            _ => Vec::new(),
        };
        for s in extra {
            if !symbols.contains(&s) {
                symbols.push(s);
            }
        }
    }
    if symbols.len() > model::MAX_SYMBOLS {
        return Err(Error::DimensionMismatch(format!(
            "{} distinct shift symbols",
            symbols.len()
        )));
    }
    let m = Model::build(roster.staff(), roster.last_day() as usize, &symbols, set).map_err(|e| match e {
        Error::InvalidProblem(s) => Error::DimensionMismatch(s),
        e => e,
    })?;
    let cells: Vec<u8> = roster
        .cells()
        .iter()
        .map(|s| symbols.iter().position(|x| x == s).unwrap() as u8)
        .collect();
    let v = m.violations(&cells);
    Ok(set.instances.iter().zip(v).map(|(c, n)| (c.id, n)).collect())
}

/// Hard and weighted soft totals of `roster` under `set`.
pub fn totals(roster: &Roster, set: &CompiledSet) -> Result<(u64, u64)> {
    let v = check_violations(roster, set)?;
    let mut hard = 0;
    let mut soft = 0;
    for (c, (_, n)) in set.instances.iter().zip(v) {
        match c.hardness {
            crate::compile::Hardness::Hard => hard += n,
            crate::compile::Hardness::Soft(w) => soft += w as u64 * n,
        }
    }
    Ok((hard, soft))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{Body, Hardness, Origin, Provenance, Scope, ShiftFilter};
    use alloc::vec;

    fn sym(s: &str) -> ShiftSymbol {
        s.parse().unwrap()
    }

    fn prov() -> Provenance {
        Provenance {
            template: None,
            duration: None,
            origin: Origin::Manual,
        }
    }

    fn month() -> MonthId {
        MonthId::new(2023, 4).unwrap()
    }

    fn problem(staff: &[&str], days: u32, shifts: &[&str], set: CompiledSet) -> ScheduleProblem {
        let mut p = ScheduleProblem::new(
            month(),
            staff.iter().map(|s| StaffId::from(*s)).collect(),
            shifts.iter().map(|s| sym(s)).collect(),
            set,
        );
        p.days = days;
        p
    }

    #[test]
    fn single_allowed_window_forces_all_off() {
        let mut set = CompiledSet::default();
        set.push(
            Hardness::Hard,
            Body::AllowedPatternSet {
                scope: Scope::All,
                length: 2,
                allowed: [vec![sym("-"), sym("-")]].into(),
            },
            prov(),
        );
        let p = problem(&["a"], 2, &["-", "D"], set);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, 0);
        assert!(s.roster.cells().iter().all(|c| c.is_off()));
        assert_eq!(brute_force_oracle(&p).unwrap().roster, s.roster);
    }

    #[test]
    fn pigeonhole_names_the_demand() {
        let mut set = CompiledSet::default();
        let id = set.push(
            Hardness::Hard,
            Body::DemandRange {
                day: 1,
                shift: sym("D"),
                lower: 5,
                upper: 5,
            },
            prov(),
        );
        let p = problem(&["a", "b", "c", "d"], 1, &["-", "D"], set);
        let s = solve(&p).unwrap();
        match s.status {
            SolveStatus::Infeasible(Infeasibility::Conflict { instances, .. }) => assert_eq!(instances, vec![id]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            brute_force_oracle(&p).unwrap().status,
            SolveStatus::Infeasible(_)
        ));
    }

    #[test]
    fn oracle_refuses_large_instances() {
        let p = problem(&["a", "b", "c"], 7, &["-", "D"], CompiledSet::default());
        assert_eq!(
            brute_force_oracle(&p).unwrap_err(),
            Error::InstanceTooLarge { cells: 21, limit: 20 }
        );
    }

    #[test]
    fn count_violations_against_soft_and_hard_ranges() {
        let staff = vec![StaffId::from("10006")];
        let mut cells = vec![sym("D"); 16];
        cells.extend(vec![sym("-"); 14]);
        let roster = Roster::new(month(), staff, cells).unwrap();
        let mut set = CompiledSet::default();
        let count = |lower, upper| Body::CountRange {
            staff: StaffId::from("10006"),
            shift: ShiftFilter::Shift(sym("D")),
            lower,
            upper,
        };
        set.push(Hardness::Soft(1), count(15, 15), prov());
        set.push(Hardness::Hard, count(14, 16), prov());
        assert_eq!(check_violations(&roster, &set).unwrap(), vec![(0, 1), (1, 0)]);
        assert_eq!(totals(&roster, &set).unwrap(), (0, 1));
    }

    #[test]
    fn understaffed_day_is_one_hard_violation() {
        let staff: Vec<StaffId> = ["a", "b", "c"].iter().map(|s| StaffId::from(*s)).collect();
        let roster = Roster::filled(month(), staff, sym("D")).unwrap();
        let mut set = CompiledSet::default();
        set.push(
            Hardness::Hard,
            Body::DemandRange {
                day: 3,
                shift: sym("D"),
                lower: 8,
                upper: 10,
            },
            prov(),
        );
        assert_eq!(totals(&roster, &set).unwrap(), (1, 0));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let roster = Roster::filled(month(), vec![StaffId::from("a")], sym("D")).unwrap();
        let mut set = CompiledSet::default();
        set.push(
            Hardness::Hard,
            Body::AssignExactlyOne {
                staff: StaffId::from("zz"),
                day: 1,
            },
            prov(),
        );
        assert!(matches!(
            check_violations(&roster, &set),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
