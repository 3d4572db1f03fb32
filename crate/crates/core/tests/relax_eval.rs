use std::collections::BTreeSet;

use shiftlearn_core::compile::{Body, CompiledSet, Hardness, Origin, Provenance, Scope};
use shiftlearn_core::eval::{compare_runs, evaluate_roster, Class, EvaluationConfig, HourLimits};
use shiftlearn_core::relax::{solve_with_relaxation, RelaxStep};
use shiftlearn_core::solver::{brute_force_oracle, ScheduleProblem, SolveStatus};
use shiftlearn_core::template::TemplateId;
use shiftlearn_core::{DemandTable, Error, MonthId, RequestSet, Roster, ShiftSymbol, StaffId, Weekday};

fn sym(s: &str) -> ShiftSymbol {
    s.parse().unwrap()
}

fn month() -> MonthId {
    MonthId::new(2023, 6).unwrap()
}

/// Windows over {-, D} of length `n` with at most `max_d` day shifts.
fn capped(n: usize, max_d: usize) -> BTreeSet<Vec<ShiftSymbol>> {
    (0..1u32 << n)
        .filter(|bits| bits.count_ones() as usize <= max_d)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { sym("D") } else { sym("-") })
                .collect()
        })
        .collect()
}

fn t2(set: &mut CompiledSet, n: usize, max_d: usize) {
    set.push(
        Hardness::Hard,
        Body::AllowedPatternSet {
            scope: Scope::All,
            length: n as u32,
            allowed: capped(n, max_d),
        },
        Provenance {
            template: Some(TemplateId::T2),
            duration: Some(n as u32),
            origin: Origin::Mined,
        },
    );
}

fn demand_d(set: &mut CompiledSet, day: u32) {
    set.push(
        Hardness::Hard,
        Body::DemandRange {
            day,
            shift: sym("D"),
            lower: 1,
            upper: 1,
        },
        Provenance {
            template: Some(TemplateId::T4),
            duration: Some(1),
            origin: Origin::Mined,
        },
    );
}

fn one_staff(set: CompiledSet, days: u32) -> ScheduleProblem {
    let mut p = ScheduleProblem::new(month(), vec![StaffId::from("10001")], vec![sym("-"), sym("D")], set);
    p.days = days;
    p
}

#[test]
fn feasible_problem_needs_no_rung() {
    let mut set = CompiledSet::default();
    t2(&mut set, 3, 2);
    let (s, trace) = solve_with_relaxation(&one_staff(set, 6)).unwrap();
    assert!(s.status.is_ok());
    assert!(trace.steps.is_empty());
    assert_eq!(trace.attempts, 1);
    assert_eq!(trace.to_string(), "relaxed_T2_lengths=[]; dropped_requests=[]");
}

/// Days 1..6 must be D; a 7-day window allows at most five.
fn blocked_at_seven() -> CompiledSet {
    let mut set = CompiledSet::default();
    t2(&mut set, 7, 5);
    t2(&mut set, 6, 6);
    for d in 1..=6 {
        demand_d(&mut set, d);
    }
    set
}

#[test]
fn seven_day_set_is_demoted_first() {
    let p = one_staff(blocked_at_seven(), 8);

    // The oracle agrees the instance is infeasible at 7 and feasible at 6.
    assert!(matches!(
        brute_force_oracle(&p).unwrap().status,
        SolveStatus::Infeasible(_)
    ));
    let mut at6 = p.clone();
    at6.constraints.instances[0].hardness = Hardness::Soft(1);
    assert!(brute_force_oracle(&at6).unwrap().status.is_ok());

    let (s, trace) = solve_with_relaxation(&p).unwrap();
    assert!(s.status.is_ok());
    assert_eq!(trace.demoted_lengths(), vec![7]);
    assert_eq!(trace.to_string(), "relaxed_T2_lengths=[7]; dropped_requests=[]");
    assert_eq!(s.objective, brute_force_oracle(&at6).unwrap().objective);
}

#[test]
fn conflicting_request_is_dropped_after_all_demotions() {
    let mut set = CompiledSet::default();
    t2(&mut set, 4, 3);
    t2(&mut set, 3, 2);
    demand_d(&mut set, 3);
    set.push(
        Hardness::Hard,
        Body::RequestPin {
            staff: StaffId::from("10001"),
            day: 3,
            symbol: ShiftSymbol::off(),
        },
        Provenance {
            template: None,
            duration: None,
            origin: Origin::Default,
        },
    );
    let p = one_staff(set, 5);
    let (s, trace) = solve_with_relaxation(&p).unwrap();
    assert!(s.status.is_ok());
    assert_eq!(
        trace.to_string(),
        "relaxed_T2_lengths=[4,3]; dropped_requests=[(10001,3)]"
    );
    assert!(matches!(trace.steps.last(), Some(RelaxStep::DropRequest { .. })));
    assert_eq!(trace.unmet_requests().len(), 1);
    assert_eq!(trace.attempts, 4);
}

#[test]
fn ladder_runs_out_when_nothing_is_left() {
    let mut set = CompiledSet::default();
    set.push(
        Hardness::Hard,
        Body::DemandRange {
            day: 1,
            shift: sym("D"),
            lower: 2,
            upper: 2,
        },
        Provenance {
            template: None,
            duration: None,
            origin: Origin::Manual,
        },
    );
    let (s, trace) = solve_with_relaxation(&one_staff(set, 2)).unwrap();
    assert!(matches!(s.status, SolveStatus::Infeasible(_)));
    assert!(trace.steps.is_empty());
}

fn catalogue(staff: &[StaffId], m: MonthId) -> EvaluationConfig {
    let mut table = DemandTable::new();
    for w in Weekday::ALL {
        table.set(w, sym("D"), 0);
    }
    EvaluationConfig {
        working_days: Some(staff.iter().map(|s| (s.clone(), (0, 31))).collect()),
        feasible: Some(
            staff
                .iter()
                .map(|s| (s.clone(), [sym("D"), sym("1N")].into()))
                .collect(),
        ),
        hours: Some(HourLimits {
            per_shift: [(sym("D"), 8), (sym("1N"), 16)].into(),
            limit: staff.iter().map(|s| (s.clone(), 400)).collect(),
        }),
        demand: Some(table),
        requests: Some(RequestSet::new(m)),
        ..EvaluationConfig::new()
    }
}

#[test]
fn all_off_schedule_is_clean() {
    let staff = vec![StaffId::from("a"), StaffId::from("b")];
    let r = Roster::filled(month(), staff.clone(), ShiftSymbol::off()).unwrap();
    let rep = evaluate_roster(&r, &catalogue(&staff, month()), "off").unwrap();
    assert!(Class::ALL.iter().all(|&c| rep.count(c) == 0), "{:?}", rep.counts);
}

#[test]
fn missing_section_names_its_class() {
    let staff = vec![StaffId::from("a")];
    let r = Roster::filled(month(), staff.clone(), ShiftSymbol::off()).unwrap();
    let mut cfg = catalogue(&staff, month());
    cfg.hours = None;
    assert_eq!(
        evaluate_roster(&r, &cfg, "x").unwrap_err(),
        Error::MissingSection {
            section: "hours",
            class: "H3"
        }
    );
}

fn roster_with_row(row: &str) -> (Vec<StaffId>, Roster) {
    let staff = vec![StaffId::from("a")];
    let mut cells: Vec<ShiftSymbol> = row.split(',').map(sym).collect();
    cells.resize(30, ShiftSymbol::off());
    (staff.clone(), Roster::new(month(), staff, cells).unwrap())
}

#[test]
fn comparison_flags_the_better_run() {
    // Five D in a row is one window over the limit; eight is four.
    let (staff, a) = roster_with_row("-,D,D,D,D,D,-");
    let (_, b) = roster_with_row("-,D,D,D,D,D,D,D,D,-");
    let cfg = catalogue(&staff, month());
    let ra = evaluate_roster(&a, &cfg, "with").unwrap();
    let rb = evaluate_roster(&b, &cfg, "without").unwrap();
    assert_eq!((ra.count(Class::S5), rb.count(Class::S5)), (1, 4));
    let cmp = compare_runs(&ra, &rb).unwrap();
    let s5 = cmp.rows.iter().find(|r| r.class == Class::S5).unwrap();
    assert_eq!(s5.delta, -3);
    assert!(s5.flagged);

    let same = compare_runs(&ra, &ra).unwrap();
    assert!(same.rows.iter().all(|r| r.delta == 0 && !r.flagged));
}

#[test]
fn hard_difference_between_feasible_runs_is_refused() {
    let (staff, a) = roster_with_row("-,-");
    let (_, b) = roster_with_row("-,1N,-,-");
    let cfg = catalogue(&staff, month());
    let ra = evaluate_roster(&a, &cfg, "a").unwrap();
    let rb = evaluate_roster(&b, &cfg, "b").unwrap();
    assert_eq!(rb.count(Class::H5), 1);
    assert_eq!(compare_runs(&ra, &rb).unwrap_err(), Error::HardMismatch { class: "H5" });
}

#[test]
fn month_mismatch_is_refused() {
    let (staff, a) = roster_with_row("-");
    let cfg = catalogue(&staff, month());
    let ra = evaluate_roster(&a, &cfg, "a").unwrap();
    let mut rb = ra.clone();
    rb.month = month().next();
    assert!(matches!(compare_runs(&ra, &rb), Err(Error::MonthMismatch { .. })));
}

#[test]
fn splitting_a_long_day_run_lowers_s5() {
    let (staff, a) = roster_with_row("D,D,D,D,D,D,D,D,D,D");
    let cfg = catalogue(&staff, month());
    let before = evaluate_roster(&a, &cfg, "a").unwrap().count(Class::S5);
    for i in 0..10 {
        let mut b = a.clone();
        b.set(0, i + 1, ShiftSymbol::off());
        let after = evaluate_roster(&b, &cfg, "b").unwrap().count(Class::S5);
        assert!(after < before, "off on day {} gives {after} vs {before}", i + 1);
    }
}
