//! Properties of the margin/flexibility gates and of the extraction loop.

use std::collections::BTreeSet;

use proptest::prelude::*;
use shiftlearn_core::exception::{eligibles, staffing_margin};
use shiftlearn_core::template::{extract_constraints, AggregationKey, ExtractParams, MinedConstraint, TemplateId};
use shiftlearn_core::{DemandTable, MonthId, Rational, RequestSet, Roster, ShiftSymbol, StaffId, Weekday};

const SHIFTS: [&str; 3] = ["-", "D", "1N"];

fn sym(s: &str) -> ShiftSymbol {
    s.parse().unwrap()
}

#[derive(Debug, Clone)]
struct Corpus {
    rosters: Vec<Roster>,
    requests: Vec<RequestSet>,
    demand: DemandTable,
}

fn staff_ids(n: usize) -> Vec<StaffId> {
    (0..n).map(|i| StaffId::new(format!("{}", 10001 + i))).collect()
}

fn corpus() -> impl Strategy<Value = Corpus> {
    (3usize..=6, 1usize..=3)
        .prop_flat_map(|(n, months)| {
            let cells = proptest::collection::vec(
                proptest::collection::vec(
                    prop_oneof![3 => Just(0usize), 4 => Just(1usize), 1 => Just(2usize)],
                    n * 31,
                ),
                months,
            );
            let leaves = proptest::collection::vec(proptest::collection::vec((0..n, 1u32..=28), 0..8), months);
            let demand = proptest::collection::vec((1u32..=2, 0u32..=1), 7);
            (Just(n), cells, leaves, demand)
        })
        .prop_map(|(n, cells, leaves, demand)| {
            let staff = staff_ids(n);
            let mut month = MonthId::new(2023, 1).unwrap();
            let mut rosters = Vec::new();
            let mut requests = Vec::new();
            for (grid, leave) in cells.iter().zip(&leaves) {
                let w = month.last_day() as usize;
                let mut symbols = Vec::new();
                for r in 0..n {
                    symbols.extend(grid[r * 31..r * 31 + w].iter().map(|&i| sym(SHIFTS[i])));
                }
                let mut roster = Roster::new(month, staff.clone(), symbols).unwrap();
                let mut q = RequestSet::new(month);
                for &(r, d) in leave {
                    if q.get(&staff[r], d).is_none() {
                        q.insert(staff[r].clone(), d, ShiftSymbol::off()).unwrap();
                        // Requests are honoured in the history.
                        roster.set(r, d, ShiftSymbol::off());
                    }
                }
                rosters.push(roster);
                requests.push(q);
                month = month.next();
            }
            let mut table = DemandTable::new();
            for (i, &(d, n)) in demand.iter().enumerate() {
                table.set(Weekday::from_index(i), sym("D"), d);
                table.set(Weekday::from_index(i), sym("1N"), n);
            }
            Corpus {
                rosters,
                requests,
                demand: table,
            }
        })
}

fn patterns(c: &[MinedConstraint]) -> BTreeSet<(TemplateId, AggregationKey)> {
    c.iter()
        .filter(|m| matches!(m, MinedConstraint::Pattern { .. }))
        .map(|m| (m.template(), m.key().clone()))
        .collect()
}

fn count_keys(c: &[MinedConstraint]) -> BTreeSet<(TemplateId, AggregationKey)> {
    c.iter()
        .filter(|m| matches!(m, MinedConstraint::Count { .. }))
        .map(|m| (m.template(), m.key().clone()))
        .collect()
}

fn small_params() -> ExtractParams {
    ExtractParams {
        n_max: 4,
        ..ExtractParams::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exclusion_only_removes(c in corpus()) {
        let p = small_params();
        let on = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p, true).unwrap();
        let off = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p, false).unwrap();
        prop_assert!(patterns(&on.constraints).is_subset(&patterns(&off.constraints)));
        prop_assert!(count_keys(&on.constraints).is_subset(&count_keys(&off.constraints)));
    }

    #[test]
    fn raising_tau_c_only_removes_patterns(c in corpus(), a in 0i64..=100, b in 0i64..=100) {
        let (lo, hi) = (a.min(b), a.max(b));
        let p_lo = ExtractParams { tau_c: Rational::new(lo, 100), ..small_params() };
        let p_hi = ExtractParams { tau_c: Rational::new(hi, 100), ..small_params() };
        let x = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p_lo, true).unwrap();
        let y = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p_hi, true).unwrap();
        prop_assert!(patterns(&y.constraints).is_subset(&patterns(&x.constraints)));
        prop_assert_eq!(count_keys(&y.constraints), count_keys(&x.constraints));
    }

    #[test]
    fn count_bounds_are_ordered_and_cover_history(c in corpus()) {
        let e = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &small_params(), false).unwrap();
        for m in &e.constraints {
            if let MinedConstraint::Count { template, key, lower, upper, .. } = m {
                prop_assert!(lower <= upper);
                if *template == TemplateId::T3 {
                    // Without exclusion every month scans every staff member.
                    let staff = key.staff().unwrap();
                    let shift = match key.payload() {
                        shiftlearn_core::template::Payload::Shift(s) => *s,
                        _ => unreachable!(),
                    };
                    for r in &c.rosters {
                        let i = r.staff_index(staff).unwrap();
                        let n = r.row(i).iter().filter(|&&s| s == shift).count() as u32;
                        prop_assert!(*lower <= n && n <= *upper, "{} not in {}..{}", n, lower, upper);
                    }
                }
            }
        }
    }

    #[test]
    fn staff_patterns_generalize_into_the_general_set(c in corpus()) {
        let p = ExtractParams { tau_c: Rational::from_integer(0), ..small_params() };
        let e = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p, true).unwrap();
        let general: BTreeSet<AggregationKey> = e.constraints.iter()
            .filter(|m| m.template() == TemplateId::T2)
            .map(|m| m.key().clone())
            .collect();
        for m in e.constraints.iter().filter(|m| m.template() == TemplateId::T1) {
            prop_assert!(general.contains(&m.key().generalize()), "{}", m);
        }
    }

    #[test]
    fn eligibles_shrink_as_tau_f_grows(c in corpus(), a in -100i64..=100, b in -100i64..=100) {
        let (lo, hi) = (Rational::new(a.min(b), 100), Rational::new(a.max(b), 100));
        for (r, q) in c.rosters.iter().zip(&c.requests) {
            let x = eligibles(r.staff(), r.month(), q, r, lo).unwrap();
            let y = eligibles(r.staff(), r.month(), q, r, hi).unwrap();
            prop_assert!(y.iter().all(|s| x.contains(s)));
        }
    }

    #[test]
    fn margins_ignore_staff_order_and_names(c in corpus(), shift in 0usize..6) {
        let r = &c.rosters[0];
        let q = &c.requests[0];
        let base = staffing_margin(r.month(), q, &c.demand, r.staff()).unwrap();

        // Rotate the staff list and rename everyone.
        let n = r.staff().len();
        let rename = |s: &StaffId| StaffId::new(format!("x{}", s));
        let rotated: Vec<StaffId> = (0..n).map(|i| rename(&r.staff()[(i + shift) % n])).collect();
        let mut q2 = RequestSet::new(r.month());
        for (s, d, v) in q.iter() {
            q2.insert(rename(s), d, v).unwrap();
        }
        let other = staffing_margin(r.month(), &q2, &c.demand, &rotated).unwrap();
        prop_assert_eq!(base.days, other.days);
    }

    #[test]
    fn window_gate_is_the_minimum_over_its_days(c in corpus(), first in 1u32..=25, len in 1u32..=7, t in 50i64..=200) {
        let r = &c.rosters[0];
        let m = staffing_margin(r.month(), &c.requests[0], &c.demand, r.staff()).unwrap();
        let tau = Rational::new(t, 100);
        let last = first + len - 1;
        let each = (first..=last).all(|d| m.margin(d) >= tau);
        prop_assert_eq!(m.passes(first, last, tau), each);
        prop_assert_eq!(m.min_over(first, last) >= tau, each);
    }

    #[test]
    fn extraction_is_deterministic(c in corpus()) {
        let p = small_params();
        let a = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p, true).unwrap();
        let b = extract_constraints(&c.rosters, &c.requests, Some(&c.demand), &p, true).unwrap();
        prop_assert_eq!(a.constraints, b.constraints);
    }
}
