//! Branch and bound, local search and the exhaustive oracle against each other.

use std::collections::BTreeSet;

use proptest::prelude::*;
use shiftlearn_core::compile::{Body, CompiledSet, Hardness, Origin, Provenance, Scope, ShiftFilter};
use shiftlearn_core::solver::{self, brute_force_oracle, solve, ScheduleProblem, SearchLimits, SolveStatus};
use shiftlearn_core::template::TemplateId;
use shiftlearn_core::{MonthId, ShiftSymbol, StaffId};

const SHIFTS: [&str; 3] = ["-", "D", "1N"];

fn sym(s: &str) -> ShiftSymbol {
    s.parse().unwrap()
}

fn prov(t: Option<TemplateId>) -> Provenance {
    Provenance {
        template: t,
        duration: None,
        origin: Origin::Mined,
    }
}

#[derive(Debug, Clone)]
enum Gen {
    Pattern {
        hard: bool,
        staff: Option<usize>,
        len: usize,
        allowed: Vec<Vec<usize>>,
    },
    Count {
        hard: bool,
        staff: usize,
        shift: Option<usize>,
        lo: u32,
        hi: u32,
    },
    Demand {
        hard: bool,
        day: u32,
        shift: usize,
        lo: u32,
        hi: u32,
    },
    Pin {
        hard: bool,
        staff: usize,
        day: u32,
        shift: usize,
    },
}

fn gen_constraint(staff: usize, days: u32) -> impl Strategy<Value = Gen> {
    let pattern = (any::<bool>(), proptest::option::of(0..staff), 2usize..=3).prop_flat_map(|(hard, s, len)| {
        proptest::collection::vec(proptest::collection::vec(0usize..3, len), 1..12).prop_map(move |allowed| {
            Gen::Pattern {
                hard,
                staff: s,
                len,
                allowed,
            }
        })
    });
    let count = (
        any::<bool>(),
        0..staff,
        proptest::option::of(1usize..3),
        0..=days,
        0..=days,
    )
        .prop_map(|(hard, staff, shift, a, b)| Gen::Count {
            hard,
            staff,
            shift,
            lo: a.min(b),
            hi: a.max(b),
        });
    let demand = (any::<bool>(), 1..=days, 1usize..3, 0..=staff as u32, 0..=staff as u32).prop_map(
        |(hard, day, shift, a, b)| Gen::Demand {
            hard,
            day,
            shift,
            lo: a.min(b),
            hi: a.max(b),
        },
    );
    let pin = (any::<bool>(), 0..staff, 1..=days, 0usize..3).prop_map(|(hard, staff, day, shift)| Gen::Pin {
        hard,
        staff,
        day,
        shift,
    });
    prop_oneof![pattern, count, demand, pin]
}

fn gen_problem() -> impl Strategy<Value = ScheduleProblem> {
    (1usize..=2, 2u32..=5)
        .prop_flat_map(|(staff, days)| {
            (
                Just(staff),
                Just(days),
                proptest::collection::vec(gen_constraint(staff, days), 0..6),
            )
        })
        .prop_map(|(staff, days, gens)| build(staff, days, &gens))
}

fn build(n_staff: usize, days: u32, gens: &[Gen]) -> ScheduleProblem {
    let staff: Vec<StaffId> = (0..n_staff).map(|i| StaffId::new(format!("{}", 10001 + i))).collect();
    let shifts: Vec<ShiftSymbol> = SHIFTS.iter().map(|s| sym(s)).collect();
    let h = |hard: bool| if hard { Hardness::Hard } else { Hardness::Soft(1) };
    let mut set = CompiledSet::default();
    for g in gens {
        match g {
            Gen::Pattern {
                hard,
                staff: s,
                len,
                allowed,
            } => {
                let scope = match s {
                    Some(i) => Scope::Staff(staff[*i].clone()),
                    None => Scope::All,
                };
                let allowed: BTreeSet<Vec<ShiftSymbol>> =
                    allowed.iter().map(|w| w.iter().map(|&i| shifts[i]).collect()).collect();
                let t = if *hard { TemplateId::T2 } else { TemplateId::T1 };
                set.push(
                    h(*hard),
                    Body::AllowedPatternSet {
                        scope,
                        length: *len as u32,
                        allowed,
                    },
                    prov(Some(t)),
                );
            }
            Gen::Count {
                hard,
                staff: s,
                shift,
                lo,
                hi,
            } => {
                set.push(
                    h(*hard),
                    Body::CountRange {
                        staff: staff[*s].clone(),
                        shift: match shift {
                            Some(i) => ShiftFilter::Shift(shifts[*i]),
                            None => ShiftFilter::Any,
                        },
                        lower: *lo,
                        upper: *hi,
                    },
                    prov(Some(TemplateId::T3)),
                );
            }
            Gen::Demand {
                hard,
                day,
                shift,
                lo,
                hi,
            } => {
                set.push(
                    h(*hard),
                    Body::DemandRange {
                        day: *day,
                        shift: shifts[*shift],
                        lower: *lo,
                        upper: *hi,
                    },
                    prov(Some(TemplateId::T4)),
                );
            }
            Gen::Pin {
                hard,
                staff: s,
                day,
                shift,
            } => {
                set.push(
                    h(*hard),
                    Body::RequestPin {
                        staff: staff[*s].clone(),
                        day: *day,
                        symbol: shifts[*shift],
                    },
                    prov(None),
                );
            }
        }
    }
    let mut p = ScheduleProblem::new(MonthId::new(2023, 5).unwrap(), staff, shifts, set);
    p.days = days;
    p
}

fn ok(s: &SolveStatus) -> bool {
    s.is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn exact_search_matches_the_oracle(p in gen_problem()) {
        let a = solve(&p).unwrap();
        let b = brute_force_oracle(&p).unwrap();
        prop_assert_eq!(ok(&a.status), ok(&b.status));
        if ok(&b.status) {
            prop_assert_eq!(a.status.clone(), SolveStatus::Optimal);
            prop_assert_eq!(a.objective, b.objective);
            // Same tie-break, so the same roster.
            prop_assert_eq!(&a.roster, &b.roster);
            prop_assert_eq!(a.hard_violations, 0);
        }
    }

    #[test]
    fn reported_objective_is_the_recomputed_one(p in gen_problem()) {
        let a = solve(&p).unwrap();
        let (hard, soft) = solver::totals(&a.roster, &p.constraints).unwrap();
        prop_assert_eq!(soft, a.objective);
        prop_assert_eq!(hard, a.hard_violations);
        if a.status.is_ok() {
            prop_assert_eq!(hard, 0);
        }
        // One symbol per cell by representation.
        prop_assert_eq!(a.roster.cells().len(), p.cells());
    }

    #[test]
    fn local_search_never_beats_the_oracle(p in gen_problem(), seed in any::<u64>()) {
        let mut q = p.clone();
        q.seed = seed;
        q.limits = SearchLimits { max_nodes: 0, restarts: 3, moves_per_restart: 20_000, polish_moves: 20_000 };
        let a = solve(&q).unwrap();
        let b = brute_force_oracle(&q).unwrap();
        if a.status.is_ok() {
            prop_assert!(b.status.is_ok());
            prop_assert!(a.objective >= b.objective);
        }
        if !b.status.is_ok() {
            prop_assert!(!a.status.is_ok());
        }
    }

    #[test]
    fn demoting_a_hard_instance_never_raises_the_optimum(p in gen_problem(), pick in any::<prop::sample::Index>()) {
        let hard: Vec<usize> = p.constraints.instances.iter().enumerate()
            .filter(|(_, c)| c.hardness.is_hard()).map(|(i, _)| i).collect();
        prop_assume!(!hard.is_empty());
        let before = brute_force_oracle(&p).unwrap();
        let mut q = p.clone();
        q.constraints.instances[hard[pick.index(hard.len())]].hardness = Hardness::Soft(1);
        let after = brute_force_oracle(&q).unwrap();
        if before.status.is_ok() {
            prop_assert!(after.status.is_ok());
            prop_assert!(after.objective <= before.objective);
        }
    }
}

/// Two staff over five days with a little of everything.
fn fixed_instance() -> ScheduleProblem {
    build(
        2,
        5,
        &[
            Gen::Pattern {
                hard: true,
                staff: None,
                len: 2,
                allowed: vec![
                    vec![0, 0],
                    vec![0, 1],
                    vec![1, 0],
                    vec![1, 1],
                    vec![2, 2],
                    vec![2, 0],
                    vec![0, 2],
                ],
            },
            Gen::Pattern {
                hard: false,
                staff: Some(0),
                len: 3,
                allowed: vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1], vec![2, 2, 0]],
            },
            Gen::Count {
                hard: false,
                staff: 1,
                shift: Some(1),
                lo: 3,
                hi: 3,
            },
            Gen::Demand {
                hard: true,
                day: 3,
                shift: 1,
                lo: 1,
                hi: 1,
            },
            Gen::Pin {
                hard: false,
                staff: 0,
                day: 2,
                shift: 0,
            },
        ],
    )
}

#[test]
fn fixed_instance_agrees_with_oracle_on_fifty_seeds() {
    let p = fixed_instance();
    let want = brute_force_oracle(&p).unwrap();
    assert!(want.status.is_ok());
    for seed in 0..50 {
        let mut q = p.clone();
        q.seed = seed;
        let got = solve(&q).unwrap();
        assert_eq!(got.objective, want.objective, "seed {seed}");
        assert_eq!(got.roster, want.roster, "seed {seed}");
    }
}

#[test]
fn local_search_is_deterministic_per_seed() {
    // Twelve staff over four weeks: far past the node budget.
    let mut gens = vec![Gen::Pattern {
        hard: true,
        staff: None,
        len: 3,
        allowed: (0..27)
            .map(|k| vec![k / 9, k / 3 % 3, k % 3])
            .filter(|w: &Vec<usize>| !(w[0] == 1 && w[1] == 1 && w[2] == 1))
            .collect(),
    }];
    for day in 1..=28 {
        gens.push(Gen::Demand {
            hard: true,
            day,
            shift: 1,
            lo: 4,
            hi: 6,
        });
        gens.push(Gen::Demand {
            hard: false,
            day,
            shift: 2,
            lo: 2,
            hi: 2,
        });
    }
    let mut p = build(12, 28, &gens);
    p.limits = SearchLimits {
        max_nodes: 0,
        restarts: 2,
        moves_per_restart: 200_000,
        polish_moves: 200_000,
    };
    p.seed = 7;
    let a = solve(&p).unwrap();
    let b = solve(&p).unwrap();
    assert_eq!(a, b);
    assert!(a.status.is_ok(), "{:?}", a.status);
}

#[test]
fn stop_signal_is_honoured() {
    let mut p = build(
        12,
        28,
        &[Gen::Demand {
            hard: false,
            day: 1,
            shift: 1,
            lo: 12,
            hi: 12,
        }],
    );
    p.limits.max_nodes = 0;
    let s = solver::solve_with_stop(&p, &|| true).unwrap();
    assert_eq!(s.roster.cells().len(), 12 * 28);
}
