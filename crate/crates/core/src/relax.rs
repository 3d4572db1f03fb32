//! The relaxation ladder: solve; while that fails, demote every hard T2
//! pattern set of the longest remaining length to soft; once no hard T2 set
//! is left, drop hard request pins one at a time.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::compile::{Body, Hardness};
use crate::error::Result;
use crate::model::StaffId;
use crate::solver::{self, Schedule, ScheduleProblem, SolveStatus};
use crate::template::TemplateId;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelaxStep {
    DemoteT2 { length: u32, instances: usize },
    DropRequest { staff: StaffId, day: u32, instance: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxationTrace {
    pub steps: Vec<RelaxStep>,
    pub status: SolveStatus,
    pub attempts: u32,
    /// Dropped requests the final schedule honours anyway.
    pub restored: Vec<(StaffId, u32)>,
}

impl RelaxationTrace {
    pub fn demoted_lengths(&self) -> Vec<u32> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                RelaxStep::DemoteT2 { length, .. } => Some(*length),
                _ => None,
            })
            .collect()
    }

    pub fn dropped_requests(&self) -> Vec<(StaffId, u32)> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                RelaxStep::DropRequest { staff, day, .. } => Some((staff.clone(), *day)),
                _ => None,
            })
            .collect()
    }

    /// Dropped requests the final schedule does not honour.
    pub fn unmet_requests(&self) -> Vec<(StaffId, u32)> {
        self.dropped_requests()
            .into_iter()
            .filter(|r| !self.restored.contains(r))
            .collect()
    }
}

/// `relaxed_T2_lengths=[7,6]; dropped_requests=[(10007,14)]`
impl fmt::Display for RelaxationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("relaxed_T2_lengths=[")?;
        for (i, n) in self.demoted_lengths().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("]; dropped_requests=[")?;
        for (i, (s, d)) in self.dropped_requests().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({s},{d})")?;
        }
        f.write_str("]")?;
        if !self.restored.is_empty() {
            f.write_str("; restored_requests=[")?;
            for (i, (s, d)) in self.restored.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "({s},{d})")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// u_d of each day as the solver sees it: staff minus hard Off pins over the
/// summed hard demand lower bounds. `None` stands for a day with no demand.
pub fn pin_margins(problem: &ScheduleProblem) -> BTreeMap<u32, Option<Rational>> {
    let n = problem.staff.len() as i64;
    let mut off = BTreeMap::<u32, i64>::new();
    let mut req = BTreeMap::<u32, i64>::new();
    for c in problem.constraints.hard() {
        match &c.body {
            Body::RequestPin { day, symbol, .. } if symbol.is_off() => *off.entry(*day).or_default() += 1,
            Body::DemandRange { day, shift, lower, .. } if !shift.is_off() => {
                *req.entry(*day).or_default() += *lower as i64
            }
            _ => {}
        }
    }
    (1..=problem.days)
        .map(|d| {
            let r = req.get(&d).copied().unwrap_or(0);
            let a = n - off.get(&d).copied().unwrap_or(0);
            (d, (r > 0).then(|| Rational::new(a, r)))
        })
        .collect()
}

fn is_hard_t2(c: &crate::compile::ConstraintInstance) -> Option<u32> {
    match (&c.body, c.hardness, c.provenance.template) {
        (Body::AllowedPatternSet { length, .. }, Hardness::Hard, Some(TemplateId::T2)) => Some(*length),
        _ => None,
    }
}

/// Runs the ladder with demoted weight 1 and no external stop.
pub fn solve_with_relaxation(problem: &ScheduleProblem) -> Result<(Schedule, RelaxationTrace)> {
    solve_with_relaxation_stop(problem, 1, &|| false)
}

pub fn solve_with_relaxation_stop(
    problem: &ScheduleProblem,
    demoted_weight: u32,
    stop: &dyn Fn() -> bool,
) -> Result<(Schedule, RelaxationTrace)> {
    let mut current = problem.clone();
    let mut steps = Vec::new();
    let mut attempts = 0u32;

    // Drop order is fixed up front from the unrelaxed problem.
    let margins = pin_margins(problem);
    let mut pins: Vec<(Option<Rational>, StaffId, u32, u32)> = problem
        .constraints
        .hard()
        .filter_map(|c| match &c.body {
            Body::RequestPin { staff, day, .. } => {
                Some((margins.get(day).copied().flatten(), staff.clone(), *day, c.id))
            }
            _ => None,
        })
        .collect();
    // Lowest margin first; days without demand (no margin) last.
    pins.sort_by(|a, b| {
        match (a.0, b.0) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => core::cmp::Ordering::Less,
            (None, Some(_)) => core::cmp::Ordering::Greater,
            (None, None) => core::cmp::Ordering::Equal,
        }
        .then_with(|| (&a.1, a.2).cmp(&(&b.1, b.2)))
    });
    let mut pins = pins.into_iter();
    let mut dropped_bodies = Vec::new();

    loop {
        attempts += 1;
        let schedule = solver::solve_with_stop(&current, stop)?;
        if schedule.status.is_ok() || stop() {
            let mut restored = Vec::new();
            for (staff, day, body) in &dropped_bodies {
                if let Body::RequestPin { symbol, .. } = body {
                    let row = schedule.roster.staff_index(staff);
                    if row.is_some_and(|r| schedule.roster.get(r, *day) == *symbol) {
                        restored.push((staff.clone(), *day));
                    }
                }
            }
            let trace = RelaxationTrace {
                steps,
                status: schedule.status.clone(),
                attempts,
                restored,
            };
            return Ok((schedule, trace));
        }

        if let Some(longest) = current.constraints.instances.iter().filter_map(is_hard_t2).max() {
            let mut count = 0;
            for c in &mut current.constraints.instances {
                if is_hard_t2(c) == Some(longest) {
                    c.hardness = Hardness::Soft(demoted_weight);
                    count += 1;
                }
            }
            steps.push(RelaxStep::DemoteT2 {
                length: longest,
                instances: count,
            });
            continue;
        }

        match pins.next() {
            Some((_, staff, day, id)) => {
                let pos = current.constraints.instances.iter().position(|c| c.id == id).unwrap();
                let removed = current.constraints.instances.remove(pos);
                dropped_bodies.push((staff.clone(), day, removed.body));
                steps.push(RelaxStep::DropRequest {
                    staff,
                    day,
                    instance: id,
                });
            }
            None => {
                let trace = RelaxationTrace {
                    steps,
                    status: schedule.status.clone(),
                    attempts,
                    restored: Vec::new(),
                };
                return Ok((schedule, trace));
            }
        }
    }
}
