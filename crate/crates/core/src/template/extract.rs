use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{
    build_templates, collect, reduce_final, reduce_month, AggregationKey, Duration, ExtractionKind, MinedConstraint,
    MonthlySummary, ObservationMultiset, Payload, StaffScope,
};
use crate::error::{Error, Result};
use crate::exception::{self, FlexibilityScore, MarginProfile};
use crate::model::{DemandTable, RequestSet, Roster, ShiftSymbol, StaffId};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractParams {
    pub n_min: u32,
    pub n_max: u32,
    pub tau_u: Rational,
    pub tau_c: Rational,
    pub tau_f: Rational,
}

impl Default for ExtractParams {
    fn default() -> Self {
        Self {
            n_min: 2,
            n_max: 7,
            tau_u: exception::default_tau_u(),
            tau_c: Rational::new(15, 100),
            tau_f: exception::default_tau_f(),
        }
    }
}

/// Mining output plus the audit data that produced it.
#[derive(Debug, Clone)]
pub struct Extraction {
    /// Grouped by template in build order, sorted by key within a template.
    pub constraints: Vec<MinedConstraint>,
    pub margins: Vec<MarginProfile>,
    pub flexibility: Vec<FlexibilityScore>,
    /// The demand table the margins were computed against (bootstrapped when
    /// none was supplied).
    pub demand: DemandTable,
}

struct MonthContext<'a> {
    roster: &'a Roster,
    eligible: Vec<StaffId>,
    gate: Vec<bool>,
    occurrences: [u32; 7],
}

/// The extraction main loop. With `exclusion` off the margin and flexibility
/// gates pass everything; `tau_c` still applies.
pub fn extract_constraints(
    rosters: &[Roster],
    requests: &[RequestSet],
    demand: Option<&DemandTable>,
    params: &ExtractParams,
    exclusion: bool,
) -> Result<Extraction> {
    if rosters.is_empty() {
        return Err(Error::NoMonths);
    }
    for q in requests {
        if !rosters.iter().any(|r| r.month() == q.month()) {
            return Err(Error::RequestMonthMismatch(q.month()));
        }
    }
    let demand = match demand {
        Some(d) => d.clone(),
        None => exception::bootstrap_demand(rosters),
    };

    let mut shifts: BTreeSet<ShiftSymbol> = demand.shifts();
    for r in rosters {
        shifts.extend(r.symbols());
    }
    let shifts: Vec<ShiftSymbol> = shifts.into_iter().filter(|s| !s.is_off()).collect();
    let templates = build_templates(params.n_min, params.n_max, &shifts)?;

    let mut margins = Vec::new();
    let mut flex = Vec::new();
    let mut months = Vec::new();
    for r in rosters {
        let m = r.month();
        let empty = RequestSet::new(m);
        let q = requests.iter().find(|q| q.month() == m).unwrap_or(&empty);
        let profile = exception::staffing_margin(m, q, &demand, r.staff())?;
        let mut eligible = Vec::new();
        for s in r.staff() {
            let f = exception::flexibility(s, m, q, r)?;
            if !exclusion || f.passes(params.tau_f) {
                eligible.push(s.clone());
            }
            flex.push(f);
        }
        let gate: Vec<bool> = profile
            .days
            .iter()
            .map(|d| !exclusion || d.margin >= params.tau_u)
            .collect();
        let mut occurrences = [0u32; 7];
        for d in 1..=r.last_day() {
            if gate[d as usize - 1] {
                occurrences[m.weekday(d).index()] += 1;
            }
        }
        margins.push(profile);
        months.push(MonthContext {
            roster: r,
            eligible,
            gate,
            occurrences,
        });
    }

    let mut constraints = Vec::new();
    for t in &templates {
        let mut summary = MonthlySummary::new();
        for ctx in &months {
            let last_day = ctx.roster.last_day();
            let n = match t.duration {
                Duration::Days(n) => n,
                Duration::Month => last_day,
            };
            summary.count_month(n);
            let mut month_obs = ObservationMultiset::new();
            let mut scanned = false;
            for first in 1..=(last_day + 1).saturating_sub(n) {
                let last = first + n - 1;
                if ctx.gate[(first - 1) as usize..last as usize].iter().all(|&g| g) {
                    scanned = true;
                    month_obs.union(collect(
                        t,
                        &ctx.eligible,
                        &shifts,
                        ctx.roster,
                        first,
                        last,
                        &ctx.occurrences,
                    )?);
                }
            }
            // Zero-count keys: a staff member seen in a scanned month but never
            // on shift s still evidences a monthly total of 0 for s.
            if scanned && matches!(t.extraction, ExtractionKind::Count { .. }) && t.scope == StaffScope::One {
                for s in &ctx.eligible {
                    for &sym in &shifts {
                        let key = AggregationKey::compose(t.generality, Some(s), Payload::Shift(sym));
                        if !month_obs.contains_key(&key) {
                            month_obs.add(key, Rational::from_integer(0));
                        }
                    }
                }
            }
            summary = reduce_month(&month_obs, summary);
        }
        constraints.extend(reduce_final(t, &summary, params.tau_c)?);
    }

    Ok(Extraction {
        constraints,
        margins,
        flexibility: flex,
        demand,
    })
}
