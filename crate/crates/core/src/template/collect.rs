use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::{
    AggregationKey, ConstraintTemplate, Duration, ExtractionKind, MinedConstraint, Normalization, Payload, StaffScope,
    Target,
};
use crate::error::{Error, Result};
use crate::model::{Roster, ShiftSymbol, StaffId};
use crate::Rational;

/// Multiset of (key, weight) observations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObservationMultiset {
    entries: BTreeMap<(AggregationKey, Rational), u64>,
}

impl ObservationMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: AggregationKey, weight: Rational) {
        *self.entries.entry((key, weight)).or_insert(0) += 1;
    }

    /// Multiset addition.
    pub fn union(&mut self, other: ObservationMultiset) {
        for (k, mu) in other.entries {
            *self.entries.entry(k).or_insert(0) += mu;
        }
    }

    pub fn multiplicity(&self, key: &AggregationKey, weight: Rational) -> u64 {
        self.entries.get(&(key.clone(), weight)).copied().unwrap_or(0)
    }

    pub fn contains_key(&self, key: &AggregationKey) -> bool {
        self.entries.keys().any(|(k, _)| k == key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AggregationKey, Rational, u64)> {
        self.entries.iter().map(|((k, u), mu)| (k, *u, *mu))
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|&m| m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Per-key monthly totals across the months processed so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonthlySummary {
    totals: BTreeMap<AggregationKey, BTreeMap<Rational, u64>>,
    months: u32,
    span: u32,
}

impl MonthlySummary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts one processed month; `span` is the window length used in it.
    pub fn count_month(&mut self, span: u32) {
        self.months += 1;
        self.span = self.span.max(span);
    }

    pub fn months(&self) -> u32 {
        self.months
    }

    /// Monthly totals recorded for `key`, with multiplicity.
    pub fn totals(&self, key: &AggregationKey) -> Vec<(Rational, u64)> {
        self.totals
            .get(key)
            .map(|m| m.iter().map(|(v, mu)| (*v, *mu)).collect())
            .unwrap_or_default()
    }

    pub fn keys(&self) -> impl Iterator<Item = &AggregationKey> {
        self.totals.keys()
    }
}

fn window_len(t: &ConstraintTemplate, roster: &Roster) -> u32 {
    match t.duration {
        Duration::Days(n) => n,
        Duration::Month => roster.last_day(),
    }
}

/// One window's observations. `occurrences[w]` is the divisor used by the
/// WEEKDAY normalization for weekday index `w`.
pub fn collect(
    t: &ConstraintTemplate,
    eligible: &[StaffId],
    shifts: &[ShiftSymbol],
    roster: &Roster,
    first: u32,
    last: u32,
    occurrences: &[u32; 7],
) -> Result<ObservationMultiset> {
    let n = window_len(t, roster);
    if first == 0 || last > roster.last_day() || last + 1 < first || last + 1 - first != n {
        return Err(Error::InvalidProblem(format!(
            "window {first}..={last} does not fit a {n}-day template in {}",
            roster.month()
        )));
    }
    let rows: Vec<(usize, &StaffId)> = eligible
        .iter()
        .map(|s| {
            roster
                .staff_index(s)
                .map(|i| (i, s))
                .ok_or_else(|| Error::InvalidProblem(format!("eligible staff {s} missing from roster")))
        })
        .collect::<Result<_>>()?;
    let mut out = ObservationMultiset::new();
    let one = Rational::from_integer(1);
    match (t.extraction, t.scope) {
        (ExtractionKind::Pattern, StaffScope::One) => {
            for (i, s) in rows {
                let seq = roster.row(i)[(first - 1) as usize..last as usize].to_vec();
                out.add(
                    AggregationKey::compose(t.generality, Some(s), Payload::Sequence(seq)),
                    one,
                );
            }
        }
        (ExtractionKind::Count { target, .. }, StaffScope::One) => {
            for d in first..=last {
                for &(i, s) in &rows {
                    let sym = roster.get(i, d);
                    let wanted = match target {
                        Target::Any => shifts.contains(&sym),
                        Target::Shift(x) => x == sym,
                    };
                    if wanted {
                        out.add(AggregationKey::compose(t.generality, Some(s), Payload::Shift(sym)), one);
                    }
                }
            }
        }
        (ExtractionKind::Count { target, norm }, StaffScope::All) => {
            let targets: Vec<ShiftSymbol> = match target {
                Target::Any => shifts.to_vec(),
                Target::Shift(x) => alloc::vec![x],
            };
            for d in first..=last {
                let w = roster.month().weekday(d);
                for &sym in &targets {
                    let h = rows.iter().filter(|(i, _)| roster.get(*i, d) == sym).count() as i64;
                    let u = match norm {
                        Normalization::Unit => Rational::from_integer(h),
                        Normalization::Weekday => {
                            let occ = occurrences[w.index()];
                            if occ == 0 {
                                return Err(Error::InvalidProblem(format!("no {w} counted in {}", roster.month())));
                            }
                            Rational::new(h, occ as i64)
                        }
                    };
                    out.add(
                        AggregationKey::compose(t.generality, None, Payload::WeekdayShift(w, sym)),
                        u,
                    );
                }
            }
        }
        (ExtractionKind::Pattern, StaffScope::All) => {
            return Err(Error::UnsupportedTemplate(format!("{t:?}")));
        }
    }
    Ok(out)
}

/// Appends one (key, U_key) per key present in the month.
pub fn reduce_month(month_obs: &ObservationMultiset, mut running: MonthlySummary) -> MonthlySummary {
    let mut sums: BTreeMap<&AggregationKey, Rational> = BTreeMap::new();
    for (k, u, mu) in month_obs.iter() {
        *sums.entry(k).or_insert_with(|| Rational::from_integer(0)) += u * Rational::from_integer(mu as i64);
    }
    for (k, total) in sums {
        *running.totals.entry(k.clone()).or_default().entry(total).or_insert(0) += 1;
    }
    running
}

fn floor_u32(r: Rational) -> u32 {
    r.floor().to_integer().max(0) as u32
}

fn ceil_u32(r: Rational) -> u32 {
    r.ceil().to_integer().max(0) as u32
}

/// Patterns survive when their mean monthly occurrence reaches `tau_c`; counts
/// become (floor min, ceil max) bounds with no threshold.
pub fn reduce_final(t: &ConstraintTemplate, summary: &MonthlySummary, tau_c: Rational) -> Result<Vec<MinedConstraint>> {
    if summary.months == 0 {
        return Err(Error::NoMonths);
    }
    let n_m = Rational::from_integer(summary.months as i64);
    let mut out = Vec::new();
    for (key, values) in &summary.totals {
        match t.extraction {
            ExtractionKind::Pattern => {
                let sum: Rational = values
                    .iter()
                    .map(|(v, mu)| *v * Rational::from_integer(*mu as i64))
                    .fold(Rational::from_integer(0), |a, b| a + b);
                if sum / n_m >= tau_c {
                    out.push(MinedConstraint::Pattern {
                        template: t.id,
                        key: key.clone(),
                    });
                }
            }
            ExtractionKind::Count { .. } => {
                let min = *values.keys().next().expect("recorded keys have values");
                let max = *values.keys().next_back().expect("recorded keys have values");
                out.push(MinedConstraint::Count {
                    template: t.id,
                    key: key.clone(),
                    lower: floor_u32(min),
                    upper: ceil_u32(max),
                    span: summary.span,
                });
            }
        }
    }
    Ok(out)
}
