//! The rule catalogue the evaluator scores against, stored as TOML.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use shiftlearn_core::eval::{EvaluationConfig, HourLimits};
use shiftlearn_core::{DemandTable, RequestSet, Roster, ShiftSymbol, StaffId};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalogue {
    /// Headcount tolerance (below, above) for H4.
    pub demand_tolerance: [u32; 2],
    /// Longest run of day shifts before S5 counts.
    pub s5_limit: u32,
    /// H1: allowed working days per month.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub working_days: Option<BTreeMap<String, [u32; 2]>>,
    /// H2: shifts each staff member may take.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible: Option<BTreeMap<String, Vec<String>>>,
    /// H3: hours per shift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hours: Option<BTreeMap<String, u32>>,
    /// H3: monthly hour cap per staff member.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hour_limit: Option<BTreeMap<String, u32>>,
}

fn hours_of(s: ShiftSymbol) -> u32 {
    if s.is_off() {
        0
    } else if s.unit().is_some() {
        16
    } else {
        8
    }
}

impl Catalogue {
    /// Rules read off ground-truth rosters: each staff member's working days
    /// widened by two on both sides, the shifts they ever took, and an hour cap
    /// one night above their busiest month. Day shifts count 8 hours, nights 16.
    pub fn from_truth(rosters: &[&Roster]) -> Self {
        let mut days: BTreeMap<String, [u32; 2]> = BTreeMap::new();
        let mut feasible: BTreeMap<String, BTreeSet<ShiftSymbol>> = BTreeMap::new();
        let mut hours: BTreeMap<String, u32> = BTreeMap::new();
        let mut per_shift = BTreeMap::new();
        for r in rosters {
            for (i, s) in r.staff().iter().enumerate() {
                let row = r.row(i);
                let n = row.iter().filter(|c| !c.is_off()).count() as u32;
                let h: u32 = row.iter().map(|&c| hours_of(c)).sum();
                let e = days.entry(s.to_string()).or_insert([n, n]);
                e[0] = e[0].min(n);
                e[1] = e[1].max(n);
                let hm = hours.entry(s.to_string()).or_insert(h);
                *hm = (*hm).max(h);
                let f = feasible.entry(s.to_string()).or_default();
                for &c in row.iter().filter(|c| !c.is_off()) {
                    f.insert(c);
                    per_shift.insert(c.to_string(), hours_of(c));
                }
            }
        }
        Catalogue {
            demand_tolerance: [1, 1],
            s5_limit: 4,
            working_days: Some(
                days.into_iter()
                    .map(|(s, [a, b])| (s, [a.saturating_sub(2), b + 2]))
                    .collect(),
            ),
            feasible: Some(
                feasible
                    .into_iter()
                    .map(|(s, set)| (s, set.iter().map(|c| c.to_string()).collect()))
                    .collect(),
            ),
            hours: Some(per_shift),
            hour_limit: Some(hours.into_iter().map(|(s, h)| (s, h + 16)).collect()),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("catalogue: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("catalogue serializes")
    }

    /// Sections missing from the file stay `None`, so the evaluator can name
    /// the class it cannot score.
    pub fn config(&self, demand: Option<DemandTable>, requests: Option<RequestSet>) -> Result<EvaluationConfig> {
        let sym = |s: &str| {
            s.parse::<ShiftSymbol>()
                .map_err(|e| CliError::Config(format!("catalogue: {e}")))
        };
        let staff = |m: &BTreeMap<String, _>| m.keys().map(StaffId::new).collect::<Vec<_>>();
        let feasible = match &self.feasible {
            Some(m) => {
                let mut out = BTreeMap::new();
                for (s, v) in m {
                    out.insert(
                        StaffId::new(s),
                        v.iter().map(|c| sym(c)).collect::<Result<BTreeSet<_>>>()?,
                    );
                }
                Some(out)
            }
            None => None,
        };
        let hours = match (&self.hours, &self.hour_limit) {
            (Some(h), Some(l)) => {
                let mut per_shift = BTreeMap::new();
                for (c, n) in h {
                    per_shift.insert(sym(c)?, *n);
                }
                Some(HourLimits {
                    per_shift,
                    limit: staff(l).into_iter().zip(l.values().copied()).collect(),
                })
            }
            _ => None,
        };
        Ok(EvaluationConfig {
            working_days: self
                .working_days
                .as_ref()
                .map(|m| m.iter().map(|(s, [a, b])| (StaffId::new(s), (*a, *b))).collect()),
            feasible,
            hours,
            demand,
            demand_tolerance: (self.demand_tolerance[0], self.demand_tolerance[1]),
            requests,
            s5_limit: self.s5_limit,
        })
    }
}
