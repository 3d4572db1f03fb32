//! Mined constraints to solver instances: T1 soft, T2 hard, T3/T4 exact-as-soft
//! with a widened hard sibling, plus one-shift-per-day and request pins.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{DemandTable, MonthId, RequestSet, ShiftSymbol, StaffId};
use crate::template::{AggregationKey, MinedConstraint, Payload, TemplateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hardness {
    Hard,
    Soft(u32),
}

impl Hardness {
    pub fn is_hard(self) -> bool {
        self == Hardness::Hard
    }
}

impl fmt::Display for Hardness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hardness::Hard => f.write_str("hard"),
            Hardness::Soft(w) => write!(f, "soft:{w}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Mined,
    Default,
    Mirrored,
    Manual,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Mined => "mined",
            Origin::Default => "default",
            Origin::Mirrored => "mirrored",
            Origin::Manual => "manual",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub template: Option<TemplateId>,
    /// Pattern length for pattern instances.
    pub duration: Option<u32>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Staff(StaffId),
    All,
}

/// `Any` counts every non-Off day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShiftFilter {
    Any,
    Shift(ShiftSymbol),
}

impl ShiftFilter {
    pub fn matches(self, s: ShiftSymbol) -> bool {
        match self {
            ShiftFilter::Any => !s.is_off(),
            ShiftFilter::Shift(x) => x == s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Body {
    /// Every length-`length` window of the scoped rows must be one of `allowed`.
    AllowedPatternSet {
        scope: Scope,
        length: u32,
        allowed: BTreeSet<Vec<ShiftSymbol>>,
    },
    CountRange {
        staff: StaffId,
        shift: ShiftFilter,
        lower: u32,
        upper: u32,
    },
    DemandRange {
        day: u32,
        shift: ShiftSymbol,
        lower: u32,
        upper: u32,
    },
    AssignExactlyOne {
        staff: StaffId,
        day: u32,
    },
    RequestPin {
        staff: StaffId,
        day: u32,
        symbol: ShiftSymbol,
    },
}

impl Body {
    /// Staff the body is specific to, if any.
    pub fn staff(&self) -> Option<&StaffId> {
        match self {
            Body::AllowedPatternSet {
                scope: Scope::Staff(s), ..
            }
            | Body::CountRange { staff: s, .. }
            | Body::AssignExactlyOne { staff: s, .. }
            | Body::RequestPin { staff: s, .. } => Some(s),
            _ => None,
        }
    }

    fn with_staff(&self, new: &StaffId) -> Body {
        let mut b = self.clone();
        match &mut b {
            Body::AllowedPatternSet {
                scope: Scope::Staff(s), ..
            }
            | Body::CountRange { staff: s, .. }
            | Body::AssignExactlyOne { staff: s, .. }
            | Body::RequestPin { staff: s, .. } => *s = new.clone(),
            _ => {}
        }
        b
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, seq: &[ShiftSymbol]) -> fmt::Result {
    f.write_str("(")?;
    for (i, s) in seq.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{s}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::AllowedPatternSet { scope, length, allowed } => {
                match scope {
                    Scope::Staff(s) => write!(f, "patterns staff={s} n={length} allowed=")?,
                    Scope::All => write!(f, "patterns staff=* n={length} allowed=")?,
                }
                f.write_str("[")?;
                for (i, seq) in allowed.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write_seq(f, seq)?;
                }
                f.write_str("]")
            }
            Body::CountRange {
                staff,
                shift,
                lower,
                upper,
            } => {
                let sh = match shift {
                    ShiftFilter::Any => String::from("*"),
                    ShiftFilter::Shift(s) => alloc::format!("{s}"),
                };
                write!(f, "count staff={staff} shift={sh} range={lower}..{upper}")
            }
            Body::DemandRange {
                day,
                shift,
                lower,
                upper,
            } => write!(f, "demand day={day} shift={shift} range={lower}..{upper}"),
            Body::AssignExactlyOne { staff, day } => write!(f, "one staff={staff} day={day}"),
            Body::RequestPin { staff, day, symbol } => write!(f, "pin staff={staff} day={day} symbol={symbol}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintInstance {
    pub id: u32,
    pub hardness: Hardness,
    pub body: Body,
    pub provenance: Provenance,
}

/// `hardness|origin|body`, the compiled-dump line.
impl fmt::Display for ConstraintInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tpl = match self.provenance.template {
            Some(t) => alloc::format!("{t}"),
            None => String::from("-"),
        };
        write!(f, "{}|{}:{}|{}", self.hardness, self.provenance.origin, tpl, self.body)
    }
}

/// Compiled instances, hard and soft together; hardness is a tag so the
/// relaxation ladder can move instances without renumbering them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompiledSet {
    pub instances: Vec<ConstraintInstance>,
    /// Mined constraints that produced no instance, with the reason.
    pub skipped: Vec<(MinedConstraint, String)>,
}

impl CompiledSet {
    pub fn hard(&self) -> impl Iterator<Item = &ConstraintInstance> {
        self.instances.iter().filter(|c| c.hardness.is_hard())
    }

    pub fn soft(&self) -> impl Iterator<Item = &ConstraintInstance> {
        self.instances.iter().filter(|c| !c.hardness.is_hard())
    }

    pub fn get(&self, id: u32) -> Option<&ConstraintInstance> {
        self.instances.iter().find(|c| c.id == id)
    }

    fn next_id(&self) -> u32 {
        self.instances.iter().map(|c| c.id + 1).max().unwrap_or(0)
    }

    pub fn push(&mut self, hardness: Hardness, body: Body, provenance: Provenance) -> u32 {
        let id = self.next_id();
        self.instances.push(ConstraintInstance {
            id,
            hardness,
            body,
            provenance,
        });
        id
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SoftWeights {
    pub t1: u32,
    pub t3: u32,
    pub t4: u32,
    /// Weight a T2 pattern set gets once the relaxation ladder demotes it.
    pub demoted_t2: u32,
}

impl Default for SoftWeights {
    fn default() -> Self {
        Self {
            t1: 1,
            t3: 1,
            t4: 1,
            demoted_t2: 1,
        }
    }
}

/// A constraint read from a manual file: a mined-style constraint with its
/// hardness stated explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManualConstraint {
    pub hardness: Hardness,
    pub constraint: MinedConstraint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilePolicy {
    pub month: MonthId,
    pub staff: Vec<StaffId>,
    pub requests: RequestSet,
    pub t3_slack: u32,
    pub t4_slack_lo: u32,
    pub t4_slack_hi: u32,
    pub weights: SoftWeights,
    pub manual: Vec<ManualConstraint>,
    /// Optional staffing table added as hard coverage on every day, widened
    /// by `demand_slack` (below, above).
    pub demand: Option<DemandTable>,
    pub demand_slack: (u32, u32),
}

impl CompilePolicy {
    pub fn new(month: MonthId, staff: Vec<StaffId>, requests: RequestSet) -> Self {
        Self {
            month,
            staff,
            requests,
            t3_slack: 1,
            t4_slack_lo: 1,
            t4_slack_hi: 1,
            weights: SoftWeights::default(),
            manual: Vec::new(),
            demand: None,
            demand_slack: (1, 1),
        }
    }
}

fn prov(template: Option<TemplateId>, duration: Option<u32>, origin: Origin) -> Provenance {
    Provenance {
        template,
        duration,
        origin,
    }
}

/// Pattern sets grouped by (scope, length) so each group becomes one instance.
type PatternGroups = BTreeMap<(Option<TemplateId>, Scope, u32, Hardness), BTreeSet<Vec<ShiftSymbol>>>;

fn pattern_group_key(
    template: TemplateId,
    key: &AggregationKey,
    len: u32,
    h: Hardness,
) -> (Option<TemplateId>, Scope, u32, Hardness) {
    let scope = match key.staff() {
        Some(s) => Scope::Staff(s.clone()),
        None => Scope::All,
    };
    (Some(template), scope, len, h)
}

/// Upper bound of a hard sibling. A shift never seen in any month stays
/// forbidden rather than being opened up by the slack.
fn widen(upper: u32, slack: u32) -> u32 {
    if upper == 0 {
        0
    } else {
        upper + slack
    }
}

pub fn compile(mined: &[MinedConstraint], policy: &CompilePolicy) -> Result<CompiledSet> {
    let mut out = CompiledSet::default();
    let staff_set: BTreeSet<&StaffId> = policy.staff.iter().collect();
    let w = policy.weights;

    let mut groups: PatternGroups = BTreeMap::new();
    let mut manual_groups: PatternGroups = BTreeMap::new();

    let all = mined
        .iter()
        .map(|c| (c, None))
        .chain(policy.manual.iter().map(|m| (&m.constraint, Some(m.hardness))));

    // Count instances are emitted in input order after the pattern groups.
    let mut counts: Vec<(Hardness, Body, Provenance)> = Vec::new();

    for (c, manual) in all {
        let origin = if manual.is_some() {
            Origin::Manual
        } else {
            Origin::Mined
        };
        if let Some(staff) = c.key().staff() {
            if !staff_set.contains(staff) {
                out.skipped.push((
                    c.clone(),
                    alloc::format!("staff {staff} is not on the {} roster", policy.month),
                ));
                continue;
            }
        }
        match c {
            MinedConstraint::Pattern { template, key } => {
                let Payload::Sequence(seq) = key.payload() else {
                    return Err(Error::InvalidProblem(alloc::format!(
                        "pattern constraint without a sequence: {c}"
                    )));
                };
                let len = seq.len() as u32;
                match manual {
                    Some(h) => {
                        manual_groups
                            .entry(pattern_group_key(*template, key, len, h))
                            .or_default()
                            .insert(seq.clone());
                    }
                    None => {
                        let h = match template {
                            TemplateId::T2 => Hardness::Hard,
                            _ => Hardness::Soft(w.t1),
                        };
                        groups
                            .entry(pattern_group_key(*template, key, len, h))
                            .or_default()
                            .insert(seq.clone());
                    }
                }
            }
            MinedConstraint::Count {
                template,
                key,
                lower,
                upper,
                ..
            } => {
                if lower > upper {
                    return Err(Error::InvalidProblem(alloc::format!("count bounds out of order: {c}")));
                }
                let (lower, upper) = (*lower, *upper);
                match (key.staff(), key.payload()) {
                    (Some(staff), Payload::Shift(s)) => {
                        let body = |lo, hi| Body::CountRange {
                            staff: staff.clone(),
                            shift: ShiftFilter::Shift(*s),
                            lower: lo,
                            upper: hi,
                        };
                        let p = prov(Some(*template), None, origin);
                        match manual {
                            Some(h) => counts.push((h, body(lower, upper), p)),
                            None => {
                                counts.push((Hardness::Soft(w.t3), body(lower, upper), p));
                                counts.push((
                                    Hardness::Hard,
                                    body(lower.saturating_sub(policy.t3_slack), widen(upper, policy.t3_slack)),
                                    p,
                                ));
                            }
                        }
                    }
                    (None, Payload::WeekdayShift(wd, s)) => {
                        let p = prov(Some(*template), Some(1), origin);
                        for day in 1..=policy.month.last_day() {
                            if policy.month.weekday(day) != *wd {
                                continue;
                            }
                            let body = |lo, hi| Body::DemandRange {
                                day,
                                shift: *s,
                                lower: lo,
                                upper: hi,
                            };
                            match manual {
                                Some(h) => counts.push((h, body(lower, upper), p)),
                                None => {
                                    counts.push((Hardness::Soft(w.t4), body(lower, upper), p));
                                    counts.push((
                                        Hardness::Hard,
                                        body(
                                            lower.saturating_sub(policy.t4_slack_lo),
                                            widen(upper, policy.t4_slack_hi),
                                        ),
                                        p,
                                    ));
                                }
                            }
                        }
                    }
                    _ => {
                        return Err(Error::InvalidProblem(alloc::format!("unsupported count key: {c}")));
                    }
                }
            }
        }
    }

    for (groups, origin) in [(groups, Origin::Mined), (manual_groups, Origin::Manual)] {
        for ((template, scope, len, h), allowed) in groups {
            out.push(
                h,
                Body::AllowedPatternSet {
                    scope,
                    length: len,
                    allowed,
                },
                prov(template, Some(len), origin),
            );
        }
    }
    for (h, body, p) in counts {
        out.push(h, body, p);
    }
    if let Some(table) = &policy.demand {
        let (lo, hi) = policy.demand_slack;
        for day in 1..=policy.month.last_day() {
            for (wd, shift, count) in table.iter() {
                if wd != policy.month.weekday(day) || shift.is_off() {
                    continue;
                }
                out.push(
                    Hardness::Hard,
                    Body::DemandRange {
                        day,
                        shift,
                        lower: count.saturating_sub(lo),
                        upper: count + hi,
                    },
                    prov(None, Some(1), Origin::Default),
                );
            }
        }
    }
    for staff in &policy.staff {
        for day in 1..=policy.month.last_day() {
            out.push(
                Hardness::Hard,
                Body::AssignExactlyOne {
                    staff: staff.clone(),
                    day,
                },
                prov(None, None, Origin::Default),
            );
        }
    }
    for (staff, day, symbol) in policy.requests.iter() {
        if !staff_set.contains(staff) {
            return Err(Error::InvalidProblem(alloc::format!(
                "request for staff {staff} who is not on the {} roster",
                policy.month
            )));
        }
        out.push(
            Hardness::Hard,
            Body::RequestPin {
                staff: staff.clone(),
                day,
                symbol,
            },
            prov(None, None, Origin::Default),
        );
    }
    Ok(out)
}

/// Profile of a staff member as read off their compiled soft counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaffProfile {
    pub feasible: BTreeSet<ShiftSymbol>,
    pub working_days: u32,
}

/// Feasible shifts are the non-Off shifts whose soft count allows at least one
/// day; the working-day target is the sum of the soft lower bounds.
pub fn staff_profile(set: &CompiledSet, staff: &StaffId) -> StaffProfile {
    let mut feasible = BTreeSet::new();
    let mut working_days = 0;
    for c in set.soft() {
        if let Body::CountRange {
            staff: s,
            shift: ShiftFilter::Shift(sh),
            lower,
            upper,
        } = &c.body
        {
            if s == staff && !sh.is_off() {
                if *upper > 0 {
                    feasible.insert(*sh);
                }
                working_days += lower;
            }
        }
    }
    StaffProfile { feasible, working_days }
}

/// Copies the specific constraints of the closest existing staff member to
/// `new_staff`. Donors must share the feasible-shift set; among them the one
/// with the nearest working-day target wins, ties to the smallest id.
pub fn mirror_for_new_staff(
    set: &CompiledSet,
    new_staff: &StaffId,
    feasible: &BTreeSet<ShiftSymbol>,
    working_days: u32,
) -> Result<(CompiledSet, StaffId)> {
    let mut existing: BTreeSet<&StaffId> = BTreeSet::new();
    for c in &set.instances {
        if let Some(s) = c.body.staff() {
            if s != new_staff {
                existing.insert(s);
            }
        }
    }
    let donor = existing
        .iter()
        .filter_map(|s| {
            let p = staff_profile(set, s);
            (p.feasible == *feasible).then(|| (p.working_days.abs_diff(working_days), (*s).clone()))
        })
        .min()
        .map(|(_, s)| s)
        .ok_or_else(|| Error::NoDonor {
            candidates: existing.iter().map(|s| (*s).clone()).collect(),
        })?;

    let mut out = set.clone();
    let copies: Vec<ConstraintInstance> = set
        .instances
        .iter()
        .filter(|c| c.body.staff() == Some(&donor) && !matches!(c.body, Body::RequestPin { .. }))
        .cloned()
        .collect();
    for c in copies {
        let origin = if matches!(c.body, Body::AssignExactlyOne { .. }) {
            Origin::Default
        } else {
            Origin::Mirrored
        };
        out.push(
            c.hardness,
            c.body.with_staff(new_staff),
            Provenance { origin, ..c.provenance },
        );
    }
    Ok((out, donor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Weekday;
    use crate::template::AggregationKey;
    use alloc::vec;

    fn sym(s: &str) -> ShiftSymbol {
        ShiftSymbol::new(s).unwrap()
    }

    fn t3(staff: &str, s: &str, lo: u32, hi: u32) -> MinedConstraint {
        MinedConstraint::Count {
            template: TemplateId::T3,
            key: AggregationKey::Specific {
                staff: staff.into(),
                payload: Payload::Shift(sym(s)),
            },
            lower: lo,
            upper: hi,
            span: 31,
        }
    }

    fn t1(staff: &str, seq: &[&str]) -> MinedConstraint {
        MinedConstraint::Pattern {
            template: TemplateId::T1,
            key: AggregationKey::Specific {
                staff: staff.into(),
                payload: Payload::Sequence(seq.iter().map(|s| sym(s)).collect()),
            },
        }
    }

    fn policy(staff: &[&str]) -> CompilePolicy {
        let m = MonthId::new(2023, 5).unwrap();
        CompilePolicy::new(m, staff.iter().map(|s| StaffId::from(*s)).collect(), RequestSet::new(m))
    }

    fn ranges(set: &CompiledSet) -> Vec<(Hardness, u32, u32)> {
        set.instances
            .iter()
            .filter_map(|c| match c.body {
                Body::CountRange { lower, upper, .. } | Body::DemandRange { lower, upper, .. } => {
                    Some((c.hardness, lower, upper))
                }
                _ => None,
            })
            .collect()
    }

    #[test]
    fn count_policy() {
        let set = compile(&[t3("10006", "D", 15, 15)], &policy(&["10006"])).unwrap();
        assert_eq!(
            ranges(&set),
            vec![(Hardness::Soft(1), 15, 15), (Hardness::Hard, 14, 16)]
        );
        // Never worked stays forbidden.
        let set = compile(&[t3("10006", "1N", 0, 0)], &policy(&["10006"])).unwrap();
        assert_eq!(ranges(&set), vec![(Hardness::Soft(1), 0, 0), (Hardness::Hard, 0, 0)]);
        let set = compile(&[t3("10006", "1N", 0, 2)], &policy(&["10006"])).unwrap();
        assert_eq!(ranges(&set), vec![(Hardness::Soft(1), 0, 2), (Hardness::Hard, 0, 3)]);
    }

    #[test]
    fn demand_policy_expands_per_weekday() {
        let mon = MinedConstraint::Count {
            template: TemplateId::T4,
            key: AggregationKey::General {
                payload: Payload::WeekdayShift(Weekday::Mon, sym("D")),
            },
            lower: 9,
            upper: 9,
            span: 1,
        };
        let set = compile(core::slice::from_ref(&mon), &policy(&[])).unwrap();
        // May 2023 has five Mondays.
        let r = ranges(&set);
        assert_eq!(r.len(), 10);
        assert_eq!(r[0], (Hardness::Soft(1), 9, 9));
        assert_eq!(r[1], (Hardness::Hard, 8, 10));
        let mut p = policy(&[]);
        p.t4_slack_lo = 1;
        p.t4_slack_hi = 2;
        assert_eq!(ranges(&compile(&[mon], &p).unwrap())[1], (Hardness::Hard, 8, 11));
    }

    #[test]
    fn patterns_group_by_staff_and_length() {
        let mined = vec![
            t1("10005", &["-", "D"]),
            t1("10005", &["D", "D"]),
            t1("10005", &["1N", "-", "D"]),
            MinedConstraint::Pattern {
                template: TemplateId::T2,
                key: AggregationKey::General {
                    payload: Payload::Sequence(vec![sym("-"), sym("D")]),
                },
            },
        ];
        let set = compile(&mined, &policy(&["10005"])).unwrap();
        let pats: Vec<_> = set
            .instances
            .iter()
            .filter_map(|c| match &c.body {
                Body::AllowedPatternSet { scope, length, allowed } => {
                    Some((c.hardness, scope.clone(), *length, allowed.len()))
                }
                _ => None,
            })
            .collect();
        assert!(pats.contains(&(Hardness::Soft(1), Scope::Staff("10005".into()), 2, 2)));
        assert!(pats.contains(&(Hardness::Soft(1), Scope::Staff("10005".into()), 3, 1)));
        assert!(pats.contains(&(Hardness::Hard, Scope::All, 2, 1)));
        // One-shift-per-day defaults for the single staff member.
        assert_eq!(
            set.instances
                .iter()
                .filter(|c| matches!(c.body, Body::AssignExactlyOne { .. }))
                .count(),
            31
        );
    }

    #[test]
    fn requests_become_hard_pins() {
        let mut p = policy(&["10007"]);
        p.requests.insert("10007".into(), 14, ShiftSymbol::off()).unwrap();
        let set = compile(&[], &p).unwrap();
        let pins: Vec<_> = set
            .instances
            .iter()
            .filter(|c| matches!(c.body, Body::RequestPin { .. }))
            .collect();
        assert_eq!(pins.len(), 1);
        assert_eq!(pins[0].hardness, Hardness::Hard);
        assert_eq!(
            alloc::format!("{}", pins[0]),
            "hard|default:-|pin staff=10007 day=14 symbol=-"
        );
        let mut bad = policy(&[]);
        bad.requests.insert("10007".into(), 14, ShiftSymbol::off()).unwrap();
        assert!(compile(&[], &bad).is_err());
    }

    #[test]
    fn mined_for_absent_staff_is_reported() {
        let set = compile(&[t3("99999", "D", 1, 2)], &policy(&["10006"])).unwrap();
        assert_eq!(set.skipped.len(), 1);
    }

    #[test]
    fn manual_constraints_keep_their_hardness() {
        let mut p = policy(&["10006"]);
        p.manual.push(ManualConstraint {
            hardness: Hardness::Hard,
            constraint: t3("10006", "D", 15, 15),
        });
        let set = compile(&[], &p).unwrap();
        assert_eq!(ranges(&set), vec![(Hardness::Hard, 15, 15)]);
        assert_eq!(set.instances[0].provenance.origin, Origin::Manual);
    }

    fn mirror_base() -> CompiledSet {
        let mined = vec![
            t3("10006", "D", 15, 15),
            t3("10006", "1N", 0, 0),
            t1("10006", &["-", "D"]),
            t3("10008", "D", 17, 17),
            t3("10008", "1N", 0, 0),
            t3("10004", "D", 14, 14),
            t3("10004", "1N", 0, 0),
            t3("10001", "D", 5, 5),
            t3("10001", "1N", 10, 10),
        ];
        compile(&mined, &policy(&["10001", "10004", "10006", "10008"])).unwrap()
    }

    #[test]
    fn mirror_picks_nearest_target() {
        let base = mirror_base();
        let feasible: BTreeSet<_> = [sym("D")].into_iter().collect();
        let (out, donor) = mirror_for_new_staff(&base, &"20001".into(), &feasible, 15).unwrap();
        assert_eq!(donor, StaffId::from("10006"));
        let copied: Vec<_> = out
            .instances
            .iter()
            .filter(|c| c.body.staff() == Some(&"20001".into()))
            .collect();
        let donor_count = base.instances.iter().filter(|c| c.body.staff() == Some(&donor)).count();
        assert_eq!(copied.len(), donor_count);
        assert!(copied
            .iter()
            .filter(|c| !matches!(c.body, Body::AssignExactlyOne { .. }))
            .all(|c| c.provenance.origin == Origin::Mirrored));
        // 16 is one day from both 10006 (15) and 10008 (17): the smaller id wins.
        let (_, tie) = mirror_for_new_staff(&base, &"20001".into(), &feasible, 16).unwrap();
        assert_eq!(tie, StaffId::from("10006"));
    }

    #[test]
    fn mirror_needs_matching_shift_set() {
        let base = mirror_base();
        let feasible: BTreeSet<_> = [sym("2N")].into_iter().collect();
        match mirror_for_new_staff(&base, &"20001".into(), &feasible, 15) {
            Err(Error::NoDonor { candidates }) => assert_eq!(candidates.len(), 4),
            other => panic!("expected NoDonor, got {other:?}"),
        }
    }
}
