//! Constraint templates and the extraction pipeline (window scan, collect,
//! monthly reduction, final reduction).

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{ShiftSymbol, StaffId, Weekday};

mod collect;
mod extract;

pub use collect::{collect, reduce_final, reduce_month, MonthlySummary, ObservationMultiset};
pub use extract::{extract_constraints, ExtractParams, Extraction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateId {
    T1,
    T2,
    T3,
    T4,
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateId::T1 => "T1",
            TemplateId::T2 => "T2",
            TemplateId::T3 => "T3",
            TemplateId::T4 => "T4",
        })
    }
}

impl core::str::FromStr for TemplateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T1" => Ok(TemplateId::T1),
            "T2" => Ok(TemplateId::T2),
            "T3" => Ok(TemplateId::T3),
            "T4" => Ok(TemplateId::T4),
            other => Err(Error::UnsupportedTemplate(other.into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Duration {
    Days(u32),
    Month,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StaffScope {
    One,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Any,
    Shift(ShiftSymbol),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Normalization {
    Unit,
    Weekday,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtractionKind {
    Pattern,
    Count { target: Target, norm: Normalization },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generality {
    Specific,
    General,
}

/// (δ, σ, Φ, γ) plus the reference id used for provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintTemplate {
    pub id: TemplateId,
    pub duration: Duration,
    pub scope: StaffScope,
    pub extraction: ExtractionKind,
    pub generality: Generality,
}

impl ConstraintTemplate {
    pub fn t1(n: u32) -> Self {
        Self {
            id: TemplateId::T1,
            duration: Duration::Days(n),
            scope: StaffScope::One,
            extraction: ExtractionKind::Pattern,
            generality: Generality::Specific,
        }
    }

    pub fn t2(n: u32) -> Self {
        Self {
            id: TemplateId::T2,
            generality: Generality::General,
            ..Self::t1(n)
        }
    }

    pub fn t3() -> Self {
        Self {
            id: TemplateId::T3,
            duration: Duration::Month,
            scope: StaffScope::One,
            extraction: ExtractionKind::Count {
                target: Target::Any,
                norm: Normalization::Unit,
            },
            generality: Generality::Specific,
        }
    }

    pub fn t4(shift: ShiftSymbol) -> Self {
        Self {
            id: TemplateId::T4,
            duration: Duration::Days(1),
            scope: StaffScope::All,
            extraction: ExtractionKind::Count {
                target: Target::Shift(shift),
                norm: Normalization::Weekday,
            },
            generality: Generality::General,
        }
    }
}

/// T1 and T2 for every length in `n_min..=n_max`, one T3, and one T4 per
/// non-Off shift in `shifts`.
pub fn build_templates(n_min: u32, n_max: u32, shifts: &[ShiftSymbol]) -> Result<Vec<ConstraintTemplate>> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::TemplateRange { n_min, n_max });
    }
    let mut out = Vec::new();
    for n in n_min..=n_max {
        out.push(ConstraintTemplate::t1(n));
        out.push(ConstraintTemplate::t2(n));
    }
    out.push(ConstraintTemplate::t3());
    let mut targets: Vec<ShiftSymbol> = shifts.iter().copied().filter(|s| !s.is_off()).collect();
    targets.sort();
    targets.dedup();
    out.extend(targets.into_iter().map(ConstraintTemplate::t4));
    Ok(out)
}

/// What a key is about: a shift sequence (patterns), a shift (T3) or a
/// weekday/shift pair (T4).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payload {
    Sequence(Vec<ShiftSymbol>),
    Shift(ShiftSymbol),
    WeekdayShift(Weekday, ShiftSymbol),
}

/// Aggregation key. Never carries the month or window position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggregationKey {
    Specific { staff: StaffId, payload: Payload },
    General { payload: Payload },
}

impl AggregationKey {
    pub fn compose(generality: Generality, staff: Option<&StaffId>, payload: Payload) -> Self {
        match (generality, staff) {
            (Generality::Specific, Some(s)) => AggregationKey::Specific {
                staff: s.clone(),
                payload,
            },
            _ => AggregationKey::General { payload },
        }
    }

    pub fn payload(&self) -> &Payload {
        match self {
            AggregationKey::Specific { payload, .. } | AggregationKey::General { payload } => payload,
        }
    }

    pub fn staff(&self) -> Option<&StaffId> {
        match self {
            AggregationKey::Specific { staff, .. } => Some(staff),
            AggregationKey::General { .. } => None,
        }
    }

    /// The same payload with the staff id erased.
    pub fn generalize(&self) -> Self {
        AggregationKey::General {
            payload: self.payload().clone(),
        }
    }
}

/// A mined constraint with the template that produced it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MinedConstraint {
    Pattern {
        template: TemplateId,
        key: AggregationKey,
    },
    Count {
        template: TemplateId,
        key: AggregationKey,
        lower: u32,
        upper: u32,
        /// Days covered by one observation window (31 for a 31-day month).
        span: u32,
    },
}

impl MinedConstraint {
    pub fn template(&self) -> TemplateId {
        match self {
            MinedConstraint::Pattern { template, .. } | MinedConstraint::Count { template, .. } => *template,
        }
    }

    pub fn key(&self) -> &AggregationKey {
        match self {
            MinedConstraint::Pattern { key, .. } | MinedConstraint::Count { key, .. } => key,
        }
    }

    pub fn sequence(&self) -> Option<&[ShiftSymbol]> {
        match self.key().payload() {
            Payload::Sequence(s) => Some(s),
            _ => None,
        }
    }
}

impl MinedConstraint {
    /// Reads one listing line back; `template` comes from the section header.
    pub fn parse(template: TemplateId, line: &str) -> Result<Self> {
        let bad = || Error::InvalidProblem(alloc::format!("cannot read {template} constraint `{line}`"));
        let inner = line
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(bad)?;
        let tokens: Vec<&str> = inner.split(',').map(str::trim).collect();
        let num = |t: &str| t.parse::<u32>().map_err(|_| bad());
        let seq = |ts: &[&str]| -> Result<Vec<ShiftSymbol>> {
            if ts.is_empty() {
                return Err(bad());
            }
            ts.iter().map(|t| t.parse::<ShiftSymbol>()).collect()
        };
        match template {
            TemplateId::T1 => {
                let (staff, rest) = tokens.split_first().ok_or_else(bad)?;
                Ok(MinedConstraint::Pattern {
                    template,
                    key: AggregationKey::Specific {
                        staff: StaffId::new(*staff),
                        payload: Payload::Sequence(seq(rest)?),
                    },
                })
            }
            TemplateId::T2 => Ok(MinedConstraint::Pattern {
                template,
                key: AggregationKey::General {
                    payload: Payload::Sequence(seq(&tokens)?),
                },
            }),
            TemplateId::T3 => {
                let [staff, shift, first, span, lower, upper] = tokens[..] else {
                    return Err(bad());
                };
                if num(first)? != 1 {
                    return Err(bad());
                }
                Ok(MinedConstraint::Count {
                    template,
                    key: AggregationKey::Specific {
                        staff: StaffId::new(staff),
                        payload: Payload::Shift(shift.parse()?),
                    },
                    lower: num(lower)?,
                    upper: num(upper)?,
                    span: num(span)?,
                })
            }
            TemplateId::T4 => {
                let (day, shift, lower, upper) = match tokens[..] {
                    [d, s, v] => (d, s, num(v)?, num(v)?),
                    [d, s, lo, hi] => (d, s, num(lo)?, num(hi)?),
                    _ => return Err(bad()),
                };
                let day: Weekday = day.trim_matches('"').parse()?;
                Ok(MinedConstraint::Count {
                    template,
                    key: AggregationKey::General {
                        payload: Payload::WeekdayShift(day, shift.parse()?),
                    },
                    lower,
                    upper,
                    span: 1,
                })
            }
        }
    }
}

fn write_sequence(f: &mut fmt::Formatter<'_>, seq: &[ShiftSymbol]) -> fmt::Result {
    for (i, s) in seq.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// The line shapes of the mined-constraint listings:
/// `(10005, -, D)`, `(-, D)`, `(10006, D, 1, 31, 15, 15)`, `("Mon.", D, 9)`.
impl fmt::Display for MinedConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        if let Some(staff) = self.key().staff() {
            write!(f, "{staff}, ")?;
        }
        match (self, self.key().payload()) {
            (MinedConstraint::Pattern { .. }, Payload::Sequence(seq)) => write_sequence(f, seq)?,
            (MinedConstraint::Pattern { .. }, Payload::Shift(s)) => write!(f, "{s}")?,
            (MinedConstraint::Pattern { .. }, Payload::WeekdayShift(w, s)) => write!(f, "\"{w}\", {s}")?,
            (MinedConstraint::Count { lower, upper, span, .. }, payload) => {
                match payload {
                    Payload::Sequence(seq) => write_sequence(f, seq)?,
                    Payload::Shift(s) => write!(f, "{s}")?,
                    Payload::WeekdayShift(w, s) => write!(f, "\"{w}\", {s}")?,
                }
                if matches!(payload, Payload::WeekdayShift(..)) {
                    if lower == upper {
                        write!(f, ", {lower}")?;
                    } else {
                        write!(f, ", {lower}, {upper}")?;
                    }
                } else {
                    write!(f, ", 1, {span}, {lower}, {upper}")?;
                }
            }
        }
        f.write_str(")")
    }
}
