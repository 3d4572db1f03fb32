use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{MonthId, StaffId, Weekday};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid shift symbol `{0}`")]
    InvalidSymbol(String),

    #[error("invalid month {year}-{month:02}")]
    InvalidMonth { year: i32, month: u32 },

    #[error("unmapped shift code `{code}` for staff {staff} on day {day}")]
    UnmappedCode { code: String, staff: StaffId, day: u32 },

    #[error("roster for {month} has {got} day columns, expected {expected}")]
    RosterWidth {
        month: MonthId,
        got: usize,
        expected: usize,
    },

    #[error("duplicate staff id {0}")]
    DuplicateStaff(StaffId),

    #[error("duplicate request for staff {staff} on day {day}")]
    DuplicateRequest { staff: StaffId, day: u32 },

    #[error("day {day} is outside 1..={last_day}")]
    DayOutOfRange { day: u32, last_day: u32 },

    #[error("pattern lengths must satisfy 2 <= n_min <= n_max, got {n_min}..{n_max}")]
    TemplateRange { n_min: u32, n_max: u32 },

    #[error("unsupported template combination: {0}")]
    UnsupportedTemplate(String),

    #[error("no months were processed")]
    NoMonths,

    #[error("required staff is zero on {month} day {day}")]
    ZeroRequirement { month: MonthId, day: u32 },

    #[error("demand table does not cover {0}")]
    MissingDemand(Weekday),

    #[error("no requests set for month {0}")]
    RequestMonthMismatch(MonthId),

    #[error("no existing staff shares the feasible-shift set; candidates: {candidates:?}")]
    NoDonor { candidates: Vec<StaffId> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance has {cells} cells, the exhaustive oracle accepts at most {limit}")]
    InstanceTooLarge { cells: usize, limit: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("evaluation config is missing `{section}`, which {class} needs")]
    MissingSection { section: &'static str, class: &'static str },

    #[error("cannot compare reports for {a} and {b}")]
    MonthMismatch { a: MonthId, b: MonthId },

    #[error("hard-constraint counts differ between two feasible schedules ({class})")]
    HardMismatch { class: &'static str },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
