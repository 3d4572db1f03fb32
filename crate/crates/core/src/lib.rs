//! Constraint mining and monthly roster generation for care-worker scheduling.
//!
//! The crate is split along the pipeline:
//!
//! * [`model`] holds the domain types (shift symbols, months, rosters, requests,
//!   demand tables).
//! * [`template`] mines pattern and count constraints from historical rosters.
//! * [`exception`] computes staffing margin and flexibility, the gates that keep
//!   understaffing artefacts out of the mined set.
//! * [`compile`] turns mined constraints into hard/soft solver instances.
//! * [`solver`] searches for schedules; [`relax`] wraps it in the relaxation ladder.
//! * [`eval`] scores schedules against an interview-style rule catalogue.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command-line
//! front end live in the companion `shiftlearn` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod compile;
pub mod error;
pub mod eval;
pub mod exception;
pub mod model;
pub mod relax;
pub mod solver;
pub mod template;

pub use error::Error;
pub use model::{DemandTable, MonthId, RequestSet, Roster, ShiftKind, ShiftSymbol, StaffId, Weekday};

/// Exact rational used for margins, weights and thresholds.
pub type Rational = num_rational::Ratio<i64>;
