//! Domain types: shift symbols, calendar months, rosters, requests and demand.

mod calendar;
mod roster;
mod shift;

pub use calendar::{MonthId, Weekday};
pub use roster::{DemandTable, RequestSet, Roster, StaffId};
pub use shift::{abstract_roster, DetailedRoster, ShiftKind, ShiftMapping, ShiftSymbol};
