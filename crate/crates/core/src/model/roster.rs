use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{MonthId, ShiftSymbol, Weekday};

/// Opaque staff identifier. The facility uses five-digit numbers but nothing
/// here relies on that.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StaffId(String);

impl StaffId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for StaffId {
    fn from(s: &str) -> Self {
        Self(s.into())
    }
}

impl From<String> for StaffId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl fmt::Display for StaffId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A month grid of staff × day, one symbol per cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Roster {
    month: MonthId,
    days: u32,
    staff: Vec<StaffId>,
    cells: Vec<ShiftSymbol>,
}

impl Roster {
    /// `cells` is row-major: row `i` holds staff `i`'s days 1..=last_day.
    pub fn new(month: MonthId, staff: Vec<StaffId>, cells: Vec<ShiftSymbol>) -> Result<Self> {
        Self::with_days(month, month.last_day(), staff, cells)
    }

    /// A grid covering only days `1..=days` of the month. Used for the small
    /// instances the exhaustive oracle can handle.
    pub fn with_days(month: MonthId, days: u32, staff: Vec<StaffId>, cells: Vec<ShiftSymbol>) -> Result<Self> {
        if days == 0 || days > month.last_day() {
            return Err(Error::DayOutOfRange {
                day: days,
                last_day: month.last_day(),
            });
        }
        let width = days as usize;
        let mut seen = BTreeSet::new();
        for s in &staff {
            if !seen.insert(s) {
                return Err(Error::DuplicateStaff(s.clone()));
            }
        }
        if cells.len() != staff.len() * width {
            return Err(Error::RosterWidth {
                month,
                got: if staff.is_empty() { 0 } else { cells.len() / staff.len() },
                expected: width,
            });
        }
        Ok(Self {
            month,
            days,
            staff,
            cells,
        })
    }

    /// Every cell set to `fill`.
    pub fn filled(month: MonthId, staff: Vec<StaffId>, fill: ShiftSymbol) -> Result<Self> {
        let n = staff.len() * month.last_day() as usize;
        Self::new(month, staff, alloc::vec![fill; n])
    }

    pub fn month(&self) -> MonthId {
        self.month
    }

    pub fn staff(&self) -> &[StaffId] {
        &self.staff
    }

    pub fn cells(&self) -> &[ShiftSymbol] {
        &self.cells
    }

    /// Last day covered by the grid; the month's last day unless built with
    /// [`Roster::with_days`].
    pub fn last_day(&self) -> u32 {
        self.days
    }

    pub fn staff_index(&self, id: &StaffId) -> Option<usize> {
        self.staff.iter().position(|s| s == id)
    }

    pub fn row(&self, i: usize) -> &[ShiftSymbol] {
        let w = self.last_day() as usize;
        &self.cells[i * w..(i + 1) * w]
    }

    /// Symbol of staff row `i` on 1-based day `d`.
    pub fn get(&self, i: usize, d: u32) -> ShiftSymbol {
        self.cells[i * self.last_day() as usize + d as usize - 1]
    }

    pub fn set(&mut self, i: usize, d: u32, s: ShiftSymbol) {
        let w = self.last_day() as usize;
        self.cells[i * w + d as usize - 1] = s;
    }

    /// Number of staff holding `s` on day `d`.
    pub fn headcount(&self, d: u32, s: ShiftSymbol) -> u32 {
        (0..self.staff.len()).filter(|&i| self.get(i, d) == s).count() as u32
    }

    /// Distinct symbols present in the grid.
    pub fn symbols(&self) -> BTreeSet<ShiftSymbol> {
        self.cells.iter().copied().collect()
    }
}

/// Shift and leave requests for one month.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestSet {
    month: MonthId,
    entries: BTreeMap<(StaffId, u32), ShiftSymbol>,
}

impl RequestSet {
    pub fn new(month: MonthId) -> Self {
        Self {
            month,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, staff: StaffId, day: u32, requested: ShiftSymbol) -> Result<()> {
        let last_day = self.month.last_day();
        if day == 0 || day > last_day {
            return Err(Error::DayOutOfRange { day, last_day });
        }
        if self.entries.contains_key(&(staff.clone(), day)) {
            return Err(Error::DuplicateRequest { staff, day });
        }
        self.entries.insert((staff, day), requested);
        Ok(())
    }

    pub fn month(&self) -> MonthId {
        self.month
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, staff: &StaffId, day: u32) -> Option<ShiftSymbol> {
        self.entries.get(&(staff.clone(), day)).copied()
    }

    /// Entries in (staff, day) order.
    pub fn iter(&self) -> impl Iterator<Item = (&StaffId, u32, ShiftSymbol)> {
        self.entries.iter().map(|((s, d), sym)| (s, *d, *sym))
    }

    /// Staff with a leave (Off) request on day `d`.
    pub fn leaves_on(&self, d: u32) -> impl Iterator<Item = &StaffId> {
        self.entries
            .iter()
            .filter(move |((_, day), sym)| *day == d && sym.is_off())
            .map(|((s, _), _)| s)
    }

    pub fn leaves_of(&self, staff: &StaffId) -> u32 {
        self.entries
            .iter()
            .filter(|((s, _), sym)| s == staff && sym.is_off())
            .count() as u32
    }
}

/// Required headcount per (weekday, shift).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DemandTable {
    rows: BTreeMap<(Weekday, ShiftSymbol), u32>,
}

impl DemandTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, w: Weekday, s: ShiftSymbol, count: u32) {
        self.rows.insert((w, s), count);
    }

    pub fn get(&self, w: Weekday, s: ShiftSymbol) -> Option<u32> {
        self.rows.get(&(w, s)).copied()
    }

    /// r_d for a day falling on `w`.
    pub fn total(&self, w: Weekday) -> u32 {
        self.rows.iter().filter(|((ww, _), _)| *ww == w).map(|(_, c)| *c).sum()
    }

    pub fn covers(&self, w: Weekday) -> bool {
        self.rows.keys().any(|(ww, _)| *ww == w)
    }

    pub fn shifts(&self) -> BTreeSet<ShiftSymbol> {
        self.rows.keys().map(|(_, s)| *s).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Weekday, ShiftSymbol, u32)> + '_ {
        self.rows.iter().map(|((w, s), c)| (*w, *s, *c))
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sym(s: &str) -> ShiftSymbol {
        ShiftSymbol::new(s).unwrap()
    }

    #[test]
    fn roster_shape_checks() {
        let m = MonthId::new(2023, 2).unwrap();
        let staff = vec![StaffId::from("1"), StaffId::from("1")];
        assert_eq!(
            Roster::filled(m, staff, ShiftSymbol::off()).unwrap_err(),
            Error::DuplicateStaff(StaffId::from("1"))
        );
        let bad = Roster::new(m, vec![StaffId::from("1")], vec![ShiftSymbol::off(); 27]);
        assert!(matches!(bad, Err(Error::RosterWidth { expected: 28, .. })));
    }

    #[test]
    fn roster_access() {
        let m = MonthId::new(2023, 2).unwrap();
        let mut r = Roster::filled(m, vec!["a".into(), "b".into()], ShiftSymbol::off()).unwrap();
        r.set(1, 28, sym("D"));
        assert_eq!(r.get(1, 28), sym("D"));
        assert_eq!(r.row(1)[27], sym("D"));
        assert_eq!(r.headcount(28, sym("D")), 1);
        assert_eq!(r.headcount(28, ShiftSymbol::off()), 1);
    }

    #[test]
    fn request_invariants() {
        let m = MonthId::new(2023, 4).unwrap();
        let mut q = RequestSet::new(m);
        q.insert("10006".into(), 5, ShiftSymbol::off()).unwrap();
        assert_eq!(q.get(&"10006".into(), 5), Some(ShiftSymbol::off()));
        assert!(matches!(
            q.insert("10006".into(), 5, sym("D")),
            Err(Error::DuplicateRequest { day: 5, .. })
        ));
        assert!(matches!(
            q.insert("10006".into(), 31, sym("D")),
            Err(Error::DayOutOfRange { day: 31, last_day: 30 })
        ));
        q.insert("10007".into(), 5, sym("D")).unwrap();
        assert_eq!(q.leaves_on(5).count(), 1);
        assert_eq!(q.leaves_of(&"10006".into()), 1);
    }

    #[test]
    fn demand_totals() {
        let mut t = DemandTable::new();
        t.set(Weekday::Mon, sym("D"), 9);
        t.set(Weekday::Mon, sym("1N"), 2);
        assert_eq!(t.total(Weekday::Mon), 11);
        assert!(t.covers(Weekday::Mon));
        assert!(!t.covers(Weekday::Tue));
    }
}
