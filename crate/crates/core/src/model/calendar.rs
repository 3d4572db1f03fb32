use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weekday {
    Sun,
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
}

impl Weekday {
    pub const ALL: [Weekday; 7] = [
        Weekday::Sun,
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
    ];

    /// Token used in demand files and mined T4 lines.
    pub fn token(self) -> &'static str {
        match self {
            Weekday::Sun => "Sun.",
            Weekday::Mon => "Mon.",
            Weekday::Tue => "Tue.",
            Weekday::Wed => "Wed.",
            Weekday::Thu => "Thu.",
            Weekday::Fri => "Fri.",
            Weekday::Sat => "Sat.",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Weekday {
        Self::ALL[i % 7]
    }
}

impl fmt::Display for Weekday {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Weekday {
    type Err = Error;

    /// Accepts "Mon." and, leniently, "Mon".
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_suffix('.').unwrap_or(t);
        Weekday::ALL
            .into_iter()
            .find(|w| w.token()[..3].eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::InvalidProblem(alloc::format!("unknown weekday `{s}`")))
    }
}

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthId {
    year: i32,
    month: u32,
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

impl MonthId {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidMonth { year, month });
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    pub fn last_day(self) -> u32 {
        match self.month {
            4 | 6 | 9 | 11 => 30,
            2 if is_leap(self.year) => 29,
            2 => 28,
            _ => 31,
        }
    }

    /// Weekday of day `d` (1-based), by Sakamoto's method.
    pub fn weekday(self, d: u32) -> Weekday {
        const T: [i32; 12] = [0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4];
        let m = self.month as i32;
        let y = if m < 3 { self.year - 1 } else { self.year };
        let w = (y + y.div_euclid(4) - y.div_euclid(100) + y.div_euclid(400) + T[(m - 1) as usize] + d as i32)
            .rem_euclid(7);
        Weekday::from_index(w as usize)
    }

    /// How many times `w` occurs in this month.
    pub fn occurrences(self, w: Weekday) -> u32 {
        (1..=self.last_day()).filter(|&d| self.weekday(d) == w).count() as u32
    }

    pub fn next(self) -> MonthId {
        if self.month == 12 {
            MonthId {
                year: self.year + 1,
                month: 1,
            }
        } else {
            MonthId {
                year: self.year,
                month: self.month + 1,
            }
        }
    }
}

impl fmt::Display for MonthId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthId {
    type Err = Error;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidProblem(alloc::format!("expected YYYY-MM, got `{s}`"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        MonthId::new(year, month)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_lengths() {
        assert_eq!(MonthId::new(2023, 2).unwrap().last_day(), 28);
        assert_eq!(MonthId::new(2024, 2).unwrap().last_day(), 29);
        assert_eq!(MonthId::new(2000, 2).unwrap().last_day(), 29);
        assert_eq!(MonthId::new(2100, 2).unwrap().last_day(), 28);
        assert_eq!(MonthId::new(2023, 4).unwrap().last_day(), 30);
        assert_eq!(MonthId::new(2023, 12).unwrap().last_day(), 31);
        assert!(MonthId::new(2023, 13).is_err());
        assert!(MonthId::new(2023, 0).is_err());
    }

    // Known anchors: 2000-01-01 was a Saturday, 2023-04-01 a Saturday,
    // 2024-02-29 a Thursday, 2099-12-31 a Thursday.
    #[test]
    fn weekday_anchors() {
        assert_eq!(MonthId::new(2000, 1).unwrap().weekday(1), Weekday::Sat);
        assert_eq!(MonthId::new(2023, 4).unwrap().weekday(1), Weekday::Sat);
        assert_eq!(MonthId::new(2024, 2).unwrap().weekday(29), Weekday::Thu);
        assert_eq!(MonthId::new(2099, 12).unwrap().weekday(31), Weekday::Thu);
        assert_eq!(MonthId::new(2023, 10).unwrap().weekday(16), Weekday::Mon);
    }

    // Independent day counter: walk forward one day at a time from 2000-01-01.
    #[test]
    fn weekday_matches_day_walk_2000_2099() {
        let mut w = Weekday::Sat.index();
        let mut m = MonthId::new(2000, 1).unwrap();
        while m.year() < 2100 {
            for d in 1..=m.last_day() {
                assert_eq!(m.weekday(d).index(), w, "{m} day {d}");
                w = (w + 1) % 7;
            }
            m = m.next();
        }
    }

    #[test]
    fn occurrences_sum_to_length() {
        let m = MonthId::new(2023, 5).unwrap();
        let total: u32 = Weekday::ALL.iter().map(|&w| m.occurrences(w)).sum();
        assert_eq!(total, 31);
        // May 2023 starts on a Monday: Mon/Tue/Wed occur five times.
        assert_eq!(m.occurrences(Weekday::Mon), 5);
        assert_eq!(m.occurrences(Weekday::Sun), 4);
    }

    #[test]
    fn tokens_round_trip() {
        for w in Weekday::ALL {
            assert_eq!(w.token().parse::<Weekday>().unwrap(), w);
        }
        assert_eq!("2023-04".parse::<MonthId>().unwrap(), MonthId::new(2023, 4).unwrap());
        assert!("2023/04".parse::<MonthId>().is_err());
    }
}
