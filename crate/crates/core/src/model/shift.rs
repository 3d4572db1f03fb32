use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::model::{Roster, StaffId};

const MAX_CODE: usize = 15;

/// Broad class of an abstract shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShiftKind {
    Off,
    Day,
    Night,
}

/// An abstract shift code such as `-`, `D`, `1N` or `2N`.
///
/// The kind is derived from the code: `-` is the only off symbol, a code made of
/// a non-empty unit label followed by `N` is a night shift for that unit, and
/// everything else is a day shift. Codes are short tokens stored inline so the
/// type is `Copy`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftSymbol {
    len: u8,
    bytes: [u8; MAX_CODE],
}

impl ShiftSymbol {
    pub const OFF_CODE: &'static str = "-";

    pub fn new(code: &str) -> Result<Self> {
        let valid = !code.is_empty()
            && code.len() <= MAX_CODE
            && code
                .chars()
                .all(|c| !c.is_whitespace() && !matches!(c, ',' | '(' | ')' | '|' | '"' | '[' | ']' | '#'));
        if !valid {
            return Err(Error::InvalidSymbol(code.to_string()));
        }
        let mut bytes = [0u8; MAX_CODE];
        bytes[..code.len()].copy_from_slice(code.as_bytes());
        Ok(Self {
            len: code.len() as u8,
            bytes,
        })
    }

    pub fn off() -> Self {
        Self::new(Self::OFF_CODE).expect("off symbol is valid")
    }

    pub fn code(&self) -> &str {
        core::str::from_utf8(&self.bytes[..self.len as usize]).expect("codes are built from str")
    }

    pub fn kind(&self) -> ShiftKind {
        let code = self.code();
        if code == Self::OFF_CODE {
            ShiftKind::Off
        } else if code.len() > 1 && code.ends_with('N') {
            ShiftKind::Night
        } else {
            ShiftKind::Day
        }
    }

    /// Unit label of a night shift (`"1"` for `1N`).
    pub fn unit(&self) -> Option<&str> {
        match self.kind() {
            ShiftKind::Night => Some(&self.code()[..self.len as usize - 1]),
            _ => None,
        }
    }

    pub fn is_off(&self) -> bool {
        self.kind() == ShiftKind::Off
    }
}

impl fmt::Display for ShiftSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl fmt::Debug for ShiftSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.code())
    }
}

impl core::str::FromStr for ShiftSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

/// Detailed-to-abstract shift mapping.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShiftMapping {
    map: BTreeMap<String, ShiftSymbol>,
}

impl ShiftMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, detailed: &str, abstract_symbol: ShiftSymbol) {
        self.map.insert(detailed.to_string(), abstract_symbol);
    }

    pub fn get(&self, detailed: &str) -> Option<ShiftSymbol> {
        self.map.get(detailed).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, ShiftSymbol)> {
        self.map.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The two-unit facility alphabet: day-off and paid-off collapse to `-`,
    /// every day shift of either unit to `D`, and the night start/end halves to
    /// the unit's night symbol. Abstract symbols map to themselves so the
    /// mapping is idempotent on abstract rosters.
    pub fn facility_default() -> Self {
        let mut m = Self::new();
        let off = ShiftSymbol::off();
        let day = ShiftSymbol::new("D").unwrap();
        m.insert("day off", off);
        m.insert("paid off", off);
        for unit in ["1", "2"] {
            for letter in ["A", "B", "C", "D", "E"] {
                m.insert(&alloc::format!("{unit}{letter}"), day);
            }
            let night = ShiftSymbol::new(&alloc::format!("{unit}N")).unwrap();
            m.insert(&alloc::format!("{unit}Ni"), night);
            m.insert(&alloc::format!("{unit}No"), night);
            m.insert(night.code(), night);
        }
        m.insert("-", off);
        m.insert("D", day);
        m
    }
}

/// A roster whose cells still carry facility-specific shift codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetailedRoster {
    pub month: crate::model::MonthId,
    pub staff: Vec<StaffId>,
    /// Row-major, `staff.len() * last_day` codes.
    pub cells: Vec<String>,
}

/// Substitutes every detailed code with its abstract symbol.
pub fn abstract_roster(detailed: &DetailedRoster, mapping: &ShiftMapping) -> Result<Roster> {
    let width = detailed.month.last_day() as usize;
    if detailed.cells.len() != detailed.staff.len() * width {
        return Err(Error::RosterWidth {
            month: detailed.month,
            got: if detailed.staff.is_empty() {
                0
            } else {
                detailed.cells.len() / detailed.staff.len()
            },
            expected: width,
        });
    }
    let mut cells = Vec::with_capacity(detailed.cells.len());
    for (i, code) in detailed.cells.iter().enumerate() {
        let sym = mapping.get(code).ok_or_else(|| Error::UnmappedCode {
            code: code.clone(),
            staff: detailed.staff[i / width].clone(),
            day: (i % width) as u32 + 1,
        })?;
        cells.push(sym);
    }
    Roster::new(detailed.month, detailed.staff.clone(), cells)
}
