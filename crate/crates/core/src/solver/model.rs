//! Indexed view of a problem: symbols become small integers, staff become row
//! numbers, and each instance is filed under the rows/days it touches.
//! Evaluation here is the single code path used by the oracle, by the
//! re-check after search and by `check_violations`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::compile::{Body, CompiledSet, Hardness, Scope, ShiftFilter};
use crate::error::{Error, Result};
use crate::model::{ShiftSymbol, StaffId};

pub(crate) const MAX_SYMBOLS: usize = 15;
pub(crate) const MAX_PATTERN: usize = 15;
const BITSET_LIMIT: u64 = 1 << 22;

/// Allowed windows of one length, keyed by the base-|S| code of the window
/// (most recent day least significant).
#[derive(Debug, Clone)]
pub(crate) enum WindowSet {
    Bits(Vec<u64>),
    Sorted(Vec<u64>),
}

impl WindowSet {
    fn build(keys: Vec<u64>, universe: u64) -> Self {
        if universe <= BITSET_LIMIT {
            let mut bits = vec![0u64; (universe as usize).div_ceil(64)];
            for k in keys {
                bits[(k / 64) as usize] |= 1 << (k % 64);
            }
            WindowSet::Bits(bits)
        } else {
            let mut keys = keys;
            keys.sort_unstable();
            keys.dedup();
            WindowSet::Sorted(keys)
        }
    }

    #[inline]
    pub(crate) fn contains(&self, key: u64) -> bool {
        match self {
            WindowSet::Bits(b) => b[(key / 64) as usize] & (1 << (key % 64)) != 0,
            WindowSet::Sorted(v) => v.binary_search(&key).is_ok(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PatternC {
    pub inst: usize,
    pub hard: bool,
    pub weight: u64,
    pub n: usize,
    pub rows: Vec<usize>,
    pub allowed: WindowSet,
}

#[derive(Debug, Clone)]
pub(crate) struct CountC {
    pub inst: usize,
    pub hard: bool,
    pub weight: u64,
    pub row: usize,
    /// Bit per symbol index.
    pub mask: u32,
    pub lo: u32,
    pub hi: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct DemandC {
    pub inst: usize,
    pub hard: bool,
    pub weight: u64,
    pub day: usize,
    pub sym: usize,
    pub lo: u32,
    pub hi: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct PinC {
    pub inst: usize,
    pub hard: bool,
    pub weight: u64,
    pub row: usize,
    pub day: usize,
    pub sym: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Model {
    pub rows: usize,
    pub days: usize,
    pub symbols: Vec<ShiftSymbol>,
    pub n_instances: usize,
    pub patterns: Vec<PatternC>,
    pub counts: Vec<CountC>,
    pub demands: Vec<DemandC>,
    pub pins: Vec<PinC>,
    pub row_patterns: Vec<Vec<usize>>,
    pub row_counts: Vec<Vec<usize>>,
    pub day_demands: Vec<Vec<usize>>,
    pub cell_pins: Vec<Vec<usize>>,
    /// |S|^i for i in 0..=MAX_PATTERN.
    pub pow: Vec<u64>,
}

/// Violations of one evaluation, split by hardness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct Totals {
    pub hard: u64,
    pub soft: u64,
}

fn weight_of(h: Hardness) -> (bool, u64) {
    match h {
        Hardness::Hard => (true, 0),
        Hardness::Soft(w) => (false, w as u64),
    }
}

impl Model {
    pub fn build(staff: &[StaffId], days: usize, symbols: &[ShiftSymbol], set: &CompiledSet) -> Result<Self> {
        if symbols.is_empty() || symbols.len() > MAX_SYMBOLS {
            return Err(Error::InvalidProblem(format!(
                "between 1 and {MAX_SYMBOLS} shift symbols are supported, got {}",
                symbols.len()
            )));
        }
        let mut seen = Vec::new();
        for s in symbols {
            if seen.contains(s) {
                return Err(Error::InvalidProblem(format!("shift {s} listed twice")));
            }
            seen.push(*s);
        }
        let row_of: BTreeMap<&StaffId, usize> = staff.iter().enumerate().map(|(i, s)| (s, i)).collect();
        if row_of.len() != staff.len() {
            return Err(Error::InvalidProblem("duplicate staff id".into()));
        }
        let sym_of = |s: &ShiftSymbol| symbols.iter().position(|x| x == s);
        let row = |s: &StaffId| {
            row_of
                .get(s)
                .copied()
                .ok_or_else(|| Error::DimensionMismatch(format!("staff {s} is not in the schedule")))
        };
        let day_ok = |d: u32| {
            if d == 0 || d as usize > days {
                Err(Error::DimensionMismatch(format!("day {d} is outside 1..={days}")))
            } else {
                Ok(d as usize - 1)
            }
        };
        let n_sym = symbols.len() as u64;
        let mut pow = vec![1u64; MAX_PATTERN + 1];
        for i in 1..=MAX_PATTERN {
            pow[i] = pow[i - 1].saturating_mul(n_sym);
        }

        let mut m = Model {
            rows: staff.len(),
            days,
            symbols: symbols.to_vec(),
            n_instances: set.instances.len(),
            patterns: Vec::new(),
            counts: Vec::new(),
            demands: Vec::new(),
            pins: Vec::new(),
            row_patterns: vec![Vec::new(); staff.len()],
            row_counts: vec![Vec::new(); staff.len()],
            day_demands: vec![Vec::new(); days],
            cell_pins: vec![Vec::new(); staff.len() * days],
            pow,
        };

        for (inst, c) in set.instances.iter().enumerate() {
            let (hard, weight) = weight_of(c.hardness);
            match &c.body {
                Body::AllowedPatternSet { scope, length, allowed } => {
                    let n = *length as usize;
                    if n == 0 || n > MAX_PATTERN {
                        return Err(Error::InvalidProblem(format!(
                            "pattern length {n} outside 1..={MAX_PATTERN}"
                        )));
                    }
                    let rows = match scope {
                        Scope::All => (0..staff.len()).collect(),
                        Scope::Staff(s) => vec![row(s)?],
                    };
                    let mut keys = Vec::new();
                    'seq: for seq in allowed {
                        if seq.len() != n {
                            return Err(Error::InvalidProblem(format!(
                                "pattern of length {} in a length-{n} set",
                                seq.len()
                            )));
                        }
                        let mut k = 0u64;
                        for s in seq {
                            // A window naming a shift outside the schedule can never occur.
                            let Some(i) = sym_of(s) else { continue 'seq };
                            k = k * n_sym + i as u64;
                        }
                        keys.push(k);
                    }
                    let id = m.patterns.len();
                    for &r in &rows {
                        m.row_patterns[r].push(id);
                    }
                    m.patterns.push(PatternC {
                        inst,
                        hard,
                        weight,
                        n,
                        rows,
                        allowed: WindowSet::build(keys, m.pow[n]),
                    });
                }
                Body::CountRange {
                    staff: s,
                    shift,
                    lower,
                    upper,
                } => {
                    let r = row(s)?;
                    let mut mask = 0u32;
                    for (i, sym) in symbols.iter().enumerate() {
                        if shift.matches(*sym) {
                            mask |= 1 << i;
                        }
                    }
                    if let ShiftFilter::Shift(x) = shift {
                        if sym_of(x).is_none() && *lower > 0 {
                            return Err(Error::InvalidProblem(format!("count on unknown shift {x}")));
                        }
                    }
                    let id = m.counts.len();
                    m.row_counts[r].push(id);
                    m.counts.push(CountC {
                        inst,
                        hard,
                        weight,
                        row: r,
                        mask,
                        lo: *lower,
                        hi: *upper,
                    });
                }
                Body::DemandRange {
                    day,
                    shift,
                    lower,
                    upper,
                } => {
                    let d = day_ok(*day)?;
                    let sym = sym_of(shift)
                        .ok_or_else(|| Error::InvalidProblem(format!("demand on unknown shift {shift}")))?;
                    let id = m.demands.len();
                    m.day_demands[d].push(id);
                    m.demands.push(DemandC {
                        inst,
                        hard,
                        weight,
                        day: d,
                        sym,
                        lo: *lower,
                        hi: *upper,
                    });
                }
                Body::AssignExactlyOne { staff: s, day } => {
                    // Holds by representation; only the dimensions are checked.
                    row(s)?;
                    day_ok(*day)?;
                }
                Body::RequestPin { staff: s, day, symbol } => {
                    let r = row(s)?;
                    let d = day_ok(*day)?;
                    let sym = sym_of(symbol)
                        .ok_or_else(|| Error::InvalidProblem(format!("request for unknown shift {symbol}")))?;
                    let id = m.pins.len();
                    m.cell_pins[r * days + d].push(id);
                    m.pins.push(PinC {
                        inst,
                        hard,
                        weight,
                        row: r,
                        day: d,
                        sym,
                    });
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn cell(&self, row: usize, day: usize) -> usize {
        row * self.days + day
    }

    #[inline]
    pub fn window_key(&self, cells: &[u8], row: usize, start: usize, n: usize) -> u64 {
        let base = row * self.days + start;
        let mut k = 0u64;
        for &c in &cells[base..base + n] {
            k = k * self.symbols.len() as u64 + c as u64;
        }
        k
    }

    /// Violations per compiled instance, indexed like `CompiledSet::instances`.
    pub fn violations(&self, cells: &[u8]) -> Vec<u64> {
        let mut v = vec![0u64; self.n_instances];
        for p in &self.patterns {
            if p.n > self.days {
                continue;
            }
            for &r in &p.rows {
                for start in 0..=self.days - p.n {
                    if !p.allowed.contains(self.window_key(cells, r, start, p.n)) {
                        v[p.inst] += 1;
                    }
                }
            }
        }
        for c in &self.counts {
            let k = self.row_count(cells, c.row, c.mask);
            if k < c.lo || k > c.hi {
                v[c.inst] += 1;
            }
        }
        for c in &self.demands {
            let h = (0..self.rows)
                .filter(|&r| cells[self.cell(r, c.day)] as usize == c.sym)
                .count() as u32;
            if h < c.lo || h > c.hi {
                v[c.inst] += 1;
            }
        }
        for p in &self.pins {
            if cells[self.cell(p.row, p.day)] as usize != p.sym {
                v[p.inst] += 1;
            }
        }
        v
    }

    pub fn row_count(&self, cells: &[u8], row: usize, mask: u32) -> u32 {
        let base = row * self.days;
        cells[base..base + self.days]
            .iter()
            .filter(|&&c| mask & (1 << c) != 0)
            .count() as u32
    }

    /// Hard violation count and weighted soft total, from `violations`.
    pub fn totals(&self, cells: &[u8]) -> Totals {
        let v = self.violations(cells);
        self.sum(&v)
    }

    pub fn sum(&self, v: &[u64]) -> Totals {
        let mut t = Totals::default();
        let mut add = |inst: usize, hard: bool, w: u64| {
            if hard {
                t.hard += v[inst];
            } else {
                t.soft += w * v[inst];
            }
        };
        for p in &self.patterns {
            add(p.inst, p.hard, p.weight);
        }
        for c in &self.counts {
            add(c.inst, c.hard, c.weight);
        }
        for c in &self.demands {
            add(c.inst, c.hard, c.weight);
        }
        for p in &self.pins {
            add(p.inst, p.hard, p.weight);
        }
        t
    }
}
