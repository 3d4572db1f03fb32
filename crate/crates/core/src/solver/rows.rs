//! Per-row automaton over the hard pattern windows and hard pins.
//!
//! A state is the suffix of the last `k` symbols of a row, where `k` is one
//! less than the longest hard window for that row. Forward reachability
//! followed by a backward sweep leaves, for every day, exactly the states
//! from which the rest of the month can still be completed. That gives cell
//! supports (which symbols can appear at all) and, for every hard count,
//! the smallest and largest number of matching days still achievable.

use alloc::vec;
use alloc::vec::Vec;

use super::model::Model;

const LEN_SHIFT: u32 = 56;
const SYM_MASK: u64 = (1 << LEN_SHIFT) - 1;

#[derive(Debug, Clone)]
pub(crate) struct RowAutomaton {
    pub k: usize,
    /// Hard pattern ids for the row with their lengths.
    pub hard: Vec<(usize, usize)>,
    /// Per day, sorted states that can still reach the end of the month.
    pub alive: Vec<Vec<u64>>,
    /// Per day, bit mask of symbols appearing on some completable row.
    pub support: Vec<u32>,
    /// Hard count ids of the row.
    pub counts: Vec<usize>,
    /// Per day, `[state_index * counts.len() + j]` = (min, max) matching days
    /// still to come after that day.
    pub togo: Vec<Vec<(u16, u16)>>,
    /// Whole-row (min, max) per hard count.
    pub range: Vec<(u16, u16)>,
}

impl RowAutomaton {
    pub fn feasible(&self) -> bool {
        self.support.iter().all(|&s| s != 0)
    }

    #[inline]
    pub fn step(&self, state: u64, sym: usize) -> (u64, usize, u64) {
        step(state, sym, self.k)
    }

    /// True when every hard window ending on day `d` is allowed.
    #[inline]
    pub fn windows_ok(&self, m: &Model, full: u64, full_len: usize, d: usize) -> bool {
        self.hard.iter().all(|&(p, n)| {
            d + 1 < n
                || full_len < n
                || m.patterns[p]
                    .allowed
                    .contains(suffix_key(full, n, m.symbols.len() as u64))
        })
    }

    pub fn index(&self, d: usize, state: u64) -> Option<usize> {
        self.alive[d].binary_search(&state).ok()
    }
}

/// (full history including `sym`, its length, next state).
#[inline]
pub(crate) fn step(state: u64, sym: usize, k: usize) -> (u64, usize, u64) {
    let len = (state >> LEN_SHIFT) as usize;
    let full = ((state & SYM_MASK) << 4) | sym as u64;
    let full_len = len + 1;
    let new_len = full_len.min(k);
    let kept = if new_len == 0 {
        0
    } else {
        full & ((1u64 << (4 * new_len)) - 1)
    };
    (full, full_len, ((new_len as u64) << LEN_SHIFT) | kept)
}

/// Window code of the last `n` symbols (most recent least significant).
#[inline]
pub(crate) fn suffix_key(full: u64, n: usize, n_sym: u64) -> u64 {
    let mut k = 0u64;
    for j in (0..n).rev() {
        k = k * n_sym + ((full >> (4 * j)) & 15);
    }
    k
}

/// Symbols allowed in each cell of `row` by its hard pins.
pub(crate) fn pin_domain(m: &Model, row: usize, day: usize) -> u32 {
    let all = (1u32 << m.symbols.len()) - 1;
    m.cell_pins[m.cell(row, day)]
        .iter()
        .filter(|&&p| m.pins[p].hard)
        .fold(all, |acc, &p| acc & (1 << m.pins[p].sym))
}

pub(crate) fn build(m: &Model, row: usize) -> RowAutomaton {
    let days = m.days;
    let n_sym = m.symbols.len();
    let hard: Vec<(usize, usize)> = m.row_patterns[row]
        .iter()
        .filter(|&&p| m.patterns[p].hard)
        .map(|&p| (p, m.patterns[p].n))
        .collect();
    let k = hard.iter().map(|&(_, n)| n - 1).max().unwrap_or(0);
    let counts: Vec<usize> = m.row_counts[row]
        .iter()
        .copied()
        .filter(|&c| m.counts[c].hard)
        .collect();
    // A hard count capped at zero removes its symbols outright.
    let banned = counts
        .iter()
        .filter(|&&c| m.counts[c].hi == 0)
        .fold(0u32, |acc, &c| acc | m.counts[c].mask);
    let domain: Vec<u32> = (0..days).map(|d| pin_domain(m, row, d) & !banned).collect();

    let mut auto = RowAutomaton {
        k,
        hard,
        alive: vec![Vec::new(); days],
        support: vec![0; days],
        counts,
        togo: vec![Vec::new(); days],
        range: Vec::new(),
    };
    if days == 0 {
        return auto;
    }

    // Forward reachability.
    let mut forward: Vec<Vec<u64>> = Vec::with_capacity(days);
    let mut prev: Vec<u64> = vec![0];
    for (d, &dom) in domain.iter().enumerate() {
        let mut next = Vec::new();
        for &s in &prev {
            for sym in 0..n_sym {
                if dom & (1 << sym) == 0 {
                    continue;
                }
                let (full, full_len, ns) = auto.step(s, sym);
                if auto.windows_ok(m, full, full_len, d) {
                    next.push(ns);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        forward.push(next.clone());
        prev = next;
    }

    // Backward pruning.
    auto.alive[days - 1] = forward[days - 1].clone();
    for d in (0..days - 1).rev() {
        let next_alive = &auto.alive[d + 1];
        let keep: Vec<u64> = forward[d]
            .iter()
            .copied()
            .filter(|&s| {
                (0..n_sym).any(|sym| {
                    if domain[d + 1] & (1 << sym) == 0 {
                        return false;
                    }
                    let (full, full_len, ns) = auto.step(s, sym);
                    auto.windows_ok(m, full, full_len, d + 1) && next_alive.binary_search(&ns).is_ok()
                })
            })
            .collect();
        auto.alive[d] = keep;
    }

    // Supports: symbols on some edge between alive states.
    for (d, &dom) in domain.iter().enumerate().take(days) {
        let from: Vec<u64> = if d == 0 { vec![0] } else { auto.alive[d - 1].clone() };
        let mut mask = 0u32;
        for &s in &from {
            for sym in 0..n_sym {
                if dom & (1 << sym) == 0 || mask & (1 << sym) != 0 {
                    continue;
                }
                let (full, full_len, ns) = auto.step(s, sym);
                if auto.windows_ok(m, full, full_len, d) && auto.alive[d].binary_search(&ns).is_ok() {
                    mask |= 1 << sym;
                }
            }
        }
        auto.support[d] = mask;
    }
    if !auto.feasible() {
        return auto;
    }

    // Count ranges still achievable after each day.
    let nc = auto.counts.len();
    let masks: Vec<u32> = auto.counts.iter().map(|&c| m.counts[c].mask).collect();
    auto.togo[days - 1] = vec![(0, 0); auto.alive[days - 1].len() * nc];
    for d in (0..days - 1).rev() {
        let mut t = vec![(u16::MAX, 0u16); auto.alive[d].len() * nc];
        for (i, &s) in auto.alive[d].iter().enumerate() {
            for sym in 0..n_sym {
                if domain[d + 1] & (1 << sym) == 0 {
                    continue;
                }
                let (full, full_len, ns) = auto.step(s, sym);
                if !auto.windows_ok(m, full, full_len, d + 1) {
                    continue;
                }
                let Some(j_next) = auto.index(d + 1, ns) else { continue };
                for j in 0..nc {
                    let bit = (masks[j] >> sym & 1) as u16;
                    let (lo, hi) = auto.togo[d + 1][j_next * nc + j];
                    let e = &mut t[i * nc + j];
                    e.0 = e.0.min(bit + lo);
                    e.1 = e.1.max(bit + hi);
                }
            }
        }
        auto.togo[d] = t;
    }
    let mut range = vec![(u16::MAX, 0u16); nc];
    for sym in 0..n_sym {
        if domain[0] & (1 << sym) == 0 {
            continue;
        }
        let (full, full_len, ns) = auto.step(0, sym);
        if !auto.windows_ok(m, full, full_len, 0) {
            continue;
        }
        let Some(i) = auto.index(0, ns) else { continue };
        for j in 0..nc {
            let bit = (masks[j] >> sym & 1) as u16;
            let (lo, hi) = auto.togo[0][i * nc + j];
            range[j].0 = range[j].0.min(bit + lo);
            range[j].1 = range[j].1.max(bit + hi);
        }
    }
    auto.range = range;
    auto
}
