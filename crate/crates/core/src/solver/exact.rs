//! Depth-first branch and bound in (day, staff, symbol) order, and the
//! exhaustive oracle that enumerates the same order without pruning.

use alloc::vec;
use alloc::vec::Vec;

use super::model::{Model, Totals};
use super::rows::RowAutomaton;

pub(crate) struct Outcome {
    pub best: Option<(Vec<u8>, u64)>,
    /// The whole tree was explored: `best` is optimal, or there is no solution.
    pub complete: bool,
    pub nodes: u64,
}

struct Search<'a> {
    m: &'a Model,
    autos: &'a [RowAutomaton],
    cells: Vec<u8>,
    state: Vec<u64>,
    count_val: Vec<u32>,
    head: Vec<u32>,
    /// `[(day * rows + row) * n_sym + sym]`: rows after `row` that can take `sym` on `day`.
    later: Vec<u16>,
    hard_demands: Vec<Vec<usize>>,
    best: Option<(Vec<u8>, u64)>,
    nodes: u64,
    node_limit: u64,
    aborted: bool,
    stop: &'a dyn Fn() -> bool,
}

pub(crate) fn branch_and_bound(m: &Model, autos: &[RowAutomaton], node_limit: u64, stop: &dyn Fn() -> bool) -> Outcome {
    let n_sym = m.symbols.len();
    let mut later = vec![0u16; m.days * m.rows * n_sym];
    for d in 0..m.days {
        let mut acc = vec![0u16; n_sym];
        for r in (0..m.rows).rev() {
            for s in 0..n_sym {
                later[(d * m.rows + r) * n_sym + s] = acc[s];
            }
            for (s, a) in acc.iter_mut().enumerate() {
                if autos[r].support[d] & (1 << s) != 0 {
                    *a += 1;
                }
            }
        }
    }
    let hard_demands = (0..m.days)
        .map(|d| {
            m.day_demands[d]
                .iter()
                .copied()
                .filter(|&c| m.demands[c].hard)
                .collect()
        })
        .collect();
    let mut s = Search {
        m,
        autos,
        cells: vec![0; m.rows * m.days],
        state: vec![0; m.rows],
        count_val: vec![0; m.counts.len()],
        head: vec![0; m.days * n_sym],
        later,
        hard_demands,
        best: None,
        nodes: 0,
        node_limit,
        aborted: false,
        stop,
    };
    if m.rows > 0 && m.days > 0 {
        s.dfs(0, 0);
    } else {
        s.best = Some((Vec::new(), 0));
    }
    Outcome {
        best: s.best,
        complete: !s.aborted,
        nodes: s.nodes,
    }
}

impl Search<'_> {
    fn dfs(&mut self, pos: usize, cost: u64) {
        let m = self.m;
        if pos == m.rows * m.days {
            if self.best.as_ref().is_none_or(|(_, b)| cost < *b) {
                self.best = Some((self.cells.clone(), cost));
            }
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit || (self.nodes & 0xfff == 0 && (self.stop)()) {
            self.aborted = true;
        }
        if self.aborted {
            return;
        }
        let n_sym = m.symbols.len();
        let d = pos / m.rows;
        let e = pos % m.rows;
        let auto = &self.autos[e];
        let old_state = if d == 0 { 0 } else { self.state[e] };
        let cell = m.cell(e, d);

        for sym in 0..n_sym {
            if auto.support[d] & (1 << sym) == 0 {
                continue;
            }
            let (full, full_len, ns) = auto.step(old_state, sym);
            if !auto.windows_ok(m, full, full_len, d) {
                continue;
            }
            let Some(si) = auto.index(d, ns) else { continue };

            // Hard counts: the rest of the row must still be able to land in range.
            let nc = auto.counts.len();
            let mut ok = true;
            for (j, &c) in auto.counts.iter().enumerate() {
                let cc = &m.counts[c];
                let v = self.count_val[c] + (cc.mask >> sym & 1);
                let (lo, hi) = auto.togo[d][si * nc + j];
                if v + lo as u32 > cc.hi || v + (hi as u32) < cc.lo {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            // Hard demand: upper bound now, lower bound against rows still to come.
            for &c in &self.hard_demands[d] {
                let dc = &m.demands[c];
                let h = self.head[d * n_sym + dc.sym] + (dc.sym == sym) as u32;
                let rest = self.later[(d * m.rows + e) * n_sym + dc.sym] as u32;
                if h > dc.hi || h + rest < dc.lo {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }

            self.cells[cell] = sym as u8;
            let mut delta = 0u64;
            for &p in &m.row_patterns[e] {
                let pc = &m.patterns[p];
                if pc.hard || d + 1 < pc.n {
                    continue;
                }
                if !pc.allowed.contains(m.window_key(&self.cells, e, d + 1 - pc.n, pc.n)) {
                    delta += pc.weight;
                }
            }
            for &p in &m.cell_pins[cell] {
                let pc = &m.pins[p];
                if !pc.hard && pc.sym != sym {
                    delta += pc.weight;
                }
            }
            if d + 1 == m.days {
                for &c in &m.row_counts[e] {
                    let cc = &m.counts[c];
                    if !cc.hard {
                        let v = self.count_val[c] + (cc.mask >> sym & 1);
                        if v < cc.lo || v > cc.hi {
                            delta += cc.weight;
                        }
                    }
                }
            }
            self.head[d * n_sym + sym] += 1;
            if e + 1 == m.rows {
                for &c in &m.day_demands[d] {
                    let dc = &m.demands[c];
                    if !dc.hard {
                        let h = self.head[d * n_sym + dc.sym];
                        if h < dc.lo || h > dc.hi {
                            delta += dc.weight;
                        }
                    }
                }
            }
            let bound = cost + delta;
            if self.best.as_ref().is_none_or(|(_, b)| bound < *b) {
                for &c in &m.row_counts[e] {
                    self.count_val[c] += m.counts[c].mask >> sym & 1;
                }
                let saved = self.state[e];
                self.state[e] = ns;
                self.dfs(pos + 1, bound);
                self.state[e] = saved;
                for &c in &m.row_counts[e] {
                    self.count_val[c] -= m.counts[c].mask >> sym & 1;
                }
            }
            self.head[d * n_sym + sym] -= 1;
            self.cells[cell] = 0;
            if self.aborted {
                return;
            }
        }
    }
}

/// Every assignment in lexicographic (day, staff, symbol) order; the first
/// hard-feasible assignment of minimal soft total wins. When nothing is
/// feasible, the first assignment with the fewest hard violations is returned.
pub(crate) fn enumerate(m: &Model) -> (Vec<u8>, Totals) {
    let n = m.rows * m.days;
    let n_sym = m.symbols.len() as u8;
    // Position p in day-major order maps to a row-major cell.
    let order: Vec<usize> = (0..n).map(|p| m.cell(p % m.rows.max(1), p / m.rows.max(1))).collect();
    let mut cells = vec![0u8; n];
    let mut best: Option<(Vec<u8>, Totals)> = None;
    loop {
        let t = m.totals(&cells);
        let better = match &best {
            None => true,
            Some((_, b)) => (t.hard, t.soft) < (b.hard, b.soft),
        };
        if better {
            best = Some((cells.clone(), t));
        }
        // Odometer: the last position turns fastest.
        let mut p = n;
        loop {
            if p == 0 {
                return best.expect("at least one assignment");
            }
            p -= 1;
            let c = order[p];
            if cells[c] + 1 < n_sym {
                cells[c] += 1;
                break;
            }
            cells[c] = 0;
        }
    }
}
