//! Late-acceptance local search over complete assignments.
//!
//! Hard violations are measured with a gradient (bad windows, distance of a
//! count or headcount outside its range) and weighted well above soft
//! violations. Once a hard-feasible point is found a second phase only
//! accepts moves that keep it feasible.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::Model;
use super::rows::RowAutomaton;

const HARD_WEIGHT: i64 = 16;
const HISTORY: usize = 400;

/// Hard and soft deltas of a move, and the cells it rewrote with their old symbols.
type Move = (i64, i64, Vec<(usize, usize, u8)>);

#[derive(Debug, Clone, Copy)]
pub(crate) struct Budget {
    pub restarts: u32,
    pub moves: u64,
    pub polish_moves: u64,
}

pub(crate) struct LocalResult {
    pub cells: Vec<u8>,
    pub hard: i64,
    pub soft: i64,
    pub moves: u64,
}

fn dist(v: u32, lo: u32, hi: u32) -> i64 {
    if v < lo {
        (lo - v) as i64
    } else if v > hi {
        (v - hi) as i64
    } else {
        0
    }
}

fn out(v: u32, lo: u32, hi: u32) -> i64 {
    (v < lo || v > hi) as i64
}

struct State<'a> {
    m: &'a Model,
    cells: Vec<u8>,
    head: Vec<u32>,
    count_val: Vec<u32>,
    hard: i64,
    soft: i64,
}

impl<'a> State<'a> {
    fn new(m: &'a Model, cells: Vec<u8>) -> Self {
        let n_sym = m.symbols.len();
        let mut head = vec![0u32; m.days * n_sym];
        for r in 0..m.rows {
            for d in 0..m.days {
                head[d * n_sym + cells[m.cell(r, d)] as usize] += 1;
            }
        }
        let count_val = m.counts.iter().map(|c| m.row_count(&cells, c.row, c.mask)).collect();
        let mut s = State {
            m,
            cells,
            head,
            count_val,
            hard: 0,
            soft: 0,
        };
        s.recompute();
        s
    }

    /// Graded totals from scratch.
    fn recompute(&mut self) {
        let m = self.m;
        let n_sym = m.symbols.len();
        let (mut hard, mut soft) = (0i64, 0i64);
        for p in &m.patterns {
            if p.n > m.days {
                continue;
            }
            for &r in &p.rows {
                for start in 0..=m.days - p.n {
                    if !p.allowed.contains(m.window_key(&self.cells, r, start, p.n)) {
                        if p.hard {
                            hard += 1;
                        } else {
                            soft += p.weight as i64;
                        }
                    }
                }
            }
        }
        for (i, c) in m.counts.iter().enumerate() {
            let v = self.count_val[i];
            if c.hard {
                hard += dist(v, c.lo, c.hi);
            } else {
                soft += c.weight as i64 * out(v, c.lo, c.hi);
            }
        }
        for c in &m.demands {
            let h = self.head[c.day * n_sym + c.sym];
            if c.hard {
                hard += dist(h, c.lo, c.hi);
            } else {
                soft += c.weight as i64 * out(h, c.lo, c.hi);
            }
        }
        for p in &m.pins {
            let miss = (self.cells[m.cell(p.row, p.day)] as usize != p.sym) as i64;
            if p.hard {
                hard += miss;
            } else {
                soft += p.weight as i64 * miss;
            }
        }
        self.hard = hard;
        self.soft = soft;
    }

    /// Sets cell (row, day) to `b`, returning the change in (hard, soft).
    fn change(&mut self, row: usize, day: usize, b: u8) -> (i64, i64) {
        let m = self.m;
        let n_sym = m.symbols.len();
        let cell = m.cell(row, day);
        let a = self.cells[cell];
        if a == b {
            return (0, 0);
        }
        let (mut dh, mut ds) = (0i64, 0i64);
        for &p in &m.row_patterns[row] {
            let pc = &m.patterns[p];
            let n = pc.n;
            if n > m.days {
                continue;
            }
            let first = (day + 1).saturating_sub(n);
            let last = day.min(m.days - n);
            for start in first..=last {
                let old = m.window_key(&self.cells, row, start, n);
                let pw = m.pow[n - 1 - (day - start)];
                let new = old - a as u64 * pw + b as u64 * pw;
                let diff = (!pc.allowed.contains(new)) as i64 - (!pc.allowed.contains(old)) as i64;
                if pc.hard {
                    dh += diff;
                } else {
                    ds += pc.weight as i64 * diff;
                }
            }
        }
        for &c in &m.row_counts[row] {
            let cc = &m.counts[c];
            let ba = cc.mask >> a & 1;
            let bb = cc.mask >> b & 1;
            if ba == bb {
                continue;
            }
            let v = self.count_val[c];
            let nv = v + bb - ba;
            if cc.hard {
                dh += dist(nv, cc.lo, cc.hi) - dist(v, cc.lo, cc.hi);
            } else {
                ds += cc.weight as i64 * (out(nv, cc.lo, cc.hi) - out(v, cc.lo, cc.hi));
            }
            self.count_val[c] = nv;
        }
        for &c in &m.day_demands[day] {
            let dc = &m.demands[c];
            let h = self.head[day * n_sym + dc.sym];
            let nh = if dc.sym == a as usize {
                h - 1
            } else if dc.sym == b as usize {
                h + 1
            } else {
                continue;
            };
            if dc.hard {
                dh += dist(nh, dc.lo, dc.hi) - dist(h, dc.lo, dc.hi);
            } else {
                ds += dc.weight as i64 * (out(nh, dc.lo, dc.hi) - out(h, dc.lo, dc.hi));
            }
        }
        for &p in &m.cell_pins[cell] {
            let pc = &m.pins[p];
            let diff = (pc.sym != b as usize) as i64 - (pc.sym != a as usize) as i64;
            if pc.hard {
                dh += diff;
            } else {
                ds += pc.weight as i64 * diff;
            }
        }
        self.head[day * n_sym + a as usize] -= 1;
        self.head[day * n_sym + b as usize] += 1;
        self.cells[cell] = b;
        self.hard += dh;
        self.soft += ds;
        (dh, ds)
    }
}

/// Random walk through each row automaton, preferring symbols still short
/// of their demand on that day. Every row starts hard-window feasible.
fn construct(m: &Model, autos: &[RowAutomaton], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let n_sym = m.symbols.len();
    let mut cells = vec![0u8; m.rows * m.days];
    let mut need = vec![0i64; m.days * n_sym];
    for c in &m.demands {
        let e = &mut need[c.day * n_sym + c.sym];
        *e = (*e).max(c.lo as i64);
    }
    let mut order: Vec<usize> = (0..m.rows).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    for &r in &order {
        let auto = &autos[r];
        let mut state = 0u64;
        for d in 0..m.days {
            let mut options: Vec<(usize, u64)> = Vec::new();
            for sym in 0..n_sym {
                if auto.support[d] & (1 << sym) == 0 {
                    continue;
                }
                let (full, full_len, ns) = auto.step(state, sym);
                if auto.windows_ok(m, full, full_len, d) && auto.index(d, ns).is_some() {
                    options.push((sym, ns));
                }
            }
            let pick = if options.is_empty() {
                // Infeasible row: keep going with the first supported symbol.
                let sym = (0..n_sym).find(|&s| auto.support[d] & (1 << s) != 0).unwrap_or(0);
                (sym, auto.step(state, sym).2)
            } else if rng.gen_range(0..5) == 0 {
                options[rng.gen_range(0..options.len())]
            } else {
                let best = options.iter().map(|&(s, _)| need[d * n_sym + s]).max().unwrap();
                let top: Vec<_> = options
                    .iter()
                    .copied()
                    .filter(|&(s, _)| need[d * n_sym + s] == best)
                    .collect();
                top[rng.gen_range(0..top.len())]
            };
            cells[m.cell(r, d)] = pick.0 as u8;
            need[d * n_sym + pick.0] -= 1;
            state = pick.1;
        }
    }
    cells
}

/// Rewrites row `r` from a random day by walking its automaton, steering
/// towards short symbols, until the walk rejoins the row's old states. The
/// stretch it writes never breaks a hard window.
fn resample(st: &mut State<'_>, autos: &[RowAutomaton], r: usize, rng: &mut ChaCha8Rng) -> Option<Move> {
    let m = st.m;
    let n_sym = m.symbols.len();
    let auto = &autos[r];
    let mut start = rng.gen_range(0..m.days);
    let state_before = |cells: &[u8], s: usize| {
        (s.saturating_sub(auto.k)..s).fold(0u64, |acc, d| auto.step(acc, cells[m.cell(r, d)] as usize).2)
    };
    let mut state = state_before(&st.cells, start);
    if start > 0 && auto.index(start - 1, state).is_none() {
        start = 0;
        state = 0;
    }
    let len = rng.gen_range(1..=m.days.min(14));
    let greedy = rng.gen_range(0..2) == 0;
    let mut old_state = state;
    let mut undo = Vec::new();
    let (mut dh, mut ds) = (0, 0);
    let mut options: Vec<(usize, u64)> = Vec::with_capacity(n_sym);
    for d in start..m.days {
        let cur = st.cells[m.cell(r, d)] as usize;
        old_state = auto.step(old_state, cur).2;
        options.clear();
        for sym in 0..n_sym {
            if auto.support[d] & (1 << sym) == 0 {
                continue;
            }
            let (full, full_len, ns) = auto.step(state, sym);
            if auto.windows_ok(m, full, full_len, d) && auto.index(d, ns).is_some() {
                options.push((sym, ns));
            }
        }
        if options.is_empty() {
            break;
        }
        let keep = options.iter().find(|o| o.0 == cur).copied();
        let pick = match keep {
            // Past the rewritten stretch the old row is followed while it can be.
            Some(o) if d >= start + len => o,
            _ if greedy => {
                let short = |s: usize| {
                    m.day_demands[d]
                        .iter()
                        .filter(|&&c| m.demands[c].sym == s)
                        .map(|&c| m.demands[c].lo as i64 - st.head[d * n_sym + s] as i64)
                        .max()
                        .unwrap_or(0)
                };
                let best = options.iter().map(|o| short(o.0)).max().unwrap();
                let top: Vec<_> = options.iter().copied().filter(|o| short(o.0) == best).collect();
                top[rng.gen_range(0..top.len())]
            }
            _ => options[rng.gen_range(0..options.len())],
        };
        if pick.0 != cur {
            undo.push((r, d, cur as u8));
            let (h, s) = st.change(r, d, pick.0 as u8);
            dh += h;
            ds += s;
        }
        state = pick.1;
        if d >= start + len && state == old_state {
            break;
        }
    }
    (!undo.is_empty()).then_some((dh, ds, undo))
}

/// One perturbation applied in place; the returned list undoes it.
fn perturb(
    st: &mut State<'_>,
    autos: &[RowAutomaton],
    domain: &[u32],
    free: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Move> {
    let m = st.m;
    let n_sym = m.symbols.len();
    let kind = rng.gen_range(0..100);
    let mut undo = Vec::new();
    let (mut dh, mut ds) = (0, 0);
    if kind >= 70 {
        return resample(st, autos, rng.gen_range(0..m.rows), rng);
    }
    if kind < 25 || m.rows < 2 {
        let cell = free[rng.gen_range(0..free.len())];
        let (r, d) = (cell / m.days, cell % m.days);
        let dom = domain[cell];
        let opts = dom.count_ones();
        let cur = st.cells[cell];
        let mut pick = rng.gen_range(0..opts - 1);
        let mut b = 0u8;
        for s in 0..n_sym as u8 {
            if dom & (1 << s) != 0 && s != cur {
                if pick == 0 {
                    b = s;
                    break;
                }
                pick -= 1;
            }
        }
        undo.push((r, d, cur));
        let (h, s) = st.change(r, d, b);
        return Some((h, s, undo));
    }
    let r1 = rng.gen_range(0..m.rows);
    let mut r2 = rng.gen_range(0..m.rows - 1);
    if r2 >= r1 {
        r2 += 1;
    }
    let (start, len) = if kind < 55 {
        (rng.gen_range(0..m.days), 1)
    } else {
        let len = rng.gen_range(2..=7.min(m.days));
        (rng.gen_range(0..=m.days - len), len)
    };
    let mut any = false;
    for d in start..start + len {
        let a = st.cells[m.cell(r1, d)];
        let b = st.cells[m.cell(r2, d)];
        if a == b {
            continue;
        }
        if domain[m.cell(r1, d)] & (1 << b) == 0 || domain[m.cell(r2, d)] & (1 << a) == 0 {
            // Undo what was applied so far.
            for &(r, dd, s) in undo.iter().rev() {
                st.change(r, dd, s);
            }
            return None;
        }
        undo.push((r1, d, a));
        undo.push((r2, d, b));
        let (h1, s1) = st.change(r1, d, b);
        let (h2, s2) = st.change(r2, d, a);
        dh += h1 + h2;
        ds += s1 + s2;
        any = true;
    }
    any.then_some((dh, ds, undo))
}

fn revert(st: &mut State<'_>, undo: &[(usize, usize, u8)]) {
    for &(r, d, s) in undo.iter().rev() {
        st.change(r, d, s);
    }
}

pub(crate) fn search(
    m: &Model,
    autos: &[RowAutomaton],
    seed: u64,
    budget: Budget,
    stop: &dyn Fn() -> bool,
) -> LocalResult {
    let domain: Vec<u32> = (0..m.rows * m.days)
        .map(|c| autos[c / m.days.max(1)].support[c % m.days.max(1)])
        .collect();
    let free: Vec<usize> = (0..domain.len()).filter(|&c| domain[c].count_ones() > 1).collect();
    let mut best: Option<(Vec<u8>, i64, i64)> = None;
    let mut moves = 0u64;
    let mut stopped = false;

    for restart in 0..budget.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut st = State::new(m, construct(m, autos, &mut rng));
        if best.as_ref().is_none_or(|b| (st.hard, st.soft) < (b.1, b.2)) {
            best = Some((st.cells.clone(), st.hard, st.soft));
        }
        if !free.is_empty() && st.hard > 0 {
            let mut history = vec![HARD_WEIGHT * st.hard + st.soft; HISTORY];
            let mut i = 0u64;
            while i < budget.moves && st.hard > 0 {
                if i & 0x3ff == 0 && stop() {
                    stopped = true;
                    break;
                }
                let before = HARD_WEIGHT * st.hard + st.soft;
                if let Some((dh, ds, undo)) = perturb(&mut st, autos, &domain, &free, &mut rng) {
                    let after = before + HARD_WEIGHT * dh + ds;
                    let slot = (i as usize) % HISTORY;
                    if after <= before || after <= history[slot] {
                        if (st.hard, st.soft) < (best.as_ref().unwrap().1, best.as_ref().unwrap().2) {
                            best = Some((st.cells.clone(), st.hard, st.soft));
                        }
                    } else {
                        revert(&mut st, &undo);
                    }
                    history[slot] = HARD_WEIGHT * st.hard + st.soft;
                }
                i += 1;
            }
            moves += i;
        }
        if best.as_ref().unwrap().1 == 0 || stopped {
            break;
        }
    }

    let (cells, hard, soft) = best.expect("at least one restart");
    if hard > 0 || stopped || free.is_empty() || soft == 0 {
        return LocalResult {
            cells,
            hard,
            soft,
            moves,
        };
    }

    // Polish: soft objective only, never leaving hard feasibility.
    let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17) ^ 0x5bd1_e995);
    let mut st = State::new(m, cells);
    let mut best = (st.cells.clone(), st.soft);
    let mut history = vec![st.soft; HISTORY];
    let mut i = 0u64;
    // Long stretches without a better point end the polish early.
    let mut last_gain = 0u64;
    while i < budget.polish_moves && st.soft > 0 && i - last_gain <= budget.polish_moves / 4 {
        if i & 0x3ff == 0 && stop() {
            break;
        }
        let before = st.soft;
        if let Some((dh, ds, undo)) = perturb(&mut st, autos, &domain, &free, &mut rng) {
            let after = before + ds;
            let slot = (i as usize) % HISTORY;
            if dh == 0 && st.hard == 0 && (after <= before || after <= history[slot]) {
                if st.soft < best.1 {
                    best = (st.cells.clone(), st.soft);
                    last_gain = i;
                }
            } else {
                revert(&mut st, &undo);
            }
            history[slot] = st.soft;
        }
        i += 1;
    }
    moves += i;
    LocalResult {
        cells: best.0,
        hard: 0,
        soft: best.1,
        moves,
    }
}
