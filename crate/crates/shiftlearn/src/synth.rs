//! Seeded synthetic corpora with planted rules and planted exceptions.
//!
//! Two profiles:
//!
//! * `facility`: 20 staff shaped like a two-unit care facility. Eight night
//!   workers run an 8-day cycle `N N - D N N - -` with staggered phases, ten
//!   day workers repeat a weekly template, and a part-timer (10006) and a
//!   partner (10001) share one weekday slot: the part-timer takes the first 15
//!   weekdays of the month, the partner the rest. Headcounts match the demand
//!   table on every day by construction.
//! * `long-runs`: 8 day-only workers on weekly templates with runs of at most
//!   four. The planted exception is a worker covering a Friday leave by
//!   stretching Mon..Thu into five days in a row.
//!
//! An exception changes one cell of its staff member on a day `d`, and a
//! compensating colleague (who files a leave for `d`) gives the shift up, so
//! headcounts stay exact. Further leaves from staff already off push u_d
//! below 1.25 on `d`. Normal leaves only fall on days the staff member is off
//! anyway and never push a day below the margin threshold.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use shiftlearn_core::{DemandTable, MonthId, RequestSet, Roster, ShiftSymbol, StaffId, Weekday};

use crate::catalogue::Catalogue;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Facility,
    LongRuns,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenSettings {
    pub profile: Profile,
    pub seed: u64,
    /// First history month, `YYYY-MM`.
    pub start: String,
    pub history_months: u32,
    /// Months after the history with requests and a ground-truth roster.
    pub target_months: u32,
    /// How many of the profile's exception rules to plant (in listed order).
    pub exceptions: usize,
}

impl Default for GenSettings {
    fn default() -> Self {
        Self {
            profile: Profile::Facility,
            seed: 1,
            start: "2019-01".into(),
            history_months: 36,
            target_months: 12,
            exceptions: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaffRole {
    pub staff: String,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedPattern {
    pub staff: String,
    pub sequence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCount {
    pub staff: String,
    pub shift: String,
    pub lower: u32,
    pub upper: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandRow {
    pub weekday: String,
    pub shift: String,
    pub count: u32,
}

/// Where one exception was planted; `day` is the changed cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Occurrence {
    pub month: String,
    pub day: u32,
    pub compensator: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedException {
    pub name: String,
    pub staff: String,
    /// The T1 key the exception produces; its last element is the changed cell.
    pub sequence: Vec<String>,
    pub occurrences: Vec<Occurrence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnomalyCell {
    pub month: String,
    pub staff: String,
    pub day: u32,
    pub planned: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatedDay {
    pub month: String,
    pub day: u32,
}

/// Ground truth written next to a generated corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub settings: GenSettings,
    pub staff: Vec<StaffRole>,
    pub history: Vec<String>,
    pub targets: Vec<String>,
    pub demand: Vec<DemandRow>,
    pub planted_patterns: Vec<PlantedPattern>,
    pub planted_counts: Vec<PlantedCount>,
    pub exceptions: Vec<PlantedException>,
    pub anomaly_cells: Vec<AnomalyCell>,
    pub gated_days: Vec<GatedDay>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub demand: DemandTable,
    pub history: Vec<(Roster, RequestSet)>,
    /// Target months: the ground-truth roster and the requests to solve with.
    pub targets: Vec<(Roster, RequestSet)>,
    pub manifest: Manifest,
    pub catalogue: Catalogue,
}

fn sym(s: &str) -> ShiftSymbol {
    s.parse().expect("generator symbols are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Night { unit: u8, phase: u32 },
    Day { template: &'static str },
    PartTime,
    Partner,
}

impl Role {
    fn label(self) -> String {
        match self {
            Role::Night { unit, phase } => format!("night unit {unit} phase {phase}"),
            Role::Day { template } => format!("day template {template}"),
            Role::PartTime => "part-time, first 15 weekdays".into(),
            Role::Partner => "weekday slot after the part-timer".into(),
        }
    }
}

/// Positions 0..8 of the night cycle; `N` stands for the unit's night shift.
const NIGHT_CYCLE: [&str; 8] = ["N", "N", "-", "D", "N", "N", "-", "-"];

/// Weekly templates, Sunday first. Column sums are 5,7,7,7,7,7,5.
const FACILITY_TEMPLATES: [&str; 10] = [
    "-D-DDDD", "-DD-DDD", "-DDD-DD", "-DDDD-D", "D-D-DDD", "-D-DDD-", "D-DD-D-", "D-DDD--", "DD-D-D-", "DDD-D--",
];

/// Column sums 3,5,5,5,5,5,3; the first worker is off on Fridays after a
/// four-day run.
const LONG_RUN_TEMPLATES: [&str; 8] = [
    "-DDDD--", "-D-D-D-", "DD-DDD-", "-D-D-D-", "--D-D-D", "DDD-D--", "--D-DDD", "D-DD-DD",
];

fn facility_roles() -> Vec<(StaffId, Role)> {
    let mut v = Vec::new();
    for i in 0..20u32 {
        let id = 10001 + i;
        let role = match id {
            10001 => Role::Partner,
            10002..=10005 => Role::Night {
                unit: 1,
                phase: id - 10002,
            },
            10006 => Role::PartTime,
            10007..=10015 => Role::Day {
                template: FACILITY_TEMPLATES[(id - 10007) as usize],
            },
            10016..=10019 => Role::Night {
                unit: 2,
                phase: 4 + id - 10016,
            },
            _ => Role::Day {
                template: FACILITY_TEMPLATES[9],
            },
        };
        v.push((StaffId::new(id.to_string()), role));
    }
    v
}

fn long_run_roles() -> Vec<(StaffId, Role)> {
    LONG_RUN_TEMPLATES
        .iter()
        .enumerate()
        .map(|(i, t)| (StaffId::new((10001 + i).to_string()), Role::Day { template: t }))
        .collect()
}

fn demand_for(profile: Profile) -> DemandTable {
    let mut t = DemandTable::new();
    for w in Weekday::ALL {
        let weekend = matches!(w, Weekday::Sun | Weekday::Sat);
        match profile {
            Profile::Facility => {
                t.set(w, sym("D"), if weekend { 6 } else { 9 });
                t.set(w, sym("1N"), 2);
                t.set(w, sym("2N"), 2);
            }
            Profile::LongRuns => t.set(w, sym("D"), if weekend { 3 } else { 5 }),
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// A day shift on the free day right after two nights.
    NightThenDay,
    /// A third night in a row.
    ThirdNight,
    /// Working the template's day off on this weekday.
    ExtraDay(Weekday),
}

struct ExceptionRule {
    name: &'static str,
    staff: &'static str,
    kind: Kind,
}

const FACILITY_EXCEPTIONS: [ExceptionRule; 10] = [
    ExceptionRule {
        name: "night-then-day",
        staff: "10005",
        kind: Kind::NightThenDay,
    },
    ExceptionRule {
        name: "night-then-day",
        staff: "10004",
        kind: Kind::NightThenDay,
    },
    ExceptionRule {
        name: "night-then-day",
        staff: "10017",
        kind: Kind::NightThenDay,
    },
    ExceptionRule {
        name: "night-then-day",
        staff: "10018",
        kind: Kind::NightThenDay,
    },
    ExceptionRule {
        name: "third-night",
        staff: "10002",
        kind: Kind::ThirdNight,
    },
    ExceptionRule {
        name: "third-night",
        staff: "10016",
        kind: Kind::ThirdNight,
    },
    ExceptionRule {
        name: "extra-day",
        staff: "10007",
        kind: Kind::ExtraDay(Weekday::Tue),
    },
    ExceptionRule {
        name: "extra-day",
        staff: "10009",
        kind: Kind::ExtraDay(Weekday::Thu),
    },
    ExceptionRule {
        name: "extra-day",
        staff: "10012",
        kind: Kind::ExtraDay(Weekday::Tue),
    },
    ExceptionRule {
        name: "extra-day",
        staff: "10014",
        kind: Kind::ExtraDay(Weekday::Mon),
    },
];

const LONG_RUN_EXCEPTIONS: [ExceptionRule; 1] = [ExceptionRule {
    name: "friday-cover",
    staff: "10001",
    kind: Kind::ExtraDay(Weekday::Fri),
}];

/// A month under construction.
struct Grid {
    month: MonthId,
    cells: Vec<Vec<ShiftSymbol>>,
    touched: Vec<Vec<bool>>,
    leaves: Vec<(usize, u32)>,
    gated: Vec<u32>,
}

impl Grid {
    fn cell(&self, s: usize, d: u32) -> ShiftSymbol {
        self.cells[s][d as usize - 1]
    }

    fn set(&mut self, s: usize, d: u32, v: ShiftSymbol) {
        self.cells[s][d as usize - 1] = v;
        self.touched[s][d as usize - 1] = true;
    }

    fn on_leave(&self, s: usize, d: u32) -> bool {
        self.leaves.contains(&(s, d))
    }

    fn leaves_on(&self, d: u32) -> usize {
        self.leaves.iter().filter(|l| l.1 == d).count()
    }

    fn leaves_of(&self, s: usize) -> u32 {
        self.leaves.iter().filter(|l| l.0 == s).count() as u32
    }

    fn assigned(&self, s: usize) -> u32 {
        self.cells[s].iter().filter(|c| !c.is_off()).count() as u32
    }

    /// One more leave keeps u_f >= 1/2, with one day of headroom for a later
    /// change to the row.
    fn may_request(&self, s: usize) -> bool {
        2 * (self.leaves_of(s) + 1) + 2 <= self.assigned(s)
    }

    /// Length of the run of `v` through day `d`.
    fn run_through(&self, s: usize, d: u32, v: ShiftSymbol) -> (u32, u32) {
        let mut a = d;
        while a > 1 && self.cell(s, a - 1) == v {
            a -= 1;
        }
        let mut b = d;
        while b < self.month.last_day() && self.cell(s, b + 1) == v {
            b += 1;
        }
        (a, b)
    }

    fn into_parts(self, staff: &[StaffId]) -> (Roster, RequestSet) {
        let roster =
            Roster::new(self.month, staff.to_vec(), self.cells.concat()).expect("generated grid is rectangular");
        let mut q = RequestSet::new(self.month);
        let mut leaves = self.leaves;
        leaves.sort();
        for (s, d) in leaves {
            q.insert(staff[s].clone(), d, ShiftSymbol::off())
                .expect("one leave per cell");
        }
        (roster, q)
    }
}

/// Smallest leave count that puts a day below u_d = 5/4.
fn leaves_to_gate(n: usize, required: u32) -> usize {
    (0..=n).find(|&l| 4 * (n - l) < 5 * required as usize).unwrap_or(n)
}

/// Largest leave count that keeps u_d >= 5/4.
fn leave_cap(n: usize, required: u32) -> usize {
    leaves_to_gate(n, required).saturating_sub(1)
}

fn weekday_slot(month: MonthId, d: u32) -> Option<u32> {
    let is_weekday = |x: u32| !matches!(month.weekday(x), Weekday::Sun | Weekday::Sat);
    is_weekday(d).then(|| (1..=d).filter(|&x| is_weekday(x)).count() as u32)
}

fn base_grid(month: MonthId, roles: &[(StaffId, Role)], t0: u64) -> Grid {
    let days = month.last_day();
    let mut cells = Vec::new();
    for (_, role) in roles {
        let row = (1..=days)
            .map(|d| {
                let t = t0 + d as u64 - 1;
                match *role {
                    Role::Night { unit, phase } => match NIGHT_CYCLE[((t + phase as u64) % 8) as usize] {
                        "N" => sym(&format!("{unit}N")),
                        c => sym(c),
                    },
                    Role::Day { template } => sym(&template[month.weekday(d).index()..][..1]),
                    Role::PartTime => match weekday_slot(month, d) {
                        Some(k) if k <= 15 => sym("D"),
                        _ => ShiftSymbol::off(),
                    },
                    Role::Partner => match weekday_slot(month, d) {
                        Some(k) if k > 15 => sym("D"),
                        _ => ShiftSymbol::off(),
                    },
                }
            })
            .collect();
        cells.push(row);
    }
    let n = roles.len();
    Grid {
        month,
        cells,
        touched: vec![vec![false; days as usize]; n],
        leaves: Vec::new(),
        gated: Vec::new(),
    }
}

struct Planted {
    rule: usize,
    day: u32,
    compensator: usize,
    sequence: Vec<ShiftSymbol>,
}

/// Tries to plant `rule` somewhere in the month. Returns None when no day fits.
fn plant(
    grid: &mut Grid,
    roles: &[(StaffId, Role)],
    rules: &[ExceptionRule],
    rule: usize,
    demand: &DemandTable,
    days: std::ops::RangeInclusive<u32>,
    rng: &mut ChaCha8Rng,
) -> Option<Planted> {
    let r = &rules[rule];
    let x = roles.iter().position(|(s, _)| s.as_str() == r.staff)?;
    let unit_night = match roles[x].1 {
        Role::Night { unit, .. } => Some(sym(&format!("{unit}N"))),
        _ => None,
    };
    let is_template_day = |s: usize| matches!(roles[s].1, Role::Day { .. });
    let free = |g: &Grid, s: usize, d: u32| !g.touched[s][d as usize - 1] && !g.on_leave(s, d);

    let mut candidates = Vec::new();
    for d in days {
        if d > grid.month.last_day() || grid.gated.contains(&d) {
            continue;
        }
        let w = grid.month.weekday(d);
        if matches!(w, Weekday::Sun | Weekday::Sat) || !free(grid, x, d) || !grid.cell(x, d).is_off() {
            continue;
        }
        let ok = match r.kind {
            Kind::NightThenDay => d >= 2 && Some(grid.cell(x, d - 1)) == unit_night,
            Kind::ThirdNight => {
                d >= 3 && Some(grid.cell(x, d - 1)) == unit_night && Some(grid.cell(x, d - 2)) == unit_night
            }
            Kind::ExtraDay(wd) => w == wd,
        };
        if ok {
            candidates.push(d);
        }
    }
    candidates.shuffle(rng);

    for d in candidates {
        let new = match r.kind {
            Kind::ThirdNight => unit_night.expect("night rule on a night worker"),
            _ => sym("D"),
        };
        // The colleague who gives `new` up on d.
        let mut comps: Vec<usize> = (0..roles.len())
            .filter(|&s| s != x && free(grid, s, d) && grid.cell(s, d) == new && grid.may_request(s))
            .filter(|&s| match r.kind {
                Kind::ThirdNight => true,
                _ => is_template_day(s),
            })
            .collect();
        if comps.is_empty() {
            continue;
        }
        comps.sort();
        let c = *comps.choose(rng).expect("non-empty");

        let required = demand.total(grid.month.weekday(d));
        let need = leaves_to_gate(roles.len(), required).saturating_sub(grid.leaves_on(d) + 1);
        let mut pads: Vec<usize> = (0..roles.len())
            .filter(|&s| s != x && s != c && grid.cell(s, d).is_off() && !grid.on_leave(s, d) && grid.may_request(s))
            .collect();
        if pads.len() < need {
            continue;
        }
        pads.shuffle(rng);
        pads.sort_by_key(|&s| grid.leaves_of(s));

        let old = grid.cell(x, d);
        grid.set(x, d, new);
        let (first, sequence) = match r.kind {
            Kind::NightThenDay => (d - 1, vec![unit_night.expect("night rule on a night worker"), new]),
            Kind::ThirdNight => (d - 2, vec![new; 3]),
            Kind::ExtraDay(_) => {
                let (a, b) = grid.run_through(x, d, new);
                let edge = a == 1 || b == grid.month.last_day();
                if edge || b - a + 1 > 7 || (a - 1..=b + 1).any(|t| t != d && grid.touched[x][t as usize - 1]) {
                    // A run cut by the month edge or by an earlier plant would
                    // spell a different key.
                    grid.cells[x][d as usize - 1] = old;
                    grid.touched[x][d as usize - 1] = false;
                    continue;
                }
                (a, vec![new; (b - a + 1) as usize])
            }
        };
        // Later compensators must not cut into the planted window or its flanks.
        let last = first + sequence.len() as u32 - 1;
        for t in first.saturating_sub(1).max(1)..=(last + 1).min(grid.month.last_day()) {
            grid.touched[x][t as usize - 1] = true;
        }
        grid.set(c, d, ShiftSymbol::off());
        grid.leaves.push((c, d));
        for &s in &pads[..need] {
            grid.leaves.push((s, d));
        }
        grid.gated.push(d);
        return Some(Planted {
            rule,
            day: d,
            compensator: c,
            sequence,
        });
    }
    None
}

/// Up to two leaves per staff member on days they are off anyway.
fn normal_leaves(grid: &mut Grid, n: usize, demand: &DemandTable, rng: &mut ChaCha8Rng) {
    for s in 0..n {
        let k = rng.gen_range(0..=2);
        let mut days: Vec<u32> = (1..=grid.month.last_day())
            .filter(|&d| grid.cell(s, d).is_off() && !grid.gated.contains(&d) && !grid.on_leave(s, d))
            .collect();
        days.shuffle(rng);
        let mut placed = 0;
        for d in days {
            if placed == k {
                break;
            }
            let cap = leave_cap(n, demand.total(grid.month.weekday(d)));
            if grid.leaves_on(d) < cap && grid.may_request(s) {
                grid.leaves.push((s, d));
                placed += 1;
            }
        }
    }
}

/// Friday leaves in a long-runs target month, covered by a worker whose week
/// stays within four-day runs.
/// Every window of length 2..=7 found in some repeated long-run template.
fn template_windows() -> BTreeSet<Vec<ShiftSymbol>> {
    let mut out = BTreeSet::new();
    for t in LONG_RUN_TEMPLATES {
        let week: Vec<ShiftSymbol> = t.chars().map(|c| sym(&c.to_string())).collect();
        for n in 2..=7 {
            for i in 0..7 {
                out.insert((i..i + n).map(|j| week[j % 7]).collect());
            }
        }
    }
    out
}

/// True when each window of row `s` through day `d` is a template window.
fn usual_around(grid: &Grid, s: usize, d: u32, usual: &BTreeSet<Vec<ShiftSymbol>>) -> bool {
    let last = grid.month.last_day();
    (2..=7u32).all(|n| {
        (d.saturating_sub(n - 1).max(1)..=d)
            .all(|a| a + n - 1 > last || usual.contains(&(a..a + n).map(|x| grid.cell(s, x)).collect::<Vec<_>>()))
    })
}

fn friday_covers(grid: &mut Grid, roles: &[(StaffId, Role)], rng: &mut ChaCha8Rng) {
    let fridays: Vec<u32> = (5..=grid.month.last_day())
        .filter(|&d| grid.month.weekday(d) == Weekday::Fri)
        .collect();
    let wanted = rng.gen_range(1..=2usize).min(fridays.len());
    let mut picked: Vec<u32> = fridays.choose_multiple(rng, wanted).copied().collect();
    picked.sort();
    // Workers 10005 and 10006 are off on Fridays and their Friday-on week is
    // another worker's template, rotated. The leave and the cover must both
    // leave rows whose windows the templates already show, so the month stays
    // solvable once the friday-cover exception is excluded.
    let usual = template_windows();
    let covers = [4usize, 5];
    let mut used = Vec::new();
    for (i, d) in picked.into_iter().enumerate() {
        let z = covers[i % 2];
        if grid.cell(z, d) != ShiftSymbol::off() || grid.on_leave(z, d) {
            continue;
        }
        grid.set(z, d, sym("D"));
        if !usual_around(grid, z, d, &usual) {
            grid.cells[z][d as usize - 1] = ShiftSymbol::off();
            grid.touched[z][d as usize - 1] = false;
            continue;
        }
        let mut ys: Vec<usize> = (0..roles.len())
            .filter(|&s| grid.cell(s, d) == sym("D") && s != z && !used.contains(&s) && grid.may_request(s))
            .collect();
        ys.shuffle(rng);
        let y = ys.into_iter().find(|&y| {
            grid.cells[y][d as usize - 1] = ShiftSymbol::off();
            let ok = usual_around(grid, y, d, &usual);
            grid.cells[y][d as usize - 1] = sym("D");
            ok
        });
        match y {
            Some(y) => {
                used.push(y);
                grid.set(y, d, ShiftSymbol::off());
                grid.leaves.push((y, d));
            }
            None => {
                grid.cells[z][d as usize - 1] = ShiftSymbol::off();
                grid.touched[z][d as usize - 1] = false;
            }
        }
    }
}

pub fn generate(settings: &GenSettings) -> Result<Corpus> {
    let start: MonthId = settings
        .start
        .parse()
        .map_err(|_| CliError::Config(format!("start `{}` is not YYYY-MM", settings.start)))?;
    let (roles, rules): (Vec<(StaffId, Role)>, &[ExceptionRule]) = match settings.profile {
        Profile::Facility => (facility_roles(), &FACILITY_EXCEPTIONS),
        Profile::LongRuns => (long_run_roles(), &LONG_RUN_EXCEPTIONS),
    };
    if settings.exceptions > rules.len() {
        return Err(CliError::Config(format!(
            "the {:?} profile has {} exception rules, {} requested",
            settings.profile,
            rules.len(),
            settings.exceptions
        )));
    }
    let staff: Vec<StaffId> = roles.iter().map(|(s, _)| s.clone()).collect();
    let demand = demand_for(settings.profile);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut exceptions: Vec<PlantedException> = rules[..settings.exceptions]
        .iter()
        .map(|r| PlantedException {
            name: r.name.into(),
            staff: r.staff.into(),
            sequence: Vec::new(),
            occurrences: Vec::new(),
        })
        .collect();
    let mut anomaly_cells = Vec::new();
    let mut gated_days = Vec::new();
    let mut history = Vec::new();
    let mut targets = Vec::new();

    let mut month = start;
    let mut t0 = 0u64;
    let mut slot = 0usize;
    // Rules that found no room get first go next month.
    let mut owed = std::collections::VecDeque::new();
    for i in 0..settings.history_months + settings.target_months {
        let mut grid = base_grid(month, &roles, t0);
        let planned = grid.cells.clone();
        let is_history = i < settings.history_months;
        if is_history && i % 3 != 2 && settings.exceptions > 0 {
            let (per_month, days) = match settings.profile {
                // Days 3..12 keep every gated window clear of the weekday
                // slot handover, which falls on day 19 at the earliest.
                Profile::Facility => (3, 3..=12),
                Profile::LongRuns => (1, 5..=31),
            };
            for _ in 0..per_month {
                let rule = owed.pop_front().unwrap_or_else(|| {
                    slot += 1;
                    (slot - 1) % settings.exceptions
                });
                let planted = plant(&mut grid, &roles, rules, rule, &demand, days.clone(), &mut rng);
                if planted.is_none() {
                    owed.push_back(rule);
                }
                if let Some(p) = planted {
                    let e = &mut exceptions[p.rule];
                    let seq: Vec<String> = p.sequence.iter().map(|s| s.to_string()).collect();
                    if e.sequence.is_empty() {
                        e.sequence = seq;
                    }
                    e.occurrences.push(Occurrence {
                        month: month.to_string(),
                        day: p.day,
                        compensator: staff[p.compensator].to_string(),
                    });
                    gated_days.push(GatedDay {
                        month: month.to_string(),
                        day: p.day,
                    });
                }
            }
        }
        if !is_history && settings.profile == Profile::LongRuns {
            friday_covers(&mut grid, &roles, &mut rng);
        }
        normal_leaves(&mut grid, roles.len(), &demand, &mut rng);

        if is_history {
            for (s, row) in planned.iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    if grid.cells[s][j] != p {
                        anomaly_cells.push(AnomalyCell {
                            month: month.to_string(),
                            staff: staff[s].to_string(),
                            day: j as u32 + 1,
                            planned: p.to_string(),
                            actual: grid.cells[s][j].to_string(),
                        });
                    }
                }
            }
        }
        t0 += month.last_day() as u64;
        let parts = grid.into_parts(&staff);
        if is_history {
            history.push(parts);
        } else {
            targets.push(parts);
        }
        month = month.next();
    }

    let manifest = Manifest {
        settings: settings.clone(),
        staff: roles
            .iter()
            .map(|(s, r)| StaffRole {
                staff: s.to_string(),
                role: r.label(),
            })
            .collect(),
        history: history.iter().map(|(r, _)| r.month().to_string()).collect(),
        targets: targets.iter().map(|(r, _)| r.month().to_string()).collect(),
        demand: demand
            .iter()
            .map(|(w, s, c)| DemandRow {
                weekday: w.token().into(),
                shift: s.to_string(),
                count: c,
            })
            .collect(),
        planted_patterns: planted_patterns(&roles),
        planted_counts: planted_counts(&roles),
        exceptions,
        anomaly_cells,
        gated_days,
    };
    let all: Vec<&Roster> = history.iter().chain(&targets).map(|(r, _)| r).collect();
    let catalogue = Catalogue::from_truth(&all);
    Ok(Corpus {
        demand,
        history,
        targets,
        manifest,
        catalogue,
    })
}

fn strings(seq: &[&str]) -> Vec<String> {
    seq.iter().map(|s| s.to_string()).collect()
}

/// Patterns every staff member shows on ordinary weeks, 30 for the facility.
fn planted_patterns(roles: &[(StaffId, Role)]) -> Vec<PlantedPattern> {
    let mut v = Vec::new();
    for (s, role) in roles {
        let mut add = |seq: Vec<String>| {
            v.push(PlantedPattern {
                staff: s.to_string(),
                sequence: seq,
            })
        };
        match *role {
            Role::Night { unit, .. } => {
                let n = format!("{unit}N");
                let n = n.as_str();
                add(strings(&[n, n, "-", "D"]));
                add(strings(&["D", n, n, "-", "-"]));
            }
            Role::Day { template } => add(template.chars().map(|c| c.to_string()).collect()),
            Role::PartTime => {
                add(strings(&["D"; 5]));
                add(strings(&["-", "-", "D", "D", "D", "D", "D"]));
                add(strings(&["D", "-", "-", "D"]));
            }
            Role::Partner => add(strings(&["-"; 7])),
        }
    }
    v
}

/// Monthly totals fixed by construction in every month.
fn planted_counts(roles: &[(StaffId, Role)]) -> Vec<PlantedCount> {
    let mut v = Vec::new();
    let mut add = |s: &StaffId, shift: &str, lower, upper| {
        v.push(PlantedCount {
            staff: s.to_string(),
            shift: shift.into(),
            lower,
            upper,
        })
    };
    for (s, role) in roles {
        match *role {
            Role::PartTime => {
                add(s, "D", 15, 15);
                add(s, "1N", 0, 0);
                add(s, "2N", 0, 0);
            }
            Role::Night { unit, .. } => add(s, if unit == 1 { "2N" } else { "1N" }, 0, 0),
            _ => {}
        }
    }
    v
}
