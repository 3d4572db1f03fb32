//! Violation reports as CSV, as a text table, and as bar-chart data.

use std::fmt::Write;

use shiftlearn_core::eval::{Class, Comparison, ViolationReport};

/// `class,count` rows under `#` lines naming the schedule and its trace.
pub fn report_csv(r: &ViolationReport) -> String {
    let mut out = format!(
        "# schedule={} month={} feasible={}\n",
        r.schedule_id, r.month, r.feasible
    );
    if let Some(t) = &r.trace {
        let _ = writeln!(out, "# trace {t}");
    }
    out.push_str("class,count\n");
    for c in Class::ALL {
        let _ = writeln!(out, "{c},{}", r.count(c));
    }
    out
}

/// Per-staff breakdown: one row per staff member with any violation.
pub fn per_staff_csv(r: &ViolationReport) -> String {
    let mut out = String::from("staff");
    for c in Class::ALL {
        let _ = write!(out, ",{c}");
    }
    out.push('\n');
    for (s, counts) in &r.per_staff {
        if counts.values().all(|&n| n == 0) {
            continue;
        }
        out.push_str(s.as_str());
        for c in Class::ALL {
            let _ = write!(out, ",{}", counts.get(&c).copied().unwrap_or(0));
        }
        out.push('\n');
    }
    out
}

pub fn report_table(r: &ViolationReport) -> String {
    let mut out = format!(
        "{} ({}){}\n",
        r.schedule_id,
        r.month,
        if r.feasible { "" } else { " INFEASIBLE" }
    );
    if let Some(t) = &r.trace {
        let _ = writeln!(out, "  {t}");
    }
    for c in Class::ALL {
        let _ = writeln!(out, "  {:<3} {:>5}", c.to_string(), r.count(c));
    }
    out
}

pub fn comparison_csv(c: &Comparison) -> String {
    let mut out = format!(
        "# month={} a={} b={}\nclass,a,b,delta,flagged\n",
        c.month, c.a_id, c.b_id
    );
    for r in &c.rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.class, r.a, r.b, r.delta, r.flagged);
    }
    out
}

pub fn comparison_table(c: &Comparison) -> String {
    let w = c.a_id.len().max(c.b_id.len()).max(5);
    let mut out = format!("{} : {} vs {}\n", c.month, c.a_id, c.b_id);
    let _ = writeln!(out, "  cls {:>w$} {:>w$} {:>6}", c.a_id, c.b_id, "delta");
    for r in &c.rows {
        let _ = writeln!(
            out,
            "  {:<3} {:>w$} {:>w$} {:>6}{}",
            r.class.to_string(),
            r.a,
            r.b,
            r.delta,
            if r.flagged { "  *" } else { "" }
        );
    }
    out
}

/// Soft-class counts of two runs side by side, one row per class, ready for
/// a grouped bar chart.
pub fn bars_csv(a_name: &str, b_name: &str, a: &[ViolationReport], b: &[ViolationReport]) -> String {
    let mut out = format!("class,{a_name},{b_name}\n");
    for c in Class::ALL.into_iter().filter(|c| !c.is_hard()) {
        let sa: u64 = a.iter().map(|r| r.count(c)).sum();
        let sb: u64 = b.iter().map(|r| r.count(c)).sum();
        let _ = writeln!(out, "{c},{sa},{sb}");
    }
    out
}
