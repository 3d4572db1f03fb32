//! The binary as a user runs it: exit codes, files written, reruns.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn shiftlearn(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftlearn"))
        .arg("--data")
        .arg(data)
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A year of history and one target month.
fn small_corpus(dir: &Path, extra: &[&str]) {
    let mut args = vec!["gen", "--months", "12", "--targets", "1"];
    args.extend_from_slice(extra);
    let o = shiftlearn(dir, &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn gen_extract_solve_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_corpus(d, &[]);
    for f in [
        "demand.csv",
        "manifest.json",
        "catalogue.toml",
        "rosters/2019-01.csv",
        "truth/2020-01.csv",
    ] {
        assert!(d.join(f).is_file(), "{f}");
    }

    let o = shiftlearn(d, &["extract"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("constraints ->"));
    let listing = std::fs::read_to_string(d.join("out/constraints.txt")).unwrap();
    for section in ["# T1", "# T2", "# T3", "# T4"] {
        assert!(listing.contains(section), "{section}");
    }

    let o = shiftlearn(d, &["--month", "2020-01", "solve"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let schedule = d.join("out/schedules/2020-01.csv");
    let text = std::fs::read_to_string(&schedule).unwrap();
    assert!(text.starts_with("# status="));
    assert!(text.contains("# trace relaxed_T2_lengths="));

    let o = shiftlearn(d, &["evaluate", schedule.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("H1"));
    let report = std::fs::read_to_string(d.join("out/reports/2020-01.csv")).unwrap();
    assert!(
        report.contains("class,count\nH1,0\nH2,0\nH3,0\nH4,0\nH5,0\n"),
        "{report}"
    );

    // The ground truth compared against the solve.
    let truth = d.join("truth/2020-01.csv");
    let o = shiftlearn(d, &["evaluate", schedule.to_str().unwrap(), truth.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(d.join("out/reports/2020-01.compare.csv").is_file());
}

#[test]
fn month_that_stays_infeasible_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_corpus(d, &["--exceptions", "0"]);
    assert_eq!(code(&shiftlearn(d, &["extract"])), 0);
    // Forty day shifts in a month, as a manual hard rule the ladder never relaxes.
    std::fs::write(d.join("manual.txt"), "hard|T3|(10001, D, 1, 31, 40, 40)\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_shiftlearn"))
        .args(["--data", d.to_str().unwrap(), "solve"])
        .env("SHIFTLEARN_MANUAL", "manual.txt")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stdout(&o).contains("2020-01 infeasible"));
    // The schedule is still written, with its status.
    let text = std::fs::read_to_string(d.join("out/schedules/2020-01.csv")).unwrap();
    assert!(text.starts_with("# status=infeasible"));
}

#[test]
fn configuration_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    // Nothing to mine and no demand to fall back on.
    let o = shiftlearn(d, &["extract"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("no history rosters"));

    let o = shiftlearn(d, &["--month", "2020-13", "solve"]);
    assert_eq!(code(&o), 3);

    let cfg = d.join("run.toml");
    std::fs::write(&cfg, "tau_u = \"1.25\"\nbogus = 1\n").unwrap();
    let o = shiftlearn(d, &["--config", cfg.to_str().unwrap(), "config"]);
    assert_eq!(code(&o), 3);

    std::fs::write(&cfg, "tau_u = \"one\"\n").unwrap();
    let o = shiftlearn(d, &["--config", cfg.to_str().unwrap(), "config"]);
    assert_eq!(code(&o), 3);

    // Solving before extracting.
    small_corpus(d, &["--exceptions", "0"]);
    let o = shiftlearn(d, &["solve"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("run `extract` first"));
}

#[test]
fn data_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_corpus(d, &["--exceptions", "0"]);
    assert_eq!(code(&shiftlearn(d, &["extract"])), 0);

    // No requests file, so no such month.
    let o = shiftlearn(d, &["--month", "2030-01", "solve"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("2030-01"));

    // A ragged history roster.
    let p = d.join("rosters/2019-03.csv");
    let mut text = std::fs::read_to_string(&p).unwrap();
    text.push_str("10099,D,D\n");
    std::fs::write(&p, text).unwrap();
    let o = shiftlearn(d, &["extract"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("2019-03"));
}

#[test]
fn same_seed_same_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    small_corpus(a.path(), &["--seed", "7"]);
    small_corpus(b.path(), &["--seed", "7"]);
    small_corpus(c.path(), &["--seed", "8"]);
    assert_eq!(tree(a.path()), tree(b.path()));
    assert_ne!(tree(a.path()), tree(c.path()));

    for d in [a.path(), b.path()] {
        assert_eq!(code(&shiftlearn(d, &["extract"])), 0);
    }
    assert_eq!(tree(&a.path().join("out")), tree(&b.path().join("out")));
}

#[test]
fn without_exceptions_the_gates_change_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_corpus(d, &["--exceptions", "0"]);
    assert_eq!(code(&shiftlearn(d, &["--out", "with", "extract"])), 0);
    assert_eq!(
        code(&shiftlearn(d, &["--out", "without", "--no-exclusion", "extract"])),
        0
    );
    assert_eq!(
        std::fs::read(d.join("with/constraints.txt")).unwrap(),
        std::fs::read(d.join("without/constraints.txt")).unwrap()
    );
}

#[test]
fn env_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "seed = 3\njobs = 2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_shiftlearn"))
        .args(["--config", cfg.to_str().unwrap(), "config"])
        .env("SHIFTLEARN_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("seed = 11"), "{text}");
    assert!(text.contains("jobs = 2"), "{text}");

    // Flags beat both.
    let o = Command::new(env!("CARGO_BIN_EXE_shiftlearn"))
        .args(["--config", cfg.to_str().unwrap(), "--seed", "5", "config"])
        .env("SHIFTLEARN_SEED", "11")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed = 5"));
}
