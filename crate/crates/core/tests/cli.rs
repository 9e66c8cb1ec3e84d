use std::io::Write;

use kp_dirichlet::cli::run_command;
use kp_dirichlet::oracle::spectrum_up_to;
use kp_dirichlet::report::{render, Format, Table};
use kp_dirichlet::{Breakpoint, StepPotential};

fn run(args: &[&str]) -> kp_dirichlet::cli::CommandOutput {
    run_command(std::iter::once("kp-dirichlet").chain(args.iter().copied()))
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("estimate"));
    assert_eq!(run(&["sweep", "--help"]).code, 0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["bogus"],
        vec!["estimate", "--jump", "1", "--c", "pi/2", "--n", "two"],
        vec!["estimate", "--jump", "1", "--c", "pi/2", "--n", "1", "--format", "xml"],
        vec!["estimate", "--c", "pi/2", "--n", "1"],
        vec!["estimate", "--a", "0", "--b", "0", "--c", "1", "--n", "3"],
    ] {
        let out = run(&args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stderr);
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn inadmissible_index_names_the_smallest() {
    let out = run(&["estimate", "--jump", "6", "--c", "pi/2", "--n", "3"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("smallest admissible n is 4"), "{}", out.stderr);
}

#[test]
fn numerical_failure_exits_one() {
    let out = run(&["estimate", "--jump", "1", "--c", "pi/2", "--n", "2", "--max-iter", "1"]);
    assert_eq!(out.code, 1, "{}", out.stderr);
}

#[test]
fn every_format_renders() {
    for f in ["text", "csv", "json"] {
        let out = run(&["compare", "--jump", "1", "--c", "pi/2", "--n", "1..3", "--format", f]);
        assert_eq!(out.code, 0, "{f}: {}", out.stderr);
        assert!(out.stdout.contains("oracle"), "{f}");
    }
    let json = run(&["oracle", "--jump", "1", "--c", "pi/2", "--n", "1..3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn csv_round_trips_exactly() {
    let out = run(&["oracle", "--jump", "1", "--c", "pi/2", "--n", "1..4", "--format", "csv", "--tol", "1e-14"]);
    assert_eq!(out.code, 0);
    let (header, rows) = csv_rows(&out.stdout);
    let j = header.iter().position(|h| h == "value").unwrap();
    let q = kp_dirichlet::make_kronig_penney(1.0, Breakpoint::pi_ratio(1, 2)).unwrap();
    for (i, row) in rows.iter().enumerate() {
        let parsed: f64 = row[j].parse().unwrap();
        let direct = kp_dirichlet::oracle::find_eigenvalue(&q, i as u32 + 1, 1e-14).unwrap().value;
        assert_eq!(parsed.to_bits(), direct.to_bits(), "n={}", i + 1);
    }
}

#[test]
fn empty_table_is_header_only_csv() {
    let t = Table::new(["n", "value"]);
    assert_eq!(render(&t, Format::Csv), "n,value\n");
}

#[test]
fn output_is_deterministic() {
    let args = ["compare", "--jump", "1", "--c", "pi/3", "--n", "2..5", "--format", "csv"];
    let first = run(&args);
    assert_eq!(first.code, 0);
    for _ in 0..3 {
        assert_eq!(run(&args), first);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("kp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "# comments and blank lines are ignored\n").unwrap();
    writeln!(f, "jump = 1\nc = pi/2\nn = 1..3\nformat = csv").unwrap();
    drop(f);
    let p = path.to_str().unwrap();

    let from_file = run(&["oracle", "--config", p]);
    assert_eq!(from_file.code, 0, "{}", from_file.stderr);
    assert_eq!(csv_rows(&from_file.stdout).1.len(), 3);

    let overridden = run(&["oracle", "--config", p, "--n", "2"]);
    let (_, rows) = csv_rows(&overridden.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "2");

    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "jump = 1\nc = pi/2\nn = 1\nthreads = 4\n").unwrap();
    assert_eq!(run(&["oracle", "--config", bad.to_str().unwrap()]).code, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn zero_jump_gives_squares() {
    let out = run(&["estimate", "--jump", "0", "--c", "pi/2", "--n", "1..5", "--format", "csv"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let (header, rows) = csv_rows(&out.stdout);
    let j = header.iter().position(|h| h == "value").unwrap();
    for (i, row) in rows.iter().enumerate() {
        let n = (i + 1) as f64;
        assert_eq!(row[j].parse::<f64>().unwrap(), n * n);
    }
}

#[test]
fn multi_piece_config_runs_the_oracle() {
    let out = run(&["oracle", "--pieces", r#"[[0, 1], ["pi/4", -3], ["pi/2", 1]]"#, "--n", "4..6"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 4);
}

#[test]
fn spectrum_skips_low_indices_for_strong_steps() {
    let q = StepPotential::from_abc(-4.0 / 3.0, 2.0 / 3.0, Breakpoint::pi_ratio(1, 3)).unwrap();
    let s = spectrum_up_to(&q, 6, 1e-13).unwrap();
    assert_eq!(s.skipped, vec![1]);
    let ns: Vec<u32> = s.eigenvalues.iter().map(|e| e.n).collect();
    assert_eq!(ns, vec![2, 3, 4, 5, 6]);
    for e in &s.eigenvalues {
        assert!((e.value - (e.n * e.n) as f64).abs() <= q.max_abs() + 1e-9);
    }
}
