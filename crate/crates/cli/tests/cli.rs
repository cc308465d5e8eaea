use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_richardson"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn smallest_energies_by_multiplicity() {
    let text = stdout(&["lattice", "--table3"]);
    let expected = "N_d,E_red\n1,1\n2,5\n3,25\n4,65\n5,625\n6,325\n7,15625\n8,1105\n9,4225\n10,8125\n";
    assert_eq!(text, expected);
}

#[test]
fn branch_points_are_deterministic() {
    let a = stdout(&["branch-points", "--nmax", "2", "--radius", "20"]);
    let b = stdout(&["branch-points", "--nmax", "2", "--radius", "20"]);
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("sheet_lo,sheet_hi,re_lambda,im_lambda,re_E,im_E"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert!(rows.iter().any(|r| r[0] == 1.0
        && r[1] == 2.0
        && r[2].abs() < 1e-6
        && (r[3].abs() - 4.4753086).abs() < 1e-6
        && (r[4] - 6.40190327).abs() < 1e-6));
    assert!(rows.iter().any(|r| r[0] == 2.0
        && (r[2] + 9.26413853).abs() < 1e-6
        && (r[3].abs() - 6.83485299).abs() < 1e-6
        && (r[4] - 17.6177186).abs() < 1e-6));
}

#[test]
fn json_output() {
    let text = stdout(&["census", "-e", "5", "--mmax", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["N"], 0);
    assert_eq!(rows[1]["N"], 2);
    assert_eq!(rows[1]["m"], 1);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("richardson-cli-{}.csv", std::process::id()));
    let out = run(&["lattice", "--matrix", "2", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(text, "i,j,E_red\n1,1,1\n1,2,5\n2,1,5\n2,2,9\n");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["census"]).status.code(), Some(2));
    assert_eq!(run(&["segments", "--sheet", "0+"]).status.code(), Some(2));
    assert_eq!(run(&["eigencurves", "--points", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--criterion", "13"]).status.code(), Some(2));
}

#[test]
fn single_criterion_passes() {
    let text = stdout(&["verify", "--criterion", "2"]);
    assert!(text.starts_with("[PASS]") && text.contains(" 2 minima"), "{text}");
}
