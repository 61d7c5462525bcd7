use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn netlod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netlod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = netlod(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn out_dir(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

#[test]
fn generate_writes_loadable_network() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "generate",
        "--r",
        "8",
        "--setup",
        "random-structure",
        "--seed",
        "3",
        "--out",
        out_dir(dir.path()),
    ]);
    let (net, edges, pairs, bc) =
        netlod::network::load::<f64, _>(dir.path().join("network.json")).unwrap();
    assert_eq!(net.node_count(), 81);
    assert_eq!(edges.len(), 144);
    assert_eq!(pairs.len(), net.pairs().len());
    assert_eq!(bc.fixed().len(), 2 * 32);
}

#[test]
fn decay_csv_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "decay",
        "--r",
        "16",
        "--R",
        "4",
        "--rho",
        "1",
        "--rho",
        "2",
        "--rho",
        "inf",
        "--out",
        out_dir(dir.path()),
    ]);
    let text = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rho,rel_energy_error");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("inf,"));
    assert!(!text.contains('\r'));
    let last: f64 = lines[3].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last <= 1e-8);
}

#[test]
fn convergence_is_reproducible() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        ok(&[
            "convergence",
            "--r",
            "16",
            "--R",
            "2",
            "--R",
            "4",
            "--setup",
            "random-coefficients",
            "--seed",
            "11",
            "--out",
            out_dir(dir.path()),
        ]);
        fs::read(dir.path().join("convergence.csv")).unwrap()
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("R,H,rho,lod_abs_energy,lod_rel_energy"));
    assert_eq!(lines.clone().count(), 2);
    assert!(lines.all(|l| l.ends_with(",ok")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("results");
    fs::write(
        &cfg,
        format!(
            "problem = \"displaced-boundary\"\nr = 64\nR = [4]\nout = {:?}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let stdout = ok(&[
        "--config",
        cfg.to_str().unwrap(),
        "solve-lod",
        "--r",
        "16",
        "--rho",
        "full",
    ]);
    assert!(stdout.contains("relative energy error"), "{stdout}");
    let text = fs::read_to_string(out.join("solution_lod.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "node,x,y,ux,uy");
    assert_eq!(text.lines().count(), 1 + 17 * 17);
    // unlocalized basis reproduces the displaced-boundary solution
    let err: f64 = stdout
        .split("relative energy error ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(err < 1e-8, "{stdout}");
}

#[test]
fn basis_save_and_load_agree() {
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("basis.txt");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let common = [
        "solve-lod",
        "--r",
        "16",
        "--R",
        "4",
        "--setup",
        "random-structure",
        "--seed",
        "2",
    ];
    let mut args = common.to_vec();
    args.extend([
        "--out",
        a.to_str().unwrap(),
        "--save-basis",
        basis.to_str().unwrap(),
    ]);
    ok(&args);
    let mut args = common.to_vec();
    args.extend([
        "--out",
        b.to_str().unwrap(),
        "--load-basis",
        basis.to_str().unwrap(),
    ]);
    ok(&args);
    assert_eq!(
        fs::read(a.join("solution_lod.csv")).unwrap(),
        fs::read(b.join("solution_lod.csv")).unwrap()
    );
    // a basis built for another grid is rejected
    let out = netlod(&[
        "solve-lod",
        "--r",
        "16",
        "--R",
        "8",
        "--load-basis",
        basis.to_str().unwrap(),
    ]);
    assert!(!out.status.success());
}

#[test]
fn solve_full_writes_solution() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "solve-full",
        "--r",
        "8",
        "--R",
        "2",
        "--out",
        out_dir(dir.path()),
    ]);
    let text = fs::read_to_string(dir.path().join("solution_full.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 81);
    for row in rows {
        let on_edge = [row[1], row[2]].iter().any(|&c| c == 0.0 || c == 1.0);
        if on_edge {
            assert_eq!((row[3], row[4]), (0.0, 0.0));
        } else {
            assert!(row[3] > 0.0 || row[4] > 0.0);
        }
    }
}

#[test]
fn bad_input_fails_cleanly() {
    for args in [
        vec!["convergence", "--r", "12"],
        vec!["convergence", "--r", "16", "--R", "16"],
        vec!["decay", "--problem", "sideways"],
        vec!["solve-lod", "--r", "16", "--R", "4", "--rho", "-2"],
        vec!["generate", "--config", "/nonexistent/run.toml"],
    ] {
        let out = netlod(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
