use std::path::Path;
use std::process::Command;

use clap::Parser;
use selfpolar_cli::{run, run_with, Cli, EXIT_BUDGET, EXIT_MALFORMED, EXIT_OK, EXIT_USAGE};
use selfpolar_core::geometry::io::{read_polytope, write_polytope};
use selfpolar_core::{convex_hull, symplectic_polar, RationalVector};

fn exec(args: &[&str]) -> String {
    let mut argv = vec!["selfpolar"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(&argv).expect("arguments parse");
    let mut buf = Vec::new();
    run_with(&cli, &mut buf).expect("command succeeds");
    String::from_utf8(buf).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn power_suspend_then_volume() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p2.json");
    let out = exec(&["power-suspend", "2", "--out", path_str(&file)]);
    assert!(out.contains("vertices 16"));
    let out = exec(&["volume", path_str(&file), "--f-vector"]);
    assert!(out.contains("7/2 (3.5)"), "{out}");
    assert!(out.contains("f-vector (16, 44, 44, 16)"));
}

#[test]
fn ehz_vertices_mode_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p2.json");
    exec(&["power-suspend", "2", "--out", path_str(&file)]);
    let out = exec(&[
        "ehz",
        path_str(&file),
        "--mode",
        "vertices",
        "--out-dir",
        path_str(dir.path()),
    ]);
    assert!(out.contains("c_EHZ 5/2 (2.5)"), "{out}");
    let cert = dir.path().join("p2.ehz.json");
    assert!(cert.exists());
    let out = exec(&[
        "certify",
        "--polytope",
        path_str(&file),
        "--cert",
        path_str(&cert),
    ]);
    assert!(out.contains("c_EHZ <= 5/2"), "{out}");
}

#[test]
fn table1_rows() {
    let out = exec(&["table1"]);
    let rows: Vec<&str> = out.lines().skip_while(|l| !l.starts_with("vertices")).skip(1).collect();
    assert_eq!(
        rows.iter().map(|r| r.split('\t').take(2).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>(),
        vec![
            "16 7/2 (3.5)",
            "20 11/3 (3.6666666666666665)",
            "24 23/6 (3.8333333333333335)",
            "24 4 (4)",
        ]
    );
}

#[test]
fn round_trip_is_canonical() {
    let dir = tempfile::tempdir().unwrap();
    for n in 1..=2 {
        let file = dir.path().join(format!("p{n}.json"));
        exec(&["power-suspend", &n.to_string(), "--out", path_str(&file)]);
        let p = read_polytope(&file).unwrap();
        let again = dir.path().join(format!("again{n}.json"));
        write_polytope(&again, &p).unwrap();
        assert_eq!(read_polytope(&again).unwrap(), p);
        assert_eq!(
            std::fs::read_to_string(&file).unwrap(),
            std::fs::read_to_string(&again).unwrap()
        );
    }
}

#[test]
fn selfpolar_check_agrees_with_sympolar() {
    let dir = tempfile::tempdir().unwrap();
    let square = convex_hull(&[
        RationalVector::from_ints(&[1, 1]),
        RationalVector::from_ints(&[1, -1]),
        RationalVector::from_ints(&[-1, 1]),
        RationalVector::from_ints(&[-1, -1]),
    ])
    .unwrap();
    let sq = dir.path().join("square.json");
    write_polytope(&sq, &square).unwrap();
    let p1 = dir.path().join("p1.json");
    exec(&["power-suspend", "1", "--out", path_str(&p1)]);
    let p2 = dir.path().join("p2.json");
    exec(&["power-suspend", "2", "--out", path_str(&p2)]);
    for file in [&sq, &p1, &p2] {
        let check = exec(&["selfpolar-check", path_str(file)]);
        let claimed = check.contains("self-polar true");
        let polar_file = dir.path().join("polar.json");
        exec(&["sympolar", path_str(file), "--out", path_str(&polar_file)]);
        let same = read_polytope(&polar_file).unwrap() == read_polytope(file).unwrap();
        assert_eq!(claimed, same, "{}", file.display());
        assert_eq!(
            same,
            symplectic_polar(&read_polytope(file).unwrap()).unwrap() == read_polytope(file).unwrap()
        );
    }
}

#[test]
fn suspend_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("p1.json");
    exec(&["power-suspend", "1", "--out", path_str(&p1)]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    exec(&["suspend", path_str(&p1), "--out", path_str(&a)]);
    exec(&["suspend", path_str(&p1), "--route", "halfspaces", "--out", path_str(&b)]);
    assert_eq!(read_polytope(&a).unwrap(), read_polytope(&b).unwrap());
}

#[test]
fn generate_single_run_has_no_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let svg = dir.path().join("g.svg");
    let out = exec(&[
        "generate", "--dim", "2", "--k", "2", "--runs", "1", "--seed", "5", "--csv",
        path_str(&csv), "--svg", path_str(&svg),
    ]);
    assert!(out.contains("histogram skipped"));
    assert!(!svg.exists());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("seed,k,iterations,volume_exact,volume_float,vertex_count,self_polar"));
}

#[test]
fn generate_is_thread_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("h.svg");
    exec(&[
        "generate", "--dim", "2", "--k", "3", "--runs", "4", "--threads", "1", "--csv",
        path_str(&a), "--svg", path_str(&svg),
    ]);
    exec(&["generate", "--dim", "2", "--k", "3", "--runs", "4", "--threads", "3", "--csv", path_str(&b)]);
    assert_eq!(std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn sequences_and_small_commands() {
    let out = exec(&["sequences", "--max-n", "50"]);
    assert!(out.contains("a_1 = (1/3)·π"));
    assert!(out.contains("a_2 = 8/7"));
    assert!(out.contains("a_2 = 28/25"));
    let dir = tempfile::tempdir().unwrap();
    let p2 = dir.path().join("p2.json");
    exec(&["power-suspend", "2", "--out", path_str(&p2)]);
    assert!(exec(&["cj", path_str(&p2)]).contains("c_J 1 (1)"));
    assert!(exec(&["shadow", path_str(&p2)]).contains("shadow 3 (3)"));
}

#[test]
fn enumerate_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = exec(&["enumerate-pm1", "--dim", "2", "--report-dir", path_str(dir.path())]);
    assert!(out.contains("class vertices 6 volume 3 (3)"));
    assert!(dir.path().join("classes.json").exists());
}

#[test]
fn exit_codes_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(["selfpolar", "frobnicate"]), EXIT_USAGE);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "vertices": [[0.5, 1]]}"#).unwrap();
    assert_eq!(run(["selfpolar", "volume", path_str(&bad)]), EXIT_MALFORMED);
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(run(["selfpolar", "volume", path_str(&bad)]), EXIT_MALFORMED);
    let p2 = dir.path().join("p2.json");
    assert_eq!(run(["selfpolar", "power-suspend", "2", "--out", path_str(&p2)]), EXIT_OK);
    assert_eq!(
        run(["selfpolar", "ehz", path_str(&p2), "--budget", "10", "--out-dir", path_str(dir.path())]),
        EXIT_BUDGET
    );
    assert_eq!(run(["selfpolar", "enumerate-pm1", "--dim", "6"]), 1);
}

#[test]
fn binary_uses_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_selfpolar"))
        .args(["power-suspend", "1"])
        .env("SELFPOLAR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(status.status.success());
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert!(stdout.starts_with("# config:"));
    assert!(dir.path().join("p_ltimes_1.json").exists());
    let status = Command::new(env!("CARGO_BIN_EXE_selfpolar")).arg("nope").status().unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
}
