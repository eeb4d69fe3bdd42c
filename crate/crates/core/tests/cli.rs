use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mispr::cli::{EXIT_INVALID, EXIT_OK, EXIT_UNIDENTIFIED, EXIT_USAGE};
use tempfile::TempDir;

fn mispr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mispr")).args(args).env_remove("MISPR_THREADS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

const POSITIVITY: &str = "class: mdag\nvar X1\nvar X2\nvar X3\nindicator R1 for X1\nindicator R2 for X2\nindicator R3 for X3\n\
R1 -> R2\nX2 -> R1\nX3 -> R1\nX3 -> R2\nX1 -> R3\nX2 -> R3\nX1 -> X2\nX2 -> X3\nX1 -> X3\n";

const TWO: &str = "class: mdag\nvar X1\nvar X2\nindicator R1 for X1\nindicator R2 for X2\nX1 -> X2\nX1 -> R2\nX2 -> R1\n";

#[test]
fn identify_writes_golden_dag_and_log() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", POSITIVITY);
    let out = dir.path().join("dag.txt");
    let log = dir.path().join("log.txt");
    let o = mispr(&[
        "identify",
        "-g",
        s(&g),
        "--patterns",
        "111,011,110 010 001,000",
        "--method",
        "pm-id+",
        "-o",
        s(&out),
        "--log",
        s(&log),
    ]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), golden("positivity_pm_id_plus.dag"));
    let log = std::fs::read_to_string(&log).unwrap();
    assert!(log.starts_with("method: pm-id+\npatterns: 6\nedges: 11\n"), "{log}");
    assert!(log.contains("r=111: complete case, observed directly"));
    assert!(log.contains("r=001: p(X1(1) | X2, X3, r=001) = p(X1 | X2, X3, r in {111, 011})"), "{log}");
}

#[test]
fn identify_to_stdout_from_data() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", TWO);
    let d = write(&dir, "d.csv", "X1,X2,R1,R2\n1,0,1,1\nNA,1,0,1\n0,NA,1,0\nNA,NA,0,0\n");
    let o = mispr(&["identify", "-g", s(&g), "--data", s(&d)]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "nodes: 11 10 01 00\n11 -2-> 10\n11 -1-> 01\n10 -1-> 00\n01 -2-> 00\n"
    );
    assert!(stderr(&o).contains("pm-id"));
}

#[test]
fn identify_self_censoring_exits_three() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", "class: mdag\nvar X1\nindicator R1 for X1\nX1 -> R1\n");
    let o = mispr(&["identify", "-g", s(&g), "--patterns", "1,0", "--method", "pm-id"]);
    assert_eq!(code(&o), EXIT_UNIDENTIFIED);
    let o = mispr(&["identify", "-g", s(&g), "--patterns", "1,0", "--method", "pm-id+"]);
    assert_eq!(code(&o), EXIT_UNIDENTIFIED);
    assert!(stderr(&o).contains('0'));
}

#[test]
fn usage_and_io_errors_exit_one() {
    assert_eq!(code(&mispr(&[])), EXIT_USAGE);
    assert_eq!(code(&mispr(&["identify", "-g", "/nonexistent/graph", "--patterns", "1"])), EXIT_USAGE);
    assert_eq!(code(&mispr(&["identify", "--patterns", "1"])), EXIT_USAGE);
    assert_eq!(code(&mispr(&["--version"])), EXIT_OK);
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "class: mdag\nvar X1\nX1 -> Y\n");
    assert_eq!(code(&mispr(&["identify", "-g", s(&bad), "--patterns", "1"])), EXIT_INVALID);
    let g = write(&dir, "g.txt", TWO);
    assert_eq!(code(&mispr(&["identify", "-g", s(&g), "--patterns", "101"])), EXIT_INVALID);

    // indicator says observed but the cell is missing
    let d = write(&dir, "d.csv", "X1,X2,R1,R2\n1,0,1,1\nNA,1,1,1\n");
    let o = mispr(&["impute", "-g", s(&g), "-d", s(&d)]);
    assert_eq!(code(&o), EXIT_INVALID);
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
}

#[test]
fn impute_complete_data_gives_identical_copies() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", TWO);
    let text = "X1,X2,R1,R2\n1,0,1,1\n0,1,1,1\n1,1,1,1\n";
    let d = write(&dir, "d.csv", text);
    let o = mispr(&["impute", "-g", s(&g), "-d", s(&d), "--m", "3", "--burn-in", "5"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    for j in 1..=3 {
        let p = dir.path().join(format!("d.csv.imp{j}"));
        assert_eq!(std::fs::read_to_string(p).unwrap(), text);
    }
    assert!(!dir.path().join("d.csv.imp4").exists());
}

#[test]
fn impute_keeps_observed_cells() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("b.csv");
    let o = mispr(&["simulate", "--fixture", "b+", "-n", "400", "--seed", "3", "-o", s(&data)]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let g = write(&dir, "g.txt", TWO);
    let prefix = dir.path().join("out");
    let o = mispr(&["impute", "-g", s(&g), "-d", s(&data), "-o", s(&prefix), "--m", "2", "--burn-in", "20", "--seed", "9"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    assert!(stderr(&o).contains("pm-id+"));

    let original = std::fs::read_to_string(&data).unwrap();
    for j in 1..=2 {
        let imputed = std::fs::read_to_string(dir.path().join(format!("out.imp{j}"))).unwrap();
        let (a, b): (Vec<&str>, Vec<&str>) = (original.lines().collect(), imputed.lines().collect());
        assert_eq!(a.len(), b.len());
        assert_eq!(a[0], b[0]);
        for (ra, rb) in a.iter().zip(&b).skip(1) {
            for (ca, cb) in ra.split(',').zip(rb.split(',')) {
                if ca == "NA" {
                    assert!(cb == "0" || cb == "1", "{rb}");
                } else {
                    assert_eq!(ca, cb);
                }
            }
        }
    }
    // same seed, same tables
    let again = dir.path().join("again");
    mispr(&["impute", "-g", s(&g), "-d", s(&data), "-o", s(&again), "--m", "2", "--burn-in", "20", "--seed", "9"]);
    assert_eq!(
        std::fs::read(dir.path().join("out.imp2")).unwrap(),
        std::fs::read(dir.path().join("again.imp2")).unwrap()
    );
}

#[test]
fn simulate_respects_structural_zeros() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let o = mispr(&["simulate", "--fixture", "b+", "-n", "1000", "-o", s(&out)]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1001);
    for line in text.lines().skip(1) {
        // R2 is always 1
        assert!(line.ends_with(",1,1") || line.ends_with(",0,1"), "{line}");
    }

    let empty = dir.path().join("e.csv");
    assert_eq!(code(&mispr(&["simulate", "--fixture", "a", "-n", "0", "-o", s(&empty)])), EXIT_OK);
    assert_eq!(std::fs::read_to_string(&empty).unwrap().lines().count(), 1);
}

#[test]
fn simulate_exact_joint_sums_to_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let exact = dir.path().join("p.csv");
    let o = mispr(&["simulate", "--fixture", "b", "-n", "1", "-o", s(&out), "--exact", s(&exact), "--delimiter", "tab"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let text = std::fs::read_to_string(&exact).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "X1\tX2\tR1\tR2\tp");
    let total: f64 = lines.map(|l| l.rsplit('\t').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("X1\tX2\tR1\tR2\n"));
}

#[test]
fn benchmark_manifest_reports_each_row() {
    let dir = TempDir::new().unwrap();
    let manifest = write(
        &dir,
        "m.csv",
        "# small smoke run\ndgp,method,n,m,burn_in,seed\na,,2000,2,20,1\nb,pm-id,2000,2,20,1\nb+,pm-id,2000,2,20,1\n",
    );
    let report = dir.path().join("r.csv");
    let o = mispr(&["benchmark", s(&manifest), "-o", s(&report), "--summary"]);
    assert_eq!(code(&o), EXIT_OK, "{}", stderr(&o));
    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert_eq!(lines[0], "dgp,method,method_used,n,m,burn_in,seed,patterns,l2,linf,seconds,status");
    assert!(lines[1].starts_with("a,auto,pm-id,2000,2,20,1,") && lines[1].ends_with(",ok"), "{}", lines[1]);
    assert!(lines[2].starts_with("b,pm-id,pm-id,") && lines[2].ends_with(",ok"));
    assert!(lines[3].starts_with("b+,pm-id,") && lines[3].contains(",NA,NA,"), "{}", lines[3]);
    assert!(lines[3].contains("failed:"));
    assert!(stderr(&o).contains("pm-id"));
}

#[test]
fn benchmark_rejects_bad_manifest() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.csv", "dgp,colour\na,red\n");
    assert_eq!(code(&mispr(&["benchmark", s(&m)])), EXIT_INVALID);
    assert_eq!(code(&mispr(&["benchmark", "/nonexistent.csv"])), EXIT_USAGE);
}
