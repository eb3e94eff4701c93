use std::fs;
use std::process::{Command, Output};

const E3: &str = "ellipsoid:1:141421/100000:3";

fn ech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ech")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn homology_of_ellipsoid() {
    let o = ech(&["homology", E3, "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let expected = "grading,dim,u_rank,exact\n0,1,0,true\n2,1,1,true\n4,1,1,true\n6,1,1,true\n8,1,1,true\n10,1,1,true\n";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn exported_model_round_trips_through_homology() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    let lattice = dir.path().join("e.csv");
    let o = ech(&["model", E3, "-o", path.to_str().unwrap(), "--lattice", lattice.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&lattice).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("m,n,action,grading\n0,0,0/1,0\n"));
    let a = stdout(&ech(&["homology", path.to_str().unwrap()]));
    let b = stdout(&ech(&["homology", E3]));
    assert_eq!(a, b);
}

#[test]
fn zero_differential_dims_are_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    fs::write(
        &path,
        r#"{"generators":[{"id":"a","grading":0,"action":"1"},{"id":"b","grading":0,"action":"2"},{"id":"c","grading":3,"action":"5/2"}],"differential":[]}"#,
    )
    .unwrap();
    let o = ech(&["homology", path.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "grading,dim,u_rank,exact\n0,2,,true\n3,1,,true\n");
}

#[test]
fn corrupted_pair_exits_2_naming_ids() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // x → y has the wrong grading drop
    fs::write(
        &path,
        r#"{"generators":[{"id":"x","grading":2,"action":"2"},{"id":"y","grading":0,"action":"1"}],"differential":[["x","y"]]}"#,
    )
    .unwrap();
    let o = ech(&["homology", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains('x') && err.contains('y'), "{err}");

    fs::write(
        &path,
        r#"{"generators":[{"id":"x","grading":1,"action":"2"}],"differential":[["x","ghost"]]}"#,
    )
    .unwrap();
    let o = ech(&["homology", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ghost"));
}

#[test]
fn parse_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{ not json").unwrap();
    assert_eq!(ech(&["homology", path.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(ech(&["homology", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(ech(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ech(&["conjecture", "unit", "unit", "--eps-list", "1e-x"]).status.code(), Some(1));
    assert_eq!(ech(&["homology", "ellipsoid:1:2"]).status.code(), Some(1));
    assert_eq!(ech(&["--help"]).status.code(), Some(0));
}

#[test]
fn consum_s3_with_s1xs2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cone.json");
    let o = ech(&["consum", "ellipsoid:1:141421/100000:8", "s1xs2:5", "-o", out.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"));
    for g in 0..=8 {
        assert!(text.contains(&format!("\n{g},1,1,PASS\n")), "grading {g}: {text}");
    }
    assert!(text.contains("EXCLUDED"));
    assert!(out.exists());
    let sidecar = fs::read_to_string(dir.path().join("cone.blocks.json")).unwrap();
    for key in ["d_oo", "d_oh", "d_ho", "d_hh"] {
        assert!(sidecar.contains(key));
    }
    // the written cone is a valid complex
    assert!(ech(&["homology", out.to_str().unwrap()]).status.success());
}

#[test]
fn consum_s3_with_s3() {
    let o = ech(&["consum", "ellipsoid:1:141421/100000:8", "ellipsoid:1:141421/100000:8", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in text.lines().skip(1).filter(|l| l.ends_with("PASS")) {
        let cols: Vec<&str> = line.split(',').collect();
        let g: i64 = cols[0].parse().unwrap();
        assert_eq!(cols[1], if g % 2 == 0 { "1" } else { "0" }, "{line}");
    }
}

#[test]
fn consum_without_umap_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nou.json");
    fs::write(&path, r#"{"generators":[{"id":"x","grading":0,"action":"1"}],"differential":[]}"#).unwrap();
    let o = ech(&["consum", path.to_str().unwrap(), "unit"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("U-map"));
}

#[test]
fn consum_with_random_k_and_k_file() {
    let o = ech(&["consum", "random:3:8:0.4", "random:4:6:0.4", "--random-k", "0.5", "--seed", "9", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!stdout(&o).contains("FAIL"));
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    fs::write(&k, "[]").unwrap();
    let o = ech(&["consum", "unit", "unit", "--eps", "1/10", "--k-file", k.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn conjecture_on_ellipsoids() {
    let e = "ellipsoid:1:141421/100000:12";
    let o = ech(&["conjecture", e, e, "--kmax", "10", "--eps-list", "1e-3,1e-6", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,k,c_k_cone,maxconv,diff,converged");
    assert_eq!(lines.len(), 1 + 2 * 11);
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        assert_eq!(cols[4], "0/1", "{l}");
        assert_eq!(cols[5], "true");
    }
}

#[test]
fn conjecture_beyond_depth_marks_cells() {
    let e = "ellipsoid:1:141421/100000:3";
    let o = ech(&["conjecture", e, e, "--kmax", "12", "--eps-list", "1/1000", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("insufficient-depth"));
}

#[test]
fn index_presets() {
    for p in ["PS", "PN"] {
        let o = ech(&["index", "--preset", p]);
        assert!(o.status.success());
        assert!(stdout(&o).starts_with("ind=1 I=1"), "{}", stdout(&o));
    }
    assert_eq!(stdout(&ech(&["index", "--preset", "h"])), "CZ_tau0(h)=0\n");
    assert_eq!(stdout(&ech(&["index", "--cz", "hyperbolic:0"])), "CZ(hyperbolic:0)=0\n");
    assert_eq!(stdout(&ech(&["index", "--cz", "elliptic:3/10:4", "--format", "csv"])), "orbit,cz\nelliptic:3/10:4,3\n");
    assert_eq!(ech(&["index", "--cz", "elliptic:1/2:2"]).status.code(), Some(2));
    assert_eq!(ech(&["index", "--preset", "nope"]).status.code(), Some(1));
}

#[test]
fn flow_identity_at_zero() {
    let o = ech(&["flow", "--t", "0", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().starts_with("0,0.000e0,"));
    assert!(text.trim_end().ends_with("PASS"));
    let o = ech(&["flow"]);
    assert!(stdout(&o).contains("overall PASS"));
}

#[test]
fn spectrum_reports_winding_zero() {
    let o = ech(&["spectrum", "--S", "2,0,0,-1", "--modes", "64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("winding 0 eigenvalues: -1.000000000000, 2.000000000000"));
    assert!(text.contains("monotone: PASS"));
    assert!(text.contains("extremal for CZ=0: PASS"));
    let csv = stdout(&ech(&["spectrum", "--S", "2,0,0,-1", "--modes", "64", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 1 + 2 + 4 * 64);
    assert_eq!(ech(&["spectrum", "--S", "1,2,3"]).status.code(), Some(1));
    assert_eq!(ech(&["spectrum", "--S", "0,1,0,0"]).status.code(), Some(2));
}

#[test]
fn tower_export_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = ech(&["tower", "ellipsoid:1:141421/100000:5", "--out", dir.path().to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("tower.json").exists());
    let text = stdout(&o);
    assert!(text.starts_with("grading,level,threshold\n0,0,1/2\n"));
    let o = ech(&["tower", "ellipsoid:1:141421/100000:5", "--L", "1/2,3/2,3"]);
    assert_eq!(o.status.code(), Some(2), "threshold 3 is an action");
}

#[test]
fn formats_carry_the_same_numbers() {
    for args in [
        vec!["spectral", "ellipsoid:1:141421/100000:6", "--kmax", "8"],
        vec!["homology", "random:5:20:0.4"],
        vec!["tower", "s1xs2:3"],
    ] {
        let table = stdout(&ech(&args));
        let mut csv_args = args.clone();
        csv_args.extend(["--format", "csv"]);
        let csv = stdout(&ech(&csv_args));
        let cells = |s: &str| -> Vec<String> {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty() && t.chars().any(|c| c.is_ascii_digit()))
                .map(|t| t.trim_start_matches("g:").to_string())
                .collect()
        };
        let (a, b) = (cells(&table), cells(&csv));
        for x in &b {
            assert!(a.contains(x), "{x} missing from table output of {args:?}");
        }
    }
}

#[test]
fn outputs_are_deterministic() {
    let args = ["consum", "random:11:9:0.4", "random:12:7:0.4", "--random-k", "0.3", "--format", "csv"];
    let a = ech(&args);
    let b = ech(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["conjecture", "random:1:6:0.3", "ellipsoid:1:141421/100000:5", "--eps-list", "1/100,1/1000", "--kmax", "4"];
    assert_eq!(ech(&args).stdout, ech(&args).stdout);
}
