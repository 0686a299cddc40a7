use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use heatbound_cli::report::csv_body;

fn heatbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

const TWO_VERTEX: &str = "m 0 1\nm 1 1\ne 0 1 1\n";

#[test]
fn empty_suite_selection() {
    let dir = tempfile::tempdir().unwrap();
    let out = heatbound(&[
        "--out-dir",
        dir.path().to_str().unwrap(),
        "verify",
        "--set",
        "suites=",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(s["passed"], true);
    assert_eq!(s["suites"].as_array().unwrap().len(), 0);
}

#[test]
fn two_vertex_sanity_config() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("pair.graph");
    fs::write(&graph, TWO_VERTEX).unwrap();
    let config = dir.path().join("pair.conf");
    fs::write(
        &config,
        format!(
            "suites = closed_form, custom\ngraph = {}\nt_grid = 0.1:10:10\nseed = 3\nout_dir = {}\n",
            graph.display(),
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    let out = heatbound(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&dir.path().join("out"));
    assert_eq!(s["seed"], 3);
    assert_eq!(s["passed"], true);

    let body = csv_body(&dir.path().join("out/custom_kernel.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(body.as_bytes());
    let mut seen = 0;
    for row in rows.records() {
        let row = row.unwrap();
        let t: f64 = row[0].parse().unwrap();
        let p: f64 = row[3].parse().unwrap();
        let e = (-2.0 * t).exp();
        let want = if row[1] == row[2] {
            (1.0 + e) / 2.0
        } else {
            (1.0 - e) / 2.0
        };
        assert!((p - want).abs() <= 1e-12, "t={t} p={p} want={want}");
        assert_eq!(&row[5], "exact");
        seen += 1;
    }
    assert_eq!(seen, 6);
    let canonical = fs::read_to_string(dir.path().join("out/config.txt")).unwrap();
    assert!(
        canonical.contains("suites = closed_form,custom"),
        "{canonical}"
    );
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "suites = nonsense\n",
        "colour = blue\n",
        "seed = 1\nseed = 2\n",
        "just words\n",
    ] {
        let config = dir.path().join("bad.conf");
        fs::write(&config, text).unwrap();
        let out = heatbound(&["verify", "--config", config.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{text:?}");
    }
    assert_eq!(code(&heatbound(&["verify", "--set", "gamma"])), 2);
    assert_eq!(code(&heatbound(&["no-such-command"])), 2);
}

#[test]
fn unreadable_graph_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("broken.graph");
    fs::write(&graph, "m 0 1\ne 0 7 1\n").unwrap();
    for path in [graph.clone(), dir.path().join("missing.graph")] {
        let out = heatbound(&[
            "--out-dir",
            dir.path().to_str().unwrap(),
            "verify",
            "--set",
            "suites=custom",
            "--set",
            &format!("graph={}", path.display()),
        ]);
        assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn generated_graph_feeds_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("tree.graph");
    let out = heatbound(&[
        "antitree",
        "--gamma",
        "1",
        "--levels",
        "5",
        "--shape",
        "antitree",
        "--out",
        graph.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&graph)
        .unwrap()
        .lines()
        .any(|l| l.starts_with('f')));

    let metric = dir.path().join("metric.csv");
    let out = heatbound(&[
        "metric",
        "--graph",
        graph.to_str().unwrap(),
        "--out",
        metric.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("intrinsic=true"));
    let body = csv_body(&metric).unwrap();
    assert!(
        body.starts_with("vertex,distance,frontier\n0,0,false\n"),
        "{body}"
    );

    let geometry = dir.path().join("geometry.csv");
    let out = heatbound(&[
        "geometry",
        "--graph",
        graph.to_str().unwrap(),
        "--p",
        "2",
        "--out",
        geometry.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(csv_body(&geometry)
        .unwrap()
        .starts_with("radius,volume,degree_mean\n0,1,"));

    let out = heatbound(&[
        "iso",
        "--graph",
        graph.to_str().unwrap(),
        "--radius",
        "1.5",
        "--n",
        "8",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("brute,"));
}

#[test]
fn bounds_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("ratios.csv");
    let out = heatbound(&[
        "bounds",
        "--formula",
        "antitree1c",
        "--gamma",
        "0.5",
        "--levels",
        "40",
        "--n",
        "4",
        "--t-grid",
        "1:100:10",
        "--pairs",
        "3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let body = csv_body(&csv_path).unwrap();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        &header[..7],
        ["t", "x", "y", "p", "bound_shape", "ratio", "flags"]
    );
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 * 3 * 3);
    for row in &rows {
        let ratio: f64 = row[5].parse().unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
        assert_eq!(&row[8], "truncated");
    }
    assert_eq!(code(&heatbound(&["bounds", "--formula", "sideways"])), 2);
}

#[test]
fn seed_fixes_randomized_tables() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, seed: &str| {
        let out_dir = dir.path().join(sub);
        let out = heatbound(&[
            "--seed",
            seed,
            "--out-dir",
            out_dir.to_str().unwrap(),
            "verify",
            "--set",
            "suites=identities,sobolev",
        ]);
        assert_eq!(code(&out), 0);
        csv_body(&out_dir.join("identities.csv")).unwrap()
    };
    let a = run("a", "5");
    assert_eq!(a, run("b", "5"));
    assert_ne!(a, run("c", "6"));
}
