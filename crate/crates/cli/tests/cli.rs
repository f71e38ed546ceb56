use std::path::Path;
use std::process::{Command, Output};

fn hplscape(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hplscape"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SCHEMA_3X3: &str = r#"{"hps": [
    {"name": "a", "kind": "numerical", "values": [1, 2, 3]},
    {"name": "b", "kind": "numerical", "values": [1, 2, 3]}
]}"#;

fn write_3x3(dir: &Path, column: &str, losses: [f64; 9]) {
    std::fs::write(dir.join("schema.json"), SCHEMA_3X3).unwrap();
    let mut csv = format!("a,b,{column}\n");
    for (i, l) in losses.iter().enumerate() {
        csv.push_str(&format!("{},{},{l}\n", i / 3 + 1, i % 3 + 1));
    }
    std::fs::write(dir.join("evals.csv"), csv).unwrap();
}

#[test]
fn build_reports_nodes_and_adjacencies() {
    let dir = tempfile::tempdir().unwrap();
    write_3x3(dir.path(), "val_loss", [5.0, 4.0, 3.0, 4.0, 3.0, 2.0, 3.0, 2.0, 1.0]);
    let o = hplscape(
        dir.path(),
        &["build", "--schema", "schema.json", "--evals", "evals.csv", "--loss-col", "val_loss", "--out", "g.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("9 nodes, 12 adjacencies\n"), "{}", stdout(&o));

    let graph: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(graph["nodes"].as_array().unwrap().len(), 9);
    assert_eq!(graph["edges"].as_array().unwrap().len(), 12);

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("g.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "build");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["outputs"][0]["path"], "g.json");
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["parameters"]["scenario"]["loss_column"], "val_loss");
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    write_3x3(dir.path(), "loss", [0.0; 9]);
    let off_grid = "a,b,loss\n1,7,0.5\n";
    std::fs::write(dir.path().join("bad.csv"), off_grid).unwrap();
    let o = hplscape(dir.path(), &["build", "--schema", "schema.json", "--evals", "bad.csv", "--out", "g.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 1, column `b`"), "{}", stderr(&o));
    assert!(!dir.path().join("g.json").exists());

    let o = hplscape(dir.path(), &["build", "--schema", "schema.json", "--evals", "evals.csv", "--loss-col", "acc", "--out", "g.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = hplscape(dir.path(), &["metrics", "--graph", "missing.json", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = hplscape(dir.path(), &["metrics", "--graph", "schema.json", "--out", "m.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn undefined_metrics_are_null_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_3x3(dir.path(), "loss", [1.0; 9]);
    let build = ["build", "--schema", "schema.json", "--evals", "evals.csv", "--out", "g.json"];
    assert!(hplscape(dir.path(), &build).status.success());
    let o = hplscape(dir.path(), &["metrics", "--graph", "g.json", "--out", "m.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("autocorrelation  null"), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert!(report["autocorrelation"].is_null());
    assert!(report["assortativity"].is_null());
    assert_eq!(report["mean_neutrality"], 1.0);
}

#[test]
fn lon_writes_network_basins_and_escape_stats() {
    let dir = tempfile::tempdir().unwrap();
    write_3x3(dir.path(), "loss", [0.0, 3.0, 2.0, 3.0, 4.0, 3.0, 2.0, 3.0, 1.0]);
    let build = ["build", "--schema", "schema.json", "--evals", "evals.csv", "--out", "g.json"];
    assert!(hplscape(dir.path(), &build).status.success());
    let o = hplscape(dir.path(), &["lon", "--graph", "g.json", "--out", "lon.json", "--basins", "b.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let basins = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(basins.lines().next(), Some("config_id,optimum_id,steps"));
    assert_eq!(basins.lines().count(), 10);
    let lon: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lon.json")).unwrap()).unwrap();
    let ids: Vec<u64> = lon["vertices"].as_array().unwrap().iter().map(|v| v["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, [0, 2, 6, 8]);
    assert!(dir.path().join("lon.escape.json").exists());
    let manifest = std::fs::read_to_string(dir.path().join("lon.json.manifest.json")).unwrap();
    assert!(manifest.contains("b.csv") && manifest.contains("lon.escape.json"));
}

#[test]
fn compare_warns_on_partial_overlap() {
    let dir = tempfile::tempdir().unwrap();
    write_3x3(dir.path(), "loss", [5.0, 4.0, 3.0, 4.0, 3.0, 2.0, 3.0, 2.0, 1.0]);
    let build = ["build", "--schema", "schema.json", "--evals", "evals.csv", "--out", "a.json"];
    assert!(hplscape(dir.path(), &build).status.success());
    std::fs::write(dir.path().join("part.csv"), "a,b,loss\n1,1,1\n1,2,2\n2,1,3\n3,3,4\n").unwrap();
    let build = ["build", "--schema", "schema.json", "--evals", "part.csv", "--out", "b.json"];
    assert!(hplscape(dir.path(), &build).status.success());

    let o = hplscape(dir.path(), &["compare", "a.json", "b.json", "--out", "c.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("c.json")).unwrap()).unwrap();
    assert_eq!(r["n_compared"], 4);

    let o = hplscape(dir.path(), &["compare-batch", "a.json", "b.json", "--out", "long.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("long.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("landscape_a,landscape_b,metric,value"));
    assert!(csv.contains("a,b,spearman,"));
}

#[test]
fn synth_output_round_trips_through_build() {
    let dir = tempfile::tempdir().unwrap();
    let o = hplscape(dir.path(), &["synth", "nk", "--n", "8", "--k", "2", "--seed", "1", "--out", "nk"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("nk/manifest.json").exists());
    let o = hplscape(dir.path(), &["build", "--schema", "nk/schema.json", "--evals", "nk/evals.csv", "--out", "g.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("256 nodes, 1024 adjacencies"), "{}", stdout(&o));

    let o = hplscape(dir.path(), &["synth", "sphere", "--dims", "3", "--points", "7", "--min", "-2", "--max", "2", "--out", "sp"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = hplscape(dir.path(), &["build", "--schema", "sp/schema.json", "--evals", "sp/evals.csv", "--out", "sp.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("343 nodes"), "{}", stdout(&o));

    let o = hplscape(dir.path(), &["synth", "nk", "--n", "4", "--k", "4", "--out", "bad"]);
    assert_eq!(o.status.code(), Some(2));
}
