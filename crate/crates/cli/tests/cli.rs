use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn anning(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anning"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const RIGHT_ANGLE: &str = r#"{"sites":[{"x":0,"y":0},{"x":1,"y":0},{"x":0,"y":1}]}"#;
const DEGENERATE: &str = r#"{
  "field": {"type": "norm-plane", "norm": {"type": "lp", "p": 2}},
  "sites": [{"x":-2,"y":0,"w":1},{"x":-1,"y":0},{"x":1,"y":0},{"x":2,"y":0,"w":2}]
}"#;
const TRIANGLE_345: &str = r#"{"s1":{"x":0,"y":0},"s2":{"x":3,"y":0},"s3":{"x":0,"y":4}}"#;

#[test]
fn triple_circumcenter() {
    let dir = TempDir::new().unwrap();
    let out = anning(&["triple", &write(&dir, "d.json", RIGHT_ANGLE)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    assert_eq!(v["points"][0]["x"], 0.5);
    assert_eq!(v["points"][0]["y"], 0.5);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let collinear = write(&dir, "c.json", r#"{"sites":[{"x":0,"y":0},{"x":1,"y":0},{"x":2,"y":0}]}"#);
    assert_eq!(code(&anning(&["triple", &collinear])), 2);
    let l1 = write(&dir, "l1.json", r#"{"type":"norm-plane","norm":{"type":"l1"}}"#);
    let d = write(&dir, "d.json", RIGHT_ANGLE);
    assert_eq!(code(&anning(&["triple", &d, "--field", &l1])), 2);
    let bad = write(&dir, "bad.json", "{not json");
    let out = anning(&["triple", &bad]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&anning(&["triple", "/nonexistent/file.json"])), 1);
    assert_eq!(code(&anning(&["verify", "--suite", "nonsense"])), 1);
    assert_eq!(code(&anning(&["frobnicate"])), 1);
    assert_eq!(code(&anning(&["--help"])), 0);
}

#[test]
fn degenerate_figure_svg() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", DEGENERATE);
    let svg_path = dir.path().join("fig.svg");
    let out = anning(&[
        "render",
        &input,
        "--bbox",
        "-3,-3,3,3",
        "--resolution",
        "61",
        "--svg",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg = fs::read_to_string(&svg_path).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().attribute("viewBox"), Some("-3 -3 6 6"));
    // The first site's cell is the ray y = 0, x ≤ −2: one pixel row.
    let rows: Vec<_> = doc
        .descendants()
        .filter(|n| n.has_tag_name("rect") && n.attribute("fill") == Some("#e41a1c"))
        .collect();
    assert_eq!(rows.len(), 1);
    let y: f64 = rows[0].attribute("y").unwrap().parse().unwrap();
    let h: f64 = rows[0].attribute("height").unwrap().parse().unwrap();
    assert!(y < 0.0 && y + h > 0.0);
    let ray = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("rays"))
        .and_then(|g| g.children().find(|c| c.has_tag_name("line")))
        .expect("ray drawn");
    assert_eq!(ray.attribute("x1"), Some("-2"));
    assert_eq!(ray.attribute("y1"), Some("0"));
}

#[test]
fn triple_with_svg_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "d.json", RIGHT_ANGLE);
    let run = |name: &str| {
        let svg = dir.path().join(name);
        let out = anning(&["triple", &input, "--svg", svg.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        (out.stdout, fs::read(svg).unwrap())
    };
    let (j1, s1) = run("a.svg");
    let (j2, s2) = run("b.svg");
    assert_eq!(j1, j2);
    assert_eq!(s1, s2);
    roxmltree::Document::parse(std::str::from_utf8(&s1).unwrap()).unwrap();
}

#[test]
fn enumerate_345() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.json", TRIANGLE_345);
    let out_path = dir.path().join("r.json");
    let out = anning(&["enumerate", &input, "--assert-bound", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&out_path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["bound"], 126);
    let n = v["candidates"].as_array().unwrap().len();
    assert!(n <= 126);
    let ints: Vec<(f64, f64)> = v["integer_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["x"].as_f64().unwrap(), c["y"].as_f64().unwrap()))
        .collect();
    for p in [(0.0, 0.0), (3.0, 0.0), (0.0, 4.0), (-3.0, 0.0), (0.0, -4.0)] {
        assert!(ints.contains(&p), "{p:?} missing from {ints:?}");
    }
    // Re-serializing the parsed report reproduces the file.
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn enumerate_on_torus() {
    let dir = TempDir::new().unwrap();
    let r: f64 = 0.9;
    let s = 3f64.sqrt();
    let field = format!(
        r#"{{"type":"torus","u":[{},0],"v":[{},{}]}}"#,
        s * r,
        s * r / 2.0,
        1.5 * r
    );
    let field = write(&dir, "f.json", &field);
    let tri = format!(
        r#"{{"s1":{{"x":0,"y":0}},"s2":{{"x":{},"y":0}},"s3":{{"x":{},"y":{}}}}}"#,
        s * r / 3.0 * 1.5,
        s * r / 4.0,
        r * 0.75
    );
    let input = write(&dir, "t.json", &tri);
    let out = anning(&["enumerate", &input, "--field", &field, "--assert-bound"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let pairs = v["weight_pairs_swept"].as_u64().unwrap();
    assert_eq!(v["bound"].as_u64().unwrap(), 6 * pairs);
}

#[test]
fn construct_commands() {
    let out = anning(&["construct", "pythagorean", "--a", "3", "--b", "4", "--c", "5", "--n", "4", "--scaled"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let pts: Vec<(f64, f64)> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect();
    assert_eq!(pts.len(), 4);
    for (i, a) in pts.iter().enumerate() {
        for (j, b) in pts.iter().enumerate() {
            let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            let listed: f64 = v["integer_distances"][i][j].as_str().unwrap().parse().unwrap();
            assert_eq!(listed.fract(), 0.0);
            assert!((d - listed).abs() < 1e-9, "{d} vs {listed}");
        }
    }

    let exact = json(&anning(&["construct", "pythagorean", "--a", "3", "--b", "4", "--c", "5", "--n", "2", "--exact"]));
    assert_eq!(exact["points"][1], serde_json::json!(["-7/25", "24/25"]));

    let grid = json(&anning(&["construct", "grid", "--n", "3"]));
    assert_eq!(grid["points"].as_array().unwrap().len(), 9);

    let dir = TempDir::new().unwrap();
    let square = write(&dir, "sq.json", r#"{"points":[[0,0],[1,0],[1,1],[0,1]]}"#);
    let out = anning(&["construct", "norm-for-set", &square]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("same slope"));

    let tri = write(&dir, "tri.json", r#"{"points":[[0,0],[1,0],[0,2]]}"#);
    let out = anning(&["construct", "norm-for-set", &tri]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["norm"]["type"], "arcs");
    assert_eq!(v["boundary_vectors"].as_array().unwrap().len(), 6);

    let cone = json(&anning(&["construct", "cone-equilateral", "--k", "10"]));
    let d = cone["distances"].as_array().unwrap();
    for (i, row) in d.iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(x.as_f64().unwrap(), if i == j { 0.0 } else { 1.0 });
        }
    }
}

#[test]
fn emitted_field_documents_round_trip() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.json", r#"{"points":[[0,0],[1,0],[0,2]]}"#);
    let out = json(&anning(&["construct", "norm-for-set", &tri]));
    // The emitted norm is usable as a field for another command.
    let field = serde_json::json!({"type": "norm-plane", "norm": out["norm"]});
    let field_path = write(&dir, "f.json", &field.to_string());
    let d = write(&dir, "d.json", RIGHT_ANGLE);
    let r = anning(&["triple", &d, "--field", &field_path]);
    assert_eq!(code(&r), 0, "{}", String::from_utf8_lossy(&r.stderr));
    assert!(json(&r)["points"].as_array().unwrap().len() <= 2);
}

#[test]
fn verify_suites() {
    let out = anning(&["verify", "--suite", "cone"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS cone/")), "{text}");
    assert!(text.contains("checked=45"), "{text}");

    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = anning(&["verify", "--suite", "star", "--seed", "1", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_anning"))
        .args(["triple", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(RIGHT_ANGLE.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    assert!(Path::new(env!("CARGO_BIN_EXE_anning")).exists());
}
