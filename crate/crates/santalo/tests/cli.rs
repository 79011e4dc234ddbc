use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

use santalo::format::{format_matrix, format_rational_csv};
use santalo::json::PolynomialJson;
use santalo_core::exact::{rat, ExactMatrix};
use santalo_core::instances::random_polygon;
use santalo_core::poly::SparsePoly;

const PENTAGON_A: &str = "1 1 1 1 1\n2 1 0 1 0\n1 2 0 0 1\n";
const PENTAGON_B: &str = "5/18 -4/18\n-4/18 5/18\n2/18 2/18\n-6/18 3/18\n3/18 -6/18\n";
const PENTAGON_RHS: &str = "1,4/5,4/5";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: TempDir::new().unwrap() }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn santalo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_santalo")).args(args).env_remove("SANTALO_SEED").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn adjoint_of_pentagon() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", PENTAGON_A);
    let doc = json_of(&santalo(&["adjoint", "--A", p(&a), "--b", PENTAGON_RHS]));
    assert_eq!(doc["schema_version"], 1);
    let poly: PolynomialJson = serde_json::from_value(doc["polynomial"].clone()).unwrap();
    let mut expected = SparsePoly::zero(5);
    for (c, e) in
        [(3, [1, 1, 1, 0, 0]), (2, [1, 0, 1, 0, 1]), (2, [1, 0, 0, 1, 1]), (2, [0, 1, 1, 1, 0]), (2, [0, 1, 0, 1, 1])]
    {
        expected.add_term(e.to_vec(), rat(c, 1));
    }
    assert_eq!(poly.to_poly().unwrap(), expected);
    assert!(poly.terms.windows(2).all(|w| w[0].exp > w[1].exp));
}

#[test]
fn adjoint_of_simplex_is_symmetric() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", "1 1 1\n");
    let doc = json_of(&santalo(&["adjoint", "--A", p(&a), "--b", "1"]));
    let poly: PolynomialJson = serde_json::from_value(doc["polynomial"].clone()).unwrap();
    let mut expected = SparsePoly::zero(3);
    for i in 0..3 {
        let mut e = vec![0; 3];
        e[i] = 1;
        expected.add_term(e, rat(1, 1));
    }
    assert_eq!(poly.to_poly().unwrap(), expected);
}

#[test]
fn invalid_inputs_exit_two() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", PENTAGON_A);
    let out = santalo(&["adjoint", "--A", p(&a), "--b", "1,-1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("violates"));
    let out = santalo(&["adjoint", "--A", p(&a), "--b", "1,0.8,0.8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = santalo(&["adjoint", "--A", p(&ws.path("missing.txt")), "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_sixty_four() {
    assert_eq!(santalo(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(santalo(&["adjoint", "--b", "1"]).status.code(), Some(64));
    assert_eq!(santalo(&[]).status.code(), Some(64));
}

#[test]
fn non_simple_polytope_exits_four() {
    let ws = Workspace::new();
    let mut rows = String::new();
    for s in 0..8 {
        let sign = |k: i32| if s & (1 << k) == 0 { "1" } else { "-1" };
        rows.push_str(&format!("{} {} {}\n", sign(0), sign(1), sign(2)));
    }
    let w = ws.file("W.txt", &rows);
    let out = santalo(&["adjoint", "--W", p(&w), "--c", "1,1,1,1,1,1,1,1"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn santalo_point_of_pentagon() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", PENTAGON_A);
    let b = ws.file("B.txt", PENTAGON_B);
    let doc = json_of(&santalo(&["santalo", "--A", p(&a), "--b", PENTAGON_RHS, "--B", p(&b)]));
    assert_eq!(doc["method"], "newton");
    for y in floats(&doc["y_star"]) {
        assert!((y + 0.00311069).abs() < 1e-6);
    }
    let homotopy = json_of(&santalo(&["santalo", "--A", p(&a), "--b", PENTAGON_RHS, "--B", p(&b), "--homotopy"]));
    assert_eq!(homotopy["method"], "homotopy");
    for (u, v) in floats(&doc["x_star"]).iter().zip(floats(&homotopy["x_star"])) {
        assert!((u - v).abs() < 1e-8);
    }
}

#[test]
fn santalo_point_from_facets() {
    let ws = Workspace::new();
    let w = ws.file("W.txt", "1 0\n-1 0\n0 1\n0 -1\n");
    let doc = json_of(&santalo(&["santalo", "--W", p(&w), "--c", "1,1,1,1"]));
    assert!(floats(&doc["y_star"]).iter().all(|y| y.abs() < 1e-12));
    let perm = santalo_core::instances::permutahedron_hrep();
    let w = ws.file("P.txt", &format_matrix(perm.w()));
    let doc = json_of(&santalo(&["santalo", "--W", p(&w), "--c", &format_rational_csv(perm.c())]));
    assert!(floats(&doc["y_star"]).iter().all(|y| (y - 2.5).abs() < 1e-8), "{doc}");
}

#[test]
fn track_matches_direct_solve() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", PENTAGON_A);
    let plot = ws.path("path.csv");
    let doc =
        json_of(&santalo(&["track", "--A", p(&a), "--b", PENTAGON_RHS, "--b1", "1,1,4/5", "--plot-data", p(&plot)]));
    let end = floats(&doc["x_end"]);
    for (x, e) in end.iter().zip([0.291, 0.181, 0.145, 0.237, 0.146]) {
        assert!((x - e).abs() < 1e-3);
    }
    let direct = json_of(&santalo(&["santalo", "--A", p(&a), "--b", "1,1,4/5"]));
    for (x, d) in end.iter().zip(floats(&direct["x_star"])) {
        assert!((x - d).abs() < 1e-8);
    }
    let csv = fs::read_to_string(&plot).unwrap();
    assert!(csv.starts_with("t,x1,x2,x3,x4,x5\n"));
    assert!(csv.lines().count() > 3);

    let same = json_of(&santalo(&["track", "--A", p(&a), "--b", PENTAGON_RHS, "--b1", PENTAGON_RHS]));
    assert_eq!(same["x_end"], same["x_start"]);

    let out = santalo(&["track", "--A", p(&a), "--b", PENTAGON_RHS, "--b1", "1,2,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("santalo"));
}

#[test]
fn chamber_profile_of_pentagon() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", PENTAGON_A);
    let doc = json_of(&santalo(&["chamber", "--A", p(&a), "--b", PENTAGON_RHS]));
    assert_eq!(doc["count"], 11);
    assert_eq!(doc["facet_count_profile"], serde_json::json!({"3": 5, "4": 5, "5": 1}));
    let idx = doc["cell_of_b"].as_u64().unwrap() as usize;
    assert_eq!(doc["cells"][idx]["n_c"], 5);
}

#[test]
fn volume_is_exact() {
    let ws = Workspace::new();
    let w = ws.file("W.txt", "1 0\n-1 0\n0 1\n0 -1\n");
    // The dual of [-1, 1]^2 is the cross-polytope of area 2.
    let doc = json_of(&santalo(&["volume", "--W", p(&w), "--c", "1,1,1,1", "--at", "0,0"]));
    assert_eq!(doc["value"], "2");
    let a = ws.file("A.txt", PENTAGON_A);
    let doc = json_of(&santalo(&["volume", "--A", p(&a), "--b", PENTAGON_RHS, "--at", "1/5,1/5,1/5,1/5,1/5"]));
    // alpha_C = 11 (1/5)^3 over (1/5)^5.
    assert_eq!(doc["value"], "275");
}

#[test]
fn region_membership() {
    let ws = Workspace::new();
    let w = ws.file("W.txt", "1 0\n-1 0\n0 1\n0 -1\n");
    let plot = ws.path("grid.csv");
    let args = ["region", "--W", p(&w), "--c", "1,1,1,1", "--level", "0.5", "--plot-data", p(&plot)];
    let inside = json_of(&santalo(&[&args[..], &["--at", "1/10,0"]].concat()));
    assert_eq!(inside["inside"], true);
    let outside = json_of(&santalo(&[&args[..], &["--at", "9/10,9/10"]].concat()));
    assert_eq!(outside["inside"], false);
    assert!(fs::read_to_string(&plot).unwrap().starts_with("y1,y2,excess\n"));
}

#[test]
fn degrees_of_polygons() {
    let ws = Workspace::new();
    let h = random_polygon(6, 21);
    let w = ws.file("W.txt", &format_matrix(h.w()));
    let c = format_rational_csv(h.c());
    let out = Command::new(env!("CARGO_BIN_EXE_santalo"))
        .args(["mldeg", "--W", p(&w), "--c", &c])
        .env("SANTALO_SEED", "4")
        .output()
        .unwrap();
    let doc = json_of(&out);
    assert_eq!(doc["ml_degree"], 22);
    assert_eq!(doc["seeds"][0], 4);
    assert_eq!(doc["solution_set"]["metadata"]["count"], 22);

    let a = ws.file("A.txt", PENTAGON_A);
    let out_path = ws.path("patch.json");
    let status = santalo(&["patchdeg", "--A", p(&a), "--b", PENTAGON_RHS, "--seed", "2", "--out", p(&out_path)]);
    assert!(status.status.success());
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["patch_degree"], 14);
}

#[test]
fn identical_seeds_give_identical_documents() {
    let ws = Workspace::new();
    let a = ws.file("A.txt", PENTAGON_A);
    let run = || santalo(&["mldeg", "--A", p(&a), "--b", PENTAGON_RHS, "--seed", "9", "--target-count", "11"]).stdout;
    assert_eq!(run(), run());
}

proptest! {
    #[test]
    fn matrix_files_round_trip(entries in proptest::collection::vec((-50i64..50, 1i64..20), 6)) {
        let rows: Vec<Vec<_>> = entries.chunks(3).map(|r| r.iter().map(|&(p, q)| rat(p, q)).collect()).collect();
        let m = ExactMatrix::from_rows(&rows).unwrap();
        prop_assert_eq!(santalo::format::parse_matrix(&format_matrix(&m)).unwrap(), m);
    }
}
