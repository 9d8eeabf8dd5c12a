use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hypspec_core::mesher::{flat_torus, read_mesh, write_mesh};
use tempfile::TempDir;

const GENUS_TWO: &str = r#"{"blocks": [{"kind": "ThreeHoles", "lengths": [1, 1, 1]},
                                       {"kind": "ThreeHoles", "lengths": [1, 1, 1]}],
                            "gluings": [{"from": [0, 0], "to": [1, 0]},
                                        {"from": [0, 1], "to": [1, 1]},
                                        {"from": [0, 2], "to": [1, 2]}]}"#;

fn hypspec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypspec"))
        .current_dir(dir)
        .args(args)
        .env_remove("HYPSPEC_THREADS")
        .output()
        .unwrap()
}

fn with_threads(dir: &Path, threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypspec"))
        .current_dir(dir)
        .args(args)
        .env("HYPSPEC_THREADS", threads)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn workspace() -> TempDir {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("g2.json"), GENUS_TWO).unwrap();
    d
}

#[test]
fn help_documents_every_flag() {
    let d = workspace();
    let o = hypspec(d.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let top = stdout(&o);
    for sub in [
        "build",
        "spectrum",
        "verify",
        "cover",
        "bounds",
        "converge",
        "HYPSPEC_THREADS",
    ] {
        assert!(top.contains(sub), "{sub} missing from help");
    }
    let randol = stdout(&hypspec(d.path(), &["verify", "randol", "--help"]));
    for flag in ["--h", "--m", "--k", "--n", "--seed", "--plot", "--out"] {
        assert!(randol.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn usage_errors_exit_two() {
    let d = workspace();
    assert_eq!(hypspec(d.path(), &["spectrum", "missing.json"]).status.code(), Some(2));
    assert_eq!(hypspec(d.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        hypspec(d.path(), &["verify", "buser", "--ell", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hypspec(d.path(), &["build", "g2.json", "--h", "-1"]).status.code(),
        Some(2)
    );
    let two = hypspec(d.path(), &["converge", "g2.json", "--h-list", "0.3,0.2"]);
    assert_eq!(two.status.code(), Some(2));
    assert_eq!(
        with_threads(d.path(), "zero", &["bounds", "g2.json"]).status.code(),
        Some(2)
    );
    fs::write(d.path().join("bad.json"), "{\"blocks\": 3}").unwrap();
    assert_eq!(hypspec(d.path(), &["bounds", "bad.json"]).status.code(), Some(2));
}

#[test]
fn bounds_report() {
    let d = workspace();
    let o = hypspec(d.path(), &["bounds", "g2.json", "--out", "b"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("lambda_lower           0.25633"), "{text}");
    assert!(text.contains("lambda_upper           66.50"), "{text}");
    let csv = fs::read_to_string(d.path().join("b/bounds.csv")).unwrap();
    assert!(csv.starts_with("quantity,value\n"));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("b/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "bounds");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert!(m["outputs"]["bounds.csv"].is_string());
    assert!(m["versions"]["hypspec-core"].is_string());
}

#[test]
fn buser_verification_passes_and_reruns_identically() {
    let d = workspace();
    let args = [
        "verify", "buser", "--genus", "2", "--ell", "0.05", "--h", "0.05", "--plot", "--out",
    ];
    let a = hypspec(d.path(), &[&args[..], &["a"]].concat());
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).contains("PASS count_below_buser_bound"));
    let b = with_threads(d.path(), "1", &[&args[..], &["b"]].concat());
    assert_eq!(b.status.code(), Some(0));
    for f in ["verdicts.csv", "spectrum.csv", "spectrum.svg", "manifest.json"] {
        let x = fs::read(d.path().join("a").join(f)).unwrap();
        let y = fs::read(d.path().join("b").join(f)).unwrap();
        assert!(x == y, "{f} differs between reruns");
    }
    let svg = fs::read_to_string(d.path().join("a/spectrum.svg")).unwrap();
    assert!(svg.contains("Lambda_lower") && svg.contains("1/4"));
}

#[test]
fn randol_verification_and_cover() {
    let d = workspace();
    let o = hypspec(
        d.path(),
        &[
            "verify", "randol", "g2.json", "--k", "3", "--n", "1", "--h", "0.12", "--out", "r",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = fs::read_to_string(d.path().join("r/verdicts.csv")).unwrap();
    assert!(v.lines().skip(1).all(|l| l.split(',').nth(1) == Some("PASS")), "{v}");
    assert!(d.path().join("r/base_spectrum.csv").exists());

    let o = hypspec(
        d.path(),
        &["cover", "g2.json", "--k", "1", "--n", "1", "--h", "0.3", "--out", "c"],
    );
    assert_eq!(o.status.code(), Some(0));
    let mesh = read_mesh(&fs::read_to_string(d.path().join("c/cover.hypmesh")).unwrap()).unwrap();
    assert_eq!(mesh.euler_characteristic(), -6);
}

#[test]
fn build_then_spectrum_of_the_mesh() {
    let d = workspace();
    assert_eq!(
        hypspec(d.path(), &["build", "g2.json", "--h", "0.3", "--out", "m"])
            .status
            .code(),
        Some(0)
    );
    let q = fs::read_to_string(d.path().join("m/quality.csv")).unwrap();
    assert!(q.lines().nth(1).unwrap().ends_with(",-2"));
    let a = hypspec(d.path(), &["spectrum", "m/mesh.hypmesh", "--m", "3", "--out", "s1"]);
    let b = hypspec(
        d.path(),
        &["spectrum", "g2.json", "--h", "0.3", "--m", "3", "--out", "s2"],
    );
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    let x = fs::read_to_string(d.path().join("s1/spectrum.csv")).unwrap();
    let y = fs::read_to_string(d.path().join("s2/spectrum.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn flatmesh_torus_spectrum() {
    let d = workspace();
    fs::write(d.path().join("torus.mesh"), write_mesh(&flat_torus(40).unwrap())).unwrap();
    let o = hypspec(
        d.path(),
        &["spectrum", "torus.mesh", "--m", "5", "--plot", "--out", "t"],
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(d.path().join("t/spectrum.csv")).unwrap();
    let l1: f64 = csv.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let want = 4.0 * 1600.0 * (std::f64::consts::PI / 40.0).sin().powi(2);
    assert!((l1 - want).abs() < 1e-7 * want, "{l1}");
    assert!(d.path().join("t/spectrum.svg").exists());
}

#[test]
fn campaign_with_a_broken_surface_exits_one() {
    let d = workspace();
    let cfg = r#"{"surfaces": [{"kind": "file", "name": "ok", "path": "g2.json"},
                              {"kind": "file", "name": "gone", "path": "nope.json"}],
                  "h": 0.25, "checks": ["audit"]}"#;
    fs::write(d.path().join("c.json"), cfg).unwrap();
    let o = hypspec(d.path(), &["verify", "campaign", "c.json", "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gone/run"));
    let csv = fs::read_to_string(d.path().join("x/campaign.csv")).unwrap();
    assert!(
        csv.lines().any(|l| l.starts_with("ok,count_below_lambda_lower,PASS")),
        "{csv}"
    );

    let good = cfg.replace(
        ",\n                              {\"kind\": \"file\", \"name\": \"gone\", \"path\": \"nope.json\"}",
        "",
    );
    fs::write(d.path().join("c.json"), good).unwrap();
    let a = hypspec(d.path(), &["verify", "campaign", "c.json", "--out", "y"]);
    let b = hypspec(d.path(), &["verify", "campaign", "c.json", "--out", "z"]);
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));
    assert_eq!(
        fs::read(d.path().join("y/campaign.csv")).unwrap(),
        fs::read(d.path().join("z/campaign.csv")).unwrap()
    );
}

#[test]
fn converge_writes_levels() {
    let d = workspace();
    let o = hypspec(
        d.path(),
        &[
            "converge",
            "g2.json",
            "--h-list",
            "0.3,0.2,0.15",
            "--m",
            "3",
            "--out",
            "v",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let levels = fs::read_to_string(d.path().join("v/convergence.csv")).unwrap();
    assert_eq!(levels.lines().count(), 4);
    assert!(levels.starts_with("h,h_max,dofs,lambda_0,lambda_1,lambda_2\n"));
    assert!(d.path().join("v/extrapolation.csv").exists());
}
