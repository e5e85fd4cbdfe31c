use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn westervelt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_westervelt")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const PULSE: &str = "beta = 0.1\nx0 = -10\nx1 = 10\nnx = 128\nt_end = 0.5\ninit.name = gaussian\ninit.center = -1\noutput.every = 5\n";

fn simulate(dir: &Path, cfg: &str, name: &str) -> Output {
    let path = dir.join(format!("{name}.cfg"));
    fs::write(&path, cfg).unwrap();
    let out = dir.join(name);
    westervelt(&["simulate", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn verify_suites_agree() {
    for suite in ["westervelt", "hamiltonian", "mapping"] {
        let o = westervelt(&["verify", "--suite", suite]);
        assert_eq!(code(&o), 0, "{suite}: {}", String::from_utf8_lossy(&o.stdout));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.lines().count() > 0);
        for line in text.lines() {
            assert!(line.contains(" PASS ") || line.contains(" FAIL "), "{line}");
            assert!(!line.contains("MISMATCH"));
        }
    }
    assert_eq!(code(&westervelt(&["verify", "--suite", "nonsense"])), 2);
}

#[test]
fn simulate_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate(dir.path(), PULSE, "a");
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = simulate(dir.path(), PULSE, "b");
    assert_eq!(code(&b), 0);
    let (ra, rb) = (dir.path().join("a"), dir.path().join("b"));
    let header = fs::read_to_string(ra.join("monitors.csv")).unwrap();
    assert!(header.starts_with("t,C1,C2,C3,C4,C5,C6,E,M,K,H,Tv3,Tv4\n"));
    assert_eq!(fs::read_to_string(ra.join("fields_0000.csv")).unwrap().lines().next(), Some("x,p,q,v"));
    for name in ["monitors.csv", "fields_0000.csv", "fields_0001.csv"] {
        assert_eq!(fs::read(ra.join(name)).unwrap(), fs::read(rb.join(name)).unwrap(), "{name}");
    }
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(ra.join("run_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "simulate");
    assert_eq!(m["exit_status"], 0);
    assert_eq!(m["config"]["nx"], "128");
}

#[test]
fn damped_monitor_header_is_short() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{PULSE}alpha = 0.5\ninit.r = consistent\n");
    assert_eq!(code(&simulate(dir.path(), &cfg, "d")), 0);
    let text = fs::read_to_string(dir.path().join("d/monitors.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("t,C1,C2,C3,C4"));
}

#[test]
fn bad_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cfg");
    let o = westervelt(&["simulate", "--config", missing.to_str().unwrap(), "--out", dir.path().join("m").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&simulate(dir.path(), &format!("{PULSE}alpha = 0.1\n"), "noinit")), 2);
    assert_eq!(code(&simulate(dir.path(), &PULSE.replace("nx = 128", "nx = many"), "nx")), 2);
}

#[test]
fn hyperbolicity_loss_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PULSE.replace("beta = 0.1", "beta = 1").replace("init.center = -1", "init.amplitude = 0.6");
    let o = simulate(dir.path(), &cfg, "blow");
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("blow/run_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["exit_status"], 3);
}

#[test]
fn exact_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("deg3.csv");
    let o = westervelt(&["exact", "--family", "deg3", "--params", "a1=1", "--grid", "0:0.7:8,0:1:5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("t,x,p,v"));
    assert_eq!(text.lines().count(), 1 + 8 * 5);
    assert!(dir.path().join("deg3.manifest.json").exists());

    // Past t = 3 a1 / (4 beta^2) the solution leaves its real domain.
    let late = dir.path().join("late.csv");
    let o = westervelt(&["exact", "--family", "deg3", "--params", "a1=1", "--grid", "0:0.8:9,0:1:5", "--out", late.to_str().unwrap()]);
    assert_eq!(code(&o), 3);

    let t = dir.path().join("t.csv");
    let args = ["exact", "--family", "deg2", "--params", "a1=1,a2=0.5,a3=1", "--grid", "0:1:3,-0.3:0.3:4", "--transform", "X3=0.1", "--out", t.to_str().unwrap()];
    assert_eq!(code(&westervelt(&args)), 0);
    let bad = ["exact", "--family", "deg2", "--params", "a1=1,bogus=2", "--grid", "0:1:3,0:1:3", "--out", t.to_str().unwrap()];
    assert_eq!(code(&westervelt(&bad)), 2);
    let bad_grid = ["exact", "--family", "deg2", "--params", "a1=1", "--grid", "0:1", "--out", t.to_str().unwrap()];
    assert_eq!(code(&westervelt(&bad_grid)), 2);
}

#[test]
fn mms_reports_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "mms", "--family", "similarity", "--params", "beta=1,branch=singular", "--domain", "0.5:1.5", "--time", "1:1.05",
        "--nx", "17", "--refinements", "2", "--expect-order", "1.7:2.3", "--out", dir.path().to_str().unwrap(),
    ];
    let o = westervelt(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(dir.path().join("mms.csv").exists());
    assert!(dir.path().join("run_manifest.json").exists());
    let mut strict = args.to_vec();
    strict[14] = "3.5:4.5";
    assert_eq!(code(&westervelt(&strict)), 1);
}

#[test]
fn catalog_dump_is_json() {
    let o = westervelt(&["catalog", "dump", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let kinds: Vec<&str> = v.as_array().unwrap().iter().filter_map(|e| e["kind"].as_str()).collect();
    for k in ["symmetry", "integral"] {
        assert!(kinds.contains(&k), "{k}");
    }
}
