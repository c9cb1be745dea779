use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn famdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_famdyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path, out: &Path) -> (i32, Value) {
    let o = famdyn(&["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let code = o.status.code().unwrap();
    let report = std::fs::read_to_string(out.join("report.json"))
        .map(|t| serde_json::from_str(&t).unwrap())
        .unwrap_or(Value::Null);
    (code, report)
}

const WM_FULL: &str = r#"
operation = "weak-mixing"
[system]
fixture = "full-2-shift"
[params]
depth = 2
horizon = 60
"#;

#[test]
fn weak_mixing_on_full_shift_exits_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "wm.toml", WM_FULL);
    let (code, report) = run(&cfg, &dir.path().join("out"));
    assert_eq!(code, 0);
    assert_eq!(report["verdict"], "holds-at-horizon");
    assert_eq!(report["result"]["verdict"], "holds-at-horizon");
}

#[test]
fn weak_mixing_on_rotation_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "rot.toml",
        "operation = \"weak-mixing\"\n[system]\nfixture = \"golden-rotation\"\n[params]\ndepth = 2\nhorizon = 100\n",
    );
    let (code, report) = run(&cfg, &dir.path().join("out"));
    assert_eq!(code, 1);
    assert_eq!(report["verdict"], "fails-at-horizon");
    assert!(!report["result"]["witness"].is_null());
}

#[test]
fn inconclusive_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "ly.toml",
        "operation = \"li-yorke\"\n[system]\nfixture = \"golden-rotation\"\n[params]\ndepth = 3\nhorizon = 100\ndelta = 0.1\n",
    );
    assert_eq!(run(&cfg, &dir.path().join("out")).0, 2);
}

#[test]
fn usage_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("syntax.toml", "operation = \n"),
        ("unknown_key.toml", "operation = \"transitivity\"\nspeed = 3\n[system]\nfixture = \"full-2-shift\"\n"),
        ("unknown_fixture.toml", "operation = \"transitivity\"\n[system]\nfixture = \"no-such\"\n"),
        ("unknown_op.toml", "operation = \"dance\"\n[system]\nfixture = \"full-2-shift\"\n"),
        (
            "both.toml",
            "operation = \"transitivity\"\n[system]\nfixture = \"full-2-shift\"\n[system.spec]\nkind = \"full-shift\"\nalphabet = 2\n",
        ),
        (
            "cap.toml",
            "operation = \"transitivity\"\n[system]\nfixture = \"full-2-shift\"\n[params]\nhorizon = 500\n[limits]\nmax_horizon = 100\n",
        ),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), name, body);
        let o = famdyn(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(3), "{name}");
        assert!(!o.stderr.is_empty(), "{name}");
    }
    assert_eq!(famdyn(&["run"]).status.code(), Some(3));
    assert_eq!(famdyn(&["run", "/no/such/file.toml"]).status.code(), Some(3));
}

#[test]
fn fixtures_lists_registry() {
    let o = famdyn(&["fixtures"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["full-2-shift", "newprop-10", "wedge-fullshift"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

fn strip_clock(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_clock_ms");
            m.remove("runtime_ms");
            m.values_mut().for_each(strip_clock);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_clock),
        _ => {}
    }
}

#[test]
fn identical_configs_reproduce_reports() {
    let dir = TempDir::new().unwrap();
    let bodies = [
        WM_FULL,
        "operation = \"lyapunov\"\n[system]\nfixture = \"full-2-shift\"\n[params]\ndepth = 2\nhorizon = 12\nk = 2\n",
        "operation = \"sequence-entropy\"\n[system]\nfixture = \"golden-rotation\"\n[params]\nk_max = 6\neps_list = [0.2, 0.1]\n",
    ];
    for (i, body) in bodies.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{i}.toml"), body);
        let (_, mut a) = run(&cfg, &dir.path().join(format!("a{i}")));
        let (_, mut b) = run(&cfg, &dir.path().join(format!("b{i}")));
        assert!(!a.is_null());
        strip_clock(&mut a);
        strip_clock(&mut b);
        assert_eq!(a, b);
        let raw = std::fs::read_to_string(dir.path().join(format!("a{i}/report.json"))).unwrap();
        let keys: Vec<&str> = raw.lines().filter(|l| l.starts_with("  \"")).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted, "top-level keys sorted");
    }
}

#[test]
fn plot_series() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (
            "operation = \"sequence-entropy\"\n[system]\nfixture = \"full-2-shift\"\n[params]\nk_max = 6\n",
            "log_sep",
            "k,log_sep",
            "sep_profile_0.csv",
        ),
        (
            "operation = \"thick-sensitivity-profile\"\n[system]\nfixture = \"full-2-shift\"\n[params]\ndepth = 2\nhorizon = 20\ndelta = 0.4\n",
            "max_run",
            "cell_index,max_run",
            "thick_profile.csv",
        ),
        (
            "operation = \"lyapunov\"\n[system]\nfixture = \"full-2-shift\"\n[params]\ndepth = 2\nhorizons = [4, 8, 12]\nk = 2\n",
            "L_d",
            "horizon,L_d",
            "lyapunov.csv",
        ),
    ];
    for (i, (body, series, header, side)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("p{i}.toml"), body);
        let out = dir.path().join(format!("p{i}"));
        assert_eq!(run(&cfg, &out).0, 0);
        assert!(out.join(side).exists(), "{side}");
        let report = out.join("report.json");
        let o = famdyn(&["plot", report.to_str().unwrap(), series]);
        assert!(o.status.success());
        let csv = String::from_utf8(o.stdout).unwrap();
        assert_eq!(csv.lines().next(), Some(*header));
        assert!(csv.lines().count() > 1 && !csv.contains('\r'));
    }
    let report = dir.path().join("p0/report.json");
    let o = famdyn(&["plot", report.to_str().unwrap(), "nope"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("missing series"));
}

#[test]
fn newprop_operations() {
    let dir = TempDir::new().unwrap();
    let ok = write_config(
        dir.path(),
        "np.toml",
        "operation = \"verify-newprop\"\n[system]\nfixture = \"newprop-10\"\n[params]\nn_max = 3\n",
    );
    let (code, report) = run(&ok, &dir.path().join("np"));
    assert_eq!(code, 0);
    assert_eq!(report["result"]["witness"]["trace"][0]["v"]["decimal"], "100000000000000000000012");
    let bad = write_config(
        dir.path(),
        "bad.toml",
        "operation = \"verify-newprop\"\n[system]\nfixture = \"newprop-10\"\n[params]\nmutated = true\n",
    );
    assert_eq!(run(&bad, &dir.path().join("bad")).0, 1);
}
