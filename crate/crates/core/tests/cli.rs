use std::fs;
use std::process::{Command, Output};

fn shiu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiu"))
        .args(args)
        .output()
        .expect("run shiu")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn empty_grid_gives_header_only() {
    let o = shiu(&["verify", "--x-grid", ""]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 1);
    assert!(data[0].starts_with("theorem,f,x,y,k,a,status"));
}

#[test]
fn infeasible_cells_are_skipped_not_fatal() {
    let o = shiu(&["verify", "--x-grid", "20", "--k", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().skip(3).all(|l| l.contains("skip:k-too-large")));
}

#[test]
fn configuration_errors_exit_3() {
    for args in [
        &["verify", "--k", "0"][..],
        &["verify", "--f", "no_such_function"],
        &["verify", "--constants", "/nonexistent/constants.csv"],
        &["dfold", "--R", "paper:x"],
    ] {
        let o = shiu(args);
        assert_eq!(
            o.status.code(),
            Some(3),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# grid\nx_grid = 1e4, 1e5\nk = 3\nf = tau\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = shiu(&["verify", "--config", c]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("shiu,")).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.starts_with("shiu,tau_d(d=2),")));
    let o = shiu(&["verify", "--config", c, "--f", "one", "--x-grid", "1e4"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("shiu,")).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.starts_with("shiu,one,10000,")));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rho.csv");
    let o = shiu(&[
        "tables",
        "rho",
        "--to",
        "2",
        "--step",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("u,rho,ln_rho\n0,1,0\n1,1,0\n2,0.30685281944005"));
}

#[test]
fn freeze_then_tamper_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constants.csv");
    let p = path.to_str().unwrap();
    let o = shiu(&["freeze", "--freeze", "--constants", p]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(shiu(&["freeze", "--constants", p]).status.code(), Some(0));

    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines
        .iter()
        .position(|l| l.starts_with("shiu/tau,\"x="))
        .unwrap();
    let (head, v) = lines[i].rsplit_once(',').unwrap();
    let v: f64 = v.parse().unwrap();
    lines[i] = format!("{head},{}", v * 1.05);
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let o = shiu(&["freeze", "--constants", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shiu/tau"));
}
