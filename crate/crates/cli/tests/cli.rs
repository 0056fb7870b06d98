use std::path::Path;
use std::process::{Command, Output};

fn hyqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyqc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn default_vartheta_scan() {
    let o = hyqc(&[
        "scan",
        "--channel",
        "lambda",
        "--parent",
        "jpsi",
        "--quantity",
        "mu4",
    ]);
    assert!(o.status.success());
    let rows = csv(&stdout(&o));
    assert_eq!(
        rows[0].join(","),
        "x,quantum,classical_lo,classical_hi,modified_lo,modified_hi"
    );
    assert_eq!(rows.len(), 722);
    // open grid, pi/2 in the middle
    let mid = &rows[361];
    assert_eq!(mid[0], "1.57079632679");
    assert!(rows[1][0].parse::<f64>().unwrap() > 0.0);
    // mu4 bounds are one-sided
    assert!(mid[2].is_empty() && mid[4].is_empty());
    let (q, hi): (f64, f64) = (mid[1].parse().unwrap(), mid[3].parse().unwrap());
    assert!(q > hi);
}

#[test]
fn phi_scan_to_file_with_twelve_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = hyqc(&[
        "scan",
        "--channel",
        "Lambda-Lambdabar",
        "--parent",
        "chi_c0",
        "--steps",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2][0], "0.785398163397");
    let digits = rows[2][1]
        .trim_start_matches("0.")
        .trim_start_matches('0')
        .len();
    assert_eq!(digits, 12, "{}", rows[2][1]);
    assert!(rows
        .iter()
        .skip(1)
        .all(|r| r.len() == 6 && r.iter().all(|c| !c.is_empty())));
}

#[test]
fn extremum_json() {
    let o = hyqc(&[
        "extremum",
        "--channel",
        "lambda",
        "--parent",
        "eta_c",
        "--quantity",
        "kappa3",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let want = 6f64.sqrt() / 9.0 * 0.755f64.powi(6);
    assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-10);
    let phi = (1.0f64 / 3.0).sqrt().asin() - std::f64::consts::FRAC_PI_4;
    assert!((v["argmax"].as_f64().unwrap() - phi).abs() < 1e-7);
}

#[test]
fn report_covers_every_pair() {
    let o = hyqc(&["report"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4 * 3 * 3);
    let first = &v[0];
    assert_eq!(first["channel_id"], "Lambda-Lambdabar");
    assert_eq!(first["parent"], "eta_c");
    assert_eq!(first["quantity"], "ch_mean");
}

#[test]
fn channels_output_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("channels.toml");
    let o = hyqc(&["channels"]);
    assert!(o.status.success());
    std::fs::write(&path, &o.stdout).unwrap();
    let p = path.to_str().unwrap();
    let again = hyqc(&["channels", "--channels", p]);
    assert_eq!(again.stdout, o.stdout);
    let a = hyqc(&["report", "--channel", "xi0", "--parent", "jpsi"]);
    let b = hyqc(&[
        "--channels",
        p,
        "report",
        "--channel",
        "xi0",
        "--parent",
        "jpsi",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn mc_with_event_dump() {
    let dir = tempfile::tempdir().unwrap();
    let ev = dir.path().join("events.csv");
    let o = hyqc(&[
        "mc",
        "--channel",
        "lambda",
        "--parent",
        "eta_c",
        "--steps",
        "5",
        "--events",
        "10000",
        "--seed",
        "7",
        "--events-out",
        ev.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv(&stdout(&o));
    assert_eq!(
        rows[0].join(","),
        "x,analytic,estimate,stderr,n_events,flagged"
    );
    assert_eq!(rows.len(), 6);
    let events = csv(&std::fs::read_to_string(&ev).unwrap());
    assert_eq!(events[0].join(","), "n1x,n1y,n1z,n2x,n2y,n2z");
    assert_eq!(events.len(), 10_001);
    for e in &events[1..] {
        let v: Vec<f64> = e.iter().map(|c| c.parse().unwrap()).collect();
        assert!(((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() - 1.0).abs() < 1e-10);
    }
    // same seed, same table
    let again = hyqc(&[
        "mc",
        "--channel",
        "lambda",
        "--parent",
        "eta_c",
        "--steps",
        "5",
        "--events",
        "10000",
        "--seed",
        "7",
    ]);
    assert_eq!(again.stdout, o.stdout);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        "[X]\ndecay_mode = \"x\"\nalpha_y = 3.0\n",
    );
    let o = hyqc(&["--channels", &bad, "channels"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing field"));

    let mut table = String::from_utf8(hyqc(&["channels"]).stdout).unwrap();
    table = table
        .replacen("alpha_y = 0.755", "alpha_y = 3.0", 1)
        .replacen("beta_etac = 0.664", "beta_etac = 0.0", 1);
    let invalid = write(dir.path(), "invalid.toml", &table);
    let o = hyqc(&["--channels", &invalid, "channels"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("alpha_y") && err.contains("beta_etac") && err.contains("line 3"),
        "{err}"
    );

    assert_eq!(
        hyqc(&["scan", "--channel", "omega", "--parent", "jpsi"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hyqc(&["scan", "--channel", "lambda", "--parent", "psi2s"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hyqc(&[
            "scan",
            "--channel",
            "lambda",
            "--parent",
            "jpsi",
            "--from",
            "2",
            "--to",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        hyqc(&[
            "mc",
            "--channel",
            "lambda",
            "--parent",
            "eta_c",
            "--quantity",
            "kappa3",
            "--events",
            "20000"
        ])
        .status
        .code(),
        Some(2)
    );
    // maximum sits on the edge of the bracket
    let o = hyqc(&[
        "extremum",
        "--channel",
        "lambda",
        "--parent",
        "chi_c0",
        "--from",
        "0",
        "--to",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

/// Verdicts re-derived from scan CSVs over the report brackets agree
/// with the report.
#[test]
fn verdicts_follow_from_the_csv() {
    let o = hyqc(&["report"]);
    let reports: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for r in reports.as_array().unwrap() {
        let (id, parent, quantity) = (
            r["channel_id"].as_str().unwrap(),
            r["parent"].as_str().unwrap(),
            r["quantity"].as_str().unwrap(),
        );
        let mut args = vec![
            "scan",
            "--channel",
            id,
            "--parent",
            parent,
            "--quantity",
            quantity,
        ];
        if parent != "jpsi" {
            args.extend(["--from", "-0.785398163397448"]);
        }
        let rows = csv(&stdout(&hyqc(&args)));
        let num = |c: &str| c.parse::<f64>().unwrap();
        let objective = |v: f64| if quantity == "kappa3" { v.abs() } else { v };
        let best = rows[1..]
            .iter()
            .map(|row| objective(num(&row[1])))
            .fold(f64::NEG_INFINITY, f64::max);
        let (classical, modified) = (num(&rows[1][3]), num(&rows[1][5]));
        assert_eq!(
            best > classical,
            r["violates_classical"].as_bool().unwrap(),
            "{id} {parent} {quantity}"
        );
        assert_eq!(
            best > modified,
            r["violates_modified"].as_bool().unwrap(),
            "{id} {parent} {quantity}"
        );
    }
}
