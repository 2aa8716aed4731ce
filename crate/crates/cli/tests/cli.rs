use std::path::PathBuf;

use fqnoise_cli::config::Settings;
use fqnoise_cli::experiments::{BoundsConfig, RunError};
use fqnoise_cli::table::Table;
use fqnoise_cli::{execute, run_cli, Command};

fn settings(flags: &[(&str, &str)]) -> Settings {
    let flags: Vec<(String, String)> = flags
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    Settings::merge(Default::default(), &flags)
}

fn run(command: Command, flags: &[(&str, &str)]) -> Result<(String, Table), RunError> {
    let (report, _) = execute(command, &settings(flags))?;
    Ok((report.text, report.table))
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("fqnoise-{}-{name}", std::process::id()))
}

#[test]
fn reruns_are_byte_identical() {
    let cases: [(Command, &[(&str, &str)]); 5] = [
        (Command::Fermi1d, &[("n_grid", "20,40")]),
        (Command::Fermi2d, &[("L", "8"), ("n_occ", "10,20")]),
        (Command::EncodingCompare, &[("L", "3,5"), ("bk_n", "4,8")]),
        (
            Command::Circuit,
            &[("L", "8,12"), ("depth", "1,2"), ("gates", "per_gate")],
        ),
        (Command::Bounds, &[("format", "csv")]),
    ];
    for (command, flags) in cases {
        let a = run(command, flags).unwrap().0;
        let b = run(command, flags).unwrap().0;
        assert_eq!(a, b, "{}", command.name());
        assert!(!a.contains('\r'));
    }
}

#[test]
fn noiseless_runs_have_zero_error() {
    let (_, t) = run(Command::Fermi1d, &[("p", "0"), ("n_grid", "20:80:20")]).unwrap();
    for col in ["error_kF", "error_q0"] {
        assert!(
            t.floats(col).unwrap().iter().all(|&e| e.abs() < 1e-12),
            "{col}"
        );
    }
    let (_, t) = run(Command::EncodingCompare, &[("p", "0"), ("L", "3,7")]).unwrap();
    assert!(t.floats("error").unwrap().iter().all(|&e| e == 0.0));
    let (_, t) = run(Command::Circuit, &[("p", "0"), ("L", "16")]).unwrap();
    assert!(t.floats("error").unwrap().iter().all(|&e| e.abs() < 1e-14));
}

#[test]
fn empty_and_full_seas_shift_by_half_p() {
    let (_, empty) = run(Command::Fermi2d, &[("L", "30"), ("n_occ", "0")]).unwrap();
    let (_, full) = run(Command::Fermi2d, &[("L", "30"), ("n_occ", "900")]).unwrap();
    assert_eq!(empty.rows.len(), 900);
    for s in empty
        .floats("sensitivity")
        .unwrap()
        .into_iter()
        .chain(full.floats("sensitivity").unwrap())
    {
        assert!((s - 0.5).abs() < 1e-9, "{s}");
    }
    let a = empty.floats("n_noisy").unwrap();
    let b = full.floats("n_noisy").unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x + y - 1.0).abs() < 1e-12);
    }
}

#[test]
fn local_hop_error_is_size_independent() {
    let (_, t) = run(
        Command::EncodingCompare,
        &[("p", "0.01"), ("L", "3,9,15"), ("bk_n", "2")],
    )
    .unwrap();
    let names = t.column("encoding").unwrap();
    let errors = t.floats("error").unwrap();
    for (name, e) in names.iter().zip(errors) {
        if format!("{name:?}").contains("local1") {
            assert!((e - (1.0 - 0.99f64.powi(2))).abs() < 1e-14);
        }
    }
}

#[test]
fn bounds_json_round_trips() {
    let (text, t) = run(
        Command::Bounds,
        &[("p", "1e-3,1e-2"), ("depth", "1,3"), ("dim", "2")],
    )
    .unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let cfg: BoundsConfig = serde_json::from_value(doc["config"].clone()).unwrap();
    assert_eq!(cfg.p, vec![1e-3, 1e-2]);
    assert_eq!(cfg.dim, 2);
    assert_eq!(doc["rows"].as_array().unwrap().len(), t.rows.len());

    let path = tmp("bounds.conf");
    let file = format!(
        "K = {}\nmu = {}\ndim = {}\nphi0 = {}\np = {}\ndepth = {}\nk_f = {}\ndelta = {}\n",
        cfg.k,
        cfg.mu,
        cfg.dim,
        cfg.phi0,
        join(&cfg.p),
        join(&cfg.depth),
        cfg.k_f,
        join(&cfg.delta)
    );
    std::fs::write(&path, file).unwrap();
    let again = Settings::from_sources(Some(&path), &[]).unwrap();
    let text2 = execute(Command::Bounds, &again).unwrap().0.text;
    std::fs::remove_file(&path).ok();
    assert_eq!(text, text2);
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[test]
fn flags_override_config_file() {
    let path = tmp("fermi1d.conf");
    std::fs::write(&path, "# sweep\np = 0.3\nn-grid = 20,40\n").unwrap();
    let flags = vec![("p".to_string(), "0".to_string())];
    let s = Settings::from_sources(Some(&path), &flags).unwrap();
    std::fs::remove_file(&path).ok();
    let (report, _) = execute(Command::Fermi1d, &s).unwrap();
    assert_eq!(report.table.rows.len(), 2);
    assert!(report
        .table
        .floats("error_kF")
        .unwrap()
        .iter()
        .all(|e| e.abs() < 1e-12));
}

#[test]
fn config_errors_name_the_field() {
    let cases: [(Command, &[(&str, &str)], &str); 6] = [
        (Command::Bounds, &[("mu", "1")], "mu"),
        (Command::Fermi1d, &[("p", "0.9")], "p"),
        (Command::Fermi1d, &[("n_grid", "22")], "n_grid"),
        (Command::Fermi2d, &[("encoding", "ternary")], "encoding"),
        (Command::EncodingCompare, &[("L", "4")], "L"),
        (Command::Circuit, &[("seed", "x")], "seed"),
    ];
    for (command, flags, field) in cases {
        match run(command, flags) {
            Err(RunError::Config(e)) => assert_eq!(e.field, field, "{}", command.name()),
            other => panic!("{}: expected a config error, got {other:?}", command.name()),
        }
    }
    match run(Command::Bounds, &[("n_occ", "3")]) {
        Err(RunError::Config(e)) => assert_eq!(e.field, "n_occ"),
        other => panic!("unknown key accepted: {other:?}"),
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run_cli(["fqnoise", "bounds", "--mu", "0.5"]), 2);
    assert_eq!(run_cli(["fqnoise", "fermi1d", "--p", "abc"]), 2);
    assert_eq!(run_cli(["fqnoise", "nonsense"]), 2);
    assert_eq!(
        run_cli(["fqnoise", "bounds", "--config", "/nonexistent/fqnoise.conf"]),
        2
    );
    let out = tmp("ok.csv");
    let out_s = out.to_str().unwrap();
    assert_eq!(
        run_cli([
            "fqnoise",
            "encoding-compare",
            "--L",
            "3",
            "--bk-n",
            "4",
            "--out",
            out_s
        ]),
        0
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_file(&out).ok();
    assert!(csv.starts_with("encoding,L,N,observable,weight,error,closed_form\n"));
    assert_eq!(RunError::Invariant("x".into()).exit_code(), 3);
    assert_eq!(
        RunError::Core(fqnoise_core::Error::Numerical("x".into())).exit_code(),
        3
    );
}
