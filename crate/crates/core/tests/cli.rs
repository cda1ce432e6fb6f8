//! Tests of the `shillset` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn shillset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shillset"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn copy_fixtures(dir: &Path) {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in ["auctions.csv", "histories.csv"] {
        fs::copy(src.join(name), dir.join(name)).unwrap();
    }
    fs::write(
        dir.join("run.conf"),
        "input.auctions = auctions.csv\ninput.histories = histories.csv\noutput.dir = out\nrates.GBP = 1.25\nrates.EUR = 1.10\n",
    )
    .unwrap();
}

#[test]
fn run_on_fixture_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    let conf = dir.path().join("run.conf");
    let o = shillset(&["run", "--config", conf.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let header = fs::read_to_string(dir.path().join("out/dataset.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap().split(',').count(), 11);
}

#[test]
fn stages_run_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    let conf = dir.path().join("run.conf");
    let conf = conf.to_str().unwrap();
    for stage in ["preprocess", "features", "filter", "stats"] {
        let o = shillset(&[stage, "--config", conf]);
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
    }
    let stats = fs::read_to_string(dir.path().join("out/stats.txt")).unwrap();
    assert!(stats.starts_with("Number of Auction IDs: "));
}

#[test]
fn out_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    copy_fixtures(dir.path());
    let conf = dir.path().join("run.conf");
    let other = dir.path().join("elsewhere");
    let o = shillset(&[
        "preprocess",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        other.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(other.join("preprocessed.csv").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn seed_flag_changes_synthetic_output() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("synth.conf");
    fs::write(&conf, "synth.n_auctions = 20\nsynth.n_shills = 2\n").unwrap();
    let gen = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        let o = shillset(&[
            "synth",
            "--config",
            conf.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(out.join("synth_auctions.csv")).unwrap()
    };
    assert_eq!(gen("1", "a"), gen("1", "b"));
    assert_ne!(gen("1", "a"), gen("2", "c"));
}

#[test]
fn empty_auction_file_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "").unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "input.auctions = empty.csv\n").unwrap();
    let o = shillset(&["preprocess", "--config", conf.to_str().unwrap()]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: empty_input: "), "{err}");
}

#[test]
fn config_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "iqr_k = -1\n").unwrap();
    let o = shillset(&["run", "--config", conf.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error: config: "));

    fs::write(&conf, "no_such_key = 1\n").unwrap();
    let o = shillset(&["run", "--config", conf.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error: config: "));
}

#[test]
fn config_flag_is_required() {
    let o = shillset(&["run"]);
    assert!(!o.status.success());
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "input.auctions = nope.csv\n").unwrap();
    let o = shillset(&["preprocess", "--config", conf.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error: io: "), "{}", stderr(&o));
}
