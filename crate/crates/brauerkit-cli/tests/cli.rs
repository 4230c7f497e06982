//! Black-box tests of the binary: subcommands, exit codes, JSON output,
//! the recheck round trip, config files and the cache variable.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brauerkit"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("brauerkit-cli-{}-{}", std::process::id(), name));
    let _ = std::fs::remove_file(&p);
    p
}

#[test]
fn hilbert_table() {
    let out = bin().args(["hilbert", "5", "17"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("(5, 17)_2 = +1"));
    assert!(stdout.contains("(5, 17)_5 = -1"));
    assert!(stdout.contains("(5, 17)_17 = -1"));
    assert!(stdout.contains("(5, 17)_oo = +1"));
}

#[test]
fn isotropic_patterns() {
    let out = bin().args(["isotropic", "1,1,1"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("anisotropic exactly at {2, oo}"));

    let out = bin()
        .args(["isotropic", "1,-1", "--place", "oo"])
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("isotropic"));
}

#[test]
fn h1_queries() {
    let out = bin()
        .args(["h1", "--group", "sl2", "--n", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("H^1 = 0"));

    let out = bin()
        .args(["h1", "--group", "sl2plus", "--n", "4"])
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("invariant factors"));
}

#[test]
fn usage_errors_exit_64() {
    let out = bin().args(["nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    let out = bin().args(["isotropic", "0,1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn pipeline_json_and_report_roundtrip() {
    let json = tmp("report.json");
    let out = bin()
        .args([
            "threefold-real",
            "--json",
            json.to_str().unwrap(),
            "--recheck",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let content = std::fs::read_to_string(&json).unwrap();
    assert!(content.contains("\"schema\": 1"));
    assert!(content.contains("\"overall\": \"pass\""));

    // feed the stored report back
    let out = bin()
        .args(["report", "--json", json.to_str().unwrap(), "--recheck"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("recheck: all passing witnesses re-verified"));
    let _ = std::fs::remove_file(&json);
}

#[test]
fn failing_pipeline_exits_one() {
    let out = bin()
        .args(["threefold-real", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cohomology_pipeline_runs() {
    let out = bin()
        .args(["cohomology", "--max-n", "6", "--max-r", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
}

#[test]
fn surface_refusal_is_reported() {
    let out = bin().args(["surface", "--c", "17"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("congruent to 1 modulo 8"));
}

#[test]
fn ec_subcommands() {
    let out = bin().args(["ec", "info"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("disc = -67"));
    assert!(stdout.contains("-15984"));

    let out = bin().args(["ec", "ap", "--p", "3"]).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("a_p = -2"));

    let out = bin().args(["ec", "torsion"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin()
        .args(["ec", "galois", "--ell", "5", "--prime-bound", "2000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("SurjectiveCertified"));

    let out = bin().args(["ec", "twist", "--d", "10"]).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn cache_via_environment_and_flag() {
    let cache = tmp("env-cache");
    let out = bin()
        .args(["ec", "ap", "--bound", "50", "--cache", cache.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let content = std::fs::read_to_string(&cache).unwrap();
    assert!(content.starts_with("brauerkit-apcache 1"));
    let lines_before = content.lines().count();

    // reading through the cache again adds nothing
    let out = bin()
        .args(["ec", "ap", "--bound", "50", "--cache", cache.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let content = std::fs::read_to_string(&cache).unwrap();
    assert_eq!(content.lines().count(), lines_before);
    let _ = std::fs::remove_file(&cache);

}

#[test]
fn env_cache_variable_does_not_break_other_commands() {
    let cache = tmp("env-cache-passthrough");
    let out = bin()
        .args(["threefold-padic"])
        .env("BRAUERKIT_CACHE", cache.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let _ = std::fs::remove_file(&cache);
}

#[test]
fn config_file_overrides() {
    let cfg = tmp("config");
    std::fs::write(&cfg, "prime_bound = 500\nheight_bound = 100\n").unwrap();
    // config parses; a bad key is a usage error
    let out = bin()
        .args(["cohomology", "--max-n", "4", "--max-r", "1", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = bin()
        .args(["cohomology", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
    let _ = std::fs::remove_file(&cfg);
}
