use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tmd-cro"))
}

fn designs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/designs"))
}

#[test]
fn evaluate_prints_fitness_and_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["evaluate", "--preset", "n4-paper", "--design"])
        .arg(designs().join("n4_paper_top_floor.toml"))
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fitness      10.34"), "{text}");
    let header = std::fs::read_to_string(dir.path().join("frf_design.csv")).unwrap();
    assert!(header.starts_with("omega_rad_s,floor_1_db,floor_2_db,floor_3_db,floor_4_db\n"));
}

#[test]
fn run_writes_one_directory_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("quick.toml");
    std::fs::write(&config, "preset = \"n2-paper\"\n[cro]\nalpha = 3\n[frf]\nmax_step = 0.1\n").unwrap();
    let out_dir = dir.path().join("out");
    let status = bin()
        .arg("run")
        .arg("--config")
        .arg(&config)
        .args(["--seeds", "2", "--mode", "standalone:GM", "--out-dir"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    for mode in ["cro-sl", "standalone-GM"] {
        for seed in 0..2 {
            let run = out_dir.join(mode).join(format!("seed-{seed}"));
            for f in ["report.json", "convergence.csv", "substrates.csv", "best_design.toml", "frf_best.csv"] {
                assert!(run.join(f).is_file(), "{}", run.join(f).display());
            }
        }
    }
    let convergence = std::fs::read_to_string(out_dir.join("cro-sl/seed-1/convergence.csv")).unwrap();
    assert_eq!(convergence.lines().count(), 4);

    let again = dir.path().join("again");
    let status = bin()
        .arg("export")
        .arg("--config")
        .arg(&config)
        .arg("--report")
        .arg(out_dir.join("cro-sl/seed-1/report.json"))
        .arg("--out-dir")
        .arg(&again)
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["convergence.csv", "substrates.csv", "report.json", "frf_best.csv"] {
        assert_eq!(std::fs::read(again.join(f)).unwrap(), std::fs::read(out_dir.join("cro-sl/seed-1").join(f)).unwrap());
    }
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "preset = \"n2-paper\"\n[cro]\nrho = 3.0\n").unwrap();
    let out = bin().arg("run").arg("--config").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho"));

    let out = bin().args(["evaluate", "--preset", "n2-paper", "--design"]).arg(dir.path().join("missing.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}
