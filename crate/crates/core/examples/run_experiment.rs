//! Drive the runner from a TOML string and write its artifacts.

use swssb::runner::{run, write_artifacts, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "depth_sweep"
L = [6]
p_z = 0.3
depth = [1, 2, 4, 8, 16, 32]
threads = 2

[tolerances]
check = 1e-9
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let report = run(&cfg)?;
    for v in &report.verdicts {
        println!("{} {}: {}", v.criterion, if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    let dir = std::env::temp_dir().join("swssb-example");
    for path in write_artifacts(&report, &dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
