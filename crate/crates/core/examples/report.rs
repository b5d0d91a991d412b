//! File-based run producing the versioned JSON report, then replays the
//! reported trace.

use hsc::checkers::Engine;
use hsc::model::Environment;
use hsc::run::{run, Abstraction, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("hsc-report-example");
    std::fs::create_dir_all(&dir)?;
    let model = dir.join("fig1.hsc");
    let spec = dir.join("b2c.spec");
    std::fs::write(&model, hsc::samples::FIG1_SOURCE)?;
    std::fs::write(&spec, "state B2c\n")?;

    let mut cfg = RunConfig::new(&model, &spec);
    cfg.engine = Engine::Bmc;
    cfg.abstraction = Abstraction::None;
    let report = run(&cfg)?;
    println!("{}", report.to_json());
    print!("{}", report.to_text());

    let sc = hsc::samples::fig1(Some((0, 7)));
    let path = report.path(&sc).expect("trace names resolve");
    println!("trace replays: {}", sc.replays(&path, Environment::Closed));
    println!("exit code would be {}", report.exit_code);
    Ok(())
}
