//! Generates the signal-holder family and sweeps the engines over the
//! counter maximum, printing CSV.

use hsc::bench::{generate_benchmark, sweep, time_trend_violations, write_csv, BenchmarkParams, SweepConfig};
use hsc::checkers::{CheckOptions, Engine};
use hsc::run::Abstraction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = BenchmarkParams {
        parallel_regions: 2,
        ..BenchmarkParams::default()
    };
    let b = generate_benchmark(base)?;
    println!("{}\nreachable spec:\n{}", b.model, b.reachable_spec);

    let mut options = CheckOptions::default();
    options.limits.timeout = std::time::Duration::from_secs(30);
    let rows = sweep(&SweepConfig {
        base,
        counter_max: vec![1, 2, 3],
        engines: Engine::ALL.to_vec(),
        abstractions: vec![Abstraction::Stt, Abstraction::Gen],
        reachable: false,
        options,
        jobs: 4,
    });
    write_csv(&rows, std::io::stdout())?;
    for w in time_trend_violations(&rows) {
        eprintln!("note: {w}");
    }
    Ok(())
}
