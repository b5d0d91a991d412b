use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::model::{ErrorSpec, Statechart};
use crate::parser::{parse_error_spec, parse_statechart};

/// Parameters of the signal-holder benchmark family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkParams {
    /// Saturation value of every counter; at least 1.
    pub counter_max: u32,
    /// Parallel regions inside `On`, 1 to 4.
    pub parallel_regions: usize,
    /// 2 or 3.
    pub hierarchy_depth: usize,
    pub seed: u64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        BenchmarkParams {
            counter_max: 2,
            parallel_regions: 3,
            hierarchy_depth: 3,
            seed: 0,
        }
    }
}

impl BenchmarkParams {
    pub fn with_counter_max(mut self, n: u32) -> Self {
        self.counter_max = n;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.counter_max < 1 {
            return Err("counter maximum must be at least 1".into());
        }
        if !(1..=4).contains(&self.parallel_regions) {
            return Err("parallel regions must be between 1 and 4".into());
        }
        if !(2..=3).contains(&self.hierarchy_depth) {
            return Err("hierarchy depth must be 2 or 3".into());
        }
        Ok(())
    }
}

/// Generated model text with one reachable and one unreachable error spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Benchmark {
    pub params: BenchmarkParams,
    pub model: String,
    pub reachable_spec: String,
    pub unreachable_spec: String,
}

impl Benchmark {
    pub fn statechart(&self) -> Statechart {
        parse_statechart(&self.model).expect("generated model parses")
    }

    pub fn specs(&self, sc: &Statechart) -> (ErrorSpec, ErrorSpec) {
        let p = |t: &str| parse_error_spec(t, sc).expect("generated spec parses");
        (p(&self.reachable_spec), p(&self.unreachable_spec))
    }

    pub fn file_stem(&self) -> String {
        let p = self.params;
        format!(
            "signals_n{}_r{}_d{}_s{}",
            p.counter_max, p.parallel_regions, p.hierarchy_depth, p.seed
        )
    }
}

/// Builds the family member for `p`: parallel signal holders, each with a
/// saturating counter bumped on activation and cleared once saturated, and
/// a pulse that raises the event of another holder.
pub fn generate_benchmark(p: BenchmarkParams) -> Result<Benchmark, String> {
    p.validate()?;
    let n = p.counter_max;
    let r = p.parallel_regions;
    // which holder each pulse notifies; a fixed rotation picked by the seed
    let shift = if r > 1 { 1 + (p.seed as usize) % (r - 1) } else { 0 };
    let mut m = String::new();
    let _ = writeln!(m, "// signal holders, counter maximum {n}, seed {}", p.seed);
    let _ = writeln!(m, "statechart Signals {{");
    for i in 0..r {
        let _ = writeln!(m, "    var c{i}: int[0..{n}] = 0;");
    }
    let _ = writeln!(m, "    var alarm: bool = false;");
    let events: Vec<String> = (0..r).map(|i| format!("sig{i}")).collect();
    let _ = writeln!(m, "    event {};", events.join(", "));
    let _ = writeln!(m, "    region main {{");
    let _ = writeln!(m, "        initial state Off;");
    let _ = writeln!(m, "        state On {{");
    for i in 0..r {
        let _ = writeln!(m, "            region H{i} {{");
        let _ = writeln!(m, "                initial state Idle{i};");
        if p.hierarchy_depth == 3 {
            let _ = writeln!(m, "                state Busy{i} {{");
            let _ = writeln!(m, "                    region P{i} {{");
            let _ = writeln!(m, "                        initial state Low{i};");
            let _ = writeln!(m, "                        state High{i};");
            let _ = writeln!(m, "                    }}");
            let _ = writeln!(m, "                }}");
        } else {
            let _ = writeln!(m, "                state Busy{i};");
        }
        let _ = writeln!(m, "            }}");
    }
    let _ = writeln!(m, "        }}");
    let _ = writeln!(m, "    }}");
    let _ = writeln!(m, "    transition Off -> On;");
    let _ = writeln!(m, "    transition Off -> Off when !alarm do alarm := true;");
    let _ = writeln!(m, "    transition On -> Off when alarm && c0 == {n};");
    for i in 0..r {
        let j = (i + shift) % r;
        let _ = writeln!(m, "    transition Idle{i} -> Busy{i} when c{i} < {n} do c{i} := c{i} + 1;");
        let _ = writeln!(m, "    transition Idle{i} -> Idle{i} when c{i} >= {n} do c{i} := 0;");
        if p.hierarchy_depth == 3 {
            let _ = writeln!(m, "    transition Low{i} -> High{i} do raise sig{j};");
            let _ = writeln!(m, "    transition High{i} -> Low{i} on sig{i};");
            let _ = writeln!(m, "    transition Busy{i} -> Idle{i} on sig{i};");
        } else {
            let _ = writeln!(m, "    transition Busy{i} -> Idle{i} do raise sig{j};");
        }
    }
    let _ = writeln!(m, "}}");

    let mut reach = String::from("state On\n");
    for i in 0..r {
        let _ = writeln!(reach, "var c{i} == {n}");
    }
    let deep = if p.hierarchy_depth == 3 { "High0" } else { "Busy0" };
    let unreach = format!("state {deep}\nvar c0 == 0\n");
    Ok(Benchmark {
        params: p,
        model: m,
        reachable_spec: reach,
        unreachable_spec: unreach,
    })
}
