//! Small benchmark over the bundled laws; pass a sample size to scale it.

use mispr::evaluate::{run_benchmark, summary_table, write_report, BenchmarkConfig};
use mispr::simulate::{Fixture, F_DGP_SEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5_000);
    let config = BenchmarkConfig { n, burn_in: 100, ..BenchmarkConfig::default() };
    let reports: Vec<_> = Fixture::ALL
        .into_iter()
        .filter(|&f| f != Fixture::FPlus)
        .map(|f| run_benchmark(f.name(), &f.spec(F_DGP_SEED), &f.graph(), &config))
        .collect();
    write_report(std::io::stdout(), &reports, b',')?;
    eprint!("{}", summary_table(&reports));
    Ok(())
}
