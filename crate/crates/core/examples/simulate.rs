//! Sample a bundled law and compare the sample with its exact joint.

use mispr::evaluate::{distance, Norm};
use mispr::joint::JointTable;
use mispr::simulate::{sample_dataset, sample_full, Fixture, DEFAULT_JOINT_LIMIT, F_DGP_SEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f: Fixture = std::env::args().nth(1).as_deref().unwrap_or("b+").parse()?;
    let (spec, g) = (f.spec(F_DGP_SEED), f.graph());

    let data = sample_dataset(&spec, &g, 10_000, 1)?;
    println!("fixture {f}: {} rows, {} missing cells", data.n_rows(), data.missing_count());
    for (r, count) in mispr::impute::pattern_counts(&data) {
        println!("  pattern {r}: {count}");
    }

    if let Ok(exact) = spec.exact_joint(DEFAULT_JOINT_LIMIT) {
        let cols: Vec<usize> = exact.names().iter().map(|n| spec.position(n).unwrap()).collect();
        let mut counts = vec![0u64; exact.len()];
        for row in sample_full(&spec, 200_000, 2) {
            let a: Vec<usize> = cols.iter().map(|&c| row[c] as usize).collect();
            counts[exact.index(&a)] += 1;
        }
        let emp = JointTable::from_counts(exact.vars().to_vec(), &counts)?;
        println!("full law, n = 2e5: Linf {:.4}", distance(&emp, &exact, Norm::Linf)?);
    }

    let mut out = Vec::new();
    sample_dataset(&spec, &g, 5, 3)?.write_csv(&mut out, &Default::default())?;
    print!("{}", String::from_utf8(out)?);
    Ok(())
}
