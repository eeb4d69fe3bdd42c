//! Impute a sample from a law with structural zeros and compare the
//! pooled estimate with the complete-case one.

use mispr::evaluate::{distance, estimate_target_law, true_target_law, Norm};
use mispr::impute::{mispr, DataTable, MisprConfig};
use mispr::simulate::{sample_dataset, Fixture, F_DGP_SEED};

fn complete_cases(data: &DataTable) -> Result<DataTable, Box<dyn std::error::Error>> {
    let mut t = DataTable::new(data.schema().clone());
    for n in (0..data.n_rows()).filter(|&n| data.pattern(n).is_complete()) {
        t.push_row(data.row(n))?;
    }
    Ok(t)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Fixture::CPlus;
    let (spec, g) = (f.spec(F_DGP_SEED), f.graph());
    let data = sample_dataset(&spec, &g, 20_000, 5)?;
    let truth = true_target_law(&spec, &g)?;

    let config = MisprConfig { m: 5, burn_in: 200, seed: 8, ..MisprConfig::default() };
    let out = mispr(&g, &data, &config)?;
    println!("{} with {} patterns", out.method, out.dag.nodes().len());
    print!("{}", out.dag.to_text());

    let est = estimate_target_law(&out.tables)?;
    let cc = estimate_target_law(&[complete_cases(&data)?])?;
    println!("L2 imputed       {:.4}", distance(&est, &truth, Norm::L2)?);
    println!("L2 complete-case {:.4}", distance(&cc, &truth, Norm::L2)?);
    Ok(())
}
