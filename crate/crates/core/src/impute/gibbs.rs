use rand::Rng;

use crate::simulate::draw;

use super::{GibbsFactor, ImputeError};

/// Completes one row by systematic-scan Gibbs sampling. Missing cells start
/// from a draw of each factor's initial distribution, then `burn_in` sweeps
/// update them in ascending index order; the final state is returned.
pub fn gibbs_impute_row<R: Rng>(
    row: &[Option<u16>],
    factors: &[GibbsFactor],
    burn_in: usize,
    rng: &mut R,
) -> Result<Vec<u16>, ImputeError> {
    let mut missing: Vec<(usize, &GibbsFactor)> = Vec::new();
    for (c, cell) in row.iter().enumerate() {
        if cell.is_none() {
            let f = factors
                .iter()
                .find(|f| f.target == c)
                .ok_or(ImputeError::MissingFactor { index: c + 1 })?;
            missing.push((c, f));
        }
    }
    let mut state: Vec<u16> = row.iter().map(|c| c.unwrap_or(0)).collect();
    if missing.is_empty() {
        return Ok(state);
    }
    for &(c, f) in &missing {
        state[c] = draw(rng, &f.initial) as u16;
    }
    let max_card = missing.iter().map(|(_, f)| f.initial.len()).max().unwrap_or(1);
    let mut buf = vec![0.0; max_card];
    for _ in 0..burn_in {
        for &(c, f) in &missing {
            let out = &mut buf[..f.initial.len()];
            f.model.probabilities(&state, out);
            state[c] = draw(rng, out) as u16;
        }
    }
    Ok(state)
}
