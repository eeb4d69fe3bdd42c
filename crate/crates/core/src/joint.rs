//! Dense joint probability tables over categorical variables.

use thiserror::Error;

/// Normalization tolerance accepted by [`JointTable::new`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JointError {
    #[error("table has {actual} entries, variables require {expected}")]
    Shape { expected: usize, actual: usize },
    #[error("negative or non-finite probability {value} at entry {index}")]
    Invalid { index: usize, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` listed twice")]
    DuplicateVariable(String),
    #[error("tables are over different variables: [{0}] vs [{1}]")]
    Mismatch(String, String),
    #[error("state space of {0} entries exceeds limit {1}")]
    TooLarge(u128, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableVar {
    pub name: String,
    pub categories: Vec<String>,
}

impl TableVar {
    pub fn new(name: impl Into<String>, categories: Vec<String>) -> Self {
        TableVar { name: name.into(), categories }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        TableVar::new(name, vec!["0".into(), "1".into()])
    }

    pub fn card(&self) -> usize {
        self.categories.len()
    }
}

/// Row-major table, last variable varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<TableVar>,
    probs: Vec<f64>,
}

/// Number of cells for the given cardinalities, or an error above `limit`.
pub fn state_space(cards: impl IntoIterator<Item = usize>, limit: usize) -> Result<usize, JointError> {
    let mut total: u128 = 1;
    for c in cards {
        total = total.saturating_mul(c as u128);
        if total > limit as u128 {
            return Err(JointError::TooLarge(total, limit));
        }
    }
    Ok(total as usize)
}

impl JointTable {
    pub fn new(vars: Vec<TableVar>, probs: Vec<f64>) -> Result<Self, JointError> {
        let t = Self::unnormalized(vars, probs)?;
        let total: f64 = t.probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(JointError::NotNormalized(total));
        }
        Ok(t)
    }

    /// Same checks as [`JointTable::new`] except normalization.
    pub fn unnormalized(vars: Vec<TableVar>, probs: Vec<f64>) -> Result<Self, JointError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(JointError::DuplicateVariable(v.name.clone()));
            }
        }
        let expected: usize = vars.iter().map(TableVar::card).product();
        if probs.len() != expected {
            return Err(JointError::Shape { expected, actual: probs.len() });
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(JointError::Invalid { index, value });
        }
        Ok(JointTable { vars, probs })
    }

    /// Normalized empirical frequencies.
    pub fn from_counts(vars: Vec<TableVar>, counts: &[u64]) -> Result<Self, JointError> {
        let total: u64 = counts.iter().sum();
        let probs = counts.iter().map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 }).collect();
        Self::unnormalized(vars, probs)
    }

    pub fn vars(&self) -> &[TableVar] {
        &self.vars
    }

    pub fn names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn cards(&self) -> Vec<usize> {
        self.vars.iter().map(TableVar::card).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Flat index of a full assignment (category indices in variable order).
    pub fn index(&self, values: &[usize]) -> usize {
        debug_assert_eq!(values.len(), self.vars.len());
        values
            .iter()
            .zip(&self.vars)
            .fold(0, |acc, (&x, v)| acc * v.card() + x)
    }

    /// Inverse of [`JointTable::index`].
    pub fn assignment(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.vars.len()];
        for (slot, v) in out.iter_mut().zip(&self.vars).rev() {
            *slot = index % v.card();
            index /= v.card();
        }
        out
    }

    pub fn get(&self, values: &[usize]) -> f64 {
        self.probs[self.index(values)]
    }

    /// Marginal over `names`, in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<JointTable, JointError> {
        let mut pos = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(JointError::DuplicateVariable(n.to_string()));
            }
            pos.push(self.position(n).ok_or_else(|| JointError::UnknownVariable(n.to_string()))?);
        }
        let vars: Vec<TableVar> = pos.iter().map(|&p| self.vars[p].clone()).collect();
        let size: usize = vars.iter().map(TableVar::card).product();
        let mut probs = vec![0.0; size];
        let mut a = vec![0usize; self.vars.len()];
        for &p in &self.probs {
            let idx = pos.iter().zip(&vars).fold(0, |acc, (&q, v)| acc * v.card() + a[q]);
            probs[idx] += p;
            // odometer increment, last variable fastest
            for k in (0..a.len()).rev() {
                a[k] += 1;
                if a[k] < self.vars[k].card() {
                    break;
                }
                a[k] = 0;
            }
        }
        Ok(JointTable { vars, probs })
    }

    pub fn same_shape(&self, other: &JointTable) -> Result<(), JointError> {
        let shape = |t: &JointTable| {
            t.vars
                .iter()
                .map(|v| format!("{}:{}", v.name, v.card()))
                .collect::<Vec<_>>()
                .join(",")
        };
        if self.names() != other.names() || self.cards() != other.cards() {
            return Err(JointError::Mismatch(shape(self), shape(other)));
        }
        Ok(())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64, JointError> {
        self.same_shape(other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_three() -> JointTable {
        JointTable::new(
            vec![TableVar::binary("A"), TableVar::new("B", vec!["x".into(), "y".into(), "z".into()])],
            vec![0.1, 0.2, 0.1, 0.3, 0.2, 0.1],
        )
        .unwrap()
    }

    #[test]
    fn last_variable_fastest() {
        let t = two_by_three();
        assert_eq!(t.index(&[1, 0]), 3);
        assert_eq!(t.assignment(5), vec![1, 2]);
        assert_eq!(t.get(&[0, 1]), 0.2);
    }

    #[test]
    fn marginal_and_reorder() {
        let t = two_by_three();
        let a = t.marginal(&["A"]).unwrap();
        assert!((a.probs()[0] - 0.4).abs() < 1e-15);
        let ba = t.marginal(&["B", "A"]).unwrap();
        assert_eq!(ba.names(), ["B", "A"]);
        assert_eq!(ba.get(&[2, 1]), t.get(&[1, 2]));
        assert!(t.marginal(&["C"]).is_err());
        assert!(t.marginal(&["A", "A"]).is_err());
    }

    #[test]
    fn validation() {
        assert!(matches!(
            JointTable::new(vec![TableVar::binary("A")], vec![0.5, 0.6]),
            Err(JointError::NotNormalized(_))
        ));
        assert!(matches!(
            JointTable::new(vec![TableVar::binary("A")], vec![1.0]),
            Err(JointError::Shape { .. })
        ));
        assert!(matches!(
            JointTable::new(vec![TableVar::binary("A")], vec![1.5, -0.5]),
            Err(JointError::Invalid { .. })
        ));
        assert!(state_space([2; 30], 1 << 24).is_err());
        assert_eq!(state_space([2; 24], 1 << 24).unwrap(), 1 << 24);
    }
}
