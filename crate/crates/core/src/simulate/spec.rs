use std::collections::HashMap;
use std::fmt::Write as _;

use crate::joint::{state_space, JointTable, TableVar};

use super::SimulateError;

/// Default bound on the enumerated state space of [`FullLawSpec::exact_joint`].
pub const DEFAULT_JOINT_LIMIT: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecRole {
    Substantive,
    Observed,
    /// Missingness indicator of the named substantive variable.
    Indicator(String),
    /// Latent variable summed out of every exported table.
    Hidden,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecVar {
    pub name: String,
    pub role: SpecRole,
    pub categories: Vec<String>,
    /// Indices of earlier variables.
    pub parents: Vec<usize>,
    /// One distribution per parent configuration, last parent fastest.
    pub cpt: Vec<Vec<f64>>,
}

impl SpecVar {
    pub fn card(&self) -> usize {
        self.categories.len()
    }
}

/// A full law given as a product of conditional probability tables over a
/// topologically ordered variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct FullLawSpec {
    vars: Vec<SpecVar>,
}

const ROW_TOL: f64 = 1e-12;

fn binary() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

impl FullLawSpec {
    /// Validates ordering, table shapes and row sums.
    pub fn new(vars: Vec<SpecVar>) -> Result<Self, SimulateError> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        for (i, v) in vars.iter().enumerate() {
            if seen.insert(v.name.as_str(), i).is_some() {
                return Err(SimulateError::Spec(format!("variable `{}` declared twice", v.name)));
            }
            if v.categories.is_empty() {
                return Err(SimulateError::Spec(format!("variable `{}` has no categories", v.name)));
            }
            if matches!(v.role, SpecRole::Indicator(_)) && v.categories != binary() {
                return Err(SimulateError::Spec(format!("indicator `{}` must have categories 0,1", v.name)));
            }
            if let Some(&p) = v.parents.iter().find(|&&p| p >= i) {
                return Err(SimulateError::Spec(format!(
                    "parent #{p} of `{}` is not declared before it",
                    v.name
                )));
            }
            let configs: usize = v.parents.iter().map(|&p| vars[p].card()).product();
            if v.cpt.len() != configs {
                return Err(SimulateError::Spec(format!(
                    "`{}` has {} table rows, expected {configs}",
                    v.name,
                    v.cpt.len()
                )));
            }
            for (r, row) in v.cpt.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if row.len() != v.card()
                    || row.iter().any(|p| !(p.is_finite() && *p >= 0.0))
                    || (sum - 1.0).abs() > ROW_TOL
                {
                    return Err(SimulateError::Spec(format!("`{}` table row {r} is not a distribution", v.name)));
                }
            }
        }
        for v in &vars {
            if let SpecRole::Indicator(of) = &v.role {
                match seen.get(of.as_str()).map(|&i| &vars[i].role) {
                    Some(SpecRole::Substantive) => {}
                    _ => return Err(SimulateError::Spec(format!("`{}` indicates unknown variable `{of}`", v.name))),
                }
            }
        }
        for v in vars.iter().filter(|v| v.role == SpecRole::Substantive) {
            let n = vars.iter().filter(|w| w.role == SpecRole::Indicator(v.name.clone())).count();
            if n != 1 {
                return Err(SimulateError::Spec(format!("`{}` has {n} indicators, expected 1", v.name)));
            }
        }
        Ok(FullLawSpec { vars })
    }

    pub fn vars(&self) -> &[SpecVar] {
        &self.vars
    }

    pub fn var(&self, name: &str) -> Option<&SpecVar> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    /// Non-hidden variables in declaration order.
    pub fn visible(&self) -> impl Iterator<Item = &SpecVar> {
        self.vars.iter().filter(|v| v.role != SpecRole::Hidden)
    }

    /// Row of the CPT of variable `v` for a full assignment.
    pub fn cpt_row(&self, v: usize, assignment: &[u16]) -> &[f64] {
        let var = &self.vars[v];
        let idx = var
            .parents
            .iter()
            .fold(0usize, |acc, &p| acc * self.vars[p].card() + assignment[p] as usize);
        &var.cpt[idx]
    }

    /// `p(v = category | parents)` where `parent_values` are category labels.
    pub fn conditional(&self, name: &str, parent_values: &[&str], category: &str) -> Option<f64> {
        let var = self.var(name)?;
        if parent_values.len() != var.parents.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&p, val) in var.parents.iter().zip(parent_values) {
            let pv = &self.vars[p];
            idx = idx * pv.card() + pv.categories.iter().position(|c| c == val)?;
        }
        let c = var.categories.iter().position(|c| c == category)?;
        Some(var.cpt[idx][c])
    }

    /// Dense joint over the non-hidden variables, hidden ones summed out.
    pub fn exact_joint(&self, limit: usize) -> Result<JointTable, SimulateError> {
        state_space(self.vars.iter().map(SpecVar::card), limit).map_err(|e| SimulateError::TooLarge(e.to_string()))?;
        let visible: Vec<usize> = (0..self.vars.len()).filter(|&i| self.vars[i].role != SpecRole::Hidden).collect();
        let out_vars: Vec<TableVar> = visible
            .iter()
            .map(|&i| TableVar::new(self.vars[i].name.clone(), self.vars[i].categories.clone()))
            .collect();
        let size: usize = out_vars.iter().map(TableVar::card).product();
        let mut probs = vec![0.0; size];
        let n = self.vars.len();
        let mut a = vec![0u16; n];
        // depth-first product, pruning zero-probability branches
        fn rec(spec: &FullLawSpec, v: usize, p: f64, a: &mut Vec<u16>, visible: &[usize], probs: &mut [f64]) {
            if v == spec.vars.len() {
                let idx = visible
                    .iter()
                    .fold(0usize, |acc, &i| acc * spec.vars[i].card() + a[i] as usize);
                probs[idx] += p;
                return;
            }
            let row = spec.cpt_row(v, a).to_vec();
            for (x, q) in row.into_iter().enumerate() {
                if q == 0.0 {
                    continue;
                }
                a[v] = x as u16;
                rec(spec, v + 1, p * q, a, visible, probs);
            }
            a[v] = 0;
        }
        rec(self, 0, 1.0, &mut a, &visible, &mut probs);
        JointTable::unnormalized(out_vars, probs).map_err(|e| SimulateError::Spec(e.to_string()))
    }

    /// Exact joint of the named variables, in the given order. Only their
    /// ancestors are enumerated, so margins of wide laws stay cheap.
    pub fn margin_joint(&self, names: &[&str], limit: usize) -> Result<JointTable, SimulateError> {
        let mut targets = Vec::with_capacity(names.len());
        for name in names {
            let p = self
                .position(name)
                .ok_or_else(|| SimulateError::Spec(format!("unknown variable `{name}`")))?;
            if targets.contains(&p) {
                return Err(SimulateError::Spec(format!("variable `{name}` listed twice")));
            }
            targets.push(p);
        }
        let mut needed = vec![false; self.vars.len()];
        let mut stack = targets.clone();
        while let Some(v) = stack.pop() {
            if !needed[v] {
                needed[v] = true;
                stack.extend(&self.vars[v].parents);
            }
        }
        let order: Vec<usize> = (0..self.vars.len()).filter(|&v| needed[v]).collect();
        state_space(order.iter().map(|&v| self.vars[v].card()), limit)
            .map_err(|e| SimulateError::TooLarge(e.to_string()))?;
        let out_vars: Vec<TableVar> = targets
            .iter()
            .map(|&i| TableVar::new(self.vars[i].name.clone(), self.vars[i].categories.clone()))
            .collect();
        let mut probs = vec![0.0; out_vars.iter().map(TableVar::card).product()];
        let mut a = vec![0u16; self.vars.len()];
        fn rec(spec: &FullLawSpec, d: usize, p: f64, order: &[usize], a: &mut [u16], targets: &[usize], probs: &mut [f64]) {
            let Some(&v) = order.get(d) else {
                let idx = targets.iter().fold(0usize, |acc, &i| acc * spec.vars[i].card() + a[i] as usize);
                probs[idx] += p;
                return;
            };
            let row = spec.cpt_row(v, a).to_vec();
            for (x, q) in row.into_iter().enumerate() {
                if q != 0.0 {
                    a[v] = x as u16;
                    rec(spec, d + 1, p * q, order, a, targets, probs);
                }
            }
            a[v] = 0;
        }
        rec(self, 0, 1.0, &order, &mut a, &targets, &mut probs);
        JointTable::unnormalized(out_vars, probs).map_err(|e| SimulateError::Spec(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vars {
            match &v.role {
                SpecRole::Substantive => writeln!(out, "var {} : {}", v.name, v.categories.join(",")),
                SpecRole::Observed => writeln!(out, "observed {} : {}", v.name, v.categories.join(",")),
                SpecRole::Hidden => writeln!(out, "hidden {} : {}", v.name, v.categories.join(",")),
                SpecRole::Indicator(of) => writeln!(out, "indicator {} for {}", v.name, of),
            }
            .expect("write to string");
            if !v.parents.is_empty() {
                let names: Vec<&str> = v.parents.iter().map(|&p| self.vars[p].name.as_str()).collect();
                writeln!(out, "parents: {}", names.join(" ")).expect("write to string");
            }
            let pcards: Vec<usize> = v.parents.iter().map(|&p| self.vars[p].card()).collect();
            for (r, row) in v.cpt.iter().enumerate() {
                let mut rem = r;
                let mut ctx = vec![""; pcards.len()];
                for (slot, (&c, &p)) in ctx.iter_mut().zip(pcards.iter().zip(&v.parents)).rev() {
                    *slot = self.vars[p].categories[rem % c].as_str();
                    rem /= c;
                }
                let probs: Vec<String> = row[..row.len() - 1].iter().map(|p| format!("{p}")).collect();
                let lhs = if ctx.is_empty() { "ctx".to_string() } else { format!("ctx {}", ctx.join(" ")) };
                writeln!(out, "{lhs} -> {}", probs.join(" ")).expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the sectioned text format produced by [`FullLawSpec::to_text`].
    pub fn parse(text: &str) -> Result<FullLawSpec, SimulateError> {
        struct Pending {
            var: SpecVar,
            rows: HashMap<usize, Vec<f64>>,
        }
        let mut vars: Vec<SpecVar> = Vec::new();
        let mut cur: Option<Pending> = None;

        let err = |line: usize, msg: String| SimulateError::Syntax { line, msg };
        let finish = |p: Pending, vars: &[SpecVar]| -> Result<SpecVar, String> {
            let configs: usize = p.var.parents.iter().map(|&q| vars[q].card()).product();
            let mut var = p.var;
            let mut rows = p.rows;
            var.cpt = (0..configs)
                .map(|r| rows.remove(&r).ok_or_else(|| format!("`{}` lacks table row {r}", var.name)))
                .collect::<Result<_, _>>()?;
            Ok(var)
        };

        for (ln, raw) in text.lines().enumerate() {
            let line_no = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let decl = |role: SpecRole| -> Result<SpecVar, SimulateError> {
                let (name, cats) = rest
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "expected `name : categories`".into()))?;
                let categories: Vec<String> = cats.split(',').map(|c| c.trim().to_string()).collect();
                if name.trim().is_empty() || categories.iter().any(String::is_empty) {
                    return Err(err(line_no, "empty name or category".into()));
                }
                Ok(SpecVar { name: name.trim().to_string(), role, categories, parents: vec![], cpt: vec![] })
            };
            let new_var = match head {
                "var" => Some(decl(SpecRole::Substantive)?),
                "observed" => Some(decl(SpecRole::Observed)?),
                "hidden" => Some(decl(SpecRole::Hidden)?),
                "indicator" => {
                    let w: Vec<&str> = rest.split_whitespace().collect();
                    if w.len() != 3 || w[1] != "for" {
                        return Err(err(line_no, "expected `indicator R for X`".into()));
                    }
                    Some(SpecVar {
                        name: w[0].to_string(),
                        role: SpecRole::Indicator(w[2].to_string()),
                        categories: binary(),
                        parents: vec![],
                        cpt: vec![],
                    })
                }
                _ => None,
            };
            if let Some(var) = new_var {
                if let Some(p) = cur.take() {
                    vars.push(finish(p, &vars).map_err(|m| err(line_no, m))?);
                }
                cur = Some(Pending { var, rows: HashMap::new() });
                continue;
            }
            let pending = cur.as_mut().ok_or_else(|| err(line_no, "expected a variable declaration".into()))?;
            if head == "parents:" || line.starts_with("parents:") {
                let list = line.trim_start_matches("parents:");
                if !pending.rows.is_empty() || !pending.var.parents.is_empty() {
                    return Err(err(line_no, "`parents:` must precede table rows and appear once".into()));
                }
                for name in list.split_whitespace() {
                    let p = vars
                        .iter()
                        .position(|v| v.name == name)
                        .ok_or_else(|| err(line_no, format!("parent `{name}` not declared earlier")))?;
                    pending.var.parents.push(p);
                }
            } else if head == "ctx" {
                let (ctx, probs) = line["ctx".len()..]
                    .split_once("->")
                    .ok_or_else(|| err(line_no, "expected `ctx ... -> p`".into()))?;
                let ctx: Vec<&str> = ctx.split_whitespace().collect();
                if ctx.len() != pending.var.parents.len() {
                    return Err(err(line_no, format!("context has {} values, expected {}", ctx.len(), pending.var.parents.len())));
                }
                let mut idx = 0usize;
                for (val, &p) in ctx.iter().zip(&pending.var.parents) {
                    let pv = &vars[p];
                    let c = pv
                        .categories
                        .iter()
                        .position(|c| c == val)
                        .ok_or_else(|| err(line_no, format!("`{val}` is not a category of `{}`", pv.name)))?;
                    idx = idx * pv.card() + c;
                }
                let given: Vec<f64> = probs
                    .split_whitespace()
                    .map(|s| s.parse::<f64>().map_err(|_| err(line_no, format!("bad probability `{s}`"))))
                    .collect::<Result<_, _>>()?;
                let card = pending.var.card();
                if given.len() != card - 1 {
                    return Err(err(line_no, format!("expected {} probabilities, got {}", card - 1, given.len())));
                }
                let sum: f64 = given.iter().sum();
                if given.iter().any(|p| !(0.0..=1.0).contains(p)) || sum > 1.0 + ROW_TOL {
                    return Err(err(line_no, "probabilities out of range".into()));
                }
                let mut row = given;
                row.push((1.0 - sum).max(0.0));
                if pending.var.card() == 1 {
                    row = vec![1.0];
                }
                if pending.rows.insert(idx, row).is_some() {
                    return Err(err(line_no, "duplicate context".into()));
                }
            } else {
                return Err(err(line_no, format!("unknown directive `{head}`")));
            }
        }
        if let Some(p) = cur.take() {
            let n = text.lines().count();
            vars.push(finish(p, &vars).map_err(|m| err(n, m))?);
        }
        FullLawSpec::new(vars)
    }
}
