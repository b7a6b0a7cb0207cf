use std::collections::HashMap;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct VarDef {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct ConDef {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization LP with named variables and constraints.
///
/// Names carry the dimension structure (`gen[ccgt,17]`), so a solution can
/// be extracted back into model terms without positional bookkeeping.
/// Insertion order is the canonical ordering everywhere (MPS output,
/// standard form, solution vectors).
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub name: String,
    pub(crate) vars: Vec<VarDef>,
    pub(crate) cons: Vec<ConDef>,
    var_index: HashMap<String, usize>,
}

impl LpProblem {
    pub fn new(name: impl Into<String>) -> Self {
        LpProblem {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> Result<VarId> {
        let name = name.into();
        if lb > ub {
            return Err(Error::Input(format!("variable {name}: lb {lb} > ub {ub}")));
        }
        if !obj.is_finite() || lb.is_nan() || ub.is_nan() {
            return Err(Error::Input(format!("variable {name}: non-finite data")));
        }
        if self.var_index.contains_key(&name) {
            return Err(Error::Input(format!("duplicate variable name {name}")));
        }
        let id = self.vars.len();
        self.var_index.insert(name.clone(), id);
        self.vars.push(VarDef { name, lb, ub, obj });
        Ok(VarId(id))
    }

    pub fn add_con(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConstraintId> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(Error::Input(format!("constraint {name}: non-finite rhs")));
        }
        let mut collapsed: HashMap<usize, f64> = HashMap::new();
        for (VarId(v), coef) in terms {
            if v >= self.vars.len() {
                return Err(Error::Input(format!(
                    "constraint {name}: references undeclared variable {v}"
                )));
            }
            if !coef.is_finite() {
                return Err(Error::Input(format!("constraint {name}: non-finite coefficient")));
            }
            *collapsed.entry(v).or_insert(0.0) += coef;
        }
        let mut terms: Vec<(usize, f64)> = collapsed
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .collect();
        terms.sort_unstable_by_key(|(v, _)| *v);
        let id = self.cons.len();
        self.cons.push(ConDef { name, terms, sense, rhs });
        Ok(ConstraintId(id))
    }

    /// Add to an existing constraint's coefficient on `var` (used when a
    /// BEV block or interconnection joins an energy balance built earlier).
    pub fn add_term(&mut self, con: ConstraintId, var: VarId, coef: f64) -> Result<()> {
        let c = self
            .cons
            .get_mut(con.0)
            .ok_or_else(|| Error::Internal(format!("unknown constraint id {}", con.0)))?;
        if var.0 >= self.vars.len() {
            return Err(Error::Internal("term references undeclared variable".into()));
        }
        match c.terms.binary_search_by_key(&var.0, |(v, _)| *v) {
            Ok(pos) => c.terms[pos].1 += coef,
            Err(pos) => c.terms.insert(pos, (var.0, coef)),
        }
        Ok(())
    }

    /// Replace an existing constraint's right-hand side (used when an
    /// exogenous demand is attached to balances built earlier).
    pub fn set_rhs(&mut self, con: ConstraintId, rhs: f64) -> Result<()> {
        if !rhs.is_finite() {
            return Err(Error::Input("non-finite rhs".into()));
        }
        let c = self
            .cons
            .get_mut(con.0)
            .ok_or_else(|| Error::Internal(format!("unknown constraint id {}", con.0)))?;
        c.rhs = rhs;
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_cons(&self) -> usize {
        self.cons.len()
    }

    pub fn nnz(&self) -> usize {
        self.cons.iter().map(|c| c.terms.len()).sum()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied().map(VarId)
    }

    pub fn var_name(&self, id: VarId) -> &str {
        &self.vars[id.0].name
    }

    pub fn var_bounds(&self, id: VarId) -> (f64, f64) {
        (self.vars[id.0].lb, self.vars[id.0].ub)
    }

    pub fn obj_coef(&self, id: VarId) -> f64 {
        self.vars[id.0].obj
    }

    pub fn var_names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|v| v.name.as_str())
    }

    /// Objective value of an assignment in insertion order.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, xi)| v.obj * xi).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_indexes() {
        let mut p = LpProblem::new("toy");
        let x = p.add_var("x", 0.0, f64::INFINITY, -1.0).unwrap();
        let y = p.add_var("y", 0.0, 2.0, -1.0).unwrap();
        p.add_con("c1", vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0).unwrap();
        assert_eq!(p.var_id("y"), Some(y));
        assert_eq!(p.n_cons(), 1);
        assert_eq!(p.nnz(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        let mut p = LpProblem::new("bad");
        assert!(p.add_var("x", 1.0, 0.0, 0.0).is_err());
        let x = p.add_var("x", 0.0, 1.0, 0.0).unwrap();
        assert!(p.add_var("x", 0.0, 1.0, 0.0).is_err());
        assert!(p
            .add_con("c", vec![(x, f64::NAN)], Sense::Eq, 0.0)
            .is_err());
        assert!(p
            .add_con("c", vec![(VarId(5), 1.0)], Sense::Eq, 0.0)
            .is_err());
    }

    #[test]
    fn duplicate_terms_collapse() {
        let mut p = LpProblem::new("dup");
        let x = p.add_var("x", 0.0, 1.0, 0.0).unwrap();
        p.add_con("c", vec![(x, 1.0), (x, 2.0)], Sense::Eq, 0.0).unwrap();
        assert_eq!(p.cons[0].terms, vec![(0, 3.0)]);
    }
}
