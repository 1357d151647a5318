use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorSpec {
    pub name: String,
    pub reference: String,
}

impl FactorSpec {
    pub fn new(name: &str, reference: &str) -> Self {
        FactorSpec {
            name: name.into(),
            reference: reference.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignSpec {
    pub outcome: String,
    pub factors: Vec<FactorSpec>,
}

/// Categorical predictors and binary outcomes, column-oriented.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    n: usize,
    factors: BTreeMap<String, Vec<String>>,
    outcomes: BTreeMap<String, Vec<bool>>,
}

impl Dataset {
    pub fn new(n: usize) -> Self {
        Dataset {
            n,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_factor(&mut self, name: &str, values: Vec<String>) -> Result<()> {
        if values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "factor `{name}` has {} values for {} observations",
                values.len(),
                self.n
            )));
        }
        self.factors.insert(name.to_string(), values);
        Ok(())
    }

    pub fn add_outcome(&mut self, name: &str, values: Vec<bool>) -> Result<()> {
        if values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "outcome `{name}` has {} values for {} observations",
                values.len(),
                self.n
            )));
        }
        self.outcomes.insert(name.to_string(), values);
        Ok(())
    }

    pub fn factor(&self, name: &str) -> Result<&[String]> {
        self.factors
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidInput(format!("unknown factor `{name}`")))
    }

    pub fn outcome(&self, name: &str) -> Result<&[bool]> {
        self.outcomes
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidInput(format!("unknown outcome `{name}`")))
    }

    /// Rows `indices` (with repetition) as a new dataset.
    pub fn resample(&self, indices: &[usize]) -> Dataset {
        Dataset {
            n: indices.len(),
            factors: self
                .factors
                .iter()
                .map(|(k, v)| (k.clone(), indices.iter().map(|&i| v[i].clone()).collect()))
                .collect(),
            outcomes: self
                .outcomes
                .iter()
                .map(|(k, v)| (k.clone(), indices.iter().map(|&i| v[i]).collect()))
                .collect(),
        }
    }
}

/// Column layout of a dummy-coded design: intercept first, then the
/// non-reference levels of each factor in spec order, levels sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignLayout {
    pub factors: Vec<(FactorSpec, Vec<String>)>,
}

impl DesignLayout {
    /// Derives levels from the data; every declared reference must occur.
    pub fn from_data(data: &Dataset, factors: &[FactorSpec]) -> Result<Self> {
        let mut out = Vec::new();
        for f in factors {
            let levels: BTreeSet<&String> = data.factor(&f.name)?.iter().collect();
            if !levels.contains(&f.reference) {
                return Err(Error::InvalidInput(format!(
                    "reference level `{}` of factor `{}` has no observations",
                    f.reference, f.name
                )));
            }
            let others = levels
                .into_iter()
                .filter(|l| **l != f.reference)
                .cloned()
                .collect();
            out.push((f.clone(), others));
        }
        Ok(DesignLayout { factors: out })
    }

    pub fn n_columns(&self) -> usize {
        1 + self.factors.iter().map(|(_, l)| l.len()).sum::<usize>()
    }

    /// `(factor, level)` per column; the intercept is `("(intercept)", "")`.
    pub fn column_names(&self) -> Vec<(String, String)> {
        let mut names = vec![("(intercept)".to_string(), String::new())];
        for (f, levels) in &self.factors {
            for l in levels {
                names.push((f.name.clone(), l.clone()));
            }
        }
        names
    }

    /// Column indices of a factor's dummies, with their levels.
    pub fn columns_of(&self, factor: &str) -> Option<Vec<(usize, &str)>> {
        let mut col = 1;
        for (f, levels) in &self.factors {
            if f.name == factor {
                return Some(levels.iter().enumerate().map(|(i, l)| (col + i, l.as_str())).collect());
            }
            col += levels.len();
        }
        None
    }

    /// Dummy-coded design matrix. Levels unseen when the layout was built are
    /// an error.
    pub fn matrix(&self, data: &Dataset) -> Result<DMatrix<f64>> {
        let n = data.len();
        let mut x = DMatrix::zeros(n, self.n_columns());
        for i in 0..n {
            x[(i, 0)] = 1.0;
        }
        let mut col = 1;
        for (f, levels) in &self.factors {
            let values = data.factor(&f.name)?;
            for (i, v) in values.iter().enumerate() {
                if *v == f.reference {
                    continue;
                }
                match levels.iter().position(|l| l == v) {
                    Some(j) => x[(i, col + j)] = 1.0,
                    None => {
                        return Err(Error::InvalidInput(format!(
                            "level `{v}` of factor `{}` is not in the design",
                            f.name
                        )))
                    }
                }
            }
            col += levels.len();
        }
        Ok(x)
    }
}
