//! Finite classical deterministic functions as truth tables.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A total function `(u, v) → output` on finite index domains, with an
/// optional second table for a protocol that hands Bob a different function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalFunction {
    u_size: usize,
    v_size: usize,
    out_size: usize,
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bob_table: Option<Vec<Vec<usize>>>,
}

impl ClassicalFunction {
    pub fn new(table: Vec<Vec<usize>>, out_size: usize) -> Result<Self> {
        let u_size = table.len();
        if u_size == 0 {
            return Err(Error::InvalidDistribution("empty u domain".into()));
        }
        let v_size = table[0].len();
        if v_size == 0 {
            return Err(Error::InvalidDistribution("empty v domain".into()));
        }
        for row in &table {
            if row.len() != v_size {
                return Err(Error::DimensionMismatch("ragged truth table".into()));
            }
            for &val in row {
                if val >= out_size {
                    return Err(Error::DimensionMismatch(format!(
                        "table value {val} outside output alphabet of size {out_size}"
                    )));
                }
            }
        }
        Ok(ClassicalFunction {
            u_size,
            v_size,
            out_size,
            table,
            bob_table: None,
        })
    }

    /// Attaches a distinct output table for Bob (`g ≠ f`); the data model
    /// permits it although the bundled fixtures all use `g = f`.
    pub fn with_bob_table(mut self, table: Vec<Vec<usize>>) -> Result<Self> {
        if table.len() != self.u_size || table.iter().any(|r| r.len() != self.v_size) {
            return Err(Error::DimensionMismatch(
                "bob table shape differs from alice table".into(),
            ));
        }
        for row in &table {
            for &val in row {
                if val >= self.out_size {
                    return Err(Error::DimensionMismatch(format!(
                        "bob table value {val} outside output alphabet"
                    )));
                }
            }
        }
        self.bob_table = Some(table);
        Ok(self)
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn v_size(&self) -> usize {
        self.v_size
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn eval(&self, u: usize, v: usize) -> usize {
        self.table[u][v]
    }

    pub fn eval_bob(&self, u: usize, v: usize) -> usize {
        match &self.bob_table {
            Some(t) => t[u][v],
            None => self.table[u][v],
        }
    }

    /// Kronecker test `δ_{f(u,v), f(u,ṽ)}`.
    pub fn same_output(&self, u: usize, v: usize, v_tilde: usize) -> bool {
        self.eval(u, v) == self.eval(u, v_tilde)
    }

    /// Function with the roles of the two inputs exchanged.
    pub fn transpose(&self) -> ClassicalFunction {
        let table = (0..self.v_size)
            .map(|v| (0..self.u_size).map(|u| self.table[u][v]).collect())
            .collect();
        let bob_table = self.bob_table.as_ref().map(|t| {
            (0..self.v_size)
                .map(|v| (0..self.u_size).map(|u| t[u][v]).collect())
                .collect()
        });
        ClassicalFunction {
            u_size: self.v_size,
            v_size: self.u_size,
            out_size: self.out_size,
            table,
            bob_table,
        }
    }
}
