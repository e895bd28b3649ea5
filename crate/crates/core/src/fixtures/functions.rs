//! Concrete function families on n-bit strings.

use crate::proto::ClassicalFunction;
use crate::{Error, Result};

/// Desk-scale cap on truth-table width (inputs are `2^n` strings).
pub const MAX_TABLE_BITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    /// `EQ(u,v) = 1` iff `u = v`.
    Eq,
    /// Inner product modulo 2 of the bit strings.
    Ip,
    /// `DISJ(u,v) = 0` iff the strings share a 1 position.
    Disj,
    /// `f((s0,s1), b) = (b, s_b)`: both parties learn the chosen string.
    OtLike,
    /// Constant 0 into the alphabet {0, 1}.
    Const,
}

pub fn make_function(kind: FunctionKind, n: usize) -> Result<ClassicalFunction> {
    if n == 0 {
        return Err(Error::CapExceeded("n must be at least 1".into()));
    }
    let cap = match kind {
        FunctionKind::OtLike => 2,
        FunctionKind::Disj => MAX_TABLE_BITS,
        _ => 4,
    };
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "{kind:?} capped at n = {cap}, requested {n}"
        )));
    }
    let size = 1usize << n;
    match kind {
        FunctionKind::Eq => {
            let table = (0..size)
                .map(|u| (0..size).map(|v| usize::from(u == v)).collect())
                .collect();
            ClassicalFunction::new(table, 2)
        }
        FunctionKind::Ip => {
            let table = (0..size)
                .map(|u| (0..size).map(|v| (u & v).count_ones() as usize % 2).collect())
                .collect();
            ClassicalFunction::new(table, 2)
        }
        FunctionKind::Disj => {
            let table = (0..size)
                .map(|u| (0..size).map(|v| usize::from(u & v == 0)).collect())
                .collect();
            ClassicalFunction::new(table, 2)
        }
        FunctionKind::OtLike => {
            // u = s0·2^n + s1, v = b; output (b, s_b) encoded b·2^n + s_b.
            let table = (0..size * size)
                .map(|u| {
                    let (s0, s1) = (u >> n, u & (size - 1));
                    (0..2)
                        .map(|b| b * size + if b == 0 { s0 } else { s1 })
                        .collect()
                })
                .collect();
            ClassicalFunction::new(table, 2 * size)
        }
        FunctionKind::Const => {
            let table = (0..size).map(|_| vec![0usize; size]).collect();
            ClassicalFunction::new(table, 2)
        }
    }
}
