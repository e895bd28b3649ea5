//! Named, dimensioned registers and ordered register systems.
//!
//! Basis indexing is big-endian mixed radix: the first register in the system
//! is the most significant digit of a flat basis index.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub dim: usize,
}

impl Register {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Register {
            label: label.into(),
            dim,
        }
    }
}

/// An ordered list of uniquely labeled registers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterSystem {
    registers: Vec<Register>,
}

impl RegisterSystem {
    pub fn new(registers: Vec<Register>) -> Result<Self> {
        for reg in &registers {
            if reg.dim == 0 {
                return Err(Error::DimensionMismatch(format!(
                    "register {} has dimension 0",
                    reg.label
                )));
            }
        }
        for (i, reg) in registers.iter().enumerate() {
            if registers[..i].iter().any(|r| r.label == reg.label) {
                return Err(Error::LabelCollision(reg.label.clone()));
            }
        }
        Ok(RegisterSystem { registers })
    }

    /// Convenience constructor from `(label, dim)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(label, dim)| Register::new(label, dim))
                .collect(),
        )
    }

    pub fn single(label: &str, dim: usize) -> Self {
        RegisterSystem {
            registers: vec![Register::new(label, dim)],
        }
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.registers.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.registers.iter().map(|r| r.dim).product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.registers.iter().any(|r| r.label == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.registers
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.registers[self.position(label)?].dim)
    }

    /// Product of the dims of the given labels.
    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        let mut d = 1usize;
        for label in labels {
            d *= self.dim_of(label)?;
        }
        Ok(d)
    }

    /// Subsystem containing `labels`, preserving this system's order.
    pub fn subsystem(&self, labels: &[&str]) -> Result<RegisterSystem> {
        for label in labels {
            self.position(label)?;
        }
        Ok(RegisterSystem {
            registers: self
                .registers
                .iter()
                .filter(|r| labels.contains(&r.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Complement of `labels`, preserving order.
    pub fn complement(&self, labels: &[&str]) -> Result<RegisterSystem> {
        for label in labels {
            self.position(label)?;
        }
        Ok(RegisterSystem {
            registers: self
                .registers
                .iter()
                .filter(|r| !labels.contains(&r.label.as_str()))
                .cloned()
                .collect(),
        })
    }

    /// Concatenation; fails on any label collision.
    pub fn tensor(&self, other: &RegisterSystem) -> Result<RegisterSystem> {
        let mut regs = self.registers.clone();
        for reg in &other.registers {
            if self.contains(&reg.label) {
                return Err(Error::LabelCollision(reg.label.clone()));
            }
            regs.push(reg.clone());
        }
        Ok(RegisterSystem { registers: regs })
    }

    pub fn rename(&self, old: &str, new: &str) -> Result<RegisterSystem> {
        let pos = self.position(old)?;
        if old != new && self.contains(new) {
            return Err(Error::LabelCollision(new.to_string()));
        }
        let mut regs = self.registers.clone();
        regs[pos].label = new.to_string();
        Ok(RegisterSystem { registers: regs })
    }

    /// Flat basis index of a digit tuple (one digit per register, in order).
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.registers.len());
        let mut idx = 0usize;
        for (reg, &digit) in self.registers.iter().zip(digits) {
            debug_assert!(digit < reg.dim);
            idx = idx * reg.dim + digit;
        }
        idx
    }

    /// Digit tuple of a flat basis index.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0usize; self.registers.len()];
        for (slot, reg) in digits.iter_mut().zip(&self.registers).rev() {
            let (reg_dim, digit) = (reg.dim, index % reg.dim);
            *slot = digit;
            index /= reg_dim;
        }
        digits
    }

    /// Permutation `perm` such that `self.registers[perm[k]]` is the k-th
    /// register of the target order `front` ++ complement(front).
    pub fn front_permutation(&self, front: &[&str]) -> Result<Vec<usize>> {
        let mut perm = Vec::with_capacity(self.registers.len());
        for label in front {
            perm.push(self.position(label)?);
        }
        for (i, reg) in self.registers.iter().enumerate() {
            if !front.contains(&reg.label.as_str()) {
                perm.push(i);
            }
        }
        Ok(perm)
    }

    /// System with registers permuted so that `perm[k]` names the old slot of
    /// the new k-th register.
    pub fn permuted(&self, perm: &[usize]) -> RegisterSystem {
        RegisterSystem {
            registers: perm.iter().map(|&i| self.registers[i].clone()).collect(),
        }
    }

    /// For each flat index of the permuted system, the flat index in this
    /// system it came from.
    pub fn permutation_map(&self, perm: &[usize]) -> Vec<usize> {
        let total = self.total_dim();
        let dims = self.dims();
        let new_dims: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
        let mut map = vec![0usize; total];
        let mut new_digits = vec![0usize; dims.len()];
        for (new_index, slot) in map.iter_mut().enumerate() {
            // Decompose new_index in the permuted radix.
            let mut rem = new_index;
            for (k, &d) in new_dims.iter().enumerate().rev() {
                new_digits[k] = rem % d;
                rem /= d;
            }
            let mut old_index = 0usize;
            let mut old_digits = vec![0usize; dims.len()];
            for (k, &src) in perm.iter().enumerate() {
                old_digits[src] = new_digits[k];
            }
            for (k, &d) in dims.iter().enumerate() {
                old_index = old_index * d + old_digits[k];
            }
            *slot = old_index;
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys3() -> RegisterSystem {
        RegisterSystem::from_pairs(&[("A", 2), ("B", 3), ("C", 2)]).unwrap()
    }

    #[test]
    fn indexing_round_trips() {
        let sys = sys3();
        assert_eq!(sys.total_dim(), 12);
        for idx in 0..12 {
            let digits = sys.digits_of(idx);
            assert_eq!(sys.index_of(&digits), idx);
        }
        assert_eq!(sys.index_of(&[1, 2, 0]), 1 * 6 + 2 * 2);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(RegisterSystem::from_pairs(&[("A", 2), ("A", 3)]).is_err());
        let sys = sys3();
        assert!(sys.tensor(&RegisterSystem::single("B", 4)).is_err());
    }

    #[test]
    fn subsystem_preserves_order() {
        let sys = sys3();
        let sub = sys.subsystem(&["C", "A"]).unwrap();
        assert_eq!(sub.labels(), vec!["A", "C"]);
        assert_eq!(sys.complement(&["B"]).unwrap().labels(), vec!["A", "C"]);
        assert!(sys.subsystem(&["Z"]).is_err());
    }

    #[test]
    fn permutation_map_is_consistent() {
        let sys = sys3();
        let perm = sys.front_permutation(&["B"]).unwrap();
        assert_eq!(perm, vec![1, 0, 2]);
        let permuted = sys.permuted(&perm);
        assert_eq!(permuted.labels(), vec!["B", "A", "C"]);
        let map = sys.permutation_map(&perm);
        for new_index in 0..sys.total_dim() {
            let new_digits = permuted.digits_of(new_index);
            let old_digits = sys.digits_of(map[new_index]);
            // digit of B in new position 0 must match old position 1, etc.
            assert_eq!(new_digits[0], old_digits[1]);
            assert_eq!(new_digits[1], old_digits[0]);
            assert_eq!(new_digits[2], old_digits[2]);
        }
    }
}
