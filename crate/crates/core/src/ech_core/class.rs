use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of a finitely generated abelian group `Z^r ⊕ ⊕ Z/m_i`,
/// used to label generators by their first homology class.
///
/// Labels are kept normalized: trailing zero free coordinates are dropped
/// and an all-zero torsion part is stored empty, so the zero label has a
/// single representation whatever the declared rank.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassLabel {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    free: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    torsion: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    moduli: Vec<u64>,
}

impl ClassLabel {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(coords: Vec<i64>) -> Self {
        Self::new(coords, Vec::new(), Vec::new()).expect("free labels are always valid")
    }

    pub fn new(free: Vec<i64>, torsion: Vec<u64>, moduli: Vec<u64>) -> Result<Self> {
        if torsion.len() != moduli.len() {
            return Err(Error::InvalidArgument(
                "torsion residues and moduli differ in length".into(),
            ));
        }
        if moduli.iter().any(|&m| m < 2) {
            return Err(Error::InvalidArgument("torsion moduli must be at least 2".into()));
        }
        let torsion = torsion.iter().zip(&moduli).map(|(t, m)| t % m).collect();
        let mut label = Self {
            free,
            torsion,
            moduli,
        };
        label.normalize();
        Ok(label)
    }

    fn normalize(&mut self) {
        while self.free.last() == Some(&0) {
            self.free.pop();
        }
        if self.torsion.iter().all(|&t| t == 0) {
            self.torsion.clear();
            self.moduli.clear();
        }
    }

    /// Validates fields after deserialization.
    pub fn normalized(self) -> Result<Self> {
        Self::new(self.free, self.torsion, self.moduli)
    }

    pub fn is_zero(&self) -> bool {
        self.free.is_empty() && self.torsion.is_empty()
    }

    pub fn free_part(&self) -> &[i64] {
        &self.free
    }

    pub fn torsion_part(&self) -> (&[u64], &[u64]) {
        (&self.torsion, &self.moduli)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let n = self.free.len().max(other.free.len());
        let free = (0..n)
            .map(|i| self.free.get(i).unwrap_or(&0) + other.free.get(i).unwrap_or(&0))
            .collect();
        let (torsion, moduli) = match (self.torsion.is_empty(), other.torsion.is_empty()) {
            (true, _) => (other.torsion.clone(), other.moduli.clone()),
            (_, true) => (self.torsion.clone(), self.moduli.clone()),
            _ => {
                if self.moduli != other.moduli {
                    return Err(Error::InvalidArgument(format!(
                        "class labels from different groups: moduli {:?} vs {:?}",
                        self.moduli, other.moduli
                    )));
                }
                let t = self
                    .torsion
                    .iter()
                    .zip(&other.torsion)
                    .zip(&self.moduli)
                    .map(|((a, b), m)| (a + b) % m)
                    .collect();
                (t, self.moduli.clone())
            }
        };
        Self::new(free, torsion, moduli)
    }

    /// `k` times this label.
    pub fn times(&self, k: u64) -> Self {
        let free = self.free.iter().map(|x| x * k as i64).collect();
        let torsion = self.torsion.iter().zip(&self.moduli).map(|(t, m)| (t * (k % m)) % m).collect();
        Self::new(free, torsion, self.moduli.clone()).expect("scaling keeps the group")
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if !self.free.is_empty() {
            parts.push(format!("{:?}", self.free));
        }
        for (t, m) in self.torsion.iter().zip(&self.moduli) {
            parts.push(format!("{t} mod {m}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_has_one_representation() {
        assert_eq!(ClassLabel::free(vec![0, 0]), ClassLabel::zero());
        assert_eq!(ClassLabel::new(vec![], vec![3], vec![3]).unwrap(), ClassLabel::zero());
    }

    #[test]
    fn addition_pads_and_reduces() {
        let a = ClassLabel::new(vec![1], vec![2], vec![3]).unwrap();
        let b = ClassLabel::new(vec![0, 4], vec![2], vec![3]).unwrap();
        let s = a.checked_add(&b).unwrap();
        assert_eq!(s, ClassLabel::new(vec![1, 4], vec![1], vec![3]).unwrap());
        assert_eq!(a.checked_add(&ClassLabel::zero()).unwrap(), a);
        assert_eq!(a.times(3), ClassLabel::free(vec![3]));
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = ClassLabel::new(vec![], vec![1], vec![2]).unwrap();
        let b = ClassLabel::new(vec![], vec![1], vec![3]).unwrap();
        assert!(a.checked_add(&b).is_err());
    }
}
