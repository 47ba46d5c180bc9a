//! Monomial degree patterns of the two generators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("k must be at least 6 so six residues can be distinct, got {0}")]
    KTooSmall(u64),
    #[error("degrees gamma_{i} = {gi} and gamma_{j} = {gj} coincide modulo k = {k}")]
    ResidueCollision { i: usize, j: usize, gi: u64, gj: u64, k: u64 },
}

/// Degrees `gamma_0..gamma_5` for a shift `z^k`.
///
/// `gamma_0..gamma_3` carry the free coefficients, `gamma_4` the register
/// of the first generator and `gamma_5` the register of the second. All six
/// are pairwise distinct modulo `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct DegreePattern {
    k: u64,
    gamma: [u64; 6],
}

#[derive(Serialize, Deserialize)]
struct RawPattern {
    k: u64,
    gamma: [u64; 6],
}

impl TryFrom<RawPattern> for DegreePattern {
    type Error = PatternError;

    fn try_from(raw: RawPattern) -> Result<Self, Self::Error> {
        DegreePattern::new(raw.k, raw.gamma)
    }
}

impl From<DegreePattern> for RawPattern {
    fn from(p: DegreePattern) -> Self {
        RawPattern { k: p.k, gamma: p.gamma }
    }
}

impl DegreePattern {
    pub fn new(k: u64, gamma: [u64; 6]) -> Result<Self, PatternError> {
        if k < 6 {
            return Err(PatternError::KTooSmall(k));
        }
        for i in 0..6 {
            for j in i + 1..6 {
                if gamma[i] % k == gamma[j] % k {
                    return Err(PatternError::ResidueCollision { i, j, gi: gamma[i], gj: gamma[j], k });
                }
            }
        }
        Ok(DegreePattern { k, gamma })
    }

    /// `gamma = (0, 1, 2, 3, 4, 5)`.
    pub fn standard(k: u64) -> Result<Self, PatternError> {
        Self::from_phi(k, [0; 6])
    }

    /// `gamma_i = phi_i * k + i`.
    pub fn from_phi(k: u64, phi: [u64; 6]) -> Result<Self, PatternError> {
        let gamma = std::array::from_fn(|i| phi[i] * k + i as u64);
        Self::new(k, gamma)
    }

    /// The searched family: only `gamma_2` and `gamma_3` are lifted.
    pub fn searchable(k: u64, phi2: u64, phi3: u64) -> Result<Self, PatternError> {
        Self::from_phi(k, [0, 0, phi2, phi3, 0, 0])
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn gamma(&self) -> [u64; 6] {
        self.gamma
    }

    /// `phi` with `gamma_i = phi_i * k + i`, if the pattern has that form.
    pub fn phi(&self) -> Option<[u64; 6]> {
        let mut phi = [0; 6];
        for (i, &g) in self.gamma.iter().enumerate() {
            let i = i as u64;
            if g < i || !(g - i).is_multiple_of(self.k) {
                return None;
            }
            phi[i as usize] = (g - i) / self.k;
        }
        Some(phi)
    }

    /// Degree `s*k + gamma_i` of the weight in row `s`, column `i`.
    pub fn matrix_index(&self, s: u64, i: usize) -> u64 {
        s * self.k + self.gamma[i]
    }

    /// The twelve weight indices `s*k + gamma_i`, `s = 1..3`, `i = 0..3`.
    pub fn matrix_indices(&self) -> [u64; 12] {
        std::array::from_fn(|n| self.matrix_index(n as u64 / 4 + 1, n % 4))
    }

    /// Largest degree that occurs in either generator.
    pub fn max_degree(&self) -> u64 {
        (0..4)
            .map(|i| self.k + self.gamma[i])
            .chain([self.gamma[4], self.gamma[5]])
            .max()
            .unwrap_or(0)
    }

    /// Shift count beyond which every overlap of shifted generators is empty.
    pub fn default_s_max(&self) -> u64 {
        let k = self.k;
        let by_register = (3 * k + self.gamma[5]).div_ceil(k) + 2;
        let by_degree = self.max_degree().div_ceil(k) + 2;
        by_register.max(by_degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_pattern() {
        let p = DegreePattern::standard(6).unwrap();
        assert_eq!(p.gamma(), [0, 1, 2, 3, 4, 5]);
        assert_eq!(p.phi(), Some([0; 6]));
        assert_eq!(p.matrix_indices(), [6, 7, 8, 9, 12, 13, 14, 15, 18, 19, 20, 21]);
        assert_eq!(p.max_degree(), 9);
    }

    #[test]
    fn lifted_pattern() {
        let p = DegreePattern::searchable(6, 0, 3).unwrap();
        assert_eq!(p.gamma(), [0, 1, 2, 21, 4, 5]);
        assert_eq!(p.phi(), Some([0, 0, 0, 3, 0, 0]));
        assert_eq!(p.max_degree(), 27);
        assert!(p.default_s_max() >= 27 / 6 + 2);
    }

    #[test]
    fn rejects_residue_collisions() {
        assert!(matches!(
            DegreePattern::new(6, [0, 1, 2, 3, 4, 6]),
            Err(PatternError::ResidueCollision { i: 0, j: 5, .. })
        ));
        assert_eq!(DegreePattern::standard(5), Err(PatternError::KTooSmall(5)));
    }

    #[test]
    fn serde_validates() {
        let ok: DegreePattern = serde_json::from_str(r#"{"k":6,"gamma":[0,1,2,3,4,5]}"#).unwrap();
        assert_eq!(ok, DegreePattern::standard(6).unwrap());
        assert!(serde_json::from_str::<DegreePattern>(r#"{"k":6,"gamma":[0,1,2,3,4,10]}"#).is_err());
    }
}
