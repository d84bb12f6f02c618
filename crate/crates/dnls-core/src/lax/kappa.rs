use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite increasing set of dyadic κ = 2^n, n ≥ 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct KappaSet {
    elements: Vec<f64>,
}

fn is_dyadic(k: f64) -> bool {
    k >= 1.0 && k.is_finite() && 2f64.powi(k.log2().round() as i32) == k
}

impl KappaSet {
    pub fn new(elements: Vec<f64>) -> Result<Self> {
        for &k in &elements {
            if !is_dyadic(k) {
                return Err(Error::Parameter(format!("{k} is not a power of two >= 1")));
            }
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("kappa set must be strictly increasing".into()));
        }
        Ok(Self { elements })
    }

    pub fn empty() -> Self {
        Self { elements: Vec::new() }
    }

    /// {2^lo, …, 2^hi}.
    pub fn dyadic(lo: u32, hi: u32) -> Self {
        Self {
            elements: (lo..=hi).map(|n| 2f64.powi(n as i32)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.elements.iter().copied()
    }

    /// Elements at or above `floor`.
    pub fn at_least(&self, floor: f64) -> Self {
        Self {
            elements: self.elements.iter().copied().filter(|&k| k >= floor).collect(),
        }
    }
}

impl TryFrom<Vec<f64>> for KappaSet {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<KappaSet> for Vec<f64> {
    fn from(k: KappaSet) -> Self {
        k.elements
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(KappaSet::new(vec![1.0, 2.0, 8.0]).is_ok());
        assert!(KappaSet::new(vec![2.0, 2.0]).is_err());
        assert!(KappaSet::new(vec![4.0, 2.0]).is_err());
        assert!(KappaSet::new(vec![3.0]).is_err());
        assert!(KappaSet::new(vec![0.5]).is_err());
        assert_eq!(KappaSet::dyadic(1, 3).as_slice(), &[2.0, 4.0, 8.0]);
        let parsed: KappaSet = serde_json::from_str("[1, 4, 1024]").unwrap();
        assert_eq!(parsed.len(), 3);
        assert!(serde_json::from_str::<KappaSet>("[1, 6]").is_err());
    }
}
