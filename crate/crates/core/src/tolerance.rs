use crate::error::{Error, Result};

/// Thresholds that turn exact-arithmetic statements into numerical tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    /// Relative, Frobenius-scaled threshold for structure residuals.
    pub structure_tol: f64,
    /// Relative radius for merging eigenvalues into one group.
    pub cluster_tol: f64,
    /// Threshold for real / purely imaginary / zero classification.
    pub class_tol: f64,
    /// Relative singular value threshold for numerical rank.
    pub rank_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            structure_tol: 1e-10,
            cluster_tol: 1e-8,
            class_tol: 1e-8,
            rank_tol: 1e-10,
        }
    }
}

impl TolerancePolicy {
    pub fn new(structure_tol: f64, cluster_tol: f64, class_tol: f64, rank_tol: f64) -> Result<Self> {
        let policy = Self {
            structure_tol,
            cluster_tol,
            class_tol,
            rank_tol,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Default policy with a different structure tolerance.
    pub fn with_structure_tol(structure_tol: f64) -> Result<Self> {
        let policy = Self {
            structure_tol,
            ..Self::default()
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("structure_tol", self.structure_tol),
            ("cluster_tol", self.cluster_tol),
            ("class_tol", self.class_tol),
            ("rank_tol", self.rank_tol),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidTolerance(format!("{name} = {value}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = TolerancePolicy::default();
        assert_eq!(t.structure_tol, 1e-10);
        assert_eq!(t.cluster_tol, 1e-8);
        assert_eq!(t.class_tol, 1e-8);
        assert_eq!(t.rank_tol, 1e-10);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(TolerancePolicy::with_structure_tol(-1.0).is_err());
        assert!(TolerancePolicy::new(1e-10, f64::NAN, 1e-8, 1e-10).is_err());
        assert!(TolerancePolicy::new(0.0, 0.0, 0.0, 0.0).is_ok());
    }
}
