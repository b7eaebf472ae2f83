//! Numeric policy shared by every kernel and verdict in the crate.
//!
//! All comparisons in the crate go through a single [`Policy`] value so that
//! a report can state exactly which thresholds produced its verdicts.  The
//! two tolerance tiers reflect how quantities are produced:
//!
//! * `kernel_tol` guards quantities that pass through iterative kernels
//!   (eigenvalues, singular values, rank thresholds, completeness checks);
//! * `state_tol` guards quantities computed by direct summation
//!   (norms, traces, probabilities, filtering identities).

/// Tolerances and size caps used across the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    /// Relative tolerance for iterative kernels and rank decisions.
    pub kernel_tol: f64,
    /// Tolerance for directly summed quantities (norms, traces, overlaps).
    pub state_tol: f64,
    /// Outcomes with probability below this floor carry no post-state.
    pub prob_floor: f64,
    /// Hard cap on any matrix side or composite state dimension.
    pub max_dim: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            kernel_tol: 1e-10,
            state_tol: 1e-12,
            prob_floor: 1e-12,
            max_dim: 4096,
        }
    }
}

impl Policy {
    /// Errors when `dim` exceeds the configured cap.
    pub fn check_dim(&self, dim: usize) -> crate::Result<()> {
        if dim > self.max_dim {
            return Err(crate::Error::DimOverflow {
                requested: dim,
                max: self.max_dim,
            });
        }
        Ok(())
    }
}
