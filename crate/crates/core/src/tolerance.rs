//! Numerical tolerances.
//!
//! All checks compare max-norm residuals against absolute thresholds unless
//! noted otherwise. Every threshold can be overridden through [`Tolerances`].

/// Symplectic/orthogonal/unitary membership residuals.
pub const TOL_SYM: f64 = 1e-10;
/// Decomposition residuals (Williamson, Euler, round trips through products).
pub const TOL_DECOMP: f64 = 1e-8;
/// Physicality and complete-positivity eigenvalue slack.
pub const TOL_PHYS: f64 = 1e-9;
/// Closed-form versus numeric-search comparisons on the infimum side.
pub const TOL_OPT: f64 = 1e-6;
/// Sup-side searches (maximum output entropy, capacities).
pub const TOL_OPT_SUP: f64 = 1e-3;
/// Absolute slack for majorization prefix-sum comparisons.
pub const PREFIX_ABS: f64 = 1e-9;
/// Relative slack for majorization prefix-sum comparisons.
pub const PREFIX_REL: f64 = 1e-12;
/// Regularization added to singular noise matrices before a Williamson transform.
pub const NOISE_REGULARIZATION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub sym: f64,
    pub decomp: f64,
    pub phys: f64,
    pub opt: f64,
    pub opt_sup: f64,
    pub prefix_abs: f64,
    pub prefix_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym: TOL_SYM,
            decomp: TOL_DECOMP,
            phys: TOL_PHYS,
            opt: TOL_OPT,
            opt_sup: TOL_OPT_SUP,
            prefix_abs: PREFIX_ABS,
            prefix_rel: PREFIX_REL,
        }
    }
}
