//! Default tolerances for every named check.
//!
//! Values apply to analytic derivatives. With finite-difference derivatives,
//! checks that consume a derivative are widened to `FD_FACTOR · h²`.
//! Exterior derivatives and closure gates are always grid-dependent and use
//! [`differential_tolerance`] with the chart spacing.

use crate::catalog::DerivativeMode;

/// Multiplier of `h²` for derivative-dependent checks in finite-difference mode.
pub const FD_FACTOR: f64 = 50.0;

/// `(name, analytic tolerance, depends on derivatives)`.
pub const CHECKS: &[(&str, f64, bool)] = &[
    ("isometry", 1e-10, true),
    ("conformal_offdiag", 1e-10, true),
    ("conformal_anisotropy", 1e-10, true),
    ("conformal_factor", 1e-10, true),
    ("dF_norm", 1e-10, true),
    ("second_form_difference", 1e-9, true),
    ("mean_curvature", 1e-9, true),
    ("symmetric_pairing", 1e-10, true),
    ("klein_dF_dF", 1e-10, true),
    ("klein_dF_nx", 1e-10, true),
    ("dF_perp_nx", 1e-10, true),
    ("unit_normals", 1e-12, false),
    ("dFpm_perp_npm", 1e-10, true),
    ("quat_dFp", 1e-12, true),
    ("quat_dFm", 1e-12, true),
    ("quat_dFm_sign_flipped", 1e-12, true),
    ("quat_real_part", 1e-13, true),
    ("quat_wedge_left", 1e-12, true),
    ("quat_wedge_right", 1e-12, true),
    ("omega_wedge_dx", 1e-12, true),
    ("omega_perp_x", 1e-12, true),
    ("omega_perp_n", 1e-12, true),
    ("christoffel_pairing", 1e-10, true),
    ("retraction_identity", 1e-10, true),
    ("W_rank", 1e10, false),
    ("W_isotropy", 1e-10, true),
    ("W_hodge_swap", 1e-10, true),
    ("line_kernel", 1e-8, true),
    ("x_deviation", 1e-8, true),
    ("omega_deviation", 1e-8, true),
    ("n_deviation", 1e-8, true),
    ("recovered_on_sphere", 1e-12, false),
    ("recovered_omega_perp_x", 1e-10, true),
    ("recovered_omega_perp_n", 1e-10, true),
    ("recovered_omega_wedge_dx", 1e-10, true),
    ("recovered_pairing_antisymmetric", 1e-10, true),
    ("recovered_pairing_vs_2Req", 1e-9, true),
    ("recovered_pairing_identity", 1e-9, true),
    ("recovered_reproduces_pair", 1e-8, true),
    ("recovered_im_omega_eq_im_dx", 1e-8, true),
    ("recovered_immersion", 1e6, false),
    ("recovered_conformal", 1e-8, true),
];

/// Tolerance for `name`, or `None` for an unknown check.
pub fn default_tolerance(name: &str, mode: DerivativeMode, h: f64) -> Option<f64> {
    let &(_, tol, uses_derivatives) = CHECKS.iter().find(|(n, _, _)| *n == name)?;
    Some(match mode {
        DerivativeMode::FiniteDifference if uses_derivatives => tol.max(FD_FACTOR * h * h),
        _ => tol,
    })
}

/// Grid-dependent gate for finite-difference residuals: `10·h²·scale`,
/// floored at `1e−8`.
pub fn differential_tolerance(scale: f64, h: f64) -> f64 {
    (10.0 * h * h * scale).max(1e-8)
}

/// Tolerance lookup bound to a derivative mode and grid spacing.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub mode: DerivativeMode,
    pub h: f64,
}

impl Tolerances {
    pub fn new(mode: DerivativeMode, h: f64) -> Tolerances {
        Tolerances { mode, h }
    }

    pub fn analytic() -> Tolerances {
        Tolerances { mode: DerivativeMode::Analytic, h: 0.0 }
    }

    /// Panics on a name missing from [`CHECKS`]; every check name is static.
    pub fn get(&self, name: &str) -> f64 {
        default_tolerance(name, self.mode, self.h)
            .unwrap_or_else(|| panic!("no default tolerance for check `{name}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        for (i, a) in CHECKS.iter().enumerate() {
            assert!(CHECKS[i + 1..].iter().all(|b| b.0 != a.0), "{}", a.0);
        }
    }

    #[test]
    fn fd_widening() {
        let t = Tolerances::new(DerivativeMode::FiniteDifference, 0.1);
        assert_eq!(t.get("isometry"), FD_FACTOR * 0.01);
        assert_eq!(t.get("unit_normals"), 1e-12);
        assert_eq!(Tolerances::analytic().get("isometry"), 1e-10);
    }
}
