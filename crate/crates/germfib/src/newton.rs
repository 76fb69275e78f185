//! Gauss-Newton projection of a point onto the zero set of a determinantal
//! system, by damped least-squares iteration on the equation residuals.

use nalgebra::{DMatrix, DVector};

use crate::variety::DeterminantalSystem;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOpts {
    /// Convergence threshold on the max equation residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Projections that wander farther than this from the start point fail.
    pub trust_radius: f64,
    /// Singular-value cutoff (relative to the largest) for the pseudoinverse.
    pub svd_cutoff: f64,
}

impl Default for NewtonOpts {
    fn default() -> Self {
        NewtonOpts {
            tol: 1e-10,
            max_iter: 50,
            trust_radius: 1.0,
            svd_cutoff: 1e-12,
        }
    }
}

fn residual_norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Project `x0` onto the zero set of `system`.
///
/// Returns the polished point on success; `None` on divergence, iteration
/// exhaustion, or leaving the trust region. A failure is a value, not an
/// error: infeasible starts are expected during sampling.
pub fn newton_project(
    system: &DeterminantalSystem,
    x0: &[f64],
    opts: &NewtonOpts,
) -> Option<Vec<f64>> {
    assert_eq!(x0.len(), system.nvars());
    if x0.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut x = x0.to_vec();
    let mut res = system.residuals(&x);
    if max_abs(&res) < opts.tol {
        return Some(x);
    }
    for _ in 0..opts.max_iter {
        let jac = system.jacobian_at(&x);
        let step = gauss_newton_step(&jac, &res, opts.svd_cutoff)?;

        // Backtrack until the residual norm decreases.
        let mut alpha = 1.0;
        let base = residual_norm(&res);
        let mut accepted = false;
        for _ in 0..25 {
            let cand: Vec<f64> = x.iter().zip(&step).map(|(xi, s)| xi - alpha * s).collect();
            let cres = system.residuals(&cand);
            if residual_norm(&cres) < base {
                x = cand;
                res = cres;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return None;
        }
        if dist(&x, x0) > opts.trust_radius {
            return None;
        }
        if max_abs(&res) < opts.tol {
            return Some(x);
        }
    }
    None
}

/// Minimum-norm least-squares solution of `J s = r` via SVD.
fn gauss_newton_step(jac: &DMatrix<f64>, res: &[f64], cutoff: f64) -> Option<Vec<f64>> {
    let r = DVector::from_column_slice(res);
    let svd = jac.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |a, &v| a.max(v));
    if smax == 0.0 {
        return None;
    }
    let sol = svd.solve(&r, cutoff * smax).ok()?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(sol.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::poly::Polynomial;
    use crate::variety::{milnor_set_system, DeterminantalSystem};

    #[test]
    fn projects_onto_milnor_set_of_xy_z2() {
        let g = catalog::xy_z2();
        let sys = milnor_set_system(&g).unwrap();
        let x0 = [0.30, 0.31, 0.5];
        let x = newton_project(&sys, &x0, &NewtonOpts::default()).unwrap();
        // nearest sheet is {x = y}
        assert!((x[0].abs() - x[1].abs()).abs() < 1e-10, "{:?}", x);
        assert!((x[2] - 0.5).abs() < 0.02);
        assert!(sys.max_residual(&x) < 1e-10);
    }

    #[test]
    fn fixed_point_returns_input_unchanged() {
        let g = catalog::xy_z2();
        let sys = milnor_set_system(&g).unwrap();
        let on_variety = [0.3, 0.3, 0.5];
        let x = newton_project(&sys, &on_variety, &NewtonOpts::default()).unwrap();
        assert_eq!(x, on_variety);
    }

    #[test]
    fn empty_real_zero_set_fails() {
        // x^2 + y^2 + 1 has no real zeros
        let one = Polynomial::constant_i64(2, 1);
        let p = crate::poly::rho(2).add(&one);
        let sys = DeterminantalSystem::from_equations(2, vec![p]);
        assert!(newton_project(&sys, &[0.1, -0.2], &NewtonOpts::default()).is_none());
    }

    #[test]
    fn trust_radius_is_enforced() {
        // zero set {x = 10}, start at origin with a small trust radius
        let ten = Polynomial::constant_i64(1, 10);
        let p = Polynomial::variable(1, 0).sub(&ten);
        let sys = DeterminantalSystem::from_equations(1, vec![p]);
        let opts = NewtonOpts {
            trust_radius: 0.5,
            ..Default::default()
        };
        assert!(newton_project(&sys, &[0.0], &opts).is_none());
        let loose = NewtonOpts::default();
        // default radius 1.0 still too small; widen explicitly
        assert!(newton_project(&sys, &[0.0], &NewtonOpts { trust_radius: 20.0, ..loose }).is_some());
    }

    #[test]
    fn nonfinite_start_fails() {
        let sys = DeterminantalSystem::from_equations(1, vec![Polynomial::variable(1, 0)]);
        assert!(newton_project(&sys, &[f64::NAN], &NewtonOpts::default()).is_none());
    }
}
