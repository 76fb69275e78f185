//! Detection and verification of radial and polar weighted-homogeneity,
//! and the associated scaling / circle actions.

use num::complex::Complex64;
use num::integer::gcd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::germ::MapGerm;
use crate::mixed::MixedFunction;
use crate::poly::{Polynomial, PolyVector};

/// Positive integer weights `q` with `gcd(q) = 1` and degree `d` such that
/// `G(t^{q_1} x_1, ..., t^{q_m} x_m) = t^d G(x)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RadialWeights {
    pub q: Vec<u32>,
    pub d: u32,
}

/// Nonzero integer weights `p` with `gcd = 1` and polar degree `k > 0` such
/// that `F(lambda . z) = lambda^k F(z)` for `lambda` on the unit circle.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PolarWeights {
    pub p_wts: Vec<i32>,
    pub k: u32,
}

fn gcd_all<I: IntoIterator<Item = u64>>(vals: I) -> u64 {
    vals.into_iter().fold(0, gcd)
}

/// All exponent vectors appearing in any component.
fn all_monomials(g: &MapGerm) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for c in g.components() {
        for (m, _) in c.terms() {
            out.push(m.0.clone());
        }
    }
    out
}

/// Find radial weights by bounded enumeration of primitive positive weight
/// vectors. Canonical representative: smallest degree `d`, then
/// lexicographically smallest `q`. Returns `None` when no solution exists
/// with all weights `<= bound`.
pub fn detect_radial_weights(g: &MapGerm, bound: u32) -> Option<RadialWeights> {
    assert!(bound >= 1);
    let monos = all_monomials(g);
    if monos.is_empty() {
        return None;
    }
    let m = g.source_dim();
    let mut best: Option<RadialWeights> = None;
    let mut q = vec![1u32; m];
    loop {
        if gcd_all(q.iter().map(|&v| v as u64)) == 1 {
            let degree_of = |alpha: &[u32]| -> u64 {
                alpha
                    .iter()
                    .zip(&q)
                    .map(|(&a, &w)| a as u64 * w as u64)
                    .sum()
            };
            let d = degree_of(&monos[0]);
            if d > 0 && monos.iter().all(|a| degree_of(a) == d) {
                let cand = RadialWeights {
                    q: q.clone(),
                    d: d as u32,
                };
                let better = match &best {
                    None => true,
                    Some(b) => (cand.d, &cand.q) < (b.d, &b.q),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        // odometer over [1, bound]^m
        let mut i = m;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if q[i] < bound {
                q[i] += 1;
                for v in q.iter_mut().skip(i + 1) {
                    *v = 1;
                }
                break;
            }
        }
    }
}

/// Find polar weights by bounded enumeration of nonzero integer weight
/// vectors. Canonical representative: smallest polar degree `k`, then
/// smallest `max |p_j|`, then lexicographically greatest `p` (preferring
/// positive leading weights among sign-symmetric ties).
pub fn detect_polar_weights(f: &MixedFunction, bound: i32) -> Option<PolarWeights> {
    assert!(bound >= 1);
    let keys: Vec<(Vec<u32>, Vec<u32>)> = f.terms().map(|(k, _)| k.clone()).collect();
    if keys.is_empty() {
        return None;
    }
    let n = f.nvars_complex();
    let values: Vec<i32> = (1..=bound).flat_map(|v| [v, -v]).collect();
    let mut best: Option<PolarWeights> = None;
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<i32> = idx.iter().map(|&i| values[i]).collect();
        if gcd_all(p.iter().map(|&v| v.unsigned_abs() as u64)) == 1 {
            let polar_degree = |(nu, mu): &(Vec<u32>, Vec<u32>)| -> i64 {
                nu.iter()
                    .zip(mu)
                    .zip(&p)
                    .map(|((&a, &b), &w)| (a as i64 - b as i64) * w as i64)
                    .sum()
            };
            let k = polar_degree(&keys[0]);
            if k > 0 && keys.iter().all(|key| polar_degree(key) == k) {
                let cand = PolarWeights {
                    p_wts: p.clone(),
                    k: k as u32,
                };
                let max_abs = |w: &PolarWeights| w.p_wts.iter().map(|v| v.abs()).max().unwrap();
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (cand.k, max_abs(&cand), std::cmp::Reverse(cand.p_wts.clone()))
                            < (b.k, max_abs(b), std::cmp::Reverse(b.p_wts.clone()))
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if idx[i] + 1 < values.len() {
                idx[i] += 1;
                for v in idx.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// Check `G(t . x) = t^d G(x)` at random `(t, x)` with `t in [0.1, 2]`.
pub fn verify_radial_action(g: &MapGerm, w: &RadialWeights, trials: usize) -> bool {
    let m = g.source_dim();
    assert_eq!(w.q.len(), m);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACE1);
    for _ in 0..trials {
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t: f64 = rng.gen_range(0.1..2.0);
        let tx: Vec<f64> = x
            .iter()
            .zip(&w.q)
            .map(|(xi, &qi)| t.powi(qi as i32) * xi)
            .collect();
        let lhs = g.eval(&tx);
        let td = t.powi(w.d as i32);
        let rhs = g.eval(&x);
        let scale: f64 = 1.0 + lhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err: f64 = lhs
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - td * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if err >= 1e-10 * scale {
            return false;
        }
    }
    true
}

/// Check `F(lambda . z) = lambda^k F(z)` at random unit-circle `lambda` and
/// random `z`.
pub fn verify_polar_action(f: &MixedFunction, w: &PolarWeights, trials: usize) -> bool {
    let n = f.nvars_complex();
    assert_eq!(w.p_wts.len(), n);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACE2);
    for _ in 0..trials {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let lambda = Complex64::from_polar(1.0, theta);
        let lz: Vec<Complex64> = z
            .iter()
            .zip(&w.p_wts)
            .map(|(zj, &pj)| lambda.powi(pj) * zj)
            .collect();
        let lhs = f.eval_complex(&lz);
        let rhs = lambda.powu(w.k) * f.eval_complex(&z);
        if (lhs - rhs).norm() >= 1e-10 * (1.0 + f.eval_complex(&z).norm()) {
            return false;
        }
    }
    true
}

/// The weighted scaling field `(q_1 x_1, ..., q_m x_m)` whose flow realizes
/// the radial action.
pub fn euler_field(w: &RadialWeights) -> PolyVector {
    let m = w.q.len();
    let entries = w
        .q
        .iter()
        .enumerate()
        .map(|(i, &qi)| {
            Polynomial::variable(m, i).scale(&num::BigRational::from_integer(qi.into()))
        })
        .collect();
    PolyVector::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn radial_weights_of_xy_z2() {
        let g = catalog::xy_z2();
        let w = detect_radial_weights(&g, 12).unwrap();
        assert_eq!(w, RadialWeights { q: vec![1, 1, 1], d: 2 });
        assert!(verify_radial_action(&g, &w, 1000));
    }

    #[test]
    fn radial_weights_of_cone_projection() {
        let g = catalog::cone_projection(4);
        let w = detect_radial_weights(&g, 12).unwrap();
        assert_eq!(w, RadialWeights { q: vec![2, 1, 1, 1], d: 2 });
        assert!(verify_radial_action(&g, &w, 1000));
    }

    #[test]
    fn mixed_degrees_are_infeasible() {
        // single component x1 + x1^2 has no consistent weight
        let x = Polynomial::variable(1, 0);
        let g = MapGerm::new(vec![x.add(&x.pow(2))]).unwrap();
        assert!(detect_radial_weights(&g, 12).is_none());
    }

    #[test]
    fn wrong_degree_fails_verification() {
        let g = catalog::xy_z2();
        let w = RadialWeights { q: vec![1, 1, 1], d: 3 };
        assert!(!verify_radial_action(&g, &w, 10));
    }

    #[test]
    fn identity_is_radial_of_degree_one() {
        let g = catalog::linear_projection(2, 2);
        let w = RadialWeights { q: vec![1, 1], d: 1 };
        assert!(verify_radial_action(&g, &w, 100));
        assert_eq!(detect_radial_weights(&g, 12).unwrap(), w);
    }

    #[test]
    fn polar_weights_of_z_squared() {
        let f = MixedFunction::variable(1, 0).pow(2);
        let w = detect_polar_weights(&f, 12).unwrap();
        assert_eq!(w, PolarWeights { p_wts: vec![1], k: 2 });
        assert!(verify_polar_action(&f, &w, 1000));
    }

    #[test]
    fn polar_weights_of_z1_z2bar() {
        let f = MixedFunction::variable(2, 0).mul(&MixedFunction::conj_variable(2, 1));
        let w = detect_polar_weights(&f, 3).unwrap();
        assert_eq!(w, PolarWeights { p_wts: vec![2, 1], k: 1 });
        assert!(verify_polar_action(&f, &w, 1000));
    }

    #[test]
    fn z_zbar_has_no_polar_weights() {
        let f = MixedFunction::variable(1, 0).mul(&MixedFunction::conj_variable(1, 0));
        assert!(detect_polar_weights(&f, 12).is_none());
    }

    #[test]
    fn conjugate_term_breaks_polar_action() {
        // F = z + conj(z): the conj term scales inversely
        let f = MixedFunction::variable(1, 0).add(&MixedFunction::conj_variable(1, 0));
        let w = PolarWeights { p_wts: vec![1], k: 1 };
        assert!(!verify_polar_action(&f, &w, 10));
    }

    #[test]
    fn detection_is_canonical() {
        let g = catalog::xy_z2();
        let a = detect_radial_weights(&g, 12).unwrap();
        let b = detect_radial_weights(&g, 12).unwrap();
        assert_eq!(a, b);
        let f = MixedFunction::variable(2, 0).mul(&MixedFunction::conj_variable(2, 1));
        assert_eq!(detect_polar_weights(&f, 5), detect_polar_weights(&f, 5));
    }

    #[test]
    fn euler_field_entries() {
        let w = RadialWeights { q: vec![1, 1, 1], d: 2 };
        let e = euler_field(&w);
        assert_eq!(e.eval(&[0.3, -0.2, 0.7]), vec![0.3, -0.2, 0.7]);
        let w2 = RadialWeights { q: vec![2, 1, 1, 1], d: 2 };
        let e2 = euler_field(&w2);
        assert_eq!(e2.eval(&[1.0, 1.0, 1.0, 1.0]), vec![2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn euler_identity_for_catalog_radial_germs() {
        // J(x) * gamma(x) = d * G(x)
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        for g in [catalog::xy_z2(), catalog::cone_projection(4)] {
            let w = detect_radial_weights(&g, 12).unwrap();
            let gamma = euler_field(&w);
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..100 {
                let x: Vec<f64> =
                    (0..g.source_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let jac = g.jacobian_at(&x);
                let gv = gamma.eval(&x);
                let gx = g.eval(&x);
                for (row, &gi) in jac.iter().zip(&gx) {
                    let lhs: f64 = row.iter().zip(&gv).map(|(a, b)| a * b).sum();
                    let rhs = w.d as f64 * gi;
                    assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
                }
            }
        }
    }
}
