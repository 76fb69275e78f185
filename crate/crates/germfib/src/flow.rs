//! The blow-away machinery: tangent projections, the two gradient fields
//! `v1`, `v2` on the fibers of `G/||G||`, the bisector field, the
//! decomposition coefficients, and adaptive flow integration from the tube
//! out to the sphere.

use nalgebra::{DMatrix, DVector};
use num::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::germ::MapGerm;
use crate::newton::{newton_project, NewtonOpts};
use crate::poly::{rho, Polynomial};
use crate::report::{ConditionId, ConditionReport, Verdict};
use crate::variety::{numerical_rank_rows, DeterminantalSystem};
use crate::witness::{random_direction, task_rng};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between two nonzero vectors, in radians.
pub fn angular_distance(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return std::f64::consts::PI;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0).acos()
}

/// Remove from `w` its least-squares projection onto `span(normals)`.
///
/// Orthonormalizes the normals with a relative rank threshold, so
/// degenerate normal sets are handled; with no normals `w` is returned
/// unchanged. Idempotent, and the output is orthogonal to every normal.
pub fn tangent_project(w: &[f64], normals: &[Vec<f64>]) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let scale = normals.iter().map(|v| norm(v)).fold(0.0f64, f64::max);
    for v in normals {
        let mut u = v.clone();
        for b in &basis {
            let c = dot(&u, b);
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui -= c * bi;
            }
        }
        let n = norm(&u);
        if n > 1e-10 * scale.max(1e-300) {
            for ui in u.iter_mut() {
                *ui /= n;
            }
            basis.push(u);
        }
    }
    let mut out = w.to_vec();
    for b in &basis {
        let c = dot(&out, b);
        for (oi, bi) in out.iter_mut().zip(b) {
            *oi -= c * bi;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FieldFlags {
    pub v1_zero: bool,
    pub v2_zero: bool,
    pub omega_rank_drop: bool,
}

impl FieldFlags {
    pub fn any(&self) -> bool {
        self.v1_zero || self.v2_zero || self.omega_rank_drop
    }
}

/// The local field data at one point: the fiber-tangent projections of
/// `grad ||G||^2` and `grad rho`, the bisector field, and the coefficients
/// of `grad rho = a grad ||G||^2 + sum b_j Omega_j`.
#[derive(Debug, Clone, Serialize)]
pub struct FieldEval {
    pub x: Vec<f64>,
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    /// Bisector `v1/||v1|| + v2/||v2||`; zero when a flag is set.
    pub nu: Vec<f64>,
    /// Closed-form coefficient `<grad rho, v1> / ||v1||^2` (undefined when
    /// `v1` vanishes).
    pub a: Option<f64>,
    /// The same coefficient from the least-squares decomposition.
    pub a_least_squares: f64,
    pub b: Vec<f64>,
    /// Norm of the decomposition defect at `x`.
    pub residual_rho: f64,
    pub flags: FieldFlags,
}

/// Evaluate the blow-away field data at `x`. Meaningful where
/// `||G(x)|| > tol_zero` and off the discriminant preimage; degeneracies
/// set flags rather than erroring.
pub fn field_eval(g: &MapGerm, x: &[f64], tol_zero: f64) -> FieldEval {
    let m = g.source_dim();
    let p = g.target_dim();
    assert_eq!(x.len(), m);
    let omegas: Vec<Vec<f64>> = if p >= 2 {
        g.omega_fields().expect("p >= 2").eval_rows(x)
    } else {
        Vec::new()
    };
    let grad_g2 = g.norm_squared_gradient().eval(x);
    let grad_rho: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();

    let v1 = tangent_project(&grad_g2, &omegas);
    let v2 = tangent_project(&grad_rho, &omegas);

    let mut flags = FieldFlags::default();
    let n1 = norm(&v1);
    let n2 = norm(&v2);
    flags.v1_zero = n1 <= 1e-10 * norm(&grad_g2).max(1e-300);
    flags.v2_zero = n2 <= 1e-10 * norm(&grad_rho).max(1e-300);
    if p >= 2 && g.eval_norm(x) > tol_zero {
        flags.omega_rank_drop = numerical_rank_rows(&omegas, 1e-8) < p - 1;
    }

    let nu = if flags.v1_zero || flags.v2_zero {
        vec![0.0; m]
    } else {
        v1.iter()
            .zip(&v2)
            .map(|(a, b)| a / n1 + b / n2)
            .collect()
    };

    let a = if flags.v1_zero {
        None
    } else {
        Some(dot(&grad_rho, &v1) / (n1 * n1))
    };

    // least-squares decomposition of grad rho over (grad ||G||^2, Omegas)
    let ncols = 1 + omegas.len();
    let mat = DMatrix::from_fn(m, ncols, |i, j| {
        if j == 0 {
            grad_g2[i]
        } else {
            omegas[j - 1][i]
        }
    });
    let rhs = DVector::from_column_slice(&grad_rho);
    let svd = mat.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |acc, &v| acc.max(v));
    let coeffs = if smax > 0.0 {
        svd.solve(&rhs, 1e-12 * smax).unwrap_or_else(|_| DVector::zeros(ncols))
    } else {
        DVector::zeros(ncols)
    };
    let defect = &rhs - &mat * &coeffs;
    FieldEval {
        x: x.to_vec(),
        v1,
        v2,
        nu,
        a,
        a_least_squares: coeffs[0],
        b: coeffs.iter().skip(1).copied().collect(),
        residual_rho: defect.norm(),
        flags,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberKind {
    /// Points of `{G = eta * y}` inside the ball of radius `eps`.
    Tube,
    /// Points of `{G/||G|| = y}` on the sphere of radius `eps`.
    Sphere,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberPoint {
    pub coords: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberSample {
    pub kind: FiberKind,
    pub y: Vec<f64>,
    pub points: Vec<FiberPoint>,
    pub attempted: usize,
}

/// The sphere-fiber system for direction `y`: pairwise cross equations
/// `G_j y_i - G_i y_j = 0` (polynomial, no division by `||G||`) plus the
/// sphere constraint; the half `<G, y> > 0` is enforced by sign filtering.
pub fn sphere_fiber_system(g: &MapGerm, y: &[f64], eps: f64) -> DeterminantalSystem {
    let m = g.source_dim();
    let p = g.target_dim();
    assert_eq!(y.len(), p);
    let mut eqs = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let yi = Polynomial::constant(m, BigRational::from_float(y[i]).unwrap());
            let yj = Polynomial::constant(m, BigRational::from_float(y[j]).unwrap());
            eqs.push(g.components()[j].mul(&yi).sub(&g.components()[i].mul(&yj)));
        }
    }
    let r2 = Polynomial::constant(m, BigRational::from_float(eps * eps).unwrap());
    eqs.push(rho(m).sub(&r2));
    DeterminantalSystem::from_equations(m, eqs)
}

/// Sample a tube or sphere fiber over the unit direction `y`.
///
/// Callers must keep `y` angularly away from every discriminant ray. Zero
/// retained points is a diagnostic outcome, not an error.
#[allow(clippy::too_many_arguments)]
pub fn sample_fiber(
    g: &MapGerm,
    kind: FiberKind,
    y: &[f64],
    eps: f64,
    eta: f64,
    n: usize,
    seed: u64,
    tol_variety: f64,
) -> FiberSample {
    let m = g.source_dim();
    assert!((norm(y) - 1.0).abs() < 1e-8, "y must be a unit vector");
    let system = match kind {
        FiberKind::Tube => {
            assert!(eta < eps, "tube needs eta << eps");
            let target: Vec<f64> = y.iter().map(|v| eta * v).collect();
            g.fiber_system(&target)
        }
        FiberKind::Sphere => sphere_fiber_system(g, y, eps),
    };
    let opts = NewtonOpts {
        tol: tol_variety,
        trust_radius: 4.0 * eps,
        ..Default::default()
    };
    let mut points = Vec::new();
    for task in 0..n {
        let mut rng = task_rng(seed ^ 0x51BE, task as u64);
        let dir = random_direction(&mut rng, m);
        let radius: f64 = match kind {
            FiberKind::Tube => eps * rng.gen_range(0.05..0.95),
            FiberKind::Sphere => eps,
        };
        let seed_pt: Vec<f64> = dir.iter().map(|d| d * radius).collect();
        let Some(x) = newton_project(&system, &seed_pt, &opts) else {
            continue;
        };
        let keep = match kind {
            FiberKind::Tube => norm(&x) < eps,
            FiberKind::Sphere => dot(&g.eval(&x), y) > 0.0,
        };
        if !keep {
            continue;
        }
        points.push(FiberPoint {
            residual: system.max_residual(&x),
            coords: x,
        });
    }
    points.sort_by(|a, b| {
        a.coords
            .partial_cmp(&b.coords)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    FiberSample {
        kind,
        y: y.to_vec(),
        points,
        attempted: n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedSphere,
    ReachedMaxSteps,
    Degeneracy,
    LeftDomain,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: Vec<f64>,
    pub rho: f64,
    pub gnorm2: f64,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
}

impl Trajectory {
    /// Largest angular deviation of `G/||G||` from its initial direction.
    pub fn drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|s| angular_distance(&s.psi, &first.psi))
            .fold(0.0, f64::max)
    }

    pub fn end(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BlowAwayOpts {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Total angular drift allowed for `G/||G||` along the trajectory.
    pub drift_budget: f64,
    pub tol_zero: f64,
}

impl Default for BlowAwayOpts {
    fn default() -> Self {
        BlowAwayOpts {
            initial_step: 1e-3,
            min_step: 1e-12,
            max_step: 2e-2,
            max_steps: 200_000,
            drift_budget: 1e-6,
            tol_zero: 1e-9,
        }
    }
}

fn normalized_field(g: &MapGerm, x: &[f64], tol_zero: f64) -> Result<Vec<f64>, FieldFlags> {
    let fe = field_eval(g, x, tol_zero);
    if fe.flags.any() {
        return Err(fe.flags);
    }
    let n = norm(&fe.nu);
    if n == 0.0 {
        return Err(FieldFlags {
            v1_zero: true,
            v2_zero: true,
            omega_rank_drop: false,
        });
    }
    Ok(fe.nu.iter().map(|v| v / n).collect())
}

fn make_sample(g: &MapGerm, t: f64, x: &[f64]) -> TrajectorySample {
    let gx = g.eval(x);
    let gn = norm(&gx);
    let psi: Vec<f64> = if gn > 0.0 {
        gx.iter().map(|v| v / gn).collect()
    } else {
        vec![0.0; gx.len()]
    };
    TrajectorySample {
        t,
        x: x.to_vec(),
        rho: dot(x, x),
        gnorm2: gn * gn,
        psi,
    }
}

/// Integrate the normalized bisector field from `x0` until the trajectory
/// crosses the sphere of radius `eps`.
///
/// Classical 4th-order steps with adaptive step size: a step is accepted
/// only if both `rho` and `||G||^2` strictly increase and the per-step
/// angular drift of `G/||G||` stays within budget; the sphere crossing is
/// refined by bisection to `| ||x|| - eps | < 1e-10`.
pub fn blow_away(g: &MapGerm, x0: &[f64], eps: f64, opts: &BlowAwayOpts) -> Trajectory {
    let mut samples = vec![make_sample(g, 0.0, x0)];
    if norm(x0) >= eps {
        return Trajectory {
            samples,
            termination: Termination::ReachedSphere,
        };
    }

    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut h = opts.initial_step;
    // budget half spent on per-step tolerance, half kept as margin
    let per_step_drift = 0.5 * opts.drift_budget * opts.initial_step;

    let rk4 = |x: &[f64], h: f64| -> Result<Vec<f64>, FieldFlags> {
        let k1 = normalized_field(g, x, opts.tol_zero)?;
        let x2: Vec<f64> = x.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
        let k2 = normalized_field(g, &x2, opts.tol_zero)?;
        let x3: Vec<f64> = x.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
        let k3 = normalized_field(g, &x3, opts.tol_zero)?;
        let x4: Vec<f64> = x.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = normalized_field(g, &x4, opts.tol_zero)?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, a)| a + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    };

    for _ in 0..opts.max_steps {
        let cand = match rk4(&x, h) {
            Ok(c) => c,
            Err(_) => {
                return Trajectory {
                    samples,
                    termination: Termination::Degeneracy,
                };
            }
        };
        let prev = samples.last().unwrap();
        let cs = make_sample(g, t + h, &cand);
        let monotone = cs.rho > prev.rho && cs.gnorm2 > prev.gnorm2;
        let step_drift = angular_distance(&cs.psi, &prev.psi);
        if !monotone || step_drift > per_step_drift * (h / opts.initial_step).max(1.0) {
            h *= 0.5;
            if h < opts.min_step {
                return Trajectory {
                    samples,
                    termination: Termination::Degeneracy,
                };
            }
            continue;
        }
        if cs.gnorm2 < opts.tol_zero * opts.tol_zero {
            return Trajectory {
                samples,
                termination: Termination::LeftDomain,
            };
        }
        if norm(&cand) >= eps {
            // bisect the step fraction to land on the sphere
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            let mut hit = cand.clone();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let probe = match rk4(&x, h * mid) {
                    Ok(p) => p,
                    Err(_) => break,
                };
                let r = norm(&probe);
                if (r - eps).abs() < 1e-10 {
                    hit = probe;
                    lo = mid;
                    break;
                }
                if r < eps {
                    lo = mid;
                } else {
                    hi = mid;
                    hit = probe;
                }
            }
            samples.push(make_sample(g, t + h * 0.5 * (lo + hi), &hit));
            return Trajectory {
                samples,
                termination: Termination::ReachedSphere,
            };
        }
        t += h;
        x = cand;
        samples.push(cs);
        h = (h * 1.25).min(opts.max_step);
    }
    Trajectory {
        samples,
        termination: Termination::ReachedMaxSteps,
    }
}

/// Blow `n` tube-fiber points over `y` away to the sphere and verify that
/// each lands on the sphere fiber over the same direction.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_evidence(
    g: &MapGerm,
    y: &[f64],
    eps: f64,
    eta: f64,
    n: usize,
    seed: u64,
    arc_id: Option<usize>,
    tol_variety: f64,
) -> ConditionReport {
    let tube = sample_fiber(g, FiberKind::Tube, y, eps, eta, 4 * n, seed, tol_variety);
    let sphere_sys = sphere_fiber_system(g, y, eps);
    let opts = BlowAwayOpts::default();

    if tube.points.is_empty() {
        // directions outside the image carry empty fibers on both sides;
        // the equivalence over them is vacuous
        let sphere = sample_fiber(g, FiberKind::Sphere, y, eps, eta, 4 * n, seed, tol_variety);
        let verdict = if sphere.points.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        };
        return ConditionReport::new(ConditionId::EquivalenceEvidence, verdict, seed)
            .with_evidence(serde_json::json!({
                "y": y,
                "arc": arc_id,
                "vacuous": sphere.points.is_empty(),
                "tube_points_found": 0,
                "sphere_points_found": sphere.points.len(),
            }));
    }

    let mut runs = 0usize;
    let mut reached = 0usize;
    let mut max_drift = 0.0f64;
    let mut max_sphere_residual = 0.0f64;
    let mut degenerate = 0usize;
    for pt in tube.points.iter().take(n) {
        runs += 1;
        let traj = blow_away(g, &pt.coords, eps, &opts);
        match traj.termination {
            Termination::ReachedSphere => {
                reached += 1;
                max_drift = max_drift.max(traj.drift());
                let end = traj.end().unwrap();
                max_sphere_residual =
                    max_sphere_residual.max(sphere_sys.max_residual(&end.x));
            }
            Termination::Degeneracy => degenerate += 1,
            _ => {}
        }
    }

    let verdict = if runs == 0 || degenerate > 0 {
        Verdict::Inconclusive
    } else if reached == runs && max_drift < 1e-6 && max_sphere_residual < 1e-6 {
        Verdict::Pass
    } else if reached < runs {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };

    ConditionReport::new(ConditionId::EquivalenceEvidence, verdict, seed)
        .with_evidence(serde_json::json!({
            "y": y,
            "arc": arc_id,
            "eps": eps,
            "eta": eta,
            "trajectories": runs,
            "reached_sphere": reached,
            "degenerate": degenerate,
            "max_drift": max_drift,
            "max_sphere_residual": max_sphere_residual,
            "tube_points_found": tube.points.len(),
        }))
        .with_tolerances(serde_json::json!({
            "drift": 1e-6,
            "sphere_residual": 1e-6,
            "tol_variety": tol_variety,
        }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::variety::milnor_set_system;
    use crate::witness::{witness_sample, Region};

    #[test]
    fn tangent_project_basics() {
        assert_eq!(
            tangent_project(&[1.0, 1.0], &[vec![0.0, 1.0]]),
            vec![1.0, 0.0]
        );
        // w in span(normals) -> zero
        let out = tangent_project(&[2.0, 4.0], &[vec![1.0, 2.0]]);
        assert!(norm(&out) < 1e-12);
        // no normals -> unchanged
        assert_eq!(tangent_project(&[0.3, -0.7], &[]), vec![0.3, -0.7]);
    }

    #[test]
    fn tangent_project_is_idempotent_and_orthogonal() {
        let normals = vec![vec![1.0, 2.0, -1.0], vec![0.5, -0.3, 0.9]];
        let w = [0.2, 0.7, -0.4];
        let once = tangent_project(&w, &normals);
        let twice = tangent_project(&once, &normals);
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-12);
        }
        for nvec in &normals {
            assert!(dot(&once, nvec).abs() < 1e-12 * norm(nvec) * norm(&once).max(1.0));
        }
    }

    #[test]
    fn field_on_milnor_set_has_positive_a_and_small_defect() {
        let g = catalog::xy_z2();
        let fe = field_eval(&g, &[0.3, 0.3, 0.2], 1e-9);
        assert!(!fe.flags.any(), "{:?}", fe.flags);
        assert!(fe.residual_rho < 1e-9, "residual {}", fe.residual_rho);
        assert!(fe.a.unwrap() > 0.0);
        assert!((fe.a.unwrap() - fe.a_least_squares).abs() < 1e-8 * fe.a.unwrap().abs());
    }

    #[test]
    fn v1_v2_independent_off_milnor_set() {
        // linear projection: M(G) = {x3 = 0}; off it v1 and v2 differ
        let g = catalog::linear_projection(3, 2);
        let fe = field_eval(&g, &[0.1, 0.2, 0.3], 1e-9);
        assert!(!fe.flags.any());
        let g11 = dot(&fe.v1, &fe.v1);
        let g22 = dot(&fe.v2, &fe.v2);
        let g12 = dot(&fe.v1, &fe.v2);
        let gram = g11 * g22 - g12 * g12;
        assert!(gram > 1e-12 * g11 * g22);
    }

    #[test]
    fn v1_v2_parallel_on_milnor_witnesses() {
        let g = catalog::xy_z2();
        let sys = milnor_set_system(&g).unwrap();
        let ws = witness_sample(&sys, Region::Sphere(0.5), 60, 3, &Default::default(), None);
        let mut checked = 0;
        for p in &ws.points {
            // keep only the {x = +-y} sheet off the discriminant preimage;
            // on {z = 0} the Omega field vanishes and the dichotomy is void
            let on_cone = (p.coords[0].abs() - p.coords[1].abs()).abs() < 1e-8;
            if !on_cone || p.coords[2].abs() < 0.05 {
                continue;
            }
            let fe = field_eval(&g, &p.coords, 1e-9);
            if fe.flags.any() {
                continue;
            }
            // Gram determinant evaluated stably as the orthogonal residual:
            // gram / (g11 g22) = ||v2 - proj_{v1} v2||^2 / g22
            let g11 = dot(&fe.v1, &fe.v1);
            let g22 = dot(&fe.v2, &fe.v2);
            let g12 = dot(&fe.v1, &fe.v2);
            let e: Vec<f64> = fe
                .v2
                .iter()
                .zip(&fe.v1)
                .map(|(b, a)| b - (g12 / g11) * a)
                .collect();
            let rel = dot(&e, &e) / g22;
            assert!(rel < 1e-16, "relative gram {} at {:?}", rel, p.coords);
            checked += 1;
        }
        assert!(checked > 10);
    }

    #[test]
    fn tube_fiber_of_xy_z2_solves_both_equations() {
        let g = catalog::xy_z2();
        let y = [0.6, 0.8];
        let fs = sample_fiber(&g, FiberKind::Tube, &y, 0.5, 1e-3, 100, 17, 1e-10);
        assert!(!fs.points.is_empty());
        for p in &fs.points {
            let gx = g.eval(&p.coords);
            assert!((gx[0] - 6e-4).abs() < 1e-10);
            assert!((gx[1] - 8e-4).abs() < 1e-10);
            assert!(norm(&p.coords) < 0.5);
            // z = +-sqrt(8e-4)
            assert!((p.coords[2].abs() - (8e-4f64).sqrt()).abs() < 1e-7);
        }
    }

    #[test]
    fn sphere_fiber_of_xy_z2_is_aligned() {
        let g = catalog::xy_z2();
        let y = [0.6, 0.8];
        let fs = sample_fiber(&g, FiberKind::Sphere, &y, 0.5, 1e-3, 100, 23, 1e-10);
        assert!(!fs.points.is_empty());
        for p in &fs.points {
            assert!(p.residual < 1e-10);
            assert!((norm(&p.coords) - 0.5).abs() < 1e-9);
            let gx = g.eval(&p.coords);
            // xy * 0.8 = z^2 * 0.6 and positive alignment
            assert!((gx[0] * y[1] - gx[1] * y[0]).abs() < 1e-10);
            assert!(dot(&gx, &y) > 0.0);
        }
    }

    #[test]
    fn blow_away_reaches_sphere_with_monotone_invariants() {
        let g = catalog::xy_z2();
        let y = [0.6, 0.8];
        let fs = sample_fiber(&g, FiberKind::Tube, &y, 0.5, 5e-3, 30, 5, 1e-10);
        let pt = &fs.points[0];
        let traj = blow_away(&g, &pt.coords, 0.5, &BlowAwayOpts::default());
        assert_eq!(traj.termination, Termination::ReachedSphere);
        assert!(traj.drift() < 1e-6, "drift {}", traj.drift());
        let end = traj.end().unwrap();
        assert!((norm(&end.x) - 0.5).abs() < 1e-10);
        for w in traj.samples.windows(2) {
            assert!(w[1].rho > w[0].rho);
            assert!(w[1].gnorm2 > w[0].gnorm2);
        }
    }

    #[test]
    fn blow_away_from_sphere_is_immediate() {
        let g = catalog::xy_z2();
        let x0 = [0.3, 0.3, (0.25f64 - 0.18).sqrt()];
        let traj = blow_away(&g, &x0, 0.5, &BlowAwayOpts::default());
        assert_eq!(traj.termination, Termination::ReachedSphere);
        assert_eq!(traj.samples.len(), 1);
    }

    #[test]
    fn scaling_curve_and_flow_land_on_same_direction() {
        // for a radial homogeneous germ the weighted scaling curve t * x0
        // stays on one fiber of G/||G||; the bisector flow must agree
        let g = catalog::xy_z2();
        let x0 = [0.05, 0.08, 0.06];
        let psi0 = {
            let gx = g.eval(&x0);
            let n = norm(&gx);
            gx.iter().map(|v| v / n).collect::<Vec<_>>()
        };
        let traj = blow_away(&g, &x0, 0.5, &BlowAwayOpts::default());
        assert_eq!(traj.termination, Termination::ReachedSphere);
        let end = traj.end().unwrap();
        // scaling curve direction at any t equals psi0 (degree-2 scaling)
        assert!(angular_distance(&end.psi, &psi0) < 1e-6);
    }

    #[test]
    fn equivalence_evidence_passes_for_xy_z2() {
        let g = catalog::xy_z2();
        let rep = equivalence_evidence(&g, &[0.6, 0.8], 0.5, 5e-3, 10, 3, Some(0), 1e-10);
        assert_eq!(rep.verdict, Verdict::Pass, "evidence: {}", rep.evidence);
    }
}
