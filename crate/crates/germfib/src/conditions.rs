//! The condition lab: discriminant sampling, niceness criteria, radiality,
//! the main cone condition, rho-regularity of the normalized map, Milnor
//! image coverage, and existence of the blow-away field.

use serde::Serialize;

use crate::flow::{angular_distance, field_eval, tangent_project};
use crate::germ::{GermError, MapGerm};
use crate::homogeneity::{detect_radial_weights, verify_radial_action};
use crate::newton::{newton_project, NewtonOpts};
use crate::report::{ConditionId, ConditionReport, Verdict};
use crate::variety::{milnor_set_system, psi_milnor_set_system, DeterminantalSystem};
use crate::witness::{cluster_components, task_rng, witness_sample, Region, WitnessSet};
use crate::poly::Polynomial;
use num::BigRational;
use rand::Rng;

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The shrinking-radius ladder realizing germ-at-origin semantics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Ladder {
    pub r0: f64,
    pub rungs: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder { r0: 0.5, rungs: 4 }
    }
}

impl Ladder {
    pub fn radii(&self) -> Vec<f64> {
        (0..self.rungs).map(|k| self.r0 / (1u64 << k) as f64).collect()
    }
}

/// One source of truth for the sampling sizes and tolerances of the checks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckParams {
    pub ladder: Ladder,
    pub samples_per_rung: usize,
    pub seed: u64,
    #[serde(skip)]
    pub newton: NewtonOpts,
    pub tol_zero: f64,
    /// Mapped images below this norm count as the origin when binning
    /// discriminant directions (looser than `tol_zero`: the image of a
    /// polished witness inherits an amplified projection error).
    pub origin_tol: f64,
    /// Angular bin width when merging image directions into rays.
    pub angular_bin: f64,
    /// Angular tolerance for membership in a discriminant ray.
    pub angular_tol: f64,
    pub link_scale: f64,
    /// A witness within `exclude_scale * ||x||` of the discriminant
    /// preimage is tagged excluded.
    pub exclude_scale: f64,
    pub weight_bound: u32,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            ladder: Ladder::default(),
            samples_per_rung: 400,
            seed: 0,
            newton: NewtonOpts::default(),
            tol_zero: 1e-9,
            origin_tol: 1e-6,
            angular_bin: 1e-3,
            angular_tol: 1e-2,
            link_scale: 0.2,
            exclude_scale: 0.2,
            weight_bound: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryStatus {
    NotComputed,
    EmptyByCriterion,
    UserDeclared,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscRay {
    pub direction: Vec<f64>,
    /// Ladder radii at which this direction was observed.
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscriminantSample {
    pub rays: Vec<DiscRay>,
    /// Binned unit directions observed at each rung, for cross-rung
    /// stability comparison.
    pub rung_directions: Vec<Vec<Vec<f64>>>,
    pub rung_radii: Vec<f64>,
    /// True when every observed image of the singular set had norm below
    /// `origin_tol`.
    pub origin_only: bool,
    pub boundary_status: BoundaryStatus,
}

impl DiscriminantSample {
    pub fn directions(&self) -> Vec<&[f64]> {
        self.rays.iter().map(|r| r.direction.as_slice()).collect()
    }

    /// Angular distance of `w` to the nearest ray; `PI` with no rays.
    pub fn angular_distance_to_rays(&self, w: &[f64]) -> f64 {
        self.rays
            .iter()
            .map(|r| angular_distance(w, &r.direction))
            .fold(std::f64::consts::PI, f64::min)
    }
}

fn bin_direction(dirs: &mut Vec<Vec<f64>>, u: Vec<f64>, bin: f64) {
    if dirs.iter().all(|d| angular_distance(d, &u) > bin) {
        dirs.push(u);
    }
}

/// Probe surjectivity near the origin: the image boundary is declared empty
/// when fibers over a spread of small target directions are all nonempty.
fn surjective_near_origin(g: &MapGerm, seed: u64, tol: f64) -> bool {
    let p = g.target_dim();
    let eta = 1e-3;
    let trials = 24;
    for task in 0..trials {
        let mut rng = task_rng(seed ^ 0xD15C, task);
        let dir = crate::witness::random_direction(&mut rng, p);
        let y: Vec<f64> = dir.iter().map(|d| d * eta).collect();
        let sys = g.fiber_system(&y);
        let mut hit = false;
        for sub in 0..8u64 {
            let mut srng = task_rng(seed ^ 0xF1BE, task * 97 + sub);
            let x0: Vec<f64> = crate::witness::random_direction(&mut srng, g.source_dim())
                .iter()
                .map(|d| d * 0.3)
                .collect();
            let opts = NewtonOpts {
                tol,
                trust_radius: 2.0,
                ..Default::default()
            };
            if newton_project(&sys, &x0, &opts).is_some() {
                hit = true;
                break;
            }
        }
        if !hit {
            return false;
        }
    }
    true
}

/// Map singular-set witnesses through `G` at each ladder rung and bin the
/// image directions into candidate discriminant rays.
pub fn sample_discriminant(g: &MapGerm, params: &CheckParams) -> DiscriminantSample {
    let sing = g.singular_set_system();
    let radii = params.ladder.radii();
    let mut rung_directions: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut rays: Vec<DiscRay> = Vec::new();
    let mut any_nonzero = false;
    for (k, &r) in radii.iter().enumerate() {
        let ws = witness_sample(
            sing,
            Region::Sphere(r),
            params.samples_per_rung,
            params.seed.wrapping_add(1000 + k as u64),
            &params.newton,
            None,
        );
        let mut dirs: Vec<Vec<f64>> = Vec::new();
        for pt in &ws.points {
            let w = g.eval(&pt.coords);
            let n = norm(&w);
            if n < params.origin_tol {
                continue;
            }
            any_nonzero = true;
            bin_direction(&mut dirs, w.iter().map(|v| v / n).collect(), params.angular_bin);
        }
        dirs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        for d in &dirs {
            match rays
                .iter_mut()
                .find(|ray| angular_distance(&ray.direction, d) < params.angular_tol)
            {
                Some(ray) => ray.radii.push(r),
                None => rays.push(DiscRay {
                    direction: d.clone(),
                    radii: vec![r],
                }),
            }
        }
        rung_directions.push(dirs);
    }
    rays.sort_by(|a, b| {
        a.direction
            .partial_cmp(&b.direction)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let boundary_status = if g.has_flag("image_boundary_empty") {
        BoundaryStatus::UserDeclared
    } else if surjective_near_origin(g, params.seed, params.newton.tol.max(1e-9)) {
        BoundaryStatus::EmptyByCriterion
    } else {
        BoundaryStatus::NotComputed
    };
    DiscriminantSample {
        rays,
        rung_directions,
        rung_radii: radii,
        origin_only: !any_nonzero,
        boundary_status,
    }
}

/// Distance-based membership test for the discriminant preimage: a point is
/// near `G^{-1}(Disc G)` when a Newton projection onto `{G = 0}` or onto a
/// ray-preimage system lands within `exclude_scale * ||x||`.
pub struct ExclusionZone {
    zero_sys: DeterminantalSystem,
    ray_systems: Vec<(DeterminantalSystem, Vec<f64>)>,
    components: Vec<Polynomial>,
    scale: f64,
}

impl ExclusionZone {
    pub fn new(g: &MapGerm, ds: &DiscriminantSample, scale: f64) -> Self {
        let m = g.source_dim();
        let p = g.target_dim();
        let mut ray_systems = Vec::new();
        for ray in &ds.rays {
            let d = &ray.direction;
            let mut eqs = Vec::new();
            for i in 0..p {
                for j in (i + 1)..p {
                    let di = Polynomial::constant(m, BigRational::from_float(d[i]).unwrap());
                    let dj = Polynomial::constant(m, BigRational::from_float(d[j]).unwrap());
                    eqs.push(g.components()[j].mul(&di).sub(&g.components()[i].mul(&dj)));
                }
            }
            if eqs.is_empty() {
                continue; // p = 1: ray preimages are not cut out by equations
            }
            ray_systems.push((DeterminantalSystem::from_equations(m, eqs), d.clone()));
        }
        ExclusionZone {
            zero_sys: g.zero_set_system(),
            ray_systems,
            components: g.components().to_vec(),
            scale,
        }
    }

    pub fn is_near(&self, x: &[f64]) -> bool {
        let budget = self.scale * norm(x);
        if budget == 0.0 {
            return true;
        }
        // loose residual target: the projection only measures displacement
        let opts = NewtonOpts {
            tol: 1e-8,
            trust_radius: budget,
            ..Default::default()
        };
        if let Some(y) = newton_project(&self.zero_sys, x, &opts) {
            if dist(x, &y) < budget {
                return true;
            }
        }
        for (sys, d) in &self.ray_systems {
            if let Some(y) = newton_project(sys, x, &opts) {
                if dist(x, &y) < budget {
                    let gy: Vec<f64> = self.components.iter().map(|c| c.eval(&y)).collect();
                    if dot(&gy, d) > -1e-8 {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Milnor-set witnesses at radius `r` with discriminant-preimage exclusion
/// tags and connected-component labels.
pub fn milnor_witnesses(
    g: &MapGerm,
    ds: &DiscriminantSample,
    r: f64,
    n: usize,
    seed: u64,
    params: &CheckParams,
) -> Result<WitnessSet, GermError> {
    let sys = milnor_set_system(g)?;
    let zone = ExclusionZone::new(g, ds, params.exclude_scale);
    let is_near = |x: &[f64]| zone.is_near(x);
    let ws = witness_sample(&sys, Region::Sphere(r), n, seed, &params.newton, Some(&is_near));
    Ok(cluster_components(&ws, params.link_scale, r))
}

/// Niceness: pass when one sufficient criterion holds (verified radial
/// weights; declared-coprime product provenance; a regular zero point).
/// Never fail — niceness is not decidable here.
pub fn check_niceness(g: &MapGerm, params: &CheckParams) -> ConditionReport {
    if let Some(w) = detect_radial_weights(g, params.weight_bound) {
        if verify_radial_action(g, &w, 1000) {
            return ConditionReport::new(ConditionId::Nice, Verdict::Pass, params.seed)
                .with_evidence(serde_json::json!({
                    "criterion": "radial_weighted_homogeneity",
                    "weights": w,
                }))
                .with_implication("radial_weighted_homogeneity_criterion", vec![]);
        }
    }
    if g.provenance().is_some() && g.has_flag("fg_coprime") {
        return ConditionReport::new(ConditionId::Nice, Verdict::Pass, params.seed)
            .with_evidence(serde_json::json!({
                "criterion": "coprime_product_provenance",
                "note": "mixed product f * conj(g) with declared coprime factors",
            }))
            .with_implication("coprime_product_criterion", vec![]);
    }
    // look for a zero point of G that is robustly off the singular set
    let zero_sys = g.zero_set_system();
    let sing = g.singular_set_system();
    for (k, r) in params.ladder.radii().into_iter().enumerate() {
        let ws = witness_sample(
            &zero_sys,
            Region::Sphere(r),
            params.samples_per_rung.min(100),
            params.seed.wrapping_add(2000 + k as u64),
            &params.newton,
            None,
        );
        for pt in &ws.points {
            if sing.max_residual(&pt.coords) > 1e-4 {
                return ConditionReport::new(ConditionId::Nice, Verdict::Pass, params.seed)
                    .with_evidence(serde_json::json!({
                        "criterion": "regular_zero_point",
                        "point": pt.coords,
                        "singular_residual": sing.max_residual(&pt.coords),
                    }))
                    .with_implication("regular_zero_point_criterion", vec![]);
            }
        }
    }
    ConditionReport::new(ConditionId::Nice, Verdict::Inconclusive, params.seed).with_evidence(
        serde_json::json!({
            "note": "no sufficient criterion verified; niceness is undecided, not refuted",
        }),
    )
}

/// Radiality of the discriminant: the direction set must be stable across
/// ladder rungs.
pub fn check_radial_discriminant(ds: &DiscriminantSample, params: &CheckParams) -> ConditionReport {
    let tolerances = serde_json::json!({
        "angular_hausdorff": params.angular_tol,
        "angular_bin": params.angular_bin,
    });
    if ds.origin_only {
        return ConditionReport::new(ConditionId::RadialDisc, Verdict::Pass, params.seed)
            .with_evidence(serde_json::json!({
                "origin_only": true,
                "boundary_status": ds.boundary_status,
            }))
            .with_tolerances(tolerances);
    }
    let occupied: Vec<&Vec<Vec<f64>>> =
        ds.rung_directions.iter().filter(|d| !d.is_empty()).collect();
    if occupied.len() < 2 {
        return ConditionReport::new(ConditionId::RadialDisc, Verdict::Inconclusive, params.seed)
            .with_evidence(serde_json::json!({
                "note": "directions observed at fewer than two rungs",
            }))
            .with_tolerances(tolerances);
    }
    let mut hausdorff = 0.0f64;
    for a in &occupied {
        for b in &occupied {
            for da in a.iter() {
                let nearest = b
                    .iter()
                    .map(|db| angular_distance(da, db))
                    .fold(std::f64::consts::PI, f64::min);
                hausdorff = hausdorff.max(nearest);
            }
        }
    }
    let stable_rays: Vec<&DiscRay> = ds.rays.iter().filter(|r| r.radii.len() >= 2).collect();
    let evidence = serde_json::json!({
        "rays": ds.rays,
        "hausdorff_angular": hausdorff,
        "boundary_status": ds.boundary_status,
        "caveat": if ds.boundary_status == BoundaryStatus::NotComputed {
            "image-boundary contribution not computed; radiality refers to the sampled rays"
        } else {
            ""
        },
    });
    let verdict = if hausdorff < params.angular_tol && stable_rays.len() == ds.rays.len() {
        Verdict::Pass
    } else if hausdorff > 10.0 * params.angular_tol {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    ConditionReport::new(ConditionId::RadialDisc, verdict, params.seed)
        .with_evidence(evidence)
        .with_tolerances(tolerances)
}

/// The cone condition: witnesses of the Milnor set off the discriminant
/// preimage keep a radius-proportional distance from the zero set, so the
/// closure meets it only at the origin.
pub fn check_condition_main(
    g: &MapGerm,
    ds: &DiscriminantSample,
    params: &CheckParams,
) -> Result<ConditionReport, GermError> {
    let zero_sys = g.zero_set_system();
    let mut per_rung = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut thin_rungs = 0usize;
    for (k, r) in params.ladder.radii().into_iter().enumerate() {
        let ws = milnor_witnesses(
            g,
            ds,
            r,
            params.samples_per_rung,
            params.seed.wrapping_add(3000 + k as u64),
            params,
        )?;
        let retained: Vec<&crate::witness::WitnessPoint> = ws.retained().collect();
        if retained.len() < 5 {
            thin_rungs += 1;
            per_rung.push(serde_json::json!({
                "r": r, "witnesses": retained.len(), "delta": null,
            }));
            continue;
        }
        let mut delta = f64::INFINITY;
        for pt in &retained {
            let opts = NewtonOpts {
                tol: 1e-8,
                trust_radius: 2.0 * r,
                ..Default::default()
            };
            let d = match newton_project(&zero_sys, &pt.coords, &opts) {
                Some(y) => dist(&pt.coords, &y),
                None => 2.0 * r, // no zero point within the trust region
            };
            delta = delta.min(d);
        }
        min_ratio = min_ratio.min(delta / r);
        per_rung.push(serde_json::json!({
            "r": r, "witnesses": retained.len(), "delta": delta, "ratio": delta / r,
        }));
    }
    let all_thin = thin_rungs == params.ladder.rungs;
    let verdict = if all_thin {
        // an empty Milnor complement satisfies the inclusion vacuously, but
        // only when sampling also found the full Milnor set empty
        Verdict::Pass
    } else if thin_rungs > 0 {
        Verdict::Inconclusive
    } else if min_ratio >= 0.05 {
        Verdict::Pass
    } else if min_ratio < 0.005 {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(
        ConditionReport::new(ConditionId::CondMain, verdict, params.seed)
            .with_evidence(serde_json::json!({
                "per_rung": per_rung,
                "min_ratio": if min_ratio.is_finite() { Some(min_ratio) } else { None },
                "note": "shrinking-radius sampling is evidence for the set-germ inclusion, not a certificate of the closure",
            }))
            .with_tolerances(serde_json::json!({ "min_ratio": 0.05 })),
    )
}

/// rho-regularity of the normalized map: witnesses of its nonregular locus
/// away from the zero set must map into the discriminant rays.
pub fn check_rho_regularity_psi(
    g: &MapGerm,
    ds: &DiscriminantSample,
    params: &CheckParams,
) -> Result<ConditionReport, GermError> {
    let sys = psi_milnor_set_system(g)?;
    let mut per_rung = Vec::new();
    let mut worst_angle = 0.0f64;
    let mut robust_violation = false;
    let mut tested = 0usize;
    for (k, r) in params.ladder.radii().into_iter().enumerate() {
        let ws = witness_sample(
            &sys,
            Region::Sphere(r),
            params.samples_per_rung,
            params.seed.wrapping_add(4000 + k as u64),
            &params.newton,
            None,
        );
        let mut rung_worst = 0.0f64;
        let mut rung_tested = 0usize;
        for pt in &ws.points {
            let w = g.eval(&pt.coords);
            if norm(&w) < params.origin_tol {
                continue; // zero-set points are outside the domain of validity
            }
            let ang = ds.angular_distance_to_rays(&w);
            rung_worst = rung_worst.max(ang);
            rung_tested += 1;
            if ang > 10.0 * params.angular_tol && pt.residual < params.newton.tol * 0.1 {
                robust_violation = true;
            }
        }
        tested += rung_tested;
        worst_angle = worst_angle.max(rung_worst);
        per_rung.push(serde_json::json!({
            "r": r, "witnesses": ws.len(), "tested": rung_tested, "worst_angle": rung_worst,
        }));
    }
    let verdict = if robust_violation {
        Verdict::Fail
    } else if tested == 0 {
        // everything converged into the zero set: the nonregular locus is
        // contained in it up to sampling, which is inside the preimage
        Verdict::Pass
    } else if worst_angle < params.angular_tol {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(
        ConditionReport::new(ConditionId::RhoRegularPsi, verdict, params.seed)
            .with_evidence(serde_json::json!({
                "per_rung": per_rung,
                "worst_angle": worst_angle,
                "note": "closure semantics approximated by the shrinking-radius ladder; evidence only",
            }))
            .with_tolerances(serde_json::json!({
                "angular": params.angular_tol,
                "origin_tol": params.origin_tol,
            })),
    )
}

/// Evidence for Milnor-image coverage: over random small regular values the
/// distance minimizer on the fiber lies on the Milnor set.
pub fn check_milnor_image_coverage(
    g: &MapGerm,
    ds: &DiscriminantSample,
    eta: f64,
    n: usize,
    params: &CheckParams,
) -> Result<ConditionReport, GermError> {
    let milnor = milnor_set_system(g)?;
    let p = g.target_dim();
    let m = g.source_dim();
    let mut checked = 0usize;
    let mut failures = 0usize;
    let mut outside_image = 0usize;
    let mut worst_residual = 0.0f64;
    let mut task = 0u64;
    while checked < n && task < 20 * n as u64 {
        task += 1;
        let mut rng = task_rng(params.seed ^ 0xC0FE, task);
        let u = crate::witness::random_direction(&mut rng, p);
        if ds.angular_distance_to_rays(&u) <= params.angular_tol && !ds.rays.is_empty() {
            continue; // precondition: regular values only
        }
        let scale: f64 = rng.gen_range(0.2..1.0);
        let y: Vec<f64> = u.iter().map(|v| v * eta * scale).collect();
        let fiber = g.fiber_system(&y);
        // find any fiber point; a miss after many starts is read as y
        // falling outside the image, which is outside the domain of the check
        let mut start = None;
        for sub in 0..16u64 {
            let mut srng = task_rng(params.seed ^ 0xFEED, task * 131 + sub);
            let x0: Vec<f64> = crate::witness::random_direction(&mut srng, m)
                .iter()
                .map(|d| d * 0.4)
                .collect();
            let opts = NewtonOpts {
                trust_radius: 2.0,
                ..params.newton
            };
            if let Some(x) = newton_project(&fiber, &x0, &opts) {
                start = Some(x);
                break;
            }
        }
        let Some(mut x) = start else {
            outside_image += 1;
            continue;
        };
        // projected gradient descent of rho on the fiber
        let refit = NewtonOpts {
            trust_radius: 4.0,
            ..params.newton
        };
        for _ in 0..400 {
            let grad: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
            let rows = g.jacobian_at(&x);
            let t = tangent_project(&grad, &rows);
            let tn = norm(&t);
            if tn < 1e-12 {
                break;
            }
            let rho0 = dot(&x, &x);
            let mut alpha = 0.25 * norm(&x) / tn;
            let mut moved = false;
            for _ in 0..40 {
                let cand: Vec<f64> = x.iter().zip(&t).map(|(a, b)| a - alpha * b).collect();
                if let Some(c) = newton_project(&fiber, &cand, &refit) {
                    if dot(&c, &c) < rho0 - 1e-16 {
                        x = c;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        // polish onto {G = y} together with the Milnor equations
        let mut joint = fiber.clone();
        for eq in milnor.equations() {
            joint = joint.with_equation(eq.clone());
        }
        let polish = NewtonOpts {
            tol: 1e-9,
            trust_radius: 0.2 * norm(&x).max(eta),
            ..Default::default()
        };
        let residual = match newton_project(&joint, &x, &polish) {
            Some(z) => milnor.max_residual(&z),
            None => milnor.max_residual(&x),
        };
        worst_residual = worst_residual.max(residual);
        checked += 1;
        if residual >= 1e-8 {
            failures += 1;
        }
    }
    let verdict = if checked == 0 {
        Verdict::Inconclusive
    } else if failures == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(
        ConditionReport::new(ConditionId::TubeExists, verdict, params.seed)
            .with_evidence(serde_json::json!({
                "check": "milnor_image_coverage",
                "eta": eta,
                "values_checked": checked,
                "values_outside_image": outside_image,
                "failures": failures,
                "worst_milnor_residual": worst_residual,
            }))
            .with_tolerances(serde_json::json!({ "milnor_residual": 1e-8 })),
    )
}

/// Existence of the blow-away field: the decomposition coefficient `a` must
/// be positive at every retained Milnor witness.
pub fn check_mvf_exists(g: &MapGerm, ws: &WitnessSet, params: &CheckParams) -> ConditionReport {
    let retained: Vec<&crate::witness::WitnessPoint> = ws.retained().collect();
    if retained.is_empty() {
        return ConditionReport::new(ConditionId::MvfExists, Verdict::Pass, params.seed)
            .with_evidence(serde_json::json!({
                "vacuous": true,
                "note": "no Milnor witnesses off the discriminant preimage; the bisector field is unobstructed",
            }));
    }
    let mut min_a = f64::INFINITY;
    let mut max_residual_rho = 0.0f64;
    let mut max_rel_gap = 0.0f64;
    let mut flagged = 0usize;
    for pt in &retained {
        let fe = field_eval(g, &pt.coords, params.tol_zero);
        if fe.flags.any() || fe.a.is_none() {
            flagged += 1;
            continue;
        }
        let a = fe.a.unwrap();
        min_a = min_a.min(a);
        max_residual_rho = max_residual_rho.max(fe.residual_rho);
        let rel = (a - fe.a_least_squares).abs() / a.abs().max(1e-300);
        max_rel_gap = max_rel_gap.max(rel);
    }
    let num_components = ws.num_components();

    // alternative justification: each component carrying two witnesses on
    // one fiber of the normalized map evidences positive-dimensional slices
    let mut components_with_fiber_pair = 0usize;
    for c in 0..num_components as i64 {
        let members: Vec<&&crate::witness::WitnessPoint> =
            retained.iter().filter(|p| p.component == c).collect();
        let mut found = false;
        'outer: for i in 0..members.len() {
            for j in (i + 1)..members.len() {
                let gi = g.eval(&members[i].coords);
                let gj = g.eval(&members[j].coords);
                let psi_gap = angular_distance(&gi, &gj);
                if psi_gap < 1e-6
                    && (norm(&gi) - norm(&gj)).abs() < 1e-6
                    && dist(&members[i].coords, &members[j].coords) > 10.0 * params.newton.tol
                {
                    found = true;
                    break 'outer;
                }
            }
        }
        if found {
            components_with_fiber_pair += 1;
        }
    }

    let verdict = if flagged > 0 {
        Verdict::Inconclusive
    } else if min_a > 0.0 {
        Verdict::Pass
    } else if min_a < -1e-6 {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let mut report = ConditionReport::new(ConditionId::MvfExists, verdict, params.seed)
        .with_evidence(serde_json::json!({
            "witnesses": retained.len(),
            "flagged": flagged,
            "min_a": if min_a.is_finite() { Some(min_a) } else { None },
            "max_residual_rho": max_residual_rho,
            "max_a_relative_gap": max_rel_gap,
            "components": num_components,
            "components_with_fiber_pair": components_with_fiber_pair,
        }))
        .with_tolerances(serde_json::json!({
            "positive_a_margin": 0.0,
            "tol_zero": params.tol_zero,
        }));
    if verdict == Verdict::Pass && num_components == 1 {
        report = report.with_implication("connected_milnor_complement", vec![]);
    } else if verdict == Verdict::Pass
        && num_components > 0
        && components_with_fiber_pair == num_components
    {
        report = report.with_implication("positive_dimensional_fiber_components", vec![]);
    }
    report
}

/// Enumerate the arcs of the unit target circle minus the discriminant rays
/// (p = 2 only): returns one representative unit direction per arc.
pub fn target_arcs(ds: &DiscriminantSample) -> Vec<Vec<f64>> {
    let mut angles: Vec<f64> = ds
        .rays
        .iter()
        .filter(|r| r.direction.len() == 2)
        .map(|r| r.direction[1].atan2(r.direction[0]))
        .collect();
    if angles.is_empty() {
        return vec![vec![1.0, 0.0]];
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut reps = Vec::new();
    for i in 0..angles.len() {
        let a = angles[i];
        let b = if i + 1 < angles.len() {
            angles[i + 1]
        } else {
            angles[0] + 2.0 * std::f64::consts::PI
        };
        if b - a < 1e-6 {
            continue;
        }
        let mid = 0.5 * (a + b);
        reps.push(vec![mid.cos(), mid.sin()]);
    }
    reps
}

/// Arc index (in `target_arcs` order) containing the direction `y`.
pub fn arc_id_of(ds: &DiscriminantSample, y: &[f64]) -> Option<usize> {
    let arcs = target_arcs(ds);
    let mut best = None;
    let mut best_ang = f64::INFINITY;
    for (i, rep) in arcs.iter().enumerate() {
        let a = angular_distance(rep, y);
        if a < best_ang {
            best_ang = a;
            best = Some(i);
        }
    }
    best
}

/// Tube fibration existence from the standing criteria; evidence only.
pub fn tube_exists_report(
    nice: &ConditionReport,
    radial: &ConditionReport,
    cond_main: &ConditionReport,
    seed: u64,
) -> ConditionReport {
    let all_pass = [nice, radial, cond_main]
        .iter()
        .all(|r| r.verdict == Verdict::Pass);
    let verdict = if all_pass {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let mut r = ConditionReport::new(ConditionId::TubeExists, verdict, seed).with_evidence(
        serde_json::json!({
            "note": "granted by the tube existence criterion when niceness, radiality and the cone condition all pass",
        }),
    );
    if all_pass {
        r = r.with_implication(
            "tube_existence_criterion",
            vec![ConditionId::Nice, ConditionId::RadialDisc, ConditionId::CondMain],
        );
    }
    r
}

/// Sphere fibration existence from rho-regularity; requires `m > p >= 2`.
pub fn sphere_exists_report(
    g: &MapGerm,
    nice: &ConditionReport,
    radial: &ConditionReport,
    rho_reg: &ConditionReport,
    seed: u64,
) -> ConditionReport {
    if g.target_dim() < 2 || g.source_dim() <= g.target_dim() {
        return ConditionReport::new(ConditionId::SphereExists, Verdict::Inconclusive, seed)
            .with_evidence(serde_json::json!({
                "note": "sphere fibration analysis needs source dimension > target dimension >= 2",
            }));
    }
    let all_pass = [nice, radial, rho_reg]
        .iter()
        .all(|r| r.verdict == Verdict::Pass);
    let verdict = if all_pass {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let mut r = ConditionReport::new(ConditionId::SphereExists, verdict, seed).with_evidence(
        serde_json::json!({
            "note": "granted by the sphere fibration criterion when niceness, radiality and rho-regularity all pass",
        }),
    );
    if all_pass {
        r = r.with_implication(
            "sphere_fibration_criterion",
            vec![
                ConditionId::Nice,
                ConditionId::RadialDisc,
                ConditionId::RhoRegularPsi,
            ],
        );
    }
    r
}

/// Quick feasibility probe used by callers that need a fiber direction off
/// the rays: nudges `y` to the nearest arc representative when too close.
pub fn safe_direction(ds: &DiscriminantSample, y: &[f64], angular_tol: f64) -> Vec<f64> {
    if ds.angular_distance_to_rays(y) > angular_tol {
        return y.to_vec();
    }
    let arcs = target_arcs(ds);
    arcs.into_iter()
        .min_by(|a, b| {
            angular_distance(a, y)
                .partial_cmp(&angular_distance(b, y))
                .unwrap()
        })
        .unwrap_or_else(|| y.to_vec())
}
