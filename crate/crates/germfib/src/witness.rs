//! Witness sampling: quasi-uniform sphere seeds pushed onto a variety by
//! Gauss-Newton projection, with exclusion tagging and single-linkage
//! component clustering.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::newton::{newton_project, NewtonOpts};
use crate::poly::{rho, Polynomial};
use crate::variety::DeterminantalSystem;

/// Where witness seeds are placed and retained points must lie.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// The sphere of this radius; the constraint `||x||^2 = r^2` is appended
    /// to the system so retained points sit on the sphere exactly.
    Sphere(f64),
    /// The annulus `r1 <= ||x|| <= r2`; retained points are filtered.
    Annulus(f64, f64),
}

impl Region {
    pub fn nominal_radius(&self) -> f64 {
        match *self {
            Region::Sphere(r) => r,
            Region::Annulus(r1, r2) => 0.5 * (r1 + r2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WitnessPoint {
    pub coords: Vec<f64>,
    pub residual: f64,
    pub radius: f64,
    /// Connected-component tag; -1 until clustered or for excluded points.
    pub component: i64,
    /// True when the point lies within tolerance of the discriminant
    /// preimage and must not feed fibration-condition statistics.
    pub excluded: bool,
}

/// Sampling diagnostics: how many seeds were attempted, converged, and kept.
#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct SampleStats {
    pub attempted: usize,
    pub converged: usize,
    pub retained: usize,
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct WitnessSet {
    pub points: Vec<WitnessPoint>,
    pub stats: SampleStats,
}

impl WitnessSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn retained(&self) -> impl Iterator<Item = &WitnessPoint> {
        self.points.iter().filter(|p| !p.excluded)
    }

    pub fn num_components(&self) -> usize {
        let mut ids: Vec<i64> = self
            .points
            .iter()
            .filter(|p| !p.excluded && p.component >= 0)
            .map(|p| p.component)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// CSV with header `x1,...,xm,residual,radius,component,excluded`.
    pub fn to_csv(&self, nvars: usize) -> String {
        let mut out = String::new();
        for i in 1..=nvars {
            out.push_str(&format!("x{},", i));
        }
        out.push_str("residual,radius,component,excluded\n");
        for p in &self.points {
            for c in &p.coords {
                out.push_str(&format!("{},", c));
            }
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.residual, p.radius, p.component, p.excluded as u8
            ));
        }
        out
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Derived RNG stream for one sampling task. Seeds are decorrelated with a
/// splitmix-style scramble so task streams are independent.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(task.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Random direction on the unit sphere in `dim` variables.
pub fn random_direction(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Sample up to `n` witness points of `system` inside `region`.
///
/// Deterministic for a fixed `(system, region, n, seed)`: points are sorted
/// lexicographically before being returned. `exclude` tags points near the
/// discriminant preimage without dropping them.
#[allow(clippy::type_complexity)]
pub fn witness_sample(
    system: &DeterminantalSystem,
    region: Region,
    n: usize,
    seed: u64,
    opts: &NewtonOpts,
    exclude: Option<&dyn Fn(&[f64]) -> bool>,
) -> WitnessSet {
    assert!(n >= 1);
    let dim = system.nvars();
    let r = region.nominal_radius();

    // On a sphere region the sphere equation joins the system, so retained
    // points satisfy the radius constraint to the same tolerance.
    let augmented;
    let sys: &DeterminantalSystem = match region {
        Region::Sphere(radius) => {
            let r2 = Polynomial::constant(
                dim,
                BigRational::from_float(radius * radius).expect("finite radius"),
            );
            augmented = system.clone().with_equation(rho(dim).sub(&r2));
            &augmented
        }
        Region::Annulus(..) => system,
    };

    let project_opts = NewtonOpts {
        trust_radius: 2.0 * r,
        ..*opts
    };

    let mut stats = SampleStats {
        attempted: n,
        ..Default::default()
    };
    let mut points = Vec::new();
    for task in 0..n {
        let mut rng = task_rng(seed, task as u64);
        let dir = random_direction(&mut rng, dim);
        let radius = match region {
            Region::Sphere(radius) => radius,
            Region::Annulus(r1, r2) => rng.gen_range(r1..=r2),
        };
        let seed_pt: Vec<f64> = dir.iter().map(|d| d * radius).collect();
        let Some(x) = newton_project(sys, &seed_pt, &project_opts) else {
            continue;
        };
        stats.converged += 1;
        let rad = norm(&x);
        let in_region = match region {
            Region::Sphere(_) => true, // enforced by the appended equation
            Region::Annulus(r1, r2) => rad >= r1 && rad <= r2,
        };
        if !in_region {
            continue;
        }
        let residual = sys.max_residual(&x);
        let excluded = exclude.map(|f| f(&x)).unwrap_or(false);
        points.push(WitnessPoint {
            coords: x,
            residual,
            radius: rad,
            component: -1,
            excluded,
        });
    }
    stats.retained = points.len();
    points.sort_by(|a, b| {
        a.coords
            .partial_cmp(&b.coords)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    WitnessSet { points, stats }
}

/// Single-linkage clustering of the non-excluded points: edge iff distance
/// below `link_scale * band_radius`. Component ids are assigned in the order
/// of each component's lexicographically smallest point, so the labeling is
/// stable under point order.
pub fn cluster_components(ws: &WitnessSet, link_scale: f64, band_radius: f64) -> WitnessSet {
    let mut out = ws.clone();
    let idx: Vec<usize> = out
        .points
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.excluded)
        .map(|(i, _)| i)
        .collect();
    let n = idx.len();
    if n == 0 {
        return out;
    }
    let threshold = link_scale * band_radius;

    // union-find over the retained points
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if dist(&out.points[idx[a]].coords, &out.points[idx[b]].coords) < threshold {
                let ra = find(&mut parent, a);
                let rb = find(&mut parent, b);
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }

    // ids ordered by each component's lexicographically smallest member, so
    // the labeling does not depend on input point order
    let roots: Vec<usize> = (0..n).map(|a| find(&mut parent, a)).collect();
    let mut reps: Vec<(usize, &[f64])> = Vec::new();
    for a in 0..n {
        let pt = out.points[idx[a]].coords.as_slice();
        match reps.iter_mut().find(|(r, _)| *r == roots[a]) {
            Some((_, best)) => {
                if pt.partial_cmp(best) == Some(std::cmp::Ordering::Less) {
                    *best = pt;
                }
            }
            None => reps.push((roots[a], pt)),
        }
    }
    reps.sort_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let assigned: Vec<i64> = roots
        .iter()
        .map(|r| reps.iter().position(|(root, _)| root == r).unwrap() as i64)
        .collect();
    for (slot, &i) in idx.iter().enumerate() {
        out.points[i].component = assigned[slot];
    }
    out
}
