//! Determinantal systems: finite polynomial systems whose common zero set is
//! a variety of interest (the singular set, the Milnor set, the Milnor set of
//! the normalized map), plus numerical rank tests.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::germ::{GermError, MapGerm};
use crate::poly::{rho, Polynomial, PolyVector};

/// How a rank-specified system decides membership at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankCondition {
    /// Numerical rank of all rows is at most this value.
    AtMost(usize),
    /// Appending the rows after `base` does not increase the rank of the
    /// first `base` rows (span membership test).
    NoIncrease { base: usize },
}

/// Matrix-form alternative to minor equations, for systems better tested by
/// numerical rank than by an exploding set of minors.
#[derive(Debug, Clone)]
pub struct RankSpec {
    pub rows: Vec<PolyVector>,
    pub condition: RankCondition,
}

/// A finite set of polynomials cutting out a variety, with an optional
/// numerical-rank formulation of the same condition.
pub struct DeterminantalSystem {
    nvars: usize,
    equations: Vec<Polynomial>,
    rank_spec: Option<RankSpec>,
    gradients: OnceLock<Vec<PolyVector>>,
}

impl std::fmt::Debug for DeterminantalSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeterminantalSystem")
            .field("nvars", &self.nvars)
            .field("equations", &self.equations.len())
            .field("rank_spec", &self.rank_spec.is_some())
            .finish()
    }
}

impl Clone for DeterminantalSystem {
    fn clone(&self) -> Self {
        DeterminantalSystem {
            nvars: self.nvars,
            equations: self.equations.clone(),
            rank_spec: self.rank_spec.clone(),
            gradients: OnceLock::new(),
        }
    }
}

/// Determinant of a square matrix of polynomials by cofactor expansion.
/// Fine for the small orders (<= p+1) that arise here.
pub fn poly_determinant(mat: &[Vec<Polynomial>]) -> Polynomial {
    let n = mat.len();
    let nvars = mat[0][0].nvars();
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut det = Polynomial::zero(nvars);
    for (j, top) in mat[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let cof = top.mul(&poly_determinant(&minor));
        det = if j % 2 == 0 { det.add(&cof) } else { det.sub(&cof) };
    }
    det
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl DeterminantalSystem {
    pub fn from_equations(nvars: usize, equations: Vec<Polynomial>) -> Self {
        assert!(equations.iter().all(|e| e.nvars() == nvars));
        DeterminantalSystem {
            nvars,
            equations,
            rank_spec: None,
            gradients: OnceLock::new(),
        }
    }

    /// All `k x k` minors of the matrix with the given polynomial rows.
    pub fn from_minors(nvars: usize, rows: Vec<PolyVector>, k: usize) -> Self {
        let ncols = nvars;
        let mut equations = Vec::new();
        for ri in combinations(rows.len(), k) {
            for ci in combinations(ncols, k) {
                let sub: Vec<Vec<Polynomial>> = ri
                    .iter()
                    .map(|&r| ci.iter().map(|&c| rows[r].entries[c].clone()).collect())
                    .collect();
                equations.push(poly_determinant(&sub));
            }
        }
        DeterminantalSystem::from_equations(nvars, equations)
    }

    pub fn with_rank_rows(mut self, rows: Vec<PolyVector>, max_rank: usize) -> Self {
        self.rank_spec = Some(RankSpec {
            rows,
            condition: RankCondition::AtMost(max_rank),
        });
        self
    }

    pub fn with_rank_spec(mut self, spec: RankSpec) -> Self {
        self.rank_spec = Some(spec);
        self
    }

    /// Append an extra equation (for example a sphere constraint).
    pub fn with_equation(mut self, eq: Polynomial) -> Self {
        assert_eq!(eq.nvars(), self.nvars);
        self.equations.push(eq);
        self.gradients = OnceLock::new();
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn equations(&self) -> &[Polynomial] {
        &self.equations
    }

    pub fn rank_spec(&self) -> Option<&RankSpec> {
        self.rank_spec.as_ref()
    }

    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| e.eval(x)).collect()
    }

    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.residuals(x).iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn gradients(&self) -> &[PolyVector] {
        self.gradients
            .get_or_init(|| self.equations.iter().map(|e| e.gradient()).collect())
    }

    /// Jacobian of the residual vector at `x`, one row per equation.
    pub fn jacobian_at(&self, x: &[f64]) -> DMatrix<f64> {
        let rows = self.gradients();
        DMatrix::from_fn(rows.len(), self.nvars, |i, j| rows[i].entries[j].eval(x))
    }

    /// Rank-based membership at `x`, if a rank spec is attached.
    pub fn rank_membership(&self, x: &[f64], rel_gap: f64) -> Option<bool> {
        let spec = self.rank_spec.as_ref()?;
        let vals: Vec<Vec<f64>> = spec.rows.iter().map(|r| r.eval(x)).collect();
        Some(match spec.condition {
            RankCondition::AtMost(r) => numerical_rank_rows(&vals, rel_gap) <= r,
            RankCondition::NoIncrease { base } => {
                let base_rank = numerical_rank_rows(&vals[..base], rel_gap);
                numerical_rank_rows(&vals, rel_gap) == base_rank
            }
        })
    }
}

/// Numerical rank of a row matrix: number of singular values above
/// `rel_gap * sigma_max`.
pub fn numerical_rank_rows(rows: &[Vec<f64>], rel_gap: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_gap * smax).count()
}

/// The system whose zero set is the Milnor set `M(G)`: transversality of the
/// spheres to `G` fails exactly where the `(p+1) x m` matrix with rows
/// `grad rho, grad G_1, ..., grad G_p` drops below full rank; equations are
/// its `(p+1)`-minors.
pub fn milnor_set_system(g: &MapGerm) -> Result<DeterminantalSystem, GermError> {
    let m = g.source_dim();
    let p = g.target_dim();
    if m <= p {
        return Err(GermError::Unsupported(format!(
            "Milnor set needs source dimension > target dimension (got {} <= {})",
            m, p
        )));
    }
    let mut rows = vec![rho(m).gradient()];
    rows.extend(g.jacobian().iter().cloned());
    Ok(DeterminantalSystem::from_minors(m, rows.clone(), p + 1)
        .with_rank_rows(rows, p))
}

/// The system for the Milnor set of the normalized map `G/||G||`: points
/// where `grad rho` lies in the span of the Omega fields. Valid only where
/// `G != 0`; callers filter witnesses accordingly. For `p = 2` the system is
/// the set of 2x2 minors of `(grad rho, Omega_12)`; in general the minors of
/// the stacked `(Omegas, grad rho)` matrix together with a span-membership
/// rank spec.
pub fn psi_milnor_set_system(g: &MapGerm) -> Result<DeterminantalSystem, GermError> {
    let m = g.source_dim();
    let p = g.target_dim();
    if p < 2 {
        return Err(GermError::Unsupported(
            "Milnor set of G/||G|| needs at least two components".into(),
        ));
    }
    let nf = g.omega_fields()?;
    let mut rows: Vec<PolyVector> = nf.omegas.clone();
    let base = rows.len();
    rows.push(rho(m).gradient());
    let sys = DeterminantalSystem::from_minors(m, rows.clone(), p);
    Ok(sys.with_rank_spec(RankSpec {
        rows,
        condition: RankCondition::NoIncrease { base },
    }))
}
