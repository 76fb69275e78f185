//! Map germs `G: (R^m, 0) -> (R^p, 0)` and their derived symbolic objects:
//! Jacobian, singular-set system, the Omega normal fields of the fibers of
//! `G/||G||`, and `||G||^2`.

use std::sync::OnceLock;

use num::BigRational;

use crate::mixed::MixedFunction;
use crate::parse::{self, GermFile, ParseError};
use crate::poly::{Polynomial, PolyVector};
use crate::variety::DeterminantalSystem;

#[derive(Debug, thiserror::Error)]
pub enum GermError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("germ condition violated: component G{0} does not vanish at the origin")]
    NotAGerm(usize),
}

/// A user-declared fact about a germ that the tool does not verify itself
/// (for example Thom regularity).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DeclaredFlag {
    pub name: String,
    pub note: String,
}

/// The normal fields `Omega_{jk} = G_j grad(G_k) - G_k grad(G_j)` for all
/// pairs `j < k`. Wherever `G(x) != 0` they span the normal space of the
/// fiber of `G/||G||` through `x`.
#[derive(Debug, Clone)]
pub struct NormalFields {
    pub omegas: Vec<PolyVector>,
    /// The `(j, k)` index pair (0-based) of each entry of `omegas`.
    pub pairs: Vec<(usize, usize)>,
}

impl NormalFields {
    /// Evaluate all fields at `x`, one row per Omega.
    pub fn eval_rows(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.omegas.iter().map(|w| w.eval(x)).collect()
    }
}

#[derive(Default)]
struct DerivedCache {
    jacobian: OnceLock<Vec<PolyVector>>,
    omegas: OnceLock<NormalFields>,
    norm_squared: OnceLock<Polynomial>,
    norm_squared_gradient: OnceLock<PolyVector>,
    singular_system: OnceLock<DeterminantalSystem>,
}

/// A polynomial map germ `G: (R^m, 0) -> (R^p, 0)`.
///
/// Immutable after construction; derived symbolic objects are computed once
/// and cached (idempotent, so concurrent population is harmless).
pub struct MapGerm {
    m: usize,
    p: usize,
    components: Vec<Polynomial>,
    var_names: Vec<String>,
    provenance: Option<MixedFunction>,
    declared_flags: Vec<DeclaredFlag>,
    cache: DerivedCache,
}

impl std::fmt::Debug for MapGerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MapGerm")
            .field("m", &self.m)
            .field("p", &self.p)
            .field("components", &self.components)
            .finish()
    }
}

impl MapGerm {
    pub fn new(components: Vec<Polynomial>) -> Result<Self, GermError> {
        let p = components.len();
        if p == 0 {
            return Err(GermError::Dimension("germ needs at least one component".into()));
        }
        let m = components[0].nvars();
        if components.iter().any(|c| c.nvars() != m) {
            return Err(GermError::Dimension(
                "all components must share the same variables".into(),
            ));
        }
        if m < p {
            return Err(GermError::Dimension(format!(
                "source dimension {} must be >= target dimension {}",
                m, p
            )));
        }
        for (i, c) in components.iter().enumerate() {
            if !num::Zero::is_zero(&c.constant_term()) {
                return Err(GermError::NotAGerm(i + 1));
            }
        }
        let var_names = (1..=m).map(|i| format!("x{}", i)).collect();
        Ok(MapGerm {
            m,
            p,
            components,
            var_names,
            provenance: None,
            declared_flags: Vec::new(),
            cache: DerivedCache::default(),
        })
    }

    pub fn with_var_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.m);
        self.var_names = names;
        self
    }

    pub fn with_flags(mut self, flags: Vec<DeclaredFlag>) -> Self {
        self.declared_flags = flags;
        self
    }

    /// Build the real germ of a mixed function via realification. The two
    /// components are `(Re F, Im F)` over `(x_1, y_1, ..., x_n, y_n)`.
    pub fn from_mixed(f: MixedFunction) -> Result<Self, GermError> {
        let n = f.nvars_complex();
        let (re, im) = f.realify();
        let mut names = Vec::with_capacity(2 * n);
        for j in 1..=n {
            names.push(format!("x{}", j));
            names.push(format!("y{}", j));
        }
        let mut g = MapGerm::new(vec![re, im])?.with_var_names(names);
        g.provenance = Some(f);
        Ok(g)
    }

    /// Parse a germ definition file (either real or mixed form).
    pub fn from_file_text(text: &str) -> Result<Self, GermError> {
        match parse::parse_germ_file(text)? {
            GermFile::Real {
                vars,
                components,
                flags,
            } => {
                let g = MapGerm::new(components)?.with_var_names(vars);
                Ok(g.with_flags(
                    flags
                        .into_iter()
                        .map(|name| DeclaredFlag {
                            name,
                            note: String::new(),
                        })
                        .collect(),
                ))
            }
            GermFile::Mixed {
                cvars: _,
                function,
                flags,
            } => {
                let g = MapGerm::from_mixed(function)?;
                Ok(g.with_flags(
                    flags
                        .into_iter()
                        .map(|name| DeclaredFlag {
                            name,
                            note: String::new(),
                        })
                        .collect(),
                ))
            }
        }
    }

    pub fn source_dim(&self) -> usize {
        self.m
    }

    pub fn target_dim(&self) -> usize {
        self.p
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn provenance(&self) -> Option<&MixedFunction> {
        self.provenance.as_ref()
    }

    pub fn declared_flags(&self) -> &[DeclaredFlag] {
        &self.declared_flags
    }

    pub fn has_flag(&self, name: &str) -> bool {
        self.declared_flags.iter().any(|f| f.name == name)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_norm(&self, x: &[f64]) -> f64 {
        self.eval(x).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Rows of the Jacobian: row `i` is `grad(G_i)`.
    pub fn jacobian(&self) -> &[PolyVector] {
        self.cache
            .jacobian
            .get_or_init(|| self.components.iter().map(|c| c.gradient()).collect())
    }

    /// Numeric Jacobian matrix at `x`, row-major `p x m`.
    pub fn jacobian_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian().iter().map(|row| row.eval(x)).collect()
    }

    /// The rank-deficiency system whose zero set is `Sing G`: all `p x p`
    /// minors of the Jacobian. For `p = 1` this degenerates to the critical
    /// locus `{grad G = 0}` (1x1-minor convention).
    pub fn singular_set_system(&self) -> &DeterminantalSystem {
        self.cache.singular_system.get_or_init(|| {
            let rows: Vec<PolyVector> = self.jacobian().to_vec();
            DeterminantalSystem::from_minors(self.m, rows.clone(), self.p)
                .with_rank_rows(rows, self.p - 1)
        })
    }

    /// The normal fields `Omega_{jk}` for all pairs; requires `p >= 2`.
    pub fn omega_fields(&self) -> Result<&NormalFields, GermError> {
        if self.p < 2 {
            return Err(GermError::Unsupported(
                "Omega fields need at least two components".into(),
            ));
        }
        Ok(self.cache.omegas.get_or_init(|| {
            let jac = self.jacobian();
            let mut omegas = Vec::new();
            let mut pairs = Vec::new();
            for j in 0..self.p {
                for k in (j + 1)..self.p {
                    let gj = &self.components[j];
                    let gk = &self.components[k];
                    let entries: Vec<Polynomial> = (0..self.m)
                        .map(|i| {
                            gj.mul(&jac[k].entries[i]).sub(&gk.mul(&jac[j].entries[i]))
                        })
                        .collect();
                    omegas.push(PolyVector::new(entries));
                    pairs.push((j, k));
                }
            }
            NormalFields { omegas, pairs }
        }))
    }

    /// `||G||^2 = sum G_i^2` as an exact polynomial.
    pub fn norm_squared(&self) -> &Polynomial {
        self.cache.norm_squared.get_or_init(|| {
            let mut s = Polynomial::zero(self.m);
            for c in &self.components {
                s = s.add(&c.mul(c));
            }
            s
        })
    }

    pub fn norm_squared_gradient(&self) -> &PolyVector {
        self.cache
            .norm_squared_gradient
            .get_or_init(|| self.norm_squared().gradient())
    }

    /// The system `{G_1 = y_1, ..., G_p = y_p}` for a fixed target value.
    pub fn fiber_system(&self, y: &[f64]) -> DeterminantalSystem {
        assert_eq!(y.len(), self.p);
        let eqs: Vec<Polynomial> = self
            .components
            .iter()
            .zip(y)
            .map(|(c, &yi)| {
                c.sub(&Polynomial::constant(
                    self.m,
                    BigRational::from_float(yi).expect("finite target value"),
                ))
            })
            .collect();
        DeterminantalSystem::from_equations(self.m, eqs)
    }

    /// The zero-set system `{G = 0}` for `V_G`.
    pub fn zero_set_system(&self) -> DeterminantalSystem {
        DeterminantalSystem::from_equations(self.m, self.components.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use num::BigRational;

    fn xy_z2() -> MapGerm {
        catalog::xy_z2()
    }

    #[test]
    fn jacobian_of_xy_z2() {
        let g = xy_z2();
        let jac = g.jacobian();
        assert_eq!(jac[0].entries[0], Polynomial::variable(3, 1));
        assert_eq!(jac[0].entries[1], Polynomial::variable(3, 0));
        assert!(jac[0].entries[2].is_zero());
        assert!(jac[1].entries[0].is_zero());
        assert!(jac[1].entries[1].is_zero());
        assert_eq!(
            jac[1].entries[2],
            Polynomial::variable(3, 2).scale(&BigRational::from_integer(2.into()))
        );
    }

    #[test]
    fn jacobian_of_linear_projection() {
        let g = catalog::linear_projection(3, 2);
        let jac = g.jacobian();
        for (i, row) in jac.iter().enumerate().take(2) {
            for j in 0..3 {
                let v = row.entries[j].eval(&[0.3, -0.1, 0.7]);
                assert_eq!(v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn jacobian_of_cone_example() {
        // G = (x1, x2^2 + x3^2 - x4^2): rows e1 and (0, 2x2, 2x3, -2x4)
        let g = catalog::cone_projection(4);
        let jac = g.jacobian();
        let x = [0.5, 1.0, 2.0, 3.0];
        assert_eq!(jac[0].eval(&x), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(jac[1].eval(&x), vec![0.0, 2.0, 4.0, -6.0]);
    }

    #[test]
    fn singular_system_of_xy_z2_minors() {
        let g = xy_z2();
        let sys = g.singular_set_system();
        // minors of [[y, x, 0], [0, 0, 2z]] are {0, 2yz, 2xz}
        let eqs: Vec<&Polynomial> = sys.equations().iter().filter(|e| !e.is_zero()).collect();
        assert_eq!(eqs.len(), 2);
        let x = Polynomial::variable(3, 0);
        let y = Polynomial::variable(3, 1);
        let z = Polynomial::variable(3, 2);
        let two = BigRational::from_integer(2.into());
        let yz2 = y.mul(&z).scale(&two);
        let xz2 = x.mul(&z).scale(&two);
        assert!(eqs.contains(&&yz2));
        assert!(eqs.contains(&&xz2));
    }

    #[test]
    fn singular_system_vanishes_on_known_branches() {
        let g = xy_z2();
        let sys = g.singular_set_system();
        // on {z = 0} and on {x = y = 0} all minors vanish
        assert!(sys.max_residual(&[0.7, -0.3, 0.0]) == 0.0);
        assert!(sys.max_residual(&[0.0, 0.0, 0.9]) == 0.0);
        // generic point is regular
        assert!(sys.max_residual(&[0.5, 0.5, 0.5]) > 1e-3);
    }

    #[test]
    fn submersion_has_empty_singular_set() {
        let g = catalog::linear_projection(3, 2);
        let sys = g.singular_set_system();
        // all minors constant, at least one equal to 1
        let max_at_origin = sys.max_residual(&[0.0, 0.0, 0.0]);
        assert_eq!(max_at_origin, 1.0);
    }

    #[test]
    fn omega_field_of_xy_z2() {
        // Omega_12 = xy*(0,0,2z) - z^2*(y,x,0) = (-y z^2, -x z^2, 2xyz)
        let g = xy_z2();
        let nf = g.omega_fields().unwrap();
        assert_eq!(nf.omegas.len(), 1);
        assert_eq!(nf.pairs, vec![(0, 1)]);
        let x = Polynomial::variable(3, 0);
        let y = Polynomial::variable(3, 1);
        let z = Polynomial::variable(3, 2);
        let expect0 = y.mul(&z.pow(2)).neg();
        let expect1 = x.mul(&z.pow(2)).neg();
        let expect2 = x
            .mul(&y)
            .mul(&z)
            .scale(&BigRational::from_integer(2.into()));
        assert_eq!(nf.omegas[0].entries[0], expect0);
        assert_eq!(nf.omegas[0].entries[1], expect1);
        assert_eq!(nf.omegas[0].entries[2], expect2);
    }

    #[test]
    fn omega_field_of_cone_example() {
        // Omega_12 = x1*(0,2x2,2x3,-2x4) - (x2^2+x3^2-x4^2)*e1
        let g = catalog::cone_projection(4);
        let nf = g.omega_fields().unwrap();
        let pt = [0.3, 0.5, -0.2, 0.4];
        let s = 0.5f64.powi(2) + 0.2f64.powi(2) - 0.4f64.powi(2);
        let got = nf.omegas[0].eval(&pt);
        let want = [-s, 0.3 * 2.0 * 0.5, 0.3 * 2.0 * -0.2, 0.3 * -2.0 * 0.4];
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn omega_degenerate_when_second_component_zero() {
        let x = Polynomial::variable(2, 0);
        let zero = Polynomial::zero(2);
        let g = MapGerm::new(vec![x, zero]).unwrap();
        let nf = g.omega_fields().unwrap();
        assert!(nf.omegas[0].entries.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn omega_needs_two_components() {
        let g = MapGerm::new(vec![Polynomial::variable(1, 0)]).unwrap();
        assert!(matches!(
            g.omega_fields(),
            Err(GermError::Unsupported(_))
        ));
    }

    #[test]
    fn norm_squared_examples() {
        let g = xy_z2();
        let ns = g.norm_squared();
        // x^2 y^2 + z^4
        let x = Polynomial::variable(3, 0);
        let y = Polynomial::variable(3, 1);
        let z = Polynomial::variable(3, 2);
        assert_eq!(*ns, x.pow(2).mul(&y.pow(2)).add(&z.pow(4)));

        let id2 = catalog::linear_projection(2, 2);
        assert_eq!(*id2.norm_squared(), crate::poly::rho(2));
    }

    #[test]
    fn norm_squared_of_realified_z_squared() {
        // G = realify(z^2) on R^2: ||G||^2 = (x^2+y^2)^2
        let f = MixedFunction::variable(1, 0).pow(2);
        let g = MapGerm::from_mixed(f).unwrap();
        let ns = g.norm_squared();
        let expect = crate::poly::rho(2).pow(2);
        assert_eq!(*ns, expect);
    }

    #[test]
    fn germ_condition_rejected() {
        let one = Polynomial::constant_i64(2, 1);
        let x = Polynomial::variable(2, 0).add(&one);
        assert!(matches!(
            MapGerm::new(vec![x]),
            Err(GermError::NotAGerm(1))
        ));
    }
}
