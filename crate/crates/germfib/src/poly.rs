//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Coefficients stay rational through every symbolic operation; floating
//! point enters only at evaluation. Terms are kept in graded lexicographic
//! order so equal polynomials have identical serializations.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, ToPrimitive, Zero};

/// Exponent vector of a single monomial, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over the rationals in a fixed number of variables.
///
/// Invariant: no stored coefficient is zero and every exponent vector has
/// length `nvars`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; nvars]), c);
        }
        p
    }

    pub fn constant_i64(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(c.into()))
    }

    /// The variable `x_i` (0-based) as a polynomial.
    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {} out of range {}", i, nvars);
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms
            .insert(Monomial(exps), BigRational::from_integer(1.into()));
        p
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Vec<u32>, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars);
            p.add_term(Monomial(exps), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Constant term (value at the origin).
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial(vec![0; self.nvars]))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(exps), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = &*v * c;
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::constant_i64(self.nvars, 1);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        assert!(i < self.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] = e - 1;
            out.add_term(Monomial(exps), c * BigRational::from_integer(e.into()));
        }
        out
    }

    /// Floating-point evaluation at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            self.nvars,
            "eval: point dimension {} != nvars {}",
            x.len(),
            self.nvars
        );
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().expect("coefficient representable as f64");
            for (xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    t *= xi.powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// All partial derivatives as a vector field.
    pub fn gradient(&self) -> PolyVector {
        PolyVector {
            entries: (0..self.nvars).map(|i| self.partial(i)).collect(),
        }
    }

    /// True iff `other == c * self` for the given nonzero rational `c`.
    pub fn is_scalar_multiple(&self, other: &Polynomial, c: &BigRational) -> bool {
        self.scale(c) == *other
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest-degree terms first for readability.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", c)?;
            for (j, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    write!(f, "*x{}", j + 1)?;
                } else if e > 1 {
                    write!(f, "*x{}^{}", j + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

/// A vector of polynomials sharing the same variable set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyVector {
    pub entries: Vec<Polynomial>,
}

impl PolyVector {
    pub fn new(entries: Vec<Polynomial>) -> Self {
        if let Some(first) = entries.first() {
            let n = first.nvars();
            assert!(entries.iter().all(|p| p.nvars() == n));
        }
        PolyVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|p| p.eval(x)).collect()
    }
}

/// The squared Euclidean distance `rho = x_1^2 + ... + x_m^2`.
pub fn rho(nvars: usize) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for i in 0..nvars {
        p = p.add(&Polynomial::variable(nvars, i).pow(2));
    }
    p
}
