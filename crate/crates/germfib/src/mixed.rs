//! Mixed functions: polynomials in complex variables `z_j` and their
//! conjugates, together with the exact realification to a pair of real
//! polynomials in `2n` variables ordered `(x_1, y_1, ..., x_n, y_n)`.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{BigRational, ToPrimitive, Zero};

use crate::poly::Polynomial;

/// Complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn from_rational(re: BigRational) -> Self {
        ComplexRational {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> Self {
        ComplexRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
    }
}

/// Exponent pair `(nu, mu)` of a mixed monomial `z^nu * conj(z)^mu`.
pub type MixedKey = (Vec<u32>, Vec<u32>);

/// A mixed function `F(z, conj(z))` with exact complex-rational coefficients.
#[derive(Clone, PartialEq, Debug)]
pub struct MixedFunction {
    nvars_complex: usize,
    terms: BTreeMap<MixedKey, ComplexRational>,
}

impl MixedFunction {
    pub fn zero(n: usize) -> Self {
        MixedFunction {
            nvars_complex: n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: ComplexRational) -> Self {
        let mut f = Self::zero(n);
        if !c.is_zero() {
            f.terms.insert((vec![0; n], vec![0; n]), c);
        }
        f
    }

    /// The variable `z_j` (0-based).
    pub fn variable(n: usize, j: usize) -> Self {
        assert!(j < n);
        let mut nu = vec![0; n];
        nu[j] = 1;
        let mut f = Self::zero(n);
        f.terms.insert(
            (nu, vec![0; n]),
            ComplexRational::from_rational(BigRational::from_integer(1.into())),
        );
        f
    }

    /// The conjugated variable `conj(z_j)` (0-based).
    pub fn conj_variable(n: usize, j: usize) -> Self {
        assert!(j < n);
        let mut mu = vec![0; n];
        mu[j] = 1;
        let mut f = Self::zero(n);
        f.terms.insert(
            (vec![0; n], mu),
            ComplexRational::from_rational(BigRational::from_integer(1.into())),
        );
        f
    }

    pub fn nvars_complex(&self) -> usize {
        self.nvars_complex
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MixedKey, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: MixedKey, c: ComplexRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars_complex, other.nvars_complex);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars_complex, other.nvars_complex);
        let mut out = Self::zero(self.nvars_complex);
        for ((nua, mua), ca) in &self.terms {
            for ((nub, mub), cb) in &other.terms {
                let nu: Vec<u32> = nua.iter().zip(nub).map(|(a, b)| a + b).collect();
                let mu: Vec<u32> = mua.iter().zip(mub).map(|(a, b)| a + b).collect();
                out.add_term((nu, mu), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(
            self.nvars_complex,
            ComplexRational::from_rational(BigRational::from_integer(1.into())),
        );
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Complex floating-point evaluation, the oracle for `realify`.
    pub fn eval_complex(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars_complex);
        let mut acc = Complex64::new(0.0, 0.0);
        for ((nu, mu), c) in &self.terms {
            let mut t = c.to_c64();
            for (j, zj) in z.iter().enumerate() {
                if nu[j] > 0 {
                    t *= zj.powu(nu[j]);
                }
                if mu[j] > 0 {
                    t *= zj.conj().powu(mu[j]);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact expansion into `(Re F, Im F)` over the `2n` real variables
    /// `(x_1, y_1, ..., x_n, y_n)` via `z_j = x_j + i y_j`.
    pub fn realify(&self) -> (Polynomial, Polynomial) {
        let n = self.nvars_complex;
        let nv = 2 * n;
        let mut re = Polynomial::zero(nv);
        let mut im = Polynomial::zero(nv);
        for ((nu, mu), c) in &self.terms {
            // term = c * prod (x_j + i y_j)^nu_j * prod (x_j - i y_j)^mu_j
            let mut tre = Polynomial::constant(nv, c.re.clone());
            let mut tim = Polynomial::constant(nv, c.im.clone());
            for j in 0..n {
                let x = Polynomial::variable(nv, 2 * j);
                let y = Polynomial::variable(nv, 2 * j + 1);
                for _ in 0..nu[j] {
                    // (tre + i tim) * (x + i y)
                    let new_re = tre.mul(&x).sub(&tim.mul(&y));
                    let new_im = tre.mul(&y).add(&tim.mul(&x));
                    tre = new_re;
                    tim = new_im;
                }
                for _ in 0..mu[j] {
                    // (tre + i tim) * (x - i y)
                    let new_re = tre.mul(&x).add(&tim.mul(&y));
                    let new_im = tim.mul(&x).sub(&tre.mul(&y));
                    tre = new_re;
                    tim = new_im;
                }
            }
            re = re.add(&tre);
            im = im.add(&tim);
        }
        (re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit_disc_point(rng: &mut impl Rng) -> Complex64 {
        loop {
            let re = rng.gen_range(-1.0..1.0);
            let im = rng.gen_range(-1.0..1.0);
            let z = Complex64::new(re, im);
            if z.norm() <= 1.0 {
                return z;
            }
        }
    }

    fn assert_realify_roundtrip(f: &MixedFunction, samples: usize) {
        let n = f.nvars_complex();
        let (re, im) = f.realify();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..samples {
            let z: Vec<Complex64> = (0..n).map(|_| random_unit_disc_point(&mut rng)).collect();
            let xy: Vec<f64> = z.iter().flat_map(|w| [w.re, w.im]).collect();
            let direct = f.eval_complex(&z);
            let split = Complex64::new(re.eval(&xy), im.eval(&xy));
            assert!(
                (direct - split).norm() < 1e-12,
                "roundtrip mismatch: {} vs {}",
                direct,
                split
            );
        }
    }

    #[test]
    fn realify_z_zbar_is_norm_squared() {
        // F = z * conj(z) -> (x^2 + y^2, 0)
        let f = MixedFunction::variable(1, 0).mul(&MixedFunction::conj_variable(1, 0));
        let (re, im) = f.realify();
        let expected = crate::poly::rho(2);
        assert_eq!(re, expected);
        assert!(im.is_zero());
    }

    #[test]
    fn realify_z1_z2bar() {
        // F = z1 * conj(z2) -> (x1 x2 + y1 y2, x2 y1 - x1 y2)
        let f = MixedFunction::variable(2, 0).mul(&MixedFunction::conj_variable(2, 1));
        let (re, im) = f.realify();
        // vars: x1=0, y1=1, x2=2, y2=3
        let v = |i| Polynomial::variable(4, i);
        let expected_re = v(0).mul(&v(2)).add(&v(1).mul(&v(3)));
        let expected_im = v(2).mul(&v(1)).sub(&v(0).mul(&v(3)));
        assert_eq!(re, expected_re);
        assert_eq!(im, expected_im);
        assert_realify_roundtrip(&f, 100);
    }

    #[test]
    fn realify_fg_conjugate_quadrics() {
        // F = (z1^2 + z2^2) * conj(z1^2 - z2^2); Re F = |z1|^4 - |z2|^4
        let z1 = MixedFunction::variable(2, 0);
        let z2 = MixedFunction::variable(2, 1);
        let zb1 = MixedFunction::conj_variable(2, 0);
        let zb2 = MixedFunction::conj_variable(2, 1);
        let f = z1.pow(2).add(&z2.pow(2));
        let g_conj = zb1.pow(2).sub(&zb2.pow(2));
        let fg = f.mul(&g_conj);
        let (re, _) = fg.realify();
        // |z1|^4 - |z2|^4 as real polynomial in (x1,y1,x2,y2)
        let v = |i| Polynomial::variable(4, i);
        let n1 = v(0).pow(2).add(&v(1).pow(2));
        let n2 = v(2).pow(2).add(&v(3).pow(2));
        let expected = n1.pow(2).sub(&n2.pow(2));
        assert_eq!(re, expected);
        assert_realify_roundtrip(&fg, 100);
    }

    #[test]
    fn roundtrip_on_a_mixed_sum() {
        let z = MixedFunction::variable(1, 0);
        let zb = MixedFunction::conj_variable(1, 0);
        let f = z.pow(3).add(&zb.pow(2)).sub(&z.mul(&zb));
        assert_realify_roundtrip(&f, 100);
    }
}
