//! Property tests for the exact-arithmetic core: gradients against finite
//! differences, ring identities, and the realification round trip.

use num::complex::Complex64;
use num::{BigRational, FromPrimitive};
use proptest::prelude::*;

use germfib::mixed::{ComplexRational, MixedFunction};
use germfib::poly::Polynomial;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| {
        BigRational::new(n.into(), d.into())
    })
}

fn poly_strategy(nvars: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (
            prop::collection::vec(0u32..=3, nvars),
            small_rational(),
        ),
        0..6,
    )
    .prop_map(move |terms| Polynomial::from_terms(nvars, terms))
}

fn point_strategy(nvars: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, nvars)
}

fn mixed_strategy(nvars: usize) -> impl Strategy<Value = MixedFunction> {
    prop::collection::vec(
        (
            prop::collection::vec(0u32..=2, nvars),
            prop::collection::vec(0u32..=2, nvars),
            (-4i64..=4, -4i64..=4),
        ),
        0..5,
    )
    .prop_map(move |terms| {
        let mut f = MixedFunction::zero(nvars);
        for (nu, mu, (re, im)) in terms {
            let c = ComplexRational {
                re: BigRational::from_i64(re).unwrap(),
                im: BigRational::from_i64(im).unwrap(),
            };
            let mut mono = MixedFunction::constant(nvars, c);
            for (j, &e) in nu.iter().enumerate() {
                mono = mono.mul(&MixedFunction::variable(nvars, j).pow(e));
            }
            for (j, &e) in mu.iter().enumerate() {
                mono = mono.mul(&MixedFunction::conj_variable(nvars, j).pow(e));
            }
            f = f.add(&mono);
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_central_differences(
        p in (1usize..=4).prop_flat_map(|n| (poly_strategy(n), point_strategy(n)))
    ) {
        let (p, x) = p;
        let grad = p.gradient();
        let h = 1e-5;
        for i in 0..p.nvars() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (p.eval(&xp) - p.eval(&xm)) / (2.0 * h);
            let exact = grad.entries[i].eval(&x);
            let scale = exact.abs().max(1.0);
            prop_assert!(
                (fd - exact).abs() <= 1e-6 * scale,
                "fd {} vs exact {} at {:?}", fd, exact, x
            );
        }
    }

    #[test]
    fn add_then_subtract_is_identity(
        pq in (1usize..=4).prop_flat_map(|n| (poly_strategy(n), poly_strategy(n)))
    ) {
        let (p, q) = pq;
        prop_assert_eq!(p.add(&q).sub(&q), p);
    }

    #[test]
    fn product_evaluates_to_product(
        pqx in (1usize..=4).prop_flat_map(|n| (poly_strategy(n), poly_strategy(n), point_strategy(n)))
    ) {
        let (p, q, x) = pqx;
        let lhs = p.mul(&q).eval(&x);
        let rhs = p.eval(&x) * q.eval(&x);
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn realify_round_trip(
        fz in (1usize..=3).prop_flat_map(|n| {
            (mixed_strategy(n), prop::collection::vec((-0.7f64..0.7, -0.7f64..0.7), n))
        })
    ) {
        let (f, zs) = fz;
        let (re, im) = f.realify();
        let z: Vec<Complex64> = zs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let direct = f.eval_complex(&z);
        let mut xy = Vec::with_capacity(2 * zs.len());
        for &(a, b) in &zs {
            xy.push(a);
            xy.push(b);
        }
        let split = Complex64::new(re.eval(&xy), im.eval(&xy));
        prop_assert!((direct - split).norm() < 1e-12, "{} vs {}", direct, split);
    }

    #[test]
    fn scalar_pullout_of_partial(
        p in (1usize..=3).prop_flat_map(poly_strategy)
    ) {
        // d/dx_i (c * p) = c * dp/dx_i with exact coefficients
        let c = BigRational::new(3.into(), 7.into());
        for i in 0..p.nvars() {
            prop_assert_eq!(p.scale(&c).partial(i), p.partial(i).scale(&c));
        }
    }
}
