//! Built-in germ catalog: the worked examples the tool is validated against.

use crate::germ::MapGerm;
use crate::mixed::MixedFunction;
use crate::poly::Polynomial;

/// One catalog entry with a short provenance note.
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub build: fn() -> MapGerm,
}

/// `G(x, y, z) = (xy, z^2)`: radial homogeneous, three discriminant rays,
/// Milnor set with eight components off the discriminant preimage.
pub fn xy_z2() -> MapGerm {
    let x = Polynomial::variable(3, 0);
    let y = Polynomial::variable(3, 1);
    let z = Polynomial::variable(3, 2);
    MapGerm::new(vec![x.mul(&y), z.pow(2)])
        .unwrap()
        .with_var_names(vec!["x".into(), "y".into(), "z".into()])
}

/// `G(x_1, ..., x_n) = (x_1, x_2^2 + ... + x_{n-1}^2 - x_n^2)` for `n >= 3`:
/// singular along the `x_1`-axis with discriminant `R x {0}`.
pub fn cone_projection(n: usize) -> MapGerm {
    assert!(n >= 3);
    let x1 = Polynomial::variable(n, 0);
    let mut q = Polynomial::zero(n);
    for i in 1..n - 1 {
        q = q.add(&Polynomial::variable(n, i).pow(2));
    }
    q = q.sub(&Polynomial::variable(n, n - 1).pow(2));
    let names = (1..=n).map(|i| format!("x{}", i)).collect();
    MapGerm::new(vec![x1, q]).unwrap().with_var_names(names)
}

/// The submersion `(x_1, ..., x_p)` on `R^m`: empty singular set.
pub fn linear_projection(m: usize, p: usize) -> MapGerm {
    assert!(m >= p && p >= 1);
    let comps = (0..p).map(|i| Polynomial::variable(m, i)).collect();
    MapGerm::new(comps).unwrap()
}

/// Realified `f * conj(g)` for `f = z1^2 + z2^2`, `g = z1^2 - z2^2`:
/// a coprime pair of radial weighted-homogeneous quadrics.
pub fn fgbar_quadric() -> MapGerm {
    let z1 = MixedFunction::variable(2, 0);
    let z2 = MixedFunction::variable(2, 1);
    let f = z1.pow(2).add(&z2.pow(2));
    let gbar = MixedFunction::conj_variable(2, 0)
        .pow(2)
        .sub(&MixedFunction::conj_variable(2, 1).pow(2));
    let mut g = MapGerm::from_mixed(f.mul(&gbar)).unwrap();
    g = g.with_flags(vec![crate::germ::DeclaredFlag {
        name: "fg_coprime".into(),
        note: "f = z1^2+z2^2 and g = z1^2-z2^2 share no factor".into(),
    }]);
    g
}

/// Realified `z1 * conj(z2)`: polar weighted-homogeneous with point
/// discriminant.
pub fn polar_z1z2bar() -> MapGerm {
    let f = MixedFunction::variable(2, 0).mul(&MixedFunction::conj_variable(2, 1));
    MapGerm::from_mixed(f).unwrap()
}

/// Product construction `(f, g)` in separate variables with `f = xy` on R^2
/// and the invertible `g(t) = t`.
pub fn product_xy_t() -> MapGerm {
    let x = Polynomial::variable(3, 0);
    let y = Polynomial::variable(3, 1);
    let t = Polynomial::variable(3, 2);
    MapGerm::new(vec![x.mul(&y), t])
        .unwrap()
        .with_var_names(vec!["x".into(), "y".into(), "t".into()])
}

pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "xy_z2",
            description: "G(x,y,z) = (xy, z^2); radial homogeneous, 8-component Milnor set",
            build: xy_z2,
        },
        CatalogEntry {
            name: "ex31_n3",
            description: "G(x1,x2,x3) = (x1, x2^2 - x3^2); cone over the x1-axis",
            build: || cone_projection(3),
        },
        CatalogEntry {
            name: "ex31_n4",
            description: "G(x1..x4) = (x1, x2^2 + x3^2 - x4^2); sphere fibration via rho-regularity",
            build: || cone_projection(4),
        },
        CatalogEntry {
            name: "fgbar_quadric",
            description: "realified f*conj(g) with f = z1^2+z2^2, g = z1^2-z2^2 (coprime pair)",
            build: fgbar_quadric,
        },
        CatalogEntry {
            name: "polar_z1z2bar",
            description: "realified z1*conj(z2); polar weighted-homogeneous, point discriminant",
            build: polar_z1z2bar,
        },
        CatalogEntry {
            name: "product_xy_t",
            description: "product germ (xy, t) in separate variables",
            build: product_xy_t,
        },
        CatalogEntry {
            name: "proj_3_2",
            description: "linear projection (x1, x2) on R^3; submersion baseline",
            build: || linear_projection(3, 2),
        },
    ]
}

pub fn find(name: &str) -> Option<MapGerm> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| (e.build)())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_is_nonempty_and_contains_known_names() {
        let names: Vec<&str> = entries().iter().map(|e| e.name).collect();
        assert!(names.contains(&"xy_z2"));
        assert!(names.contains(&"fgbar_quadric"));
        assert!(names.contains(&"ex31_n4"));
        assert!(!names.is_empty());
    }

    #[test]
    fn all_entries_build() {
        for e in entries() {
            let g = (e.build)();
            assert!(g.source_dim() >= g.target_dim());
        }
    }

    #[test]
    fn find_unknown_is_none() {
        assert!(find("nope").is_none());
    }
}
