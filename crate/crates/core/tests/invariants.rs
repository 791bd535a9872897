//! Property tests against independent oracles: schoolbook polynomial arithmetic for the
//! fields, closed-form orders for the classical groups, brute-force group laws.

use std::sync::Arc;

use proptest::prelude::*;
use xtower::extraspecial::{ExtraspecialGroup, IsoTag};
use xtower::gf::{Elem, GaloisField};
use xtower::isometry::{gu_order, sp_order};
use xtower::matrix::Matrix;
use xtower::reps::standard_rep;
use xtower::weil::{configs, Verify};

const FIELDS: &[(u32, u32)] = &[
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 1),
    (3, 2),
    (5, 1),
    (5, 2),
    (7, 1),
    (7, 2),
    (11, 1),
];

/// Coefficients (low to high) of the element encoded in base `p`.
fn digits(a: Elem, p: u32, r: u32) -> Vec<u32> {
    let mut v = a.0;
    (0..r)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn encode(c: &[u32], p: u32) -> Elem {
    Elem(c.iter().rev().fold(0, |acc, &d| acc * p + d))
}

/// Product of two polynomials reduced by the monic modulus, computed the slow way.
fn schoolbook_mul(f: &GaloisField, a: Elem, b: Elem) -> Elem {
    let (p, r) = (f.p(), f.r());
    let modulus = f.modulus();
    let (a, b) = (digits(a, p, r), digits(b, p, r));
    let mut prod = vec![0u32; 2 * r as usize];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (r as usize..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (t, &m) in modulus.iter().enumerate() {
                let idx = k - r as usize + t;
                prod[idx] = (prod[idx] + p * p - c * m % p) % p;
            }
        }
    }
    encode(&prod[..r as usize], p)
}

fn field_and_elems() -> impl Strategy<Value = (Arc<GaloisField>, Elem, Elem, Elem)> {
    (0..FIELDS.len()).prop_flat_map(|i| {
        let (p, r) = FIELDS[i];
        let f = GaloisField::new(p, r).unwrap();
        let q = f.order();
        (Just(f), 0..q, 0..q, 0..q).prop_map(|(f, a, b, c)| (f, Elem(a), Elem(b), Elem(c)))
    })
}

proptest! {
    #[test]
    fn multiplication_matches_schoolbook((f, a, b, _) in field_and_elems()) {
        prop_assert_eq!(f.mul(a, b), schoolbook_mul(&f, a, b));
    }

    #[test]
    fn field_axioms((f, a, b, c) in field_and_elems()) {
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(a, b), b), a);
        if a != f.zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!(f.pow(a, f.order() as i64 - 1).unwrap(), f.one());
        }
        // Frobenius is additive and multiplicative.
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

    #[test]
    fn inverse_and_determinant(seed in any::<u64>(), n in 1usize..5) {
        let f = GaloisField::new(3, 2).unwrap();
        let q = f.order() as u64;
        let mut s = seed;
        let mut next = move || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); Elem(((s >> 33) % q) as u32) };
        let a = Matrix::from_fn(n, n, |_, _| next());
        let b = Matrix::from_fn(n, n, |_, _| next());
        prop_assert_eq!(a.mul(&b, &f).det(&f), f.mul(a.det(&f), b.det(&f)));
        match a.inverse(&f) {
            Ok(ai) => {
                prop_assert!(a.mul(&ai, &f).is_identity());
                prop_assert_eq!(a.rank(&f), n);
            }
            Err(_) => prop_assert_eq!(a.det(&f), f.zero()),
        }
    }

    #[test]
    fn extraspecial_group_laws(i in 0usize..3usize.pow(5), j in 0usize..3usize.pow(5), k in 0usize..3usize.pow(5)) {
        let g = ExtraspecialGroup::standard(IsoTag::En, 2, 3).unwrap();
        let (a, b, c) = (g.element_at(i), g.element_at(j), g.element_at(k));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert!(g.mul(&a, &g.inverse(&a)).is_identity());
        prop_assert!(g.commutator(&a, &b).is_central());
        // Exponent p for odd p.
        prop_assert!(g.power(&a, 3).is_identity());
    }

    #[test]
    fn standard_reps_are_homomorphisms(i in 0usize..2usize.pow(7), j in 0usize..2usize.pow(7)) {
        let f3 = GaloisField::prime(3).unwrap();
        let rep = standard_rep(IsoTag::Dn1Q, 3, 2, &f3).unwrap();
        let g = rep.group().clone();
        let (a, b) = (g.element_at(i), g.element_at(j));
        prop_assert_eq!(rep.eval(&g.mul(&a, &b)), rep.eval(&a).mul(&rep.eval(&b), &f3));
    }
}

#[test]
fn isometry_groups_have_classical_orders() {
    let f4 = GaloisField::new(2, 2).unwrap();
    let f3 = GaloisField::prime(3).unwrap();
    let f5 = GaloisField::prime(5).unwrap();
    let sp = configs::symplectic(3, 1, &f4, 1_000_000).unwrap();
    assert_eq!(sp.order() as u128, sp_order(1, 3));
    let sp5 = configs::symplectic(5, 1, &GaloisField::new(2, 4).unwrap(), 1_000_000).unwrap();
    assert_eq!(sp5.order() as u128, sp_order(1, 5));
    let gu = configs::unitary(&f4, 3, &f3, 1_000_000).unwrap();
    assert_eq!(gu.order() as u128, gu_order(3, 2));
    let gu2 = configs::unitary(&f4, 2, &f5, 1_000_000).unwrap();
    assert_eq!(gu2.order() as u128, gu_order(2, 2));
}

#[test]
fn weil_extension_splits_for_sp2_f5() {
    // p = 5: E^1 has a degree-5 representation over F_16, the smallest field of
    // characteristic 2 containing a primitive fifth root of unity.
    let ext = configs::symplectic(5, 1, &GaloisField::new(2, 4).unwrap(), 1_000_000).unwrap();
    let pairs = ext.pairs(Verify::Sample {
        count: 400,
        seed: 7,
    });
    let report = ext.verify_pairs(&pairs, true);
    assert_eq!(report.checked, 400);
    assert_eq!(report.failures(), 0, "{report:?}");
    let elements = ext.verify_elements(0).unwrap();
    assert_eq!(elements.failures(), 0, "{elements:?}");
}

#[test]
fn sampled_sweeps_are_reproducible() {
    let ext = configs::symplectic(3, 1, &GaloisField::new(2, 2).unwrap(), 1_000_000).unwrap();
    let a = ext.pairs(Verify::Sample { count: 50, seed: 3 });
    let b = ext.pairs(Verify::Sample { count: 50, seed: 3 });
    let c = ext.pairs(Verify::Sample { count: 50, seed: 4 });
    assert_eq!(a, b);
    assert_ne!(a, c);
}
