use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use mixflag::coxeter::{CoxeterSystem, WeylElement};
use mixflag::hecke::{HeckeAlgebra, HeckeElement};
use mixflag::homotopy::{ComplexObj, PresentedCategory, Scalar, Summand};
use mixflag::mixclass::MixedContext;
use mixflag::ring::LaurentPoly;
use num_bigint::BigInt;
use proptest::prelude::*;

fn b2() -> &'static MixedContext {
    static CTX: OnceLock<MixedContext> = OnceLock::new();
    CTX.get_or_init(|| MixedContext::characteristic_zero("B2".parse().unwrap()))
}

fn a2_hecke() -> &'static HeckeAlgebra {
    static H: OnceLock<HeckeAlgebra> = OnceLock::new();
    H.get_or_init(|| HeckeAlgebra::new(Arc::new(CoxeterSystem::parse("A2").unwrap())))
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-3i64..=3, -4i64..=4), 0..4).prop_map(LaurentPoly::from_terms)
}

fn element(sys_order: usize) -> impl Strategy<Value = Vec<(usize, LaurentPoly)>> {
    prop::collection::vec((0..sys_order, poly()), 0..4)
}

fn build(h: &HeckeAlgebra, terms: Vec<(usize, LaurentPoly)>) -> HeckeElement {
    let els = h.system().elements();
    HeckeElement::from_terms(terms.into_iter().map(|(i, p)| (els[i].clone(), p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hecke_multiplication_is_associative(a in element(6), b in element(6), c in element(6)) {
        let h = a2_hecke();
        let (a, b, c) = (build(h, a), build(h, b), build(h, c));
        prop_assert_eq!(h.mul(&h.mul(&a, &b), &c), h.mul(&a, &h.mul(&b, &c)));
    }

    #[test]
    fn bar_is_a_ring_involution(a in element(6), b in element(6)) {
        let h = a2_hecke();
        let (a, b) = (build(h, a), build(h, b));
        prop_assert_eq!(h.bar_involution(&h.bar_involution(&a)), a.clone());
        prop_assert_eq!(h.bar_involution(&h.mul(&a, &b)), h.mul(&h.bar_involution(&a), &h.bar_involution(&b)));
    }

    #[test]
    fn kappa_is_an_antihomomorphism(x in 0usize..8, y in 0usize..8) {
        let ctx = b2();
        let els = ctx.system().elements();
        let a = ctx.parity_class(&els[x]).unwrap();
        let b = ctx.tilting_class(&els[y]).unwrap();
        let dual = ctx.dual();
        let lhs = ctx.kappa(&ctx.convolve(&a, &b).unwrap()).unwrap();
        let rhs = dual.convolve(&ctx.kappa(&b).unwrap(), &ctx.kappa(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twists_commute_with_convolution(x in 0usize..8, y in 0usize..8, n in -3i64..=3) {
        let ctx = b2();
        let els = ctx.system().elements();
        let a = ctx.tilting_class(&els[x]).unwrap();
        let b = ctx.costd_class(&els[y]);
        let lhs = ctx.convolve(&a.tate_twist(n), &b).unwrap();
        prop_assert_eq!(lhs, ctx.convolve(&a, &b).unwrap().tate_twist(n));
    }

    #[test]
    fn degrading_forgets_twists(x in 0usize..8, n in -4i64..=4) {
        let ctx = b2();
        let c = ctx.projective_class(&ctx.system().elements()[x]).unwrap();
        prop_assert_eq!(ctx.degrade(&c.tate_twist(n)).unwrap(), ctx.degrade(&c).unwrap());
    }

    #[test]
    fn minimalize_is_idempotent_and_preserves_invariants(pad in prop::collection::vec((0usize..2, -2i64..=2, -1i64..=1, 1i64..=3), 0..4)) {
        // Δ_s padded with contractible pieces E_g{m} --c--> E_g{m} in degrees (k, k+1).
        let cat = PresentedCategory::sl2();
        let e = cat.generator("e").unwrap();
        let s = cat.generator("s").unwrap();
        let one = vec![vec![vec![Scalar::from_integer(BigInt::from(1))]]];
        let mut cx = ComplexObj::two_term(cat.clone(), 0, vec![Summand { gen: s, shift: 0 }], vec![Summand { gen: e, shift: 1 }], one).unwrap();
        for (gen, shift, k, c) in pad {
            let g = Summand { gen, shift };
            let d = vec![vec![vec![Scalar::from_integer(BigInt::from(c))]]];
            let piece = ComplexObj::two_term(cat.clone(), k, vec![g], vec![g], d).unwrap();
            cx = cx.direct_sum(&piece).unwrap();
        }
        let min = cx.minimalize();
        prop_assert_eq!(min.minimalize(), min.clone());
        prop_assert_eq!(min.size(), 2);
        let ctx = MixedContext::characteristic_zero("A1".parse().unwrap());
        prop_assert_eq!(min.ch(&ctx).unwrap(), cx.ch(&ctx).unwrap());
        let point = ComplexObj::generator(cat, e);
        for q in -2..=2 {
            for k in -2..=2 {
                prop_assert_eq!(min.hom_dim(&point, q, k).unwrap(), cx.hom_dim(&point, q, k).unwrap());
                prop_assert_eq!(point.hom_dim(&min, q, k).unwrap(), point.hom_dim(&cx, q, k).unwrap());
            }
        }
    }
}

#[test]
fn sl2_homs_agree_with_hilbert_series() {
    let ctx = MixedContext::characteristic_zero("A1".parse().unwrap());
    let cat = PresentedCategory::sl2();
    let labels = [("e", WeylElement::identity()), ("s", ctx.system().generator(0))];
    for (lx, x) in &labels {
        for (ly, y) in &labels {
            let hh = ctx.hom_hilbert(x, y).unwrap();
            let a = ComplexObj::generator(cat.clone(), cat.generator(lx).unwrap());
            let b = ComplexObj::generator(cat.clone(), cat.generator(ly).unwrap());
            for m in -2..=4 {
                let dim = a.hom_dim(&b, m, 0).unwrap();
                assert_eq!(BigInt::from(dim), hh.coeff(m), "Hom(E_{lx}, E_{ly}{{{m}}})");
            }
        }
    }
}

#[test]
fn cone_characters_are_additive() {
    let ctx = MixedContext::characteristic_zero("A1".parse().unwrap());
    let cat = PresentedCategory::sl2();
    let e = cat.generator("e").unwrap();
    let s = cat.generator("s").unwrap();
    let a = ComplexObj::from_object(cat.clone(), vec![Summand { gen: e, shift: -1 }]);
    let b = ComplexObj::from_object(cat, vec![Summand { gen: s, shift: 0 }]);
    let f = BTreeMap::from([(0, vec![vec![vec![Scalar::from_integer(BigInt::from(1))]]])]);
    let cone = ComplexObj::cone(&a, &b, &f).unwrap();
    assert_eq!(cone.ch(&ctx).unwrap(), b.ch(&ctx).unwrap().sub(&a.ch(&ctx).unwrap()));
    // this cone is ∇_s
    assert_eq!(cone.ch(&ctx).unwrap(), ctx.costd_class(&ctx.system().generator(0)));
}
