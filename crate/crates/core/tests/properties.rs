//! Cross-module invariants, randomized where the domain is large.

use std::sync::OnceLock;

use proptest::prelude::*;

use wordmap_core::chars::{
    count_power_word_solutions, fs_indicator, DEFAULT_CLASS_CAP,
};
use wordmap_core::ff::numtheory::{p_part, valuation};
use wordmap_core::grp::EnumLimits;
use wordmap_core::store::to_bytes;
use wordmap_core::witness::{
    main2_certificate, main2_exponent, odd_order_sqrt, sl2_certificate, Certificate, ExponentParams,
    Variant,
};
use wordmap_core::words::{power_image, product_cover, width, word_image, ClassUnion, Width, DEFAULT_EVAL_CAP};
use wordmap_core::{Field, GroupData, ImageStrategy, Matrix, Word};

fn build(spec: &str) -> GroupData {
    GroupData::build(&spec.parse().unwrap(), EnumLimits::default()).unwrap()
}

fn sl25() -> &'static GroupData {
    static G: OnceLock<GroupData> = OnceLock::new();
    G.get_or_init(|| build("SL(2,5)"))
}

fn sl27() -> &'static GroupData {
    static G: OnceLock<GroupData> = OnceLock::new();
    G.get_or_init(|| build("SL(2,7)"))
}

const FIELD_SIZES: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 16, 25];

fn arb_word() -> impl Strategy<Value = Word> {
    prop::collection::vec((1u32..=3, -4i64..=4), 0..6).prop_map(Word::from_letters)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn field_units_have_order_dividing_q_minus_1(qi in 0usize..FIELD_SIZES.len(), a in 1u32..1000) {
        let f = Field::of_order(FIELD_SIZES[qi]).unwrap();
        let a = a % f.size();
        prop_assume!(a != 0);
        let q1 = f.size() as i64 - 1;
        prop_assert_eq!(f.pow(a, q1).unwrap(), 1);
        prop_assert_eq!(q1 as u64 % f.element_order(a).unwrap(), 0);
    }

    #[test]
    fn determinant_is_multiplicative(qi in 0usize..FIELD_SIZES.len(), seed in prop::collection::vec(0u32..1000, 18)) {
        let f = Field::of_order(FIELD_SIZES[qi]).unwrap();
        let m = |s: &[u32]| Matrix::new(3, s.iter().map(|&x| x % f.size()).collect()).unwrap();
        let (a, b) = (m(&seed[..9]), m(&seed[9..]));
        prop_assert_eq!(a.mul(&b, &f).det(&f), f.mul(a.det(&f), b.det(&f)));
        if let Some(inv) = a.inverse(&f) {
            prop_assert!(a.mul(&inv, &f).is_identity());
        }
    }

    #[test]
    fn class_sizes_times_centralizers(x in 0usize..336) {
        let d = sl27();
        let c = d.classes.class_of(x);
        prop_assert_eq!(d.classes.sizes[c] * d.classes.centralizer_order(x), d.order());
        prop_assert_eq!(d.group.centralizer_order_direct(x), d.classes.centralizer_order(x));
    }

    #[test]
    fn conjugates_share_a_class(x in 0usize..336, y in 0usize..336) {
        let d = sl27();
        let cx = d.classes.class_of(x);
        prop_assert_eq!(d.classes.class_of(d.group.conj(x, y)), cx);
        prop_assert_eq!(d.classes.class_of(d.group.inv(x)), d.classes.inverse_class[cx]);
    }

    #[test]
    fn power_map_tracks_powers(x in 0usize..120, j in -30i64..30) {
        let d = sl25();
        let c = d.classes.class_of(x);
        prop_assert_eq!(d.classes.class_of(d.group.pow(x, j)), d.classes.power(c, j));
    }

    #[test]
    fn jordan_parts_commute_and_split_orders(x in 0usize..336) {
        let d = sl27();
        let g = &d.group;
        let (s, u) = g.jordan_decompose(x, 7);
        prop_assert_eq!(g.mul(s, u), x);
        prop_assert!(g.commutes(s, u));
        prop_assert!(!g.element_order(s).is_multiple_of(7));
        let ou = g.element_order(u);
        prop_assert_eq!(ou, 7u64.pow(valuation(ou, 7)));
    }

    #[test]
    fn identity_lies_in_every_image(w in arb_word()) {
        let d = sl25();
        let ids = vec![d.group.identity(); w.arity() as usize];
        prop_assert_eq!(w.evaluate(&d.group, &ids).unwrap(), d.group.identity());
        let image = word_image(&d.group, &d.classes, Some(d.structure_constants()), &w, ImageStrategy::Auto, DEFAULT_EVAL_CAP).unwrap();
        prop_assert!(image.contains(d.classes.class_of(d.group.identity())));
    }

    #[test]
    fn strategies_agree_on_two_letter_words(w in prop::collection::vec((1u32..=2, -3i64..=3), 0..5).prop_map(Word::from_letters)) {
        let d = sl25();
        let sc = Some(d.structure_constants());
        let brute = word_image(&d.group, &d.classes, sc, &w, ImageStrategy::Brute, DEFAULT_EVAL_CAP).unwrap();
        let reduced = word_image(&d.group, &d.classes, sc, &w, ImageStrategy::ClassReduced, DEFAULT_EVAL_CAP).unwrap();
        let auto = word_image(&d.group, &d.classes, sc, &w, ImageStrategy::Auto, DEFAULT_EVAL_CAP).unwrap();
        prop_assert_eq!(&brute, &reduced);
        prop_assert_eq!(&brute, &auto);
    }

    #[test]
    fn structure_constant_cover_matches_direct_products(
        a in prop::collection::vec(any::<bool>(), 11),
        b in prop::collection::vec(any::<bool>(), 11),
    ) {
        let d = sl27();
        let k = d.classes.num_classes();
        let pick = |m: &[bool]| ClassUnion::from_classes(&d.classes, (0..k).filter(|&c| m[c % m.len()]));
        let (u, v) = (pick(&a), pick(&b));
        prop_assume!(u.element_count() > 0 && v.element_count() > 0);
        let sc = product_cover(&d.group, &d.classes, Some(d.structure_constants()), &[u.clone(), v.clone()]).unwrap();
        let direct = product_cover(&d.group, &d.classes, None, &[u, v]).unwrap();
        prop_assert_eq!(sc, direct);
    }

    #[test]
    fn width_one_iff_image_is_everything(k in 1i64..=12) {
        let d = sl25();
        let image = power_image(&d.classes, k);
        let w = width(&d.group, &d.classes, Some(d.structure_constants()), &image, 6).unwrap();
        prop_assert_eq!(w == Width::Exact(1), image.is_full());
    }

    #[test]
    fn p_part_is_multiplicative(m in 1u64..1000, n in 1u64..1000, pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        prop_assume!(m.min(n) == 1 || p_part(wordmap_core::ff::numtheory::gcd(m, n), p) == 1);
        prop_assert_eq!(p_part(m * n, p), p_part(m, p) * p_part(n, p));
    }

    #[test]
    fn main2_exponent_is_at_least_one(n in 2u64..16, qi in 0usize..FIELD_SIZES.len(), eps in prop::bool::ANY, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let eps = if eps { 1 } else { -1 };
        for variant in [Variant::I, Variant::II] {
            let params = ExponentParams { n, q: FIELD_SIZES[qi], eps, p, variant };
            if let Ok(a) = main2_exponent(&params) {
                prop_assert!(a >= 1);
                if variant == Variant::I {
                    prop_assert!(a > valuation(n, p));
                }
            }
        }
    }
}

#[test]
fn power_images_are_monotone_under_divisibility() {
    let d = sl25();
    for k in 1..=12i64 {
        let big = power_image(&d.classes, k);
        for dd in (1..=k).filter(|dd| k % dd == 0) {
            let small = power_image(&d.classes, dd);
            assert!(big.classes().all(|c| small.contains(c)), "x^{k} ⊄ x^{dd}");
        }
    }
}

#[test]
fn fs_indicators_are_integers_in_range() {
    for d in [sl25(), sl27()] {
        let table = d.character_table(DEFAULT_CLASS_CAP).unwrap();
        for (chi, nu) in fs_indicator(table, &d.classes, 2).unwrap().into_iter().enumerate() {
            assert!(nu.is_integer());
            assert_eq!(nu.to_integer() != 0, table.real[chi]);
        }
    }
}

#[test]
fn odd_order_square_roots_exhaustive() {
    for spec in ["SL(2,5)", "SL(2,7)", "SL(2,9)", "SU(3,3)", "SL(3,4)"] {
        let d = build(spec);
        let g = &d.group;
        for x in (0..g.order()).filter(|&x| g.element_order(x) % 2 == 1) {
            let h = odd_order_sqrt(g, x).unwrap();
            assert_eq!(g.mul(h, h), x, "{spec}");
        }
    }
}

#[test]
fn central_elements_have_no_power_product_solutions() {
    let cases = [
        ("SL(2,5)", ExponentParams { n: 2, q: 5, eps: 1, p: 2, variant: Variant::I }),
        ("GL(2,5)", ExponentParams { n: 2, q: 5, eps: 1, p: 2, variant: Variant::II }),
        ("SL(3,4)", ExponentParams { n: 3, q: 4, eps: 1, p: 3, variant: Variant::III }),
        ("SL(3,4)", ExponentParams { n: 3, q: 4, eps: 1, p: 3, variant: Variant::I }),
    ];
    for (spec, params) in cases {
        let d = build(spec);
        let cert = main2_certificate(&d, &params, EnumLimits::default()).unwrap();
        let wordmap_core::witness::Evidence::MissedElement { element, exponent, .. } = &cert.evidence else {
            panic!("{spec}: wrong evidence");
        };
        let z = d.class_of_matrix(element).unwrap();
        assert_eq!(count_power_word_solutions(&d.classes, d.structure_constants(), *exponent as i64, z), 0, "{spec}");
        let back: Certificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        assert!(back.verify(EnumLimits::default()).unwrap());
    }
}

#[test]
fn sl2_exponent_matches_two_part() {
    for q in [5u64, 7, 9, 11, 13] {
        let d = build(&format!("SL(2,{q})"));
        let cert = sl2_certificate(&d, EnumLimits::default()).unwrap();
        let wordmap_core::witness::Evidence::MissedElement { exponent, .. } = cert.evidence else { panic!() };
        assert_eq!(2 * exponent, p_part(q * q - 1, 2));
    }
}

#[test]
fn bundles_are_deterministic() {
    for spec in ["SL(2,7)", "SU(3,3)"] {
        let bytes = || {
            let d = build(spec);
            d.character_table(DEFAULT_CLASS_CAP).unwrap();
            to_bytes(&d.bundle(true).unwrap()).unwrap()
        };
        assert_eq!(bytes(), bytes(), "{spec}");
    }
}
