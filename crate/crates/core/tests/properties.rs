mod common;

use binform::geometry::{degree_phi_exact, hessian_is_definite, CircleMapKind, CircleMaps};
use binform::poly::{q, sign, to_f64, Bound, UniPoly, Q};
use binform::rank::{complex_rank, real_rank, SearchBudget, WITNESS_RESIDUAL_TOLERANCE};
use binform::roots::{
    count_projective_real_roots, has_n_distinct_real_roots, is_squarefree_by_gcd, isolate_real_roots,
    projective_root_points, resultant_gradient, sturm_count, SturmSequence,
};
use binform::theorem::{robust_winding, verify_theorem1};
use binform::{format_form, parse_form, BinaryForm, Error, Substitution};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn form_of_degree(lo: usize, hi: usize) -> impl Strategy<Value = BinaryForm> {
    (lo..=hi)
        .prop_flat_map(|n| prop::collection::vec((-20i64..=20, 1i64..=4), n + 1))
        .prop_map(|c| {
            BinaryForm::new(c.into_iter().map(|(a, b)| Q::new(BigInt::from(a), BigInt::from(b))).collect())
                .unwrap()
        })
        .prop_filter("nonzero", |f| !f.is_zero())
}

fn squarefree_form(lo: usize, hi: usize) -> impl Strategy<Value = BinaryForm> {
    form_of_degree(lo.max(2), hi).prop_filter("square-free", |f| !resultant_gradient(f).unwrap().is_zero())
}

fn invertible() -> impl Strategy<Value = Substitution> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_filter("invertible", |(a, b, c, d)| a * d - b * c != 0)
        .prop_map(|(a, b, c, d)| Substitution::from_ints(a, b, c, d))
}

fn real_rooted(lo: usize, hi: usize) -> impl Strategy<Value = BinaryForm> {
    (lo..=hi, any::<u64>()).prop_map(|(n, seed)| common::separated_real_rooted(&mut common::rng(seed), n, 0.15))
}

fn x() -> BinaryForm {
    BinaryForm::from_ints(&[1, 0])
}

fn y() -> BinaryForm {
    BinaryForm::from_ints(&[0, 1])
}

proptest! {
    #[test]
    fn euler_identity(f in form_of_degree(1, 10)) {
        let lhs = x().mul(&f.partial_x().unwrap()).add(&y().mul(&f.partial_y().unwrap()));
        prop_assert_eq!(lhs, f.scale(&q(f.degree() as i64)));
    }

    #[test]
    fn mixed_partials_commute(f in form_of_degree(2, 10)) {
        let xy = f.partial_x().unwrap().partial_y().unwrap();
        let yx = f.partial_y().unwrap().partial_x().unwrap();
        prop_assert_eq!(xy, yx);
    }

    #[test]
    fn substitution_is_a_group_action(f in form_of_degree(1, 7), a in invertible(), b in invertible()) {
        let stepwise = f.change_coordinates(&a).unwrap().change_coordinates(&b).unwrap();
        prop_assert_eq!(stepwise, f.change_coordinates(&a.compose(&b)).unwrap());
    }

    #[test]
    fn dehomogenize_round_trip(f in form_of_degree(0, 10)) {
        let d = f.dehomogenize().unwrap();
        prop_assert_eq!(BinaryForm::homogenize(&d.poly, f.degree()), f);
    }

    #[test]
    fn parse_format_round_trip(f in form_of_degree(0, 10)) {
        let text = format_form(&f);
        prop_assert_eq!(parse_form(&text).unwrap(), f);
    }

    #[test]
    fn mixed_degrees_are_rejected(d1 in 0u32..6, d2 in 0u32..6, a in 1i64..9, b in 1i64..9) {
        prop_assume!(d1 != d2);
        let text = format!("{a}*x^{d1} + {b}*y^{d2}");
        prop_assert!(matches!(parse_form(&text), Err(Error::NonHomogeneous(..))));
    }

    #[test]
    fn sturm_count_parity(c in prop::collection::vec(-20i64..=20, 2..=9)) {
        let p = UniPoly::from_ints(&c);
        prop_assume!(p.degree().unwrap_or(0) >= 1 && p.is_squarefree());
        let d = p.degree().unwrap();
        let k = sturm_count(&p, &Bound::NegInf, &Bound::PosInf).unwrap();
        prop_assert!(k <= d && k >= d % 2 && k % 2 == d % 2);
    }

    #[test]
    fn root_counts_survive_coordinate_changes(f in squarefree_form(2, 7), m in invertible()) {
        let g = f.change_coordinates(&m).unwrap();
        let (a, b) = (count_projective_real_roots(&f).unwrap(), count_projective_real_roots(&g).unwrap());
        prop_assert_eq!(a.distinct_real_projective, b.distinct_real_projective);
        prop_assert_eq!(a.is_squarefree_over_c, b.is_squarefree_over_c);
    }

    #[test]
    fn isolating_intervals_hold_one_root_each(f in squarefree_form(2, 8)) {
        let iso = isolate_real_roots(&f).unwrap();
        let p = iso.roots.squarefree_poly().clone();
        let sturm = SturmSequence::new(&p).unwrap();
        for iv in iso.intervals() {
            if iv.is_exact() {
                prop_assert!(p.eval(&iv.lo).is_zero());
            } else {
                let n = sturm.count(&Bound::Finite(iv.lo.clone()), &Bound::Finite(iv.hi.clone()));
                prop_assert_eq!(n, 1);
            }
        }
        let rc = count_projective_real_roots(&f).unwrap();
        prop_assert_eq!(iso.intervals().len(), rc.distinct_real_affine);
    }

    #[test]
    fn hessian_sign_passes_to_the_derivative(g in form_of_degree(3, 10)) {
        let at = |h: &BinaryForm| h.hessian().unwrap().evaluate(&q(1), &q(0));
        let (a, b) = (at(&g), at(&g.partial_x().unwrap()));
        if !a.is_zero() {
            prop_assert_eq!(sign(&a), sign(&b));
        }
    }
}

fn squarefree_by_resultant_or_constructed() -> impl Strategy<Value = BinaryForm> {
    prop_oneof![
        form_of_degree(2, 8),
        // g^2 h always has a repeated factor
        (form_of_degree(1, 3), form_of_degree(0, 3)).prop_map(|(g, h)| g.mul(&g).mul(&h)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn resultant_agrees_with_gcd_test(f in squarefree_by_resultant_or_constructed()) {
        prop_assume!(f.degree() >= 2);
        let by_resultant = !resultant_gradient(&f).unwrap().is_zero();
        prop_assert_eq!(by_resultant, is_squarefree_by_gcd(&f).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psi_degree_is_phi_degree_minus_one(f in squarefree_form(2, 7)) {
        let maps = CircleMaps::new(&f).unwrap();
        let phi = robust_winding(&maps, CircleMapKind::Phi);
        let psi = robust_winding(&maps, CircleMapKind::Psi);
        prop_assume!(phi.is_some() && psi.is_some());
        prop_assert_eq!(psi.unwrap(), phi.unwrap() - 1);
    }

    #[test]
    fn exact_and_numeric_phi_degrees_agree(f in squarefree_form(2, 7)) {
        prop_assume!(hessian_is_definite(&f.hessian().unwrap()).unwrap());
        let numeric = robust_winding(&CircleMaps::new(&f).unwrap(), CircleMapKind::Phi);
        prop_assume!(numeric.is_some());
        prop_assert_eq!(degree_phi_exact(&f).unwrap(), numeric.unwrap());
    }

    #[test]
    fn real_rooted_forms_turn_clockwise(f in real_rooted(2, 7)) {
        let samples = CircleMaps::new(&f).unwrap().trajectory(CircleMapKind::Phi, 512).unwrap();
        prop_assert!(samples.iter().all(|s| s.angular_velocity < 0.0));
    }

    #[test]
    fn preimages_dominate_degree(f in squarefree_form(2, 6), (za, zb) in (-5i64..=5, -5i64..=5)) {
        prop_assume!((za, zb) != (0, 0));
        // phi(p) is parallel to z = (za, zb) where zb f_x - za f_y = 0
        let fx = f.partial_x().unwrap();
        let fy = f.partial_y().unwrap();
        let g = fx.scale(&q(zb)).sub(&fy.scale(&q(za)));
        prop_assume!(!g.is_zero() && (g.degree() < 2 || !resultant_gradient(&g).unwrap().is_zero()));
        let points = projective_root_points(&g, &Q::new(BigInt::from(1), BigInt::from(1u64 << 40))).unwrap();
        let mut count = 0i64;
        for ((a, b), _) in points {
            let (a, b) = (to_f64(&a), to_f64(&b));
            let len = a.hypot(b);
            for s in [1.0, -1.0] {
                let (px, py) = (s * a / len, s * b / len);
                let dot = za as f64 * fx.eval_f64(px, py) + zb as f64 * fy.eval_f64(px, py);
                prop_assume!(dot.abs() > 1e-9);
                if dot > 0.0 {
                    count += 1;
                }
            }
        }
        let deg = robust_winding(&CircleMaps::new(&f).unwrap(), CircleMapKind::Phi);
        prop_assume!(deg.is_some());
        prop_assert!(count >= deg.unwrap().abs());
    }

    #[test]
    fn criteria_reports_are_sound(f in squarefree_form(3, 6)) {
        let r = verify_theorem1(&f).unwrap();
        prop_assert!(r.consistent, "{:?}", r);
        prop_assert!(r.violations.is_empty(), "{:?}", r);
        if r.criterion_a {
            prop_assert!(count_projective_real_roots(&f).unwrap().distinct_real_projective as i64
                >= r.winding_psi.unwrap_or(0).abs());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn certificates_are_monotone_and_ordered(f in squarefree_form(3, 6)) {
        let cert = real_rank(&f, &SearchBudget { max_candidates: 300, ..SearchBudget::default() }).unwrap();
        for w in cert.bound_history.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 <= w[0].1);
        }
        prop_assert!(cert.complex_lower <= cert.real_lower);
        prop_assert!(cert.real_lower <= cert.real_upper && cert.real_upper <= f.degree());
        match cert.real_exact {
            Some(r) => prop_assert_eq!(r == f.degree(), has_n_distinct_real_roots(&f).unwrap()),
            None => prop_assert!(!has_n_distinct_real_roots(&f).unwrap()),
        }
        if let Some(w) = &cert.witness {
            let scale = f.coeffs().iter().map(|c| to_f64(c).abs()).fold(0.0, f64::max);
            prop_assert!(w.residual <= WITNESS_RESIDUAL_TOLERANCE * scale.max(1.0));
            let terms: Vec<_> = w.terms.iter().map(|t| (t.lambda.to_f64(), t.alpha.to_f64(), t.beta.to_f64())).collect();
            let rebuilt = common::reconstruct(&terms, f.degree());
            for (a, b) in rebuilt.iter().zip(f.coeffs()) {
                prop_assert!((a - to_f64(b)).abs() <= 1e-6 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn squarefree_cubics_have_complex_rank_two(f in squarefree_form(3, 3)) {
        prop_assert_eq!(complex_rank(&f).unwrap(), 2);
    }

    #[test]
    fn top_rank_survives_coordinate_changes(f in real_rooted(3, 6), m in invertible()) {
        let g = f.change_coordinates(&m).unwrap();
        let budget = SearchBudget::default();
        let (a, b) = (real_rank(&f, &budget).unwrap(), real_rank(&g, &budget).unwrap());
        prop_assert_eq!(a.real_exact, Some(f.degree()));
        prop_assert_eq!(a.real_exact, b.real_exact);
        prop_assert_eq!(a.complex_exact, b.complex_exact);
    }
}
