mod common;

use acm5_core::family::{closed_form_gamma, NOT_EMITTED};
use acm5_core::frames::CanonicalAlgebra;
use acm5_core::scalar::{rat, Rational};
use acm5_core::torsionclass::{WModule, WSubspaces};
use acm5_core::{build, ext_d, identify_group, verify_family, Error, FamilyParams};
use common::params;

#[test]
fn stiefel_point_is_strict_w4_with_skew_nijenhuis() {
    let g = build(params([3, 4, 0, 0])).unwrap().geometry();
    let gamma = g.intrinsic_torsion().unwrap();
    let report = WSubspaces::<Rational>::new().classify(&gamma);
    assert_eq!(report.strict_class(), "W4");
    let n = g.nijenhuis().unwrap();
    assert!(!n.is_zero());
    assert!(n.is_totally_skew());
    let p = g.predicates().unwrap();
    assert!(p.xi_killing && p.generalized_quasi_sasaki && !p.normal);
}

#[test]
fn sl2_point_is_strict_w7() {
    let g = build(params([0, 0, 3, 4])).unwrap().geometry();
    let report = WSubspaces::<Rational>::new().classify(&g.intrinsic_torsion().unwrap());
    assert_eq!(report.strict_class(), "W7");
    assert!(!report.norm(WModule::W7).eq(&rat(0, 1)));
}

#[test]
fn mixed_point_carries_both_modules() {
    let g = build(params([1, 0, 2, 0])).unwrap().geometry();
    let report = WSubspaces::<Rational>::new().classify(&g.intrinsic_torsion().unwrap());
    assert_eq!(report.strict_class(), "W4⊕W7");
}

#[test]
fn zero_point_is_cosymplectic() {
    let inst = build(params([0, 0, 0, 0])).unwrap();
    let g = inst.geometry();
    let report = WSubspaces::<Rational>::new().classify(&g.intrinsic_torsion().unwrap());
    assert_eq!(report.strict_class(), "cosymplectic (integrable)");
    assert!(g.predicates().unwrap().cosymplectic);
    assert!(matches!(identify_group(&inst.params), Err(Error::Degenerate(_))));
}

#[test]
fn closed_form_gamma_matches_the_koszul_route() {
    let mut r = common::rng(17);
    for _ in 0..20 {
        let p = common::valid_params(&mut r);
        let g = build(p.clone()).unwrap().geometry().intrinsic_torsion().unwrap();
        assert_eq!(g.tensor(), &closed_form_gamma(&p), "{p}");
    }
}

/// `d e5` splits as `(γ + 2dη) - (γ - dη) = 3 dη`.
#[test]
fn d_eta_recovers_the_reeb_equation() {
    let mut r = common::rng(23);
    for _ in 0..10 {
        let p = common::valid_params(&mut r);
        let inst = build(p.clone()).unwrap();
        let g = inst.geometry();
        let Ok(gamma) = g.gamma() else { continue };
        let d_eta = g.d_eta().unwrap();
        let plus = gamma.add(&d_eta.scale(&rat(2, 1)));
        let minus = gamma.sub(&d_eta);
        assert_eq!(plus.sub(&minus), d_eta.scale(&rat(3, 1)));
        let e5 = acm5_core::Form::generator(4);
        assert_eq!(ext_d(&e5, &inst.coframe).unwrap(), d_eta, "{p}");
    }
}

#[test]
fn certificates_verify_or_are_withheld() {
    for a1 in -3..=3 {
        for a3 in -3..=3 {
            for (p, swapped) in [(params([a1, 0, a3, 0]), false), (params([0, a1, 0, a3]), true)] {
                let Ok(id) = identify_group(&p) else {
                    assert!(p.is_zero());
                    continue;
                };
                assert_eq!(id.case.starts_with("iv"), swapped && a1 != 0 && a3 != 0, "{p}: case {}", id.case);
                match id.certificate.frame_change() {
                    Some(_) => assert!(acm5_core::family::verify_identification(&p, &id).unwrap(), "{p}"),
                    None => assert_eq!(
                        id.certificate,
                        acm5_core::family::Certificate::NotEmitted(NOT_EMITTED.into()),
                        "{p}"
                    ),
                }
            }
        }
    }
}

#[test]
fn generic_points_are_unclassified() {
    let id = identify_group(&params([1, 2, 2, 4])).unwrap();
    assert_eq!(id.algebra, None);
    assert_eq!(id.label(), "unclassified-here");
    let id = identify_group(&params([3, 4, 0, 0])).unwrap();
    assert_eq!(id.algebra, Some(CanonicalAlgebra::Su2Su2));
    assert!(id.label().contains("Stiefel"));
}

#[test]
fn constraint_failure_reports_both_products() {
    let e = FamilyParams::from_ints(1, 2, 3, 4).unwrap_err();
    let msg = e.to_string();
    assert!(msg.contains("a1*a4 = 4") && msg.contains("a2*a3 = 6"), "{msg}");
}

#[test]
fn full_replay_passes_on_random_points() {
    let mut r = common::rng(5);
    for _ in 0..4 {
        let p = common::valid_params(&mut r);
        let report = verify_family(&build(p.clone()).unwrap()).unwrap();
        assert!(report.all_passed(), "{p}");
    }
}
