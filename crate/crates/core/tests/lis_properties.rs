use lis_core::expr::Expr;
use lis_core::lis::examples::{bundled, exponential_cosine, exponential_symmetric, general_profile, linear_symmetric, steep_frame};
use lis_core::lis::{change_of_basis, BiContactCoeffs, InterpolationSystem, Profile};
use lis_core::models::FlowModel;
use lis_core::da::DAParams;
use lis_core::sampling::Sampling;
use proptest::prelude::*;

fn theta_expr(src: &str) -> Expr {
    Expr::parse(src, ["u", "v", "theta"]).unwrap()
}

#[test]
fn shipped_systems_are_liouville_on_full_grid() {
    let sampling = Sampling::default();
    for (name, sys) in bundled() {
        let r = sys.validate(&sampling).unwrap();
        assert_eq!(r.n_points, 64 * 64 * 64 + 1000);
        assert!(r.liouville_ok, "{name}: density {} at {:?}", r.min_density, r.argmin);
        assert!(r.min_profile_slope > 0.0);
    }
}

#[test]
fn contactness_of_shipped_pairs() {
    let s = Sampling::new(16, 200, 4);
    for (name, sys) in bundled() {
        let r = sys.validate(&s).unwrap();
        assert!(r.contact_ok, "{name}: {:?}", r.min_contact);
    }
    let on_cat = exponential_cosine(FlowModel::Cat).with_window((-0.45, 3.0)).unwrap();
    let r = on_cat.validate(&s).unwrap();
    assert!(r.liouville_ok && !r.contact_ok && r.min_contact.c_minus < -1.6);
}

#[test]
fn anosov_two_sided_check() {
    let s = Sampling::new(24, 200, 9);
    for sys in [linear_symmetric(FlowModel::Cat), exponential_symmetric(FlowModel::Cat)] {
        let r = sys.validate(&s).unwrap();
        assert!(r.min_density > 0.0 && r.min_reversed_density > 0.0);
    }
    let da = FlowModel::da_chart(DAParams { nubar: 0.5, ..DAParams::default() }).unwrap();
    let sys = linear_symmetric(da);
    let r = sys.validate(&s).unwrap();
    assert!(r.min_density > 0.0);
    assert!(r.min_reversed_density <= 0.0);
    let origin = sys.reversed_density(0.0, &[0.0, 0.0, 0.0]).unwrap();
    assert!((origin + 4.0 * 0.5).abs() < 1e-12);
}

#[test]
fn fibration_minimum_on_exponential_systems() {
    let sys = InterpolationSystem::new(
        FlowModel::Cat,
        BiContactCoeffs::symmetric(theta_expr("1 + 0.1*sin(2*pi*theta)"), theta_expr("exp(0.2*cos(2*pi*theta))")),
        Profile::exponential(),
        (-3.0, 3.0),
    )
    .unwrap();
    for k in 0..32 {
        let r = sys.fibration_min_check(&[0.0, 0.0, k as f64 / 32.0]).unwrap();
        assert!(r.relative_gap < 1e-6, "{r:?}");
    }
}

#[test]
fn window_is_where_cosine_density_is_positive() {
    let sys = exponential_cosine(FlowModel::Cat);
    let min_over_theta = |s: f64| {
        (0..400).map(|i| sys.liouville_density(s, &[0.0, 0.0, i as f64 / 400.0]).unwrap()).fold(f64::INFINITY, f64::min)
    };
    assert!(min_over_theta(-0.45) > 0.35);
    assert!(min_over_theta(-0.5) < 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn change_of_basis_keeps_alpha(c_minus in -1.0..1.0f64, amp in -1.0..1.0f64, s in -0.4..3.0f64,
                                   u in 0.0..1.0f64, th in 0.0..1.0f64) {
        let sys = exponential_cosine(steep_frame());
        let z_plus = Expr::cos_theta(0.0, amp);
        let new = change_of_basis(&sys, Expr::Const(c_minus), z_plus).unwrap();
        let x = [u, 0.5, th];
        let (a, b) = (sys.alpha_coeffs(s, &x).unwrap(), new.alpha_coeffs(s, &x).unwrap());
        prop_assert!((a.e.value - b.e.value).abs() < 1e-10);
        prop_assert!((a.f.value - b.f.value).abs() < 1e-10);
    }

    #[test]
    fn profiles_are_monotone(s in -0.89..0.89f64, th in 0.0..1.0f64) {
        let x = [0.1, 0.2, th];
        for sys in [linear_symmetric(FlowModel::Cat), exponential_symmetric(FlowModel::Cat), general_profile(FlowModel::Cat)] {
            let (sigma, _) = sys.profile_gauge(s, &x).unwrap();
            prop_assert!(sigma.d_s > 0.0);
        }
    }

    #[test]
    fn density_is_positive_for_contact_pairs(a in 0.0..0.15f64, b in 0.0..0.15f64, s in -3.0..3.0f64, th in 0.0..1.0f64) {
        let sys = InterpolationSystem::new(
            FlowModel::Cat,
            BiContactCoeffs::symmetric(Expr::cos_theta(1.0, a), theta_expr(&format!("1 + {b}*sin(2*pi*theta)"))),
            Profile::exponential(),
            (-3.0, 3.0),
        ).unwrap();
        let x = [0.0, 0.0, th];
        prop_assert!(sys.contact_densities(&x).ok());
        prop_assert!(sys.liouville_density(s, &x).unwrap() > 0.0);
    }
}
