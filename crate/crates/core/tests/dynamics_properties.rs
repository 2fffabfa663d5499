use lis_core::da::DAParams;
use lis_core::dynamics::*;
use lis_core::expr::{EvalAt, Expr};
use lis_core::forms::{lie_s, lie_x_with};
use lis_core::lis::examples::{bundled, exponential_cosine, exponential_symmetric, linear_symmetric, steep_frame};
use lis_core::lis::{change_of_basis, horizontal_map, scaling_map};
use lis_core::models::FlowModel;
use lis_core::sampling::Sampling;

fn theta_expr(src: &str) -> Expr {
    Expr::parse(src, ["u", "v", "theta"]).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn defining_identity_at_random_points() {
    let sampling = Sampling::new(0, 1000, 17);
    for (name, sys) in bundled() {
        for (s, x) in sampling.points(&sys.model, sys.window) {
            let y = liouville_field(&sys, s, &x).unwrap();
            assert!(y.f > 0.0);
            let a = sys.alpha_coeffs(s, &x).unwrap();
            let (lx, ls) = (lie_x_with(&a, &sys.rates(&x)), lie_s(&a));
            let err_e = (y.f * lx.e.value + y.g * ls.e.value - a.e.value).abs();
            let err_f = (y.f * lx.f.value + y.g * ls.f.value - a.f.value).abs();
            assert!(err_e < 1e-10 && err_f < 1e-10, "{name} at ({s}, {x:?}): {err_e}, {err_f}");
        }
    }
}

#[test]
fn global_s_expansion() {
    let sampling = Sampling::new(16, 200, 3);
    for (name, sys) in bundled() {
        for (s, x) in sampling.points(&sys.model, sys.window) {
            let y = liouville_field(&sys, s, &x).unwrap();
            assert!(y.d_s_g_over_f > 0.0, "{name} at ({s}, {x:?})");
        }
    }
}

#[test]
fn skeleton_is_tangent_to_y() {
    for (name, sys) in bundled() {
        let graph = skeleton_graph(&sys, 16, SKELETON_TOL).unwrap();
        assert!(graph.max_residual() < 1e-10 && graph.min_normal_expansion() > 0.0);
        for p in &graph.samples {
            let y = liouville_field(&sys, p.s, &p.x).unwrap();
            let f = sys.alpha_coeffs(p.s, &p.x).unwrap().f;
            let tangency = y.f * f.d_x + y.g * f.d_s;
            assert!(tangency.abs() < 1e-9, "{name} at {:?}: {tangency}", p.x);
        }
    }
}

#[test]
fn change_of_basis_keeps_field() {
    let sys = exponential_cosine(steep_frame());
    let new = change_of_basis(&sys, theta_expr("0.3*sin(2*pi*theta)"), theta_expr("0.5")).unwrap();
    for (s, x) in Sampling::new(0, 100, 5).points(&sys.model, sys.window) {
        let (a, b) = (liouville_field(&sys, s, &x).unwrap(), liouville_field(&new, s, &x).unwrap());
        assert!(rel(a.f, b.f) < 1e-9 && rel(a.g, b.g) < 1e-9);
    }
}

#[test]
fn horizontal_map_pushes_field_forward() {
    let sys = exponential_cosine(steep_frame());
    let psi = theta_expr("1.2*s + 0.3*cos(2*pi*theta)");
    let new = horizontal_map(&sys, psi.clone(), &Sampling::new(16, 0, 0)).unwrap();
    for (s, x) in Sampling::new(0, 100, 6).points(&sys.model, (-0.1, 2.5)) {
        let j = psi.eval(&EvalAt { s, point: x, flow: sys.model.vector_field(&x) });
        let old = liouville_field(&sys, s, &x).unwrap();
        let moved = liouville_field(&new, j.value, &x).unwrap();
        assert!(rel(moved.f, old.f) < 1e-9);
        assert!(rel(moved.g, old.f * j.d_x + old.g * j.d_s) < 1e-9);
    }
    let shifted = horizontal_map(&sys, theta_expr("s + 1"), &Sampling::new(16, 0, 0)).unwrap();
    for x in sys.model.base_grid(8) {
        let a = skeleton_solve(&sys, &x, SKELETON_TOL).unwrap();
        let b = skeleton_solve(&shifted, &x, SKELETON_TOL).unwrap();
        assert!((b - a - 1.0).abs() < 1e-9);
    }
    let doubled = horizontal_map(&exponential_symmetric(FlowModel::Cat), theta_expr("2*s"), &Sampling::new(8, 0, 0)).unwrap();
    assert!(skeleton_solve(&doubled, &[0.0, 0.0, 0.3], SKELETON_TOL).unwrap().abs() < 1e-12);
    let wavy = horizontal_map(&exponential_symmetric(FlowModel::Cat), theta_expr("s + cos(2*pi*theta)"), &Sampling::new(8, 0, 0)).unwrap();
    for k in 0..8 {
        let th = k as f64 / 8.0;
        let s = skeleton_solve(&wavy, &[0.0, 0.0, th], SKELETON_TOL).unwrap();
        assert!((s - (std::f64::consts::TAU * th).cos()).abs() < 1e-9);
    }
}

#[test]
fn scaling_map_rescales_field() {
    let sys = exponential_cosine(steep_frame());
    let sampling = Sampling::new(8, 50, 2);
    let fscale = theta_expr("0.1*sin(2*pi*theta) + 0.05*s");
    let new = scaling_map(&sys, fscale.clone(), &sampling).unwrap();
    for (s, x) in Sampling::new(0, 100, 8).points(&sys.model, sys.window) {
        let j = fscale.eval(&EvalAt { s, point: x, flow: sys.model.vector_field(&x) });
        let old = liouville_field(&sys, s, &x).unwrap();
        let scale = 1.0 + old.f * j.d_x + old.g * j.d_s;
        let y = liouville_field(&new, s, &x).unwrap();
        let y_solve = liouville_field_solve(&new, s, &x).unwrap();
        assert!(rel(y.f, old.f / scale) < 1e-9 && rel(y.g, old.g / scale) < 1e-9);
        assert!(rel(y_solve.f, y.f) < 1e-9 && rel(y_solve.g, y.g) < 1e-9);
    }
    let constant = scaling_map(&sys, Expr::Const(0.7), &sampling).unwrap();
    let (a, b) = (liouville_field(&sys, 0.3, &[0.0; 3]).unwrap(), liouville_field(&constant, 0.3, &[0.0; 3]).unwrap());
    assert!(rel(a.f, b.f) < 1e-12 && rel(a.g, b.g) < 1e-12);
    let sym = exponential_symmetric(FlowModel::Cat);
    let tilted = scaling_map(&sym, theta_expr("0.1*s"), &sampling).unwrap();
    let (a, b) = (liouville_field(&sym, 0.0, &[0.0; 3]).unwrap(), liouville_field(&tilted, 0.0, &[0.0; 3]).unwrap());
    assert!(rel(a.f, b.f) < 1e-12 && b.g.abs() < 1e-15);
}

#[test]
fn sync_for_bundled_systems() {
    for (name, sys) in bundled() {
        for x in sys.model.base_grid(16) {
            let r = sync_check(&sys, &x).unwrap();
            assert!((r.product() - 1.0).abs() < 1e-9, "{name} at {x:?}: {r:?}");
            if let Some(c) = r.rtilde_u_closed_form {
                assert!(rel(c, r.rtilde_u) < 1e-9);
            }
        }
    }
}

#[test]
fn normal_hyperbolicity_on_anosov_models() {
    for (name, sys) in bundled() {
        for x in sys.model.base_grid(8) {
            let r = normal_hyperbolicity(&sys, &x).unwrap();
            assert!(r.holds, "{name} at {x:?}: {r:?}");
        }
    }
    let da = linear_symmetric(FlowModel::da_chart(DAParams { nubar: 0.5, ..DAParams::default() }).unwrap());
    assert!(!normal_hyperbolicity(&da, &[0.0, 0.0, 0.0]).unwrap().holds);
    assert!(normal_hyperbolicity(&da, &[0.9, 0.0, 0.0]).unwrap().holds);
}

#[test]
fn strong_normal_examples() {
    let sys = exponential_cosine(steep_frame());
    let n = strong_normal_direction(&sys, &[0.0, 0.0, 0.1], 1.0, 200, 1e-8).unwrap();
    assert!(n.residual < 1e-8 && n.direction[1] > 0.0);
    assert!((n.direction[0].hypot(n.direction[1]) - 1.0).abs() < 1e-14);
    let da = linear_symmetric(FlowModel::da_chart(DAParams { nubar: 0.5, ..DAParams::default() }).unwrap());
    let n = strong_normal_direction(&da, &[0.0, 0.0, 0.0], 1.0, 200, 1e-6).unwrap();
    assert!(n.residual < 1e-6);
    assert!(matches!(
        strong_normal_direction(&sys, &[0.0, 0.0, 0.1], 1.0, 2, 1e-14),
        Err(lis_core::LisError::NoConvergence { .. })
    ));
}

#[test]
fn backward_attraction_from_both_sides() {
    let sys = exponential_symmetric(FlowModel::Cat);
    for s0 in [-1.0, 1.0] {
        let tr = integrate_y(&sys, (s0, [0.4, 0.6, 0.9]), -5.0, 1e-2).unwrap();
        assert!(tr.last().s.abs() < 2e-4);
    }
}
