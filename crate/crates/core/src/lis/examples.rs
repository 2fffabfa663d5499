//! Bundled systems used by tests, the CLI suite, and the Python bindings.

use super::{BiContactCoeffs, InterpolationSystem, Profile};
use crate::expr::Expr;
use crate::models::FlowModel;

fn parse(model: &FlowModel, src: &str) -> Expr {
    Expr::parse(src, model.coordinate_names()).expect("bundled expressions parse")
}

fn build(model: FlowModel, pair: BiContactCoeffs, profile: Profile, window: (f64, f64)) -> InterpolationSystem {
    InterpolationSystem::new(model, pair, profile, window).expect("bundled systems are well formed")
}

/// `h_u = h_s = 1` with the exponential profile on `[−3, 3]`.
pub fn exponential_symmetric(model: FlowModel) -> InterpolationSystem {
    build(model, BiContactCoeffs::symmetric(Expr::Const(1.0), Expr::Const(1.0)), Profile::exponential(), (-3.0, 3.0))
}

/// Constant rates `(2, −2)`: wide enough a gap for the cosine pair below.
pub fn steep_frame() -> FlowModel {
    FlowModel::constant_rates(2.0, -2.0).expect("valid rates")
}

/// `h_u = 1`, `h_s = 1 + 0.5 cos 2πθ` on `[−3, 3]`. The pair is bi-contact iff
/// `r_u − r_s > π/√0.75 ≈ 3.63`, so it is on [`steep_frame`] but not on the cat
/// model, where the density is positive only for `s ≳ −0.49`.
pub fn exponential_cosine(model: FlowModel) -> InterpolationSystem {
    build(
        model,
        BiContactCoeffs::symmetric(Expr::Const(1.0), Expr::cos_theta(1.0, 0.5)),
        Profile::exponential(),
        (-3.0, 3.0),
    )
}

/// `h_u = h_s = 1` with the linear profile on `[−0.9, 0.9]`.
pub fn linear_symmetric(model: FlowModel) -> InterpolationSystem {
    build(model, BiContactCoeffs::symmetric(Expr::Const(1.0), Expr::Const(1.0)), Profile::linear(), (-0.9, 0.9))
}

/// Varying bi-contact pair under a non-trivial reparametrization `σ` and distortion `w`.
pub fn general_profile(model: FlowModel) -> InterpolationSystem {
    let pair = BiContactCoeffs::symmetric(
        parse(&model, "1 + 0.1*sin(2*pi*theta)"),
        parse(&model, "1 + 0.1*cos(2*pi*theta)"),
    );
    let sigma = parse(&model, "s + 0.05*sin(s)*cos(2*pi*theta)");
    let w = parse(&model, "0.05*sin(2*pi*theta)");
    build(model, pair, Profile::general(sigma, w), (-3.0, 3.0))
}

pub fn geodesic_local() -> InterpolationSystem {
    exponential_symmetric(FlowModel::geodesic_frame_local())
}

/// Bi-contact symmetric pair with small varying coefficients.
pub fn exponential_mild(model: FlowModel) -> InterpolationSystem {
    let pair = BiContactCoeffs::symmetric(
        parse(&model, "1 + 0.1*sin(2*pi*theta)"),
        parse(&model, "1 + 0.1*cos(2*pi*theta)"),
    );
    build(model, pair, Profile::exponential(), (-3.0, 3.0))
}

/// Decomposed gauge with `h_+ = 1 + 0.1 cos 2πθ`.
pub fn decomposed_mild(model: FlowModel) -> InterpolationSystem {
    build(model, BiContactCoeffs::decomposed(Expr::cos_theta(1.0, 0.1)), Profile::exponential(), (-3.0, 3.0))
}

/// The five systems of the dual-provenance and synchronization checks, by name.
pub fn bundled() -> Vec<(&'static str, InterpolationSystem)> {
    vec![
        ("exponential-symmetric", exponential_symmetric(FlowModel::Cat)),
        ("exponential-cosine", exponential_cosine(steep_frame())),
        ("linear-symmetric", linear_symmetric(FlowModel::Cat)),
        ("general-profile", general_profile(FlowModel::Cat)),
        ("geodesic-local", geodesic_local()),
    ]
}

pub fn by_name(name: &str) -> Option<InterpolationSystem> {
    bundled().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}
