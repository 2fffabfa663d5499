use std::path::Path;

use lis_core::da::{a_grid_max, DAParams};
use lis_core::dynamics::{
    integrate_y, liouville_field_closed_form, liouville_field_solve, normal_expansion, normal_hyperbolicity,
    skeleton_graph, skeleton_solve, sync_check, SKELETON_TOL,
};
use lis_core::expr::Expr;
use lis_core::lis::examples::{exponential_mild, exponential_symmetric, linear_symmetric};
use lis_core::lis::{InterpolationSystem, SystemDescriptor};
use lis_core::models::FlowModel;
use lis_core::regularity::{bunching_estimate, skeleton_persistence};
use lis_core::sampling::Sampling;
use serde_json::{json, Value};

use crate::report::{csv, sort_rows, write_file, Report, Run};
use crate::{BunchingArgs, CliError, Common, DaArgs, FlowArgs, PersistArgs, SkeletonArgs, SuiteArgs, VerifyArgs};

const MIN_GRID: usize = 8;

fn require(cond: bool, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Precondition(msg.into()))
    }
}

fn load(path: &Path, common: &Common) -> Result<(InterpolationSystem, String), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Precondition(format!("cannot read {}: {e}", path.display())))?;
    let sys = SystemDescriptor::from_json(&text)?.build()?;
    let sys = match common.window {
        Some(w) => sys.with_window(w)?,
        None => sys,
    };
    Ok((sys, text))
}

fn emit(report: Report, out: Option<&Path>, also: Option<&Path>) -> Result<Report, CliError> {
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match out {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = also {
        write_file(p, &text)?;
    }
    Ok(report)
}

pub fn verify(a: &VerifyArgs) -> Result<Report, CliError> {
    require(a.grid >= MIN_GRID, format!("--grid must be at least {MIN_GRID}"))?;
    let (sys, text) = load(&a.descriptor, &a.common)?;
    let mut run = Run::new("verify", a, text.as_bytes(), a.common.seed);
    let r = sys.validate(&Sampling::new(a.grid, a.random, a.common.seed))?;
    run.check("liouville", r.liouville_ok, r.min_density, format!("min density at s = {}, x = {:?}", r.argmin.0, r.argmin.1));
    run.check(
        "contact",
        r.contact_ok,
        r.min_contact.c_plus.min(r.min_contact.c_minus),
        format!("c_+ = {}, c_- = {} (worst at {:?})", r.min_contact.c_plus, r.min_contact.c_minus, r.contact_argmin),
    );
    run.check("monotone_profile", r.min_profile_slope > 0.0, r.min_profile_slope, "min d/ds ln(λ_+/λ_-)");
    let payload = json!({
        "model": sys.model.name(),
        "window": [sys.window.0, sys.window.1],
        "n_points": r.n_points,
        "min_density": r.min_density,
        "argmin": {"s": r.argmin.0, "x": r.argmin.1},
        "min_reversed_density": r.min_reversed_density,
        "contact_densities": r.min_contact,
        "min_profile_slope": r.min_profile_slope,
        "ok": r.liouville_ok && r.contact_ok,
    });
    emit(run.finish(payload), a.out.as_deref(), a.common.report.as_deref())
}

pub fn skeleton(a: &SkeletonArgs) -> Result<Report, CliError> {
    require(a.grid == 0 || a.grid >= MIN_GRID, format!("--grid must be 0 or at least {MIN_GRID}"))?;
    require(a.tol > 0.0, "--tol must be positive")?;
    let (sys, text) = load(&a.descriptor, &a.common)?;
    let mut run = Run::new("skeleton", a, text.as_bytes(), a.common.seed);
    let graph = skeleton_graph(&sys, a.grid, a.tol)?;
    let mut rows: Vec<Vec<f64>> =
        graph.samples.iter().map(|p| vec![p.x[0], p.x[1], p.x[2], p.s, p.residual, p.normal_expansion]).collect();
    sort_rows(&mut rows, 3);
    let names = sys.model.coordinate_names();
    let header = [names[0], names[1], names[2], "s_star", "residual", "normal_expansion"];
    write_file(&a.out, &csv(&header, &rows))?;
    let (res, ne) = (graph.max_residual(), graph.min_normal_expansion());
    if !graph.samples.is_empty() {
        run.check("residual", res < 1e-10, res, "max |F(s*, x)|");
        run.check("normal_expansion", ne > 0.0, ne, "min ∂_s(g/f) at the skeleton");
    }
    let payload = json!({
        "grid": a.grid,
        "n_points": graph.samples.len(),
        "max_residual": res,
        "min_normal_expansion": if graph.samples.is_empty() { Value::Null } else { json!(ne) },
        "csv": a.out,
    });
    emit(run.finish(payload), None, a.common.report.as_deref())
}

pub fn flow(a: &FlowArgs) -> Result<Report, CliError> {
    let start = &a.start.0;
    require(start.len() == 4, "--start needs s,x0,x1,x2")?;
    let (sys, text) = load(&a.descriptor, &a.common)?;
    let mut run = Run::new("flow", a, text.as_bytes(), a.common.seed);
    let x = [start[1], start[2], start[3]];
    let tr = integrate_y(&sys, (start[0], x), a.t_total, a.dt)?;
    let mut rows: Vec<Vec<f64>> = tr.points.iter().map(|p| vec![p.t, p.s, p.x[0], p.x[1], p.x[2]]).collect();
    sort_rows(&mut rows, 1);
    let names = sys.model.coordinate_names();
    write_file(&a.out, &csv(&["t", "s", names[0], names[1], names[2]], &rows))?;
    let finite = tr.points.iter().all(|p| p.s.is_finite() && p.x.iter().all(|v| v.is_finite()));
    run.check("finite", finite, tr.points.len() as f64, "all trajectory states finite");
    let end = tr.last();
    let payload = json!({
        "steps": tr.points.len() - 1,
        "exited_window": tr.exited,
        "end": {"t": end.t, "s": end.s, "x": end.x},
        "csv": a.out,
    });
    emit(run.finish(payload), None, a.common.report.as_deref())
}

pub fn da_check(a: &DaArgs) -> Result<Report, CliError> {
    require(a.grid >= MIN_GRID, format!("--grid must be at least {MIN_GRID}"))?;
    require(a.tol > 0.0, "--tol must be positive")?;
    let p = DAParams { nu: a.nu, mu: a.mu, nubar: a.nubar, eta: a.eta, period: a.period };
    p.validate()?;
    let mut run = Run::new("da-check", a, &[], a.seed);
    let r = p.check(a.grid)?;
    let cone = p.cone_domination_check(a.cone_time, a.cone_slope, a.grid.min(41))?;
    let (a_max, a_at) = a_grid_max(a.grid);
    run.check("positive_contact", r.min_contact_plus > 0.0, r.min_contact_plus, format!("min at {:?}", r.argmin));
    run.check("negative_contact", r.max_contact_minus < 0.0, r.max_contact_minus, "max of the ᾱ_- density");
    run.check(
        "liouville_at_skeleton",
        r.liouville_deviation < a.tol,
        r.liouville_deviation,
        format!("max |density − 4μ|, 4μ = {}", 4.0 * p.mu),
    );
    run.check("cone_domination", cone.holds, cone.max_factor, "largest cone contraction factor");
    let payload = json!({
        "report": r,
        "cone": cone,
        "a_max": a_max,
        "a_argmax": a_at,
        "non_anosov_certificate": r.reversed_min <= 0.0,
    });
    emit(run.finish(payload), a.out.as_deref(), None)
}

pub fn bunching(a: &BunchingArgs) -> Result<Report, CliError> {
    let model = FlowModel::by_name(&a.model)?;
    let mut run = Run::new("bunching", a, &[], a.seed);
    let r = bunching_estimate(&model, a.tmax, a.orbits, a.seed)?;
    run.check("partially_hyperbolic", r.b_s > 0.0, r.b_s, "B_s > 0");
    let payload = json!({
        "model": model.name(),
        "b_s": r.b_s,
        "anosov_like": r.b_s > 1.0,
        "report": r,
    });
    emit(run.finish(payload), a.out.as_deref(), None)
}

pub fn persist(a: &PersistArgs) -> Result<Report, CliError> {
    require(a.grid >= MIN_GRID, format!("--grid must be at least {MIN_GRID}"))?;
    require(!a.eps_list.0.is_empty(), "--eps-list must not be empty")?;
    let (sys, text) = load(&a.descriptor, &a.common)?;
    let mut run = Run::new("persist", a, text.as_bytes(), a.common.seed);
    let pert = Expr::parse(&a.perturb, sys.model.coordinate_names())?;
    let reps = skeleton_persistence(&sys, &pert, &a.eps_list.0, a.grid, &Sampling::new(MIN_GRID, 0, a.common.seed))?;
    let nonzero: Vec<f64> = reps.iter().filter(|r| r.eps != 0.0).map(|r| r.ratio).collect();
    if let [.., p, q] = nonzero.as_slice() {
        let spread = (p - q).abs() / p.abs().max(q.abs()).max(f64::MIN_POSITIVE);
        run.check("linear_response", spread < 0.05, spread, "relative spread of the last two ratios");
    }
    emit(run.finish(json!({ "perturbation": a.perturb, "reports": reps })), a.out.as_deref(), a.common.report.as_deref())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn anosov_suite(run: &mut Run, model: FlowModel, seed: u64) -> Result<Value, CliError> {
    let rates = model.rates(&[0.0; 3]);
    let gap = rates.gap();
    let pts = Sampling::new(0, 500, seed);
    let lin = linear_symmetric(model.clone());
    let exp = exponential_symmetric(model.clone());
    let mild = exponential_mild(model.clone());

    let worst = pts
        .points(&model, lin.window)
        .iter()
        .map(|(s, x)| lin.liouville_density(*s, x).map(|d| rel(d, 4.0 * rates.r_u)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    run.check("linear_density", worst < 1e-9, worst, "density of the linear pair vs 4 r_u");

    let worst = pts
        .points(&model, exp.window)
        .iter()
        .map(|(s, x)| exp.liouville_density(*s, x).map(|d| rel(d, 2.0 * gap * (2.0 * s).cosh())))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    run.check("exponential_density", worst < 1e-9, worst, "density vs 2(r_u − r_s) cosh 2s");

    let mut worst = 0.0f64;
    for sys in [&lin, &exp, &mild] {
        for (s, x) in pts.points(&model, sys.window) {
            let (a, b) = (liouville_field_closed_form(sys, s, &x)?, liouville_field_solve(sys, s, &x)?);
            worst = worst.max((a.f - b.f).abs().max((a.g - b.g).abs()) / a.f.hypot(a.g));
        }
    }
    run.check("dual_provenance", worst < 1e-9, worst, "closed form vs linear solve");

    let (mut sync, mut nexp, mut nh) = (0.0f64, 0.0f64, f64::INFINITY);
    for x in model.base_grid(MIN_GRID) {
        sync = sync.max((sync_check(&mild, &x)?.product() - 1.0).abs());
        nexp = nexp.max((normal_expansion(&exp, &x)? - gap).abs());
        let r = normal_hyperbolicity(&mild, &x)?;
        nh = nh.min(r.normal_rate - r.tangential_bound);
    }
    run.check("synchronization", sync < 1e-9, sync, "max |f r̃_u − 1| on the skeleton");
    run.check("normal_expansion", nexp < 1e-12, nexp, "constant pair: ∂_s(g/f) = r_u − r_s");
    run.check("normal_hyperbolicity", nh > 0.0, nh, "min normal rate − tangential bound");

    let fib = mild.fibration_min_check(&[0.0, 0.0, 0.3])?;
    run.check("fibration_minimum", fib.relative_gap < 1e-6, fib.relative_gap, "closed form vs sampled minimum");

    let b = bunching_estimate(&model, 32.0, 16, seed)?;
    let expected = 1.0 - rates.r_s / rates.r_u;
    run.check("bunching", (b.b_s - expected).abs() < 1e-12, b.b_s, format!("expected {expected}"));

    let per = skeleton_persistence(&exp, &Expr::cos_theta(0.0, 1.0), &[1e-3], 16, &Sampling::new(MIN_GRID, 0, seed))?;
    run.check("persistence", (per[0].ratio - 0.5).abs() < 5e-3, per[0].ratio, "cosine perturbation ratio vs 0.5");

    let tr = integrate_y(&exp, (1.0, [0.2, 0.3, 0.4]), -5.0, 1e-2)?;
    let end = tr.last();
    let dist = (end.s - skeleton_solve(&exp, &end.x, SKELETON_TOL)?).abs();
    run.check("backward_attraction", dist <= 2e-4, dist, "distance to the skeleton after T = −5");
    Ok(json!({ "model": model.name(), "rates": rates }))
}

fn da_suite(run: &mut Run, p: DAParams) -> Result<Value, CliError> {
    let (a_max, at) = a_grid_max(2001);
    run.check("a_maximum", (a_max - 1.0).abs() < 1e-12 && at == [0.0, 0.0], a_max, format!("attained at {at:?}"));
    let r = p.check(101)?;
    let expected = (p.mu - p.nu) + (p.nu - p.nubar) * a_max;
    run.check("contact_minimum", (r.min_contact_plus - expected).abs() < 1e-9, r.min_contact_plus, format!("expected {expected}"));
    run.check("bicontact", r.bicontact_ok(), r.max_contact_minus, "ᾱ_- density maximum");
    run.check("liouville_at_skeleton", r.liouville_deviation < 1e-10, r.liouville_deviation, "deviation from 4μ");
    run.check("non_anosov", (p.nubar <= 0.0) || r.reversed_min <= 0.0, r.reversed_min, "reversed pair density minimum");
    let model = FlowModel::da_chart(p)?;
    let b = bunching_estimate(&model, 32.0, 16, 0)?;
    run.check("bunching", b.b_s <= 1.0 - p.nubar / p.mu + 1e-9, b.b_s, "bounded by the blown-up orbit");
    let nh = normal_hyperbolicity(&linear_symmetric(model), &[0.0; 3])?;
    run.check("normal_hyperbolicity_fails", !nh.holds || p.nubar <= 0.0, nh.normal_rate, "at the blown-up orbit");
    Ok(json!({ "model": "da-chart", "params": p }))
}

pub fn suite(a: &SuiteArgs) -> Result<Report, CliError> {
    let model = FlowModel::by_name(&a.model)?;
    let mut run = Run::new("suite", a, &[], a.seed);
    let payload = match model {
        FlowModel::DaChart(p) => da_suite(&mut run, p)?,
        m => anosov_suite(&mut run, m, a.seed)?,
    };
    let report = run.finish(payload);
    for c in &report.checks {
        eprintln!("{} {}: {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
    }
    emit(report, a.out.as_deref(), None)
}
