use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use twistguide::cross_section::{compute_lambda, dirichlet_ground_pair, rotational_symmetry_check, CrossSectionDomain, Shape};
use twistguide::curve_geometry::{check_injectivity, integrate_frame, scan_centerline, CurvatureProfile, InjectivityVerdict};
use twistguide::hardy_constants::{verify_hardy, ConstantsLedger, SigmaDecomposition};
use twistguide::stability_thresholds::{
    bend_strength, bend_sweep, sweep_epsilon, sweep_sigma, Branch, SweepEpsilon, SweepMode, SweepTable, ThresholdMode,
};
use twistguide::waveguide_operators::{
    assemble_l_sigma, assemble_q, eigenvalues_below_threshold, FarField, SpectralOptions, TransverseBasis, TruncatedTubeGrid, TwistSign,
    WeightedOptions,
};

use crate::error::LabError;
use crate::output::{num, opt_num, Artifact, Table};
use crate::report::render;
use crate::results::*;
use crate::scenario::{Scenario, Task};

/// Rotations used to decide whether a section is rotationally invariant.
const SYMMETRY_ANGLES: [f64; 4] = [0.3, 1.1, FRAC_PI_2, 2.5];
const SYMMETRY_RESOLUTION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads for independent solves (lengths, strengths, widths).
    pub threads: usize,
    /// Overrides the solvers' default start-vector seeds.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { threads: 1, seed: None }
    }
}

impl RunOptions {
    fn spectral(&self, max_count: usize) -> SpectralOptions {
        let d = SpectralOptions::default();
        SpectralOptions { max_count, seed: self.seed.unwrap_or(d.seed), ..d }
    }

    fn weighted(&self) -> WeightedOptions {
        let mut w = WeightedOptions::default();
        if let Some(s) = self.seed {
            w.lanczos.seed = s;
        }
        w
    }
}

/// Results plus every file of the output directory except the manifest.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub results: Results,
    pub artifacts: Vec<Artifact>,
}

/// Maps `f` over `items` on up to `threads` workers, keeping the input order.
fn par_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(f).collect();
    }
    let f = &f;
    let mut out: Vec<(usize, R)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..threads)
            .map(|w| scope.spawn(move || items.iter().enumerate().skip(w).step_by(threads).map(|(i, x)| (i, f(x))).collect::<Vec<_>>()))
            .collect();
        workers.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    out.sort_by_key(|p| p.0);
    out.into_iter().map(|p| p.1).collect()
}

fn bessel_j0(x: f64) -> f64 {
    let q = -x * x / 4.0;
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..60 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// First zero of `J0`.
fn j01() -> f64 {
    let (mut lo, mut hi) = (2.0, 3.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form lowest Dirichlet eigenvalue, where one exists.
pub fn exact_e1(shape: &Shape) -> Option<f64> {
    match shape {
        Shape::Rectangle { width, height, .. } => Some(PI * PI * (1.0 / (width * width) + 1.0 / (height * height))),
        Shape::Disk { radius, .. } => Some((j01() / radius).powi(2)),
        _ => None,
    }
}

fn describe(shape: &Shape) -> String {
    match shape {
        Shape::Rectangle { width, height, center } => format!("rectangle {width} x {height} centred at ({}, {})", center[0], center[1]),
        Shape::Disk { radius, center } => format!("disk of radius {radius} centred at ({}, {})", center[0], center[1]),
        Shape::Ellipse { semi_axes, center } => format!("ellipse {} x {} centred at ({}, {})", semi_axes[0], semi_axes[1], center[0], center[1]),
        Shape::Polygon { vertices } => format!("polygon with {} vertices", vertices.len()),
    }
}

pub fn section_info(shape: &Shape) -> SectionInfo {
    let sym = rotational_symmetry_check(shape, &SYMMETRY_ANGLES, SYMMETRY_RESOLUTION);
    SectionInfo {
        description: describe(shape),
        a: shape.radius_about_origin(),
        area: shape.area(),
        rotationally_invariant: !sym.satisfies_non_symmetry(),
    }
}

fn hardy_rows(l: &ConstantsLedger) -> Vec<ConstantRow> {
    l.entries()
        .into_iter()
        .map(|e| ConstantRow { name: e.name.to_string(), value: e.value, formula: e.formula.to_string(), inputs: e.inputs })
        .collect()
}

fn row(name: &str, value: f64, formula: &str, inputs: String) -> ConstantRow {
    ConstantRow { name: name.into(), value, formula: formula.into(), inputs }
}

fn branch_formula(b: Branch) -> &'static str {
    match b {
        Branch::Unit => "1",
        Branch::Immersion => "1/(2 a rho1), rho1 = ||kappa1||/k",
        Branch::Kappa2Cap => "(1 - eta)/(a rho2), rho2 = ||kappa2||/k",
        Branch::Comparison => "(1 - eta)/C6",
        Branch::Positivity => "c_h/(C6 c_h + (C6 E1 + C7) max_I (1 + (s - s0)^2))",
    }
}

/// `C1 .. C7` and the branches of `epsilon`.
fn threshold_rows(e: &SweepEpsilon, e1: f64) -> Vec<ConstantRow> {
    let l = &e.ledger;
    let (c1, c3, mode) = match l.mode {
        ThresholdMode::Twisted { shear } => (
            "6a(1 + a||kappa2 - thetadot||)^2",
            "1 + a r + a^2 r^2, r = ||kappa2 - thetadot||",
            format!("a={}, ||kappa2 - thetadot||={shear}", l.a),
        ),
        ThresholdMode::MildTorsion { .. } => (
            "6a(1 + a||kappa2|| + a||thetadot||)^2 with a||kappa2|| < 1",
            "max{2, 1 + 2a^2||thetadot||^2}",
            format!("a={}, ||thetadot||={}", l.a, l.theta_dot),
        ),
    };
    let formulas = [c1, "1 + a(1 + ||thetadot||)", c3, "3 C1 C3", "C2 sqrt(3 C3 (1 + C4))", "1 + C4", "2 C5^2"];
    let mut out: Vec<ConstantRow> =
        formulas.iter().enumerate().map(|(i, f)| row(&format!("C{}", i + 1), l.c[i], f, if i < 3 { mode.clone() } else { String::new() })).collect();
    let t = &e.threshold;
    for &(b, v) in &t.branches {
        if v.is_finite() {
            out.push(row(&format!("epsilon[{b:?}]"), v, branch_formula(b), String::new()));
        }
    }
    out.push(row(
        "epsilon",
        t.epsilon,
        "minimum of the branches",
        format!("c_h={:?}, E1={e1:?}, s0={:?}, max_I(1+(s-s0)^2)={:?}, binding={:?}", e.hardy.c_h, e.hardy.s0, t.weight_max, t.binding),
    ));
    out
}

fn constants_table(rows: &[ConstantRow]) -> Table {
    let mut t = Table::new(&["name", "value", "formula", "inputs"]);
    for r in rows {
        t.push(vec![r.name.clone(), num(r.value), r.formula.clone(), r.inputs.clone()]);
    }
    t
}

fn verdict_name(v: InjectivityVerdict) -> &'static str {
    match v {
        InjectivityVerdict::Certified => "certified",
        InjectivityVerdict::Inconclusive => "inconclusive",
        InjectivityVerdict::ImmersionViolated => "immersion_violated",
    }
}

struct Setup {
    basis: Arc<TransverseBasis>,
    grid: TruncatedTubeGrid,
}

fn setup(sc: &Scenario) -> Result<Setup, LabError> {
    let dom = CrossSectionDomain::new(sc.shape(), sc.resolution.delta)?;
    let basis = Arc::new(TransverseBasis::new(dom)?);
    let grid = TruncatedTubeGrid::new(basis.clone(), sc.half_length, sc.resolution.ds, sc.end_condition())?;
    Ok(Setup { basis, grid })
}

/// Runs the scenario's task and renders every output file in memory.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<RunOutput, LabError> {
    sc.validate()?;
    let shape = sc.shape();
    let section = section_info(&shape);
    let mut files = Vec::new();
    let outcome = match &sc.task {
        Task::GroundPair { .. } => ground_pair(sc, opts, &mut files)?,
        Task::Lambda { .. } => lambda(sc, opts, &mut files)?,
        Task::Spectrum { max_count, slices, .. } => spectrum(sc, opts, *max_count, slices, &mut files)?,
        Task::Hardy { s0, far_field, power, .. } => hardy(sc, opts, &section, *s0, *far_field, (*power).into(), &mut files)?,
        Task::Sweep { mode, ks, include_epsilon, .. } => sweep(sc, opts, &section, (*mode).into(), ks, *include_epsilon, &mut files)?,
        Task::Injectivity { scan } => injectivity(sc, *scan, &mut files)?,
        Task::Constants { s0, power } => constants(sc, &section, *s0, (*power).into(), &mut files)?,
    };
    let results = Results { scenario: sc.name.clone(), scenario_hash: sc.hash(), section, outcome };
    let mut json = serde_json::to_string_pretty(&results).expect("results serialize");
    json.push('\n');
    files.push(Artifact::new("results.json", json));
    files.push(Artifact::new("report.txt", render(&results)));
    files.push(Artifact::new("scenario.json", sc.to_json() + "\n"));
    Ok(RunOutput { results, artifacts: files })
}

fn ground_pair(sc: &Scenario, opts: &RunOptions, files: &mut Vec<Artifact>) -> Result<Outcome, LabError> {
    let shape = sc.shape();
    let rows = par_map(&sc.deltas(), opts.threads, |&delta| -> Result<_, LabError> {
        let gp = dirichlet_ground_pair(&CrossSectionDomain::new(shape.clone(), delta)?)?;
        Ok(GroundRow { delta, e1: gp.e1, e2: gp.e2, residual: gp.residual })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let exact = exact_e1(&shape);
    let mut t = Table::new(&["scenario", "delta", "e1", "e2", "residual", "exact_e1"]);
    for r in &rows {
        t.push(vec![sc.name.clone(), num(r.delta), num(r.e1), num(r.e2), num(r.residual), opt_num(exact)]);
    }
    files.push(Artifact::csv("ground.csv", &t));
    let dom = CrossSectionDomain::new(shape, sc.resolution.delta)?;
    let gp = dirichlet_ground_pair(&dom)?;
    let mut g = Table::new(&["t2", "t3", "value"]);
    for (p, v) in dom.points().iter().zip(&gp.ground) {
        g.push(vec![num(p[0]), num(p[1]), num(*v)]);
    }
    files.push(Artifact::csv("ground_state.csv", &g));
    Ok(Outcome::GroundPair(GroundOutcome { rows, exact }))
}

fn lambda(sc: &Scenario, opts: &RunOptions, files: &mut Vec<Artifact>) -> Result<Outcome, LabError> {
    let shape = sc.shape();
    let rows = par_map(&sc.deltas(), opts.threads, |&delta| -> Result<_, LabError> {
        let l = compute_lambda(&CrossSectionDomain::new(shape.clone(), delta)?)?;
        Ok(LambdaRow { delta, e1: l.e1, lambda: l.lambda, residual: l.residual })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(&["scenario", "delta", "e1", "lambda", "residual"]);
    for r in &rows {
        t.push(vec![sc.name.clone(), num(r.delta), num(r.e1), num(r.lambda), num(r.residual)]);
    }
    files.push(Artifact::csv("lambda.csv", &t));
    Ok(Outcome::Lambda(LambdaOutcome { rows }))
}

fn spectrum(sc: &Scenario, opts: &RunOptions, max_count: usize, slices: &[f64], files: &mut Vec<Artifact>) -> Result<Outcome, LabError> {
    let profile = sc.curvature_profile()?;
    let st = setup(sc)?;
    let so = opts.spectral(max_count);
    let solved = par_map(&sc.lengths(), opts.threads, |&l| -> Result<_, LabError> {
        let grid = st.grid.with_half_length(l)?;
        let res = eigenvalues_below_threshold(&assemble_q(&grid, &profile)?, &so)?;
        Ok((grid, res))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let (delta, ds) = (sc.resolution.delta, sc.resolution.ds);
    let points = st.basis.domain().points();
    let nt = points.len();
    let mut spectra = Table::new(&["scenario", "L", "delta", "ds", "index", "value", "residual"]);
    let mut profiles = Table::new(&["scenario", "L", "index", "s", "slab_norm2"]);
    let mut cuts = Table::new(&["scenario", "L", "index", "s", "t2", "t3", "value"]);
    let mut rows = Vec::new();
    for (grid, res) in &solved {
        let l = grid.half_length();
        for (i, (v, r)) in res.values.iter().zip(&res.residuals).enumerate() {
            spectra.push(vec![sc.name.clone(), num(l), num(delta), num(ds), i.to_string(), num(*v), num(*r)]);
        }
        for (i, vec) in res.vectors.iter().enumerate() {
            for (k, slab) in vec.chunks(nt).enumerate() {
                let w: f64 = slab.iter().map(|x| x * x).sum();
                profiles.push(vec![sc.name.clone(), num(l), i.to_string(), num(grid.slab_s(k as isize)), num(w)]);
            }
            for &s in slices {
                let k = ((s + l) / ds).round() as isize - 1;
                if k < 0 || k as usize >= grid.slabs() {
                    continue;
                }
                let slab = &vec[k as usize * nt..(k as usize + 1) * nt];
                for (p, x) in points.iter().zip(slab) {
                    cuts.push(vec![sc.name.clone(), num(l), i.to_string(), num(grid.slab_s(k)), num(p[0]), num(p[1]), num(*x)]);
                }
            }
        }
        rows.push(SpectrumRow {
            half_length: l,
            count_below: res.count_below,
            values: res.values.clone(),
            residuals: res.residuals.clone(),
            diagnostic: res.diagnostic,
        });
    }
    files.push(Artifact::csv("spectra.csv", &spectra));
    files.push(Artifact::csv("profiles.csv", &profiles));
    if !slices.is_empty() {
        files.push(Artifact::csv("slices.csv", &cuts));
    }
    let e1 = st.basis.e1();
    Ok(Outcome::Spectrum(SpectrumOutcome { e1, transparent: sc.end_condition() == twistguide::waveguide_operators::EndCondition::Transparent, rows }))
}

fn hardy_ledger(profile: &CurvatureProfile, mode: SweepMode, lambda: f64, a: f64, s0: Option<f64>, power: twistguide::hardy_constants::MinSigmaPower) -> Result<ConstantsLedger, LabError> {
    let (sigma, sigma_dot) = sweep_sigma(profile, mode);
    let hull = profile.active_interval().ok_or_else(|| LabError::Invalid { field: "profile".into(), reason: "no twist".into() })?;
    let d = SigmaDecomposition::new(&sigma, &sigma_dot, (hull.0 - 0.5, hull.1 + 0.5), profile.ds())?;
    Ok(ConstantsLedger::evaluate(&d, &sigma, lambda, a, s0, power)?)
}

#[allow(clippy::too_many_arguments)]
fn hardy(
    sc: &Scenario,
    opts: &RunOptions,
    section: &SectionInfo,
    s0: f64,
    far_field: Option<usize>,
    power: twistguide::hardy_constants::MinSigmaPower,
    files: &mut Vec<Artifact>,
) -> Result<Outcome, LabError> {
    let profile = sc.curvature_profile()?;
    let st = setup(sc)?;
    let lam = compute_lambda(st.basis.domain())?;
    let (ledger, unavailable) = if section.rotationally_invariant {
        (None, Some("rotationally invariant cross-section".to_string()))
    } else {
        match hardy_ledger(&profile, SweepMode::Bend, lam.lambda, section.a, Some(s0), power) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let c_h = ledger.as_ref().map(|l| l.c_h);
    let constants = ledger.as_ref().map(hardy_rows).unwrap_or_default();
    let (sigma, _) = sweep_sigma(&profile, SweepMode::Bend);
    let mut wopts = opts.weighted();
    wopts.far_field = far_field.map(|extra_slabs| FarField { s0, extra_slabs });
    let runs = par_map(&sc.lengths(), opts.threads, |&l| -> Result<_, LabError> {
        let grid = st.grid.with_half_length(l)?;
        let check = verify_hardy(&assemble_l_sigma(&grid, &sigma, TwistSign::Minus)?, s0, &wopts, c_h)?;
        Ok(HardyRun { half_length: l, mu: check.mu(), residual: check.eigen.residual, passes: check.eigen.passes })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let mut checks = Vec::new();
    if let Some(c_h) = c_h {
        for r in &runs {
            checks.push(Check { label: format!("μ* > 0 at L = {}", r.half_length), pass: r.mu > 0.0, margin: r.mu });
            let margin = r.mu - c_h;
            checks.push(Check {
                label: format!("μ* ≥ bound at L = {}", r.half_length),
                pass: margin >= -twistguide::hardy_constants::MARGIN_SLACK,
                margin,
            });
        }
    }
    let mut t = Table::new(&["scenario", "L", "delta", "ds", "s0", "mu", "residual", "bound"]);
    for r in &runs {
        t.push(vec![sc.name.clone(), num(r.half_length), num(sc.resolution.delta), num(sc.resolution.ds), num(s0), num(r.mu), num(r.residual), opt_num(c_h)]);
    }
    files.push(Artifact::csv("hardy.csv", &t));
    if !constants.is_empty() {
        files.push(Artifact::csv("constants.csv", &constants_table(&constants)));
    }
    Ok(Outcome::Hardy(HardyOutcome { s0, lambda: lam.lambda, e1: lam.e1, c_h, unavailable, constants, runs, checks }))
}

fn sweep(
    sc: &Scenario,
    opts: &RunOptions,
    section: &SectionInfo,
    mode: SweepMode,
    ks: &[f64],
    include_epsilon: bool,
    files: &mut Vec<Artifact>,
) -> Result<Outcome, LabError> {
    let base = sc.curvature_profile()?;
    let st = setup(sc)?;
    let lam = compute_lambda(st.basis.domain())?;
    let e1 = st.basis.e1();
    let eps = if section.rotationally_invariant {
        Err("rotationally invariant cross-section".to_string())
    } else if mode == SweepMode::Bend && base.norms().shear == 0.0 {
        Err("thetadot = kappa2 (Tang frame): no effective twist".to_string())
    } else {
        sweep_epsilon(&base, mode, lam.lambda, section.a, e1).map_err(|e| e.to_string())
    };
    let epsilon = eps.as_ref().ok().map(|e| e.threshold.epsilon);
    let mut ks = ks.to_vec();
    if let (Some(e), true) = (epsilon, include_epsilon) {
        ks.push(e);
    }
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    let lengths = sc.lengths();
    let so = opts.spectral(1);
    let rows = par_map(&ks, opts.threads, |&k| bend_sweep(&base, mode, &[k], &st.grid, &lengths, epsilon, &so).map(|t| t.rows))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .concat();
    let n = base.norms();
    let table = SweepTable {
        mode,
        rows,
        derivative_ratio: if n.kappa1 > 0.0 { n.kappa1_dot / n.kappa1 } else { 0.0 },
        k_per_unit: bend_strength(&base, mode),
        epsilon,
    };
    let mut checks = Vec::new();
    if let Some(e) = epsilon {
        let worst = table.rows.iter().filter(|r| r.within_epsilon).map(|r| r.count_below).max().unwrap_or(0);
        checks.push(Check { label: "no eigenvalue below E1 for k ≤ ε".into(), pass: table.stable_below_epsilon(), margin: 0.0 - worst as f64 });
        if let Some(kc) = table.onset() {
            checks.push(Check { label: "empirical onset k_c ≥ ε".into(), pass: kc >= e, margin: kc - e });
        }
    }
    let mut t = Table::new(&["scenario", "mode", "k", "L", "delta", "ds", "threshold", "count_below", "lowest", "within_epsilon", "injectivity", "skipped"]);
    let mode_name = match mode {
        SweepMode::Bend => "bend",
        SweepMode::BendAndTorsion => "bend_and_torsion",
    };
    for r in &table.rows {
        t.push(vec![
            sc.name.clone(),
            mode_name.into(),
            num(r.k),
            num(r.half_length),
            num(sc.resolution.delta),
            num(sc.resolution.ds),
            num(r.threshold),
            r.count_below.to_string(),
            opt_num(r.lowest),
            r.within_epsilon.to_string(),
            verdict_name(r.injectivity).into(),
            r.skipped.clone().unwrap_or_default(),
        ]);
    }
    files.push(Artifact::csv("sweep.csv", &t));
    let mut constants = Vec::new();
    if let Ok(e) = &eps {
        constants = hardy_rows(&e.hardy);
        constants.extend(threshold_rows(e, e1));
        files.push(Artifact::csv("constants.csv", &constants_table(&constants)));
    }
    let k_definition = match mode {
        SweepMode::Bend => ThresholdMode::Twisted { shear: 0.0 },
        SweepMode::BendAndTorsion => ThresholdMode::MildTorsion { kappa2: None },
    }
    .k_definition()
    .to_string();
    Ok(Outcome::Sweep(SweepOutcome {
        mode: match mode {
            SweepMode::Bend => crate::scenario::SweepKind::Bend,
            SweepMode::BendAndTorsion => crate::scenario::SweepKind::BendAndTorsion,
        },
        k_definition,
        e1,
        lambda: lam.lambda,
        epsilon,
        binding: eps.as_ref().ok().map(|e| format!("{:?}", e.threshold.binding)),
        unavailable: eps.err(),
        constants,
        onset: table.onset(),
        monotone: table.monotone(),
        rows: table
            .rows
            .iter()
            .map(|r| SweepRowOut {
                k: r.k,
                half_length: r.half_length,
                lowest: r.lowest,
                count_below: r.count_below,
                within_epsilon: r.within_epsilon,
                injectivity: verdict_name(r.injectivity).into(),
                skipped: r.skipped.clone(),
            })
            .collect(),
        checks,
    }))
}

fn injectivity(sc: &Scenario, scan: bool, files: &mut Vec<Artifact>) -> Result<Outcome, LabError> {
    let p = sc.curvature_profile()?;
    let a = sc.shape().radius_about_origin();
    let mut r = check_injectivity(&p, a);
    if scan {
        let hull = p.interval().or(p.active_interval()).unwrap_or((-1.0, 1.0));
        let pad = 2.0 * PI * a + 1.0;
        let frame = integrate_frame(&p, p.ds(), (hull.0 - pad, hull.1 + pad))?;
        r = scan_centerline(r, &frame, a);
    }
    let out = InjectivityOutcome {
        kappa1: r.k[0],
        kappa2: r.k[2],
        interval_length: p.interval().map_or(0.0, |(x, y)| y - x),
        condition: r.condition,
        immersion: r.immersion,
        verdict: verdict_name(r.verdict).into(),
        scan_ratio: r.scan_ratio,
    };
    let mut t = Table::new(&["scenario", "kappa1", "kappa2", "interval_length", "condition", "immersion", "verdict", "scan_ratio"]);
    t.push(vec![
        sc.name.clone(),
        num(out.kappa1),
        num(out.kappa2),
        num(out.interval_length),
        num(out.condition),
        num(out.immersion),
        out.verdict.clone(),
        opt_num(out.scan_ratio),
    ]);
    files.push(Artifact::csv("injectivity.csv", &t));
    Ok(Outcome::Injectivity(out))
}

fn constants(
    sc: &Scenario,
    section: &SectionInfo,
    s0: Option<f64>,
    power: twistguide::hardy_constants::MinSigmaPower,
    files: &mut Vec<Artifact>,
) -> Result<Outcome, LabError> {
    let p = sc.curvature_profile()?;
    let lam = compute_lambda(&CrossSectionDomain::new(sc.shape(), sc.resolution.delta)?)?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    if section.rotationally_invariant {
        notes.push("rotationally invariant cross-section: no Hardy ledger".to_string());
    } else {
        match hardy_ledger(&p, SweepMode::Bend, lam.lambda, section.a, s0, power) {
            Ok(l) => rows.extend(hardy_rows(&l)),
            Err(e) => notes.push(format!("Hardy ledger for thetadot - kappa2: {e}")),
        }
        if p.norms().kappa1 > 0.0 {
            for (mode, tag) in [(SweepMode::Bend, "bend"), (SweepMode::BendAndTorsion, "bend and torsion")] {
                match sweep_epsilon(&p, mode, lam.lambda, section.a, lam.e1) {
                    Ok(e) => rows.extend(threshold_rows(&e, lam.e1).into_iter().map(|mut r| {
                        r.name = format!("{tag}: {}", r.name);
                        r
                    })),
                    Err(e) => notes.push(format!("threshold ({tag}): {e}")),
                }
            }
        }
    }
    files.push(Artifact::csv("constants.csv", &constants_table(&rows)));
    Ok(Outcome::Constants(ConstantsOutcome { lambda: lam.lambda, e1: lam.e1, constants: rows, notes }))
}
