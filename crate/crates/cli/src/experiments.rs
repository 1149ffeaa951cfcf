//! Named experiment recipes. Each one first produces a [`Plan`]: everything
//! that goes into the manifest, the list of files it will write, and the
//! deferred computation.

use std::f64::consts::PI;

use helipoly_core::algebraic::{align_and_lift, com_speed, estimate_c_theta0, AlgebraicCurve};
use helipoly_core::analysis::*;
use helipoly_core::mink::{MinkMatrix, MinkVec};
use helipoly_core::one_corner::solve_one_corner;
use helipoly_core::solver::*;
use helipoly_core::{galilean_shift, sample_initial, CornerLattice, CurveState, PolygonKind, PolygonSpec, RationalTime};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::Overrides;
use crate::error::CliError;
use crate::output::{Cell, Table};

type Work = Box<dyn FnOnce() -> Result<Vec<Table>, CliError> + Send>;

pub struct Plan {
    pub polygons: Vec<Value>,
    pub solver: Value,
    pub times: Vec<(u64, u64)>,
    pub analysis: Value,
    pub outputs: Vec<String>,
    pub work: Work,
}

pub struct Context {
    pub full: bool,
    pub overrides: Overrides,
}

pub struct Experiment {
    pub id: &'static str,
    pub summary: &'static str,
    /// Whether `[polygon]` overrides mean anything for this recipe.
    pub polygon_overrides: bool,
    plan: fn(&Context) -> Result<Plan, CliError>,
}

impl Experiment {
    pub fn plan(&self, ctx: &Context) -> Result<Plan, CliError> {
        if !self.polygon_overrides && ctx.overrides.touches_polygon() {
            return Err(CliError::config(format!("{} has fixed polygons; drop the [polygon] section", self.id)));
        }
        (self.plan)(ctx)
    }
}

pub const CATALOG: &[Experiment] = &[
    Experiment {
        id: "table1-chp",
        summary: "conserved corner product |P(t_pq) - P(0)| along a CHP evolution (M=6, b=1.2)",
        polygon_overrides: true,
        plan: |c| table1(c, PolygonKind::Chp),
    },
    Experiment {
        id: "table1-hhp",
        summary: "conserved corner product |P(t_pq) - P(0)| along an HHP evolution (M=48, l=0.2, b=0.4)",
        polygon_overrides: true,
        plan: |c| table1(c, PolygonKind::Hhp),
    },
    Experiment {
        id: "table2",
        summary: "finite-difference estimate of c_theta0 at t_1q, q = 1000*2^r, CHP and HHP",
        polygon_overrides: false,
        plan: table2,
    },
    Experiment {
        id: "fig3-cm",
        summary: "CHP center-of-mass speed: numeric vs closed form over M and N/M, and its large-M trend",
        polygon_overrides: true,
        plan: fig3_cm,
    },
    Experiment {
        id: "fig4-cl",
        summary: "HHP center-of-mass speed: numeric vs closed form over l and N/M, and its small-l trend",
        polygon_overrides: true,
        plan: fig4_cl,
    },
    Experiment {
        id: "fig5-7",
        summary: "CHP M=6, theta0=2pi/5: X(0,t), R(t), nu(t), fingerprints against A_{2,5}",
        polygon_overrides: false,
        plan: fig5_7,
    },
    Experiment {
        id: "fig8-10",
        summary: "trajectory fingerprints and nu(t) fits: HHP M=96 (l=0.2, 0.05) and CHP M=20, theta0=pi/9",
        polygon_overrides: false,
        plan: fig8_10,
    },
    Experiment {
        id: "fig11-triskelion",
        summary: "stereographic image of the algebraic tangent at a large-denominator rational time",
        polygon_overrides: false,
        plan: fig11,
    },
    Experiment {
        id: "fig12-13",
        summary: "b -> 1+: projected trajectory z_M, phi_M and the affine fit errors for M = 3..15",
        polygon_overrides: true,
        plan: fig12_13,
    },
    Experiment {
        id: "fig14-15",
        summary: "one-corner profile overlaid on the algebraic tangent at t_1q, and X(0,t) for small t",
        polygon_overrides: false,
        plan: fig14_15,
    },
];

pub fn find(id: &str) -> Option<&'static Experiment> {
    CATALOG.iter().find(|e| e.id == id)
}

pub fn ids() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.id).collect()
}

// ---------------------------------------------------------------- helpers

fn spec_json(s: &PolygonSpec) -> Value {
    json!({
        "kind": s.kind.as_str(), "m": s.m, "b": s.b, "l": s.l, "a": s.a, "rho0": s.rho0,
        "theta0": s.theta0, "c0": s.c0, "c_theta0": s.c_theta0, "t_f": s.t_f,
    })
}

fn cfg_json(cfg: &SolverConfig, per: usize) -> Value {
    json!({
        "scheme": match cfg.scheme { Scheme::SpectralPeriodic => "spectral-periodic", Scheme::FiniteDifferenceFixed => "finite-difference-fixed" },
        "nodes": cfg.n, "nodes_per_side": per, "ds": cfg.ds, "t_end": cfg.t_end, "steps": cfg.nt,
        "courant": cfg.courant, "fold": cfg.fold, "twist": cfg.twist,
        "trace_every": cfg.trace_every, "com_every": cfg.com_every, "com_fraction": cfg.com_fraction,
    })
}

impl Context {
    fn per(&self, desk: usize, full: usize) -> usize {
        self.overrides.nodes_per_side.unwrap_or(if self.full { full } else { desk })
    }

    fn pers(&self, desk: &[usize], full: &[usize]) -> Vec<usize> {
        match self.overrides.nodes_per_side {
            Some(n) => vec![n],
            None if self.full => full.to_vec(),
            None => desk.to_vec(),
        }
    }

    fn samples(&self, default: usize) -> usize {
        self.overrides.samples.unwrap_or(default)
    }

    fn chp(&self, m: usize, b: f64) -> Result<PolygonSpec, CliError> {
        if self.overrides.l.is_some() {
            return Err(CliError::config("[polygon] l is fixed by m for a CHP"));
        }
        Ok(PolygonSpec::chp(self.overrides.m.unwrap_or(m), self.overrides.b.unwrap_or(b))?)
    }

    fn hhp(&self, m: usize, l: f64, b: f64) -> Result<PolygonSpec, CliError> {
        let o = &self.overrides;
        Ok(PolygonSpec::hhp(o.m.unwrap_or(m), o.l.unwrap_or(l), o.b.unwrap_or(b))?)
    }

    /// Solver configuration with the Courant override applied.
    fn config(&self, spec: &PolygonSpec, st: &CurveState, t_end: f64) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig::for_polygon(spec, st, t_end)?;
        Ok(match self.overrides.courant {
            Some(c) => cfg.with_courant(c)?,
            None => cfg,
        })
    }
}

fn evolve(st: &CurveState, cfg: &SolverConfig) -> Result<Evolution, CliError> {
    Ok(rk4_evolve(st, cfg)?)
}

fn outputs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn trajectory_table(name: &str, trace: &[(f64, MinkVec)], tr: &TrajectoryTransforms) -> Table {
    let mut t = Table::new(name, &["t", "x1", "x2", "x3", "r", "nu", "axial"]);
    for (i, &(time, x)) in trace.iter().enumerate() {
        t.push(vec![time.into(), x.x1.into(), x.x2.into(), x.x3.into(), tr.r[i].into(), tr.nu[i].into(), tr.axial[i].into()]);
    }
    t
}

fn fingerprint_table(name: &str, fp: &FingerprintSeries, set: &[u64]) -> Table {
    let mut t = Table::new(name, &["n", "re_b", "im_b", "n_abs_b", "n_im_b", "dominating", "in_set"]);
    let (w, wi) = (fp.weighted(), fp.weighted_imag());
    for (i, b) in fp.coeffs.iter().enumerate() {
        let n = i + 1;
        t.push(vec![
            n.into(),
            b.re.into(),
            b.im.into(),
            w[i].into(),
            wi[i].into(),
            fp.dominating.contains(&n).into(),
            set.contains(&(n as u64)).into(),
        ]);
    }
    t
}

// ---------------------------------------------------------------- table 1

const TABLE1_TIMES: &[(u64, u64)] = &[
    (1, 12), (1, 10), (1, 6), (1, 5), (3, 10), (1, 3), (2, 5), (5, 12), (1, 2), (7, 12),
    (3, 5), (2, 3), (7, 10), (3, 4), (4, 5), (5, 6), (9, 10), (11, 12), (1, 1),
];

fn table1(ctx: &Context, kind: PolygonKind) -> Result<Plan, CliError> {
    let (spec, per) = match kind {
        PolygonKind::Chp => (ctx.chp(6, 1.2)?, ctx.per(512, 7680)),
        PolygonKind::Hhp => (ctx.hhp(48, 0.2, 0.4)?, ctx.per(240, 1920)),
    };
    let times = ctx.overrides.pq.clone().unwrap_or_else(|| TABLE1_TIMES.to_vec());
    let rts = times.iter().map(|&(p, q)| RationalTime::for_spec(&spec, p, q)).collect::<Result<Vec<_>, _>>()?;
    if rts.iter().any(|r| r.p == 0) {
        return Err(CliError::config("[times] pq entries must have p > 0"));
    }
    let st = sample_initial(&spec, spec.m * per)?;
    let t_end = rts.iter().map(|r| r.t).fold(0.0, f64::max);
    let cfg = ctx.config(&spec, &st, t_end)?.with_snapshots(&rts.iter().map(|r| r.t).collect::<Vec<_>>());
    Ok(Plan {
        polygons: vec![spec_json(&spec)],
        solver: cfg_json(&cfg, per),
        times: times.clone(),
        analysis: json!({ "angles": "side tangents averaged over the middle of each corner gap" }),
        outputs: outputs(&["p_conservation.csv"]),
        work: Box::new(move || {
            let ev = evolve(&st, &cfg)?;
            let p0 = spec.conserved_product();
            let mut t = Table::new(
                "p_conservation.csv",
                &["p", "q", "t", "rho_q", "rho_mean", "rho_spread", "p0", "p_numeric", "abs_error"],
            );
            for rt in &rts {
                let snap = ev.snapshots.iter().find(|s| (s.time - rt.t).abs() <= 1e-12 * rt.t.max(1.0)).ok_or_else(
                    || CliError::new("numerics", format!("no snapshot at t = {}", rt.t)),
                )?;
                let lat = CornerLattice::new(&spec, *rt);
                let rho = measure_angle_numeric(snap, &spec, &lat)?;
                let mean = rho.iter().sum::<f64>() / rho.len() as f64;
                let spread = rho.iter().fold(f64::MIN, |a, &r| a.max(r)) - rho.iter().fold(f64::MAX, |a, &r| a.min(r));
                let p = conserved_product(&rho);
                t.push(vec![
                    rt.p.into(), rt.q.into(), rt.t.into(), lat.rho_q.into(), mean.into(), spread.into(),
                    p0.into(), p.into(), (p - p0).abs().into(),
                ]);
            }
            Ok(vec![t])
        }),
    })
}

// ---------------------------------------------------------------- table 2

fn table2(ctx: &Context) -> Result<Plan, CliError> {
    let chp = PolygonSpec::chp(6, 1.2)?;
    let hhp = PolygonSpec::hhp(8, 0.6, 0.4)?;
    let qs: Vec<u64> = match &ctx.overrides.pq {
        Some(list) => list.iter().map(|&(_, q)| q).collect(),
        None => (0..8).map(|r| 1000u64 << r).collect(),
    };
    if let Some(q) = qs.iter().find(|&&q| q % 4 != 0) {
        return Err(CliError::config(format!("q = {q}: the estimator needs q divisible by 4")));
    }
    Ok(Plan {
        polygons: vec![spec_json(&chp), spec_json(&hhp)],
        solver: Value::Null,
        times: qs.iter().map(|&q| (1, q)).collect(),
        analysis: json!({ "estimator": "sqrt(t_1q) |T(ds) - T(-ds)|_0 / (2 ds) on the algebraic solution" }),
        outputs: outputs(&["c_theta0_errors.csv"]),
        work: Box::new(move || {
            let mut t = Table::new(
                "c_theta0_errors.csv",
                &["q", "chp_estimate", "chp_abs_error", "hhp_estimate", "hhp_abs_error"],
            );
            for &q in &qs {
                let (a, b) = (estimate_c_theta0(&chp, q)?, estimate_c_theta0(&hhp, q)?);
                t.push(vec![
                    q.into(), a.into(), (a - chp.c_theta0).abs().into(), b.into(), (b - hhp.c_theta0).abs().into(),
                ]);
            }
            Ok(vec![t])
        }),
    })
}

// ---------------------------------------------------------------- speeds

/// Window of the center-of-mass fit, as a fraction of the recurrence period.
const COM_WINDOW: f64 = 0.05;

fn speed_row(spec: &PolygonSpec, per: usize, courant: Option<f64>, samples: usize) -> Result<Vec<Cell>, CliError> {
    let st = sample_initial(spec, spec.m * per)?;
    let mut cfg = SolverConfig::for_polygon(spec, &st, COM_WINDOW * spec.t_f)?;
    if let Some(c) = courant {
        cfg = cfg.with_courant(c)?;
    }
    let ev = evolve(&st, &cfg.with_samples(samples))?;
    let fit = com_track(&ev.com, spec.kind)?;
    let exact = com_speed(spec);
    Ok(vec![
        spec.m.into(), spec.l.into(), spec.b.into(), per.into(), exact.into(), fit.speed.into(),
        ((fit.speed - exact) / exact).abs().into(), fit.transverse.into(),
    ])
}

const SPEED_HEADER: &[&str] = &["m", "l", "b", "nodes_per_side", "exact", "numeric", "rel_error", "transverse"];

fn fig3_cm(ctx: &Context) -> Result<Plan, CliError> {
    let b = ctx.overrides.b.unwrap_or(1.2);
    let ms: Vec<usize> = match ctx.overrides.m {
        Some(m) => vec![m],
        None => (6..=20).collect(),
    };
    let specs = ms.iter().map(|&m| ctx.chp(m, b)).collect::<Result<Vec<_>, _>>()?;
    let pers = ctx.pers(&[128, 256, 512], &[480, 960, 1920, 3840, 7680]);
    let samples = ctx.samples(200);
    let courant = ctx.overrides.courant;
    let trend: Vec<PolygonSpec> = (3..=200).map(|m| PolygonSpec::chp(m, b)).collect::<Result<_, _>>()?;
    Ok(Plan {
        polygons: specs.iter().map(spec_json).collect(),
        solver: json!({
            "scheme": "spectral-periodic", "nodes_per_side": pers, "t_end_over_t_f": COM_WINDOW,
            "samples": samples, "courant": courant.unwrap_or(DEFAULT_COURANT),
        }),
        times: Vec::new(),
        analysis: json!({ "fit": "least squares of -h1(t)", "limit": b * b - 1.0 }),
        outputs: outputs(&["speed_errors.csv", "speed_trend.csv"]),
        work: Box::new(move || {
            let mut errs = Table::new("speed_errors.csv", SPEED_HEADER);
            for spec in &specs {
                for &per in &pers {
                    errs.push(speed_row(spec, per, courant, samples)?);
                }
            }
            let mut trend_t = Table::new("speed_trend.csv", &["m", "c_m", "limit"]);
            for s in &trend {
                trend_t.push(vec![s.m.into(), com_speed(s).into(), (b * b - 1.0).into()]);
            }
            Ok(vec![errs, trend_t])
        }),
    })
}

fn fig4_cl(ctx: &Context) -> Result<Plan, CliError> {
    let m = ctx.overrides.m.unwrap_or(48);
    let b = ctx.overrides.b.unwrap_or(0.4);
    let ls: Vec<f64> = match ctx.overrides.l {
        Some(l) => vec![l],
        None => (0..7).map(|k| 0.08 + 0.02 * k as f64).collect(),
    };
    let specs = ls.iter().map(|&l| PolygonSpec::hhp(m, l, b)).collect::<Result<Vec<_>, _>>()?;
    let pers = ctx.pers(&[60, 120, 240], &[240, 480, 960, 1920]);
    let samples = ctx.samples(200);
    let courant = ctx.overrides.courant;
    let trend: Vec<PolygonSpec> = (1..=40).map(|k| PolygonSpec::hhp(m, 0.01 * k as f64, b)).collect::<Result<_, _>>()?;
    Ok(Plan {
        polygons: specs.iter().map(spec_json).collect(),
        solver: json!({
            "scheme": "finite-difference-fixed", "nodes_per_side": pers, "t_end_over_t_f": COM_WINDOW,
            "samples": samples, "courant": courant.unwrap_or(DEFAULT_COURANT), "com_fraction": 0.5,
        }),
        times: Vec::new(),
        analysis: json!({ "fit": "least squares of h3(t) over the inner half of the nodes", "limit": 1.0 + b * b }),
        outputs: outputs(&["speed_errors.csv", "speed_trend.csv"]),
        work: Box::new(move || {
            let mut errs = Table::new("speed_errors.csv", SPEED_HEADER);
            for spec in &specs {
                for &per in &pers {
                    errs.push(speed_row(spec, per, courant, samples)?);
                }
            }
            let mut trend_t = Table::new("speed_trend.csv", &["l", "c_l", "limit"]);
            for s in &trend {
                trend_t.push(vec![s.l.into(), com_speed(s).into(), (1.0 + b * b).into()]);
            }
            Ok(vec![errs, trend_t])
        }),
    })
}

// ---------------------------------------------------------------- trajectories

/// One trajectory study: evolve over the recurrence period of `θ0 = cπ/d`,
/// then transform and fingerprint `X(0, t)`.
struct Study {
    spec: PolygonSpec,
    c: u64,
    d: u64,
    per: usize,
    samples: usize,
    n_max: usize,
    terms: usize,
    cfg: SolverConfig,
    state: CurveState,
}

impl Study {
    fn new(ctx: &Context, spec: PolygonSpec, (c, d): (u64, u64), per: usize, n_max: usize) -> Result<Self, CliError> {
        let samples = ctx.samples(4096);
        let n_max = ctx.overrides.n_max.unwrap_or(n_max);
        if samples < 2 * n_max + 1 {
            return Err(CliError::config(format!("{samples} samples cannot resolve n_max = {n_max}")));
        }
        let period = period_cd(c, d, spec.t_f)?;
        let state = sample_initial(&spec, spec.m * per)?;
        let cfg = ctx.config(&spec, &state, period)?.with_samples(samples);
        Ok(Study { spec, c, d, per, samples, n_max, terms: ctx.overrides.terms.unwrap_or(2000), cfg, state })
    }

    fn manifest(&self) -> (Value, Value) {
        (spec_json(&self.spec), cfg_json(&self.cfg, self.per))
    }

    fn run(&self) -> Result<StudyResult, CliError> {
        let ev = evolve(&self.state, &self.cfg)?;
        let speed = com_speed(&self.spec);
        let tr = trajectory_transforms(&ev.trace, &self.spec, speed)?;
        let n = self.samples;
        let grid: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
        let phi = riemann_variant_cd(self.c, self.d, self.terms, &grid);
        let im_phi: Vec<f64> = phi.iter().map(|z| z.im).collect();
        let axial = &tr.axial[..n];
        let scale = scale_to_reference(axial, &im_phi);
        let fp_axial = fingerprint(axial, self.n_max, scale)?;
        let fp_r = fingerprint(&tr.r[..n], self.n_max, 1.0)?;
        let (slope, intercept) = nu_linear_fit(&tr.times, &tr.nu);
        let set = dominating_set_cd(self.c, self.d, self.n_max as u64);
        Ok(StudyResult { ev, tr, phi, scale, fp_axial, fp_r, slope, intercept, set, speed })
    }
}

struct StudyResult {
    ev: Evolution,
    tr: TrajectoryTransforms,
    phi: Vec<Complex64>,
    scale: f64,
    fp_axial: FingerprintSeries,
    fp_r: FingerprintSeries,
    slope: f64,
    intercept: f64,
    set: Vec<u64>,
    speed: f64,
}

fn fig5_7(ctx: &Context) -> Result<Plan, CliError> {
    let spec = PolygonSpec::chp_with_torsion(6, 2, 5)?;
    let study = Study::new(ctx, spec, (2, 5), ctx.per(512, 2048), 60)?;
    let (p, s) = study.manifest();
    Ok(Plan {
        polygons: vec![p],
        solver: s,
        times: Vec::new(),
        analysis: json!({
            "c": 2, "d": 5, "n_max": study.n_max, "terms": study.terms, "samples": study.samples,
            "scale": "least squares of the centered axial series against Im phi_{c,d}",
        }),
        outputs: outputs(&[
            "polygon.csv", "trajectory.csv", "phi.csv", "fingerprint_axial.csv", "fingerprint_r.csv", "summary.csv",
        ]),
        work: Box::new(move || {
            let r = study.run()?;
            let mut poly = Table::new("polygon.csv", &["s", "x1_start", "x2_start", "x3_start", "x1_end", "x2_end", "x3_end"]);
            for (j, (a, b)) in study.state.position.iter().zip(&r.ev.final_state.position).enumerate() {
                poly.push(vec![study.state.grid[j].into(), a.x1.into(), a.x2.into(), a.x3.into(), b.x1.into(), b.x2.into(), b.x3.into()]);
            }
            let n = study.samples;
            let axial = &r.tr.axial[..n];
            let mean = axial.iter().sum::<f64>() / n as f64;
            let mut phi = Table::new("phi.csv", &["t_unit", "re_phi", "im_phi", "scaled_axial"]);
            for j in 0..n {
                let z = r.phi[j];
                phi.push(vec![(j as f64 / n as f64).into(), z.re.into(), z.im.into(), (r.scale * (axial[j] - mean)).into()]);
            }
            let summary = Table::summary(
                "summary.csv",
                vec![
                    ("b", spec.b.into()),
                    ("period", study.cfg.t_end.into()),
                    ("c_m", r.speed.into()),
                    ("c_m_fitted", com_track(&r.ev.com, spec.kind)?.speed.into()),
                    ("axial_scale", r.scale.into()),
                    ("nu_slope", r.slope.into()),
                    ("nu_intercept", r.intercept.into()),
                    ("axial_periodicity_defect", (r.tr.axial[n] - r.tr.axial[0]).into()),
                    ("r_periodicity_defect", (r.tr.r[n] - r.tr.r[0]).into()),
                ],
            );
            Ok(vec![
                poly,
                trajectory_table("trajectory.csv", &r.ev.trace, &r.tr),
                phi,
                fingerprint_table("fingerprint_axial.csv", &r.fp_axial, &r.set),
                fingerprint_table("fingerprint_r.csv", &r.fp_r, &r.set),
                summary,
            ])
        }),
    })
}

fn fig8_10(ctx: &Context) -> Result<Plan, CliError> {
    let studies = vec![
        ("hhp-l0.2", Study::new(ctx, PolygonSpec::hhp_with_torsion(96, 0.2, 1, 4)?, (1, 4), ctx.per(240, 1024), 2000)?),
        ("chp-m20", Study::new(ctx, PolygonSpec::chp_with_torsion(20, 1, 9)?, (1, 9), ctx.per(512, 1024), 2000)?),
        ("hhp-l0.05", Study::new(ctx, PolygonSpec::hhp_with_torsion(96, 0.05, 1, 16)?, (1, 16), ctx.per(240, 1024), 2000)?),
    ];
    let mut names = Vec::new();
    for (tag, _) in &studies {
        names.push(format!("trajectory_{tag}.csv"));
        names.push(format!("fingerprint_{tag}.csv"));
    }
    names.push("summary.csv".into());
    let manifests: Vec<(Value, Value)> = studies.iter().map(|(_, s)| s.manifest()).collect();
    Ok(Plan {
        polygons: manifests.iter().map(|m| m.0.clone()).collect(),
        solver: Value::Array(manifests.iter().map(|m| m.1.clone()).collect()),
        times: Vec::new(),
        analysis: json!({
            "cases": studies.iter().map(|(tag, s)| json!({ "tag": tag, "c": s.c, "d": s.d, "n_max": s.n_max, "terms": s.terms, "samples": s.samples })).collect::<Vec<_>>(),
        }),
        outputs: names,
        work: Box::new(move || {
            let mut tables = Vec::new();
            let mut summary = Table::new("summary.csv", &["case", "quantity", "value"]);
            for (tag, study) in &studies {
                let r = study.run()?;
                tables.push(trajectory_table(&format!("trajectory_{tag}.csv"), &r.ev.trace, &r.tr));
                tables.push(fingerprint_table(&format!("fingerprint_{tag}.csv"), &r.fp_axial, &r.set));
                let w = r.fp_axial.weighted();
                let on_set: Vec<f64> = r.set.iter().map(|&n| w[n as usize - 1]).collect();
                let off_set = w
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !r.set.contains(&(*i as u64 + 1)))
                    .map(|(_, v)| *v)
                    .fold(0.0, f64::max);
                let rows: Vec<(&str, Cell)> = vec![
                    ("b", study.spec.b.into()),
                    ("speed", r.speed.into()),
                    ("axial_scale", r.scale.into()),
                    ("nu_slope", r.slope.into()),
                    ("nu_intercept", r.intercept.into()),
                    ("mean_weight_on_set", (on_set.iter().sum::<f64>() / on_set.len().max(1) as f64).into()),
                    ("max_weight_off_set", off_set.into()),
                ];
                for (k, v) in rows {
                    summary.push(vec![Cell::from(*tag), k.into(), v]);
                }
            }
            tables.push(summary);
            Ok(tables)
        }),
    })
}

// ---------------------------------------------------------------- algebraic images

fn fig11(ctx: &Context) -> Result<Plan, CliError> {
    let mut cases = vec![
        ("chp", PolygonSpec::chp(3, 1.2)?, (18209u64, 65764u64)),
        ("hhp", PolygonSpec::hhp(8, 0.6, 0.4)?, (10327, 27993)),
    ];
    if let Some(list) = &ctx.overrides.pq {
        let [pq] = list.as_slice() else {
            return Err(CliError::config("fig11-triskelion takes exactly one [times] pq entry"));
        };
        cases.iter_mut().for_each(|c| c.2 = *pq);
    }
    let rts = cases.iter().map(|(_, s, (p, q))| RationalTime::for_spec(s, *p, *q)).collect::<Result<Vec<_>, _>>()?;
    Ok(Plan {
        polygons: cases.iter().map(|c| spec_json(&c.1)).collect(),
        solver: Value::Null,
        times: cases.iter().map(|c| c.2).collect(),
        analysis: json!({ "projection": "(T2, T3) / (1 + T1) of every side after alignment" }),
        outputs: outputs(&["tangents_chp.csv", "tangents_hhp.csv", "summary.csv"]),
        work: Box::new(move || {
            let mut tables = Vec::new();
            let mut summary = Table::new("summary.csv", &["case", "quantity", "value"]);
            for ((tag, spec, _), rt) in cases.iter().zip(rts) {
                let mut curve = AlgebraicCurve::build(spec, rt);
                align_and_lift(&mut curve)?;
                // one CHP period holds M q/2 (q even) or M q sides; the
                // partial first segment repeats the last one
                let skip = usize::from(spec.kind == PolygonKind::Chp);
                let mut t = Table::new(&format!("tangents_{tag}.csv"), &["side", "s_start", "u", "v"]);
                for i in skip..curve.frames.len() {
                    let s0 = if i == 0 { curve.start } else { curve.corners[i - 1] };
                    let (u, v) = stereographic(curve.frames[i].row(0));
                    t.push(vec![(i - skip).into(), s0.into(), u.into(), v.into()]);
                }
                summary.push(vec![Cell::from(*tag), "sides".into(), t.rows.len().into()]);
                summary.push(vec![Cell::from(*tag), "corners_per_side".into(), rt.corners_per_side().into()]);
                summary.push(vec![Cell::from(*tag), "rho_q".into(), CornerLattice::new(spec, rt).rho_q.into()]);
                tables.push(t);
            }
            tables.push(summary);
            Ok(tables)
        }),
    })
}

fn fig12_13(ctx: &Context) -> Result<Plan, CliError> {
    let spec = ctx.chp(4, 1.0 + 1e-5)?;
    let per = ctx.per(128, 1024);
    let samples = ctx.samples(4096);
    let terms = ctx.overrides.terms.unwrap_or(1024);
    let n_max = ctx.overrides.n_max.unwrap_or(1024);
    if samples < 2 * n_max + 1 {
        return Err(CliError::config(format!("{samples} samples cannot resolve n_max = {n_max}")));
    }
    let b = spec.b;
    let sweep: Vec<PolygonSpec> = (3..=15).map(|m| PolygonSpec::chp(m, b)).collect::<Result<_, _>>()?;
    let courant = ctx.overrides.courant;
    let state = sample_initial(&spec, spec.m * per)?;
    let cfg = ctx.config(&spec, &state, 2.0 * PI)?.with_samples(samples);
    Ok(Plan {
        polygons: std::iter::once(&spec).chain(&sweep).map(spec_json).collect(),
        solver: cfg_json(&cfg, per),
        times: Vec::new(),
        analysis: json!({ "terms": terms, "n_max": n_max, "fit": "complex least squares phi_M ~ lambda z_M + mu", "sweep_m": [3, 15] }),
        outputs: outputs(&["trajectory.csv", "phi.csv", "fingerprint.csv", "fit_errors.csv"]),
        work: Box::new(move || {
            let fit_for = |spec: &PolygonSpec, st: &CurveState, cfg: &SolverConfig| -> Result<_, CliError> {
                let ev = evolve(st, cfg)?;
                let (z, fit) = z_projection_and_fit(&ev.trace, spec, com_speed(spec), terms);
                Ok((ev, z, fit))
            };
            let (ev, z, fit) = fit_for(&spec, &state, &cfg)?;
            let mut traj = Table::new("trajectory.csv", &["t", "x1", "x2", "x3", "re_z", "im_z"]);
            for (&(t, x), w) in ev.trace.iter().zip(&z) {
                traj.push(vec![t.into(), x.x1.into(), x.x2.into(), x.x3.into(), w.re.into(), w.im.into()]);
            }
            let grid: Vec<f64> = ev.trace.iter().map(|p| p.0 / (2.0 * PI)).collect();
            let phi = riemann_variant_m(spec.m as u64, terms, &grid);
            let mut phi_t = Table::new("phi.csv", &["t_unit", "re_phi", "im_phi", "re_fit", "im_fit"]);
            for ((&t, p), w) in grid.iter().zip(&phi).zip(&z) {
                let f = fit.lambda * w + fit.mu;
                phi_t.push(vec![t.into(), p.re.into(), p.im.into(), f.re.into(), f.im.into()]);
            }
            let scaled: Vec<Complex64> = z[..samples].iter().map(|w| fit.lambda * w).collect();
            let fp = fingerprint_complex(&scaled, n_max, 1.0)?;
            let squares: Vec<u64> = dominating_set_m(spec.m as u64, n_max as u64).iter().map(|k| k * k).filter(|&n| n <= n_max as u64).collect();
            let fp_t = fingerprint_table("fingerprint.csv", &fp, &squares);

            let mut errs = Table::new("fit_errors.csv", &["m", "re_lambda", "im_lambda", "re_mu", "im_mu", "max_abs", "max_rel"]);
            for s in &sweep {
                let st = sample_initial(s, s.m * per)?;
                let mut c = SolverConfig::for_polygon(s, &st, 2.0 * PI)?;
                if let Some(cn) = courant {
                    c = c.with_courant(cn)?;
                }
                let (_, _, f) = fit_for(s, &st, &c.with_samples(samples))?;
                errs.push(vec![
                    s.m.into(), f.lambda.re.into(), f.lambda.im.into(), f.mu.re.into(), f.mu.im.into(),
                    f.max_abs.into(), f.max_rel.into(),
                ]);
            }
            Ok(vec![traj, phi_t, fp_t, errs])
        }),
    })
}

// ---------------------------------------------------------------- one corner

/// `(bisector, chord, cross)` frame of two H² points, as matrix columns.
fn pair_frame(minus: MinkVec, plus: MinkVec) -> Result<MinkMatrix, CliError> {
    let u = (minus + plus).renormalize_h2()?;
    let v = (plus - minus).unit().ok_or_else(|| CliError::new("numerics", "degenerate corner"))?;
    Ok(MinkMatrix::from_cols([u, v, u.cross(v)]))
}

/// Mean of `f` over `[a, b]`, pulled back onto H².
fn mean_tangent(f: impl Fn(f64) -> MinkVec, a: f64, b: f64) -> Result<MinkVec, CliError> {
    let n = 2000;
    let sum = (0..n).fold(MinkVec::ZERO, |acc, k| acc + f(a + (b - a) * (k as f64 + 0.5) / n as f64));
    Ok(sum.renormalize_h2()?)
}

fn fig14_15(ctx: &Context) -> Result<Plan, CliError> {
    let (p, q) = match ctx.overrides.pq.as_deref() {
        None => (1, 4000),
        Some([pq]) => *pq,
        Some(_) => return Err(CliError::config("fig14-15 takes exactly one [times] pq entry")),
    };
    let cases = [("chp", PolygonSpec::chp(6, 1.2)?, ctx.per(512, 7680)), ("hhp", PolygonSpec::hhp(8, 0.6, 0.4)?, ctx.per(240, 1920))];
    let samples = ctx.samples(2000);
    let mut runs = Vec::new();
    for (tag, spec, per) in cases {
        let rt = RationalTime::for_spec(&spec, p, q)?;
        let st = sample_initial(&spec, spec.m * per)?;
        let cfg = ctx.config(&spec, &st, spec.t_f / 20.0)?.with_samples(samples);
        runs.push((tag, spec, per, rt, st, cfg));
    }
    let mut names = Vec::new();
    for (tag, ..) in &runs {
        names.push(format!("overlay_{tag}.csv"));
        names.push(format!("trajectory_{tag}.csv"));
    }
    names.push("summary.csv".into());
    Ok(Plan {
        polygons: runs.iter().map(|r| spec_json(&r.1)).collect(),
        solver: Value::Array(runs.iter().map(|r| cfg_json(&r.5, r.2)).collect()),
        times: vec![(p, q)],
        analysis: json!({
            "overlay": "one-corner profile with c0 = c_theta0, rotated so its asymptotes match the mean algebraic tangent on the outer part of each adjacent side",
            "trajectory_t_end_over_t_f": 0.05,
        }),
        outputs: names,
        work: Box::new(move || {
            let mut tables = Vec::new();
            let mut summary = Table::new("summary.csv", &["case", "quantity", "value"]);
            for (tag, spec, _, rt, st, cfg) in &runs {
                let half = 0.5 * spec.l;
                let shift = galilean_shift(spec, rt);
                // alignment needs a full period (CHP) or the whole truncated curve (HHP)
                let mut alg = match spec.kind {
                    PolygonKind::Chp => AlgebraicCurve::build_in(spec, *rt, -PI, PI),
                    PolygonKind::Hhp => AlgebraicCurve::build(spec, *rt),
                };
                align_and_lift(&mut alg)?;
                let at = |s: f64| alg.tangent(shift + s);
                let target = pair_frame(mean_tangent(at, -0.95 * half, -0.8 * half)?, mean_tangent(at, 0.8 * half, 0.95 * half)?)?;
                let sol = solve_one_corner(spec.c_theta0, rt.t, half / 2000.0, half)?;
                let rot = target * pair_frame(sol.a_minus, sol.a_plus)?.lorentz_inverse();
                let mut t = Table::new(
                    &format!("overlay_{tag}.csv"),
                    &["s", "u_algebraic", "v_algebraic", "u_corner", "v_corner", "distance"],
                );
                let core = 5.0 * rt.t.sqrt();
                let mut far: f64 = 0.0;
                for (j, &s) in sol.grid.iter().enumerate() {
                    let (a, c) = (at(s), rot.apply(sol.tangent[j]));
                    let ((ua, va), (uc, vc)) = (stereographic(a), stereographic(c));
                    let dist = (ua - uc).hypot(va - vc);
                    if s.abs() > core {
                        far = far.max(dist);
                    }
                    t.push(vec![s.into(), ua.into(), va.into(), uc.into(), vc.into(), dist.into()]);
                }
                tables.push(t);

                let ev = evolve(st, cfg)?;
                let mut traj = Table::new(&format!("trajectory_{tag}.csv"), &["t", "x1", "x2", "x3", "re_w", "im_w"]);
                for &(time, x) in &ev.trace {
                    let (re, im) = match spec.kind {
                        PolygonKind::Chp => (-x.x1, x.x2.hypot(x.x3)),
                        PolygonKind::Hhp => ((x.x2 * x.x2 - x.x1 * x.x1).abs().sqrt(), x.x3),
                    };
                    traj.push(vec![time.into(), x.x1.into(), x.x2.into(), x.x3.into(), re.into(), im.into()]);
                }
                tables.push(traj);
                summary.push(vec![Cell::from(*tag), "t".into(), rt.t.into()]);
                summary.push(vec![Cell::from(*tag), "c_theta0".into(), spec.c_theta0.into()]);
                summary.push(vec![Cell::from(*tag), "corner_angle".into(), sol.angle().into()]);
                summary.push(vec![Cell::from(*tag), "rho0".into(), spec.rho0.into()]);
                summary.push(vec![Cell::from(*tag), "max_distance_outside_core".into(), far.into()]);
            }
            tables.push(summary);
            Ok(tables)
        }),
    })
}
