//! Method-of-lines integration of `T_t = T ∧ T_ss`, `X_t = T ∧ T_s`.
//!
//! Periodic curves use a pseudo-spectral derivative on one sector of an
//! M-fold screw-symmetric curve: with `w = T2 + i T3` and `u = e^{-iσs} w`,
//! `T1` and `u` are periodic on the sector of length 2π/M, so all transforms
//! have N/M points. Open curves use centered finite differences with the
//! tangent held fixed at both ends. Time stepping is classical RK4 with the
//! tangent pulled back onto H² after every step.

use core::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::gauss::CornerLattice;
use crate::mink::{MinkMatrix, MinkVec};
use crate::polygon::{Boundary, CurveState, PolygonKind, PolygonSpec};

/// Default `Δt / Δs²`. The spectral operator reaches `|λ Δt| = π² C`, and
/// RK4 is stable on the imaginary axis up to 2√2, so C may not exceed ~0.28.
pub const DEFAULT_COURANT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    SpectralPeriodic,
    FiniteDifferenceFixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub n: usize,
    pub ds: f64,
    pub t_end: f64,
    /// Total number of RK4 steps, at least `t_end / (courant ds²)`.
    pub nt: usize,
    pub courant: f64,
    pub renormalize_every: usize,
    /// Screw symmetry of a periodic curve: number of sectors and twist σ of
    /// `T2 + i T3` (+1 for the polygons as parametrized, -1 after a mirror).
    pub fold: usize,
    pub twist: i32,
    /// Times at which full snapshots are kept; each is hit exactly.
    pub snapshot_times: Vec<f64>,
    /// Record X at s = 0 every this many steps.
    pub trace_every: usize,
    /// Record the center of mass every this many steps.
    pub com_every: usize,
    /// Fraction of nodes (centered) entering the center of mass.
    pub com_fraction: f64,
}

impl SolverConfig {
    /// Configuration for `state` up to `t_end`, with the step count chosen
    /// from the default stability bound.
    pub fn new(state: &CurveState, t_end: f64) -> Result<Self> {
        if state.len() < 3 {
            return Err(Error::TooFewNodes(state.len()));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::BadDiscretization(format!("t_end = {t_end}")));
        }
        let ds = state.ds();
        let (scheme, com_fraction) = match state.boundary {
            Boundary::Periodic2Pi => (Scheme::SpectralPeriodic, 1.0),
            Boundary::FixedEnds => (Scheme::FiniteDifferenceFixed, 0.5),
        };
        let mut cfg = SolverConfig {
            scheme,
            n: state.len(),
            ds,
            t_end,
            nt: 0,
            courant: DEFAULT_COURANT,
            renormalize_every: 1,
            fold: 1,
            twist: 0,
            snapshot_times: Vec::new(),
            trace_every: 1,
            com_every: 1,
            com_fraction,
        };
        cfg.nt = cfg.min_steps(t_end);
        Ok(cfg)
    }

    /// Configuration for a sampled helical polygon, using its screw symmetry.
    pub fn for_polygon(spec: &PolygonSpec, state: &CurveState, t_end: f64) -> Result<Self> {
        let mut cfg = Self::new(state, t_end)?;
        if spec.kind == PolygonKind::Chp {
            cfg.fold = spec.m;
            cfg.twist = 1;
        }
        Ok(cfg)
    }

    fn min_steps(&self, span: f64) -> usize {
        (span / (self.courant * self.ds * self.ds)).ceil().max(1.0) as usize
    }

    pub fn dt_max(&self) -> f64 {
        self.courant * self.ds * self.ds
    }

    /// Sets the step count, rejecting any that violates the stability bound.
    pub fn with_steps(mut self, nt: usize) -> Result<Self> {
        let dt = self.t_end / nt.max(1) as f64;
        if dt > self.dt_max() * (1.0 + 1e-12) {
            return Err(Error::BadDiscretization(format!(
                "dt = {dt:e} exceeds the stability bound {:e}",
                self.dt_max()
            )));
        }
        self.nt = nt.max(1);
        Ok(self)
    }

    pub fn with_courant(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= DEFAULT_COURANT) {
            return Err(Error::BadDiscretization(format!("Courant number {c} outside (0, {DEFAULT_COURANT}]")));
        }
        self.courant = c;
        self.nt = self.nt.max(self.min_steps(self.t_end));
        Ok(self)
    }

    pub fn with_snapshots(mut self, times: &[f64]) -> Self {
        self.snapshot_times = times.to_vec();
        self
    }

    /// Rounds the step count up so that the trace and the center of mass are
    /// recorded at exactly `samples` equal intervals after the initial point.
    pub fn with_samples(mut self, samples: usize) -> Self {
        let samples = samples.max(1);
        let every = self.nt.div_ceil(samples);
        self.nt = every * samples;
        self.trace_every = every;
        self.com_every = every;
        self
    }

    pub fn with_symmetry(mut self, fold: usize, twist: i32) -> Self {
        self.fold = fold;
        self.twist = twist;
        self
    }
}

/// Output of [`rk4_evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_state: CurveState,
    /// `(t, X(0, t))`.
    pub trace: Vec<(f64, MinkVec)>,
    /// `(t, h(t))`, h the mean of X over the configured nodes.
    pub com: Vec<(f64, MinkVec)>,
    pub snapshots: Vec<CurveState>,
    pub steps: usize,
    /// Largest `|T∘T + 1|` seen before renormalization.
    pub max_h2_drift: f64,
}

/// Second derivative of periodic samples on [0, 2π) by Fourier
/// multiplication. With `fold > 1` the data are taken to be 2π/fold-periodic
/// and only the first N/fold samples are transformed.
pub fn spectral_second_derivative(values: &[f64], fold: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if fold == 0 || n % fold != 0 {
        return Err(Error::NotDivisible { len: n, fold });
    }
    let m = n / fold;
    let mut buf: Vec<Complex64> = values[..m].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        let kk = signed_index(k, m) as f64 * fold as f64;
        *z *= -kk * kk / m as f64;
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    Ok((0..n).map(|j| buf[j % m].re).collect())
}

/// Centered second difference; the two end values are set to zero, matching
/// the fixed-end contract of the open-curve solver.
pub fn fd_second_derivative(values: &[f64], ds: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewNodes(n));
    }
    let inv = 1.0 / (ds * ds);
    let mut out = vec![0.0; n];
    for k in 1..n - 1 {
        out[k] = (values[k + 1] - 2.0 * values[k] + values[k - 1]) * inv;
    }
    Ok(out)
}

/// `T ∧ D²T` at every node of `state`, with D² the spectral (periodic, no
/// symmetry reduction) or finite-difference (fixed ends) operator.
pub fn rhs_tangent(state: &CurveState, scheme: Scheme) -> Result<Vec<MinkVec>> {
    let n = state.len();
    if n < 3 {
        return Err(Error::TooFewNodes(n));
    }
    let comps: Vec<Vec<f64>> = (0..3).map(|c| state.tangent.iter().map(|t| t[c]).collect()).collect();
    let d2: Vec<Vec<f64>> = match scheme {
        Scheme::SpectralPeriodic => {
            // the grid covers [0, L); rescale wavenumbers from 2π to L
            let scale = (2.0 * PI / (state.ds() * n as f64)).powi(2);
            comps
                .iter()
                .map(|c| spectral_second_derivative(c, 1).map(|v| v.into_iter().map(|x| x * scale).collect()))
                .collect::<Result<_>>()?
        }
        Scheme::FiniteDifferenceFixed => comps
            .iter()
            .map(|c| fd_second_derivative(c, state.ds()))
            .collect::<Result<_>>()?,
    };
    Ok((0..n)
        .map(|j| state.tangent[j].cross(MinkVec::new(d2[0][j], d2[1][j], d2[2][j])))
        .collect())
}

fn signed_index(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Rotation by `angle` in the (x2, x3) plane.
fn axial_rotation(angle: f64) -> MinkMatrix {
    let (c, s) = (angle.cos(), angle.sin());
    MinkMatrix([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
}

struct Spectral {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// `e^{iσ s_j}`.
    twist: Vec<Complex64>,
    /// First- and second-derivative multipliers for u and T1 (normalized).
    du: Vec<Complex64>,
    d2u: Vec<f64>,
    d1: Vec<Complex64>,
    d2: Vec<f64>,
    bu: Vec<Complex64>,
    bt: Vec<Complex64>,
    b1: Vec<Complex64>,
    b2: Vec<Complex64>,
}

impl Spectral {
    fn new(n: usize, ds: f64, fold: usize, sigma: i32) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        // wavenumbers of a sector of length n ds
        let base = 2.0 * PI / (n as f64 * ds);
        let norm = 1.0 / n as f64;
        let mut du = vec![Complex64::new(0.0, 0.0); n];
        let mut d2u = vec![0.0; n];
        let mut d1 = vec![Complex64::new(0.0, 0.0); n];
        let mut d2 = vec![0.0; n];
        let sig = sigma as f64 * 2.0 * PI / (fold as f64 * n as f64 * ds);
        for k in 0..n {
            if n % 2 == 0 && k == n / 2 {
                continue;
            }
            let kk = signed_index(k, n) as f64 * base;
            let ku = kk + sig;
            du[k] = Complex64::new(0.0, ku * norm);
            d2u[k] = -ku * ku * norm;
            d1[k] = Complex64::new(0.0, kk * norm);
            d2[k] = -kk * kk * norm;
        }
        let twist = (0..n).map(|j| Complex64::from_polar(1.0, sig * ds * j as f64)).collect();
        let z = vec![Complex64::new(0.0, 0.0); n];
        Spectral {
            n,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            twist,
            du,
            d2u,
            d1,
            d2,
            bu: z.clone(),
            bt: z.clone(),
            b1: z.clone(),
            b2: z,
        }
    }

    fn derivatives(&mut self, t: &[MinkVec], ts: &mut [MinkVec], tss: &mut [MinkVec]) {
        let n = self.n;
        for j in 0..n {
            let w = Complex64::new(t[j].x2, t[j].x3);
            self.bu[j] = w * self.twist[j].conj();
            self.bt[j] = Complex64::new(t[j].x1, 0.0);
        }
        self.fwd.process_with_scratch(&mut self.bu, &mut self.scratch);
        self.fwd.process_with_scratch(&mut self.bt, &mut self.scratch);
        for k in 0..n {
            let u = self.bu[k];
            let v = self.bt[k];
            self.b1[k] = u * self.du[k];
            self.b2[k] = u * self.d2u[k];
            // T1'' + i T1' in one transform: both spectra are Hermitian
            self.bt[k] = v * self.d2[k] + Complex64::i() * v * self.d1[k];
        }
        self.inv.process_with_scratch(&mut self.b1, &mut self.scratch);
        self.inv.process_with_scratch(&mut self.b2, &mut self.scratch);
        self.inv.process_with_scratch(&mut self.bt, &mut self.scratch);
        for j in 0..n {
            let e = self.twist[j];
            let w1 = self.b1[j] * e;
            let w2 = self.b2[j] * e;
            ts[j] = MinkVec::new(self.bt[j].im, w1.re, w1.im);
            tss[j] = MinkVec::new(self.bt[j].re, w2.re, w2.im);
        }
    }
}

fn fd_derivatives(t: &[MinkVec], ds: f64, ts: &mut [MinkVec], tss: &mut [MinkVec]) {
    let n = t.len();
    let (i1, i2) = (0.5 / ds, 1.0 / (ds * ds));
    for k in 1..n - 1 {
        ts[k] = (t[k + 1] - t[k - 1]) * i1;
        tss[k] = (t[k + 1] - t[k] * 2.0 + t[k - 1]) * i2;
    }
    ts[0] = (t[0] * -3.0 + t[1] * 4.0 - t[2]) * i1;
    ts[n - 1] = (t[n - 1] * 3.0 - t[n - 2] * 4.0 + t[n - 3]) * i1;
    tss[0] = MinkVec::ZERO;
    tss[n - 1] = MinkVec::ZERO;
}

enum Operator {
    Spectral(Box<Spectral>),
    Fd { ds: f64 },
}

impl Operator {
    /// Fills `(X_t, T_t)`.
    fn rhs(&mut self, t: &[MinkVec], ts: &mut [MinkVec], tss: &mut [MinkVec], kx: &mut [MinkVec], kt: &mut [MinkVec]) {
        match self {
            Operator::Spectral(sp) => sp.derivatives(t, ts, tss),
            Operator::Fd { ds } => fd_derivatives(t, *ds, ts, tss),
        }
        for j in 0..t.len() {
            kx[j] = t[j].cross(ts[j]);
            kt[j] = t[j].cross(tss[j]);
        }
        if let Operator::Fd { .. } = self {
            let n = t.len();
            kt[0] = MinkVec::ZERO;
            kt[n - 1] = MinkVec::ZERO;
        }
    }
}

/// Evolved data on the computational nodes plus what is needed to rebuild
/// the full curve.
struct Model {
    op: Operator,
    x: Vec<MinkVec>,
    t: Vec<MinkVec>,
    ds: f64,
    origin: usize,
    /// Full-curve reconstruction for a sector: rotation R and the screw
    /// translation d with X(s + P) = R X(s) + d.
    fold: usize,
    screw: MinkMatrix,
    shift: MinkVec,
    grid0: f64,
    boundary: Boundary,
    total: usize,
}

impl Model {
    fn build(state: &CurveState, cfg: &SolverConfig) -> Result<Self> {
        let total = state.len();
        match cfg.scheme {
            Scheme::SpectralPeriodic => {
                if cfg.fold == 0 || total % cfg.fold != 0 {
                    return Err(Error::NotDivisible { len: total, fold: cfg.fold });
                }
                let n = total / cfg.fold;
                if n < 4 {
                    return Err(Error::TooFewNodes(n));
                }
                let ds = state.ds();
                let sigma = if cfg.fold > 1 { cfg.twist } else { 0 };
                let screw = axial_rotation(sigma as f64 * 2.0 * PI / cfg.fold as f64);
                let shift = if cfg.fold > 1 {
                    state.position[n] - screw.apply(state.position[0])
                } else {
                    state.tangent.iter().fold(MinkVec::ZERO, |a, &t| a + t) * ds
                };
                Ok(Model {
                    op: Operator::Spectral(Box::new(Spectral::new(n, ds, cfg.fold, sigma))),
                    x: state.position[..n].to_vec(),
                    t: state.tangent[..n].to_vec(),
                    ds,
                    origin: 0,
                    fold: cfg.fold,
                    screw,
                    shift,
                    grid0: state.grid[0],
                    boundary: state.boundary,
                    total,
                })
            }
            Scheme::FiniteDifferenceFixed => {
                if total < 3 {
                    return Err(Error::TooFewNodes(total));
                }
                Ok(Model {
                    op: Operator::Fd { ds: state.ds() },
                    x: state.position.clone(),
                    t: state.tangent.clone(),
                    ds: state.ds(),
                    origin: state.origin_index(),
                    fold: 1,
                    screw: MinkMatrix::IDENTITY,
                    shift: MinkVec::ZERO,
                    grid0: state.grid[0],
                    boundary: state.boundary,
                    total,
                })
            }
        }
    }

    fn expand(&self, time: f64) -> CurveState {
        let n = self.x.len();
        let mut tangent = Vec::with_capacity(self.total);
        let mut position = Vec::with_capacity(self.total);
        let mut rot = MinkMatrix::IDENTITY;
        let mut offset = MinkVec::ZERO;
        for _ in 0..self.total / n {
            for j in 0..n {
                tangent.push(rot.apply(self.t[j]));
                position.push(rot.apply(self.x[j]) + offset);
            }
            offset = self.screw.apply(offset) + self.shift;
            rot = self.screw * rot;
        }
        let grid = (0..self.total).map(|j| self.grid0 + self.ds * j as f64).collect();
        CurveState { grid, tangent, position, time, boundary: self.boundary }
    }

    fn center_of_mass(&self, fraction: f64) -> MinkVec {
        let n = self.x.len();
        if self.fold == 1 || matches!(self.op, Operator::Fd { .. }) {
            let keep = ((n as f64 * fraction).round() as usize).clamp(1, n);
            let start = (n - keep) / 2;
            let sum = self.x[start..start + keep].iter().fold(MinkVec::ZERO, |a, &x| a + x);
            return sum * (1.0 / keep as f64);
        }
        let mean = self.x.iter().fold(MinkVec::ZERO, |a, &x| a + x) * (1.0 / n as f64);
        let (mut rot, mut offset, mut acc) = (MinkMatrix::IDENTITY, MinkVec::ZERO, MinkVec::ZERO);
        for _ in 0..self.fold {
            acc += rot.apply(mean) + offset;
            offset = self.screw.apply(offset) + self.shift;
            rot = self.screw * rot;
        }
        acc * (1.0 / self.fold as f64)
    }
}

/// Integrates `state` with classical RK4 according to `cfg`.
pub fn rk4_evolve(state: &CurveState, cfg: &SolverConfig) -> Result<Evolution> {
    let mut model = Model::build(state, cfg)?;
    let n = model.x.len();
    let z = || vec![MinkVec::ZERO; n];
    let (mut ts, mut tss) = (z(), z());
    let (mut kx1, mut kx2, mut kx3, mut kx4) = (z(), z(), z(), z());
    let (mut kt1, mut kt2, mut kt3, mut kt4) = (z(), z(), z(), z());
    let mut tmp = z();

    let t0 = state.time;
    let mut stops: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s > t0 && s < t0 + cfg.t_end)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t0 + cfg.t_end);
    let want_initial = cfg.snapshot_times.iter().any(|&s| s == t0);

    let mut out = Evolution {
        final_state: state.clone(),
        trace: vec![(t0, model.x[model.origin])],
        com: vec![(t0, model.center_of_mass(cfg.com_fraction))],
        snapshots: if want_initial { vec![state.clone()] } else { Vec::new() },
        steps: 0,
        max_h2_drift: 0.0,
    };
    let dt_nominal = cfg.t_end / cfg.nt.max(1) as f64;
    let mut time = t0;
    let mut step = 0usize;
    for (si, &stop) in stops.iter().enumerate() {
        let span = stop - time;
        let steps = ((span / dt_nominal) - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for i in 0..steps {
            model.op.rhs(&model.t, &mut ts, &mut tss, &mut kx1, &mut kt1);
            for j in 0..n {
                tmp[j] = model.t[j] + kt1[j] * (0.5 * dt);
            }
            model.op.rhs(&tmp, &mut ts, &mut tss, &mut kx2, &mut kt2);
            for j in 0..n {
                tmp[j] = model.t[j] + kt2[j] * (0.5 * dt);
            }
            model.op.rhs(&tmp, &mut ts, &mut tss, &mut kx3, &mut kt3);
            for j in 0..n {
                tmp[j] = model.t[j] + kt3[j] * dt;
            }
            model.op.rhs(&tmp, &mut ts, &mut tss, &mut kx4, &mut kt4);
            let w = dt / 6.0;
            for j in 0..n {
                model.x[j] += (kx1[j] + (kx2[j] + kx3[j]) * 2.0 + kx4[j]) * w;
                model.t[j] += (kt1[j] + (kt2[j] + kt3[j]) * 2.0 + kt4[j]) * w;
            }
            step += 1;
            time = if i + 1 == steps { stop } else { time + dt };
            if step % cfg.renormalize_every.max(1) == 0 {
                // fixed ends are exact and must stay bit-identical
                let inner = match model.op {
                    Operator::Fd { .. } => 1..n - 1,
                    Operator::Spectral(_) => 0..n,
                };
                for tj in model.t[inner].iter_mut() {
                    let drift = (tj.norm_sq() + 1.0).abs();
                    if drift > out.max_h2_drift {
                        out.max_h2_drift = drift;
                    }
                    *tj = tj.renormalize_h2().map_err(|_| Error::BlowUp { step, t: time })?;
                }
            }
            if step % cfg.trace_every.max(1) == 0 {
                out.trace.push((time, model.x[model.origin]));
            }
            if step % cfg.com_every.max(1) == 0 {
                out.com.push((time, model.center_of_mass(cfg.com_fraction)));
            }
        }
        if si + 1 < stops.len() {
            out.snapshots.push(model.expand(time));
        }
    }
    out.steps = step;
    out.final_state = model.expand(time);
    if cfg.snapshot_times.iter().any(|&s| s == t0 + cfg.t_end) {
        out.snapshots.push(out.final_state.clone());
    }
    Ok(out)
}

/// Averages the sampled tangent over the central part of every side between
/// consecutive corners of the rational-time lattice and renormalizes.
///
/// Returns `(window midpoint, tangent)` per side. A periodic curve uses the
/// sides starting in one period and the window `[Δ/4, 3Δ/4)` of each gap Δ;
/// an open curve uses the sides on both sides of every corner in the inner
/// half `[-L/4, L/4)` and the window `[Δ/3, 2Δ/3)`.
pub fn side_tangents_numeric(state: &CurveState, lat: &CornerLattice) -> Result<Vec<(f64, MinkVec)>> {
    let spec = &lat.spec;
    let gap = lat.corner_gap();
    let (lo, hi, a, b) = match spec.kind {
        PolygonKind::Chp => (lat.shift, lat.shift + 2.0 * PI, 0.25, 0.75),
        PolygonKind::Hhp => {
            let q = 0.25 * spec.domain_length();
            (-q - gap, q, 1.0 / 3.0, 2.0 / 3.0)
        }
    };
    let ds = state.ds();
    let s0 = state.grid[0];
    let n = state.len() as i64;
    let mut out = Vec::new();
    for j in lat.corners_in(lo - 1e-12, hi - 1e-12) {
        let c = lat.position(j);
        let (wa, wb) = (c + a * gap, c + b * gap);
        let mut acc = MinkVec::ZERO;
        let mut count = 0usize;
        let mut k = ((wa - s0) / ds).ceil() as i64;
        while s0 + k as f64 * ds < wb {
            let idx = match state.boundary {
                // T is 2π-periodic, so whole turns wrap around
                Boundary::Periodic2Pi => k.rem_euclid(n),
                Boundary::FixedEnds if (0..n).contains(&k) => k,
                Boundary::FixedEnds => return Err(Error::EmptyWindow(out.len())),
            };
            acc += state.tangent[idx as usize];
            count += 1;
            k += 1;
        }
        if count == 0 {
            return Err(Error::EmptyWindow(out.len()));
        }
        out.push((0.5 * (wa + wb), (acc * (1.0 / count as f64)).renormalize_h2()?));
    }
    Ok(out)
}

/// Angles `arccosh(-T_j ∘ T_{j+1})` between consecutive averaged sides: one
/// per corner in a period (periodic, cyclic) or in the inner half (open).
pub fn measure_angle_numeric(state: &CurveState, spec: &PolygonSpec, lat: &CornerLattice) -> Result<Vec<f64>> {
    if spec.kind != lat.spec.kind {
        return Err(Error::InvalidSpec("lattice built for a different polygon".into()));
    }
    let sides = side_tangents_numeric(state, lat)?;
    let n = sides.len();
    let pairs = match spec.kind {
        PolygonKind::Chp => n,
        PolygonKind::Hhp => n.saturating_sub(1),
    };
    Ok((0..pairs)
        .map(|i| (-sides[i].1.dot(sides[(i + 1) % n].1)).max(1.0).acosh())
        .collect())
}
