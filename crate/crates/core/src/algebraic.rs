//! Exact evolution at rational times: the curve is again a polygon whose
//! corners sit on the shifted lattice of the Dirac comb. Crossing each corner
//! rotates the running frame (T, e1, e2) by the angle ρ_q about the local
//! axis (0, -sin ζ, cos ζ), ζ the phase of the comb weight there.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gauss::{CornerLattice, RationalTime};
use crate::mink::{lorentz_rotation, orthonormalize_frame, rotation_taking, MinkMatrix, MinkVec};
use crate::polygon::{Boundary, CurveState, PolygonKind, PolygonSpec};

/// Frame change across one corner, expressed in the incoming frame.
pub fn corner_rotation(rho: f64, zeta: f64) -> MinkMatrix {
    let axis = MinkVec::new(0.0, -zeta.sin(), zeta.cos());
    lorentz_rotation(axis, rho).expect("corner axis is space-like by construction")
}

/// Piecewise-constant tangent and piecewise-linear position at a rational time.
///
/// `corners[i]` separates segment `i` from segment `i + 1`; segment 0 starts at
/// `start` and the last one ends at `end`.
#[derive(Debug, Clone)]
pub struct AlgebraicCurve {
    pub spec: PolygonSpec,
    pub time: RationalTime,
    pub start: f64,
    pub end: f64,
    pub corners: Vec<f64>,
    pub frames: Vec<MinkMatrix>,
    /// Position at `start` followed by the position at every corner.
    pub vertices: Vec<MinkVec>,
}

/// Window covered by the reconstruction: [0, 2π] for a CHP, [-L/2, L/2] for an HHP.
fn default_window(spec: &PolygonSpec) -> (f64, f64) {
    match spec.kind {
        PolygonKind::Chp => (0.0, 2.0 * PI),
        PolygonKind::Hhp => {
            let half = 0.5 * spec.domain_length();
            (-half, half)
        }
    }
}

/// Orientation of the comb phase relative to the frame: with the tangents
/// written as in [`PolygonSpec::side_tangent`], the CHP winds with +ζ and the
/// HHP with -ζ (fixed by reconstructing the initial polygons).
pub fn zeta_sign(kind: PolygonKind) -> f64 {
    match kind {
        PolygonKind::Chp => 1.0,
        PolygonKind::Hhp => -1.0,
    }
}

/// Corner positions in the open window and the frames on every segment.
/// The segment containing `anchor` carries the identity frame; frames to its
/// right follow from the corner rotations, frames to its left from their
/// inverses, which keeps the accumulated boosts small on long HHP windows.
pub fn build_frames_in(lat: &CornerLattice, start: f64, end: f64, anchor: f64) -> (Vec<f64>, Vec<MinkMatrix>) {
    let sign = zeta_sign(lat.spec.kind);
    let idx: Vec<i64> = lat.corners_in(start, end).filter(|&j| lat.position(j) > start).collect();
    let corners: Vec<f64> = idx.iter().map(|&j| lat.position(j)).collect();
    let seed = corners.partition_point(|&c| c <= anchor);
    let mut frames = vec![MinkMatrix::IDENTITY; corners.len() + 1];
    for i in seed + 1..frames.len() {
        let r = corner_rotation(lat.rho_q, sign * lat.phase(idx[i - 1]));
        frames[i] = orthonormalize_frame(&(r.transpose() * frames[i - 1])).expect("frame left H^2");
    }
    for i in (0..seed).rev() {
        let r = corner_rotation(-lat.rho_q, sign * lat.phase(idx[i]));
        frames[i] = orthonormalize_frame(&(r.transpose() * frames[i + 1])).expect("frame left H^2");
    }
    (corners, frames)
}

/// Default anchor: the start of a CHP period, s = 0 on an HHP.
fn default_anchor(spec: &PolygonSpec, start: f64) -> f64 {
    match spec.kind {
        PolygonKind::Chp => start,
        PolygonKind::Hhp => 0.0,
    }
}

pub fn build_frames(spec: &PolygonSpec, rt: RationalTime) -> Vec<MinkMatrix> {
    let (a, b) = default_window(spec);
    build_frames_in(&CornerLattice::new(spec, rt), a, b, default_anchor(spec, a)).1
}

impl AlgebraicCurve {
    pub fn build(spec: &PolygonSpec, rt: RationalTime) -> Self {
        let (a, b) = default_window(spec);
        Self::build_in(spec, rt, a, b)
    }

    pub fn build_in(spec: &PolygonSpec, rt: RationalTime, start: f64, end: f64) -> Self {
        let lat = CornerLattice::new(spec, rt);
        let anchor = default_anchor(spec, start).clamp(start, end);
        let (corners, frames) = build_frames_in(&lat, start, end, anchor);
        let mut curve = AlgebraicCurve {
            spec: *spec,
            time: rt,
            start,
            end,
            corners,
            frames,
            vertices: Vec::new(),
        };
        // integrate from X̃(anchor) = 0 in both directions
        let n = curve.corners.len();
        let knot = |i: usize| if i == 0 { start } else { curve.corners[i - 1] };
        let seed = curve.corners.partition_point(|&c| c <= anchor);
        let mut vertices = vec![MinkVec::ZERO; n + 1];
        vertices[seed] = curve.frames[seed].row(0) * (knot(seed) - anchor);
        for i in seed + 1..=n {
            vertices[i] = vertices[i - 1] + curve.frames[i - 1].row(0) * (knot(i) - knot(i - 1));
        }
        for i in (0..seed).rev() {
            vertices[i] = vertices[i + 1] - curve.frames[i].row(0) * (knot(i + 1) - knot(i));
        }
        curve.vertices = vertices;
        curve
    }

    pub fn segment_of(&self, s: f64) -> usize {
        self.corners.partition_point(|&c| c <= s)
    }

    /// Tangent at `s`; at a corner, the tangent on its right.
    pub fn tangent(&self, s: f64) -> MinkVec {
        self.frames[self.segment_of(s)].row(0)
    }

    pub fn position(&self, s: f64) -> MinkVec {
        let i = self.segment_of(s);
        let base = if i == 0 { self.start } else { self.corners[i - 1] };
        self.vertices[i] + self.frames[i].row(0) * (s - base)
    }

    pub fn tangents(&self) -> Vec<MinkVec> {
        self.frames.iter().map(|f| f.row(0)).collect()
    }

    /// Applies `x ↦ L x + c` to frames and vertices.
    pub fn transform(&mut self, l: &MinkMatrix, c: MinkVec) {
        for f in &mut self.frames {
            let rows = [l.apply(f.row(0)), l.apply(f.row(1)), l.apply(f.row(2))];
            *f = MinkMatrix::from_rows(rows);
        }
        for v in &mut self.vertices {
            *v = l.apply(*v) + c;
        }
    }

    /// Mean of X over [a, b], exact for the piecewise-linear curve.
    pub fn mean_position(&self, a: f64, b: f64) -> MinkVec {
        let mut knots = vec![a];
        knots.extend(self.corners.iter().copied().filter(|&c| c > a && c < b));
        knots.push(b);
        let mut acc = MinkVec::ZERO;
        for w in knots.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            acc += self.position(mid) * (w[1] - w[0]);
        }
        acc * (1.0 / (b - a))
    }

    /// Samples the curve on `grid`, which must lie in the window.
    pub fn sample(&self, grid: &[f64], boundary: Boundary) -> CurveState {
        CurveState {
            grid: grid.to_vec(),
            tangent: grid.iter().map(|&s| self.tangent(s)).collect(),
            position: grid.iter().map(|&s| self.position(s)).collect(),
            time: self.time.t,
            boundary,
        }
    }
}

/// The algebraic curve reconstructed from its frames, with X̃ = 0 at the
/// start of a CHP period or at s = 0 on an HHP.
pub fn reconstruct_curve(spec: &PolygonSpec, rt: RationalTime) -> AlgebraicCurve {
    AlgebraicCurve::build(spec, rt)
}

/// Rigidly moves a reconstructed curve onto the physical solution, up to a
/// residual rotation about the polygon axis. `speed` is the axial speed of
/// the center of mass (see [`com_speed`]).
pub fn align_and_lift(curve: &mut AlgebraicCurve) -> Result<()> {
    let spec = curve.spec;
    let t = curve.time.t;
    let speed = com_speed(&spec);
    match spec.kind {
        PolygonKind::Chp => {
            let period = 2.0 * PI;
            let v = curve.position(curve.start + period) - curve.position(curve.start);
            if v.norm_sq() >= -1e-12 * v.euclid_norm_sq() {
                return Err(Error::DegenerateAxis);
            }
            let r = rotation_taking(v, MinkVec::E1)?;
            curve.transform(&r, MinkVec::ZERO);
            let mean = curve.mean_position(curve.start, curve.start + period);
            let target = MinkVec::new(spec.b * PI - speed * t, 0.0, 0.0);
            curve.transform(&MinkMatrix::IDENTITY, target - mean);
        }
        PolygonKind::Hhp => {
            let l = spec.l;
            let half = 0.5 * spec.domain_length();
            let delta = 0.5 * l / curve.time.q as f64;
            let d1 = curve.tangent(-half + delta) - curve.tangent(-l + delta);
            let d2 = curve.tangent(half - delta) - curve.tangent(l - delta);
            let mut n = d1.cross(d2);
            if n.norm_sq() <= 0.0 {
                return Err(Error::DegenerateAxis);
            }
            // the axis direction along which the curve advances
            let forward = curve.position(half) - curve.position(-half);
            if n.dot(forward) < 0.0 {
                n = -n;
            }
            let r = rotation_taking(n, MinkVec::E3)?;
            curve.transform(&r, MinkVec::ZERO);
            hhp_center_on_axis(curve)?;
            let inner = curve.mean_position(-0.5 * half, 0.5 * half);
            curve.transform(&MinkMatrix::IDENTITY, MinkVec::new(0.0, 0.0, speed * t - inner.x3));
        }
    }
    Ok(())
}

/// Boost about the x3-axis by `eta`.
fn boost3(eta: f64) -> MinkMatrix {
    let (c, s) = (eta.cosh(), eta.sinh());
    MinkMatrix([[c, s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Translates in (x1, x2) so that the screw symmetry X(s + l) = B X(s) + l b e3
/// holds about the x3-axis.
fn hhp_center_on_axis(curve: &mut AlgebraicCurve) -> Result<()> {
    let l = curve.spec.l;
    let s0 = 0.5 * l / curve.time.q as f64 * 0.37;
    let (t0, t1) = (curve.tangent(s0), curve.tangent(s0 + l));
    let b = [boost3(l), boost3(-l)]
        .into_iter()
        .min_by(|a, b| {
            let ea = a.apply(t0).euclid_dist(t1);
            let eb = b.apply(t0).euclid_dist(t1);
            ea.total_cmp(&eb)
        })
        .unwrap();
    let rhs = curve.position(s0 + l) - b.apply(curve.position(s0));
    // (I - B) c = rhs on the (x1, x2) block
    let m = &b.0;
    let (a11, a12, a21, a22) = (1.0 - m[0][0], -m[0][1], -m[1][0], 1.0 - m[1][1]);
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-14 {
        return Err(Error::DegenerateAxis);
    }
    let c1 = (rhs.x1 * a22 - a12 * rhs.x2) / det;
    let c2 = (a11 * rhs.x2 - a21 * rhs.x1) / det;
    curve.transform(&MinkMatrix::IDENTITY, MinkVec::new(-c1, -c2, 0.0));
    Ok(())
}

/// Speed of the center of mass along the polygon axis,
/// `2 ln cosh(ρ0/2) / (h tan h)` with h = π/M for the CHP and
/// `2 ln cosh(ρ0/2) / (h tanh h)` with h = l/2 for the HHP.
///
/// The circular case takes `tan`: the evolved mean converges to it at first
/// order in N, while the `tanh` form is off by the factor tanh(π/M)/tan(π/M)
/// at every resolution. Both tend to b² − 1 as M grows.
pub fn com_speed(spec: &PolygonSpec) -> f64 {
    let num = 2.0 * (0.5 * spec.rho0).cosh().ln();
    match spec.kind {
        PolygonKind::Chp => {
            let h = PI / spec.m as f64;
            num / (h * h.tan())
        }
        PolygonKind::Hhp => {
            let h = 0.5 * spec.l;
            num / (h * h.tanh())
        }
    }
}

/// Approximates c_{θ,0} from the jump of the algebraic tangent across the
/// corner at s_{1,q}: `sqrt(t) |T(Δs) - T(-Δs)| / (2Δs)`, Δs the corner gap.
pub fn estimate_c_theta0(spec: &PolygonSpec, q: u64) -> Result<f64> {
    if q % 4 != 0 {
        return Err(Error::InvalidTime(format!("q = {q} must be a multiple of 4")));
    }
    let rt = RationalTime::for_spec(spec, 1, q)?;
    let lat = CornerLattice::new(spec, rt);
    let ds = lat.corner_gap();
    let (_, frames) = build_frames_in(&lat, lat.position(-3), lat.position(1), lat.position(-2) - 0.5 * ds);
    let jump = frames[2].row(0) - frames[0].row(0);
    Ok(rt.t.sqrt() * jump.norm_sq().sqrt() / (2.0 * ds))
}
