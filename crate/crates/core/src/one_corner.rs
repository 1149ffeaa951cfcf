//! Self-similar one-corner solution and its placement on a polygon corner.
//!
//! At a fixed time `t` the profile has curvature `c0/√t` and torsion
//! `s/(2t)`. The Frenet system
//!
//! ```text
//! T' = κ n,   n' = κ T + τ b,   b' = -τ n
//! ```
//!
//! is integrated from the identity frame at `s = 0` in both directions. The
//! torsion term spins (n, b) at a rate growing like s, so RK4 runs on the
//! parallel frame `e1 + i e2 = e^{-iφ}(n + i b)`, `φ = s²/4t`, where only
//! the slow curvature coupling is left; n and b are rebuilt from φ exactly.
//! Self-similarity gives `X = s T + 2 c0 √t b`, which pins `X(0) = 2 c0 √t e3`.

use crate::error::{Error, Result};
use crate::mink::{MinkMatrix, MinkVec};
use crate::polygon::PolygonSpec;

/// Angle mismatch (in ρ) tolerated by [`match_to_polygon`].
pub const MATCH_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct SelfSimilarSolution {
    pub c0: f64,
    pub t: f64,
    /// Ascending, symmetric about 0.
    pub grid: Vec<f64>,
    pub tangent: Vec<MinkVec>,
    pub normal: Vec<MinkVec>,
    pub binormal: Vec<MinkVec>,
    pub position: Vec<MinkVec>,
    pub a_minus: MinkVec,
    pub a_plus: MinkVec,
}

/// Corner angle predicted for amplitude `c0`: `cosh(ρ/2) = e^{π c0²/2}`.
pub fn predicted_angle(c0: f64) -> f64 {
    2.0 * (0.5 * std::f64::consts::PI * c0 * c0).exp().acosh()
}

/// Default half-length `40 √t max(1, 1/c0)`.
pub fn default_s_max(c0: f64, t: f64) -> f64 {
    40.0 * t.sqrt() * (1.0 / c0).max(1.0)
}

/// Tangent, parallel frame `(e1, e2)` and position.
#[derive(Clone, Copy)]
struct Frame {
    t: MinkVec,
    n: MinkVec,
    b: MinkVec,
    x: MinkVec,
}

impl Frame {
    fn axpy(self, h: f64, d: Frame) -> Frame {
        Frame { t: self.t + d.t * h, n: self.n + d.n * h, b: self.b + d.b * h, x: self.x + d.x * h }
    }

    /// Back to the Frenet frame at arclength `s`.
    fn frenet_at(self, s: f64, t: f64) -> Frame {
        let (sin, cos) = (s * s / (4.0 * t)).sin_cos();
        Frame { t: self.t, n: self.n * cos + self.b * sin, b: self.b * cos - self.n * sin, x: self.x }
    }
}

fn frenet(f: Frame, s: f64, kappa: f64, t: f64) -> Frame {
    let (sin, cos) = (s * s / (4.0 * t)).sin_cos();
    let (k1, k2) = (kappa * cos, kappa * sin);
    Frame { t: f.n * k1 + f.b * k2, n: f.t * k1, b: f.t * k2, x: f.t }
}

fn march(start: Frame, steps: usize, h: f64, kappa: f64, t: f64) -> Vec<Frame> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut f = start;
    out.push(f);
    for j in 0..steps {
        let s = h * j as f64;
        let k1 = frenet(f, s, kappa, t);
        let k2 = frenet(f.axpy(0.5 * h, k1), s + 0.5 * h, kappa, t);
        let k3 = frenet(f.axpy(0.5 * h, k2), s + 0.5 * h, kappa, t);
        let k4 = frenet(f.axpy(h, k3), s + h, kappa, t);
        f = Frame {
            t: f.t + (k1.t + (k2.t + k3.t) * 2.0 + k4.t) * (h / 6.0),
            n: f.n + (k1.n + (k2.n + k3.n) * 2.0 + k4.n) * (h / 6.0),
            b: f.b + (k1.b + (k2.b + k3.b) * 2.0 + k4.b) * (h / 6.0),
            x: f.x + (k1.x + (k2.x + k3.x) * 2.0 + k4.x) * (h / 6.0),
        };
        out.push(f);
    }
    out
}

/// RK4 integration of the self-similar profile on `[-s_max, s_max]` with step `ds`.
pub fn solve_one_corner(c0: f64, t: f64, ds: f64, s_max: f64) -> Result<SelfSimilarSolution> {
    if !(c0 > 0.0) || !(t > 0.0) {
        return Err(Error::InvalidSpec(format!("one-corner needs c0 > 0 and t > 0, got c0 = {c0}, t = {t}")));
    }
    if !(ds > 0.0) || !(s_max >= 10.0 * ds) {
        return Err(Error::BadDiscretization(format!("ds = {ds}, s_max = {s_max}")));
    }
    let steps = (s_max / ds).round() as usize;
    let kappa = c0 / t.sqrt();
    let start = Frame {
        t: MinkVec::E1,
        n: MinkVec::E2,
        b: MinkVec::E3,
        x: MinkVec::E3 * (2.0 * c0 * t.sqrt()),
    };
    let fwd = march(start, steps, ds, kappa, t);
    let bwd = march(start, steps, -ds, kappa, t);
    let grid: Vec<f64> = (0..2 * steps + 1).map(|j| (j as f64 - steps as f64) * ds).collect();
    let frames: Vec<Frame> = bwd
        .iter()
        .rev()
        .chain(fwd.iter().skip(1))
        .zip(&grid)
        .map(|(f, &s)| f.frenet_at(s, t))
        .collect();
    if frames.iter().any(|f| !f.t.x1.is_finite()) {
        return Err(Error::BlowUp { step: steps, t });
    }
    let mut sol = SelfSimilarSolution {
        c0,
        t,
        tangent: frames.iter().map(|f| f.t).collect(),
        normal: frames.iter().map(|f| f.n).collect(),
        binormal: frames.iter().map(|f| f.b).collect(),
        position: frames.iter().map(|f| f.x).collect(),
        grid,
        a_minus: MinkVec::ZERO,
        a_plus: MinkVec::ZERO,
    };
    sol.a_minus = sol.asymptote(false)?;
    sol.a_plus = sol.asymptote(true)?;
    Ok(sol)
}

impl SelfSimilarSolution {
    /// `T + (2 c0 √t / s) b` differs from the limit by O(s⁻³); it is averaged
    /// over the outermost tenth of the branch and put back on H².
    fn asymptote(&self, plus: bool) -> Result<MinkVec> {
        let n = self.grid.len();
        let tail = (n / 20).max(1);
        let range = if plus { n - tail..n } else { 0..tail };
        let w = 2.0 * self.c0 * self.t.sqrt();
        let sum = range
            .map(|j| self.tangent[j] + self.binormal[j] * (w / self.grid[j]))
            .fold(MinkVec::ZERO, |a, v| a + v);
        sum.renormalize_h2()
    }

    /// Hyperbolic angle ρ between the asymptotes, `cosh ρ = -A⁻∘A⁺`.
    pub fn angle(&self) -> f64 {
        (-self.a_minus.dot(self.a_plus)).max(1.0).acosh()
    }

    /// Largest deviation of (T, n, b) from a Minkowski-orthonormal frame.
    pub fn frame_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.grid.len() {
            let (t, n, b) = (self.tangent[j], self.normal[j], self.binormal[j]);
            for e in [t.dot(t) + 1.0, n.dot(n) - 1.0, b.dot(b) - 1.0, t.dot(n), t.dot(b), n.dot(b)] {
                worst = worst.max(e.abs());
            }
        }
        worst
    }
}

/// One-corner solution moved onto the corner at `s = 0` of a polygon.
#[derive(Debug, Clone)]
pub struct MatchedCorner {
    pub rotation: MinkMatrix,
    pub origin: MinkVec,
    pub tangent: Vec<MinkVec>,
    pub normal: Vec<MinkVec>,
    pub binormal: Vec<MinkVec>,
    pub position: Vec<MinkVec>,
}

/// Orthonormal frame (bisector, chord direction, their cross product) of a pair
/// of H² points, as matrix columns.
fn pair_frame(minus: MinkVec, plus: MinkVec) -> Result<MinkMatrix> {
    let u = (minus + plus).renormalize_h2()?;
    let v = (plus - minus).unit().ok_or(Error::DegenerateAxis)?;
    Ok(MinkMatrix::from_cols([u, v, u.cross(v)]))
}

/// Lorentz rotation taking `A⁻, A⁺` to the tangents of sides −1 and 0, and
/// `X_rot = X_0 + M X_θ` with `X_0` the polygon vertex at `s = 0`.
pub fn match_to_polygon(sol: &SelfSimilarSolution, spec: &PolygonSpec) -> Result<MatchedCorner> {
    let measured = sol.angle();
    if (measured - spec.rho0).abs() > MATCH_TOL {
        return Err(Error::AsymptoteMismatch { measured, expected: spec.rho0 });
    }
    let target = pair_frame(spec.side_tangent(-1), spec.side_tangent(0))?;
    let source = pair_frame(sol.a_minus, sol.a_plus)?;
    let rotation = target * source.lorentz_inverse();
    let origin = spec.vertex(0);
    let map = |v: &Vec<MinkVec>| v.iter().map(|&x| rotation.apply(x)).collect::<Vec<_>>();
    Ok(MatchedCorner {
        rotation,
        origin,
        tangent: map(&sol.tangent),
        normal: map(&sol.normal),
        binormal: map(&sol.binormal),
        position: sol.position.iter().map(|&x| origin + rotation.apply(x)).collect(),
    })
}
