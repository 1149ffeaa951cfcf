//! Linear algebra in Minkowski 3-space R^{1,2} with metric -dx1^2 + dx2^2 + dx3^2.
//!
//! Tangent vectors of the curves studied here live on the upper sheet of the
//! hyperboloid H^2 = { x : x∘x = -1, x1 > 0 }, and the rigid motions acting on
//! them are the proper orthochronous Lorentz transformations SO^+(2,1).

use core::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkVec {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CausalClass {
    TimeLike,
    SpaceLike,
    LightLike,
}

impl MinkVec {
    pub const ZERO: MinkVec = MinkVec::new(0.0, 0.0, 0.0);
    pub const E1: MinkVec = MinkVec::new(1.0, 0.0, 0.0);
    pub const E2: MinkVec = MinkVec::new(0.0, 1.0, 0.0);
    pub const E3: MinkVec = MinkVec::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Minkowski pseudo-scalar product `-a1 b1 + a2 b2 + a3 b3`.
    #[inline]
    pub fn dot(self, other: MinkVec) -> f64 {
        -self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    /// Minkowski cross product; the result is ∘-orthogonal to both factors.
    #[inline]
    pub fn cross(self, b: MinkVec) -> MinkVec {
        let a = self;
        MinkVec::new(
            -(a.x2 * b.x3 - a.x3 * b.x2),
            a.x3 * b.x1 - a.x1 * b.x3,
            a.x1 * b.x2 - a.x2 * b.x1,
        )
    }

    /// Self product `|a|_0^2`.
    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// `sqrt(|a∘a|)`, the magnitude regardless of causal class.
    #[inline]
    pub fn mink_norm(self) -> f64 {
        self.norm_sq().abs().sqrt()
    }

    #[inline]
    pub fn euclid_norm_sq(self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    /// Scale-aware light-like band used when no explicit tolerance is given.
    #[inline]
    pub fn default_tolerance(self) -> f64 {
        1e-10 * (1.0 + self.euclid_norm_sq())
    }

    pub fn causal_class(self, tol: f64) -> CausalClass {
        let q = self.norm_sq();
        if q.abs() <= tol {
            CausalClass::LightLike
        } else if q < 0.0 {
            CausalClass::TimeLike
        } else {
            CausalClass::SpaceLike
        }
    }

    /// Projects a future time-like vector onto H^2.
    pub fn renormalize_h2(self) -> Result<MinkVec> {
        let q = self.norm_sq();
        if !(q < 0.0) || !(self.x1 > 0.0) {
            return Err(Error::NotTimeLike(q));
        }
        Ok(self * (1.0 / (-q).sqrt()))
    }

    /// Divides by `sqrt(|a∘a|)`; `None` for light-like input.
    pub fn unit(self) -> Option<MinkVec> {
        let n = self.mink_norm();
        if n <= self.default_tolerance().sqrt() || !n.is_finite() {
            None
        } else {
            Some(self * (1.0 / n))
        }
    }

    /// Euclidean distance, handy for comparing nearby points in tests and fits.
    #[inline]
    pub fn euclid_dist(self, other: MinkVec) -> f64 {
        (self - other).euclid_norm_sq().sqrt()
    }
}

impl Add for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn add(self, o: MinkVec) -> MinkVec {
        MinkVec::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for MinkVec {
    #[inline]
    fn add_assign(&mut self, o: MinkVec) {
        *self = *self + o;
    }
}

impl Sub for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn sub(self, o: MinkVec) -> MinkVec {
        MinkVec::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl SubAssign for MinkVec {
    #[inline]
    fn sub_assign(&mut self, o: MinkVec) {
        *self = *self - o;
    }
}

impl Mul<f64> for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn mul(self, s: f64) -> MinkVec {
        MinkVec::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<MinkVec> for f64 {
    type Output = MinkVec;
    #[inline]
    fn mul(self, v: MinkVec) -> MinkVec {
        v * self
    }
}

impl Neg for MinkVec {
    type Output = MinkVec;
    #[inline]
    fn neg(self) -> MinkVec {
        MinkVec::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Index<usize> for MinkVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x1,
            1 => &self.x2,
            2 => &self.x3,
            _ => panic!("MinkVec index {i} out of range"),
        }
    }
}

/// Row-major 3x3 matrix acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkMatrix(pub [[f64; 3]; 3]);

impl MinkMatrix {
    pub const IDENTITY: MinkMatrix =
        MinkMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Matrix whose rows are the given vectors.
    pub fn from_rows(r: [MinkVec; 3]) -> Self {
        MinkMatrix([r[0].to_array(), r[1].to_array(), r[2].to_array()])
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(c: [MinkVec; 3]) -> Self {
        MinkMatrix::from_rows(c).transpose()
    }

    pub fn row(&self, i: usize) -> MinkVec {
        MinkVec::from_array(self.0[i])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        MinkMatrix([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn apply(&self, v: MinkVec) -> MinkVec {
        let m = &self.0;
        MinkVec::new(
            m[0][0] * v.x1 + m[0][1] * v.x2 + m[0][2] * v.x3,
            m[1][0] * v.x1 + m[1][1] * v.x2 + m[1][2] * v.x3,
            m[2][0] * v.x1 + m[2][1] * v.x2 + m[2][2] * v.x3,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|x| *x *= s);
        MinkMatrix(out)
    }

    pub fn add(&self, o: &MinkMatrix) -> Self {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += o.0[i][j];
            }
        }
        MinkMatrix(out)
    }

    /// Inverse of a Lorentz matrix: `J Mᵀ J` with `J = diag(-1, 1, 1)`.
    pub fn lorentz_inverse(&self) -> Self {
        let mut t = self.transpose().0;
        for (i, row) in t.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let si = if i == 0 { -1.0 } else { 1.0 };
                let sj = if j == 0 { -1.0 } else { 1.0 };
                *x *= si * sj;
            }
        }
        MinkMatrix(t)
    }

    pub fn max_abs_diff(&self, o: &MinkMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(o.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for MinkMatrix {
    type Output = MinkMatrix;
    fn mul(self, o: MinkMatrix) -> MinkMatrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        MinkMatrix(out)
    }
}

impl Mul<MinkVec> for MinkMatrix {
    type Output = MinkVec;
    fn mul(self, v: MinkVec) -> MinkVec {
        self.apply(v)
    }
}

/// The so(2,1) generator `v ↦ axis ∧ v`.
pub fn generator(axis: MinkVec) -> MinkMatrix {
    let u = axis;
    MinkMatrix([[0.0, u.x3, -u.x2], [u.x3, 0.0, -u.x1], [-u.x2, u.x1, 0.0]])
}

/// `exp(angle · K)` with `K v = axis ∧ v`.
///
/// A time-like axis generates circular rotations (`K^3 = -K`), a space-like
/// axis hyperbolic ones (`K^3 = K`), so the exponential truncates to
/// `I + f(angle) K + g(angle) K^2` in both cases. Non-unit axes are normalized.
pub fn lorentz_rotation(axis: MinkVec, angle: f64) -> Result<MinkMatrix> {
    let q = axis.norm_sq();
    if q.abs() <= axis.default_tolerance() {
        return Err(Error::LightLikeAxis);
    }
    let unit = axis * (1.0 / q.abs().sqrt());
    let k = generator(unit);
    let k2 = k * k;
    let (f, g) = if q < 0.0 {
        (angle.sin(), 1.0 - angle.cos())
    } else {
        (angle.sinh(), angle.cosh() - 1.0)
    };
    Ok(MinkMatrix::IDENTITY.add(&k.scale(f)).add(&k2.scale(g)))
}

/// Reflection through the hyperplane ∘-orthogonal to a non-null `w`.
pub fn reflection(w: MinkVec) -> MinkMatrix {
    let ww = w.norm_sq();
    let jw = [-w.x1, w.x2, w.x3];
    let wa = w.to_array();
    let mut m = MinkMatrix::IDENTITY.0;
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x -= 2.0 * wa[i] * jw[j] / ww;
        }
    }
    MinkMatrix(m)
}

/// The minimal proper orthochronous Lorentz transformation taking the unit
/// vector `from` to the unit vector `to` (same causal class), acting as the
/// identity on the complement of their span. Built as a product of two
/// reflections.
pub fn rotation_taking(from: MinkVec, to: MinkVec) -> Result<MinkMatrix> {
    let a = from.unit().ok_or(Error::DegenerateAxis)?;
    let b = to.unit().ok_or(Error::DegenerateAxis)?;
    let sum = a + b;
    if sum.norm_sq().abs() <= 1e-14 * (1.0 + sum.euclid_norm_sq()) {
        return Err(Error::DegenerateAxis);
    }
    Ok(reflection(sum) * reflection(a))
}

/// Lorentz Gram-Schmidt on a frame whose rows are (T, e1, e2): T on H^2,
/// e1 and e2 unit space-like and mutually orthogonal.
pub fn orthonormalize_frame(f: &MinkMatrix) -> Result<MinkMatrix> {
    let t = f.row(0).renormalize_h2()?;
    let mut e1 = f.row(1);
    e1 += t * e1.dot(t);
    let e1 = e1 * (1.0 / e1.norm_sq().sqrt());
    let mut e2 = f.row(2);
    e2 += t * e2.dot(t);
    e2 -= e1 * e2.dot(e1);
    let e2 = e2 * (1.0 / e2.norm_sq().sqrt());
    Ok(MinkMatrix::from_rows([t, e1, e2]))
}
