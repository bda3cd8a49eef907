//! Compact Lie groups U(1) and SU(2) with their algebras.
//!
//! U(1) elements are angles in (−π, π]; SU(2) elements are unit quaternions,
//! renormalized after every product (drift is the dominant numerical risk in
//! long holonomy words). Algebra elements are coordinates in an orthonormal
//! basis for the Ad-invariant inner product; for su(2) this is the basis
//! iσ_k/2 under ⟨X,Y⟩ = −2·tr(XY), which makes the quaternion exponential
//! exp(X) = cos|X| + sin|X|·X̂ and puts the antipode −1 at |X| = π.

use rand::Rng;
use std::fmt;

/// Distance from the antipode set below which `log_checked` signals.
pub const CUT_LOCUS_TOL: f64 = 1e-8;

/// Signalled when a logarithm is taken within [`CUT_LOCUS_TOL`] of the
/// antipode set {x : −1 ∈ σ(x)}, where the principal branch is unstable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutLocus;

impl fmt::Display for CutLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "logarithm taken within {CUT_LOCUS_TOL:e} of the cut locus")
    }
}

impl std::error::Error for CutLocus {}

/// Lie algebra vector in orthonormal coordinates.
pub trait AlgebraVector: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    const DIM: usize;

    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn neg(self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn dot(self, other: Self) -> f64;
    fn coords(self) -> Vec<f64>;
    fn from_coords(c: &[f64]) -> Self;

    fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }
    fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl AlgebraVector for f64 {
    const DIM: usize = 1;

    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn neg(self) -> Self {
        -self
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn dot(self, other: Self) -> f64 {
        self * other
    }
    fn coords(self) -> Vec<f64> {
        vec![self]
    }
    fn from_coords(c: &[f64]) -> Self {
        c[0]
    }
}

impl AlgebraVector for [f64; 3] {
    const DIM: usize = 3;

    fn zero() -> Self {
        [0.0; 3]
    }
    fn add(self, o: Self) -> Self {
        [self[0] + o[0], self[1] + o[1], self[2] + o[2]]
    }
    fn neg(self) -> Self {
        [-self[0], -self[1], -self[2]]
    }
    fn scale(self, c: f64) -> Self {
        [self[0] * c, self[1] * c, self[2] * c]
    }
    fn dot(self, o: Self) -> f64 {
        self[0] * o[0] + self[1] * o[1] + self[2] * o[2]
    }
    fn coords(self) -> Vec<f64> {
        self.to_vec()
    }
    fn from_coords(c: &[f64]) -> Self {
        [c[0], c[1], c[2]]
    }
}

/// A compact connected Lie group with exponential, principal logarithm,
/// adjoint action and Haar sampling. All operations are pure.
pub trait LieGroup: Copy + fmt::Debug + Send + Sync + 'static {
    type Point: Copy + PartialEq + fmt::Debug + Send + Sync;
    type Vector: AlgebraVector;

    /// Config tag ("u1", "su2"); also used in snapshot headers.
    const NAME: &'static str;
    const SIMPLY_CONNECTED: bool;
    /// Floats per serialized group element (1 for U(1), 4 for SU(2)).
    const POINT_FLOATS: usize;
    /// Dimension of the fundamental representation (Re tr bounds, actions).
    const FUND_DIM: f64;

    fn identity() -> Self::Point;
    fn mul(a: Self::Point, b: Self::Point) -> Self::Point;
    fn inverse(a: Self::Point) -> Self::Point;
    fn exp(v: Self::Vector) -> Self::Point;
    /// Principal logarithm; total. At the antipode returns the representative
    /// with first algebra coordinate ≥ 0.
    fn log(p: Self::Point) -> Self::Vector;
    fn near_cut_locus(p: Self::Point) -> bool;
    fn adjoint(y: Self::Point, v: Self::Vector) -> Self::Vector;
    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Self::Point;
    /// Re tr in the fundamental representation.
    fn re_trace(p: Self::Point) -> f64;
    fn point_coords(p: Self::Point) -> Vec<f64>;
    fn point_from_coords(c: &[f64]) -> Self::Point;

    fn log_checked(p: Self::Point) -> Result<Self::Vector, CutLocus> {
        if Self::near_cut_locus(p) {
            Err(CutLocus)
        } else {
            Ok(Self::log(p))
        }
    }

    /// Geodesic distance |log(a⁻¹b)|.
    fn distance(a: Self::Point, b: Self::Point) -> f64 {
        Self::log(Self::mul(Self::inverse(a), b)).norm()
    }
}

/// Reduce an angle into (−π, π].
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t % std::f64::consts::TAU;
    if x > std::f64::consts::PI {
        x -= std::f64::consts::TAU;
    } else if x <= -std::f64::consts::PI {
        x += std::f64::consts::TAU;
    }
    x
}

/// The circle group; points are angles in (−π, π].
#[derive(Debug, Clone, Copy)]
pub struct U1;

impl LieGroup for U1 {
    type Point = f64;
    type Vector = f64;

    const NAME: &'static str = "u1";
    const SIMPLY_CONNECTED: bool = false;
    const POINT_FLOATS: usize = 1;
    const FUND_DIM: f64 = 1.0;

    fn identity() -> f64 {
        0.0
    }
    fn mul(a: f64, b: f64) -> f64 {
        wrap_angle(a + b)
    }
    fn inverse(a: f64) -> f64 {
        wrap_angle(-a)
    }
    fn exp(v: f64) -> f64 {
        wrap_angle(v)
    }
    fn log(p: f64) -> f64 {
        p
    }
    fn near_cut_locus(p: f64) -> bool {
        std::f64::consts::PI - p.abs() < CUT_LOCUS_TOL
    }
    fn adjoint(_y: f64, v: f64) -> f64 {
        v
    }
    fn haar<R: Rng + ?Sized>(rng: &mut R) -> f64 {
        wrap_angle(std::f64::consts::PI * (2.0 * rng.random::<f64>() - 1.0))
    }
    fn re_trace(p: f64) -> f64 {
        p.cos()
    }
    fn point_coords(p: f64) -> Vec<f64> {
        vec![p]
    }
    fn point_from_coords(c: &[f64]) -> f64 {
        wrap_angle(c[0])
    }
}

/// Unit quaternion a + bi + cj + dk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quat {
    pub const ONE: Quat = Quat { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };

    fn normalized(self) -> Quat {
        let n = (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt();
        Quat { a: self.a / n, b: self.b / n, c: self.c / n, d: self.d / n }
    }

    fn raw_mul(self, o: Quat) -> Quat {
        Quat {
            a: self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            b: self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            c: self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            d: self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        }
    }
}

/// The special unitary group SU(2) as unit quaternions.
#[derive(Debug, Clone, Copy)]
pub struct Su2;

impl LieGroup for Su2 {
    type Point = Quat;
    type Vector = [f64; 3];

    const NAME: &'static str = "su2";
    const SIMPLY_CONNECTED: bool = true;
    const POINT_FLOATS: usize = 4;
    const FUND_DIM: f64 = 2.0;

    fn identity() -> Quat {
        Quat::ONE
    }

    fn mul(a: Quat, b: Quat) -> Quat {
        a.raw_mul(b).normalized()
    }

    fn inverse(a: Quat) -> Quat {
        Quat { a: a.a, b: -a.b, c: -a.c, d: -a.d }
    }

    fn exp(v: [f64; 3]) -> Quat {
        let phi = v.norm();
        // sin(φ)/φ via series below the rounding threshold.
        let s = if phi < 1e-8 { 1.0 - phi * phi / 6.0 } else { phi.sin() / phi };
        Quat { a: phi.cos(), b: v[0] * s, c: v[1] * s, d: v[2] * s }.normalized()
    }

    fn log(p: Quat) -> [f64; 3] {
        let vn = (p.b * p.b + p.c * p.c + p.d * p.d).sqrt();
        if vn == 0.0 {
            // Exactly ±1: at the antipode return the representative with
            // first coordinate ≥ 0.
            return if p.a >= 0.0 { [0.0; 3] } else { [std::f64::consts::PI, 0.0, 0.0] };
        }
        let phi = vn.atan2(p.a);
        let s = phi / vn;
        [p.b * s, p.c * s, p.d * s]
    }

    fn near_cut_locus(p: Quat) -> bool {
        let vn = (p.b * p.b + p.c * p.c + p.d * p.d).sqrt();
        std::f64::consts::PI - vn.atan2(p.a) < CUT_LOCUS_TOL
    }

    fn adjoint(y: Quat, v: [f64; 3]) -> [f64; 3] {
        let q = Quat { a: 0.0, b: v[0], c: v[1], d: v[2] };
        let r = y.raw_mul(q).raw_mul(Self::inverse(y));
        [r.b, r.c, r.d]
    }

    fn haar<R: Rng + ?Sized>(rng: &mut R) -> Quat {
        loop {
            let q = Quat {
                a: rng.sample::<f64, _>(rand_distr::StandardNormal),
                b: rng.sample::<f64, _>(rand_distr::StandardNormal),
                c: rng.sample::<f64, _>(rand_distr::StandardNormal),
                d: rng.sample::<f64, _>(rand_distr::StandardNormal),
            };
            let n2 = q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d;
            if n2 > 1e-12 {
                return q.normalized();
            }
        }
    }

    fn re_trace(p: Quat) -> f64 {
        2.0 * p.a
    }

    fn point_coords(p: Quat) -> Vec<f64> {
        vec![p.a, p.b, p.c, p.d]
    }

    fn point_from_coords(c: &[f64]) -> Quat {
        Quat { a: c[0], b: c[1], c: c[2], d: c[3] }
    }
}

/// |log(e^{X_1}···e^{X_n}) − Σ X_i|, the measured defect against the
/// Campbell-Baker-Hausdorff bound C·Σ|X_i|².
pub fn cbh_defect<G: LieGroup>(xs: &[G::Vector]) -> Result<f64, CutLocus> {
    assert!(!xs.is_empty(), "cbh_defect needs at least one input");
    let mut prod = G::identity();
    let mut sum = G::Vector::zero();
    for &x in xs {
        prod = G::mul(prod, G::exp(x));
        sum = sum.add(x);
    }
    Ok(G::log_checked(prod)?.sub(sum).norm())
}
