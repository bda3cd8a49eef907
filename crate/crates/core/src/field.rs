//! Gauge fields (group-valued bond configurations), one-forms
//! (algebra-valued bond functions), gauge transforms, and the derived
//! objects: holonomies, segment integrals, and rectangle anti-developments.

use crate::group::{AlgebraVector, CutLocus, LieGroup};
use crate::lattice::{side, Axis, AxisSegment, Bond, Coord, Rect, Scale};

fn bond_slot(n: Scale, axis: Axis, base: Coord) -> usize {
    debug_assert_eq!(base.n, n);
    axis.index() << (2 * n) | base.index()
}

/// Group-valued function on positive bonds of Λ_N; U(b⁻¹) = U(b)⁻¹.
#[derive(Debug, Clone)]
pub struct GaugeField<G: LieGroup> {
    pub n: Scale,
    values: Vec<G::Point>,
}

impl<G: LieGroup> GaugeField<G> {
    pub fn identity(n: Scale) -> GaugeField<G> {
        GaugeField { n, values: vec![G::identity(); 2 << (2 * n)] }
    }

    pub fn from_fn(n: Scale, mut f: impl FnMut(Bond) -> G::Point) -> GaugeField<G> {
        let mut u = GaugeField::<G>::identity(n);
        for (axis, base) in positive_bonds(n) {
            u.values[bond_slot(n, axis, base)] = f(Bond::positive(base, axis));
        }
        u
    }

    pub fn get(&self, b: Bond) -> G::Point {
        let c = b.canonical();
        let v = self.values[bond_slot(self.n, c.axis, c.base)].clone();
        if b.positive {
            v
        } else {
            G::inverse(v)
        }
    }

    pub fn set(&mut self, b: Bond, v: G::Point) {
        let c = b.canonical();
        self.values[bond_slot(self.n, c.axis, c.base)] = if b.positive { v } else { G::inverse(v) };
    }

    /// Ordered product of bond values along a word of bonds.
    pub fn holonomy(&self, word: &[Bond]) -> G::Point {
        word.iter().fold(G::identity(), |acc, &b| G::mul(acc, self.get(b)))
    }

    /// Holonomy around the rectangle boundary, anticlockwise from its origin.
    pub fn rect_holonomy(&self, r: Rect) -> G::Point {
        self.holonomy(&r.boundary_word())
    }

    /// Plaquette holonomy anticlockwise starting at `base`, allocation free.
    /// Differs from `rect_holonomy` by a cyclic rotation of the word when
    /// `base` is not the plaquette origin, so only class functions of it are
    /// convention independent; the samplers need nothing more.
    pub fn plaquette_holonomy(&self, base: Coord) -> G::Point {
        let v = G::mul(
            self.get(Bond::positive(base, Axis::E1)),
            self.get(Bond::positive(base.shift(Axis::E1, 1), Axis::E2)),
        );
        let v = G::mul(v, G::inverse(self.get(Bond::positive(base.shift(Axis::E2, 1), Axis::E1))));
        G::mul(v, G::inverse(self.get(Bond::positive(base, Axis::E2))))
    }

    /// Ordered product along a segment's bonds, positively oriented.
    pub fn axis_holonomy(&self, l: AxisSegment) -> G::Point {
        l.bonds().fold(G::identity(), |acc, b| G::mul(acc, self.get(b)))
    }

    /// Restriction to Λ_{N−1}: each coarse bond value is the product of the
    /// two fine bonds covering it.
    pub fn coarsen(&self) -> GaugeField<G> {
        assert!(self.n >= 1);
        let m = self.n - 1;
        GaugeField::from_fn(m, |b| {
            let fine = Coord::new(self.n, 2 * b.base.x, 2 * b.base.y);
            let mid = fine.shift(b.axis, 1);
            G::mul(self.get(Bond::positive(fine, b.axis)), self.get(Bond::positive(mid, b.axis)))
        })
    }

    /// U^g(x → y) = g(x) U(x → y) g(y)⁻¹.
    pub fn apply_gauge(&self, g: &GaugeTransform<G>) -> GaugeField<G> {
        assert_eq!(self.n, g.n);
        GaugeField::from_fn(self.n, |b| {
            let v = G::mul(g.get(b.start()), self.get(b));
            G::mul(v, G::inverse(g.get(b.end())))
        })
    }
}

/// Algebra-valued function on positive bonds; A(b⁻¹) = −A(b).
#[derive(Debug, Clone)]
pub struct OneForm<G: LieGroup> {
    pub n: Scale,
    values: Vec<G::Vector>,
}

impl<G: LieGroup> OneForm<G> {
    pub fn zero(n: Scale) -> OneForm<G> {
        OneForm { n, values: vec![G::Vector::zero(); 2 << (2 * n)] }
    }

    pub fn from_fn(n: Scale, mut f: impl FnMut(Bond) -> G::Vector) -> OneForm<G> {
        let mut a = OneForm::<G>::zero(n);
        for (axis, base) in positive_bonds(n) {
            a.values[bond_slot(n, axis, base)] = f(Bond::positive(base, axis));
        }
        a
    }

    /// Principal logarithm of every bond; fails at the cut locus.
    pub fn log_of(u: &GaugeField<G>) -> Result<OneForm<G>, CutLocus> {
        let mut a = OneForm::<G>::zero(u.n);
        for (axis, base) in positive_bonds(u.n) {
            a.values[bond_slot(u.n, axis, base)] = G::log_checked(u.get(Bond::positive(base, axis)))?;
        }
        Ok(a)
    }

    pub fn get(&self, b: Bond) -> G::Vector {
        let c = b.canonical();
        let v = self.values[bond_slot(self.n, c.axis, c.base)];
        if b.positive {
            v
        } else {
            v.neg()
        }
    }

    pub fn set(&mut self, b: Bond, v: G::Vector) {
        let c = b.canonical();
        self.values[bond_slot(self.n, c.axis, c.base)] = if b.positive { v } else { v.neg() };
    }

    /// Bond-wise exponential.
    pub fn exp(&self) -> GaugeField<G> {
        GaugeField::from_fn(self.n, |b| G::exp(self.get(b)))
    }

    pub fn max_bond_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// A(ℓ): sum of the one-form over the segment's bonds, left to right.
    pub fn segment_integral(&self, l: AxisSegment) -> G::Vector {
        l.bonds().fold(G::Vector::zero(), |acc, b| acc.add(self.get(b)))
    }
}

/// Group-valued function on vertices.
#[derive(Debug, Clone)]
pub struct GaugeTransform<G: LieGroup> {
    pub n: Scale,
    values: Vec<G::Point>,
}

impl<G: LieGroup> GaugeTransform<G> {
    pub fn identity(n: Scale) -> GaugeTransform<G> {
        GaugeTransform { n, values: vec![G::identity(); 1 << (2 * n)] }
    }

    pub fn from_fn(n: Scale, mut f: impl FnMut(Coord) -> G::Point) -> GaugeTransform<G> {
        let mut g = GaugeTransform::<G>::identity(n);
        let s = side(n);
        for y in 0..s {
            for x in 0..s {
                let v = Coord { n, x, y };
                g.values[v.index()] = f(v);
            }
        }
        g
    }

    pub fn get(&self, v: Coord) -> G::Point {
        self.values[v.index()].clone()
    }

    pub fn set(&mut self, v: Coord, p: G::Point) {
        self.values[v.index()] = p;
    }

    /// Pointwise product (h·g)(x) = h(x)·g(x); applying it equals applying
    /// g first, then h.
    pub fn compose(&self, g: &GaugeTransform<G>) -> GaugeTransform<G> {
        assert_eq!(self.n, g.n);
        GaugeTransform::from_fn(self.n, |v| G::mul(self.get(v), g.get(v)))
    }

    /// Lift to a finer scale, constant on the south-west coarse cell.
    pub fn lift(&self, n: Scale) -> GaugeTransform<G> {
        assert!(n >= self.n);
        let shift = n - self.n;
        GaugeTransform::from_fn(n, |v| self.get(Coord { n: self.n, x: v.x >> shift, y: v.y >> shift }))
    }
}

/// Positive bonds (axis, base) of Λ_N in storage order.
pub fn positive_bonds(n: Scale) -> impl Iterator<Item = (Axis, Coord)> {
    let s = side(n);
    Axis::BOTH
        .into_iter()
        .flat_map(move |axis| (0..s).flat_map(move |y| (0..s).map(move |x| (axis, Coord { n, x, y }))))
}

/// The anti-development of a gauge field over a rectangle: the algebra path
/// X_0 = 0, X_i = X_{i−1} + log(U(∂r_{i−1})⁻¹ U(∂r_i)) over the nested
/// subrectangles r_1 ⊂ … ⊂ r_k of the plaquette chain. All ∂r_i are based
/// at the common origin, so a gauge transform conjugates every increment by
/// the same g(origin) and leaves increment norms unchanged.
#[derive(Debug, Clone)]
pub struct AntiDevelopment<G: LieGroup> {
    pub rect: Rect,
    pub points: Vec<G::Vector>,
}

impl<G: LieGroup> AntiDevelopment<G> {
    pub fn of(u: &GaugeField<G>, r: Rect) -> Result<AntiDevelopment<G>, CutLocus> {
        let mut points = vec![G::Vector::zero()];
        let mut prev = G::identity();
        for (_, sub) in r.plaquette_chain() {
            let hol = u.rect_holonomy(sub);
            let inc = G::log_checked(G::mul(G::inverse(prev), hol))?;
            points.push(points.last().unwrap().add(inc));
            prev = hol;
        }
        Ok(AntiDevelopment { rect: r, points })
    }
}
