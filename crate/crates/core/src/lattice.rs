//! Dyadic lattice geometry on the 2-torus at scale N.
//!
//! Coordinates are integers mod 2^N (never floats), so every geometric
//! predicate is exact. A vertex (i, j) represents (i·2^{−N}, j·2^{−N}).

/// Lattice scale; spacing is 2^{−N}.
pub type Scale = u32;

/// Side length 2^N of the lattice at scale `n`.
pub fn side(n: Scale) -> u32 {
    1u32 << n
}

/// Binary power of q = i·2^{−N}: the smallest k with q = Σ_{j≤k} λ_j 2^{−j},
/// i.e. N minus the number of trailing zero bits of i (0 for i = 0).
pub fn binary_power(i: u32, n: Scale) -> u32 {
    debug_assert!(i < side(n));
    if i == 0 {
        0
    } else {
        n - i.trailing_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    E1,
    E2,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::E1, Axis::E2];

    pub fn perp(self) -> Axis {
        match self {
            Axis::E1 => Axis::E2,
            Axis::E2 => Axis::E1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Axis::E1 => 0,
            Axis::E2 => 1,
        }
    }
}

/// Vertex of Λ_N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub n: Scale,
    pub x: u32,
    pub y: u32,
}

impl Coord {
    pub fn new(n: Scale, x: u32, y: u32) -> Coord {
        let m = side(n) - 1;
        Coord { n, x: x & m, y: y & m }
    }

    /// Shift by `d` lattice steps along `axis`, wrapping mod 2^N.
    pub fn shift(self, axis: Axis, d: i64) -> Coord {
        let s = side(self.n) as i64;
        let w = |v: u32| (((v as i64 + d) % s + s) % s) as u32;
        match axis {
            Axis::E1 => Coord { x: w(self.x), ..self },
            Axis::E2 => Coord { y: w(self.y), ..self },
        }
    }

    pub fn along(self, axis: Axis) -> u32 {
        match axis {
            Axis::E1 => self.x,
            Axis::E2 => self.y,
        }
    }

    /// Flat index y·2^N + x.
    pub fn index(self) -> usize {
        (self.y as usize) << self.n | self.x as usize
    }

    /// Number of coordinates with binary power N (i.e. odd coordinates).
    pub fn new_coord_count(self) -> u32 {
        (self.x & 1) + (self.y & 1)
    }
}

/// Oriented bond. `positive` means base → base + e_axis; otherwise
/// base → base − e_axis (the reversal of the positive bond at base − e_axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bond {
    pub base: Coord,
    pub axis: Axis,
    pub positive: bool,
}

impl Bond {
    pub fn positive(base: Coord, axis: Axis) -> Bond {
        Bond { base, axis, positive: true }
    }

    pub fn start(self) -> Coord {
        self.base
    }

    pub fn end(self) -> Coord {
        self.base.shift(self.axis, if self.positive { 1 } else { -1 })
    }

    pub fn reversal(self) -> Bond {
        Bond { base: self.end(), axis: self.axis, positive: !self.positive }
    }

    /// The positive bond with the same unordered vertex pair.
    pub fn canonical(self) -> Bond {
        if self.positive {
            self
        } else {
            Bond { base: self.base.shift(self.axis, -1), axis: self.axis, positive: true }
        }
    }
}

/// Rectangle with base at its south-west corner and extents (m, n) in units
/// of 2^{−N} along (e_1, e_2); m = 1 or n = 1. The m = n = 1 case is a
/// plaquette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub base: Coord,
    pub ext1: u32,
    pub ext2: u32,
}

impl Rect {
    pub fn new(base: Coord, ext1: u32, ext2: u32) -> Rect {
        assert!(ext1 >= 1 && ext2 >= 1 && (ext1 == 1 || ext2 == 1));
        assert!(ext1 < side(base.n) && ext2 < side(base.n), "full-wrap rectangles excluded");
        Rect { base, ext1, ext2 }
    }

    pub fn plaquette(base: Coord) -> Rect {
        Rect { base, ext1: 1, ext2: 1 }
    }

    pub fn is_plaquette(self) -> bool {
        self.ext1 == 1 && self.ext2 == 1
    }

    /// Area m·n·2^{−2N}.
    pub fn area(self) -> f64 {
        let h = 0.5f64.powi(self.base.n as i32);
        (self.ext1 as f64 * h) * (self.ext2 as f64 * h)
    }

    pub fn plaquette_count(self) -> u32 {
        self.ext1 * self.ext2
    }

    /// Origin: the corner of the distinguished plaquette (the one at the
    /// rectangle base) whose both coordinates have binary power ≤ N−1.
    /// Since binary power ≤ N−1 means "even coordinate", this is the unique
    /// corner with both coordinates even.
    pub fn origin(self) -> Coord {
        let b = self.base;
        debug_assert!(b.n >= 1);
        let x = if b.x & 1 == 0 { b.x } else { b.shift(Axis::E1, 1).x };
        let y = if b.y & 1 == 0 { b.y } else { b.shift(Axis::E2, 1).y };
        Coord { n: b.n, x, y }
    }

    /// Boundary bonds traversed anti-clockwise starting from the origin.
    pub fn boundary_word(self) -> Vec<Bond> {
        let (m, n) = (self.ext1 as i64, self.ext2 as i64);
        let mut word = Vec::with_capacity(2 * (m + n) as usize);
        for s in 0..m {
            word.push(Bond::positive(self.base.shift(Axis::E1, s), Axis::E1));
        }
        let se = self.base.shift(Axis::E1, m);
        for s in 0..n {
            word.push(Bond::positive(se.shift(Axis::E2, s), Axis::E2));
        }
        let ne = se.shift(Axis::E2, n);
        for s in 0..m {
            word.push(Bond { base: ne.shift(Axis::E1, -s), axis: Axis::E1, positive: false });
        }
        let nw = self.base.shift(Axis::E2, n);
        for s in 0..n {
            word.push(Bond { base: nw.shift(Axis::E2, -s), axis: Axis::E2, positive: false });
        }
        let z = self.origin();
        let k = word.iter().position(|b| b.start() == z).expect("origin lies on the boundary");
        word.rotate_left(k);
        word
    }

    /// The unique plaquette ordering p_1..p_k with neither p_1 − 2^{−N}e_1
    /// nor p_1 − 2^{−N}e_2 contained in the rectangle and consecutive
    /// boundaries sharing a bond, together with the nested subrectangles
    /// r_i built from p_1..p_i.
    pub fn plaquette_chain(self) -> Vec<(Rect, Rect)> {
        let long_axis = if self.ext1 >= self.ext2 { Axis::E1 } else { Axis::E2 };
        let k = self.plaquette_count() as i64;
        (1..=k)
            .map(|i| {
                let p = Rect::plaquette(self.base.shift(long_axis, i - 1));
                let r = match long_axis {
                    Axis::E1 => Rect { base: self.base, ext1: i as u32, ext2: 1 },
                    Axis::E2 => Rect { base: self.base, ext1: 1, ext2: i as u32 },
                };
                (p, r)
            })
            .collect()
    }

    /// Vertex set of the closed rectangle.
    pub fn vertices(self) -> Vec<Coord> {
        let mut v = Vec::new();
        for i in 0..=self.ext1 as i64 {
            for j in 0..=self.ext2 as i64 {
                v.push(self.base.shift(Axis::E1, i).shift(Axis::E2, j));
            }
        }
        v
    }
}

/// All plaquettes of Λ_N.
pub fn plaquettes(n: Scale) -> impl Iterator<Item = Rect> {
    let s = side(n);
    (0..s).flat_map(move |y| (0..s).map(move |x| Rect::plaquette(Coord { n, x, y })))
}

/// All rectangles (1×k and k×1, 1 ≤ k < 2^N) of Λ_N, plaquettes included once.
pub fn rectangles(n: Scale) -> impl Iterator<Item = Rect> {
    let s = side(n);
    let horizontals = (0..s).flat_map(move |y| {
        (0..s).flat_map(move |x| (1..s).map(move |m| Rect { base: Coord { n, x, y }, ext1: m, ext2: 1 }))
    });
    let verticals = (0..s).flat_map(move |y| {
        (0..s).flat_map(move |x| (2..s).map(move |m| Rect { base: Coord { n, x, y }, ext1: 1, ext2: m }))
    });
    horizontals.chain(verticals)
}

/// Vertices of Λ_N^1 \ Λ_N^0: exactly one coordinate of binary power N.
/// Each lies at the midpoint of one coarse bond, whose direction is returned.
pub fn level1_vertices(n: Scale) -> Vec<(Coord, Axis)> {
    assert!(n >= 1);
    let s = side(n);
    let mut out = Vec::new();
    for y in 0..s {
        for x in 0..s {
            match (x & 1, y & 1) {
                (1, 0) => out.push((Coord { n, x, y }, Axis::E1)),
                (0, 1) => out.push((Coord { n, x, y }, Axis::E2)),
                _ => {}
            }
        }
    }
    out
}

/// Vertices of Λ_N^2 \ Λ_N^1: both coordinates of binary power N.
pub fn level2_vertices(n: Scale) -> Vec<Coord> {
    assert!(n >= 1);
    let s = side(n);
    let mut out = Vec::new();
    for y in (1..s).step_by(2) {
        for x in (1..s).step_by(2) {
            out.push(Coord { n, x, y });
        }
    }
    out
}

/// Axis-aligned lattice segment: an element of X^{(N)}. `offset` is the
/// perpendicular coordinate, the segment spans `len` bonds starting at
/// `start` along `axis` (wrapping). len = 0 is a point, len = 2^N the full
/// wrap (canonical start 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxisSegment {
    pub axis: Axis,
    pub n: Scale,
    pub offset: u32,
    pub start: u32,
    pub len: u32,
}

impl AxisSegment {
    pub fn new(axis: Axis, n: Scale, offset: u32, start: u32, len: u32) -> AxisSegment {
        assert!(len <= side(n) && offset < side(n) && start < side(n));
        AxisSegment { axis, n, offset, start, len }
    }

    /// |ℓ| = len·2^{−N}.
    pub fn length(self) -> f64 {
        self.len as f64 * 0.5f64.powi(self.n as i32)
    }

    fn vertex_at(self, t: i64) -> Coord {
        let base = match self.axis {
            Axis::E1 => Coord::new(self.n, self.start, self.offset),
            Axis::E2 => Coord::new(self.n, self.offset, self.start),
        };
        base.shift(self.axis, t)
    }

    /// The segment's bonds in order (positively oriented).
    pub fn bonds(self) -> impl Iterator<Item = Bond> {
        (0..self.len as i64).map(move |t| Bond::positive(self.vertex_at(t), self.axis))
    }

    /// The len+1 vertices of the closed segment.
    pub fn vertices(self) -> impl Iterator<Item = Coord> {
        (0..=self.len as i64).map(move |t| self.vertex_at(t))
    }
}

/// Canonical enumeration of X^{(N)} with |ℓ| > 0: all (offset, start, len)
/// with 1 ≤ len < 2^N, plus the full wrap len = 2^N at start = 0 only
/// (full wraps with different starts are the same point set).
pub fn segments(n: Scale) -> impl Iterator<Item = AxisSegment> {
    let s = side(n);
    Axis::BOTH.into_iter().flat_map(move |axis| {
        (0..s).flat_map(move |offset| {
            (1..=s).flat_map(move |len| {
                let starts = if len == s { 0..1 } else { 0..s };
                starts.map(move |start| AxisSegment { axis, n, offset, start, len })
            })
        })
    })
}

/// Minimal torus distance between integer coordinates at scale `n`, in
/// lattice units.
pub fn torus_dist_units(a: u32, b: u32, n: Scale) -> u32 {
    let s = side(n);
    let d = (a as i64 - b as i64).rem_euclid(s as i64) as u32;
    d.min(s - d)
}

/// Hausdorff distance between two segments (as point sets on the torus).
///
/// The maximum of the point-to-segment distance over a segment is attained
/// at a lattice vertex: per coordinate the torus distance is piecewise
/// linear with breakpoints at lattice-aligned positions (endpoints and
/// their antipodes), and the Euclidean norm of two such functions is convex
/// on every linear piece.
pub fn hausdorff_distance(l: AxisSegment, m: AxisSegment) -> f64 {
    assert_eq!(l.n, m.n);
    let h = 0.5f64.powi(l.n as i32);
    let sup = |a: AxisSegment, b: AxisSegment| -> u64 {
        // Max over vertices of a of the squared distance (in lattice units)
        // to b; exact in integers until the final square root.
        a.vertices()
            .map(|v| {
                let perp = torus_dist_units(v.along(b.axis.perp()), b.offset, b.n);
                let c = v.along(b.axis);
                let rel = (c as i64 - b.start as i64).rem_euclid(side(b.n) as i64) as u32;
                let par = if rel <= b.len {
                    0
                } else {
                    torus_dist_units(c, b.start, b.n).min(torus_dist_units(c, (b.start + b.len) & (side(b.n) - 1), b.n))
                };
                (perp as u64).pow(2) + (par as u64).pow(2)
            })
            .max()
            .unwrap()
    };
    ((sup(l, m).max(sup(m, l))) as f64).sqrt() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn binary_power_examples() {
        assert_eq!(binary_power(0, 3), 0);
        assert_eq!(binary_power(2, 2), 1); // q = 1/2
        assert_eq!(binary_power(3, 3), 3); // q = 3/8 = 2^{-2} + 2^{-3}
        assert_eq!(binary_power(4, 3), 1); // q = 1/2
        assert_eq!(binary_power(6, 3), 2); // q = 3/4
    }

    #[test]
    fn origin_examples() {
        // N=2, plaquette at base (1/4, 1/4): origin (1/2, 1/2).
        let p = Rect::plaquette(Coord::new(2, 1, 1));
        assert_eq!(p.origin(), Coord::new(2, 2, 2));
        // N=1, plaquette at (0,0): origin (0,0).
        let p = Rect::plaquette(Coord::new(1, 0, 0));
        assert_eq!(p.origin(), Coord::new(1, 0, 0));
    }

    #[test]
    fn origin_unique_even_corner() {
        for n in 1..=4 {
            for p in plaquettes(n) {
                let corners = p.vertices();
                let even: Vec<_> = corners
                    .iter()
                    .filter(|c| {
                        binary_power(c.x, n) <= n.saturating_sub(1)
                            && binary_power(c.y, n) <= n.saturating_sub(1)
                    })
                    .collect();
                assert_eq!(even.len(), 1);
                assert_eq!(*even[0], p.origin());
            }
        }
    }

    #[test]
    fn boundary_word_closes() {
        for n in 1..=3 {
            for r in rectangles(n) {
                let w = r.boundary_word();
                assert_eq!(w.len() as u32, 2 * (r.ext1 + r.ext2));
                assert_eq!(w[0].start(), r.origin());
                for pair in w.windows(2) {
                    assert_eq!(pair[0].end(), pair[1].start());
                }
                assert_eq!(w.last().unwrap().end(), w[0].start());
            }
        }
    }

    #[test]
    fn boundary_word_six_bonds() {
        // N=2, r = ((0,0), 2·2^{−2}e_1, 2^{−2}e_2): 6 bonds from the origin.
        let r = Rect::new(Coord::new(2, 0, 0), 2, 1);
        let w = r.boundary_word();
        assert_eq!(w.len(), 6);
        assert_eq!(w[0].start(), r.origin());
        assert_eq!(r.origin(), Coord::new(2, 0, 0));
    }

    #[test]
    fn clockwise_is_reversed_inverse() {
        let r = Rect::new(Coord::new(3, 5, 2), 4, 1);
        let w = r.boundary_word();
        let mut rev: Vec<Bond> = w.iter().rev().map(|b| b.reversal()).collect();
        // Reversed-inverted word traverses clockwise; it must again be a
        // closed chain of the same unordered bonds.
        for pair in rev.windows(2) {
            assert_eq!(pair[0].end(), pair[1].start());
        }
        let set_a: BTreeSet<Bond> = w.iter().map(|b| b.canonical()).collect();
        let set_b: BTreeSet<Bond> = rev.drain(..).map(|b| b.canonical()).collect();
        assert_eq!(set_a, set_b);
    }

    #[test]
    fn chain_example() {
        let r = Rect::new(Coord::new(2, 0, 0), 2, 1);
        let chain = r.plaquette_chain();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0].0, Rect::plaquette(Coord::new(2, 0, 0)));
        assert_eq!(chain[1].0, Rect::plaquette(Coord::new(2, 1, 0)));
        assert_eq!(chain[1].1, r);
    }

    /// Plaquettes p, q (as subsets of r) sharing exactly one unordered bond.
    fn share_bond(p: Rect, q: Rect) -> bool {
        let bw: BTreeSet<Bond> = p.boundary_word().iter().map(|b| b.canonical()).collect();
        let qw: BTreeSet<Bond> = q.boundary_word().iter().map(|b| b.canonical()).collect();
        bw.intersection(&qw).count() == 1
    }

    fn contained_in(p: Rect, r: Rect) -> bool {
        // Plaquette p ⊂ r, with wrapping.
        let s = side(r.base.n) as i64;
        let dx = (p.base.x as i64 - r.base.x as i64).rem_euclid(s);
        let dy = (p.base.y as i64 - r.base.y as i64).rem_euclid(s);
        dx < r.ext1 as i64 && dy < r.ext2 as i64
    }

    #[test]
    fn chain_is_the_unique_valid_ordering() {
        // Backtracking enumeration of all orderings satisfying the two
        // defining conditions; exactly one must exist, and it must match.
        fn count_orderings(r: Rect, plaqs: &[Rect], prefix: &mut Vec<Rect>, total: &mut usize, found: &mut Vec<Rect>) {
            if prefix.len() == plaqs.len() {
                *total += 1;
                if *total == 1 {
                    *found = prefix.clone();
                }
                return;
            }
            for &p in plaqs {
                if prefix.contains(&p) {
                    continue;
                }
                let ok = if prefix.is_empty() {
                    let left = Rect::plaquette(p.base.shift(Axis::E1, -1));
                    let below = Rect::plaquette(p.base.shift(Axis::E2, -1));
                    !contained_in(left, r) && !contained_in(below, r)
                } else {
                    share_bond(*prefix.last().unwrap(), p)
                };
                if ok {
                    prefix.push(p);
                    count_orderings(r, plaqs, prefix, total, found);
                    prefix.pop();
                }
            }
        }

        for n in 1..=4 {
            for r in rectangles(n) {
                let chain: Vec<Rect> = r.plaquette_chain().iter().map(|c| c.0).collect();
                let plaqs: Vec<Rect> = plaquettes(n).filter(|p| contained_in(*p, r)).collect();
                assert_eq!(plaqs.len() as u32, r.plaquette_count());
                let (mut total, mut found) = (0usize, Vec::new());
                count_orderings(r, &plaqs, &mut Vec::new(), &mut total, &mut found);
                assert_eq!(total, 1, "rectangle {r:?} has {total} valid orderings");
                assert_eq!(found, chain);
            }
        }
    }

    #[test]
    fn chain_consecutive_share_bond() {
        for n in 2..=4 {
            for r in rectangles(n) {
                let chain = r.plaquette_chain();
                for pair in chain.windows(2) {
                    assert!(share_bond(pair[0].0, pair[1].0));
                }
            }
        }
    }

    #[test]
    fn every_bond_in_two_plaquettes() {
        for n in 1..=3 {
            let mut count = std::collections::HashMap::new();
            for p in plaquettes(n) {
                for b in p.boundary_word() {
                    *count.entry(b.canonical()).or_insert(0) += 1;
                }
            }
            assert_eq!(count.len(), 2 * (side(n) as usize).pow(2));
            assert!(count.values().all(|&c| c == 2));
        }
    }

    #[test]
    fn refine_level_counts() {
        for n in 1..=4 {
            let s = side(n) as usize;
            assert_eq!(level1_vertices(n).len(), s * s / 2);
            assert_eq!(level2_vertices(n).len(), s * s / 4);
            // Each level-1 vertex is the midpoint of exactly one coarse bond.
            for (v, axis) in level1_vertices(n) {
                assert_eq!(v.along(axis) & 1, 1);
                assert_eq!(v.along(axis.perp()) & 1, 0);
            }
        }
    }

    #[test]
    fn segment_count_matches_dedup() {
        for n in 1..=4 {
            let s = side(n) as usize;
            let all: Vec<AxisSegment> = segments(n).collect();
            assert_eq!(all.len(), 2 * s * (s * (s - 1) + 1));
            // Canonical enumeration is duplicate-free as point sets.
            let sets: BTreeSet<Vec<Bond>> =
                all.iter().map(|l| l.bonds().map(|b| b.canonical()).collect::<BTreeSet<_>>().into_iter().collect()).collect();
            assert_eq!(sets.len(), all.len());
        }
    }

    #[test]
    fn hausdorff_examples() {
        let n = 3;
        let a = AxisSegment::new(Axis::E1, n, 0, 0, 2);
        assert_eq!(hausdorff_distance(a, a), 0.0);
        // Parallel shift by one row: distance 2^{-N}.
        let b = AxisSegment::new(Axis::E1, n, 1, 0, 2);
        assert!((hausdorff_distance(a, b) - 0.125).abs() < 1e-15);
        // Same row, disjoint: gap measured end-to-end.
        let c = AxisSegment::new(Axis::E1, n, 0, 4, 1);
        assert!((hausdorff_distance(a, c) - 3.0 * 0.125).abs() < 1e-15);
        // Wrap: offsets 0 and 7 are one step apart on the torus.
        let d = AxisSegment::new(Axis::E1, n, 7, 0, 2);
        assert!((hausdorff_distance(a, d) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_symmetry_and_triangle() {
        let n = 2;
        let all: Vec<AxisSegment> = segments(n).collect();
        for (i, &a) in all.iter().enumerate().step_by(7) {
            for (j, &b) in all.iter().enumerate().step_by(5) {
                let ab = hausdorff_distance(a, b);
                assert!((ab - hausdorff_distance(b, a)).abs() < 1e-15);
                if i == j {
                    assert_eq!(ab, 0.0);
                }
                for &c in all.iter().step_by(11) {
                    assert!(ab <= hausdorff_distance(a, c) + hausdorff_distance(c, b) + 1e-12);
                }
            }
        }
    }
}
