//! Exact geometry on the circle `T = [0,1)` (with 0 identified with 1) and on
//! its products: arcs, boxes, cubes and stripes.
//!
//! Every coordinate is an exact rational; nothing here rounds.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational in lowest terms with a positive denominator.
pub type Rat = Ratio<i64>;

/// Shorthand for `Rat::new(n, d)`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Parses `p/q` or a bare integer.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Reduces `x` into `[0,1)`.
pub fn wrap_unit(x: Rat) -> Rat {
    let f = x - x.floor();
    debug_assert!(f >= Rat::zero() && f < Rat::one());
    f
}

fn in_unit(x: &Rat) -> bool {
    *x >= Rat::zero() && *x < Rat::one()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Closure {
    Closed,
    Open,
}

impl Closure {
    pub fn flip(self) -> Self {
        match self {
            Closure::Closed => Closure::Open,
            Closure::Open => Closure::Closed,
        }
    }
}

/// An arc of the circle from `start` to `end`, running in the positive
/// direction. When `start > end` the arc passes through 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    start: Rat,
    end: Rat,
    closure: Closure,
}

impl Arc {
    pub fn new(start: Rat, end: Rat, closure: Closure) -> Result<Self> {
        if !in_unit(&start) || !in_unit(&end) {
            return Err(Error::InvalidArc(format!(
                "endpoints must lie in [0,1), got {start} and {end}"
            )));
        }
        if start == end {
            return Err(Error::InvalidArc(format!(
                "degenerate arc at {start} (full circles and points are not arcs)"
            )));
        }
        Ok(Arc {
            start,
            end,
            closure,
        })
    }

    pub fn closed(start: Rat, end: Rat) -> Result<Self> {
        Self::new(start, end, Closure::Closed)
    }

    pub fn open(start: Rat, end: Rat) -> Result<Self> {
        Self::new(start, end, Closure::Open)
    }

    /// Arc starting at `start` (taken modulo 1) with the given length in `(0,1)`.
    pub fn from_start_length(start: Rat, length: Rat, closure: Closure) -> Result<Self> {
        if length <= Rat::zero() || length >= Rat::one() {
            return Err(Error::InvalidArc(format!(
                "length must lie in (0,1), got {length}"
            )));
        }
        let start = wrap_unit(start);
        Self::new(start, wrap_unit(start + length), closure)
    }

    pub fn start(&self) -> Rat {
        self.start
    }

    pub fn end(&self) -> Rat {
        self.end
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn wraps(&self) -> bool {
        self.start > self.end
    }

    /// `b - a` for a non-wrapping arc, `1 - a + b` otherwise.
    pub fn length(&self) -> Rat {
        if self.start < self.end {
            self.end - self.start
        } else {
            Rat::one() - self.start + self.end
        }
    }

    /// Membership of `x` (reduced modulo 1) in the arc.
    pub fn contains(&self, x: Rat) -> bool {
        let x = if in_unit(&x) { x } else { wrap_unit(x) };
        let (a, b) = (self.start, self.end);
        match (self.closure, a < b) {
            (Closure::Closed, true) => a <= x && x <= b,
            (Closure::Open, true) => a < x && x < b,
            (Closure::Closed, false) => x >= a || x <= b,
            (Closure::Open, false) => x > a || x < b,
        }
    }

    /// The complementary arc: endpoints swapped, closure flipped.
    pub fn complement(&self) -> Arc {
        Arc {
            start: self.end,
            end: self.start,
            closure: self.closure.flip(),
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.closure {
            Closure::Closed => write!(f, "[{}, {}]", self.start, self.end),
            Closure::Open => write!(f, "({}, {})", self.start, self.end),
        }
    }
}

/// Membership test for `x` in `arc`.
pub fn arc_contains(arc: &Arc, x: Rat) -> bool {
    arc.contains(x)
}

pub fn arc_length(arc: &Arc) -> Rat {
    arc.length()
}

/// A point of the torus `T^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    coords: Vec<Rat>,
}

impl TorusPoint {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        if let Some(c) = coords.iter().find(|c| !in_unit(c)) {
            return Err(Error::OutOfRange(format!("coordinate {c} not in [0,1)")));
        }
        Ok(TorusPoint { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// A product of `d` closed arcs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusBox {
    arcs: Vec<Arc>,
}

impl TorusBox {
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::InvalidParameter(
                "a box needs at least one factor".into(),
            ));
        }
        if arcs.iter().any(|a| a.closure() != Closure::Closed) {
            return Err(Error::InvalidArc("box factors must be closed arcs".into()));
        }
        Ok(TorusBox { arcs })
    }

    pub fn dim(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn contains(&self, p: &TorusPoint) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self
            .arcs
            .iter()
            .zip(p.coords())
            .all(|(a, x)| a.contains(*x)))
    }
}

pub fn box_contains(b: &TorusBox, p: &TorusPoint) -> Result<bool> {
    b.contains(p)
}

/// A box whose factors all have the same length `edge`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cube {
    arcs: Vec<Arc>,
    edge: Rat,
}

impl Cube {
    pub fn new(arcs: Vec<Arc>) -> Result<Self> {
        let b = TorusBox::new(arcs)?;
        let edge = b.arcs[0].length();
        if b.arcs.iter().any(|a| a.length() != edge) {
            return Err(Error::InvalidArc(
                "cube factors must have equal length".into(),
            ));
        }
        Ok(Cube { arcs: b.arcs, edge })
    }

    /// Cube with factors `[start_i, start_i + edge]`.
    pub fn from_starts(starts: &[Rat], edge: Rat) -> Result<Self> {
        let arcs = starts
            .iter()
            .map(|s| Arc::from_start_length(*s, edge, Closure::Closed))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arcs)
    }

    pub fn dim(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn edge(&self) -> Rat {
        self.edge
    }

    pub fn contains(&self, p: &TorusPoint) -> Result<bool> {
        check_dim(self.dim(), p.dim())?;
        Ok(self
            .arcs
            .iter()
            .zip(p.coords())
            .all(|(a, x)| a.contains(*x)))
    }
}

/// `T^{i-1} x (b, a) x T^{d-i}`: an open arc in the anchor dimension,
/// full circles elsewhere. `anchor` is 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Stripe {
    anchor: usize,
    arc: Arc,
    ambient_dim: usize,
}

impl Stripe {
    pub fn new(anchor: usize, arc: Arc, ambient_dim: usize) -> Result<Self> {
        if anchor >= ambient_dim {
            return Err(Error::OutOfRange(format!(
                "anchor {anchor} outside ambient dimension {ambient_dim}"
            )));
        }
        if arc.closure() != Closure::Open {
            return Err(Error::InvalidArc(
                "stripe cross-sections are open arcs".into(),
            ));
        }
        Ok(Stripe {
            anchor,
            arc,
            ambient_dim,
        })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn arc(&self) -> &Arc {
        &self.arc
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn length(&self) -> Rat {
        self.arc.length()
    }

    pub fn contains(&self, p: &TorusPoint) -> Result<bool> {
        check_dim(self.ambient_dim, p.dim())?;
        Ok(self.arc.contains(p.coords()[self.anchor]))
    }
}

pub fn stripe_contains(s: &Stripe, p: &TorusPoint) -> Result<bool> {
    s.contains(p)
}

/// Any of the shapes a family can produce.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Box(TorusBox),
    Cube(Cube),
    Stripe(Stripe),
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box(b) => b.dim(),
            Shape::Cube(c) => c.dim(),
            Shape::Stripe(s) => s.ambient_dim(),
        }
    }

    pub fn contains(&self, p: &TorusPoint) -> Result<bool> {
        match self {
            Shape::Box(b) => b.contains(p),
            Shape::Cube(c) => c.contains(p),
            Shape::Stripe(s) => s.contains(p),
        }
    }

    /// All rationals the shape is written with (starts and lengths).
    pub fn rationals(&self) -> Vec<Rat> {
        match self {
            Shape::Box(b) => b
                .arcs()
                .iter()
                .flat_map(|a| [a.start(), a.length()])
                .collect(),
            Shape::Cube(c) => c
                .arcs()
                .iter()
                .map(|a| a.start())
                .chain(std::iter::once(c.edge()))
                .collect(),
            Shape::Stripe(s) => vec![s.arc().start(), s.length()],
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Box(b) => {
                let parts: Vec<String> = b.arcs().iter().map(|a| a.to_string()).collect();
                write!(f, "box {}", parts.join(" x "))
            }
            Shape::Cube(c) => {
                let parts: Vec<String> = c.arcs().iter().map(|a| a.to_string()).collect();
                write!(f, "cube(edge {}) {}", c.edge(), parts.join(" x "))
            }
            Shape::Stripe(s) => write!(
                f,
                "stripe(dim {} of {}) {}",
                s.anchor() + 1,
                s.ambient_dim(),
                s.arc()
            ),
        }
    }
}

/// A finite configuration on `T^d` whose coordinates are `t / denom`
/// with integers `0 <= t < denom`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: usize,
    denom: u64,
    numers: Vec<Vec<u64>>,
}

impl PointSet {
    pub fn new(dim: usize, denom: u64, numers: Vec<Vec<u64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if denom == 0 || denom > i64::MAX as u64 / 4 {
            return Err(Error::InvalidParameter(format!("bad denominator {denom}")));
        }
        for (i, p) in numers.iter().enumerate() {
            check_dim(dim, p.len())?;
            if let Some(t) = p.iter().find(|&&t| t >= denom) {
                return Err(Error::OutOfRange(format!(
                    "point {i}: numerator {t} not below denominator {denom}"
                )));
            }
        }
        Ok(PointSet { dim, denom, numers })
    }

    /// Builds a set from rational coordinates using their least common denominator.
    pub fn from_rationals(dim: usize, points: &[Vec<Rat>]) -> Result<Self> {
        let mut denom: i64 = 1;
        for p in points {
            check_dim(dim, p.len())?;
            for c in p {
                if !in_unit(c) {
                    return Err(Error::OutOfRange(format!("coordinate {c} not in [0,1)")));
                }
                denom = denom.lcm(c.denom());
            }
        }
        let numers = points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|c| (c.numer() * (denom / c.denom())) as u64)
                    .collect()
            })
            .collect();
        Self::new(dim, denom as u64, numers)
    }

    pub fn empty(dim: usize) -> Self {
        PointSet {
            dim,
            denom: 1,
            numers: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn len(&self) -> usize {
        self.numers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numers.is_empty()
    }

    /// Integer numerators of point `i`.
    pub fn numers(&self, i: usize) -> &[u64] {
        &self.numers[i]
    }

    pub fn all_numers(&self) -> &[Vec<u64>] {
        &self.numers
    }

    pub fn coord(&self, i: usize, k: usize) -> Rat {
        Rat::new(self.numers[i][k] as i64, self.denom as i64)
    }

    pub fn point(&self, i: usize) -> TorusPoint {
        TorusPoint {
            coords: (0..self.dim).map(|k| self.coord(i, k)).collect(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// The same points over the smallest common denominator.
    pub fn reduced(&self) -> PointSet {
        let g = self
            .numers
            .iter()
            .flatten()
            .fold(self.denom, |g, &t| g.gcd(&t));
        PointSet {
            dim: self.dim,
            denom: self.denom / g,
            numers: self
                .numers
                .iter()
                .map(|p| p.iter().map(|t| t / g).collect())
                .collect(),
        }
    }

    /// The points listed in `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            denom: self.denom,
            numers: indices.iter().map(|&i| self.numers[i].clone()).collect(),
        }
    }
}

/// A cyclic gap between consecutive distinct coordinate values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub start: Rat,
    pub end: Rat,
    pub length: Rat,
}

/// Gaps between consecutive distinct values of `coords` around the circle,
/// longest first (ties by ascending start). A single distinct value `v`
/// yields the gap `[v, v)` of length 1.
pub fn maximal_gaps(coords: &[Rat]) -> Result<Vec<Gap>> {
    if coords.is_empty() {
        return Err(Error::InvalidParameter(
            "maximal_gaps needs at least one value".into(),
        ));
    }
    if let Some(c) = coords.iter().find(|c| !in_unit(c)) {
        return Err(Error::OutOfRange(format!("coordinate {c} not in [0,1)")));
    }
    let mut v = coords.to_vec();
    v.sort();
    v.dedup();
    let r = v.len();
    let mut gaps: Vec<Gap> = (0..r)
        .map(|j| {
            let (a, b) = (v[j], v[(j + 1) % r]);
            let length = if r == 1 {
                Rat::one()
            } else if a < b {
                b - a
            } else {
                Rat::one() - a + b
            };
            Gap {
                start: a,
                end: b,
                length,
            }
        })
        .collect();
    gaps.sort_by(|x, y| y.length.cmp(&x.length).then(x.start.cmp(&y.start)));
    Ok(gaps)
}
