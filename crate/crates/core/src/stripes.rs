//! An explicit set of `n + 1` points in `T^{2^n}` shattered by stripes of
//! any fixed length `l`, together with a witness stripe for every subset.
//!
//! Dimension `i` (0-based) is paired with the subset `C_i` of points
//! `1..=n` whose membership bits are the bits of `i` (bit `b` is point
//! `b + 1`); point 0 never belongs to a canonical subset, so the `2^n`
//! dimensions enumerate the complementary pairs `{C_i, C \ C_i}` exactly
//! once. Points of `C_i` sit at `(1 - l)/3` in dimension `i`, all others at
//! `(2 + l)/3`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::shatter::Mask;
use crate::torus::{Arc, PointSet, Rat, Stripe};

/// Largest `n` accepted (ambient dimension `2^n`).
pub const MAX_N: usize = 20;

/// The pairing between dimensions and complementary subset pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairIndex {
    n: usize,
}

impl PairIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "n must lie in 1..={MAX_N}, got {n}"
            )));
        }
        Ok(PairIndex { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimensions(&self) -> usize {
        1 << self.n
    }

    /// The canonical representative `C_i` (never contains point 0).
    pub fn subset(&self, dim: usize) -> Mask {
        Mask((dim as u64) << 1)
    }

    /// The dimension whose pair contains `s`, and whether `s` is the
    /// canonical member of that pair.
    pub fn locate(&self, s: Mask) -> (usize, bool) {
        let full = Mask::full(self.n + 1);
        if s.contains(0) {
            ((s.complement(self.n + 1).0 >> 1) as usize, false)
        } else {
            debug_assert!(s.is_subset_of(full));
            ((s.0 >> 1) as usize, true)
        }
    }
}

fn check_length(l: Rat) -> Result<()> {
    if l <= Rat::zero() || l >= Rat::one() {
        return Err(Error::InvalidParameter(format!(
            "stripe length must lie in (0,1), got {l}"
        )));
    }
    Ok(())
}

/// Coordinate of the canonical subset: `(1 - l)/3`.
pub fn low_value(l: Rat) -> Rat {
    (Rat::one() - l) / Rat::from_integer(3)
}

/// Coordinate of its complement: `(2 + l)/3`.
pub fn high_value(l: Rat) -> Rat {
    (Rat::from_integer(2) + l) / Rat::from_integer(3)
}

/// `n + 1` points in `T^{2^n}` shattered by stripes of length `l`.
pub fn build_stripe_shattered_set(n: usize, l: Rat) -> Result<PointSet> {
    let pairs = PairIndex::new(n)?;
    build_stripe_shattered_set_in(n, l, pairs.dimensions())
}

/// The same construction embedded in `T^ambient`, `ambient >= 2^n`; the
/// extra dimensions put every point at `(2 + l)/3`.
pub fn build_stripe_shattered_set_in(n: usize, l: Rat, ambient: usize) -> Result<PointSet> {
    check_length(l)?;
    let pairs = PairIndex::new(n)?;
    if ambient < pairs.dimensions() {
        return Err(Error::InvalidParameter(format!(
            "ambient dimension {ambient} is below 2^{n}"
        )));
    }
    let (lo, hi) = (low_value(l), high_value(l));
    let points: Vec<Vec<Rat>> = (0..=n)
        .map(|p| {
            (0..ambient)
                .map(|dim| {
                    if dim < pairs.dimensions() && pairs.subset(dim).contains(p) {
                        lo
                    } else {
                        hi
                    }
                })
                .collect()
        })
        .collect();
    PointSet::from_rationals(ambient, &points)
}

/// Number of points the construction places in `T^k`: `floor(log2 k) + 1`.
pub fn points_for_dimension(k: u64) -> Result<usize> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "the construction needs dimension at least 2, got {k}"
        )));
    }
    Ok(63 - k.leading_zeros() as usize + 1)
}

/// Open arc of length `l` centred on `target`, shifted just enough to stay
/// inside `[0, 1]`.
fn canonical_arc(target: Rat, l: Rat) -> Result<Arc> {
    let half = l / Rat::from_integer(2);
    let mut start = target - half;
    if start < Rat::zero() {
        start = Rat::zero();
    }
    if start + l > Rat::one() {
        start = Rat::one() - l;
    }
    let end = start + l;
    let end = if end == Rat::one() { Rat::zero() } else { end };
    Arc::open(start, end)
}

/// Witness stripe for `s` on [`build_stripe_shattered_set`]`(n, l)`.
pub fn stripe_witness(n: usize, l: Rat, s: Mask) -> Result<Stripe> {
    let pairs = PairIndex::new(n)?;
    stripe_witness_in(n, l, s, pairs.dimensions())
}

/// Witness stripe for `s` on [`build_stripe_shattered_set_in`]`(n, l, ambient)`.
pub fn stripe_witness_in(n: usize, l: Rat, s: Mask, ambient: usize) -> Result<Stripe> {
    check_length(l)?;
    let pairs = PairIndex::new(n)?;
    if !s.is_subset_of(Mask::full(n + 1)) {
        return Err(Error::OutOfRange(format!(
            "mask {s} exceeds {} points",
            n + 1
        )));
    }
    let (dim, canonical) = pairs.locate(s);
    let target = if canonical {
        low_value(l)
    } else {
        high_value(l)
    };
    Stripe::new(dim, canonical_arc(target, l)?, ambient)
}
