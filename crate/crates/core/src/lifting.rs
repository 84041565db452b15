//! Lifting a stripe-shattered set through an extraction matrix to a
//! cube-shattered set.
//!
//! For `X = {x(0..u)}` in `T^k` and a `c x d` matrix `M` over `k` symbols,
//! the lifted point `y(i; j)` (0-based row `i`, point `j`, flat index
//! `i * u + j`) has coordinate `(i + x(j)_l) / (c + 1)` in dimension `n`,
//! where `M[i][n] = l`. Each row of `M` therefore owns the open cell
//! `(i/(c+1), (i+1)/(c+1))^d`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extraction::{extract_columns, SymbolMatrix};
use crate::shatter::{realizable_by_stripe, Mask};
use crate::stripes::{build_stripe_shattered_set_in, stripe_witness_in};
use crate::torus::{Arc, Cube, PointSet, Rat, Stripe};

pub const EXHAUSTIVE_LIFT_GUARD: usize = 24;

/// Source of stripe witnesses for the base set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WitnessSource {
    /// The explicit construction with parameter `n`.
    Construction(usize),
    /// Any base set: witnesses come from the stripe oracle.
    Oracle,
}

#[derive(Clone, Debug)]
pub struct LiftInstance {
    base: PointSet,
    matrix: SymbolMatrix,
    l: Rat,
    lifted: PointSet,
    source: WitnessSource,
}

/// Lifts `base` (in `T^k`, `k` the alphabet of `matrix`) through `matrix`.
pub fn lift_points(base: &PointSet, matrix: &SymbolMatrix, l: Rat) -> Result<LiftInstance> {
    LiftInstance::build(base.clone(), matrix.clone(), l, WitnessSource::Oracle)
}

impl LiftInstance {
    /// Lift of the explicit stripe-shattered set on `n + 1` points, embedded
    /// in `T^k` with `k` the alphabet size of `matrix`.
    pub fn from_construction(n: usize, l: Rat, matrix: &SymbolMatrix) -> Result<Self> {
        let base = build_stripe_shattered_set_in(n, l, matrix.alphabet())?;
        Self::build(base, matrix.clone(), l, WitnessSource::Construction(n))
    }

    fn build(base: PointSet, matrix: SymbolMatrix, l: Rat, source: WitnessSource) -> Result<Self> {
        if l <= Rat::zero() || l >= Rat::one() {
            return Err(Error::InvalidParameter(format!(
                "stripe length must lie in (0,1), got {l}"
            )));
        }
        if base.dim() != matrix.alphabet() {
            return Err(Error::DimensionMismatch {
                expected: matrix.alphabet(),
                got: base.dim(),
            });
        }
        if base.all_numers().iter().any(|p| p.contains(&0)) {
            return Err(Error::OutOfRange(
                "base coordinates must lie in (0,1) for the lifted groups to separate".into(),
            ));
        }
        let (c, u, dx) = (matrix.rows(), base.len(), base.denom());
        let denom = (c as u64 + 1)
            .checked_mul(dx)
            .ok_or_else(|| Error::InvalidParameter("lifted denominator overflows".into()))?;
        let mut numers = Vec::with_capacity(c * u);
        for i in 0..c {
            for j in 0..u {
                let x = base.numers(j);
                numers.push(
                    (0..matrix.cols())
                        .map(|n| i as u64 * dx + x[matrix.get(i, n) as usize])
                        .collect(),
                );
            }
        }
        let lifted = PointSet::new(matrix.cols(), denom, numers)?;
        Ok(LiftInstance {
            base,
            matrix,
            l,
            lifted,
            source,
        })
    }

    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn matrix(&self) -> &SymbolMatrix {
        &self.matrix
    }

    pub fn length(&self) -> Rat {
        self.l
    }

    pub fn lifted(&self) -> &PointSet {
        &self.lifted
    }

    pub fn groups(&self) -> usize {
        self.matrix.rows()
    }

    pub fn group_size(&self) -> usize {
        self.base.len()
    }

    /// Edge of every witness cube: `1 - l/(c+1)`.
    pub fn edge(&self) -> Rat {
        Rat::one() - self.l / self.scale()
    }

    fn scale(&self) -> Rat {
        Rat::from_integer(self.groups() as i64 + 1)
    }

    fn base_witness(&self, s: Mask) -> Result<Stripe> {
        match self.source {
            WitnessSource::Construction(n) => stripe_witness_in(n, self.l, s, self.base.dim()),
            WitnessSource::Oracle => {
                realizable_by_stripe(&self.base, s, self.l)?.ok_or_else(|| {
                    Error::Extraction(format!(
                        "base set has no stripe of length {} cutting out {s}",
                        self.l
                    ))
                })
            }
        }
    }

    /// The `d` open stripes whose common complement realizes `s`.
    pub fn stripe_cover(&self, s: Mask) -> Result<Vec<Stripe>> {
        let (c, u, d) = (self.groups(), self.group_size(), self.matrix.cols());
        if c * u > 64 || !s.is_subset_of(Mask::full(c * u)) {
            return Err(Error::OutOfRange(format!(
                "mask {s} exceeds {} lifted points",
                c * u
            )));
        }
        let group_mask = Mask::full(u);
        let mut word = Vec::with_capacity(c);
        let mut arcs = Vec::with_capacity(c);
        for i in 0..c {
            let kept = Mask((s.0 >> (i * u)) & group_mask.0);
            // the stripe must catch exactly the group points left out of s
            let w = self.base_witness(kept.complement(u))?;
            word.push(w.anchor() as u32);
            let (a, b) = (w.arc().start(), w.arc().start() + w.arc().length());
            arcs.push((a, b));
        }
        let cols = extract_columns(&self.matrix, &word)?.ok_or_else(|| {
            Error::Extraction(format!("no distinct columns for the word {word:?}"))
        })?;
        let scale = self.scale();
        let cf = Rat::from_integer(c as i64);
        let filler = Arc::open(cf / scale, (cf + self.l) / scale)?;
        let mut by_dim = vec![filler; d];
        for (i, (&n, (a, b))) in cols.iter().zip(arcs).enumerate() {
            let fi = Rat::from_integer(i as i64);
            by_dim[n] = Arc::open((fi + a) / scale, (fi + b) / scale)?;
        }
        by_dim
            .into_iter()
            .enumerate()
            .map(|(n, arc)| Stripe::new(n, arc, d))
            .collect()
    }

    /// Cube containing exactly the lifted points in `s`.
    pub fn cube_witness(&self, s: Mask) -> Result<Cube> {
        let stripes = self.stripe_cover(s)?;
        Cube::new(stripes.iter().map(|st| st.arc().complement()).collect())
    }
}

/// Free-function form of [`LiftInstance::cube_witness`].
pub fn cube_witness(inst: &LiftInstance, s: Mask) -> Result<Cube> {
    inst.cube_witness(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftFailure {
    pub mask: Mask,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    pub points: usize,
    pub checked: usize,
    pub failures: Vec<LiftFailure>,
}

impl LiftReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_mask(inst: &LiftInstance, s: Mask) -> Option<LiftFailure> {
    let fail = |reason: String| Some(LiftFailure { mask: s, reason });
    match inst.cube_witness(s) {
        Err(e) => fail(e.to_string()),
        Ok(cube) => {
            if cube.edge() != inst.edge() {
                return fail(format!("edge {} differs from {}", cube.edge(), inst.edge()));
            }
            let mut got = Mask::EMPTY;
            for (p, pt) in inst.lifted().points().enumerate() {
                match cube.contains(&pt) {
                    Ok(true) => got.0 |= 1 << p,
                    Ok(false) => {}
                    Err(e) => return fail(e.to_string()),
                }
            }
            (got != s).then(|| LiftFailure {
                mask: s,
                reason: format!("cube contains {got}"),
            })
        }
    }
}

/// Checks the cube witness for every mask (or a seeded sample of masks).
pub fn verify_lift(inst: &LiftInstance, mode: LiftMode) -> Result<LiftReport> {
    let n = inst.lifted().len();
    let masks: Vec<Mask> = match mode {
        LiftMode::Exhaustive => {
            if n > EXHAUSTIVE_LIFT_GUARD {
                return Err(Error::guard(
                    format!("exhaustive lift check on {n} points"),
                    EXHAUSTIVE_LIFT_GUARD,
                ));
            }
            (0..1u64 << n).map(Mask).collect()
        }
        LiftMode::Sample { count, seed } => {
            if n > 64 {
                return Err(Error::guard(format!("lift check on {n} points"), 64));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let full = Mask::full(n).0;
            (0..count).map(|_| Mask(rng.gen::<u64>() & full)).collect()
        }
    };
    let failures = masks
        .par_iter()
        .filter_map(|&s| check_mask(inst, s))
        .collect();
    Ok(LiftReport {
        points: n,
        checked: masks.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shatter::realizable_by_cube;
    use crate::torus::rat;

    fn worked() -> LiftInstance {
        let row: Vec<u32> = vec![0, 1, 2, 3, 0, 1, 2, 3];
        let m = SymbolMatrix::from_rows(4, &[row.clone(), row]).unwrap();
        LiftInstance::from_construction(2, rat(1, 2), &m).unwrap()
    }

    #[test]
    fn worked_instance_points() {
        let inst = worked();
        let y = inst.lifted();
        assert_eq!((y.len(), y.dim(), y.denom()), (6, 8, 18));
        for p in 0..6 {
            let (lo, hi) = if p < 3 {
                (rat(0, 1), rat(1, 3))
            } else {
                (rat(1, 3), rat(2, 3))
            };
            for n in 0..8 {
                let v = y.coord(p, n);
                assert!(lo < v && v < hi);
            }
        }
        // y(0;0): x(0) = (5/6, ...) in every dimension, halved per cell
        assert_eq!(y.coord(0, 0), rat(5, 18));
        assert_eq!(y.coord(4, 1), rat(1, 3) + rat(1, 18));
    }

    #[test]
    fn single_row_scales_by_half() {
        let x = build_stripe_shattered_set_in(1, rat(1, 2), 2).unwrap();
        let m = SymbolMatrix::from_rows(2, &[vec![1, 0, 1]]).unwrap();
        let inst = lift_points(&x, &m, rat(1, 2)).unwrap();
        for j in 0..x.len() {
            for (n, &sym) in m.row(0).iter().enumerate() {
                assert_eq!(
                    inst.lifted().coord(j, n),
                    x.coord(j, sym as usize) / Rat::from_integer(2)
                );
            }
        }
    }

    #[test]
    fn witness_examples() {
        let inst = worked();
        for s in [Mask(0b111111), Mask::EMPTY, Mask(0b000111)] {
            let cube = inst.cube_witness(s).unwrap();
            assert_eq!(cube.edge(), rat(5, 6));
            for (p, pt) in inst.lifted().points().enumerate() {
                assert_eq!(cube.contains(&pt).unwrap(), s.contains(p));
            }
        }
    }

    #[test]
    fn exhaustive_verification() {
        let inst = worked();
        let r = verify_lift(&inst, LiftMode::Exhaustive).unwrap();
        assert_eq!(r.checked, 64);
        assert!(r.passed());
        let r = verify_lift(&inst, LiftMode::Sample { count: 0, seed: 1 }).unwrap();
        assert_eq!(r.checked, 0);
        assert!(r.passed());
    }

    #[test]
    fn stripes_are_dual_and_separated() {
        let inst = worked();
        let u = inst.group_size();
        for s in 0..64 {
            let stripes = inst.stripe_cover(Mask(s)).unwrap();
            let cube = inst.cube_witness(Mask(s)).unwrap();
            for (p, pt) in inst.lifted().points().enumerate() {
                let hit: Vec<usize> = (0..stripes.len())
                    .filter(|&k| stripes[k].contains(&pt).unwrap())
                    .collect();
                assert_eq!(cube.contains(&pt).unwrap(), hit.is_empty());
                // a point is only ever caught by its own group's stripe
                for k in hit {
                    let lo = Rat::from_integer((p / u) as i64) / Rat::from_integer(3);
                    assert!(stripes[k].arc().start() >= lo);
                    assert!(stripes[k].arc().start() < lo + rat(1, 3));
                }
            }
        }
    }

    #[test]
    fn cube_oracle_agrees() {
        let inst = worked();
        for s in 0..64 {
            assert!(realizable_by_cube(inst.lifted(), Mask(s))
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn corrupted_matrix_fails() {
        // both rows forced into column 0 for symbol 0
        let m = SymbolMatrix::from_rows(
            4,
            &[vec![0, 1, 2, 3, 1, 1, 2, 3], vec![0, 1, 2, 3, 1, 1, 2, 3]],
        )
        .unwrap();
        let inst = LiftInstance::from_construction(2, rat(1, 2), &m).unwrap();
        let r = verify_lift(&inst, LiftMode::Exhaustive).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn oracle_source_matches_construction() {
        let inst = worked();
        let generic = lift_points(inst.base(), inst.matrix(), rat(1, 2)).unwrap();
        assert_eq!(generic.lifted(), inst.lifted());
        assert!(verify_lift(&generic, LiftMode::Exhaustive)
            .unwrap()
            .passed());
    }

    #[test]
    fn mismatch_rejected() {
        let x = build_stripe_shattered_set_in(1, rat(1, 2), 2).unwrap();
        let m = SymbolMatrix::from_rows(3, &[vec![0, 1, 2]]).unwrap();
        assert!(lift_points(&x, &m, rat(1, 2)).is_err());
    }
}
