//! Realizability oracles for boxes, cubes and stripes over grid point sets,
//! shattering reports and growth counts.
//!
//! Every oracle is exact and complete. Point coordinates are `t/D`; all
//! witnesses are written over the quarter grid `1/(4D)` (or, for stripes of a
//! fixed length `l`, over the half grid of `lcm(D, den l)`).

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::torus::{Arc, Closure, Cube, PointSet, Rat, Shape, Stripe, TorusBox};

/// A subset of the points of a [`PointSet`], bit `i` standing for point `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask(pub u64);

impl Mask {
    pub const EMPTY: Mask = Mask(0);

    pub fn full(n: usize) -> Mask {
        assert!(n <= 64);
        if n == 64 {
            Mask(u64::MAX)
        } else {
            Mask((1u64 << n) - 1)
        }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Mask {
        Mask(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn complement(self, n: usize) -> Mask {
        Mask(!self.0 & Mask::full(n).0)
    }

    pub fn is_subset_of(self, other: Mask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Parses lowercase or uppercase hexadecimal without prefix.
    pub fn from_hex(s: &str) -> Option<Mask> {
        u64::from_str_radix(s, 16).ok().map(Mask)
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

/// The set families the engine decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Products of closed arcs.
    Boxes,
    /// Products of closed arcs of one common length.
    Cubes,
    /// Stripes whose open cross-section `(b, a)`, `0 <= b < a <= 1`, has length `l`.
    StripesFixed(Rat),
    /// Stripes of any length in `(0, 1)`.
    StripesAny,
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        if let Family::StripesFixed(l) = self {
            if *l <= Rat::zero() || *l >= Rat::one() {
                return Err(Error::InvalidParameter(format!(
                    "stripe length must lie in (0,1), got {l}"
                )));
            }
        }
        Ok(())
    }

    /// Parses a family name; `stripes` with a length becomes the fixed-length family.
    pub fn parse(name: &str, length: Option<Rat>) -> Result<Family> {
        let fam = match (name, length) {
            ("boxes" | "boxes_per", None) => Family::Boxes,
            ("cubes" | "cubes_per", None) => Family::Cubes,
            ("stripes", Some(l)) => Family::StripesFixed(l),
            ("stripes", None) => Family::StripesAny,
            (n, Some(_)) if n != "stripes" => {
                return Err(Error::InvalidParameter(format!(
                    "a length only applies to stripes, not {n}"
                )))
            }
            (n, _) => return Err(Error::InvalidParameter(format!("unknown family {n:?}"))),
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Certificate kind string.
    pub fn kind(&self) -> &'static str {
        match self {
            Family::Boxes => "boxes",
            Family::Cubes => "cubes",
            Family::StripesFixed(_) | Family::StripesAny => "stripes",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::StripesFixed(l) => write!(f, "stripes(l={l})"),
            other => f.write_str(other.kind()),
        }
    }
}

/// Verdict of a shattering test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShatterReport {
    pub shattered: bool,
    /// The smallest unrealizable mask when not shattered.
    pub missing: Option<Mask>,
    /// Witnesses for every mask below `missing` (all masks when shattered).
    pub witnesses: BTreeMap<Mask, Shape>,
}

pub const SHATTER_GUARD: usize = 30;
pub const GROWTH_GUARD: usize = 20;

fn check_mask(ps: &PointSet, s: Mask) -> Result<()> {
    if ps.len() < 64 && s.0 >> ps.len() != 0 {
        return Err(Error::OutOfRange(format!(
            "mask {s} names points beyond the {} available",
            ps.len()
        )));
    }
    Ok(())
}

/// True iff containment of every point in `shape` matches `s` exactly.
pub fn verify_witness(ps: &PointSet, s: Mask, shape: &Shape) -> Result<bool> {
    for (i, p) in ps.points().enumerate() {
        if shape.contains(&p)? != s.contains(i) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mask of the points of `ps` lying in `shape`.
pub fn contained_mask(ps: &PointSet, shape: &Shape) -> Result<Mask> {
    let mut m = 0u64;
    for (i, p) in ps.points().enumerate() {
        if shape.contains(&p)? {
            m |= 1 << i;
        }
    }
    Ok(Mask(m))
}

fn in_cyclic(x: u64, start: u64, end: u64) -> bool {
    if start <= end {
        start <= x && x <= end
    } else {
        x >= start || x <= end
    }
}

/// One candidate arc in one dimension: the outsiders it excludes, and its
/// start and length in units of `1/unit`.
#[derive(Clone, Copy, Debug)]
struct Choice {
    excl: u64,
    start: u64,
    len: u64,
}

/// Picks one choice per dimension so the exclusions cover `target`.
fn cover(choices: &[Vec<Choice>], target: u64) -> Option<Vec<usize>> {
    let d = choices.len();
    let mut suffix = vec![0u64; d + 1];
    for k in (0..d).rev() {
        suffix[k] = suffix[k + 1] | choices[k].iter().fold(0, |a, c| a | c.excl);
    }
    if suffix[0] & target != target {
        return None;
    }
    let mut seen = HashSet::new();
    let mut picked = Vec::with_capacity(d);
    fn go(
        k: usize,
        acc: u64,
        choices: &[Vec<Choice>],
        suffix: &[u64],
        target: u64,
        seen: &mut HashSet<(usize, u64)>,
        picked: &mut Vec<usize>,
    ) -> bool {
        if acc & target == target {
            picked.resize(choices.len(), 0);
            return true;
        }
        if k == choices.len() || (acc | suffix[k]) & target != target || !seen.insert((k, acc)) {
            return false;
        }
        for (i, c) in choices[k].iter().enumerate() {
            picked.push(i);
            if go(k + 1, acc | c.excl, choices, suffix, target, seen, picked) {
                return true;
            }
            picked.pop();
        }
        false
    }
    go(0, 0, choices, &suffix, target, &mut seen, &mut picked).then_some(picked)
}

fn dedup_choices(mut v: Vec<Choice>) -> Vec<Choice> {
    let mut seen = HashSet::new();
    v.retain(|c| seen.insert(c.excl));
    v
}

fn column(ps: &PointSet, k: usize) -> Vec<u64> {
    (0..ps.len()).map(|i| ps.numers(i)[k]).collect()
}

/// Start of the largest gap among the values of `col` (0 if empty).
fn largest_gap_start(col: &[u64], denom: u64) -> u64 {
    let mut v = col.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return 0;
    }
    let r = v.len();
    let mut best = (0u64, v[0]);
    for j in 0..r {
        let len = if r == 1 {
            denom
        } else {
            (v[(j + 1) % r] + denom - v[j]) % denom
        };
        if len > best.0 {
            best = (len, v[j]);
        }
    }
    best.1
}

fn closed_arc_q(start: u64, len: u64, unit: u64) -> Result<Arc> {
    let u = unit as i64;
    Arc::from_start_length(
        Rat::new(start as i64, u),
        Rat::new(len as i64, u),
        Closure::Closed,
    )
}

/// Per-dimension minimal closed arcs enclosing the coordinates of `s`
/// (one per gap between consecutive distinct values), in quarter units.
fn box_choices(ps: &PointSet, s: Mask, k: usize) -> Vec<Choice> {
    let d4 = 4 * ps.denom();
    let col = column(ps, k);
    let outsiders = s.complement(ps.len()).0;
    let mut vals: Vec<u64> = s
        .iter()
        .take_while(|&i| i < ps.len())
        .map(|i| col[i])
        .collect();
    vals.sort_unstable();
    vals.dedup();
    let r = vals.len();
    let excl_of = |a: u64, b: u64| {
        (0..ps.len())
            .filter(|&i| outsiders >> i & 1 == 1 && !in_cyclic(col[i], a, b))
            .fold(0u64, |m, i| m | 1 << i)
    };
    let mut out = Vec::with_capacity(r);
    if r == 1 {
        let v = vals[0];
        out.push(Choice {
            excl: excl_of(v, v),
            start: 4 * v,
            len: 2,
        });
        return out;
    }
    for j in 0..r {
        let (a, b) = (vals[(j + 1) % r], vals[j]);
        let len = (4 * b + d4 - 4 * a) % d4;
        out.push(Choice {
            excl: excl_of(a, b),
            start: 4 * a,
            len,
        });
    }
    dedup_choices(out)
}

/// A box `h` with `ps ∩ h = s`, or `None` if no box cuts out `s`.
pub fn realizable_by_box(ps: &PointSet, s: Mask) -> Result<Option<TorusBox>> {
    check_mask(ps, s)?;
    let d = ps.dim();
    let unit = 4 * ps.denom();
    if s == Mask::EMPTY {
        let arcs = (0..d)
            .map(|k| {
                closed_arc_q(
                    4 * largest_gap_start(&column(ps, k), ps.denom()) + 1,
                    2,
                    unit,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        return TorusBox::new(arcs).map(Some);
    }
    let choices: Vec<Vec<Choice>> = (0..d).map(|k| box_choices(ps, s, k)).collect();
    let target = s.complement(ps.len()).0;
    let Some(picked) = cover(&choices, target) else {
        return Ok(None);
    };
    let arcs = picked
        .iter()
        .enumerate()
        .map(|(k, &i)| closed_arc_q(choices[k][i].start, choices[k][i].len, unit))
        .collect::<Result<Vec<_>>>()?;
    TorusBox::new(arcs).map(Some)
}

/// Runs of consecutive grid values achievable by closed arcs whose length
/// falls in class `j`: lengths in `[j/D, (j+1)/D)` reach exactly the runs
/// of `j` or `j+1` consecutive values (for `j = 0`: none or one value).
/// Returns (edge, runs) with runs as (first value, size, start) in quarter units.
fn cube_class(denom: u64, j: u64) -> (u64, Vec<(u64, u64, u64)>) {
    let d4 = 4 * denom;
    let mut runs = Vec::new();
    if j == 0 {
        for s in 0..denom {
            runs.push((s, 1, 4 * s));
            runs.push((s, 0, 4 * s + 1));
        }
        (2, runs)
    } else {
        for s in 0..denom {
            runs.push((s, j + 1, 4 * s));
            runs.push((s, j, (4 * s + d4 - 2) % d4));
        }
        (4 * j, runs)
    }
}

fn run_contains(x: u64, first: u64, size: u64, denom: u64) -> bool {
    size > 0 && (x + denom - first) % denom < size
}

/// A cube `h` with `ps ∩ h = s`, or `None`. Complete over all real edge
/// lengths: edge classes `[j/D, (j+1)/D)` are tried in ascending order.
pub fn realizable_by_cube(ps: &PointSet, s: Mask) -> Result<Option<Cube>> {
    check_mask(ps, s)?;
    let d = ps.dim();
    let n = ps.len();
    let denom = ps.denom();
    let unit = 4 * denom;
    let target = s.complement(n).0;
    let cols: Vec<Vec<u64>> = (0..d).map(|k| column(ps, k)).collect();
    for j in 0..denom {
        let (edge, runs) = cube_class(denom, j);
        let mut choices = Vec::with_capacity(d);
        for col in &cols {
            let mut dim_choices = Vec::new();
            for &(first, size, start) in &runs {
                let inside = (0..n)
                    .filter(|&i| run_contains(col[i], first, size, denom))
                    .fold(0u64, |m, i| m | 1 << i);
                if s.0 & !inside == 0 {
                    dim_choices.push(Choice {
                        excl: target & !inside,
                        start,
                        len: edge,
                    });
                }
            }
            if dim_choices.is_empty() {
                break;
            }
            choices.push(dedup_choices(dim_choices));
        }
        if choices.len() < d {
            continue;
        }
        if let Some(picked) = cover(&choices, target) {
            let u = unit as i64;
            let starts: Vec<Rat> = picked
                .iter()
                .enumerate()
                .map(|(k, &i)| Rat::new(choices[k][i].start as i64, u))
                .collect();
            return Cube::from_starts(&starts, Rat::new(edge as i64, u)).map(Some);
        }
    }
    Ok(None)
}

/// A stripe of length exactly `l` whose cross-section `(b, b + l)` stays
/// inside `[0, 1]`, cutting out `s`; `None` if there is none.
pub fn realizable_by_stripe(ps: &PointSet, s: Mask, l: Rat) -> Result<Option<Stripe>> {
    check_mask(ps, s)?;
    Family::StripesFixed(l).validate()?;
    let n = ps.len();
    let denom = ps.denom() as i64;
    let q = denom.lcm(l.denom());
    let unit = 2 * q;
    let scale = unit / denom;
    let len = l.numer() * (unit / l.denom());
    let hi = unit - len;
    for k in 0..ps.dim() {
        let xs: Vec<i64> = (0..n).map(|i| ps.numers(i)[k] as i64 * scale).collect();
        let mut events: Vec<i64> = vec![0, hi];
        for &x in &xs {
            for e in [x, x - len] {
                if (0..=hi).contains(&e) {
                    events.push(e);
                }
            }
        }
        events.sort_unstable();
        events.dedup();
        let mut cands = Vec::with_capacity(2 * events.len());
        for (w, &e) in events.iter().enumerate() {
            cands.push(e);
            if let Some(&next) = events.get(w + 1) {
                cands.push((e + next) / 2);
            }
        }
        for a in cands {
            let inside = xs
                .iter()
                .enumerate()
                .filter(|(_, &x)| a < x && x < a + len)
                .fold(0u64, |m, (i, _)| m | 1 << i);
            if inside == s.0 {
                let arc = Arc::open(Rat::new(a, unit), Rat::new((a + len) % unit, unit))?;
                return Stripe::new(k, arc, ps.dim()).map(Some);
            }
        }
    }
    Ok(None)
}

/// A stripe of any length (cross-section inside `[0, 1]`) cutting out `s`.
pub fn realizable_by_any_stripe(ps: &PointSet, s: Mask) -> Result<Option<Stripe>> {
    check_mask(ps, s)?;
    let n = ps.len();
    let unit = 4 * ps.denom() as i64;
    if s == Mask::EMPTY {
        let arc = Arc::open(Rat::zero(), Rat::new(1, unit))?;
        return Stripe::new(0, arc, ps.dim()).map(Some);
    }
    'dims: for k in 0..ps.dim() {
        let col = column(ps, k);
        let vals: Vec<u64> = s.iter().take_while(|&i| i < n).map(|i| col[i]).collect();
        let (lo, hi) = (*vals.iter().min().unwrap(), *vals.iter().max().unwrap());
        if lo == 0 {
            continue;
        }
        for i in (0..n).filter(|&i| !s.contains(i)) {
            if (lo..=hi).contains(&col[i]) {
                continue 'dims;
            }
        }
        let arc = Arc::open(
            Rat::new(4 * lo as i64 - 1, unit),
            Rat::new((4 * hi as i64 + 1) % unit, unit),
        )?;
        return Stripe::new(k, arc, ps.dim()).map(Some);
    }
    Ok(None)
}

/// A witness of `family` cutting `s` out of `ps`.
pub fn realize(ps: &PointSet, s: Mask, family: Family) -> Result<Option<Shape>> {
    Ok(match family {
        Family::Boxes => realizable_by_box(ps, s)?.map(Shape::Box),
        Family::Cubes => realizable_by_cube(ps, s)?.map(Shape::Cube),
        Family::StripesFixed(l) => realizable_by_stripe(ps, s, l)?.map(Shape::Stripe),
        Family::StripesAny => realizable_by_any_stripe(ps, s)?.map(Shape::Stripe),
    })
}

fn guard_n(ps: &PointSet, limit: usize, what: &str) -> Result<()> {
    if ps.len() > limit {
        return Err(Error::guard(
            format!("{what} on {} points", ps.len()),
            limit,
        ));
    }
    Ok(())
}

/// Sequential shattering test with early exit on the first missing mask.
pub fn is_shattered(ps: &PointSet, family: Family) -> Result<bool> {
    guard_n(ps, SHATTER_GUARD, "shatter test")?;
    family.validate()?;
    for m in 0..1u64 << ps.len() {
        if realize(ps, Mask(m), family)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Tests every mask in ascending order. The report is identical to the
/// sequential scan regardless of the rayon worker count.
pub fn shatter_report(ps: &PointSet, family: Family) -> Result<ShatterReport> {
    guard_n(ps, SHATTER_GUARD, "shatter report")?;
    family.validate()?;
    let total = 1u64 << ps.len();
    let first = (0..total)
        .into_par_iter()
        .map(|m| (m, realize(ps, Mask(m), family).map(|w| w.is_some())))
        .find_first(|(_, r)| !matches!(r, Ok(true)));
    let missing = match first {
        Some((_, Err(e))) => return Err(e),
        Some((m, Ok(_))) => Some(Mask(m)),
        None => None,
    };
    let upto = missing.map_or(total, |m| m.0);
    let witnesses = (0..upto)
        .into_par_iter()
        .map(|m| {
            let w = realize(ps, Mask(m), family)?.expect("realizable below the first miss");
            debug_assert!(verify_witness(ps, Mask(m), &w).unwrap_or(false));
            Ok((Mask(m), w))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(ShatterReport {
        shattered: missing.is_none(),
        missing,
        witnesses,
    })
}

/// Number of distinct subsets of `ps` cut out by `family`.
pub fn growth_count(ps: &PointSet, family: Family) -> Result<u64> {
    guard_n(ps, GROWTH_GUARD, "growth count")?;
    family.validate()?;
    (0..1u64 << ps.len())
        .into_par_iter()
        .map(|m| realize(ps, Mask(m), family).map(|w| w.is_some() as u64))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Restricts a shattering certificate to the points in `keep` (re-indexed in
/// ascending order).
pub fn restrict_witnesses(witnesses: &BTreeMap<Mask, Shape>, keep: Mask) -> BTreeMap<Mask, Shape> {
    let idx: Vec<usize> = keep.iter().collect();
    let mut out = BTreeMap::new();
    for (m, w) in witnesses {
        if m.0 & !keep.0 != 0 {
            continue;
        }
        let sub = Mask::from_indices(
            idx.iter()
                .enumerate()
                .filter(|(_, &i)| m.contains(i))
                .map(|(j, _)| j),
        );
        out.entry(sub).or_insert_with(|| w.clone());
    }
    out
}
