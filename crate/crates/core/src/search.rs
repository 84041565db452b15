//! Exact VC-dimension for small `d` by enumerating configurations up to
//! symmetry, and a seeded hill-climbing search for shattered sets.
//!
//! Boxes and cubes only see the weak cyclic order of each coordinate, so a
//! configuration is a level function per dimension realized at `level / n`.
//! Stripes never wrap and never contain coordinate 0, so they see the weak
//! linear order instead; those configurations use `(level + 1) / (n + 1)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::shatter::{growth_count, is_shattered, shatter_report, Family, Mask};
use crate::torus::{PointSet, Shape};

pub const MAX_ENUM_D: usize = 2;
pub const MAX_ENUM_N: usize = 8;
/// Largest number of configurations a single grid enumeration may produce.
pub const GRID_GUARD: u64 = 2_000_000;

/// How coordinates are read off the levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Placement {
    /// `level / n`, cyclic order.
    Cyclic,
    /// `(level + 1) / (n + 1)`, linear order avoiding 0.
    Linear,
    /// `level / grid`, levels used as raw grid numerators.
    Grid(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConfigCode {
    pub d: usize,
    pub n: usize,
    /// `levels[dim][point]`.
    pub levels: Vec<Vec<u64>>,
    pub placement: Placement,
}

impl ConfigCode {
    pub fn to_point_set(&self) -> Result<PointSet> {
        let (denom, shift) = match self.placement {
            Placement::Cyclic => (self.n as u64, 0),
            Placement::Linear => (self.n as u64 + 1, 1),
            Placement::Grid(g) => (g, 0),
        };
        let numers = (0..self.n)
            .map(|p| (0..self.d).map(|k| self.levels[k][p] + shift).collect())
            .collect();
        PointSet::new(self.d, denom, numers)
    }
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    (0..1u64 << (n - 1))
        .map(|cuts| {
            let mut parts = vec![1usize];
            for i in 0..n - 1 {
                if cuts >> i & 1 == 1 {
                    parts.push(1);
                } else {
                    *parts.last_mut().unwrap() += 1;
                }
            }
            parts
        })
        .collect()
}

fn is_min_under(parts: &[usize], rotations: bool) -> bool {
    let r = parts.len();
    let rev: Vec<usize> = parts.iter().rev().copied().collect();
    let shifts = if rotations { r } else { 1 };
    (0..shifts).all(|s| {
        let rot: Vec<usize> = (0..r).map(|i| parts[(i + s) % r]).collect();
        let rrot: Vec<usize> = (0..r).map(|i| rev[(i + s) % r]).collect();
        parts <= rot.as_slice() && parts <= rrot.as_slice()
    })
}

fn composition_levels(parts: &[usize]) -> Vec<u64> {
    parts
        .iter()
        .enumerate()
        .flat_map(|(lvl, &size)| std::iter::repeat_n(lvl as u64, size))
        .collect()
}

/// All level vectors of length `n` whose values are exactly `0..L` for some
/// `L`; with `anchor_first`, point 0 sits at level 0.
fn surjective_levels(n: usize, anchor_first: bool) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut v = vec![0u64; n];
    fn rec(i: usize, v: &mut Vec<u64>, anchor_first: bool, out: &mut Vec<Vec<u64>>) {
        let n = v.len();
        if i == n {
            let max = *v.iter().max().unwrap();
            let mut seen = vec![false; max as usize + 1];
            v.iter().for_each(|&x| seen[x as usize] = true);
            if seen.iter().all(|&s| s) {
                out.push(v.clone());
            }
            return;
        }
        let hi = if i == 0 && anchor_first {
            0
        } else {
            n as u64 - 1
        };
        for x in 0..=hi {
            v[i] = x;
            rec(i + 1, v, anchor_first, out);
        }
    }
    rec(0, &mut v, anchor_first, &mut out);
    out
}

fn check_enum(d: usize, n: usize) -> Result<()> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("d and n must be positive".into()));
    }
    if d > MAX_ENUM_D {
        return Err(Error::guard(
            format!("full enumeration in dimension {d}"),
            MAX_ENUM_D,
        ));
    }
    if n > MAX_ENUM_N {
        return Err(Error::guard(
            format!("full enumeration of {n} points"),
            MAX_ENUM_N,
        ));
    }
    Ok(())
}

fn enumerate_with(d: usize, n: usize, placement: Placement) -> Result<Vec<ConfigCode>> {
    check_enum(d, n)?;
    let cyclic = placement == Placement::Cyclic;
    let first: Vec<Vec<u64>> = compositions(n)
        .into_iter()
        .filter(|p| is_min_under(p, cyclic))
        .map(|p| composition_levels(&p))
        .collect();
    let rest = if d == 2 {
        surjective_levels(n, cyclic)
    } else {
        vec![Vec::new()]
    };
    let mut out = Vec::with_capacity(first.len() * rest.len());
    for f in &first {
        for r in &rest {
            let mut levels = vec![f.clone()];
            if d == 2 {
                levels.push(r.clone());
            }
            out.push(ConfigCode {
                d,
                n,
                levels,
                placement,
            });
        }
    }
    Ok(out)
}

/// One representative per class of `n`-point configurations in `T^d`
/// (`d <= 2`) under rotation, reflection and relabeling, at `level / n`.
pub fn enumerate_configs(d: usize, n: usize) -> Result<Vec<ConfigCode>> {
    enumerate_with(d, n, Placement::Cyclic)
}

/// Representatives of weak linear orders (reflection only), at
/// `(level + 1)/(n + 1)`.
pub fn enumerate_linear_configs(d: usize, n: usize) -> Result<Vec<ConfigCode>> {
    enumerate_with(d, n, Placement::Linear)
}

/// Multisets of `n` grid values `1..grid` in one dimension, up to `t -> grid - t`.
pub fn enumerate_grid_configs(n: usize, grid: u64) -> Result<Vec<ConfigCode>> {
    check_enum(1, n)?;
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be at least 2".into()));
    }
    let count = crate::extraction::binomial(grid - 2 + n as u64, n as u64);
    if count > GRID_GUARD.into() {
        return Err(Error::guard(
            format!("grid enumeration of {count} configurations"),
            GRID_GUARD,
        ));
    }
    let mut out = Vec::new();
    let mut v = vec![1u64; n];
    loop {
        let mirrored: Vec<u64> = v.iter().rev().map(|t| grid - t).collect();
        if v <= mirrored {
            out.push(ConfigCode {
                d: 1,
                n,
                levels: vec![v.clone()],
                placement: Placement::Grid(grid),
            });
        }
        // next nondecreasing sequence
        let Some(i) = (0..n).rev().find(|&i| v[i] < grid - 1) else {
            break;
        };
        let x = v[i] + 1;
        v[i..].iter_mut().for_each(|t| *t = x);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSummary {
    pub n: usize,
    pub configs: usize,
    pub shattered: bool,
}

#[derive(Clone, Debug)]
pub struct VcExact {
    pub d: usize,
    pub family: Family,
    pub value: usize,
    pub witness: Option<PointSet>,
    pub certificates: BTreeMap<Mask, Shape>,
    /// The size at which every configuration failed, if reached.
    pub refuted_at: Option<usize>,
    /// Whether the enumeration decides realizability exactly.
    pub complete: bool,
    pub levels: Vec<LevelSummary>,
}

fn configs_for(d: usize, n: usize, family: Family) -> Result<(Vec<ConfigCode>, bool)> {
    match family {
        Family::Boxes => Ok((enumerate_configs(d, n)?, true)),
        Family::Cubes if d == 1 => Ok((enumerate_configs(d, n)?, true)),
        Family::Cubes => Err(Error::guard(
            format!("exact cube enumeration in dimension {d} (realizability depends on distances)"),
            1,
        )),
        Family::StripesAny => Ok((enumerate_linear_configs(d, n)?, true)),
        Family::StripesFixed(l) if d == 1 => {
            let grid = 2 * (n as u64 + 1) * *l.denom() as u64;
            Ok((enumerate_grid_configs(n, grid)?, false))
        }
        Family::StripesFixed(_) => Err(Error::guard(
            format!("fixed-length stripe enumeration in dimension {d}"),
            1,
        )),
    }
}

/// Largest `n <= n_max` with a shattered configuration, stopping at the
/// first size where none is shattered.
pub fn vc_exact(d: usize, family: Family, n_max: usize) -> Result<VcExact> {
    family.validate()?;
    check_enum(d, n_max.max(1))?;
    let mut res = VcExact {
        d,
        family,
        value: 0,
        witness: None,
        certificates: BTreeMap::new(),
        refuted_at: None,
        complete: true,
        levels: Vec::new(),
    };
    for n in 1..=n_max {
        let (configs, complete) = configs_for(d, n, family)?;
        res.complete &= complete;
        let found = configs
            .par_iter()
            .map(|c| -> Result<Option<PointSet>> {
                let ps = c.to_point_set()?;
                Ok(is_shattered(&ps, family)?.then_some(ps))
            })
            .find_first(|r| !matches!(r, Ok(None)));
        res.levels.push(LevelSummary {
            n,
            configs: configs.len(),
            shattered: matches!(found, Some(Ok(_))),
        });
        match found {
            Some(Err(e)) => return Err(e),
            Some(Ok(Some(ps))) => {
                let report = shatter_report(&ps, family)?;
                debug_assert!(report.shattered);
                res.value = n;
                res.witness = Some(ps);
                res.certificates = report.witnesses;
            }
            _ => {
                res.refuted_at = Some(n);
                break;
            }
        }
    }
    Ok(res)
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    pub points: PointSet,
    pub certificates: BTreeMap<Mask, Shape>,
    pub evaluations: u64,
}

/// Hill climbing on the number of box-realizable masks. `budget` counts
/// objective evaluations.
pub fn search_shattered(d: usize, n: usize, budget: u64, seed: u64) -> Result<Option<SearchHit>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("d and n must be positive".into()));
    }
    if n > crate::shatter::GROWTH_GUARD {
        return Err(Error::guard(
            format!("search on {n} points"),
            crate::shatter::GROWTH_GUARD,
        ));
    }
    let family = Family::Boxes;
    let full = 1u64 << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels_to_ps = |lv: &Vec<Vec<u64>>| {
        ConfigCode {
            d,
            n,
            levels: lv.clone(),
            placement: Placement::Cyclic,
        }
        .to_point_set()
    };
    let random_state = |rng: &mut ChaCha8Rng| -> Vec<Vec<u64>> {
        (0..d)
            .map(|_| (0..n).map(|_| rng.gen_range(0..n as u64)).collect())
            .collect()
    };
    let stale_limit = (20 * n * d) as u64;
    let mut evals = 0u64;
    while evals < budget {
        let mut state = random_state(&mut rng);
        let mut score = growth_count(&levels_to_ps(&state)?, family)?;
        evals += 1;
        let mut stale = 0u64;
        while score < full && evals < budget && stale < stale_limit {
            let (k, p) = (rng.gen_range(0..d), rng.gen_range(0..n));
            let old = state[k][p];
            state[k][p] = rng.gen_range(0..n as u64);
            let s = growth_count(&levels_to_ps(&state)?, family)?;
            evals += 1;
            if s > score {
                score = s;
                stale = 0;
            } else {
                if s < score {
                    state[k][p] = old;
                }
                stale += 1;
            }
        }
        if score == full {
            let ps = levels_to_ps(&state)?;
            let report = shatter_report(&ps, family)?;
            if report.shattered {
                return Ok(Some(SearchHit {
                    points: ps,
                    certificates: report.witnesses,
                    evaluations: evals,
                }));
            }
        }
    }
    Ok(None)
}
