#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torusvc::extraction::SymbolMatrix;
use torusvc::PointSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize, denom: u64) -> PointSet {
    let numers = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(0..denom)).collect())
        .collect();
    PointSet::new(d, denom, numers).unwrap()
}

/// Points (as numerators over `g`) inside the closed arc from `a` of length `len`.
fn closed_arc_mask(vals: &[u64], g: u64, a: u64, len: u64) -> u64 {
    let mut m = 0;
    for (i, &v) in vals.iter().enumerate() {
        if (v + g - a) % g <= len {
            m |= 1 << i;
        }
    }
    m
}

fn scaled(ps: &PointSet, k: usize, factor: u64) -> Vec<u64> {
    (0..ps.len()).map(|i| ps.numers(i)[k] * factor).collect()
}

fn and_products(per_dim: &[BTreeSet<u64>]) -> BTreeSet<u64> {
    let mut acc: BTreeSet<u64> = per_dim[0].clone();
    for s in &per_dim[1..] {
        acc = acc
            .iter()
            .flat_map(|a| s.iter().map(move |b| a & b))
            .collect();
    }
    acc
}

/// Every subset a closed box cuts out, by enumerating all arcs with endpoints
/// on the grid `1/(8D)`.
pub fn box_brute(ps: &PointSet) -> BTreeSet<u64> {
    let g = 8 * ps.denom();
    let per_dim: Vec<BTreeSet<u64>> = (0..ps.dim())
        .map(|k| {
            let vals = scaled(ps, k, 8);
            let mut s = BTreeSet::new();
            for a in 0..g {
                for len in 1..g {
                    s.insert(closed_arc_mask(&vals, g, a, len));
                }
            }
            s
        })
        .collect();
    and_products(&per_dim)
}

/// Every subset a closed cube cuts out: common edge on the grid `1/(4D)`,
/// starts on the grid `1/(8D)`.
pub fn cube_brute(ps: &PointSet) -> BTreeSet<u64> {
    let g = 8 * ps.denom();
    let mut out = BTreeSet::new();
    for len in (2..g).step_by(2) {
        let per_dim: Vec<BTreeSet<u64>> = (0..ps.dim())
            .map(|k| {
                let vals = scaled(ps, k, 8);
                (0..g).map(|a| closed_arc_mask(&vals, g, a, len)).collect()
            })
            .collect();
        out.extend(and_products(&per_dim));
    }
    out
}

/// System of distinct representatives by plain backtracking.
pub fn has_sdr(m: &SymbolMatrix, word: &[u32]) -> bool {
    fn go(m: &SymbolMatrix, word: &[u32], row: usize, used: &mut Vec<bool>) -> bool {
        if row == word.len() {
            return true;
        }
        for j in 0..m.cols() {
            if !used[j] && m.get(row, j) == word[row] {
                used[j] = true;
                if go(m, word, row + 1, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(m, word, 0, &mut vec![false; m.cols()])
}

/// Extraction property by trying every word.
pub fn extraction_brute(m: &SymbolMatrix) -> bool {
    let (c, k) = (m.rows(), m.alphabet() as u64);
    (0..k.pow(c as u32)).all(|mut w| {
        let mut word = vec![0u32; c];
        for i in (0..c).rev() {
            word[i] = (w % k) as u32;
            w /= k;
        }
        has_sdr(m, &word)
    })
}

/// `|V| = |U| - 1` and every occurrence of each chosen symbol lies in `V`.
pub fn witness_ok(m: &SymbolMatrix, rows: &[usize], symbols: &[u32], cols: &[usize]) -> bool {
    let u: BTreeSet<usize> = rows.iter().copied().collect();
    let v: BTreeSet<usize> = cols.iter().copied().collect();
    u.len() == rows.len()
        && v.len() == cols.len()
        && rows.len() == symbols.len()
        && v.len() + 1 == u.len()
        && rows
            .iter()
            .zip(symbols)
            .all(|(&r, &s)| (0..m.cols()).all(|j| m.get(r, j) != s || v.contains(&j)))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, c: usize, d: usize, k: usize) -> SymbolMatrix {
    let entries = (0..c * d).map(|_| rng.gen_range(0..k as u32)).collect();
    SymbolMatrix::new(c, d, k, entries).unwrap()
}
