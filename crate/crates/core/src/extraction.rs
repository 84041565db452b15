//! Matrices with the k-extraction property: every word `b` over the
//! alphabet can be read off the rows in pairwise distinct columns.
//!
//! Two independent deciders are provided. Exhaustive mode runs a maximum
//! matching for every word. Witness mode searches directly for a Hall
//! violator: rows `U`, one symbol per row, whose occurrences all fall in a
//! column set `V` with `|V| = |U| - 1`. Symbols are `0..k`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matching::{hall_violator, max_matching};
use crate::torus::Rat;

pub const EXHAUSTIVE_GUARD: u128 = 10_000_000;
pub const WITNESS_GUARD: u128 = 100_000_000;

/// A `rows x cols` matrix over the alphabet `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolMatrix {
    rows: usize,
    cols: usize,
    k: usize,
    entries: Vec<u32>,
}

impl SymbolMatrix {
    pub fn new(rows: usize, cols: usize, k: usize, entries: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(e) = entries.iter().find(|&&e| e as usize >= k) {
            return Err(Error::OutOfRange(format!(
                "symbol {e} outside alphabet of size {k}"
            )));
        }
        Ok(SymbolMatrix {
            rows,
            cols,
            k,
            entries,
        })
    }

    pub fn from_rows(k: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::new(rows.len(), cols, k, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Columns of row `i` holding `sym`, ascending.
    pub fn support(&self, i: usize, sym: u32) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j) == sym).collect()
    }

    /// `Some(count)` if every symbol occurs exactly `count` times in every row.
    pub fn balanced_count(&self) -> Option<usize> {
        if !self.cols.is_multiple_of(self.k) {
            return None;
        }
        let per = self.cols / self.k;
        (0..self.rows)
            .all(|i| {
                (0..self.k as u32).all(|s| self.row(i).iter().filter(|&&e| e == s).count() == per)
            })
            .then_some(per)
    }

    pub fn without_column(&self, j: usize) -> SymbolMatrix {
        let rows: Vec<Vec<u32>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, &e)| e)
                    .collect()
            })
            .collect();
        SymbolMatrix {
            rows: self.rows,
            cols: self.cols - 1,
            k: self.k,
            entries: rows.concat(),
        }
    }

    pub fn with_column(&self, column: &[u32]) -> Result<SymbolMatrix> {
        if column.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: column.len(),
            });
        }
        let rows: Vec<Vec<u32>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(column[i]);
                r
            })
            .collect();
        SymbolMatrix::new(self.rows, self.cols + 1, self.k, rows.concat())
    }
}

/// The `c x (c+1)` matrix over two symbols with symbol 1 at `(i, i+1)` and
/// symbol 0 elsewhere.
pub fn superdiagonal_matrix(c: usize) -> Result<SymbolMatrix> {
    if c == 0 {
        return Err(Error::InvalidParameter("c must be positive".into()));
    }
    let mut entries = vec![0; c * (c + 1)];
    for i in 0..c {
        entries[i * (c + 1) + i + 1] = 1;
    }
    SymbolMatrix::new(c, c + 1, 2, entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Witness,
}

/// Rows `U`, a symbol per row, and a column set `V` with `|V| = |U| - 1`
/// containing every occurrence of each row's symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureWitness {
    pub rows: Vec<usize>,
    pub symbols: Vec<u32>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionVerdict {
    pub holds: bool,
    pub counterexample_word: Option<Vec<u32>>,
    pub failure_witness: Option<FailureWitness>,
}

impl ExtractionVerdict {
    fn holds() -> Self {
        ExtractionVerdict {
            holds: true,
            counterexample_word: None,
            failure_witness: None,
        }
    }
}

/// Checks the witness condition directly against the matrix.
pub fn is_valid_failure_witness(m: &SymbolMatrix, w: &FailureWitness) -> bool {
    if w.rows.is_empty() || w.rows.len() != w.symbols.len() || w.cols.len() + 1 != w.rows.len() {
        return false;
    }
    let mut rows = w.rows.clone();
    rows.sort_unstable();
    rows.dedup();
    let mut cols = w.cols.clone();
    cols.sort_unstable();
    cols.dedup();
    if rows.len() != w.rows.len() || cols.len() != w.cols.len() {
        return false;
    }
    if rows.iter().any(|&r| r >= m.rows()) || cols.iter().any(|&c| c >= m.cols()) {
        return false;
    }
    w.rows
        .iter()
        .zip(&w.symbols)
        .all(|(&r, &s)| (0..m.cols()).all(|j| m.get(r, j) != s || cols.contains(&j)))
}

fn pow_guard(base: usize, exp: usize, limit: u128, what: &str) -> Result<u128> {
    let mut v: u128 = 1;
    for _ in 0..exp {
        v = v.saturating_mul(base as u128);
        if v > limit {
            return Err(Error::guard(
                format!("{what} search space {base}^{exp}"),
                limit,
            ));
        }
    }
    Ok(v)
}

fn word_of(index: u128, c: usize, k: usize) -> Vec<u32> {
    let mut w = vec![0u32; c];
    let mut x = index;
    for i in (0..c).rev() {
        w[i] = (x % k as u128) as u32;
        x /= k as u128;
    }
    w
}

/// Pairwise distinct columns `j_i` with `M[i][j_i] = word[i]`, if they
/// exist. Ties go to the lowest column index.
pub fn extract_columns(m: &SymbolMatrix, word: &[u32]) -> Result<Option<Vec<usize>>> {
    if word.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: word.len(),
        });
    }
    let adj: Vec<Vec<usize>> = word
        .iter()
        .enumerate()
        .map(|(i, &b)| m.support(i, b))
        .collect();
    let matching = max_matching(&adj, m.cols());
    Ok(matching
        .is_perfect_on_rows()
        .then(|| matching.row_to_col.iter().map(|c| c.unwrap()).collect()))
}

fn check_exhaustive(m: &SymbolMatrix) -> Result<ExtractionVerdict> {
    let total = pow_guard(m.alphabet(), m.rows(), EXHAUSTIVE_GUARD, "exhaustive")?;
    let supports: Vec<Vec<Vec<usize>>> = (0..m.rows())
        .map(|i| (0..m.alphabet() as u32).map(|s| m.support(i, s)).collect())
        .collect();
    let failing = (0..total as u64).into_par_iter().find_first(|&w| {
        let word = word_of(w as u128, m.rows(), m.alphabet());
        let adj: Vec<Vec<usize>> = word
            .iter()
            .enumerate()
            .map(|(i, &b)| supports[i][b as usize].clone())
            .collect();
        !max_matching(&adj, m.cols()).is_perfect_on_rows()
    });
    let Some(w) = failing else {
        return Ok(ExtractionVerdict::holds());
    };
    let word = word_of(w as u128, m.rows(), m.alphabet());
    let adj: Vec<Vec<usize>> = word
        .iter()
        .enumerate()
        .map(|(i, &b)| supports[i][b as usize].clone())
        .collect();
    let matching = max_matching(&adj, m.cols());
    let (rows, cols) = hall_violator(&adj, &matching).expect("deficient matching");
    let symbols = rows.iter().map(|&r| word[r]).collect();
    Ok(ExtractionVerdict {
        holds: false,
        counterexample_word: Some(word),
        failure_witness: Some(FailureWitness {
            rows,
            symbols,
            cols,
        }),
    })
}

/// Fixed-size column set.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ColSet(Vec<u64>);

impl ColSet {
    fn new(n: usize) -> Self {
        ColSet(vec![0; n.div_ceil(64)])
    }

    fn from_cols(n: usize, cols: &[usize]) -> Self {
        let mut s = Self::new(n);
        for &c in cols {
            s.0[c / 64] |= 1 << (c % 64);
        }
        s
    }

    fn union(&self, other: &ColSet) -> ColSet {
        ColSet(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn members(&self) -> Vec<usize> {
        (0..self.0.len() * 64)
            .filter(|&c| self.0[c / 64] >> (c % 64) & 1 == 1)
            .collect()
    }
}

struct WitnessSearch<'a> {
    /// Per row: (symbol, support) candidates in ascending symbol order.
    cands: Vec<Vec<(u32, ColSet, usize)>>,
    m: &'a SymbolMatrix,
}

impl WitnessSearch<'_> {
    fn dfs(
        &self,
        size: usize,
        next_row: usize,
        chosen: &mut Vec<(usize, u32)>,
        union: &ColSet,
    ) -> Option<ColSet> {
        if chosen.len() == size {
            return Some(union.clone());
        }
        let need = size - chosen.len();
        for r in next_row..self.m.rows() {
            if self.m.rows() - r < need {
                break;
            }
            for (sym, supp, len) in &self.cands[r] {
                if *len > size - 1 {
                    continue;
                }
                let u = union.union(supp);
                if u.len() > size - 1 {
                    continue;
                }
                chosen.push((r, *sym));
                if let Some(found) = self.dfs(size, r + 1, chosen, &u) {
                    return Some(found);
                }
                chosen.pop();
            }
        }
        None
    }
}

fn check_witness(m: &SymbolMatrix) -> Result<ExtractionVerdict> {
    pow_guard(m.alphabet() + 1, m.rows(), WITNESS_GUARD, "witness")?;
    let cands = (0..m.rows())
        .map(|i| {
            (0..m.alphabet() as u32)
                .map(|s| {
                    let supp = m.support(i, s);
                    (s, ColSet::from_cols(m.cols(), &supp), supp.len())
                })
                .collect()
        })
        .collect();
    let search = WitnessSearch { cands, m };
    for size in 1..=m.rows() {
        let mut chosen = Vec::new();
        if let Some(union) = search.dfs(size, 0, &mut chosen, &ColSet::new(m.cols())) {
            let mut cols = union.members();
            // pad V up to |U| - 1 with the smallest unused columns
            let mut j = 0;
            while cols.len() + 1 < size && j < m.cols() {
                if !cols.contains(&j) {
                    cols.push(j);
                }
                j += 1;
            }
            cols.sort_unstable();
            let rows: Vec<usize> = chosen.iter().map(|&(r, _)| r).collect();
            let symbols: Vec<u32> = chosen.iter().map(|&(_, s)| s).collect();
            let mut word = vec![0u32; m.rows()];
            for &(r, s) in &chosen {
                word[r] = s;
            }
            return Ok(ExtractionVerdict {
                holds: false,
                counterexample_word: Some(word),
                failure_witness: Some(FailureWitness {
                    rows,
                    symbols,
                    cols,
                }),
            });
        }
    }
    Ok(ExtractionVerdict::holds())
}

/// Decides the k-extraction property for `m`.
pub fn check_extraction(m: &SymbolMatrix, mode: CheckMode) -> Result<ExtractionVerdict> {
    match mode {
        CheckMode::Exhaustive => check_exhaustive(m),
        CheckMode::Witness => check_witness(m),
    }
}

/// Number of symbol repetitions per row, `q m`, required to be integral.
pub fn repetitions(q: Rat, m: u64) -> Result<u64> {
    if q <= Rat::zero() || m == 0 {
        return Err(Error::InvalidParameter(format!(
            "need q > 0 and m > 0, got q={q}, m={m}"
        )));
    }
    let qm = q * Rat::from_integer(m as i64);
    if !qm.is_integer() {
        return Err(Error::InvalidParameter(format!(
            "q*m = {qm} is not an integer"
        )));
    }
    Ok(qm.to_integer() as u64)
}

fn balanced_with(rng: &mut ChaCha8Rng, c: usize, d: usize, k: usize, qm: usize) -> SymbolMatrix {
    let base: Vec<u32> = (0..k as u32)
        .flat_map(|s| std::iter::repeat_n(s, qm))
        .collect();
    let mut entries = Vec::with_capacity(c * d);
    for _ in 0..c {
        let mut row = base.clone();
        for i in (1..row.len()).rev() {
            let j = rng.gen_range(0..=i);
            row.swap(i, j);
        }
        entries.extend(row);
    }
    SymbolMatrix {
        rows: c,
        cols: d,
        k,
        entries,
    }
}

/// A `mk x qmk` matrix whose rows are independent uniform balanced words.
pub fn random_balanced_matrix(m: u64, k: u64, q: Rat, seed: u64) -> Result<SymbolMatrix> {
    let qm = repetitions(q, m)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(balanced_with(
        &mut rng,
        (m * k) as usize,
        (qm * k) as usize,
        k as usize,
        qm as usize,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleOutcome {
    Found { matrix: SymbolMatrix, trials: usize },
    Exhausted { trials: usize },
}

/// Rejection sampling of balanced matrices until one passes the witness-mode
/// check. One seeded stream feeds all trials.
pub fn sample_extraction_matrix(
    m: u64,
    k: u64,
    q: Rat,
    max_trials: usize,
    seed: u64,
) -> Result<SampleOutcome> {
    let qm = repetitions(q, m)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (c, d) = ((m * k) as usize, (qm * k) as usize);
    pow_guard(k as usize + 1, c, WITNESS_GUARD, "witness")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 1..=max_trials {
        let matrix = balanced_with(&mut rng, c, d, k as usize, qm as usize);
        if check_extraction(&matrix, CheckMode::Witness)?.holds {
            return Ok(SampleOutcome::Found {
                matrix,
                trials: trial,
            });
        }
    }
    Ok(SampleOutcome::Exhausted { trials: max_trials })
}

/// `(q - q/k)^{qm} > q m^2 k^3`, compared exactly.
pub fn verify_ext_req(q: Rat, m: u64, k: u64) -> Result<bool> {
    let qm = repetitions(q, m)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (p, r) = (
        BigUint::from(*q.numer() as u64),
        BigUint::from(*q.denom() as u64),
    );
    let k_big = BigUint::from(k);
    let e = u32::try_from(qm).map_err(|_| Error::guard("q*m exponent", u32::MAX))?;
    // (p(k-1) / (r k))^{qm} > p m^2 k^3 / r
    let lhs = (&p * (&k_big - 1u32)).pow(e) * &r;
    let rhs = &p * BigUint::from(m).pow(2) * k_big.pow(3) * (&r * &k_big).pow(e);
    Ok(lhs > rhs)
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact counting quantities bounding how many balanced matrices fail the
/// extraction property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingLedger {
    pub q: Rat,
    pub m: u64,
    pub k: u64,
    pub c: u64,
    pub d: u64,
    pub qm: u64,
    /// Balanced words of length `d`: `d! / (qm)!^k`.
    pub a: BigUint,
    /// Balanced matrices: `A^c`.
    pub t: BigUint,
    /// `F_i` bounds for `i = 1..=c` (index `i - 1`).
    pub f: Vec<BigUint>,
    /// `H_i` bounds for `i = 1..=c`.
    pub h: Vec<BigUint>,
    pub b_bound: BigUint,
    /// `B_bound / T`, an upper bound on the failure probability.
    pub ratio_bound: BigRational,
}

pub const LEDGER_GUARD: u64 = 4096;

pub fn failure_probability_bound(q: Rat, m: u64, k: u64) -> Result<CountingLedger> {
    let qm = repetitions(q, m)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (c, d) = (m * k, qm * k);
    if d > LEDGER_GUARD {
        return Err(Error::guard(
            format!("counting ledger with d={d}"),
            LEDGER_GUARD,
        ));
    }
    let fact_qm = factorial(qm);
    let a = factorial(d) / fact_qm.pow(k as u32);
    let t = a.pow(c as u32);
    let rest = factorial(qm * k - qm) / fact_qm.pow((k - 1) as u32);
    let mut f = Vec::with_capacity(c as usize);
    let mut h = Vec::with_capacity(c as usize);
    for i in 1..=c {
        let fi = BigUint::from(k) * binomial(i - 1, qm) * &rest;
        let hi = binomial(c, i) * binomial(d, i - 1) * fi.pow(i as u32) * a.pow((c - i) as u32);
        f.push(fi);
        h.push(hi);
    }
    let b_bound: BigUint = h.iter().sum();
    let ratio_bound = BigRational::new(BigInt::from(b_bound.clone()), BigInt::from(t.clone()));
    Ok(CountingLedger {
        q,
        m,
        k,
        c,
        d,
        qm,
        a,
        t,
        f,
        h,
        b_bound,
        ratio_bound,
    })
}

impl CountingLedger {
    /// `ratio_bound < 1/q`.
    pub fn below_inverse_q(&self) -> bool {
        let inv_q = BigRational::new(BigInt::from(*self.q.denom()), BigInt::from(*self.q.numer()));
        self.ratio_bound < inv_q
    }

    /// Decimal approximation of the ratio bound, for display only.
    pub fn ratio_display(&self) -> String {
        if self.ratio_bound.is_zero() {
            return "0".into();
        }
        let num = self.ratio_bound.numer().to_f64().unwrap_or(f64::INFINITY);
        let den = self.ratio_bound.denom().to_f64().unwrap_or(f64::INFINITY);
        if num.is_finite() && den.is_finite() {
            return format!("{:.6e}", num / den);
        }
        // fall back to a bit-length estimate
        let bits = self.ratio_bound.numer().bits() as i64 - self.ratio_bound.denom().bits() as i64;
        format!("~2^{bits}")
    }
}

/// `gcd`-reduced rational `qm / m` is `q`; convenience for callers holding `qm`.
pub fn q_from_repetitions(qm: u64, m: u64) -> Rat {
    let g = qm.gcd(&m);
    Rat::new((qm / g) as i64, (m / g) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::rat;

    /// Independent SDR search by plain backtracking.
    fn has_sdr(m: &SymbolMatrix, word: &[u32]) -> bool {
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

    #[test]
    fn superdiagonal_shape() {
        let m = superdiagonal_matrix(2).unwrap();
        assert_eq!(m.row(0), &[0, 1, 0]);
        assert_eq!(m.row(1), &[0, 0, 1]);
        assert_eq!(superdiagonal_matrix(1).unwrap().row(0), &[0, 1]);
        for c in [4, 5] {
            let m = superdiagonal_matrix(c).unwrap();
            assert!(check_extraction(&m, CheckMode::Exhaustive).unwrap().holds);
            assert!(check_extraction(&m, CheckMode::Witness).unwrap().holds);
        }
    }

    #[test]
    fn repeated_row_fails() {
        let m = SymbolMatrix::from_rows(2, &[vec![0, 1], vec![0, 1]]).unwrap();
        for mode in [CheckMode::Exhaustive, CheckMode::Witness] {
            let v = check_extraction(&m, mode).unwrap();
            assert!(!v.holds);
            let w = v.failure_witness.unwrap();
            assert_eq!(w.rows, vec![0, 1]);
            assert_eq!(w.cols.len(), 1);
            assert!(is_valid_failure_witness(&m, &w));
            assert!(!has_sdr(&m, &v.counterexample_word.unwrap()));
        }
        // the word (a2, a2) is also a counterexample: both supports are {col 2}
        assert!(!has_sdr(&m, &[1, 1]));
        assert!(is_valid_failure_witness(
            &m,
            &FailureWitness {
                rows: vec![0, 1],
                symbols: vec![1, 1],
                cols: vec![1]
            }
        ));
    }

    #[test]
    fn deleted_column_leaves_empty_support() {
        let m = superdiagonal_matrix(4).unwrap().without_column(4);
        let v = check_extraction(&m, CheckMode::Witness).unwrap();
        assert!(!v.holds);
        let w = v.failure_witness.unwrap();
        assert_eq!(w.rows, vec![3]);
        assert_eq!(w.symbols, vec![1]);
        assert!(w.cols.is_empty());
        assert!(!check_extraction(&m, CheckMode::Exhaustive).unwrap().holds);
    }

    #[test]
    fn guards_refuse() {
        let m = SymbolMatrix::new(24, 2, 2, vec![0; 48]).unwrap();
        assert!(matches!(
            check_extraction(&m, CheckMode::Exhaustive),
            Err(Error::Guard { .. })
        ));
        let m = SymbolMatrix::new(17, 2, 3, vec![0; 34]).unwrap();
        assert!(matches!(
            check_extraction(&m, CheckMode::Witness),
            Err(Error::Guard { .. })
        ));
    }

    #[test]
    fn balanced_sampling() {
        let a = random_balanced_matrix(1, 2, rat(2, 1), 7).unwrap();
        assert_eq!((a.rows(), a.cols()), (2, 4));
        assert_eq!(a.balanced_count(), Some(2));
        assert_eq!(a, random_balanced_matrix(1, 2, rat(2, 1), 7).unwrap());
        assert!(random_balanced_matrix(3, 2, rat(1, 2), 0).is_err());
    }

    #[test]
    fn balanced_positions_are_uniform() {
        // symbol 0 appears at a fixed position with probability 1/2
        let (trials, mut hits) = (1000u64, [0u64; 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..trials {
            let m = balanced_with(&mut rng, 1, 4, 2, 2);
            for (j, h) in hits.iter_mut().enumerate() {
                *h += (m.get(0, j) == 0) as u64;
            }
        }
        // binomial(1000, 1/2): sigma ~ 15.8, allow 5 sigma
        for h in hits {
            assert!((h as i64 - 500).abs() < 80, "count {h}");
        }
    }

    #[test]
    fn sampler_examples() {
        match sample_extraction_matrix(1, 2, rat(2, 1), 10, 1).unwrap() {
            SampleOutcome::Found { trials, matrix } => {
                assert_eq!(trials, 1);
                assert!(
                    check_extraction(&matrix, CheckMode::Exhaustive)
                        .unwrap()
                        .holds
                );
            }
            other => panic!("{other:?}"),
        }
        match sample_extraction_matrix(2, 2, rat(3, 2), 50, 5).unwrap() {
            SampleOutcome::Found { matrix, trials } => {
                assert_eq!((matrix.rows(), matrix.cols()), (4, 6));
                assert!(trials <= 50);
                assert!(
                    check_extraction(&matrix, CheckMode::Exhaustive)
                        .unwrap()
                        .holds
                );
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            sample_extraction_matrix(1, 2, rat(2, 1), 0, 1).unwrap(),
            SampleOutcome::Exhausted { trials: 0 }
        );
    }

    #[test]
    fn ext_req_examples() {
        assert!(verify_ext_req(rat(2, 1), 14, 4).unwrap());
        assert!(!verify_ext_req(rat(2, 1), 8, 4).unwrap());
        assert!(!verify_ext_req(rat(2, 1), 14, 1).unwrap());
        assert!(verify_ext_req(rat(1, 3), 2, 4).is_err());
    }

    #[test]
    fn ledger_small_case_is_zero() {
        let l = failure_probability_bound(rat(2, 1), 1, 2).unwrap();
        assert_eq!(l.a, BigUint::from(6u32));
        assert_eq!(l.t, BigUint::from(36u32));
        assert!(l.f.iter().all(|f| f.is_zero()));
        assert!(l.ratio_bound.is_zero());
    }

    #[test]
    fn ledger_formulae() {
        // hand-evaluated: q=1, m=1, k=2 -> c=2, d=2, qm=1, A=2, rest=1
        let l = failure_probability_bound(rat(1, 1), 1, 2).unwrap();
        assert_eq!(l.a, BigUint::from(2u32));
        assert_eq!(l.t, BigUint::from(4u32));
        // F_1 = 2*C(0,1)*1 = 0, F_2 = 2*C(1,1)*1 = 2
        assert_eq!(l.f, vec![BigUint::zero(), BigUint::from(2u32)]);
        // H_2 = C(2,2)*C(2,1)*2^2*A^0 = 8
        assert_eq!(l.h[1], BigUint::from(8u32));
        assert_eq!(
            l.ratio_bound,
            BigRational::new(BigInt::from(2), BigInt::from(1))
        );
    }

    #[test]
    fn ledger_below_inverse_q_when_required() {
        let l = failure_probability_bound(rat(2, 1), 14, 4).unwrap();
        assert!(l.t > BigUint::zero());
        assert!(l.below_inverse_q());
    }

    #[test]
    fn modes_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..200 {
            let k = rng.gen_range(1..=3usize);
            let c = rng.gen_range(1..=6usize);
            let d = rng.gen_range(1..=10usize);
            let entries = (0..c * d).map(|_| rng.gen_range(0..k as u32)).collect();
            let m = SymbolMatrix::new(c, d, k, entries).unwrap();
            let ex = check_extraction(&m, CheckMode::Exhaustive).unwrap();
            let wi = check_extraction(&m, CheckMode::Witness).unwrap();
            assert_eq!(ex.holds, wi.holds);
            if let Some(w) = wi.failure_witness {
                assert!(is_valid_failure_witness(&m, &w));
            }
            if let Some(word) = ex.counterexample_word {
                assert!(!has_sdr(&m, &word));
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(2, 3), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u32));
    }
}
