//! Upper-bound scanners, the parameter selection for the lifting lower
//! bound, and a comparison table.
//!
//! Each scanner returns the smallest `n >= start` at which a counting
//! inequality `lhs(n) > rhs(n)` holds and keeps holding for the next
//! [`PERSISTENCE`] integers. Decisions are exact: a fixed-point interval
//! for `log2(lhs) - log2(rhs)` settles clear cases, and anything the
//! interval cannot separate from zero goes to a big-integer comparison.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extraction::verify_ext_req;
use crate::torus::Rat;

pub const PERSISTENCE: u64 = 64;

const FRAC: u32 = 40;
const ONE: u128 = 1 << 62;

/// `floor(log2 x)` for `x >= 1`.
pub fn ilog2(x: u64) -> u64 {
    assert!(x > 0, "log2 of zero");
    63 - x.leading_zeros() as u64
}

/// Interval `[lo, hi]` (units of `2^-40`) containing `log2 x`.
fn log2_interval(x: u64) -> (i128, i128) {
    let b = ilog2(x);
    let (mut xl, mut xu) = if b <= 62 {
        let m = (x as u128) << (62 - b);
        (m, m)
    } else {
        let m = (x as u128) >> (b - 62);
        (m, m + 1)
    };
    let (mut fl, mut fu) = (0i128, 0i128);
    for _ in 0..FRAC {
        xl = (xl * xl) >> 62;
        xu = (xu * xu + ONE - 1) >> 62;
        fl <<= 1;
        fu <<= 1;
        if xl >= 2 * ONE {
            fl |= 1;
            xl >>= 1;
        }
        if xu >= 2 * ONE {
            fu |= 1;
            xu = (xu + 1) >> 1;
        }
    }
    let base = (b as i128) << FRAC;
    (base + fl, base + fu + 1)
}

fn scale(c: i128, (lo, hi): (i128, i128)) -> (i128, i128) {
    if c >= 0 {
        (c * lo, c * hi)
    } else {
        (c * hi, c * lo)
    }
}

/// Sign of an interval: `Some(true)` if strictly positive, `Some(false)` if
/// strictly negative, `None` if it straddles zero.
fn sign((lo, hi): (i128, i128)) -> Option<bool> {
    if lo > 0 {
        Some(true)
    } else if hi < 0 {
        Some(false)
    } else {
        None
    }
}

/// Exact test of `log2 x >= p / q`, i.e. `x^q >= 2^p`, for `x >= 1`, `q >= 1`.
pub fn log2_ge(x: u64, p: i128, q: u64) -> bool {
    assert!(x > 0 && q > 0);
    let (lo, hi) = scale(q as i128, log2_interval(x));
    let target = p << FRAC;
    if lo > target {
        return true;
    }
    if hi < target {
        return false;
    }
    if p <= 0 {
        return true;
    }
    // y >= 2^p iff y has more than p bits
    BigUint::from(x).pow(q as u32).bits() > p as u64
}

/// `(2d - 1)!!`.
pub fn double_factorial_odd(d: u64) -> BigUint {
    (1..=d).fold(BigUint::one(), |acc, i| acc * (2 * i - 1))
}

fn log2_double_factorial(d: u64) -> (i128, i128) {
    (1..=d)
        .map(|i| log2_interval(2 * i - 1))
        .fold((0, 0), |(a, b), (lo, hi)| (a + lo, b + hi))
}

trait Inequality: Sync {
    /// Interval for `log2 lhs(n) - log2 rhs(n)`.
    fn gap(&self, n: u64) -> (i128, i128);
    fn exact(&self, n: u64) -> bool;

    fn holds(&self, n: u64) -> bool {
        sign(self.gap(n)).unwrap_or_else(|| self.exact(n))
    }
}

/// `2^n > d (n+1)^2`.
struct StripeCount {
    d: u64,
}

impl Inequality for StripeCount {
    fn gap(&self, n: u64) -> (i128, i128) {
        let (dl, dh) = log2_interval(self.d);
        let (nl, nh) = scale(2, log2_interval(n + 1));
        let base = (n as i128) << FRAC;
        (base - dh - nh, base - dl - nl)
    }

    fn exact(&self, n: u64) -> bool {
        BigUint::one() << n as usize > BigUint::from(self.d) * BigUint::from(n + 1).pow(2)
    }
}

/// `2^n > (n+1)^{2d}`.
struct TrivialCount {
    d: u64,
}

impl Inequality for TrivialCount {
    fn gap(&self, n: u64) -> (i128, i128) {
        let (l, h) = scale(2 * self.d as i128, log2_interval(n + 1));
        let base = (n as i128) << FRAC;
        (base - h, base - l)
    }

    fn exact(&self, n: u64) -> bool {
        BigUint::one() << n as usize > BigUint::from(n + 1).pow(2 * self.d as u32)
    }
}

/// `2^n (2d-1)!! > 2^d n^{2d}`.
struct RefinedCount {
    d: u64,
    log_df: (i128, i128),
    df: OnceLock<BigUint>,
}

impl Inequality for RefinedCount {
    fn gap(&self, n: u64) -> (i128, i128) {
        let (l, h) = scale(2 * self.d as i128, log2_interval(n));
        let base = (n as i128 - self.d as i128) << FRAC;
        (base + self.log_df.0 - h, base + self.log_df.1 - l)
    }

    fn exact(&self, n: u64) -> bool {
        let df = self.df.get_or_init(|| double_factorial_odd(self.d));
        (BigUint::one() << n as usize) * df
            > (BigUint::one() << self.d as usize) * BigUint::from(n).pow(2 * self.d as u32)
    }
}

fn persists(ineq: &dyn Inequality, n: u64) -> bool {
    (n..=n + PERSISTENCE).all(|m| ineq.holds(m))
}

/// Smallest persistent crossing at or after `start`; the inequality is
/// known to be monotone (false then true) from `mono_from` on.
fn persistent_crossing(ineq: &dyn Inequality, start: u64, mono_from: u64) -> u64 {
    let mono_from = mono_from.max(start);
    for n in start..mono_from {
        if ineq.holds(n) && persists(ineq, n) {
            return n;
        }
    }
    let first = if ineq.holds(mono_from) {
        mono_from
    } else {
        let (mut lo, mut step) = (mono_from, 1u64);
        let hi = loop {
            let hi = lo + step;
            if ineq.holds(hi) {
                break hi;
            }
            lo = hi;
            step *= 2;
        };
        // first true in (lo, hi]
        let (mut a, mut b) = (lo, hi);
        while b - a > 1 {
            let mid = a + (b - a) / 2;
            if ineq.holds(mid) {
                b = mid;
            } else {
                a = mid;
            }
        }
        b
    };
    assert!(
        persists(ineq, first),
        "crossing at {first} does not persist"
    );
    first
}

fn check_d(d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if d > u32::MAX as u64 / 2 {
        return Err(Error::guard("dimension", u32::MAX as u64 / 2));
    }
    Ok(())
}

/// Smallest persistent `n` with `2^n > d (n+1)^2`; stripes in `T^d` shatter
/// fewer than `n` points.
pub fn stripe_upper_bound_n(d: u64) -> Result<u64> {
    check_d(d)?;
    Ok(persistent_crossing(&StripeCount { d }, 1, 2))
}

/// Smallest persistent `n` with `2^n > (n+1)^{2d}`.
pub fn trivial_upper_bound_n(d: u64) -> Result<u64> {
    check_d(d)?;
    Ok(persistent_crossing(&TrivialCount { d }, 1, 3 * d))
}

/// Smallest persistent `n >= d` with `2^n (2d-1)!! > 2^d n^{2d}`.
pub fn refined_upper_bound_n(d: u64) -> Result<u64> {
    check_d(d)?;
    let ineq = RefinedCount {
        d,
        log_df: log2_double_factorial(d),
        df: OnceLock::new(),
    };
    Ok(persistent_crossing(&ineq, d, 3 * d))
}

/// `n <= 3 d log2 d`, exactly.
pub fn within_trivial_estimate(d: u64, n: u64) -> bool {
    d >= 2 && log2_ge(d, n as i128, 3 * d)
}

/// `n <= d (log2 d + 3 log2 log2 d) + 1` for `d = 2^e`, `e >= 2`.
pub fn within_refined_estimate(d: u64, n: u64) -> Result<bool> {
    let e = power_of_two_exponent(d)?;
    // 3d log2 e >= n - 1 - d e
    let p = n as i128 - 1 - (d as i128) * (e as i128);
    Ok(log2_ge(e, p, 3 * d))
}

/// `value >= d (log2 d - 4 log2 log2 d)` for `d = 2^e`, `e >= 2`.
pub fn meets_lower_estimate(d: u64, value: u64) -> Result<bool> {
    let e = power_of_two_exponent(d)?;
    // 4d log2 e >= d e - value
    let p = (d as i128) * (e as i128) - value as i128;
    Ok(log2_ge(e, p, 4 * d))
}

fn power_of_two_exponent(d: u64) -> Result<u64> {
    if !d.is_power_of_two() || d < 4 {
        return Err(Error::InvalidParameter(format!(
            "exact log-log comparison needs d = 2^e with e >= 2, got {d}"
        )));
    }
    Ok(ilog2(d))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub d: u64,
    pub f: u64,
    pub q: Rat,
    pub m: u64,
    pub k: u64,
    pub c: u64,
    pub d_prime: u64,
    pub condition_ok: bool,
    pub ext_req: bool,
}

/// Parameters `f`, `q = 1 + 1/f`, `m = 24 f floor(log2 d)`,
/// `k = floor(d / (m q))`.
pub fn choose_parameters(d: u64, f_override: Option<u64>) -> Result<BoundParams> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "d must be at least 2, got {d}"
        )));
    }
    let lg = ilog2(d);
    let f = f_override.unwrap_or(lg);
    if f == 0 {
        return Err(Error::InvalidParameter("f must be positive".into()));
    }
    let q = Rat::new(f as i64 + 1, f as i64);
    // a multiple of f, so q m is an integer
    let m = 24 * f * lg;
    let qm = m / f * (f + 1);
    let k = (d as u128 * f as u128 / (m as u128 * (f as u128 + 1))) as u64;
    if k == 0 {
        return Err(Error::InvalidParameter(format!(
            "d={d} is too small for f={f}: k = floor(d/(mq)) is 0"
        )));
    }
    let c = m * k;
    let d_prime = qm * k;
    debug_assert!(d_prime <= d);
    let condition_ok = d as u128 > 48 * (f as u128 + 2).pow(2) * lg as u128;
    let ext_req = verify_ext_req(q, m, k)?;
    Ok(BoundParams {
        d,
        f,
        q,
        m,
        k,
        c,
        d_prime,
        condition_ok,
        ext_req,
    })
}

/// `c (floor(log2 k) + 1)` cube-shattered points in `T^d`.
pub fn lower_bound_value(d: u64) -> Result<u64> {
    let p = choose_parameters(d, None).map_err(|e| Error::NotCertified {
        d,
        reason: e.to_string(),
    })?;
    if !p.condition_ok {
        return Err(Error::NotCertified {
            d,
            reason: format!("d/floor(log2 d) <= 48(f+2)^2 with f={}", p.f),
        });
    }
    if !p.ext_req {
        return Err(Error::NotCertified {
            d,
            reason: format!(
                "(q - q/k)^(qm) <= q m^2 k^3 for q={}, m={}, k={}",
                p.q, p.m, p.k
            ),
        });
    }
    Ok(p.c * (ilog2(p.k) + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsRow {
    pub d: u64,
    pub stripe_ub: u64,
    pub trivial_ub: u64,
    pub refined_ub: u64,
    pub lower: Option<u64>,
}

pub fn bounds_table(ds: &[u64]) -> Result<Vec<BoundsRow>> {
    ds.par_iter()
        .map(|&d| {
            let lower = match lower_bound_value(d) {
                Ok(v) => Some(v),
                Err(Error::NotCertified { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(BoundsRow {
                d,
                stripe_ub: stripe_upper_bound_n(d)?,
                trivial_ub: trivial_upper_bound_n(d)?,
                refined_ub: refined_upper_bound_n(d)?,
                lower,
            })
        })
        .collect()
}

pub fn format_table(rows: &[BoundsRow]) -> String {
    let mut out = String::from("d\tstripe_ub\ttrivial_ub\trefined_ub\tlower\n");
    for r in rows {
        let lower = r.lower.map_or_else(|| "NA".to_string(), |v| v.to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.d, r.stripe_ub, r.trivial_ub, r.refined_ub, lower
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_true(pred: impl Fn(u64) -> bool, start: u64) -> u64 {
        // plain scan with an explicit persistence check, no intervals
        (start..)
            .find(|&n| (n..=n + PERSISTENCE).all(&pred))
            .unwrap()
    }

    #[test]
    fn log_intervals_bracket() {
        for x in [1u64, 2, 3, 5, 7, 1000, 1 << 40, u64::MAX] {
            let (lo, hi) = log2_interval(x);
            assert!(lo <= hi && hi - lo <= 2);
            // x^1 vs 2^(lo/2^40): check integer part
            assert_eq!((lo >> FRAC) as u64, ilog2(x));
        }
        // log2 3 = 1.58496250072...
        let (lo, hi) = log2_interval(3);
        let t = (158_496_250_072u128 << FRAC) as i128 / 100_000_000_000;
        assert!(lo <= t + 2 && t - 2 <= hi);
    }

    #[test]
    fn log2_ge_exact() {
        assert!(log2_ge(8, 3, 1));
        assert!(!log2_ge(8, 4, 1));
        assert!(log2_ge(3, 3, 2)); // 9 >= 8
        assert!(!log2_ge(3, 16, 10)); // 3^10 = 59049 < 65536
        assert!(log2_ge(3, 15, 10));
        assert!(log2_ge(5, -4, 3));
    }

    #[test]
    fn scanners_match_plain_oracle() {
        for d in 1..=12u64 {
            let s = first_true(
                |n| BigUint::one() << n as usize > BigUint::from(d * (n + 1).pow(2)),
                1,
            );
            assert_eq!(stripe_upper_bound_n(d).unwrap(), s);
            let t = first_true(
                |n| BigUint::one() << n as usize > BigUint::from(n + 1).pow(2 * d as u32),
                1,
            );
            assert_eq!(trivial_upper_bound_n(d).unwrap(), t);
            let df = double_factorial_odd(d);
            let r = first_true(
                |n| {
                    (BigUint::one() << n as usize) * &df
                        > (BigUint::one() << d as usize) * BigUint::from(n).pow(2 * d as u32)
                },
                d,
            );
            assert_eq!(refined_upper_bound_n(d).unwrap(), r);
        }
    }

    #[test]
    fn small_values() {
        assert_eq!(stripe_upper_bound_n(1).unwrap(), 6);
        assert_eq!(trivial_upper_bound_n(1).unwrap(), 6);
        assert_eq!(refined_upper_bound_n(1).unwrap(), 7);
        assert_eq!(double_factorial_odd(3), BigUint::from(15u32));
        for d in 1..=64 {
            assert!(refined_upper_bound_n(d).unwrap() >= 3);
        }
    }

    #[test]
    fn trivial_is_monotone() {
        let v: Vec<u64> = (1..=40)
            .map(|d| trivial_upper_bound_n(d).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn parameters_at_two_pow_20() {
        let p = choose_parameters(1 << 20, None).unwrap();
        assert_eq!(p.f, 20);
        assert_eq!(p.q, Rat::new(21, 20));
        assert_eq!((p.m, p.k, p.c), (9600, 104, 998_400));
        assert!(p.condition_ok && p.ext_req);
        assert!(p.d_prime <= p.d);
        assert_eq!(lower_bound_value(1 << 20).unwrap(), 6_988_800);
    }

    #[test]
    fn below_threshold_not_certified() {
        let p = choose_parameters(1 << 10, None);
        assert!(matches!(p, Err(Error::InvalidParameter(_))) || !p.unwrap().condition_ok);
        assert!(matches!(
            lower_bound_value(1 << 10),
            Err(Error::NotCertified { .. })
        ));
        assert!(matches!(
            lower_bound_value(1),
            Err(Error::NotCertified { .. })
        ));
    }

    #[test]
    fn condition_arithmetic() {
        // f=10, m=2400, q=11/10: k = floor(1024*10/(2400*11)) = 0
        assert!(choose_parameters(1 << 10, None).is_err());
        // a larger override still has f | m
        let p = choose_parameters(1 << 22, Some(7)).unwrap();
        assert_eq!(p.m % 7, 0);
        assert_eq!(
            p.q * Rat::from_integer(p.m as i64),
            Rat::from_integer((p.m / 7 * 8) as i64)
        );
    }

    #[test]
    fn table_rows() {
        let rows = bounds_table(&[1, 2, 3]).unwrap();
        assert!(rows[0].refined_ub >= 3 && rows[0].trivial_ub >= 3);
        assert!(rows[1].refined_ub >= 6 && rows[1].trivial_ub >= 6);
        assert!(rows[2].refined_ub >= 11 && rows[2].trivial_ub >= 11);
        let text = format_table(&rows);
        assert!(text.lines().nth(1).unwrap().ends_with("\tNA"));
    }
}
