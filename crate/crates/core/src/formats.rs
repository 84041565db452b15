//! Plain-text file formats: point sets, symbol matrices and certificates.
//!
//! ```text
//! points:       d n D        then n lines of d numerators t, 0 <= t < D
//! matrix:       c d k        then c lines of d symbols in 0..k
//! certificate:  d n D kind   then one line per mask
//!   boxes    mask=<hex> shape=s_1 .. s_d ; len_1 .. len_d
//!   cubes    mask=<hex> shape=s_1 .. s_d ; edge
//!   stripes  mask=<hex> shape=@anchor s ; len
//! ```
//!
//! Certificate values are numerators over the common denominator `D`.
//! Box and cube factors are closed arcs `[s, s + len]`; stripe
//! cross-sections are open arcs `(s, s + len)`; stripe anchors are 0-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::extraction::SymbolMatrix;
use crate::shatter::Mask;
use crate::torus::{Arc, Closure, Cube, PointSet, Rat, Shape, Stripe, TorusBox};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn ints(line: usize, s: &str, expected: usize, what: &str) -> Result<Vec<u64>> {
    let v = s
        .split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| perr(line, format!("{what}: {t:?} is not a non-negative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.len() != expected {
        return Err(perr(
            line,
            format!("{what}: expected {expected} integers, found {}", v.len()),
        ));
    }
    Ok(v)
}

pub fn write_points(ps: &PointSet) -> String {
    let mut out = format!("{} {} {}\n", ps.dim(), ps.len(), ps.denom());
    for p in ps.all_numers() {
        let row: Vec<String> = p.iter().map(|t| t.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut it = lines(text);
    let (hl, header) = it
        .next()
        .ok_or_else(|| perr(1, "missing header \"d n D\""))?;
    let h = ints(hl, header, 3, "header \"d n D\"")?;
    let (d, n, denom) = (h[0] as usize, h[1] as usize, h[2]);
    if d == 0 || denom == 0 {
        return Err(perr(hl, "d and D must be positive"));
    }
    let mut numers = Vec::with_capacity(n);
    for (ln, l) in it {
        if numers.len() == n {
            return Err(perr(ln, format!("more than {n} point lines")));
        }
        let p = ints(ln, l, d, "point")?;
        if let Some(t) = p.iter().find(|&&t| t >= denom) {
            return Err(perr(ln, format!("numerator {t} is not below D={denom}")));
        }
        numers.push(p);
    }
    if numers.len() != n {
        return Err(perr(
            text.lines().count().max(1),
            format!("expected {n} point lines, found {}", numers.len()),
        ));
    }
    PointSet::new(d, denom, numers).map_err(|e| perr(hl, e.to_string()))
}

pub fn write_matrix(m: &SymbolMatrix) -> String {
    let mut out = format!("{} {} {}\n", m.rows(), m.cols(), m.alphabet());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|t| t.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<SymbolMatrix> {
    let mut it = lines(text);
    let (hl, header) = it
        .next()
        .ok_or_else(|| perr(1, "missing header \"c d k\""))?;
    let h = ints(hl, header, 3, "header \"c d k\"")?;
    let (c, d, k) = (h[0] as usize, h[1] as usize, h[2] as usize);
    if k == 0 {
        return Err(perr(hl, "alphabet size k must be positive"));
    }
    let mut entries = Vec::with_capacity(c * d);
    let mut rows = 0;
    for (ln, l) in it {
        if rows == c {
            return Err(perr(ln, format!("more than {c} matrix rows")));
        }
        let r = ints(ln, l, d, "matrix row")?;
        if let Some(s) = r.iter().find(|&&s| s as usize >= k) {
            return Err(perr(ln, format!("symbol {s} is not below k={k}")));
        }
        entries.extend(r.iter().map(|&s| s as u32));
        rows += 1;
    }
    if rows != c {
        return Err(perr(
            text.lines().count().max(1),
            format!("expected {c} matrix rows, found {rows}"),
        ));
    }
    SymbolMatrix::new(c, d, k, entries).map_err(|e| perr(hl, e.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    Boxes,
    Cubes,
    Stripes,
}

impl CertKind {
    pub fn name(self) -> &'static str {
        match self {
            CertKind::Boxes => "boxes",
            CertKind::Cubes => "cubes",
            CertKind::Stripes => "stripes",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "boxes" => Some(CertKind::Boxes),
            "cubes" => Some(CertKind::Cubes),
            "stripes" => Some(CertKind::Stripes),
            _ => None,
        }
    }

    fn of(shape: &Shape) -> Self {
        match shape {
            Shape::Box(_) => CertKind::Boxes,
            Shape::Cube(_) => CertKind::Cubes,
            Shape::Stripe(_) => CertKind::Stripes,
        }
    }
}

/// A map from masks to witness shapes over a point set of `n` points in `T^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub d: usize,
    pub n: usize,
    pub denom: u64,
    pub kind: CertKind,
    pub entries: BTreeMap<Mask, Shape>,
}

impl Certificate {
    pub fn new(d: usize, n: usize, kind: CertKind, entries: BTreeMap<Mask, Shape>) -> Result<Self> {
        let mut denom: i64 = 1;
        for (m, s) in &entries {
            if CertKind::of(s) != kind {
                return Err(Error::InvalidParameter(format!(
                    "mask {m}: shape does not belong to {}",
                    kind.name()
                )));
            }
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.dim(),
                });
            }
            for r in s.rationals() {
                denom = denom.lcm(r.denom());
            }
        }
        Ok(Certificate {
            d,
            n,
            denom: denom as u64,
            kind,
            entries,
        })
    }

    pub fn write(&self) -> String {
        let num = |r: Rat| (r * Rat::from_integer(self.denom as i64)).to_integer();
        let mut out = format!(
            "{} {} {} {}\n",
            self.d,
            self.n,
            self.denom,
            self.kind.name()
        );
        for (m, s) in &self.entries {
            let _ = write!(out, "mask={m} shape=");
            match s {
                Shape::Box(b) => {
                    let st: Vec<String> = b
                        .arcs()
                        .iter()
                        .map(|a| num(a.start()).to_string())
                        .collect();
                    let ln: Vec<String> = b
                        .arcs()
                        .iter()
                        .map(|a| num(a.length()).to_string())
                        .collect();
                    let _ = writeln!(out, "{} ; {}", st.join(" "), ln.join(" "));
                }
                Shape::Cube(c) => {
                    let st: Vec<String> = c
                        .arcs()
                        .iter()
                        .map(|a| num(a.start()).to_string())
                        .collect();
                    let _ = writeln!(out, "{} ; {}", st.join(" "), num(c.edge()));
                }
                Shape::Stripe(s) => {
                    let _ = writeln!(
                        out,
                        "@{} {} ; {}",
                        s.anchor(),
                        num(s.arc().start()),
                        num(s.length())
                    );
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut it = lines(text);
        let (hl, header) = it
            .next()
            .ok_or_else(|| perr(1, "missing header \"d n D kind\""))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(perr(hl, "header must be \"d n D kind\""));
        }
        let h = ints(hl, &parts[..3].join(" "), 3, "header")?;
        let (d, n, denom) = (h[0] as usize, h[1] as usize, h[2]);
        if d == 0 || denom == 0 || denom > i64::MAX as u64 {
            return Err(perr(hl, "d and D must be positive"));
        }
        let kind = CertKind::parse(parts[3])
            .ok_or_else(|| perr(hl, format!("unknown certificate kind {:?}", parts[3])))?;
        let mut entries = BTreeMap::new();
        for (ln, l) in it {
            let (mask, shape) = parse_entry(ln, l, d, denom, kind)?;
            if n < 64 && mask.0 >> n != 0 {
                return Err(perr(ln, format!("mask {mask} exceeds {n} points")));
            }
            if entries.insert(mask, shape).is_some() {
                return Err(perr(ln, format!("duplicate mask {mask}")));
            }
        }
        Ok(Certificate {
            d,
            n,
            denom,
            kind,
            entries,
        })
    }
}

fn parse_entry(ln: usize, l: &str, d: usize, denom: u64, kind: CertKind) -> Result<(Mask, Shape)> {
    let (left, right) = l
        .split_once(';')
        .ok_or_else(|| perr(ln, "missing ';' between starts and lengths"))?;
    let left = left.trim();
    let rest = left
        .strip_prefix("mask=")
        .ok_or_else(|| perr(ln, "line must start with mask=<hex>"))?;
    let (hex, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    let mask = Mask::from_hex(hex).ok_or_else(|| perr(ln, format!("bad mask {hex:?}")))?;
    let starts = rest
        .trim()
        .strip_prefix("shape=")
        .ok_or_else(|| perr(ln, "missing shape="))?;
    let frac = |t: u64| Rat::new(t as i64, denom as i64);
    let bad = |e: Error| perr(ln, e.to_string());
    let shape = match kind {
        CertKind::Boxes => {
            let s = ints(ln, starts, d, "box starts")?;
            let len = ints(ln, right, d, "box lengths")?;
            let arcs = s
                .iter()
                .zip(&len)
                .map(|(&a, &b)| Arc::from_start_length(frac(a), frac(b), Closure::Closed))
                .collect::<Result<Vec<_>>>()
                .map_err(bad)?;
            Shape::Box(TorusBox::new(arcs).map_err(bad)?)
        }
        CertKind::Cubes => {
            let s = ints(ln, starts, d, "cube starts")?;
            let edge = ints(ln, right, 1, "cube edge")?[0];
            let s: Vec<Rat> = s.into_iter().map(frac).collect();
            Shape::Cube(Cube::from_starts(&s, frac(edge)).map_err(bad)?)
        }
        CertKind::Stripes => {
            let (anchor, s) = starts
                .trim()
                .strip_prefix('@')
                .and_then(|r| r.split_once(char::is_whitespace))
                .ok_or_else(|| perr(ln, "stripe shape must be \"@anchor start\""))?;
            let anchor: usize = anchor
                .parse()
                .map_err(|_| perr(ln, format!("bad anchor {anchor:?}")))?;
            let s = ints(ln, s, 1, "stripe start")?[0];
            let len = ints(ln, right, 1, "stripe length")?[0];
            let arc = Arc::from_start_length(frac(s), frac(len), Closure::Open).map_err(bad)?;
            Shape::Stripe(Stripe::new(anchor, arc, d).map_err(bad)?)
        }
    };
    Ok((mask, shape))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertCheck {
    pub verified: usize,
    /// First mask whose shape cuts out a different subset, with that subset.
    pub mismatch: Option<(Mask, Mask)>,
    /// Every subset of the point set has an entry.
    pub complete: bool,
}

/// Re-checks every entry using containment tests only.
pub fn verify_certificate(ps: &PointSet, cert: &Certificate) -> Result<CertCheck> {
    if cert.d != ps.dim() {
        return Err(Error::DimensionMismatch {
            expected: ps.dim(),
            got: cert.d,
        });
    }
    if cert.n != ps.len() {
        return Err(Error::InvalidParameter(format!(
            "certificate is for {} points, the point set has {}",
            cert.n,
            ps.len()
        )));
    }
    if ps.len() > 64 {
        return Err(Error::guard(
            format!("certificate on {} points", ps.len()),
            64,
        ));
    }
    let points: Vec<_> = ps.points().collect();
    let mut verified = 0;
    for (m, s) in &cert.entries {
        let mut got = Mask::EMPTY;
        for (i, p) in points.iter().enumerate() {
            if s.contains(p)? {
                got.0 |= 1 << i;
            }
        }
        if got != *m {
            return Ok(CertCheck {
                verified,
                mismatch: Some((*m, got)),
                complete: false,
            });
        }
        verified += 1;
    }
    let complete = ps.len() < 64 && cert.entries.len() as u64 == 1u64 << ps.len();
    Ok(CertCheck {
        verified,
        mismatch: None,
        complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::superdiagonal_matrix;
    use crate::shatter::{shatter_report, Family};
    use crate::stripes::{build_stripe_shattered_set, stripe_witness};
    use crate::torus::rat;

    #[test]
    fn points_round_trip() {
        let ps = PointSet::new(2, 7, vec![vec![0, 6], vec![3, 3]]).unwrap();
        let text = write_points(&ps);
        assert_eq!(text, "2 2 7\n0 6\n3 3\n");
        assert_eq!(parse_points(&text).unwrap(), ps);
    }

    #[test]
    fn points_errors_carry_lines() {
        assert_eq!(
            parse_points("1 2 4\n1\n9\n"),
            Err(Error::Parse {
                line: 3,
                msg: "numerator 9 is not below D=4".into()
            })
        );
        assert!(matches!(
            parse_points("1 2 4\n1 2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("1 3 4\n1\n2\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn matrix_round_trip() {
        let m = superdiagonal_matrix(3).unwrap();
        let text = write_matrix(&m);
        assert_eq!(text, "3 4 2\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(matches!(
            parse_matrix("1 2 2\n0 2\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn box_certificate_round_trip() {
        let ps = PointSet::new(2, 4, vec![vec![0, 0], vec![2, 2], vec![1, 3]]).unwrap();
        let report = shatter_report(&ps, Family::Boxes).unwrap();
        let cert = Certificate::new(2, 3, CertKind::Boxes, report.witnesses).unwrap();
        let text = cert.write();
        let back = Certificate::parse(&text).unwrap();
        assert_eq!(back.write(), text);
        let check = verify_certificate(&ps, &back).unwrap();
        assert!(check.mismatch.is_none());
        assert!(check.complete);
    }

    #[test]
    fn stripe_certificate_round_trip() {
        let ps = build_stripe_shattered_set(2, rat(1, 2)).unwrap();
        let entries = (0..8)
            .map(|m| {
                (
                    Mask(m),
                    Shape::Stripe(stripe_witness(2, rat(1, 2), Mask(m)).unwrap()),
                )
            })
            .collect();
        let cert = Certificate::new(4, 3, CertKind::Stripes, entries).unwrap();
        let back = Certificate::parse(&cert.write()).unwrap();
        assert_eq!(back.entries, cert.entries);
        assert!(verify_certificate(&ps, &back).unwrap().complete);
    }

    #[test]
    fn tampered_certificate_detected() {
        let ps = PointSet::new(1, 3, vec![vec![0], vec![1], vec![2]]).unwrap();
        let report = shatter_report(&ps, Family::Cubes).unwrap();
        let cert = Certificate::new(1, 3, CertKind::Cubes, report.witnesses).unwrap();
        let text = cert.write();
        let line = text
            .lines()
            .find(|l| l.starts_with("mask=1 "))
            .unwrap()
            .to_string();
        // shift the witness for {p0} by one unit
        let (head, tail) = line.split_once("shape=").unwrap();
        let (start, rest) = tail.split_once(' ').unwrap();
        let shifted = format!(
            "{head}shape={} {rest}",
            (start.parse::<u64>().unwrap() + cert.denom / 3) % cert.denom
        );
        let tampered = text.replace(&line, &shifted);
        let check = verify_certificate(&ps, &Certificate::parse(&tampered).unwrap()).unwrap();
        assert_eq!(check.mismatch.map(|(m, _)| m), Some(Mask(1)));
    }

    #[test]
    fn certificate_parse_errors() {
        assert!(matches!(
            Certificate::parse("1 1 4 boxes\nmask=1 shape=0 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Certificate::parse("1 1 4 blobs\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
