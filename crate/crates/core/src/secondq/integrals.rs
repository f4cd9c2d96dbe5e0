//! Molecular integral files and the one-body absorption.

use std::path::Path;

use crate::dense::{Matrix, C64, ZERO};
use crate::error::{QsimError, Result};

/// Dense rank-4 complex array indexed `[p][q][r][s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    k: usize,
    data: Vec<C64>,
}

impl Tensor4 {
    pub fn zeros(k: usize) -> Self {
        Self { k, data: vec![ZERO; k.pow(4)] }
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    fn index(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.k + q) * self.k + r) * self.k + s
    }

    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> C64 {
        self.data[self.index(p, q, r, s)]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: C64) {
        let i = self.index(p, q, r, s);
        self.data[i] = v;
    }

    pub fn add(&mut self, p: usize, q: usize, r: usize, s: usize, v: C64) {
        let i = self.index(p, q, r, s);
        self.data[i] += v;
    }

    /// Nonzero entries as `((p, q, r, s), value)`.
    pub fn nonzero(&self) -> impl Iterator<Item = ([usize; 4], C64)> + '_ {
        let k = self.k;
        self.data.iter().enumerate().filter(|(_, v)| v.norm() > 0.0).map(move |(i, v)| {
            ([i / (k * k * k), (i / (k * k)) % k, (i / k) % k, i % k], *v)
        })
    }

    /// Largest `|h_pqrs − conj(h_srqp)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let k = self.k;
        let mut worst: f64 = 0.0;
        for p in 0..k {
            for q in 0..k {
                for r in 0..k {
                    for s in 0..k {
                        worst = worst.max((self.get(p, q, r, s) - self.get(s, r, q, p).conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// One- and two-body integrals over `k` fermionic modes (spin orbitals).
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    pub one_body: Matrix,
    pub two_body: Tensor4,
}

impl IntegralSet {
    pub fn new(one_body: Matrix, two_body: Tensor4) -> Result<Self> {
        let k = two_body.dim();
        if one_body.nrows() != k || one_body.ncols() != k {
            return Err(QsimError::DimensionMismatch { expected: k, found: one_body.nrows() });
        }
        Ok(Self { one_body, two_body })
    }

    pub fn n_modes(&self) -> usize {
        self.two_body.dim()
    }
}

const CONFLICT_TOL: f64 = 1e-12;

enum Section {
    OneBody,
    TwoBody,
}

struct Filler {
    one: Matrix,
    one_set: Vec<bool>,
    two: Tensor4,
    two_set: Vec<bool>,
}

impl Filler {
    fn put_one(&mut self, p: usize, q: usize, v: C64, line: usize) -> Result<()> {
        let k = self.one.nrows();
        for (a, b, val) in [(p, q, v), (q, p, v.conj())] {
            let slot = a * k + b;
            if self.one_set[slot] && (self.one[(a, b)] - val).norm() > CONFLICT_TOL {
                return Err(QsimError::Parse {
                    line,
                    message: format!("h[{a}][{b}] = {val} conflicts with earlier value {}", self.one[(a, b)]),
                });
            }
            self.one[(a, b)] = val;
            self.one_set[slot] = true;
        }
        Ok(())
    }

    fn put_two(&mut self, [p, q, r, s]: [usize; 4], v: C64, line: usize) -> Result<()> {
        for (idx, val) in [([p, q, r, s], v), ([s, r, q, p], v.conj())] {
            let slot = self.two.index(idx[0], idx[1], idx[2], idx[3]);
            let old = self.two.data[slot];
            if self.two_set[slot] && (old - val).norm() > CONFLICT_TOL {
                return Err(QsimError::Parse {
                    line,
                    message: format!("h{idx:?} = {val} conflicts with earlier value {old}"),
                });
            }
            self.two.data[slot] = val;
            self.two_set[slot] = true;
        }
        Ok(())
    }
}

fn parse_value(fields: &[&str], line: usize) -> Result<C64> {
    let num = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| QsimError::Parse { line, message: format!("invalid number '{s}'") })
    };
    match fields {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(QsimError::Parse { line, message: "expected a real value and optional imaginary part".into() }),
    }
}

fn parse_indices<const N: usize>(fields: &[&str], k: usize, line: usize) -> Result<[usize; N]> {
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| QsimError::Parse { line, message: format!("invalid index '{f}'") })?;
        if *o >= k {
            return Err(QsimError::Parse { line, message: format!("index {o} out of range for norb {k}") });
        }
    }
    Ok(out)
}

/// Parses the text integral format.
///
/// ```text
/// norb 2
/// 1body
/// 0 0 -1.25
/// 2body
/// 0 1 1 0 0.5
/// ```
///
/// Indices are 0-based, `#` starts a comment, missing entries are zero and
/// Hermitian partners are filled in. Lines before any section marker are
/// one-body entries.
pub fn parse_integrals(text: &str) -> Result<IntegralSet> {
    let mut filler: Option<Filler> = None;
    let mut section = Section::OneBody;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(f) = filler.as_mut() else {
            if fields.len() == 2 && fields[0] == "norb" {
                let k: usize = fields[1]
                    .parse()
                    .ok()
                    .filter(|&k| k > 0 && k <= 64)
                    .ok_or_else(|| QsimError::Parse { line, message: format!("invalid mode count '{}'", fields[1]) })?;
                filler = Some(Filler {
                    one: Matrix::zeros(k, k),
                    one_set: vec![false; k * k],
                    two: Tensor4::zeros(k),
                    two_set: vec![false; k.pow(4)],
                });
                continue;
            }
            return Err(QsimError::Parse { line, message: "missing 'norb <k>' header".into() });
        };
        let k = f.one.nrows();
        match fields[0] {
            "1body" if fields.len() == 1 => section = Section::OneBody,
            "2body" if fields.len() == 1 => section = Section::TwoBody,
            "norb" => return Err(QsimError::Parse { line, message: "duplicate 'norb' header".into() }),
            _ => match section {
                Section::OneBody => {
                    if fields.len() < 3 {
                        return Err(QsimError::Parse { line, message: "expected 'p q value'".into() });
                    }
                    let [p, q] = parse_indices::<2>(&fields[..2], k, line)?;
                    f.put_one(p, q, parse_value(&fields[2..], line)?, line)?;
                }
                Section::TwoBody => {
                    if fields.len() < 5 {
                        return Err(QsimError::Parse { line, message: "expected 'p q r s value'".into() });
                    }
                    let idx = parse_indices::<4>(&fields[..4], k, line)?;
                    f.put_two(idx, parse_value(&fields[4..], line)?, line)?;
                }
            },
        }
    }
    let f = filler.ok_or(QsimError::Parse { line: 1, message: "missing 'norb <k>' header".into() })?;
    IntegralSet::new(f.one, f.two)
}

pub fn load_integrals(path: impl AsRef<Path>) -> Result<IntegralSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| QsimError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_integrals(&text)
}

/// Folds the one-body part into the two-body tensor for the `N`-electron
/// sector, using `a_p†a_q = (N−1)^{-1} Σ_s a_p† a_s† a_s a_q` there.
///
/// The result `h̃` satisfies `Σ h_pq a_p†a_q + ½ Σ h_pqrs a_p†a_q†a_r a_s
/// = ½ Σ h̃_pqrs a_p†a_q†a_r a_s` on that sector.
pub fn reduce_to_two_body(integrals: &IntegralSet, n_electrons: usize) -> Result<Tensor4> {
    if n_electrons < 2 {
        return Err(QsimError::InvalidArgument(format!(
            "one-body absorption needs at least 2 electrons, got {n_electrons}"
        )));
    }
    let k = integrals.n_modes();
    let mut out = integrals.two_body.clone();
    let w = 2.0 / (n_electrons - 1) as f64;
    for p in 0..k {
        for q in 0..k {
            let h = integrals.one_body[(p, q)];
            if h.norm() == 0.0 {
                continue;
            }
            for s in 0..k {
                out.add(p, s, s, q, h * w);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn header_and_default_zero() {
        let ints = parse_integrals("norb 2\n0 0 -1.25\n").unwrap();
        assert_abs_diff_eq!(ints.one_body[(0, 0)].re, -1.25);
        assert_eq!(ints.one_body[(1, 1)], ZERO);
    }

    #[test]
    fn hermitian_partners_are_filled() {
        let ints = parse_integrals("norb 2\n1body\n0 1 0.5 0.25\n2body\n0 0 1 1 0.3 0.1\n").unwrap();
        assert_eq!(ints.one_body[(1, 0)], C64::new(0.5, -0.25));
        assert_eq!(ints.two_body.get(1, 1, 0, 0), C64::new(0.3, -0.1));
        assert_eq!(ints.two_body.hermiticity_defect(), 0.0);
        // self-partnered entries must be real
        assert!(parse_integrals("norb 2\n2body\n0 1 1 0 0.3 0.1\n").is_err());
        let sym = parse_integrals("norb 2\n2body\n0 1 0 1 0.3\n").unwrap();
        assert_eq!(sym.two_body.get(1, 0, 1, 0), C64::new(0.3, 0.0));
        assert_eq!(sym.two_body.hermiticity_defect(), 0.0);
    }

    #[test]
    fn errors_name_the_line() {
        match parse_integrals("norb 2\n0 x 1.0\n") {
            Err(QsimError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_integrals("0 0 1.0\n"), Err(QsimError::Parse { line: 1, .. })));
        assert!(matches!(parse_integrals("# only a comment\n"), Err(QsimError::Parse { .. })));
        assert!(matches!(parse_integrals("norb 2\n0 2 1.0\n"), Err(QsimError::Parse { line: 2, .. })));
        assert!(matches!(
            parse_integrals("norb 2\n0 1 1.0\n1 0 2.0\n"),
            Err(QsimError::Parse { line: 3, .. })
        ));
        assert!(parse_integrals("norb 2\n0 1 1.0\n1 0 1.0\n").is_ok());
        assert!(matches!(
            parse_integrals("norb 2\n2body\n0 1 1\n"),
            Err(QsimError::Parse { line: 3, .. })
        ));
        assert!(matches!(load_integrals("/nonexistent/ints.txt"), Err(QsimError::Io { .. })));
    }

    #[test]
    fn reduction_without_one_body_is_identity() {
        let mut two = Tensor4::zeros(2);
        two.set(0, 1, 1, 0, C64::new(0.7, 0.0));
        let ints = IntegralSet::new(Matrix::zeros(2, 2), two.clone()).unwrap();
        assert_eq!(reduce_to_two_body(&ints, 2).unwrap(), two);
        assert!(reduce_to_two_body(&ints, 1).is_err());
    }
}
