//! Pauli strings, the Jordan–Wigner map and string exponentials.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::dense::{self, Matrix, C64, I, ONE, ZERO};
use crate::error::{QsimError, Result};
use crate::gates::{standard_gate, StandardGate};
use crate::operators::HermitianOperator;
use crate::state::StateVector;

use super::integrals::{IntegralSet, Tensor4};

/// Largest register a string can address.
pub const MAX_PAULI_QUBITS: usize = 64;

/// `coeff · ⊗_j σ_j` stored as X and Z bit masks; a site with both bits set
/// carries `Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
    coeff: C64,
}

fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

impl PauliString {
    pub fn new(n_qubits: usize, x: u64, z: u64, coeff: C64) -> Result<Self> {
        if n_qubits > MAX_PAULI_QUBITS {
            return Err(QsimError::DimensionTooLarge { n_qubits, limit: MAX_PAULI_QUBITS });
        }
        let mask = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        if (x | z) & !mask != 0 {
            return Err(QsimError::InvalidArgument(format!("Pauli masks exceed {n_qubits} qubits")));
        }
        if !coeff.re.is_finite() || !coeff.im.is_finite() {
            return Err(QsimError::NonFiniteParameter(format!("Pauli coefficient {coeff}")));
        }
        Ok(Self { n_qubits, x, z, coeff })
    }

    pub fn identity(n_qubits: usize, coeff: C64) -> Result<Self> {
        Self::new(n_qubits, 0, 0, coeff)
    }

    /// Letter `j` of `letters` acts on qubit `j`.
    pub fn from_letters(letters: &str, coeff: C64) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        let chars: Vec<char> = letters.chars().collect();
        for (j, c) in chars.iter().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << j,
                'Y' => {
                    x |= 1 << j;
                    z |= 1 << j;
                }
                'Z' => z |= 1 << j,
                other => return Err(QsimError::InvalidArgument(format!("unknown Pauli letter '{other}'"))),
            }
        }
        Self::new(chars.len(), x, z, coeff)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeff(&self) -> C64 {
        self.coeff
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn with_coeff(mut self, coeff: C64) -> Self {
        self.coeff = coeff;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn letters(&self) -> String {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&q| (self.x | self.z) >> q & 1 == 1).collect()
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            return Err(QsimError::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        // σ = i^{x·z} X^x Z^z per site; Z^z X^x = (−1)^{x·z} X^x Z^z
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() + (other.x & other.z).count_ones() + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        Ok(PauliString { n_qubits: self.n_qubits, x, z, coeff: self.coeff * other.coeff * i_pow(k) })
    }

    /// `σ|b⟩` for a basis index: returns `(target index, phase)`, coefficient excluded.
    pub fn act(&self, b: usize) -> (usize, C64) {
        let sign = if ((b as u64) & self.z).count_ones() % 2 == 1 { -ONE } else { ONE };
        ((b as u64 ^ self.x) as usize, sign * i_pow((self.x & self.z).count_ones()))
    }

    /// Dense matrix including the coefficient.
    pub fn to_dense(&self) -> Result<Matrix> {
        let dim = 1usize << self.n_qubits;
        dense::guard_dimension(dim)?;
        let mut m = Matrix::zeros(dim, dim);
        for b in 0..dim {
            let (t, ph) = self.act(b);
            m[(t, b)] = self.coeff * ph;
        }
        Ok(m)
    }

    /// `amps ← exp(−iθσ) amps` with the coefficient excluded.
    pub fn apply_exp(&self, amps: &mut [C64], theta: f64) {
        let (c, s) = (theta.cos(), theta.sin());
        if self.is_identity() {
            let g = C64::from_polar(1.0, -theta);
            amps.iter_mut().for_each(|a| *a *= g);
            return;
        }
        let x = self.x as usize;
        let low = 1usize << (63 - (self.x.leading_zeros() as usize).min(63)) as u32;
        if x == 0 {
            for (b, a) in amps.iter_mut().enumerate() {
                let (_, ph) = self.act(b);
                *a *= C64::new(c, 0.0) - I * s * ph;
            }
            return;
        }
        // pair b with b ^ x, visiting each pair once via its top flipped bit
        for b in 0..amps.len() {
            if b & low != 0 {
                continue;
            }
            let b2 = b ^ x;
            let (_, p1) = self.act(b); // σ|b⟩ = p1 |b2⟩
            let (_, p2) = self.act(b2); // σ|b2⟩ = p2 |b⟩
            let (a1, a2) = (amps[b], amps[b2]);
            amps[b] = a1 * c - I * s * p2 * a2;
            amps[b2] = a2 * c - I * s * p1 * a1;
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.12e}{:+.12e}i) {}", self.coeff.re, self.coeff.im, self.letters())
    }
}

/// Linear combination of Pauli strings with like terms merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), C64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn add(&mut self, s: &PauliString) {
        *self.terms.entry((s.x, s.z)).or_insert(ZERO) += s.coeff;
    }

    pub fn scaled_add(&mut self, other: &PauliSum, scale: C64) {
        for (&k, &c) in &other.terms {
            *self.terms.entry(k).or_insert(ZERO) += c * scale;
        }
    }

    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        let mut out = PauliSum::new(self.n_qubits);
        for a in self.strings() {
            for b in other.strings() {
                out.add(&a.mul(&b)?);
            }
        }
        Ok(out)
    }

    pub fn strings(&self) -> impl Iterator<Item = PauliString> + '_ {
        self.terms.iter().map(move |(&(x, z), &coeff)| PauliString { n_qubits: self.n_qubits, x, z, coeff })
    }

    /// Strings with `|coeff| ≥ tol`.
    pub fn pruned(&self, tol: f64) -> Vec<PauliString> {
        self.strings().filter(|s| s.coeff.norm() >= tol).collect()
    }
}

/// Jordan–Wigner image of a single ladder operator on mode `j`:
/// `a_j† = Z_0 ⋯ Z_{j−1} (X − iY)/2` and `a_j = Z_0 ⋯ Z_{j−1} (X + iY)/2`.
pub fn ladder(j: usize, dagger: bool, n_modes: usize) -> Result<PauliSum> {
    if j >= n_modes {
        return Err(QsimError::IndexOutOfRange { index: j, n_qubits: n_modes });
    }
    let zs = (1u64 << j) - 1;
    let bit = 1u64 << j;
    let y_coeff = if dagger { C64::new(0.0, -0.5) } else { C64::new(0.0, 0.5) };
    let mut sum = PauliSum::new(n_modes);
    sum.add(&PauliString::new(n_modes, bit, zs, C64::new(0.5, 0.0))?);
    sum.add(&PauliString::new(n_modes, bit, zs | bit, y_coeff)?);
    Ok(sum)
}

/// Jordan–Wigner image of an ordered product of ladder operators
/// `(mode, is_creation)`, leftmost factor first.
pub fn jordan_wigner(monomial: &[(usize, bool)], n_modes: usize) -> Result<Vec<PauliString>> {
    let mut acc = PauliSum::new(n_modes);
    acc.add(&PauliString::identity(n_modes, ONE)?);
    for &(j, dagger) in monomial {
        acc = acc.mul(&ladder(j, dagger, n_modes)?)?;
    }
    Ok(acc.pruned(PRUNE_TOL))
}

pub const PRUNE_TOL: f64 = 1e-12;

/// Hermitian Pauli-sum Hamiltonian with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    strings: Vec<PauliString>,
}

impl QubitHamiltonian {
    /// Merges like strings and drops those below the pruning threshold.
    /// Errors if any merged coefficient keeps an imaginary part.
    pub fn new(n_qubits: usize, strings: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        let mut sum = PauliSum::new(n_qubits);
        for s in strings {
            if s.n_qubits != n_qubits {
                return Err(QsimError::DimensionMismatch { expected: n_qubits, found: s.n_qubits });
            }
            sum.add(&s);
        }
        Self::from_sum(sum)
    }

    fn from_sum(sum: PauliSum) -> Result<Self> {
        let scale = sum.strings().map(|s| s.coeff.norm()).fold(1.0, f64::max);
        let mut strings = Vec::new();
        for s in sum.strings() {
            if s.coeff.im.abs() > 1e-10 * scale {
                return Err(QsimError::NotHermitian(s.coeff.im.abs()));
            }
            if s.coeff.re.abs() >= PRUNE_TOL {
                strings.push(s.with_coeff(C64::new(s.coeff.re, 0.0)));
            }
        }
        Ok(Self { n_qubits: sum.n_qubits, strings })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn to_dense(&self) -> Result<HermitianOperator> {
        let dim = 1usize << self.n_qubits;
        dense::guard_dimension(dim)?;
        let mut m = Matrix::zeros(dim, dim);
        for s in &self.strings {
            for b in 0..dim {
                let (t, ph) = s.act(b);
                m[(t, b)] += s.coeff * ph;
            }
        }
        HermitianOperator::new(m)
    }

    /// Spectrum enclosure `c_I ± Σ|c|` over non-identity strings.
    pub fn coefficient_bounds(&self) -> (f64, f64) {
        let id: f64 = self.strings.iter().filter(|s| s.is_identity()).map(|s| s.coeff.re).sum();
        let r: f64 = self.strings.iter().filter(|s| !s.is_identity()).map(|s| s.coeff.re.abs()).sum();
        (id - r, id + r)
    }

    /// `⟨ψ|H|ψ⟩` without building a matrix.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(QsimError::DimensionMismatch { expected: self.n_qubits, found: state.n_qubits() });
        }
        let a = state.amplitudes();
        let mut e = ZERO;
        for s in &self.strings {
            for (b, amp) in a.iter().enumerate() {
                let (t, ph) = s.act(b);
                e += a[t].conj() * s.coeff * ph * amp;
            }
        }
        Ok(e.re)
    }
}

/// `½ Σ h̃_pqrs a_p†a_q†a_r a_s` mapped to qubits.
pub fn build_qubit_hamiltonian(h: &Tensor4) -> Result<QubitHamiltonian> {
    let k = h.dim();
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-10 * scale {
        return Err(QsimError::NotHermitian(defect));
    }
    let mut sum = PauliSum::new(k);
    add_two_body(&mut sum, h, k)?;
    QubitHamiltonian::from_sum(sum)
}

fn add_two_body(sum: &mut PauliSum, h: &Tensor4, k: usize) -> Result<()> {
    let up: Vec<PauliSum> = (0..k).map(|j| ladder(j, true, k)).collect::<Result<_>>()?;
    let down: Vec<PauliSum> = (0..k).map(|j| ladder(j, false, k)).collect::<Result<_>>()?;
    for ([p, q, r, s], v) in h.nonzero() {
        let term = up[p].mul(&up[q])?.mul(&down[r])?.mul(&down[s])?;
        sum.scaled_add(&term, v * 0.5);
    }
    Ok(())
}

/// `Σ h_pq a_p†a_q + ½ Σ h_pqrs a_p†a_q†a_r a_s` mapped to qubits, valid in
/// every particle-number sector.
pub fn fermionic_hamiltonian(integrals: &IntegralSet) -> Result<QubitHamiltonian> {
    let k = integrals.n_modes();
    let mut sum = PauliSum::new(k);
    for p in 0..k {
        for q in 0..k {
            let v = integrals.one_body[(p, q)];
            if v.norm() > 0.0 {
                sum.scaled_add(&ladder(p, true, k)?.mul(&ladder(q, false, k)?)?, v);
            }
        }
    }
    add_two_body(&mut sum, &integrals.two_body, k)?;
    QubitHamiltonian::from_sum(sum)
}

/// Total number operator `Σ_j (I − Z_j)/2`.
pub fn number_operator(n_modes: usize) -> Result<QubitHamiltonian> {
    let mut strings = vec![PauliString::identity(n_modes, C64::new(n_modes as f64 / 2.0, 0.0))?];
    for j in 0..n_modes {
        strings.push(PauliString::new(n_modes, 0, 1 << j, C64::new(-0.5, 0.0))?);
    }
    QubitHamiltonian::new(n_modes, strings)
}

/// Circuit evolution `exp(−i·angle·c·σ)` for a string with real coefficient
/// `c`: rotate X and Y sites to Z, gather parity with a CNOT ladder, apply
/// `Rz(2·angle·c)` on the last active qubit, then undo.
pub fn evolve_pauli_string(state: &mut StateVector, string: &PauliString, angle: f64) -> Result<()> {
    if string.n_qubits != state.n_qubits() {
        return Err(QsimError::DimensionMismatch { expected: string.n_qubits, found: state.n_qubits() });
    }
    if string.coeff.im.abs() > PRUNE_TOL {
        return Err(QsimError::Precondition(format!("string coefficient {} is not real", string.coeff)));
    }
    let theta = angle * string.coeff.re;
    if !theta.is_finite() {
        return Err(QsimError::NonFiniteParameter(format!("angle {angle}")));
    }
    let active = string.support();
    let Some(&last) = active.last() else {
        let g = C64::from_polar(1.0, -theta);
        state.amplitudes_mut().iter_mut().for_each(|a| *a *= g);
        return Ok(());
    };
    let h = standard_gate(StandardGate::H)?;
    let rx = standard_gate(StandardGate::Rx(FRAC_PI_2))?;
    let x = standard_gate(StandardGate::X)?;
    let rotate = |state: &mut StateVector, inverse: bool| -> Result<()> {
        for &q in &active {
            match string.letter(q) {
                'X' => state.apply(&h, &[q], &[])?,
                'Y' if inverse => state.apply(&rx.adjoint(), &[q], &[])?,
                'Y' => state.apply(&rx, &[q], &[])?,
                _ => {}
            }
        }
        Ok(())
    };
    rotate(state, false)?;
    for w in active.windows(2) {
        state.apply(&x, &[w[1]], &[w[0]])?;
    }
    state.apply(&standard_gate(StandardGate::Rz(2.0 * theta))?, &[last], &[])?;
    for w in active.windows(2).rev() {
        state.apply(&x, &[w[1]], &[w[0]])?;
    }
    rotate(state, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state, stream_rng};
    use crate::metrics::fidelity;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn letters_round_trip_and_products() {
        let s = PauliString::from_letters("XYZI", c(2.0)).unwrap();
        assert_eq!(s.letters(), "XYZI");
        assert_eq!(s.support(), vec![0, 1, 2]);
        let x = PauliString::from_letters("X", ONE).unwrap();
        let y = PauliString::from_letters("Y", ONE).unwrap();
        let z = PauliString::from_letters("Z", ONE).unwrap();
        let xy = x.mul(&y).unwrap();
        assert_eq!((xy.letters(), xy.coeff()), ("Z".to_string(), I));
        let yx = y.mul(&x).unwrap();
        assert_eq!(yx.coeff(), -I);
        let zx = z.mul(&x).unwrap();
        assert_eq!((zx.letters(), zx.coeff()), ("Y".to_string(), I));
        assert_eq!(y.mul(&y).unwrap().coeff(), ONE);
        assert!(PauliString::from_letters("XQ", ONE).is_err());
    }

    #[test]
    fn products_match_dense() {
        let mut rng = stream_rng(4, 0);
        let letters = ['I', 'X', 'Y', 'Z'];
        for _ in 0..50 {
            let a: String = (0..3).map(|_| letters[rng.random_range(0..4)]).collect();
            let b: String = (0..3).map(|_| letters[rng.random_range(0..4)]).collect();
            let pa = PauliString::from_letters(&a, c(0.5)).unwrap();
            let pb = PauliString::from_letters(&b, C64::new(0.0, 2.0)).unwrap();
            let prod = pa.mul(&pb).unwrap().to_dense().unwrap();
            let expected = pa.to_dense().unwrap() * pb.to_dense().unwrap();
            assert!(dense::max_abs_diff(&prod, &expected) < 1e-14, "{a} {b}");
        }
    }

    #[test]
    fn creation_on_mode_one() {
        let img = jordan_wigner(&[(1, true)], 2).unwrap();
        let mut got: Vec<(String, C64)> = img.iter().map(|s| (s.letters(), s.coeff())).collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(got, vec![("ZX".to_string(), c(0.5)), ("ZY".to_string(), C64::new(0.0, -0.5))]);
    }

    #[test]
    fn number_operator_image() {
        let img = jordan_wigner(&[(2, true), (2, false)], 3).unwrap();
        let h = QubitHamiltonian::new(3, img).unwrap();
        let mut got: Vec<(String, f64)> = h.strings().iter().map(|s| (s.letters(), s.coeff().re)).collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(got, vec![("III".to_string(), 0.5), ("IIZ".to_string(), -0.5)]);
    }

    #[test]
    fn empty_and_non_hermitian_inputs() {
        assert!(build_qubit_hamiltonian(&Tensor4::zeros(3)).unwrap().is_empty());
        let mut t = Tensor4::zeros(2);
        t.set(0, 1, 1, 1, c(1.0));
        assert!(matches!(build_qubit_hamiltonian(&t), Err(QsimError::NotHermitian(_))));
        let s = PauliString::from_letters("XY", I).unwrap();
        assert!(matches!(QubitHamiltonian::new(2, [s]), Err(QsimError::NotHermitian(_))));
    }

    #[test]
    fn zz_phases() {
        let zz = PauliString::from_letters("ZZ", ONE).unwrap();
        let theta = 0.37;
        let mut s = StateVector::basis(2, 0).unwrap();
        evolve_pauli_string(&mut s, &zz, theta).unwrap();
        assert!((s.amplitudes()[0] - C64::from_polar(1.0, -theta)).norm() < 1e-14);
        let mut s = StateVector::basis(2, 1).unwrap();
        evolve_pauli_string(&mut s, &zz, theta).unwrap();
        assert!((s.amplitudes()[1] - C64::from_polar(1.0, theta)).norm() < 1e-14);
        let psi = random_state(2, &mut stream_rng(1, 1));
        let mut s = psi.clone();
        evolve_pauli_string(&mut s, &zz, 0.0).unwrap();
        assert_abs_diff_eq!(fidelity(&s, &psi).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn string_evolution_matches_dense_exponential() {
        let mut rng = stream_rng(9, 0);
        let letters = ['I', 'X', 'Y', 'Z'];
        for trial in 0..60 {
            let n = 1 + trial % 4;
            let w: String = (0..n).map(|_| letters[rng.random_range(0..4)]).collect();
            let s = PauliString::from_letters(&w, c(rng.random_range(-2.0..2.0))).unwrap();
            let angle = rng.random_range(-3.0..3.0);
            let psi = random_state(n, &mut rng);
            let mut circ = psi.clone();
            evolve_pauli_string(&mut circ, &s, angle).unwrap();
            let herm = HermitianOperator::new(s.to_dense().unwrap()).unwrap();
            let mut exact = psi.clone();
            exact.apply_dense(&herm.exp(C64::new(0.0, -angle)).unwrap()).unwrap();
            let d: f64 = circ.amplitudes().iter().zip(exact.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(d < 1e-10, "{w}: {d}");
            let mut fast = psi.clone();
            s.apply_exp(fast.amplitudes_mut(), angle * s.coeff().re);
            let d: f64 = fast.amplitudes().iter().zip(exact.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(d < 1e-10, "fast {w}: {d}");
        }
        let complex = PauliString::from_letters("Z", I).unwrap();
        assert!(evolve_pauli_string(&mut StateVector::zero(1), &complex, 1.0).is_err());
    }

    #[test]
    fn bounds_enclose_spectrum() {
        let h = QubitHamiltonian::new(
            2,
            [
                PauliString::from_letters("ZZ", c(0.5)).unwrap(),
                PauliString::from_letters("XI", c(-0.3)).unwrap(),
                PauliString::from_letters("II", c(1.0)).unwrap(),
            ],
        )
        .unwrap();
        let (lo, hi) = h.coefficient_bounds();
        let ev = h.to_dense().unwrap().eigenvalues();
        assert!(lo <= ev[0] + 1e-12 && ev[3] <= hi + 1e-12);
        let psi = random_state(2, &mut stream_rng(2, 2));
        assert_abs_diff_eq!(h.expectation(&psi).unwrap(), psi.expectation(&h.to_dense().unwrap()).unwrap(), epsilon = 1e-12);
    }
}
