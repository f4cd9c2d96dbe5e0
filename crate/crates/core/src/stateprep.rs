//! Amplitude encoding of real profiles by a tree of controlled `Ry`
//! rotations.
//!
//! Level `j` of the tree rotates qubit `n − 1 − j` (most significant first),
//! conditioned on the `j` already-prepared high bits.

use std::f64::consts::PI;

use crate::dense::C64;
use crate::error::{QsimError, Result};
use crate::state::StateVector;

/// Real profile `f(x)` on `x ∈ [0, 2ⁿ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeProfile {
    n_qubits: usize,
    values: Vec<f64>,
    /// `prefix[i] = Σ_{x < i} f(x)²`.
    prefix: Vec<f64>,
}

impl AmplitudeProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let len = values.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(QsimError::NotPowerOfTwo(len));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(QsimError::NonFiniteParameter(format!("profile value {v}")));
        }
        let mut prefix = Vec::with_capacity(len + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for v in &values {
            acc += v * v;
            prefix.push(acc);
        }
        if acc == 0.0 {
            return Err(QsimError::InvalidArgument("profile is identically zero".into()));
        }
        Ok(Self { n_qubits: len.trailing_zeros() as usize, values, prefix })
    }

    /// Samples `f` at the `2ⁿ` grid indices.
    pub fn from_fn(n_qubits: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..1usize << n_qubits).map(f).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ f²` over `[start, end)`.
    pub fn mass(&self, start: usize, end: usize) -> f64 {
        self.prefix[end] - self.prefix[start]
    }

    /// Normalized target amplitudes `f(x)/‖f‖`.
    pub fn normalized(&self) -> Vec<f64> {
        let norm = self.prefix[self.values.len()].sqrt();
        self.values.iter().map(|v| v / norm).collect()
    }
}

/// `levels[j][b]` is the angle for the block with `j`-bit prefix `b`;
/// `cos²θ` is the fraction of that block's weight in its left half.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleTree {
    pub levels: Vec<Vec<f64>>,
    /// Blocks with zero weight, whose rotation is skipped.
    pub empty: Vec<Vec<bool>>,
}

impl AngleTree {
    /// Number of rotations actually applied.
    pub fn rotation_count(&self) -> usize {
        self.empty.iter().flatten().filter(|e| !**e).count()
    }
}

pub fn rotation_angles(profile: &AmplitudeProfile) -> AngleTree {
    let n = profile.n_qubits;
    let mut levels = Vec::with_capacity(n);
    let mut empty = Vec::with_capacity(n);
    for j in 0..n {
        let block = 1usize << (n - j);
        let (angles, skipped) = (0..1usize << j)
            .map(|b| {
                let start = b * block;
                let total = profile.mass(start, start + block);
                if total == 0.0 {
                    return (0.0, true);
                }
                let left = profile.mass(start, start + block / 2);
                ((left / total).clamp(0.0, 1.0).sqrt().acos(), false)
            })
            .unzip();
        levels.push(angles);
        empty.push(skipped);
    }
    AngleTree { levels, empty }
}

/// Multiplexed `Ry(2θ_b)` on `target`, with `θ_b` selected by the value `b`
/// of the qubits above it.
fn multiplexed_ry(state: &mut StateVector, target: usize, angles: &[f64], skip: &[bool]) {
    let bit = 1usize << target;
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & bit != 0 {
            continue;
        }
        let b = i >> (target + 1);
        if skip[b] {
            continue;
        }
        let (s, c) = angles[b].sin_cos();
        let (a0, a1) = (amps[i], amps[i | bit]);
        amps[i] = a0 * c - a1 * s;
        amps[i | bit] = a0 * s + a1 * c;
    }
}

#[derive(Clone, Debug)]
pub struct Encoding {
    pub state: StateVector,
    pub controlled_rotations: usize,
    pub angles: AngleTree,
}

/// Prepares `Σ f(x)|x⟩/‖f‖` from `|0…0⟩`. Negative values are encoded as
/// `|f|` followed by a π phase.
pub fn amplitude_encode(profile: &AmplitudeProfile) -> Result<Encoding> {
    let n = profile.n_qubits;
    let abs = AmplitudeProfile::new(profile.values.iter().map(|v| v.abs()).collect())?;
    let angles = rotation_angles(&abs);
    let mut state = StateVector::zero(n);
    for j in 0..n {
        multiplexed_ry(&mut state, n - 1 - j, &angles.levels[j], &angles.empty[j]);
    }
    if profile.values.iter().any(|v| *v < 0.0) {
        apply_phase_profile(&mut state, |x| if profile.values[x] < 0.0 { PI } else { 0.0 });
    }
    Ok(Encoding { controlled_rotations: angles.rotation_count(), state, angles })
}

/// Multiplies amplitude `x` by `e^{iφ(x)}`.
pub fn apply_phase_profile(state: &mut StateVector, phi: impl Fn(usize) -> f64) {
    state.apply_diagonal(|x| {
        let p = phi(x);
        if p == 0.0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, p) }
    });
}

/// Probability of each `j`-bit prefix block (most significant bits first).
pub fn block_probabilities(state: &StateVector, j: usize) -> Vec<f64> {
    let n = state.n_qubits();
    let mut out = vec![0.0; 1 << j];
    for (x, p) in state.probabilities().into_iter().enumerate() {
        out[x >> (n - j)] += p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::fidelity;
    use crate::random::{random_state, stream_rng};
    use crate::spectral::qft;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn angle_examples() {
        let uniform = AmplitudeProfile::new(vec![1.0; 4]).unwrap();
        let t = rotation_angles(&uniform);
        assert!(t.levels.iter().flatten().all(|a| (a - FRAC_PI_4).abs() < 1e-15));
        let delta = AmplitudeProfile::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(rotation_angles(&delta).levels.iter().flatten().all(|a| *a == 0.0));
        let s = 12f64.sqrt();
        let p = AmplitudeProfile::new(vec![3.0 / s, 1.0 / s, 1.0 / s, 1.0 / s]).unwrap();
        assert_abs_diff_eq!(rotation_angles(&p).levels[0][0].cos().powi(2), 10.0 / 12.0, epsilon = 1e-15);
        assert!(AmplitudeProfile::new(vec![0.0; 4]).is_err());
        assert!(AmplitudeProfile::new(vec![1.0; 3]).is_err());
    }

    #[test]
    fn small_encodings() {
        let e = amplitude_encode(&AmplitudeProfile::new(vec![1.0, 1.0]).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(e.state.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(e.state.amplitudes()[1].re, h, epsilon = 1e-15);
        let mut v = vec![0.0; 8];
        v[5] = 2.0;
        let e = amplitude_encode(&AmplitudeProfile::new(v).unwrap()).unwrap();
        assert_abs_diff_eq!(e.state.probability(5), 1.0, epsilon = 1e-15);
        assert!(e.controlled_rotations <= 7);
    }

    #[test]
    fn signed_random_profiles() {
        let mut rng = stream_rng(3, 0);
        for n in 1..=6 {
            let v: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = AmplitudeProfile::new(v).unwrap();
            let e = amplitude_encode(&p).unwrap();
            for (a, t) in e.state.amplitudes().iter().zip(p.normalized()) {
                assert!((a - C64::new(t, 0.0)).norm() < 1e-12);
            }
            assert!(e.controlled_rotations < 1 << n);
            assert_abs_diff_eq!(e.state.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn block_probabilities_match_profile() {
        let p = AmplitudeProfile::from_fn(5, |x| ((x as f64) * 0.3).sin() + 1.2).unwrap();
        let e = amplitude_encode(&p).unwrap();
        let total = p.mass(0, 32);
        for j in 0..=5 {
            let blocks = block_probabilities(&e.state, j);
            let size = 32 >> j;
            for (b, got) in blocks.iter().enumerate() {
                assert_abs_diff_eq!(*got, p.mass(b * size, (b + 1) * size) / total, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn phase_profiles() {
        let psi = random_state(3, &mut stream_rng(4, 0));
        let mut s = psi.clone();
        apply_phase_profile(&mut s, |_| 0.0);
        assert_eq!(s, psi);
        apply_phase_profile(&mut s, |_| 1.3);
        assert_abs_diff_eq!(fidelity(&s, &psi).unwrap(), 1.0, epsilon = 1e-14);

        // with the e^{+2πixk/N} transform, a linear phase e^{2πi·3x/N} moves weight from k + 3 to k
        let n = 4;
        let base = amplitude_encode(&AmplitudeProfile::from_fn(n, |x| (-((x as f64) - 7.0).powi(2) / 6.0).exp()).unwrap())
            .unwrap()
            .state;
        let mut shifted = base.clone();
        apply_phase_profile(&mut shifted, |x| 2.0 * PI * 3.0 * x as f64 / 16.0);
        let mut a = base.clone();
        let mut b = shifted;
        qft(&mut a, &[0, 1, 2, 3]).unwrap();
        qft(&mut b, &[0, 1, 2, 3]).unwrap();
        for k in 0..16 {
            assert_abs_diff_eq!(b.probability(k), a.probability((k + 3) % 16), epsilon = 1e-12);
        }
    }
}
