//! Floating-point statevector oracle, independent of the exact tables.
//!
//! Measurements are in the equatorial plane: `cos φ σx + sin φ σy` with
//! `+1` eigenvector `(1, e^{iφ})/√2` (output bit 0) and `-1` eigenvector
//! `(1, -e^{iφ})/√2` (output bit 1). Qubit `i` is bit `i - 1` of the basis
//! index, matching the party order of [`Behavior`] tables.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

use num_complex::Complex64;

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::rational;

pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|self⟩ ⊗ |0⟩` with the new qubit as the highest party.
    pub fn append_zero(&self) -> StateVector {
        let mut amps = self.amps.clone();
        amps.resize(amps.len() * 2, Complex64::new(0.0, 0.0));
        StateVector { n: self.n + 1, amps }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies `cos φ σx + sin φ σy` to qubit `q` (0-based).
    fn apply_equatorial(&mut self, q: usize, phi: f64) {
        let bit = 1usize << q;
        let up = Complex64::from_polar(1.0, phi);
        let down = up.conj();
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                // [[0, e^{-iφ}], [e^{iφ}, 0]]
                self.amps[i] = down * a1;
                self.amps[i | bit] = up * a0;
            }
        }
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n: usize) -> Result<StateVector> {
    if n > MAX_QUBITS {
        return Err(Error::CapacityExceeded { n, max: MAX_QUBITS });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] += FRAC_1_SQRT_2;
    amps[(1 << n) - 1] += FRAC_1_SQRT_2;
    StateVector::new(n, amps)
}

/// Local observable for one party and one input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Observable {
    /// `cos φ σx + sin φ σy`.
    Equatorial(f64),
    /// `β·𝟙`; only usable in expectation values.
    Scalar(f64),
}

/// Observables per party, indexed `[party][input]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquatorialSetting {
    pub observables: Vec<[Observable; 2]>,
}

impl EquatorialSetting {
    /// σx on input 0 and σy on input 1 for every party.
    pub fn pauli_xy(n: usize) -> Self {
        EquatorialSetting {
            observables: vec![[Observable::Equatorial(0.0), Observable::Equatorial(FRAC_PI_2)]; n],
        }
    }

    pub fn uniform(n: usize, phi0: f64, phi1: f64) -> Self {
        EquatorialSetting {
            observables: vec![[Observable::Equatorial(phi0), Observable::Equatorial(phi1)]; n],
        }
    }
}

/// Floating-point table in the same index order as [`Behavior`].
#[derive(Clone, Debug, PartialEq)]
pub struct FloatTable {
    pub n: usize,
    pub table: Vec<f64>,
}

/// Joint outcome probabilities for every input word.
pub fn measure_behavior(state: &StateVector, settings: &EquatorialSetting) -> Result<FloatTable> {
    let n = state.n;
    if settings.observables.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: settings.observables.len(),
        });
    }
    let mut angles = vec![[0.0f64; 2]; n];
    for (i, obs) in settings.observables.iter().enumerate() {
        for x in 0..2 {
            match obs[x] {
                Observable::Equatorial(phi) => angles[i][x] = phi,
                Observable::Scalar(_) => return Err(Error::ScalarObservable { party: i + 1 }),
            }
        }
    }
    let size = 1usize << n;
    let mut table = Vec::with_capacity(size * size);
    for x in 0..size {
        let mut amps = state.amps.clone();
        for (q, pair) in angles.iter().enumerate() {
            let phi = pair[(x >> q) & 1];
            // rows are the conjugated eigenvectors: ⟨v_0| = (1, e^{-iφ})/√2, ⟨v_1| = (1, -e^{-iφ})/√2
            let e = Complex64::from_polar(1.0, -phi);
            let bit = 1usize << q;
            for i in 0..size {
                if i & bit == 0 {
                    let (a0, a1) = (amps[i], amps[i | bit]);
                    amps[i] = (a0 + e * a1) * FRAC_1_SQRT_2;
                    amps[i | bit] = (a0 - e * a1) * FRAC_1_SQRT_2;
                }
            }
        }
        table.extend(amps.iter().map(|a| a.norm_sqr()));
    }
    Ok(FloatTable { n, table })
}

/// `⟨ψ| ⊗_i A_i(x_i) |ψ⟩` for one input word.
pub fn expectation(state: &StateVector, settings: &EquatorialSetting, x: u32) -> Result<f64> {
    if settings.observables.len() != state.n {
        return Err(Error::DimensionMismatch {
            expected: state.n,
            found: settings.observables.len(),
        });
    }
    let mut phi_state = state.clone();
    let mut scale = 1.0;
    for (q, obs) in settings.observables.iter().enumerate() {
        match obs[((x >> q) & 1) as usize] {
            Observable::Equatorial(phi) => phi_state.apply_equatorial(q, phi),
            Observable::Scalar(beta) => scale *= beta,
        }
    }
    Ok(scale * state.inner(&phi_state).re)
}

/// Mermin value `B^n_+` of the biseparable state `|GHZ_{n-1}⟩ ⊗ |0⟩` with
/// equatorial angles `α_0 = -π/(4(n-1))`, `α_1 = -π/2 - π/(4(n-1))` on the
/// first `n - 1` parties and scalar observables `β_0 = -√2 sin(nπ/4)`,
/// `β_1 = √2 cos(nπ/4)` on the last.
pub fn appendix_c_value(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewParties { n, min: 2 });
    }
    let m = (n - 1) as f64;
    let alpha0 = -FRAC_PI_4 / m;
    let alpha1 = -FRAC_PI_2 - FRAC_PI_4 / m;
    let nf = n as f64;
    let beta0 = -SQRT_2 * (nf * FRAC_PI_4).sin();
    let beta1 = SQRT_2 * (nf * FRAC_PI_4).cos();

    let state = ghz_state(n - 1)?.append_zero();
    let mut observables = vec![[Observable::Equatorial(alpha0), Observable::Equatorial(alpha1)]; n - 1];
    observables.push([Observable::Scalar(beta0), Observable::Scalar(beta1)]);
    let settings = EquatorialSetting { observables };

    let mut sum = 0.0;
    for x in 0..(1u32 << n) {
        let w = x.count_ones() as f64;
        let coeff = (FRAC_PI_4 * (1.0 + (nf - 2.0 * w))).cos();
        sum += coeff * expectation(&state, &settings, x)?;
    }
    Ok(sum * 2f64.powf((1.0 - nf) / 2.0))
}

/// Maximum absolute entry difference between an exact and a float table.
pub fn oracle_compare(exact: &Behavior, float: &FloatTable) -> Result<f64> {
    if exact.n() != float.n || exact.table().len() != float.table.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.n(),
            found: float.n,
        });
    }
    Ok(exact
        .table()
        .iter()
        .zip(&float.table)
        .map(|(p, q)| (rational::to_f64(p) - q).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsbox::ghz_behavior;

    #[test]
    fn ghz_state_amplitudes() {
        let s1 = ghz_state(1).unwrap();
        assert!((s1.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s1.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let s2 = ghz_state(2).unwrap();
        let re: Vec<f64> = s2.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
        for n in 1..=MAX_QUBITS {
            assert!((ghz_state(n).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(ghz_state(15).is_err());
    }

    #[test]
    fn ghz3_table_matches_exact() {
        let t = measure_behavior(&ghz_state(3).unwrap(), &EquatorialSetting::pauli_xy(3)).unwrap();
        assert!(oracle_compare(&ghz_behavior(3).unwrap(), &t).unwrap() < 1e-12);
    }

    #[test]
    fn plus_state_under_sigma_x_is_deterministic() {
        let n = 3;
        let amps = vec![Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0); 1 << n];
        let plus = StateVector::new(n, amps).unwrap();
        let t = measure_behavior(&plus, &EquatorialSetting::uniform(n, 0.0, 0.0)).unwrap();
        for x in 0..(1 << n) {
            // all outcomes +1, i.e. output word 0
            assert!((t.table[x << n] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_edge_cases() {
        let g = ghz_behavior(3).unwrap();
        let same = FloatTable {
            n: 3,
            table: g.to_f64_table(),
        };
        assert_eq!(oracle_compare(&g, &same).unwrap(), 0.0);
        let uniform = FloatTable {
            n: 3,
            table: vec![0.125; 64],
        };
        assert!((oracle_compare(&g, &uniform).unwrap() - 0.125).abs() < 1e-15);
        let short = FloatTable {
            n: 2,
            table: vec![0.25; 16],
        };
        assert!(oracle_compare(&g, &short).is_err());
    }

    #[test]
    fn scalar_observables_cannot_be_projected() {
        let s = ghz_state(2).unwrap();
        let settings = EquatorialSetting {
            observables: vec![
                [Observable::Equatorial(0.0), Observable::Equatorial(0.0)],
                [Observable::Scalar(1.0), Observable::Scalar(1.0)],
            ],
        };
        assert_eq!(
            measure_behavior(&s, &settings),
            Err(Error::ScalarObservable { party: 2 })
        );
    }

    #[test]
    fn appendix_c_examples() {
        assert!((appendix_c_value(3).unwrap() - SQRT_2).abs() < 1e-9);
        assert!((appendix_c_value(4).unwrap() - 2.0).abs() < 1e-9);
        assert!((appendix_c_value(6).unwrap() - 4.0).abs() < 1e-9);
    }
}
