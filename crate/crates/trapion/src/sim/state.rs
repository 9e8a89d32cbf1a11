use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::shape::{IonLevel, RegisterShape, DEFAULT_MAX_AMPLITUDES};
use super::SimError;

/// Default ceiling on probability a sideband pulse may push past the phonon
/// cutoff before the simulator refuses to proceed.
pub const DEFAULT_LEAK_TOLERANCE: f64 = 1e-9;

/// One laser operation: the pulse kind, the addressed ion, the pulse area
/// `theta` (dimensionless; a sideband pulse of area π swaps the `n=0↔1`
/// ladder pair exactly), and the laser phase `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub kind: PulseKind,
    pub ion: usize,
    pub theta: f64,
    pub phi: f64,
}

/// The three coherent operations available on a trapped-ion register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseKind {
    /// On-resonance rotation of the `{|0⟩, |1⟩}` internal state; the phonon
    /// bus is untouched.
    V,
    /// Red-sideband pulse exchanging excitation between the internal state
    /// and the phonon bus: couples `|1⟩|n⟩ ↔ |0⟩|n+1⟩`.
    U,
    /// Red-sideband pulse through the auxiliary level: couples
    /// `|0⟩|n+1⟩ ↔ |aux⟩|n⟩`. Leaves `|1⟩` alone.
    UAux,
}

impl Pulse {
    pub fn new(kind: PulseKind, ion: usize, theta: f64, phi: f64) -> Result<Self, SimError> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(SimError::NonFiniteAngle);
        }
        if theta < 0.0 {
            return Err(SimError::NegativePulseArea(theta));
        }
        Ok(Pulse {
            kind,
            ion,
            theta,
            phi,
        })
    }

    pub fn v(ion: usize, theta: f64, phi: f64) -> Self {
        Pulse::new(PulseKind::V, ion, theta, phi).expect("finite pulse angles")
    }

    pub fn u(ion: usize, theta: f64, phi: f64) -> Self {
        Pulse::new(PulseKind::U, ion, theta, phi).expect("finite pulse angles")
    }

    pub fn uaux(ion: usize, theta: f64, phi: f64) -> Self {
        Pulse::new(PulseKind::UAux, ion, theta, phi).expect("finite pulse angles")
    }

    pub fn is_sideband(&self) -> bool {
        matches!(self.kind, PulseKind::U | PulseKind::UAux)
    }
}

/// Outcome of a projective fluorescence readout of every ion.
///
/// The phonon bus is traced over, not read out. An ion found in the
/// auxiliary level has no defined bit value; it renders as `x` in
/// [`Measurement::bitstring`] and sets [`Measurement::aux_leak`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub levels: Vec<IonLevel>,
    pub aux_leak: bool,
}

impl Measurement {
    pub fn bitstring(&self) -> String {
        self.levels
            .iter()
            .map(|l| match l {
                IonLevel::Zero => '0',
                IonLevel::One => '1',
                IonLevel::Aux => 'x',
            })
            .collect()
    }
}

/// Serialized form of a state vector: amplitudes as `[re, im]` pairs in the
/// normative index order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub num_ions: usize,
    pub phonon_dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

/// Complex amplitudes over `L` three-level ions and a truncated phonon bus.
#[derive(Clone, Debug)]
pub struct StateVector {
    shape: RegisterShape,
    amps: Vec<Complex64>,
    leak_tolerance: f64,
    peak_leakage: f64,
}

impl StateVector {
    /// All ions in `|0⟩`, phonon bus in its Fock ground state.
    pub fn ground(shape: RegisterShape) -> Result<Self, SimError> {
        Self::ground_with_limit(shape, DEFAULT_MAX_AMPLITUDES)
    }

    pub fn ground_with_limit(shape: RegisterShape, max_amplitudes: usize) -> Result<Self, SimError> {
        let dim = shape.dimension(max_amplitudes)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            shape,
            amps,
            leak_tolerance: DEFAULT_LEAK_TOLERANCE,
            peak_leakage: 0.0,
        })
    }

    /// A single basis state.
    pub fn basis(shape: RegisterShape, levels: &[IonLevel], fock: usize) -> Result<Self, SimError> {
        let mut state = Self::ground(shape)?;
        state.amps[0] = Complex64::new(0.0, 0.0);
        state.amps[shape.index_of(levels, fock)] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn from_amplitudes(shape: RegisterShape, amps: Vec<Complex64>) -> Result<Self, SimError> {
        let dim = shape.dimension(DEFAULT_MAX_AMPLITUDES)?;
        if amps.len() != dim {
            return Err(SimError::InvalidShape(format!(
                "expected {dim} amplitudes, got {}",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(SimError::NotNormalized((norm - 1.0).abs()));
        }
        Ok(StateVector {
            shape,
            amps,
            leak_tolerance: DEFAULT_LEAK_TOLERANCE,
            peak_leakage: 0.0,
        })
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, levels: &[IonLevel], fock: usize) -> Complex64 {
        self.amps[self.shape.index_of(levels, fock)]
    }

    pub fn set_leak_tolerance(&mut self, tolerance: f64) {
        self.leak_tolerance = tolerance;
    }

    /// Largest would-leak probability seen by any sideband pulse so far.
    pub fn peak_leakage(&self) -> f64 {
        self.peak_leakage
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reduced population of one ion's internal level.
    pub fn population(&self, ion: usize, level: IonLevel) -> f64 {
        let d = self.shape.phonon_dim();
        let digit = level.digit();
        let mut total = 0.0;
        for (index, amp) in self.amps.iter().enumerate() {
            if self.shape.digit_of_word(index / d, ion) == digit {
                total += amp.norm_sqr();
            }
        }
        total
    }

    /// Population of one Fock level of the phonon bus.
    pub fn phonon_population(&self, fock: usize) -> f64 {
        let d = self.shape.phonon_dim();
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i % d == fock)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Total population outside the qubit levels, summed over all ions.
    pub fn aux_population(&self) -> f64 {
        let d = self.shape.phonon_dim();
        let mut total = 0.0;
        for (index, amp) in self.amps.iter().enumerate() {
            let word = index / d;
            for ion in 0..self.shape.num_ions() {
                if self.shape.digit_of_word(word, ion) == IonLevel::Aux.digit() {
                    total += amp.norm_sqr();
                    break;
                }
            }
        }
        total
    }

    /// `|⟨a|b⟩|²`, insensitive to a global phase difference.
    pub fn fidelity_up_to_global_phase(&self, other: &StateVector) -> Result<f64, SimError> {
        if self.shape != other.shape {
            return Err(SimError::ShapeMismatch);
        }
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    /// On-resonance rotation of ion `ion`'s `{|0⟩, |1⟩}` subspace:
    ///
    /// ```text
    /// |0⟩ → cos(θ/2)|0⟩ − i e^{+iφ} sin(θ/2)|1⟩
    /// |1⟩ → cos(θ/2)|1⟩ − i e^{−iφ} sin(θ/2)|0⟩
    /// ```
    ///
    /// Aux components and the phonon bus are untouched.
    pub fn apply_v_pulse(&mut self, ion: usize, theta: f64, phi: f64) -> Result<(), SimError> {
        self.shape.check_ion(ion)?;
        if !theta.is_finite() || !phi.is_finite() {
            return Err(SimError::NonFiniteAngle);
        }
        let rot = HalfRotation::new(theta, phi);
        let d = self.shape.phonon_dim();
        let suffix = 3usize.pow((self.shape.num_ions() - 1 - ion) as u32);
        let block = suffix * d; // size of one level-digit block for this ion
        let prefixes = 3usize.pow(ion as u32);
        for prefix in 0..prefixes {
            let base = prefix * 3 * block;
            for tail in 0..block {
                let zero = base + tail;
                let one = base + block + tail;
                rot.apply(&mut self.amps, zero, one);
            }
        }
        Ok(())
    }

    /// Red-sideband pulse on ion `ion`. Each ladder pair
    /// `(|0⟩|n+1⟩, |1⟩|n⟩)` is rotated with effective area `θ√(n+1)`; the
    /// area is normalized so the `n=0` pair sees exactly `θ`. The dark state
    /// `|0⟩|g⟩` and all aux components are invariant.
    ///
    /// Errors with [`SimError::TruncationLeakage`] if the amplitude on
    /// `|1⟩|d−1⟩` (which would couple past the cutoff) exceeds the leak
    /// tolerance.
    pub fn apply_u_pulse(&mut self, ion: usize, theta: f64, phi: f64) -> Result<(), SimError> {
        self.apply_sideband(ion, theta, phi, IonLevel::One)
    }

    /// Aux-sideband pulse on ion `ion`: same ladder structure as
    /// [`StateVector::apply_u_pulse`] but coupling `|0⟩|n+1⟩ ↔ |aux⟩|n⟩`,
    /// leaving `|1⟩` components alone.
    pub fn apply_uaux_pulse(&mut self, ion: usize, theta: f64, phi: f64) -> Result<(), SimError> {
        self.apply_sideband(ion, theta, phi, IonLevel::Aux)
    }

    /// Sideband rotation coupling (|0⟩|n+1⟩, |upper⟩|n⟩) for every ladder
    /// rung, where `upper` is `One` for U pulses and `Aux` for aux pulses.
    fn apply_sideband(
        &mut self,
        ion: usize,
        theta: f64,
        phi: f64,
        upper: IonLevel,
    ) -> Result<(), SimError> {
        self.shape.check_ion(ion)?;
        if !theta.is_finite() || !phi.is_finite() {
            return Err(SimError::NonFiniteAngle);
        }
        let d = self.shape.phonon_dim();
        let suffix = 3usize.pow((self.shape.num_ions() - 1 - ion) as u32);
        let block = suffix * d;
        let prefixes = 3usize.pow(ion as u32);
        let upper_off = upper.digit() * block;

        // The |upper⟩|d−1⟩ components have no partner inside the truncation.
        let mut leak = 0.0;
        for prefix in 0..prefixes {
            let base = prefix * 3 * block;
            for s in 0..suffix {
                leak += self.amps[base + upper_off + s * d + (d - 1)].norm_sqr();
            }
        }
        self.peak_leakage = self.peak_leakage.max(leak);
        if leak > self.leak_tolerance {
            return Err(SimError::TruncationLeakage {
                leaked: leak,
                tolerance: self.leak_tolerance,
            });
        }

        // Rung n couples with Rabi area θ√(n+1).
        let rotations: Vec<HalfRotation> = (0..d - 1)
            .map(|n| HalfRotation::new(theta * ((n + 1) as f64).sqrt(), phi))
            .collect();
        for prefix in 0..prefixes {
            let base = prefix * 3 * block;
            for s in 0..suffix {
                for (n, rot) in rotations.iter().enumerate() {
                    let zero_branch = base + s * d + (n + 1); // |0⟩|n+1⟩
                    let upper_branch = base + upper_off + s * d + n; // |upper⟩|n⟩
                    rot.apply(&mut self.amps, zero_branch, upper_branch);
                }
            }
        }
        Ok(())
    }

    /// Apply one [`Pulse`].
    pub fn apply_pulse(&mut self, pulse: &Pulse) -> Result<(), SimError> {
        match pulse.kind {
            PulseKind::V => self.apply_v_pulse(pulse.ion, pulse.theta, pulse.phi),
            PulseKind::U => self.apply_u_pulse(pulse.ion, pulse.theta, pulse.phi),
            PulseKind::UAux => self.apply_uaux_pulse(pulse.ion, pulse.theta, pulse.phi),
        }
    }

    /// Probability of each ion-level word, phonon traced over.
    fn word_probabilities(&self) -> Vec<f64> {
        let d = self.shape.phonon_dim();
        let mut probs = vec![0.0; self.shape.word_count()];
        for (index, amp) in self.amps.iter().enumerate() {
            probs[index / d] += amp.norm_sqr();
        }
        probs
    }

    fn sample_word<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (word, p) in probs.iter().enumerate() {
            if *p > 0.0 {
                last_nonzero = word;
                acc += p;
                if draw < acc {
                    return word;
                }
            }
        }
        last_nonzero
    }

    fn word_levels(&self, word: usize) -> Vec<IonLevel> {
        (0..self.shape.num_ions())
            .map(|ion| IonLevel::from_digit(self.shape.digit_of_word(word, ion)))
            .collect()
    }

    /// Projective readout of every ion, sampled per the Born rule from `rng`.
    /// The state collapses onto the measured ion-level word and is
    /// renormalized; the phonon bus is traced over.
    pub fn measure_all<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Measurement {
        let probs = self.word_probabilities();
        let word = Self::sample_word(&probs, rng);
        let d = self.shape.phonon_dim();
        let scale = 1.0 / probs[word].sqrt();
        for (index, amp) in self.amps.iter_mut().enumerate() {
            if index / d == word {
                *amp *= scale;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        let levels = self.word_levels(word);
        let aux_leak = levels.iter().any(|l| *l == IonLevel::Aux);
        Measurement { levels, aux_leak }
    }

    /// Sample `shots` independent readouts of this state (each shot is a
    /// fresh preparation; the state itself is not collapsed). Returns counts
    /// keyed by bitstring.
    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        shots: u64,
        rng: &mut R,
    ) -> std::collections::BTreeMap<String, u64> {
        let probs = self.word_probabilities();
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..shots {
            let word = Self::sample_word(&probs, rng);
            let levels = self.word_levels(word);
            let m = Measurement {
                aux_leak: levels.iter().any(|l| *l == IonLevel::Aux),
                levels,
            };
            *counts.entry(m.bitstring()).or_insert(0) += 1;
        }
        counts
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            num_ions: self.shape.num_ions(),
            phonon_dim: self.shape.phonon_dim(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_snapshot(snapshot: &Snapshot) -> Result<Self, SimError> {
        let shape = RegisterShape::new(snapshot.num_ions, snapshot.phonon_dim)?;
        let amps = snapshot
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        Self::from_amplitudes(shape, amps)
    }
}

/// Exact 2x2 rotation between a pair of basis amplitudes:
///
/// ```text
/// a0 → cos(θ/2) a0 − i e^{−iφ} sin(θ/2) a1
/// a1 → cos(θ/2) a1 − i e^{+iφ} sin(θ/2) a0
/// ```
struct HalfRotation {
    cos: f64,
    sin_em: Complex64, // −i e^{−iφ} sin(θ/2)
    sin_ep: Complex64, // −i e^{+iφ} sin(θ/2)
}

impl HalfRotation {
    fn new(theta: f64, phi: f64) -> Self {
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        let minus_i = Complex64::new(0.0, -1.0);
        HalfRotation {
            cos: c,
            sin_em: minus_i * Complex64::from_polar(s, -phi),
            sin_ep: minus_i * Complex64::from_polar(s, phi),
        }
    }

    #[inline]
    fn apply(&self, amps: &mut [Complex64], zero: usize, one: usize) {
        let a = amps[zero];
        let b = amps[one];
        amps[zero] = self.cos * a + self.sin_em * b;
        amps[one] = self.sin_ep * a + self.cos * b;
    }
}
