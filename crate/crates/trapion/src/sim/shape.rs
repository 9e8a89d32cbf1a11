use serde::{Deserialize, Serialize};

use super::SimError;

/// Default cap on the number of complex amplitudes a register may hold.
pub const DEFAULT_MAX_AMPLITUDES: usize = 1 << 26;

/// Internal level of a single trapped ion.
///
/// `Zero` and `One` are the long-lived qubit levels. `Aux` is the auxiliary
/// level reached only through aux-sideband pulses; any population left there
/// at readout is reported as an error flag rather than a bit value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IonLevel {
    Zero,
    One,
    Aux,
}

impl IonLevel {
    pub const COUNT: usize = 3;

    pub(crate) fn digit(self) -> usize {
        match self {
            IonLevel::Zero => 0,
            IonLevel::One => 1,
            IonLevel::Aux => 2,
        }
    }

    pub(crate) fn from_digit(d: usize) -> IonLevel {
        match d {
            0 => IonLevel::Zero,
            1 => IonLevel::One,
            2 => IonLevel::Aux,
            _ => unreachable!("base-3 digit out of range"),
        }
    }
}

/// Dimensions of a pulse-level register: `num_ions` three-level ions plus a
/// phonon bus truncated to `phonon_dim` Fock states.
///
/// Total Hilbert-space dimension is `3^num_ions * phonon_dim`. Fock 0 is the
/// motional ground state `|g⟩` and Fock 1 the first excited state `|e⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterShape {
    num_ions: usize,
    phonon_dim: usize,
}

impl RegisterShape {
    pub fn new(num_ions: usize, phonon_dim: usize) -> Result<Self, SimError> {
        if num_ions < 1 {
            return Err(SimError::InvalidShape("need at least one ion".into()));
        }
        if phonon_dim < 2 {
            return Err(SimError::InvalidShape(
                "phonon bus needs at least the |g⟩ and |e⟩ Fock states".into(),
            ));
        }
        Ok(RegisterShape {
            num_ions,
            phonon_dim,
        })
    }

    pub fn num_ions(&self) -> usize {
        self.num_ions
    }

    pub fn phonon_dim(&self) -> usize {
        self.phonon_dim
    }

    /// Total dimension `3^L * d`, guarded against the amplitude cap.
    pub fn dimension(&self, max_amplitudes: usize) -> Result<usize, SimError> {
        let mut dim: u128 = self.phonon_dim as u128;
        for _ in 0..self.num_ions {
            dim = dim.saturating_mul(3);
            if dim > max_amplitudes as u128 {
                return Err(SimError::DimensionOverflow {
                    requested: dim,
                    max: max_amplitudes,
                });
            }
        }
        Ok(dim as usize)
    }

    pub(crate) fn check_ion(&self, ion: usize) -> Result<(), SimError> {
        if ion >= self.num_ions {
            return Err(SimError::IonIndexOutOfRange {
                ion,
                num_ions: self.num_ions,
            });
        }
        Ok(())
    }

    /// Number of base-3 words, `3^L`.
    pub(crate) fn word_count(&self) -> usize {
        3usize.pow(self.num_ions as u32)
    }

    /// Global index of a basis state in the normative order.
    pub fn index_of(&self, levels: &[IonLevel], fock: usize) -> usize {
        assert_eq!(levels.len(), self.num_ions, "level word length mismatch");
        assert!(fock < self.phonon_dim, "Fock index out of range");
        let mut word = 0usize;
        for level in levels {
            word = word * 3 + level.digit();
        }
        word * self.phonon_dim + fock
    }

    /// Decompose a global index into (ion levels, Fock number).
    pub fn levels_of(&self, index: usize) -> (Vec<IonLevel>, usize) {
        let fock = index % self.phonon_dim;
        let mut word = index / self.phonon_dim;
        let mut levels = vec![IonLevel::Zero; self.num_ions];
        for slot in levels.iter_mut().rev() {
            *slot = IonLevel::from_digit(word % 3);
            word /= 3;
        }
        (levels, fock)
    }

    /// Level digit of `ion` within base-3 word `word`.
    pub(crate) fn digit_of_word(&self, word: usize, ion: usize) -> usize {
        (word / 3usize.pow((self.num_ions - 1 - ion) as u32)) % 3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_validation() {
        assert!(RegisterShape::new(0, 2).is_err());
        assert!(RegisterShape::new(1, 1).is_err());
        assert!(RegisterShape::new(1, 2).is_ok());
    }

    #[test]
    fn dimension_guard() {
        let shape = RegisterShape::new(30, 2).unwrap();
        match shape.dimension(DEFAULT_MAX_AMPLITUDES) {
            Err(SimError::DimensionOverflow { .. }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
        let small = RegisterShape::new(2, 3).unwrap();
        assert_eq!(small.dimension(DEFAULT_MAX_AMPLITUDES).unwrap(), 27);
    }

    #[test]
    fn index_round_trip() {
        let shape = RegisterShape::new(3, 4).unwrap();
        for index in 0..shape.dimension(DEFAULT_MAX_AMPLITUDES).unwrap() {
            let (levels, fock) = shape.levels_of(index);
            assert_eq!(shape.index_of(&levels, fock), index);
        }
    }

    #[test]
    fn ion_zero_is_most_significant() {
        let shape = RegisterShape::new(2, 2).unwrap();
        // |1⟩|0⟩ with phonon 0: word = 1*3 + 0 = 3, index = 6.
        assert_eq!(shape.index_of(&[IonLevel::One, IonLevel::Zero], 0), 6);
        // |0⟩|1⟩ with phonon 1: word = 1, index = 3.
        assert_eq!(shape.index_of(&[IonLevel::Zero, IonLevel::One], 1), 3);
    }
}
