//! Pure states of N spins as dense complex amplitude vectors, plus the basis
//! bookkeeping shared by every other module.
//!
//! Convention: spin `j` (1-based) occupies bit `j − 1` of the basis index and
//! an up spin is a set bit, so `|↑↓↓⟩` on three spins is index 1 and `|↓↑↑⟩`
//! is index 6. This makes single-spin operators strided and cheap.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported register: 2^20 amplitudes ≈ 16 MB.
pub const MAX_SPINS: usize = 20;

/// Norm tolerance guaranteed after any constructor or unitary operation.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Orientation of a single spin in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Down,
    Up,
}

/// An ordered assignment of N spin orientations, N ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfig {
    orientations: Vec<Spin>,
}

impl SpinConfig {
    pub fn new(orientations: Vec<Spin>) -> Result<Self> {
        if orientations.is_empty() {
            return Err(Error::InvalidParameter(
                "a spin configuration needs at least one spin".into(),
            ));
        }
        if orientations.len() > MAX_SPINS {
            return Err(Error::RegisterTooLarge {
                n_spins: orientations.len(),
                max: MAX_SPINS,
            });
        }
        Ok(Self { orientations })
    }

    pub fn all_down(n_spins: usize) -> Result<Self> {
        Self::new(vec![Spin::Down; n_spins])
    }

    /// Inverse of [`basis_index`]: bit `j − 1` of `index` is the orientation
    /// of spin `j`.
    pub fn from_index(index: usize, n_spins: usize) -> Result<Self> {
        if n_spins == 0 || n_spins > MAX_SPINS {
            return Err(Error::RegisterTooLarge {
                n_spins,
                max: MAX_SPINS,
            });
        }
        if index >> n_spins != 0 {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_spins} spins"
            )));
        }
        let orientations = (0..n_spins)
            .map(|bit| {
                if index >> bit & 1 == 1 {
                    Spin::Up
                } else {
                    Spin::Down
                }
            })
            .collect();
        Ok(Self { orientations })
    }

    pub fn n_spins(&self) -> usize {
        self.orientations.len()
    }

    pub fn orientations(&self) -> &[Spin] {
        &self.orientations
    }
}

/// Basis index of a configuration: spin j contributes 2^(j−1) when up.
pub fn basis_index(config: &SpinConfig) -> usize {
    config
        .orientations
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == Spin::Up)
        .map(|(bit, _)| 1usize << bit)
        .sum()
}

/// A normalized pure state of `n_spins` spins: 2^N complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    n_spins: usize,
    amplitudes: Vec<Complex64>,
}

impl SpinState {
    /// Wraps an amplitude vector, requiring unit norm within
    /// [`NORM_TOLERANCE`].
    pub fn from_amplitudes(n_spins: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_spins == 0 || n_spins > MAX_SPINS {
            return Err(Error::RegisterTooLarge {
                n_spins,
                max: MAX_SPINS,
            });
        }
        if amplitudes.len() != 1 << n_spins {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: 1 << n_spins,
            });
        }
        let state = Self {
            n_spins,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector has norm {norm}, expected 1 within {NORM_TOLERANCE:.0e}"
            )));
        }
        Ok(state)
    }

    /// Wraps an amplitude vector after rescaling it to unit norm. Rejects
    /// vectors with norm below 1e−12.
    pub fn from_amplitudes_normalized(n_spins: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_spins == 0 || n_spins > MAX_SPINS {
            return Err(Error::RegisterTooLarge {
                n_spins,
                max: MAX_SPINS,
            });
        }
        if amplitudes.len() != 1 << n_spins {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: 1 << n_spins,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidParameter(
                "cannot normalize a (numerically) zero amplitude vector".into(),
            ));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// ℓ² norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Basis-state populations |amplitude|².
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that spin `target` (1-based) is up, marginalized over the
    /// rest of the register.
    pub fn up_population(&self, target: usize) -> Result<f64> {
        if target == 0 || target > self.n_spins {
            return Err(Error::SpinIndexOutOfRange {
                index: target,
                n_spins: self.n_spins,
            });
        }
        let mask = 1usize << (target - 1);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub(crate) fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub(crate) fn from_parts_unchecked(n_spins: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n_spins);
        Self {
            n_spins,
            amplitudes,
        }
    }
}

/// The computational basis state for a configuration: amplitude 1 at
/// `basis_index(config)`, 0 elsewhere.
pub fn product_state(config: &SpinConfig) -> SpinState {
    let dim = 1usize << config.n_spins();
    let mut amplitudes = vec![Complex64::ZERO; dim];
    amplitudes[basis_index(config)] = Complex64::ONE;
    SpinState {
        n_spins: config.n_spins(),
        amplitudes,
    }
}

/// The M-spin GHZ state (|↓⟩^⊗M + |↑⟩^⊗M)/√2, M ≥ 2.
pub fn ghz_state(m_spins: usize) -> Result<SpinState> {
    if m_spins < 2 {
        return Err(Error::InvalidParameter(format!(
            "a GHZ state needs at least 2 spins, got {m_spins}"
        )));
    }
    if m_spins > MAX_SPINS {
        return Err(Error::RegisterTooLarge {
            n_spins: m_spins,
            max: MAX_SPINS,
        });
    }
    let dim = 1usize << m_spins;
    let mut amplitudes = vec![Complex64::ZERO; dim];
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = w;
    amplitudes[dim - 1] = w;
    Ok(SpinState {
        n_spins: m_spins,
        amplitudes,
    })
}

/// |⟨a|b⟩|² — symmetric and invariant under global phases of either state.
pub fn fidelity(a: &SpinState, b: &SpinState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let overlap: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr())
}

/// The partition of basis indices by excitation (up-spin) count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcitationBlocks {
    n_spins: usize,
    blocks: Vec<Vec<usize>>,
}

impl ExcitationBlocks {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Sorted basis indices with exactly `k` up spins.
    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[usize])> {
        self.blocks.iter().enumerate().map(|(k, b)| (k, b.as_slice()))
    }
}

/// Groups the 2^N basis indices by up-spin count; block k has size C(N, k).
pub fn excitation_blocks(n_spins: usize) -> Result<ExcitationBlocks> {
    if n_spins == 0 || n_spins > MAX_SPINS {
        return Err(Error::RegisterTooLarge {
            n_spins,
            max: MAX_SPINS,
        });
    }
    let mut blocks = vec![Vec::new(); n_spins + 1];
    for index in 0..1usize << n_spins {
        blocks[index.count_ones() as usize].push(index);
    }
    Ok(ExcitationBlocks { n_spins, blocks })
}
