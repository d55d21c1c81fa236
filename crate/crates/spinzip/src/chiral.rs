//! The cyclic chiral Hamiltonian on a spin triple and its exact dynamics.
//!
//! On a triple (p, q, r) the Hamiltonian is
//!
//! ```text
//! H = iκ (σ⁺_q σ⁻_p + σ⁺_r σ⁻_q + σ⁺_p σ⁻_r) + h.c.
//! ```
//!
//! acting as the identity on every other spin. H commutes with Σσ^z, so each
//! excitation sector evolves independently. In the one-excitation sector of
//! the triple the eigenfrequencies are {0, +√3κ, −√3κ} and evolving for
//! T = 2π/(3√3κ) advances the up spin one position forward in cycle order
//! (p→q→r→p) with amplitude exactly +1; in the two-excitation sector the
//! *down* spin moves one position backward, because flipping the up/down
//! convention maps H to −H. The matrix element convention ⟨q-up|H|p-up⟩ = +iκ
//! is what produces the forward direction; the `chirality_is_forward` test
//! pins it.
//!
//! Evolution is computed by Hermitian eigendecomposition — exact at these
//! dimensions — either on the full 2^N matrix (N ≤ 12) or as an 8×8 unitary
//! applied to the triple's local factor, which scales to the register limit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_state::{SpinState, MAX_SPINS};

/// Largest register for which a dense 2^N × 2^N Hamiltonian is built.
pub const MAX_DENSE_SPINS: usize = 12;

/// Entrywise tolerance for the Hermiticity check on constructed matrices.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Coupling strength and the ordered spin triple it acts on (1-based,
/// pairwise distinct). ħ = 1, so κ has units of inverse time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralCoupling {
    kappa: f64,
    triple: (usize, usize, usize),
}

impl ChiralCoupling {
    pub fn new(kappa: f64, triple: (usize, usize, usize)) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling strength must be positive and finite, got {kappa}"
            )));
        }
        let (p, q, r) = triple;
        if p == q || q == r || p == r || p == 0 || q == 0 || r == 0 {
            return Err(Error::InvalidTriple(p, q, r));
        }
        Ok(Self { kappa, triple })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn triple(&self) -> (usize, usize, usize) {
        self.triple
    }

    fn validate_register(&self, n_spins: usize) -> Result<()> {
        let (p, q, r) = self.triple;
        if p > n_spins || q > n_spins || r > n_spins {
            return Err(Error::InvalidTriple(p, q, r));
        }
        Ok(())
    }
}

/// A dense Hermitian matrix, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    matrix: DMatrix<Complex64>,
}

impl HamiltonianMatrix {
    /// Wraps a dense matrix, rejecting non-square or non-Hermitian input
    /// (entrywise deviation from the conjugate transpose above
    /// [`HERMITICITY_TOLERANCE`]).
    pub fn from_dense(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        let mut max_deviation: f64 = 0.0;
        for i in 0..matrix.nrows() {
            for j in 0..=i {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                max_deviation = max_deviation.max(dev);
            }
        }
        if max_deviation > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian {
                max_deviation,
                tolerance: HERMITICITY_TOLERANCE,
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

/// Builds the 2^N-dimensional chiral Hamiltonian for a triple inside an
/// N-spin register (identity on the other spins). N is capped at
/// [`MAX_DENSE_SPINS`]; use [`evolve_triple`] beyond that.
pub fn build_chiral_hamiltonian(
    coupling: &ChiralCoupling,
    n_spins: usize,
) -> Result<HamiltonianMatrix> {
    coupling.validate_register(n_spins)?;
    if n_spins > MAX_DENSE_SPINS {
        return Err(Error::RegisterTooLarge {
            n_spins,
            max: MAX_DENSE_SPINS,
        });
    }
    let dim = 1usize << n_spins;
    let (p, q, r) = coupling.triple;
    let hop = Complex64::new(0.0, coupling.kappa);
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    // Cyclic hops p→q, q→r, r→p, each placed with its conjugate partner.
    for &(from, to) in &[(p, q), (q, r), (r, p)] {
        let from_mask = 1usize << (from - 1);
        let to_mask = 1usize << (to - 1);
        for i in 0..dim {
            if i & from_mask != 0 && i & to_mask == 0 {
                let j = (i & !from_mask) | to_mask;
                m[(j, i)] += hop;
                m[(i, j)] += hop.conj();
            }
        }
    }
    HamiltonianMatrix::from_dense(m)
}

/// exp(−iHt) for a Hermitian H, via eigendecomposition.
pub(crate) fn hermitian_propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    let mut scaled = eig.eigenvectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[k];
    }
    scaled * eig.eigenvectors.adjoint()
}

fn conserves_excitation(m: &DMatrix<Complex64>) -> bool {
    let dim = m.nrows();
    if !dim.is_power_of_two() {
        return false;
    }
    for i in 0..dim {
        for j in 0..dim {
            if m[(i, j)] != Complex64::ZERO && i.count_ones() != j.count_ones() {
                return false;
            }
        }
    }
    true
}

/// exp(−iHt)|state⟩ by Hermitian eigendecomposition. When H is exactly
/// block-diagonal over excitation sectors, each sector is diagonalized on
/// its own; otherwise the full matrix is used. Norm is preserved to machine
/// precision either way.
pub fn evolve_exact(state: &SpinState, h: &HamiltonianMatrix, t: f64) -> Result<SpinState> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: h.dim(),
        });
    }
    let mut amps = state.amplitudes().to_vec();
    if conserves_excitation(h.matrix()) {
        let blocks = crate::spin_state::excitation_blocks(state.n_spins())?;
        for (_, indices) in blocks.iter() {
            let sub = DMatrix::from_fn(indices.len(), indices.len(), |a, b| {
                h.matrix()[(indices[a], indices[b])]
            });
            let u = hermitian_propagator(&sub, t);
            let v = nalgebra::DVector::from_iterator(
                indices.len(),
                indices.iter().map(|&i| amps[i]),
            );
            let w = u * v;
            for (a, &i) in indices.iter().enumerate() {
                amps[i] = w[a];
            }
        }
    } else {
        let u = hermitian_propagator(h.matrix(), t);
        let v = nalgebra::DVector::from_vec(amps);
        amps = (u * v).data.into();
    }
    Ok(SpinState::from_parts_unchecked(state.n_spins(), amps))
}

/// Evolves a state under the chiral interaction on a triple by applying the
/// 8×8 propagator to the triple's local factor. Exact, and linear in the
/// register size, so it works up to [`MAX_SPINS`].
pub fn evolve_triple(state: &SpinState, coupling: &ChiralCoupling, t: f64) -> Result<SpinState> {
    coupling.validate_register(state.n_spins())?;
    if state.n_spins() > MAX_SPINS {
        return Err(Error::RegisterTooLarge {
            n_spins: state.n_spins(),
            max: MAX_SPINS,
        });
    }
    // Local space: bit 0 ↔ p, bit 1 ↔ q, bit 2 ↔ r, which is exactly the
    // 3-spin Hamiltonian on the triple (1, 2, 3).
    let local = build_chiral_hamiltonian(&ChiralCoupling::new(coupling.kappa, (1, 2, 3))?, 3)?;
    let u = hermitian_propagator(local.matrix(), t);

    let (p, q, r) = coupling.triple;
    let masks = [1usize << (p - 1), 1usize << (q - 1), 1usize << (r - 1)];
    let triple_mask = masks[0] | masks[1] | masks[2];
    let pattern = |local_index: usize| -> usize {
        let mut bits = 0;
        for (b, &mask) in masks.iter().enumerate() {
            if local_index >> b & 1 == 1 {
                bits |= mask;
            }
        }
        bits
    };
    let patterns: Vec<usize> = (0..8).map(pattern).collect();

    let mut out = state.clone();
    let amps = out.amplitudes_mut();
    let mut local_in = [Complex64::ZERO; 8];
    for base in 0..amps.len() {
        if base & triple_mask != 0 {
            continue;
        }
        for (l, &pat) in patterns.iter().enumerate() {
            local_in[l] = amps[base | pat];
        }
        for (l, &pat) in patterns.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for (k, &amp) in local_in.iter().enumerate() {
                acc += u[(l, k)] * amp;
            }
            amps[base | pat] = acc;
        }
    }
    Ok(out)
}

/// The paper-basis closed-form amplitudes for |↑↓↓⟩ evolving under the
/// three-spin chiral Hamiltonian, on the ordered one-excitation basis
/// (|↑↓↓⟩, |↓↑↓⟩, |↓↓↑⟩):
///
/// ```text
/// c_j(t) = (1 + 2cos(√3κt − (j−1)·2π/3)) / 3
/// ```
///
/// The amplitudes are purely real in this basis and satisfy Σc_j² = 1.
pub fn analytic_three_spin_amplitudes(t: f64, kappa: f64) -> [f64; 3] {
    assert!(kappa > 0.0, "coupling strength must be positive");
    let phase = 3.0_f64.sqrt() * kappa * t;
    let third = 2.0 * std::f64::consts::FRAC_PI_3;
    [
        (1.0 + 2.0 * phase.cos()) / 3.0,
        (1.0 + 2.0 * (phase - third).cos()) / 3.0,
        (1.0 + 2.0 * (phase + third).cos()) / 3.0,
    ]
}

/// One rotation step T = 2π/(3√3κ): the time after which the chiral
/// rotation advances a one-excitation state by one position.
pub fn rotation_period(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coupling strength must be positive and finite, got {kappa}"
        )));
    }
    Ok(std::f64::consts::TAU / (3.0 * 3.0_f64.sqrt() * kappa))
}

/// The analytic eigensystem of the one-excitation sector, on the ordered
/// basis (|↑↓↓⟩, |↓↑↓⟩, |↓↓↑⟩).
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralEigensystem {
    /// {0, +√3κ, −√3κ}.
    pub eigenvalues: [f64; 3],
    /// Normalized eigenvectors, one row per eigenvalue.
    pub eigenvectors: [[Complex64; 3]; 3],
}

/// Eigenvalues {0, √3κ, −√3κ} with eigenvectors
/// (1, ω^k, ω^{2k})/√3 for ω = e^{i2π/3}, k = 0, 1, 2.
pub fn chiral_eigensystem(kappa: f64) -> ChiralEigensystem {
    assert!(kappa > 0.0, "coupling strength must be positive");
    let sqrt3 = 3.0_f64.sqrt();
    let omega = |k: i32| Complex64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3 * k as f64);
    let norm = 1.0 / sqrt3;
    let row = |k: i32| {
        [
            Complex64::new(norm, 0.0),
            omega(k) * norm,
            omega(2 * k) * norm,
        ]
    };
    ChiralEigensystem {
        eigenvalues: [0.0, sqrt3 * kappa, -sqrt3 * kappa],
        eigenvectors: [row(0), row(1), row(2)],
    }
}
