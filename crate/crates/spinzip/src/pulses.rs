//! Ideal (instantaneous) single-spin rotations.
//!
//! A pulse of angle θ about axis n̂ applies exp(−iθ n̂·σ/2) to the target
//! spin and the identity elsewhere. Flips are driven about x, where
//! exp(−iπσ_x/2) = −iσ_x multiplies *both* components by the same −i, so a
//! flip never introduces a relative phase between superposition branches.
//! The superposition pulse of the zipping schedule is driven about y,
//! because R_y(π/2)|↓⟩ = (|↓⟩ + |↑⟩)/√2 splits with a real, equal-sign
//! amplitude pair; the x-axis equivalent splits as (|↓⟩ − i|↑⟩)/√2 and that
//! −i survives to the end of any schedule built on it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin_state::SpinState;

/// Rotation axis in the equatorial plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A single-spin rotation: target index (1-based), angle in radians, axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOp {
    pub target: usize,
    pub angle: f64,
    pub axis: Axis,
}

impl PulseOp {
    /// π flip about x.
    pub fn pi(target: usize) -> Self {
        Self {
            target,
            angle: std::f64::consts::PI,
            axis: Axis::X,
        }
    }

    /// π/2 splitting pulse about y: |↓⟩ ↦ (|↓⟩ + |↑⟩)/√2.
    pub fn half_pi(target: usize) -> Self {
        Self {
            target,
            angle: std::f64::consts::FRAC_PI_2,
            axis: Axis::Y,
        }
    }

    /// 2×2 unitary exp(−i·angle·σ_axis/2) in the (|↓⟩, |↑⟩) basis, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let c = Complex64::new((self.angle / 2.0).cos(), 0.0);
        let s = (self.angle / 2.0).sin();
        match self.axis {
            Axis::X => {
                let off = Complex64::new(0.0, -s);
                [[c, off], [off, c]]
            }
            Axis::Y => {
                let s = Complex64::new(s, 0.0);
                [[c, -s], [s, c]]
            }
        }
    }
}

/// Applies the pulse unitary to the target spin, identity elsewhere.
pub fn apply_pulse(state: &SpinState, pulse: &PulseOp) -> Result<SpinState> {
    if pulse.target == 0 || pulse.target > state.n_spins() {
        return Err(Error::SpinIndexOutOfRange {
            index: pulse.target,
            n_spins: state.n_spins(),
        });
    }
    let mut out = state.clone();
    apply_pulse_in_place(&mut out, pulse);
    Ok(out)
}

pub(crate) fn apply_pulse_in_place(state: &mut SpinState, pulse: &PulseOp) {
    let [[u00, u01], [u10, u11]] = pulse.matrix();
    let mask = 1usize << (pulse.target - 1);
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a0 = amps[i];
            let a1 = amps[i | mask];
            amps[i] = u00 * a0 + u01 * a1;
            amps[i | mask] = u10 * a0 + u11 * a1;
        }
    }
}
