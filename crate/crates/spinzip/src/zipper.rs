//! Schedule generation and execution for zipping an odd-size spin register
//! into a GHZ state.
//!
//! The schedule for M = 2n+1 spins opens with
//!
//! ```text
//! Pulse(1, π); Pulse(2, π/2); Interact((1,2,3), T); Pulse(2, π)
//! ```
//!
//! and appends, for k = 1 … n−1,
//!
//! ```text
//! Pulse(2k+2, π); Interact((2k+1, 2k+2, 2k+3), 2T); Pulse(2k+1, π)
//! ```
//!
//! for a total of 2n π pulses, one π/2 pulse, and n interaction intervals.
//! The repeat blocks run for 2T because each branch must advance two chiral
//! rotation steps before the closing π pulse extends the GHZ chain: the
//! one-excitation branch walks (↓↑↓) → (↓↓↑) → (↑↓↓) on the active triple
//! while the two-excitation branch walks (↑↑↓) → (↑↓↑) → (↓↑↑); a single T
//! leaves a non-GHZ state.
//!
//! Executing a schedule tracks, alongside the simulated state, the exact
//! two-branch bookkeeping of the ideal protocol, so every step's snapshot is
//! compared against its ideal target and a convention bug is localized to
//! the first step whose target fidelity drops.

use num_complex::Complex64;
use serde::Serialize;

use crate::chiral::{evolve_triple, rotation_period, ChiralCoupling};
use crate::error::{Error, Result};
use crate::pulses::{apply_pulse_in_place, Axis, PulseOp};
use crate::spin_state::{fidelity, ghz_state, product_state, SpinConfig, SpinState, MAX_SPINS};

/// Magnitude below which a GHZ branch amplitude is treated as missing.
pub const BRANCH_AMPLITUDE_FLOOR: f64 = 1e-6;

/// One step of a zipping schedule: a single-spin pulse, or a timed chiral
/// interaction on a consecutive spin triple. Interaction durations are in
/// units of the rotation period T.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleStep {
    Pulse(PulseOp),
    Interact {
        triple: (usize, usize, usize),
        duration: f64,
    },
}

impl ScheduleStep {
    /// Short machine-readable kind label, used in trajectory exports.
    pub fn kind(&self) -> &'static str {
        match self {
            ScheduleStep::Pulse(p) => {
                if (p.angle - std::f64::consts::PI).abs() < 1e-12 {
                    "pulse_pi"
                } else if (p.angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
                    "pulse_half_pi"
                } else {
                    "pulse"
                }
            }
            ScheduleStep::Interact { .. } => "interact",
        }
    }

    /// Pulse target, or the triple as `p-q-r`.
    pub fn target_label(&self) -> String {
        match self {
            ScheduleStep::Pulse(p) => p.target.to_string(),
            ScheduleStep::Interact {
                triple: (p, q, r), ..
            } => format!("{p}-{q}-{r}"),
        }
    }

    /// Interaction duration in units of T; pulses are instantaneous.
    pub fn duration(&self) -> f64 {
        match self {
            ScheduleStep::Pulse(_) => 0.0,
            ScheduleStep::Interact { duration, .. } => *duration,
        }
    }
}

/// An ordered protocol schedule for an odd register of `m_spins ≥ 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    m_spins: usize,
    steps: Vec<ScheduleStep>,
}

impl Schedule {
    /// Validates the protocol invariants: odd M, targets and triples in
    /// range, consecutive odd-started triples with positive durations, and
    /// the M = 2n+1 pulse budget (2n π pulses, one π/2 pulse, n
    /// interactions).
    pub fn new(m_spins: usize, steps: Vec<ScheduleStep>) -> Result<Self> {
        if m_spins < 3 || m_spins % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "the zipping protocol needs an odd register of at least 3 spins, got {m_spins}"
            )));
        }
        if m_spins > MAX_SPINS {
            return Err(Error::RegisterTooLarge {
                n_spins: m_spins,
                max: MAX_SPINS,
            });
        }
        let mut pi = 0usize;
        let mut half_pi = 0usize;
        let mut interactions = 0usize;
        for step in &steps {
            match step {
                ScheduleStep::Pulse(p) => {
                    if p.target == 0 || p.target > m_spins {
                        return Err(Error::SpinIndexOutOfRange {
                            index: p.target,
                            n_spins: m_spins,
                        });
                    }
                    match step.kind() {
                        "pulse_pi" => pi += 1,
                        "pulse_half_pi" => half_pi += 1,
                        _ => {
                            return Err(Error::InvalidParameter(format!(
                                "protocol pulses must be π or π/2, got angle {}",
                                p.angle
                            )))
                        }
                    }
                }
                ScheduleStep::Interact {
                    triple: (p, q, r),
                    duration,
                } => {
                    if !(*duration > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "interaction durations must be positive, got {duration}"
                        )));
                    }
                    let consecutive = *q == p + 1 && *r == *q + 1;
                    if !consecutive || *p % 2 == 0 || *r > m_spins || *p == 0 {
                        return Err(Error::InvalidTriple(*p, *q, *r));
                    }
                    interactions += 1;
                }
            }
        }
        let n = (m_spins - 1) / 2;
        if pi != 2 * n || half_pi != 1 || interactions != n {
            return Err(Error::InvalidParameter(format!(
                "schedule for M = {m_spins} must hold {} π pulses, 1 π/2 pulse and {n} interactions; \
                 got {pi}, {half_pi}, {interactions}",
                2 * n
            )));
        }
        Ok(Self { m_spins, steps })
    }

    pub fn m_spins(&self) -> usize {
        self.m_spins
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    pub fn pi_pulse_count(&self) -> usize {
        self.steps.iter().filter(|s| s.kind() == "pulse_pi").count()
    }

    pub fn half_pi_pulse_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.kind() == "pulse_half_pi")
            .count()
    }

    pub fn interaction_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, ScheduleStep::Interact { .. }))
            .count()
    }
}

/// Builds the zipping schedule for an odd register of `m_spins ≥ 3`.
pub fn generate_schedule(m_spins: usize) -> Result<Schedule> {
    if m_spins < 3 || m_spins % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "the zipping protocol needs an odd register of at least 3 spins, got {m_spins}"
        )));
    }
    let mut steps = vec![
        ScheduleStep::Pulse(PulseOp::pi(1)),
        ScheduleStep::Pulse(PulseOp::half_pi(2)),
        ScheduleStep::Interact {
            triple: (1, 2, 3),
            duration: 1.0,
        },
        ScheduleStep::Pulse(PulseOp::pi(2)),
    ];
    for k in 1..=(m_spins - 3) / 2 {
        let (p, q, r) = (2 * k + 1, 2 * k + 2, 2 * k + 3);
        steps.push(ScheduleStep::Pulse(PulseOp::pi(q)));
        steps.push(ScheduleStep::Interact {
            triple: (p, q, r),
            duration: 2.0,
        });
        steps.push(ScheduleStep::Pulse(PulseOp::pi(p)));
    }
    Schedule::new(m_spins, steps)
}

/// What to capture while executing a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recording {
    /// No trajectory entries.
    Off,
    /// Per-step fidelities.
    Fidelities,
    /// Per-step fidelities plus full basis-population vectors.
    Full,
}

/// Snapshot taken after one executed step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryEntry {
    pub step_index: usize,
    pub step_kind: String,
    pub target_or_triple: String,
    /// Interaction duration in units of T (0 for pulses).
    pub duration: f64,
    /// Fidelity to the ideal two-branch target for this step.
    pub fidelity_to_target: f64,
    /// Fidelity to the final M-spin GHZ state.
    pub fidelity_to_ghz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub populations: Option<Vec<f64>>,
}

/// Per-step snapshots of one protocol execution.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrajectoryRecord {
    pub entries: Vec<TrajectoryEntry>,
}

impl TrajectoryRecord {
    /// CSV rendering: `#`-prefixed metadata lines, then one row per step.
    /// Numbers carry 12 significant digits; lines end with LF.
    pub fn to_csv(&self, m_spins: usize, kappa: f64) -> String {
        let mut out = String::new();
        out.push_str("# zip trajectory\n");
        out.push_str(&format!(
            "# m_spins = {m_spins}, kappa = {}, durations in units of T = 2pi/(3*sqrt(3)*kappa)\n",
            fmt_sig12(kappa)
        ));
        out.push_str(
            "step_index,step_kind,target_or_triple,duration,fidelity_to_target,fidelity_to_ghz\n",
        );
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.step_index,
                e.step_kind,
                e.target_or_triple,
                fmt_sig12(e.duration),
                fmt_sig12(e.fidelity_to_target),
                fmt_sig12(e.fidelity_to_ghz),
            ));
        }
        out
    }
}

/// Formats a float with 12 significant digits, locale-independent.
pub(crate) fn fmt_sig12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// A complex branch ratio serialized as separate real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPhase {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
}

impl From<Complex64> for BranchPhase {
    fn from(z: Complex64) -> Self {
        Self {
            re: z.re,
            im: z.im,
            magnitude: z.norm(),
        }
    }
}

/// Full run document for JSON export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZipReport {
    pub m_spins: usize,
    pub kappa: f64,
    pub rotation_period: f64,
    pub pulse_counts: PulseCounts,
    pub final_fidelity_to_ghz: f64,
    pub branch_phase: BranchPhase,
    pub steps: Vec<TrajectoryEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PulseCounts {
    pub pi: usize,
    pub half_pi: usize,
}

impl ZipReport {
    pub fn new(
        schedule: &Schedule,
        kappa: f64,
        final_state: &SpinState,
        record: &TrajectoryRecord,
    ) -> Result<Self> {
        let target = ghz_state(schedule.m_spins())?;
        Ok(Self {
            m_spins: schedule.m_spins(),
            kappa,
            rotation_period: rotation_period(kappa)?,
            pulse_counts: PulseCounts {
                pi: schedule.pi_pulse_count(),
                half_pi: schedule.half_pi_pulse_count(),
            },
            final_fidelity_to_ghz: fidelity(final_state, &target)?,
            branch_phase: verify_branch_phases(final_state, schedule.m_spins())?.into(),
            steps: record.entries.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Applies one schedule step to a state. Interactions run for
/// `duration × T(kappa)` on the step's triple.
pub fn apply_step(state: &SpinState, step: &ScheduleStep, kappa: f64) -> Result<SpinState> {
    match step {
        ScheduleStep::Pulse(pulse) => crate::pulses::apply_pulse(state, pulse),
        ScheduleStep::Interact { triple, duration } => {
            let coupling = ChiralCoupling::new(kappa, *triple)?;
            let t = duration * rotation_period(kappa)?;
            evolve_triple(state, &coupling, t)
        }
    }
}

/// Runs a schedule from the all-down state. Returns the final state and,
/// when recording, one trajectory entry per executed step. Execution is
/// deterministic: identical inputs produce bitwise-identical records.
pub fn execute_schedule(
    schedule: &Schedule,
    kappa: f64,
    recording: Recording,
) -> Result<(SpinState, TrajectoryRecord)> {
    let m = schedule.m_spins();
    let t_rot = rotation_period(kappa)?;
    let mut state = product_state(&SpinConfig::all_down(m)?);
    let ghz_target = ghz_state(m)?;
    let mut record = TrajectoryRecord::default();
    let ideal = if recording == Recording::Off {
        Vec::new()
    } else {
        ideal_step_states(schedule)?
    };

    for (step_index, step) in schedule.steps().iter().enumerate() {
        match step {
            ScheduleStep::Pulse(pulse) => {
                if pulse.target == 0 || pulse.target > m {
                    return Err(Error::SpinIndexOutOfRange {
                        index: pulse.target,
                        n_spins: m,
                    });
                }
                apply_pulse_in_place(&mut state, pulse);
            }
            ScheduleStep::Interact { triple, duration } => {
                let coupling = ChiralCoupling::new(kappa, *triple)?;
                state = evolve_triple(&state, &coupling, duration * t_rot)?;
            }
        }
        if recording != Recording::Off {
            record.entries.push(TrajectoryEntry {
                step_index,
                step_kind: step.kind().to_string(),
                target_or_triple: step.target_label(),
                duration: step.duration(),
                fidelity_to_target: fidelity(&state, &ideal[step_index])?,
                fidelity_to_ghz: fidelity(&state, &ghz_target)?,
                populations: (recording == Recording::Full).then(|| state.populations()),
            });
        }
    }
    Ok((state, record))
}

/// Ratio amplitude(all-up) / amplitude(all-down). For an ideal run the
/// magnitude is 1 and the phase is fixed by the pulse conventions (here:
/// exactly +1). An amplitude below [`BRANCH_AMPLITUDE_FLOOR`] on either
/// branch signals protocol failure.
pub fn verify_branch_phases(state: &SpinState, m_spins: usize) -> Result<Complex64> {
    if state.dim() != 1 << m_spins {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: 1 << m_spins,
        });
    }
    let down = state.amplitude(0);
    let up = state.amplitude(state.dim() - 1);
    if down.norm() < BRANCH_AMPLITUDE_FLOOR {
        return Err(Error::BranchAmplitudeTooSmall {
            branch: "all-down",
            magnitude: down.norm(),
        });
    }
    if up.norm() < BRANCH_AMPLITUDE_FLOOR {
        return Err(Error::BranchAmplitudeTooSmall {
            branch: "all-up",
            magnitude: up.norm(),
        });
    }
    Ok(up / down)
}

/// Exact ideal states after each schedule step, from the two-branch
/// bookkeeping of the protocol: π pulses about x flip the target bit in
/// both branches and multiply each by −i, the y-axis π/2 pulse splits a
/// single ket into two equal real branches, and an integer-duration
/// interaction advances each branch's triple configuration along its
/// chiral cycle with amplitude exactly +1.
pub fn ideal_step_states(schedule: &Schedule) -> Result<Vec<SpinState>> {
    let m = schedule.m_spins();
    let dim = 1usize << m;
    // (ket index, amplitude) for at most the two branches.
    let mut branches: Vec<(usize, Complex64)> = vec![(0, Complex64::ONE)];
    let mut states = Vec::with_capacity(schedule.steps().len());

    for step in schedule.steps() {
        match step {
            ScheduleStep::Pulse(pulse) => {
                let mask = 1usize << (pulse.target - 1);
                match (step.kind(), pulse.axis) {
                    ("pulse_pi", Axis::X) => {
                        for (ket, amp) in &mut branches {
                            *ket ^= mask;
                            *amp *= Complex64::new(0.0, -1.0);
                        }
                    }
                    ("pulse_half_pi", Axis::Y) => {
                        if branches.len() != 1 || branches[0].0 & mask != 0 {
                            return Err(Error::InvalidParameter(
                                "ideal tracking expects the π/2 pulse to split a single \
                                 branch with the target spin down"
                                    .into(),
                            ));
                        }
                        let (ket, amp) = branches[0];
                        let w = amp * std::f64::consts::FRAC_1_SQRT_2;
                        branches = vec![(ket, w), (ket | mask, w)];
                    }
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "ideal tracking supports x-axis π and y-axis π/2 pulses, got {:?}",
                            pulse
                        )))
                    }
                }
            }
            ScheduleStep::Interact { triple, duration } => {
                if (duration.round() - duration).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(
                        "ideal tracking needs integer interaction durations".into(),
                    ));
                }
                let shift = duration.round() as usize % 3;
                let masks = [
                    1usize << (triple.0 - 1),
                    1usize << (triple.1 - 1),
                    1usize << (triple.2 - 1),
                ];
                for (ket, _) in &mut branches {
                    let occupied: Vec<usize> = (0..3).filter(|&b| *ket & masks[b] != 0).collect();
                    let new_bits: Vec<usize> = match occupied.len() {
                        0 | 3 => occupied,
                        // One excitation: the up spin advances forward.
                        1 => vec![(occupied[0] + shift) % 3],
                        // Two excitations: the hole moves backward, i.e. the
                        // occupied pair shifts backward.
                        2 => occupied.iter().map(|&b| (b + 3 - shift) % 3).collect(),
                        _ => unreachable!(),
                    };
                    for &mask in &masks {
                        *ket &= !mask;
                    }
                    for b in new_bits {
                        *ket |= masks[b];
                    }
                }
            }
        }
        let mut amps = vec![Complex64::ZERO; dim];
        for &(ket, amp) in &branches {
            amps[ket] += amp;
        }
        states.push(SpinState::from_amplitudes(m, amps)?);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn schedule_for_three_spins_matches_protocol() {
        let schedule = generate_schedule(3).unwrap();
        assert_eq!(
            schedule.steps(),
            &[
                ScheduleStep::Pulse(PulseOp::pi(1)),
                ScheduleStep::Pulse(PulseOp::half_pi(2)),
                ScheduleStep::Interact {
                    triple: (1, 2, 3),
                    duration: 1.0
                },
                ScheduleStep::Pulse(PulseOp::pi(2)),
            ]
        );
    }

    #[test]
    fn schedule_for_five_spins_appends_one_repeat_block() {
        let m3 = generate_schedule(3).unwrap();
        let m5 = generate_schedule(5).unwrap();
        assert_eq!(&m5.steps()[..4], m3.steps());
        assert_eq!(
            &m5.steps()[4..],
            &[
                ScheduleStep::Pulse(PulseOp::pi(4)),
                ScheduleStep::Interact {
                    triple: (3, 4, 5),
                    duration: 2.0
                },
                ScheduleStep::Pulse(PulseOp::pi(3)),
            ]
        );
    }

    #[test]
    fn pulse_counts_follow_the_budget() {
        let m7 = generate_schedule(7).unwrap();
        assert_eq!(m7.pi_pulse_count(), 6);
        assert_eq!(m7.half_pi_pulse_count(), 1);
        for m in (3..=15).step_by(2) {
            let schedule = generate_schedule(m).unwrap();
            assert_eq!(schedule.pi_pulse_count(), m - 1, "M = {m}");
            assert_eq!(schedule.half_pi_pulse_count(), 1, "M = {m}");
            assert_eq!(schedule.interaction_count(), (m - 1) / 2, "M = {m}");
        }
    }

    #[test]
    fn even_or_small_registers_are_rejected() {
        assert!(generate_schedule(4).is_err());
        assert!(generate_schedule(1).is_err());
        assert!(generate_schedule(0).is_err());
        assert!(generate_schedule(2).is_err());
    }

    #[test]
    fn schedule_validation_rejects_broken_invariants() {
        // Non-consecutive triple.
        let bad = Schedule::new(
            3,
            vec![
                ScheduleStep::Pulse(PulseOp::pi(1)),
                ScheduleStep::Pulse(PulseOp::half_pi(2)),
                ScheduleStep::Interact {
                    triple: (1, 3, 2),
                    duration: 1.0,
                },
                ScheduleStep::Pulse(PulseOp::pi(2)),
            ],
        );
        assert!(bad.is_err());
        // Missing a π pulse.
        let bad = Schedule::new(
            3,
            vec![
                ScheduleStep::Pulse(PulseOp::half_pi(2)),
                ScheduleStep::Interact {
                    triple: (1, 2, 3),
                    duration: 1.0,
                },
                ScheduleStep::Pulse(PulseOp::pi(2)),
            ],
        );
        assert!(bad.is_err());
        // Non-positive duration.
        let bad = Schedule::new(
            3,
            vec![
                ScheduleStep::Pulse(PulseOp::pi(1)),
                ScheduleStep::Pulse(PulseOp::half_pi(2)),
                ScheduleStep::Interact {
                    triple: (1, 2, 3),
                    duration: 0.0,
                },
                ScheduleStep::Pulse(PulseOp::pi(2)),
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn three_spin_run_reaches_the_ghz_state() {
        let schedule = generate_schedule(3).unwrap();
        let (state, _) = execute_schedule(&schedule, 1.0, Recording::Off).unwrap();
        let target = ghz_state(3).unwrap();
        assert!(fidelity(&state, &target).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn interaction_step_produces_the_expected_superposition() {
        // After the first interaction the register holds
        // (|↓↑↓⟩ + |↑↓↑⟩)/√2 up to a global phase.
        let schedule = generate_schedule(3).unwrap();
        let mut state = product_state(&SpinConfig::all_down(3).unwrap());
        for step in &schedule.steps()[..3] {
            state = apply_step(&state, step, 1.0).unwrap();
        }
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = vec![Complex64::ZERO; 8];
        amps[2] = w; // |↓↑↓⟩
        amps[5] = w; // |↑↓↑⟩
        let expected = SpinState::from_amplitudes(3, amps).unwrap();
        assert!(fidelity(&state, &expected).unwrap() >= 1.0 - 1e-10);
        // Per-branch weights agree.
        assert_abs_diff_eq!(state.amplitude(2).norm_sqr(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(state.amplitude(5).norm_sqr(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn thirteen_spin_run_reaches_the_ghz_state() {
        let schedule = generate_schedule(13).unwrap();
        let (state, _) = execute_schedule(&schedule, 1.0, Recording::Off).unwrap();
        let target = ghz_state(13).unwrap();
        assert!(fidelity(&state, &target).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn every_step_hits_its_ideal_target() {
        let schedule = generate_schedule(7).unwrap();
        let (_, record) = execute_schedule(&schedule, 1.0, Recording::Fidelities).unwrap();
        for entry in &record.entries {
            assert!(
                entry.fidelity_to_target >= 1.0 - 1e-10,
                "step {} ({}) fidelity_to_target = {}",
                entry.step_index,
                entry.step_kind,
                entry.fidelity_to_target
            );
        }
        assert!(record.entries.last().unwrap().fidelity_to_ghz >= 1.0 - 1e-8);
    }

    #[test]
    fn zipping_is_monotone_and_leaves_trailing_spins_down() {
        let m = 9;
        let schedule = generate_schedule(m).unwrap();
        let mut state = product_state(&SpinConfig::all_down(m).unwrap());
        for (index, step) in schedule.steps().iter().enumerate() {
            state = apply_step(&state, step, 1.0).unwrap();
            // Block boundaries: the opening block ends at step 3, repeat
            // block k at step 3k + 3 (0-based).
            if index >= 3 && (index - 3) % 3 == 0 {
                let k = (index - 3) / 3;
                let zipped = 2 * k + 3;
                let mut amps = vec![Complex64::ZERO; 1 << m];
                let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                amps[0] = w;
                amps[(1 << zipped) - 1] = w;
                let target = SpinState::from_amplitudes(m, amps).unwrap();
                assert!(
                    fidelity(&state, &target).unwrap() >= 1.0 - 1e-8,
                    "leading {zipped} spins after block {k}"
                );
                let leading_weight: f64 = state.populations()[..1 << zipped].iter().sum();
                assert!(
                    1.0 - leading_weight < 1e-10,
                    "trailing up-population after block {k}"
                );
            }
        }
    }

    #[test]
    fn interactions_do_not_touch_spins_outside_the_triple() {
        let schedule = generate_schedule(7).unwrap();
        let mut state = product_state(&SpinConfig::all_down(7).unwrap());
        for step in schedule.steps() {
            let before = state.clone();
            state = apply_step(&state, step, 1.0).unwrap();
            if let ScheduleStep::Interact {
                triple: (p, q, r), ..
            } = step
            {
                for spin in 1..=7 {
                    if spin != *p && spin != *q && spin != *r {
                        assert_abs_diff_eq!(
                            state.up_population(spin).unwrap(),
                            before.up_population(spin).unwrap(),
                            epsilon = 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn branch_phase_examples() {
        let ghz = ghz_state(3).unwrap();
        let ratio = verify_branch_phases(&ghz, 3).unwrap();
        assert_abs_diff_eq!(ratio.re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(ratio.im, 0.0, epsilon = 0.0);

        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = vec![Complex64::ZERO; 8];
        amps[0] = -w;
        amps[7] = w;
        let minus = SpinState::from_amplitudes(3, amps).unwrap();
        let ratio = verify_branch_phases(&minus, 3).unwrap();
        assert_abs_diff_eq!(ratio.re, -1.0, epsilon = 1e-15);

        let down = product_state(&SpinConfig::all_down(3).unwrap());
        assert!(matches!(
            verify_branch_phases(&down, 3),
            Err(Error::BranchAmplitudeTooSmall { .. })
        ));
    }

    #[test]
    fn ideal_five_spin_run_has_unit_branch_ratio() {
        let schedule = generate_schedule(5).unwrap();
        let (state, _) = execute_schedule(&schedule, 1.0, Recording::Off).unwrap();
        let ratio = verify_branch_phases(&state, 5).unwrap();
        assert_abs_diff_eq!(ratio.norm(), 1.0, epsilon = 1e-8);
        // The x-axis flips contribute the same −i to both branches and the
        // y-axis split is real, so the relative phase is exactly +1.
        assert_abs_diff_eq!(ratio.re, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(ratio.im, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn execution_is_deterministic() {
        let schedule = generate_schedule(5).unwrap();
        let (state_a, record_a) = execute_schedule(&schedule, 1.0, Recording::Full).unwrap();
        let (state_b, record_b) = execute_schedule(&schedule, 1.0, Recording::Full).unwrap();
        for (a, b) in state_a.amplitudes().iter().zip(state_b.amplitudes()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(record_a, record_b);
        assert_eq!(
            record_a.to_csv(5, 1.0).into_bytes(),
            record_b.to_csv(5, 1.0).into_bytes()
        );
    }

    #[test]
    fn csv_layout_is_stable() {
        let schedule = generate_schedule(3).unwrap();
        let (_, record) = execute_schedule(&schedule, 1.0, Recording::Fidelities).unwrap();
        let csv = record.to_csv(3, 1.0);
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(
            lines.next().unwrap(),
            "step_index,step_kind,target_or_triple,duration,fidelity_to_target,fidelity_to_ghz"
        );
        assert_eq!(lines.count(), 4);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn report_serializes_counts_and_final_fidelity() {
        let schedule = generate_schedule(5).unwrap();
        let (state, record) = execute_schedule(&schedule, 1.0, Recording::Fidelities).unwrap();
        let report = ZipReport::new(&schedule, 1.0, &state, &record).unwrap();
        assert_eq!(report.pulse_counts.pi, 4);
        assert_eq!(report.pulse_counts.half_pi, 1);
        assert!(report.final_fidelity_to_ghz >= 1.0 - 1e-8);
        let json = report.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["m_spins"], 5);
        assert_eq!(parsed["pulse_counts"]["pi"], 4);
        assert_eq!(parsed["steps"].as_array().unwrap().len(), 7);
    }
}
