//! Phase-shift optimisation.
//!
//! [`bcd_optimize`] sweeps the metasurface layers one at a time. Each layer
//! update factors the channel as `H = left Diag(v) right`, lifts
//! `max Σ_s ‖v^H Λ_s‖²` to a unit-diagonal SDP, solves it and recovers a
//! unit-modulus vector by Gaussian randomization. The update is kept only if
//! the achievable rate does not drop. After every sweep the propagation delay
//! budget is set in closed form.
//!
//! [`ao_baseline`] is a cyclic per-atom search over a fixed phase grid that
//! maximises the rate directly.

mod delay;
mod randomize;
mod subproblem;

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

pub use delay::{closed_form_td, regret, TdSolution};
pub use randomize::{argmax, gaussian_candidates, gaussian_randomize, Randomization};
pub use subproblem::{factorize_layer, lift_costs, LayerSubproblem, FACTORIZATION_TOL};

use crate::channel::{achievable_rate, rate_with_snr, ChannelState, PhaseConfig};
use crate::config::{CandidateSelection, LayerOrder, LinkScenario};
use crate::error::{Error, Result};
use crate::geometry::{transmission_delay, Side};
use crate::linalg::{cis, relative_error, CMat};
use crate::sdp::{solve, SdpProblem, SdpStatus, SolverOptions};
use crate::seed::derive_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Bcd,
    Ao,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Bcd => "BCD",
            Algorithm::Ao => "AO",
        }
    }
}

/// Outcome of one layer update inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerUpdate {
    pub side: Side,
    pub layer: usize,
    /// Rate with the proposed phases, before the acceptance test.
    pub proposed_v_data: f64,
    pub accepted: bool,
    pub sdp_status: Option<SdpStatus>,
    /// Set when the update could not be computed; the previous phases are kept.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub v_data: f64,
    pub t_d: f64,
    pub td_boundary: bool,
    /// `T = D2 + t_b + t_d`.
    pub total: f64,
    pub regret: f64,
    /// Rate of the last proposal of the sweep, before acceptance.
    pub proposed_v_data: f64,
    /// Regret evaluated at the proposal with its own closed-form `t_d`.
    pub proposed_regret: f64,
    /// Relative difference between the incrementally tracked `H` and a full rebuild.
    pub h_drift: f64,
    pub wall_time_s: f64,
    pub updates: Vec<LayerUpdate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BcdTrace {
    pub algorithm: Algorithm,
    pub d2: f64,
    pub t_b: f64,
    pub initial_v_data: f64,
    pub initial_t_d: f64,
    pub initial_regret: f64,
    pub records: Vec<IterationRecord>,
}

impl BcdTrace {
    pub fn final_v_data(&self) -> f64 {
        self.records.last().map_or(self.initial_v_data, |r| r.v_data)
    }

    pub fn final_t_d(&self) -> f64 {
        self.records.last().map_or(self.initial_t_d, |r| r.t_d)
    }

    pub fn final_regret(&self) -> f64 {
        self.records.last().map_or(self.initial_regret, |r| r.regret)
    }

    pub fn mean_v_data(&self) -> f64 {
        if self.records.is_empty() {
            return self.initial_v_data;
        }
        self.records.iter().map(|r| r.v_data).sum::<f64>() / self.records.len() as f64
    }

    pub fn wall_time_s(&self) -> f64 {
        self.records.iter().map(|r| r.wall_time_s).sum()
    }

    /// Tab-separated trace, one row per iteration, without timing columns.
    pub fn to_table(&self) -> String {
        let mut out = String::from("iter\tv_data\tt_d\tT\tregret\tproposed_v_data\tproposed_regret\taccepted_layers\n");
        for r in &self.records {
            let flags: String = r.updates.iter().map(|u| if u.accepted { '1' } else { '0' }).collect();
            out.push_str(&format!(
                "{}\t{:.12e}\t{:.12e}\t{:.12e}\t{:.12e}\t{:.12e}\t{:.12e}\t{}\n",
                r.iteration, r.v_data, r.t_d, r.total, r.regret, r.proposed_v_data, r.proposed_regret, flags
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: BcdTrace,
    pub phases: PhaseConfig,
}

/// Layers in sweep order, 1-based.
pub fn sweep_order(s: &LinkScenario) -> Vec<(Side, usize)> {
    let tx = (1..=s.layers_tx).map(|l| (Side::Tx, l));
    let rx = (1..=s.layers_rx).map(|k| (Side::Rx, k));
    match s.options.layer_order {
        LayerOrder::TxThenRx => tx.chain(rx).collect(),
        LayerOrder::RxThenTx => rx.chain(tx).collect(),
    }
}

struct Tracker<'a> {
    s: &'a LinkScenario,
    state: &'a ChannelState,
    phases: PhaseConfig,
    h: CMat,
    v_data: f64,
    d2: f64,
}

impl<'a> Tracker<'a> {
    fn new(s: &'a LinkScenario, state: &'a ChannelState, phases: PhaseConfig) -> Result<Self> {
        let h = state.assemble(&phases)?;
        let v_data = achievable_rate(&h, s)?;
        Ok(Self {
            s,
            state,
            phases,
            h,
            v_data,
            d2: transmission_delay(s),
        })
    }

    fn trace(&self, algorithm: Algorithm) -> BcdTrace {
        let t_d = self.s.options.initial_td_s;
        BcdTrace {
            algorithm,
            d2: self.d2,
            t_b: self.s.wait_budget_s,
            initial_v_data: self.v_data,
            initial_t_d: t_d,
            initial_regret: regret(self.v_data, t_d, self.s),
            records: Vec::new(),
        }
    }

    /// Closes an iteration: rebuilds `H`, updates `t_d` and the regret.
    fn record(&mut self, iteration: usize, proposed: f64, started: Instant, updates: Vec<LayerUpdate>) -> Result<IterationRecord> {
        let rebuilt = self.state.assemble(&self.phases)?;
        let h_drift = relative_error(&self.h, &rebuilt);
        self.h = rebuilt;
        let td = closed_form_td(self.v_data, self.s)?;
        let ptd = closed_form_td(proposed, self.s)?;
        Ok(IterationRecord {
            iteration,
            v_data: self.v_data,
            t_d: td.t_d,
            td_boundary: td.boundary,
            total: self.d2 + self.s.wait_budget_s + td.t_d,
            regret: regret(self.v_data, td.t_d, self.s),
            proposed_v_data: proposed,
            proposed_regret: regret(proposed, ptd.t_d, self.s),
            h_drift,
            wall_time_s: started.elapsed().as_secs_f64(),
            updates,
        })
    }
}

/// One SDR layer update; returns the proposal and its rate.
fn sdr_proposal<R: Rng + ?Sized>(
    s: &LinkScenario,
    sub: &LayerSubproblem,
    opts: &SolverOptions,
    rng: &mut R,
) -> Result<(Vec<Complex64>, f64, SdpStatus)> {
    let problem = SdpProblem::new(lift_costs(sub))?;
    let sol = solve(&problem, opts)?;
    let rand = gaussian_randomize(&sol.v, &problem, s.options.randomization_draws, rng)?;
    let (v, rate) = match s.options.candidate_selection {
        CandidateSelection::Quadratic => {
            let v = rand.best_vector().to_vec();
            let rate = achievable_rate(&sub.channel(&v), s)?;
            (v, rate)
        }
        CandidateSelection::Rate => {
            let mut best = (f64::NEG_INFINITY, 0);
            for (i, c) in rand.candidates.iter().enumerate() {
                let r = achievable_rate(&sub.channel(c), s)?;
                if r > best.0 {
                    best = (r, i);
                }
            }
            (rand.candidates[best.1].clone(), best.0)
        }
    };
    Ok((v, rate, sol.status))
}

pub fn bcd_optimize<R: Rng + ?Sized>(
    s: &LinkScenario,
    state: &ChannelState,
    initial: PhaseConfig,
    max_iterations: usize,
    rng: &mut R,
) -> Result<RunOutcome> {
    let mut t = Tracker::new(s, state, initial)?;
    let mut trace = t.trace(Algorithm::Bcd);
    let opts = SolverOptions::default();
    for iteration in 1..=max_iterations {
        let started = Instant::now();
        let mut updates = Vec::new();
        let mut proposed = t.v_data;
        for (side, layer) in sweep_order(s) {
            let sub = factorize_layer(state, &t.phases, side, layer)?;
            let mut update = LayerUpdate {
                side,
                layer,
                proposed_v_data: t.v_data,
                accepted: false,
                sdp_status: None,
                error: None,
            };
            match sdr_proposal(s, &sub, &opts, rng) {
                Ok((v, rate, status)) => {
                    update.proposed_v_data = rate;
                    update.sdp_status = Some(status);
                    proposed = rate;
                    if rate >= t.v_data {
                        update.accepted = true;
                        t.phases.set_from_coefficients(side, layer - 1, &v);
                        t.h = sub.channel(&v);
                        t.v_data = rate;
                    }
                }
                Err(e) => update.error = Some(e.to_string()),
            }
            updates.push(update);
        }
        let rec = t.record(iteration, proposed, started, updates)?;
        trace.records.push(rec);
    }
    Ok(RunOutcome { trace, phases: t.phases })
}

/// Phases of the baseline grid, `2 pi (k + 1) / n` for `k = 0..n`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * (k + 1) as f64 / n as f64).collect()
}

/// Cyclic per-atom grid search on the rate. An atom moves only when a grid
/// phase strictly improves the rate, so the trace is monotone.
pub fn ao_baseline(s: &LinkScenario, state: &ChannelState, initial: PhaseConfig, max_iterations: usize) -> Result<RunOutcome> {
    if s.options.baseline_grid == 0 {
        return Err(Error::InvalidArgument("baseline grid must be non-empty".into()));
    }
    let grid: Vec<(f64, Complex64)> = phase_grid(s.options.baseline_grid).into_iter().map(|t| (t, cis(t))).collect();
    let snr = s.snr_per_stream();
    let mut t = Tracker::new(s, state, initial)?;
    let mut trace = t.trace(Algorithm::Ao);
    for iteration in 1..=max_iterations {
        let started = Instant::now();
        let mut updates = Vec::new();
        for (side, layer) in sweep_order(s) {
            let sub = factorize_layer(state, &t.phases, side, layer)?;
            let mut v = sub.current.clone();
            let mut h = sub.channel(&v);
            let mut changed = false;
            for a in 0..v.len() {
                // H(v_a) = H_rest + v_a left[:, a] right[a, :]
                let outer = sub.left.column(a) * sub.right.row(a);
                let rest = &h - &outer * v[a];
                let mut best = (rate_with_snr(&h, snr)?, None);
                for &(theta, z) in &grid {
                    let rate = rate_with_snr(&(&rest + &outer * z), snr)?;
                    if rate > best.0 {
                        best = (rate, Some((theta, z)));
                    }
                }
                if let Some((theta, z)) = best.1 {
                    v[a] = z;
                    h = &rest + &outer * z;
                    t.phases.layer_mut(side, layer - 1)[a] = theta;
                    changed = true;
                }
            }
            let rate = achievable_rate(&h, s)?;
            if changed {
                t.h = h;
                t.v_data = rate;
            }
            updates.push(LayerUpdate {
                side,
                layer,
                proposed_v_data: rate,
                accepted: changed,
                sdp_status: None,
                error: None,
            });
        }
        let proposed = t.v_data;
        let rec = t.record(iteration, proposed, started, updates)?;
        trace.records.push(rec);
    }
    Ok(RunOutcome { trace, phases: t.phases })
}

/// Channel, initial phases and optimiser randomness for one seed. Both
/// algorithms see the same channel and starting point for the same seed.
pub fn prepare(s: &LinkScenario, seed: u64) -> Result<(ChannelState, PhaseConfig)> {
    let state = ChannelState::build(s, &mut derive_rng(seed, &[0]))?;
    let initial = PhaseConfig::random(s, &mut derive_rng(seed, &[1]));
    Ok((state, initial))
}

/// Builds the channel from `seed` and runs one algorithm.
pub fn run_algorithm(algorithm: Algorithm, s: &LinkScenario, max_iterations: usize, seed: u64) -> Result<RunOutcome> {
    let (state, initial) = prepare(s, seed)?;
    match algorithm {
        Algorithm::Bcd => bcd_optimize(s, &state, initial, max_iterations, &mut derive_rng(seed, &[2])),
        Algorithm::Ao => ao_baseline(s, &state, initial, max_iterations),
    }
}
