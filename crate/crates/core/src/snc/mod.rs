//! Stochastic network calculus delay bounds.
//!
//! The end-to-end delay is `D = D1 + D2 + D3`: queueing in the FIFO buffer,
//! the fixed transmission delay through both stacks and the propagation over
//! the free-space channel. With Poisson arrivals of exponentially sized packets
//! and the fluid service curve `beta(t) = v B t`, the two random parts have
//! exponential tail bounds which combine through min-plus convolution.

mod minplus;
mod queue_sim;

pub use minplus::{minplus_convolve, minplus_sequences, ExpTail, TailBound};
pub use queue_sim::{mm1_mean_wait, simulate_queue, simulate_waits, QueueParams, QueueTail, TailPoint};

use crate::config::LinkScenario;
use crate::error::{Error, Result};

/// Split of the total delay threshold `T = D2 + t_b + t_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBudget {
    pub t_b: f64,
    pub t_d: f64,
    pub d2: f64,
    pub total: f64,
}

impl DelayBudget {
    /// Budget with `t_d = T - D2 - t_b`.
    pub fn from_total(total: f64, d2: f64, t_b: f64) -> Result<Self> {
        let t_d = total - d2 - t_b;
        if d2 < 0.0 || t_b < 0.0 || t_d < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "budget T={total}, D2={d2}, t_b={t_b} leaves t_d={t_d}"
            )));
        }
        Ok(Self { t_b, t_d, d2, total })
    }

    /// Budget with `T = D2 + t_b + t_d`.
    pub fn from_parts(d2: f64, t_b: f64, t_d: f64) -> Self {
        Self {
            t_b,
            t_d,
            d2,
            total: d2 + t_b + t_d,
        }
    }
}

/// Poisson packet arrivals with exponentially distributed sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficModel {
    pub arrival_rate_pps: f64,
    pub packet_mean_bits: f64,
}

impl TrafficModel {
    pub fn from_scenario(s: &LinkScenario) -> Self {
        Self {
            arrival_rate_pps: s.arrival_rate_pps,
            packet_mean_bits: s.packet_mean_bits,
        }
    }

    pub fn load_bps(&self) -> f64 {
        self.arrival_rate_pps * self.packet_mean_bits
    }
}

/// `beta(t) = v B t`, bits.
pub fn service_curve(v_data: f64, bandwidth: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("service horizon {t} is negative")));
    }
    Ok(v_data * bandwidth * t)
}

fn check_stable(service: f64, traffic: &TrafficModel) -> Result<()> {
    if service > traffic.load_bps() {
        Ok(())
    } else {
        Err(Error::Unstable {
            service_bps: service,
            load_bps: traffic.load_bps(),
        })
    }
}

/// Optimal moment parameter `mu = (v B - delta l) / (v B l)`, 1/bit.
pub fn optimal_mu(v_data: f64, bandwidth: f64, traffic: &TrafficModel) -> Result<f64> {
    let service = v_data * bandwidth;
    check_stable(service, traffic)?;
    Ok((service - traffic.load_bps()) / (service * traffic.packet_mean_bits))
}

/// Decay rate `(v B - delta l) / l` of the queueing bound, 1/s. Negative when unstable.
pub fn queueing_exponent(v_data: f64, s: &LinkScenario) -> f64 {
    (v_data * s.bandwidth_hz - s.offered_load_bps()) / s.packet_mean_bits
}

/// Decay rate `v B / (S l)` of the propagation bound, 1/s.
pub fn propagation_exponent(v_data: f64, s: &LinkScenario) -> f64 {
    v_data * s.bandwidth_hz / (s.num_streams as f64 * s.packet_mean_bits)
}

/// `P{D1 > t_b} <= exp(-(v B - delta l) t_b / l)`.
pub fn queueing_bound(t_b: f64, s: &LinkScenario, v_data: f64) -> Result<f64> {
    if t_b < 0.0 {
        return Err(Error::InvalidArgument(format!("t_b = {t_b} is negative")));
    }
    s.check_stability(v_data)?;
    Ok((-queueing_exponent(v_data, s) * t_b).exp())
}

/// `P{D3 > t_d} <= exp(-v B t_d / (S l))`, the exponential packet-length tail.
pub fn propagation_bound(t_d: f64, s: &LinkScenario, v_data: f64) -> Result<f64> {
    if t_d < 0.0 {
        return Err(Error::InvalidArgument(format!("t_d = {t_d} is negative")));
    }
    Ok((-propagation_exponent(v_data, s) * t_d).exp())
}

/// Result of the total-delay bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBound {
    /// Bound before clamping; can exceed 1 for tight thresholds.
    pub raw: f64,
    /// `min(raw, 1)`.
    pub value: f64,
    pub budget: DelayBudget,
}

/// Minimiser over `x in [0, r]` of `exp(-a x) + exp(-c (r - x))`.
///
/// The objective is convex, so the stationary point `a e^{-a x} = c e^{-c (r - x)}`
/// clamped to the interval is the minimiser.
pub fn optimal_split(a: f64, c: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if a <= 0.0 {
        return 0.0;
    }
    if c <= 0.0 {
        return r;
    }
    let x = ((a / c).ln() + c * r) / (a + c);
    x.clamp(0.0, r)
}

/// `inf_{t_b + t_d = T - D2} exp(-a t_b) + exp(-c t_d)` with the minimising split.
pub fn total_delay_bound(total: f64, s: &LinkScenario, v_data: f64, d2: f64) -> Result<DelayBound> {
    if !(total > d2) {
        return Err(Error::InvalidArgument(format!("threshold T = {total} must exceed D2 = {d2}")));
    }
    s.check_stability(v_data)?;
    let a = queueing_exponent(v_data, s);
    let c = propagation_exponent(v_data, s);
    let r = total - d2;
    let t_b = optimal_split(a, c, r);
    let t_d = r - t_b;
    let raw = (-a * t_b).exp() + (-c * t_d).exp();
    Ok(DelayBound {
        raw,
        value: raw.min(1.0),
        budget: DelayBudget {
            t_b,
            t_d,
            d2,
            total,
        },
    })
}
