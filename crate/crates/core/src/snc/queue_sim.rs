//! FIFO fluid queue fed by Poisson arrivals of exponentially sized packets,
//! drained at a constant bit rate. Waiting times follow the Lindley recursion
//! `W_{n+1} = max(0, W_n + S_n - A_{n+1})`.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::config::LinkScenario;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile used for binomial confidence intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    pub service_bps: f64,
    pub arrival_rate_pps: f64,
    pub packet_mean_bits: f64,
}

impl QueueParams {
    pub fn from_scenario(s: &LinkScenario, v_data: f64) -> Self {
        Self {
            service_bps: v_data * s.bandwidth_hz,
            arrival_rate_pps: s.arrival_rate_pps,
            packet_mean_bits: s.packet_mean_bits,
        }
    }

    pub fn utilization(&self) -> f64 {
        self.arrival_rate_pps * self.packet_mean_bits / self.service_bps
    }

    fn check(&self) -> Result<()> {
        let load = self.arrival_rate_pps * self.packet_mean_bits;
        if !(self.service_bps > load) {
            return Err(Error::Unstable {
                service_bps: self.service_bps,
                load_bps: load,
            });
        }
        if !(self.packet_mean_bits > 0.0) || self.arrival_rate_pps < 0.0 {
            return Err(Error::InvalidArgument("queue parameters must be positive".into()));
        }
        Ok(())
    }
}

/// Mean M/M/1 waiting time in queue, `rho / (mu_s (1 - rho))`.
pub fn mm1_mean_wait(p: &QueueParams) -> f64 {
    let rho = p.utilization();
    let mu_s = p.service_bps / p.packet_mean_bits;
    rho / (mu_s * (1.0 - rho))
}

/// Waiting times of the first `departures` packets, starting from an empty queue.
pub fn simulate_waits<R: Rng + ?Sized>(p: &QueueParams, departures: usize, rng: &mut R) -> Result<Vec<f64>> {
    p.check()?;
    if p.arrival_rate_pps == 0.0 {
        return Ok(Vec::new());
    }
    let inter = Exp::new(p.arrival_rate_pps).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let size = Exp::new(1.0 / p.packet_mean_bits).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut waits = Vec::with_capacity(departures);
    let mut w = 0.0f64;
    for _ in 0..departures {
        waits.push(w);
        let service = size.sample(rng) / p.service_bps;
        let gap = inter.sample(rng);
        w = (w + service - gap).max(0.0);
    }
    Ok(waits)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub t: f64,
    /// Empirical `P{D1 > t}`.
    pub tail: f64,
    /// Binomial 95% confidence half-width.
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueTail {
    pub departures: usize,
    pub mean_wait: f64,
    pub points: Vec<TailPoint>,
}

impl QueueTail {
    pub fn from_waits(waits: &[f64], grid: &[f64]) -> Self {
        let n = waits.len();
        let mean_wait = if n == 0 { 0.0 } else { waits.iter().sum::<f64>() / n as f64 };
        let points = grid
            .iter()
            .map(|&t| {
                let exceed = waits.iter().filter(|&&w| w > t).count();
                let tail = if n == 0 { 0.0 } else { exceed as f64 / n as f64 };
                let half_width = if n == 0 { 0.0 } else { Z_95 * (tail * (1.0 - tail) / n as f64).sqrt() };
                TailPoint { t, tail, half_width }
            })
            .collect();
        Self {
            departures: n,
            mean_wait,
            points,
        }
    }
}

/// Empirical waiting-time CCDF over `horizon` seconds of arrivals.
///
/// The number of departures is the Poisson count of arrivals in the horizon,
/// approximated by its mean `delta_d * horizon`.
pub fn simulate_queue<R: Rng + ?Sized>(
    s: &LinkScenario,
    v_data: f64,
    horizon: f64,
    grid: &[f64],
    rng: &mut R,
) -> Result<QueueTail> {
    let p = QueueParams::from_scenario(s, v_data);
    if !(horizon > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon {horizon} must be positive")));
    }
    let departures = (p.arrival_rate_pps * horizon).round() as usize;
    let waits = simulate_waits(&p, departures, rng)?;
    Ok(QueueTail::from_waits(&waits, grid))
}
