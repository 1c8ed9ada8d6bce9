use simlink::geometry::transmission_delay;
use simlink::seed::derive_rng;
use simlink::snc::{queueing_bound, simulate_waits, total_delay_bound, QueueParams, QueueTail};
use simlink::{Error, LinkScenario, Result};

use crate::table::{fmt_f64, Table};

/// Rates used for the delay surfaces when none are measured: S = 1, 3, 5.
pub const QUOTED_RATES: [(usize, f64); 3] = [(1, 25.92), (3, 40.96), (5, 54.55)];

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCell {
    pub streams: usize,
    pub v_data: f64,
    pub packet_mean_bits: f64,
    pub total: f64,
    pub d2: f64,
    /// `ok`, `infeasible` (T ≤ D2) or `unstable`.
    pub status: &'static str,
    pub raw: f64,
    pub bound: f64,
    pub t_b: f64,
    pub t_d: f64,
}

/// `D̄(T, l_d)` for every `(rate, l_d, T)` triple, in that nesting order.
pub fn delay_surface(base: &LinkScenario, rates: &[(usize, f64)], t_grid: &[f64], l_grid: &[f64]) -> Result<Vec<SurfaceCell>> {
    let mut out = Vec::with_capacity(rates.len() * t_grid.len() * l_grid.len());
    for &(streams, v) in rates {
        for &l in l_grid {
            let s = LinkScenario {
                num_streams: streams,
                packet_mean_bits: l,
                ..base.clone()
            };
            let d2 = transmission_delay(&s);
            for &t in t_grid {
                let mut cell = SurfaceCell {
                    streams,
                    v_data: v,
                    packet_mean_bits: l,
                    total: t,
                    d2,
                    status: "ok",
                    raw: f64::NAN,
                    bound: f64::NAN,
                    t_b: f64::NAN,
                    t_d: f64::NAN,
                };
                match total_delay_bound(t, &s, v, d2) {
                    Ok(b) => {
                        cell.raw = b.raw;
                        cell.bound = b.value;
                        cell.t_b = b.budget.t_b;
                        cell.t_d = b.budget.t_d;
                    }
                    Err(Error::Unstable { .. }) => cell.status = "unstable",
                    Err(Error::InvalidArgument(_)) if t <= d2 => cell.status = "infeasible",
                    Err(e) => return Err(e),
                }
                out.push(cell);
            }
        }
    }
    Ok(out)
}

pub fn surface_table(cells: &[SurfaceCell]) -> Table {
    let mut t = Table::new(&["streams", "v_data", "l_d", "T", "d2", "status", "bound_raw", "bound", "t_b", "t_d"]);
    for c in cells {
        t.push(vec![
            c.streams.to_string(),
            fmt_f64(c.v_data),
            fmt_f64(c.packet_mean_bits),
            fmt_f64(c.total),
            fmt_f64(c.d2),
            c.status.to_string(),
            fmt_f64(c.raw),
            fmt_f64(c.bound),
            fmt_f64(c.t_b),
            fmt_f64(c.t_d),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub t: f64,
    pub analytic: f64,
    pub simulated: f64,
    pub half_width: f64,
}

/// Analytic queueing bound against the simulated waiting-time tail.
pub fn delay_tail(s: &LinkScenario, v_data: f64, t_grid: &[f64], departures: usize, seed: u64) -> Result<(Vec<TailRow>, QueueTail)> {
    let params = QueueParams::from_scenario(s, v_data);
    let waits = simulate_waits(&params, departures, &mut derive_rng(seed, &[3]))?;
    let tail = QueueTail::from_waits(&waits, t_grid);
    let rows = tail
        .points
        .iter()
        .map(|p| {
            Ok(TailRow {
                t: p.t,
                analytic: queueing_bound(p.t, s, v_data)?,
                simulated: p.tail,
                half_width: p.half_width,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, tail))
}

pub fn tail_table(rows: &[TailRow]) -> Table {
    let mut t = Table::new(&["t_b", "analytic_bound", "simulated_tail", "ci_half_width"]);
    for r in rows {
        t.push(vec![fmt_f64(r.t), fmt_f64(r.analytic), fmt_f64(r.simulated), fmt_f64(r.half_width)]);
    }
    t
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
