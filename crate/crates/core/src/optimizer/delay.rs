use crate::config::LinkScenario;
use crate::error::{Error, Result};
use crate::snc::{propagation_exponent, queueing_exponent};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdSolution {
    pub t_d: f64,
    /// Set when `ρ S l ≥ v B`: the objective is non-decreasing in `t_d` and
    /// the minimiser sits on the boundary `t_d = 0`.
    pub boundary: bool,
}

/// Minimiser over `t_d ≥ 0` of `exp(-v B t_d / (S l)) + ρ t_d`:
/// `t_d = -(S l / (v B)) ln(ρ S l / (v B))`.
pub fn closed_form_td(v_data: f64, s: &LinkScenario) -> Result<TdSolution> {
    let vb = v_data * s.bandwidth_hz;
    let rho = s.delay_weight;
    if !(vb > 0.0 && rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "closed-form t_d needs v B > 0 and rho > 0, got v B = {vb}, rho = {rho}"
        )));
    }
    let sl = s.num_streams as f64 * s.packet_mean_bits;
    let ratio = rho * sl / vb;
    if ratio >= 1.0 {
        return Ok(TdSolution { t_d: 0.0, boundary: true });
    }
    Ok(TdSolution {
        t_d: -(sl / vb) * ratio.ln(),
        boundary: false,
    })
}

/// `f = exp(-((v B - δ l) / l) t_b) + exp(-(v B / (S l)) t_d) + ρ t_d`.
pub fn regret(v_data: f64, t_d: f64, s: &LinkScenario) -> f64 {
    let a = queueing_exponent(v_data, s);
    let c = propagation_exponent(v_data, s);
    (-a * s.wait_budget_s).exp() + (-c * t_d).exp() + s.delay_weight * t_d
}
