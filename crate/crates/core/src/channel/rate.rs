use crate::config::LinkScenario;
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// `log2 det(I + snr H H^H)` evaluated through the singular values of `H`,
/// which keeps weak eigenmodes accurate at very high SNR.
pub fn rate_with_snr(h: &CMat, snr: f64) -> Result<f64> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("channel matrix"));
    }
    if h.is_empty() {
        return Ok(0.0);
    }
    let sv = h.singular_values();
    Ok(sv.iter().map(|&s| (snr * s * s).ln_1p()).sum::<f64>() / std::f64::consts::LN_2)
}

/// Achievable spectral efficiency, bit/s/Hz, with power split evenly over the
/// `S` streams: `log2 det(I + (P / S) H H^H / (N0 B))`.
pub fn achievable_rate(h: &CMat, s: &LinkScenario) -> Result<f64> {
    rate_with_snr(h, s.snr_per_stream())
}
