use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{LinkScenario, LosMode};
use crate::error::Result;
use crate::geometry::{Side, StackGeometry};
use crate::linalg::{psd_sqrt, to_complex, CMat, RMat};

use super::coefficients::{channel_gain, spatial_correlation};

/// Eigenvalues below `-PSD_TOL * max|eigenvalue|` are an error, smaller ones are clipped.
pub const PSD_TOL: f64 = 1e-8;

/// One draw of the correlated Rician channel between the TX output layer and
/// the RX input layer.
#[derive(Debug, Clone)]
pub struct Fading {
    pub r_tx: RMat,
    pub r_rx: RMat,
    /// Uncorrelated Rician matrix, `N x M`.
    pub g_bar: CMat,
    /// `R_RX^{1/2} G_bar R_TX^{1/2}`, `N x M`.
    pub g: CMat,
    pub gain: f64,
    /// Largest negative eigenvalue magnitude clipped while taking square roots.
    pub clipped: f64,
}

/// Circularly-symmetric complex Gaussian with unit variance.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Line-of-sight matrix, `N x M`.
pub fn line_of_sight(s: &LinkScenario) -> CMat {
    match s.options.los_mode {
        LosMode::AllOnes => CMat::from_element(s.atoms_rx, s.atoms_tx, Complex64::new(1.0, 0.0)),
        LosMode::Spherical => {
            let tx = StackGeometry::new(s, Side::Tx);
            let rx = StackGeometry::new(s, Side::Rx);
            let tx_pos: Vec<[f64; 3]> = tx.indices().map(|i| tx.atom_position(i, 0)).collect();
            let rx_pos: Vec<[f64; 3]> = rx.indices().map(|i| rx.atom_position(i, 0)).collect();
            let d = s.link_distance_m;
            CMat::from_fn(s.atoms_rx, s.atoms_tx, |n, m| {
                let dx = rx_pos[n][0] - tx_pos[m][0];
                let dy = rx_pos[n][1] - tx_pos[m][1];
                let dist = (dx * dx + dy * dy + d * d).sqrt();
                // phase relative to the broadside distance keeps values well scaled
                Complex64::from_polar(1.0, -2.0 * PI * (dist - d) / s.wavelength_m)
            })
        }
    }
}

/// `sqrt(gain) (sqrt(k / (1 + k)) h_LoS + sqrt(1 / (1 + k)) h_NLoS)`.
pub fn rician_matrix<R: Rng + ?Sized>(s: &LinkScenario, gain: f64, rng: &mut R) -> CMat {
    let k = s.rician_factor;
    let los_w = (k / (1.0 + k)).sqrt();
    let nlos_w = (1.0 / (1.0 + k)).sqrt();
    let los = line_of_sight(s);
    let mut out = CMat::zeros(s.atoms_rx, s.atoms_tx);
    // row-major draw order, fixed for reproducibility
    for n in 0..s.atoms_rx {
        for m in 0..s.atoms_tx {
            out[(n, m)] = gain.sqrt() * (los_w * los[(n, m)] + nlos_w * complex_normal(rng));
        }
    }
    out
}

pub fn draw_fading<R: Rng + ?Sized>(s: &LinkScenario, rng: &mut R) -> Result<Fading> {
    let (r_tx, r_rx) = spatial_correlation(s);
    let (sq_tx, c1) = psd_sqrt(&r_tx, PSD_TOL)?;
    let (sq_rx, c2) = psd_sqrt(&r_rx, PSD_TOL)?;
    let gain = channel_gain(s)?;
    let g_bar = rician_matrix(s, gain, rng);
    let g = to_complex(&sq_rx) * &g_bar * to_complex(&sq_tx);
    Ok(Fading {
        r_tx,
        r_rx,
        g_bar,
        g,
        gain,
        clipped: c1.max(c2),
    })
}
