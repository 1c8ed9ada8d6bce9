use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::LinkScenario;
use crate::error::{Error, Result};
use crate::geometry::{GeometryReport, StackGeometry};
use crate::linalg::{CMat, RMat, I};

/// Rayleigh-Sommerfeld style coefficient between two atoms `d` metres apart:
/// `(C cos / d) (1 / (2 pi d) - j / lambda) exp(j 2 pi d / lambda)`.
pub fn diffraction_coefficient(d: f64, cos_angle: f64, area: f64, wavelength: f64) -> Result<Complex64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::DegenerateGeometry(format!("distance {d} must be positive")));
    }
    if !(cos_angle > 0.0 && cos_angle <= 1.0 + 1e-12) {
        return Err(Error::DegenerateGeometry(format!("obliquity cosine {cos_angle} outside (0, 1]")));
    }
    let amplitude = area * cos_angle / d;
    let near_far = Complex64::new(1.0 / (2.0 * PI * d), 0.0) - I / wavelength;
    Ok(amplitude * near_far * Complex64::from_polar(1.0, 2.0 * PI * d / wavelength))
}

/// All SIM coefficient matrices, in signal order.
#[derive(Debug, Clone)]
pub struct CoefficientMatrices {
    /// `W^1`, sources to TX layer 1, `M x S`.
    pub tx_input: CMat,
    /// `W^2 .. W^L`, each `M x M`; entry `[m][m']` couples atom `m'` of layer
    /// `l - 1` to atom `m` of layer `l`.
    pub tx_hops: Vec<CMat>,
    /// `U^2 .. U^K`, each `N x N`.
    pub rx_hops: Vec<CMat>,
    /// RX layer `K` to the `S` output streams, `S x N`.
    pub rx_output: CMat,
}

fn hop_matrix(g: &StackGeometry, area: f64) -> Result<CMat> {
    let idx: Vec<_> = g.indices().collect();
    let mut out = CMat::zeros(g.atoms, g.atoms);
    for (i, &a) in idx.iter().enumerate() {
        for (j, &b) in idx.iter().enumerate() {
            let d = g.interlayer_distance(a, b);
            out[(i, j)] = diffraction_coefficient(d, g.gap / d, area, g.wavelength)?;
        }
    }
    Ok(out)
}

pub fn build_coefficient_matrices(s: &LinkScenario, geo: &GeometryReport) -> Result<CoefficientMatrices> {
    let lambda = s.wavelength_m;
    if geo.source_tx.len() != s.num_streams || geo.source_rx.len() != s.atoms_rx {
        return Err(Error::DimensionMismatch("geometry does not match scenario".into()));
    }
    let mut tx_input = CMat::zeros(s.atoms_tx, s.num_streams);
    for (si, row) in geo.source_tx.iter().enumerate() {
        for (m, &d) in row.iter().enumerate() {
            tx_input[(m, si)] = diffraction_coefficient(d, geo.gap_tx / d, s.atom_area_tx_m2, lambda)?;
        }
    }
    let mut rx_output = CMat::zeros(s.num_streams, s.atoms_rx);
    for (n, row) in geo.source_rx.iter().enumerate() {
        for (si, &d) in row.iter().enumerate() {
            rx_output[(si, n)] = diffraction_coefficient(d, geo.gap_rx / d, s.atom_area_rx_m2, lambda)?;
        }
    }
    // every hop sees the same grid, so one matrix serves all layer pairs
    let tx_hop = hop_matrix(&geo.tx, s.atom_area_tx_m2)?;
    let rx_hop = hop_matrix(&geo.rx, s.atom_area_rx_m2)?;
    Ok(CoefficientMatrices {
        tx_input,
        tx_hops: vec![tx_hop; s.layers_tx - 1],
        rx_hops: vec![rx_hop; s.layers_rx - 1],
        rx_output,
    })
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

fn correlation(spacings: &[Vec<f64>], wavelength: f64) -> RMat {
    let n = spacings.len();
    RMat::from_fn(n, n, |i, j| sinc(2.0 * spacings[i][j] / wavelength))
}

/// `(R_TX, R_RX)` with entries `sinc(2 r / lambda)`.
pub fn spatial_correlation(s: &LinkScenario) -> (RMat, RMat) {
    let tx = StackGeometry::new(s, crate::geometry::Side::Tx);
    let rx = StackGeometry::new(s, crate::geometry::Side::Rx);
    (
        correlation(&tx.spacings(), s.wavelength_m),
        correlation(&rx.spacings(), s.wavelength_m),
    )
}

/// Reference loss at `d0`: the configured override, else free space.
pub fn reference_path_loss_db(s: &LinkScenario) -> f64 {
    s.ref_pathloss_db
        .unwrap_or_else(|| 20.0 * (4.0 * PI * s.ref_distance_m / s.wavelength_m).log10())
}

pub fn path_loss_db(d: f64, s: &LinkScenario) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("path-loss distance {d} must be positive")));
    }
    Ok(reference_path_loss_db(s) + 10.0 * s.pathloss_exponent * (d / s.ref_distance_m).log10())
}

/// Large-scale channel gain `10^(-PL(d_eVTOL) / 10)`.
pub fn channel_gain(s: &LinkScenario) -> Result<f64> {
    Ok(10f64.powf(-path_loss_db(s.link_distance_m, s)? / 10.0))
}
