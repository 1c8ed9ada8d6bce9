//! SIM cascade, fading channel and achievable rate.
//!
//! Layer ordering follows the physical signal path on both sides: the TX
//! stack applies `Phi^1` first and `Phi^L` last, the RX stack applies `Psi^1`
//! (the layer facing the free-space link) first and maps layer `K` onto the
//! `S` output streams last:
//!
//! ```text
//! X = Phi^L W^L ... Phi^2 W^2 Phi^1 W^1                (M x S)
//! Y = U_out Psi^K U^K ... Psi^2 U^2 Psi^1              (S x N)
//! H = Y G X                                            (S x S)
//! ```

mod coefficients;
mod fading;
mod rate;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

pub use coefficients::{
    build_coefficient_matrices, channel_gain, diffraction_coefficient, path_loss_db, reference_path_loss_db,
    sinc, spatial_correlation, CoefficientMatrices,
};
pub use fading::{complex_normal, draw_fading, line_of_sight, rician_matrix, Fading, PSD_TOL};
pub use rate::{achievable_rate, rate_with_snr};

use crate::config::LinkScenario;
use crate::error::{Error, Result};
use crate::geometry::{GeometryReport, Side};
use crate::linalg::{cis, CMat, RMat};

/// Maps any angle onto `(0, 2 pi]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r == 0.0 {
        TAU
    } else {
        r
    }
}

/// Phase shifts of every atom: `tx[l][m]` for TX layer `l + 1`, `rx[k][n]` for RX layer `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub tx: Vec<Vec<f64>>,
    pub rx: Vec<Vec<f64>>,
}

impl PhaseConfig {
    /// All phases equal to `2 pi` (unit coefficients).
    pub fn identity(s: &LinkScenario) -> Self {
        Self {
            tx: vec![vec![TAU; s.atoms_tx]; s.layers_tx],
            rx: vec![vec![TAU; s.atoms_rx]; s.layers_rx],
        }
    }

    /// Independent uniform phases on `(0, 2 pi]`.
    pub fn random<R: Rng + ?Sized>(s: &LinkScenario, rng: &mut R) -> Self {
        let mut draw = |layers: usize, atoms: usize| -> Vec<Vec<f64>> {
            (0..layers)
                .map(|_| (0..atoms).map(|_| wrap_phase(TAU - rng.random::<f64>() * TAU)).collect())
                .collect()
        };
        let tx = draw(s.layers_tx, s.atoms_tx);
        let rx = draw(s.layers_rx, s.atoms_rx);
        Self { tx, rx }
    }

    pub fn layer(&self, side: Side, layer: usize) -> &[f64] {
        match side {
            Side::Tx => &self.tx[layer],
            Side::Rx => &self.rx[layer],
        }
    }

    pub fn layer_mut(&mut self, side: Side, layer: usize) -> &mut Vec<f64> {
        match side {
            Side::Tx => &mut self.tx[layer],
            Side::Rx => &mut self.rx[layer],
        }
    }

    /// Unit-modulus coefficients `e^{j theta}` of one layer.
    pub fn coefficients(&self, side: Side, layer: usize) -> Vec<Complex64> {
        self.layer(side, layer).iter().map(|&t| cis(t)).collect()
    }

    /// Sets a layer from complex coefficients, keeping only their arguments.
    pub fn set_from_coefficients(&mut self, side: Side, layer: usize, v: &[Complex64]) {
        let dst = self.layer_mut(side, layer);
        for (p, z) in dst.iter_mut().zip(v) {
            *p = wrap_phase(z.arg());
        }
    }

    pub fn in_range(&self) -> bool {
        self.tx
            .iter()
            .chain(self.rx.iter())
            .flatten()
            .all(|&t| t > 0.0 && t <= TAU)
    }
}

/// Scales row `i` of `m` by `d[i]` (left multiplication by `Diag(d)`).
pub fn diag_left(d: &[Complex64], m: &CMat) -> CMat {
    let mut out = m.clone();
    for (i, &z) in d.iter().enumerate() {
        for j in 0..out.ncols() {
            out[(i, j)] *= z;
        }
    }
    out
}

/// Scales column `j` of `m` by `d[j]` (right multiplication by `Diag(d)`).
pub fn diag_right(m: &CMat, d: &[Complex64]) -> CMat {
    let mut out = m.clone();
    for (j, &z) in d.iter().enumerate() {
        for i in 0..out.nrows() {
            out[(i, j)] *= z;
        }
    }
    out
}

/// Every coefficient matrix and one fading realisation.
#[derive(Debug, Clone)]
pub struct ChannelState {
    pub coeffs: CoefficientMatrices,
    pub r_tx: RMat,
    pub r_rx: RMat,
    pub g_bar: CMat,
    pub g: CMat,
    pub gain: f64,
    pub clipped: f64,
    pub streams: usize,
}

impl ChannelState {
    pub fn build<R: Rng + ?Sized>(s: &LinkScenario, rng: &mut R) -> Result<Self> {
        let geo = GeometryReport::build(s);
        let coeffs = build_coefficient_matrices(s, &geo)?;
        let fading = draw_fading(s, rng)?;
        Ok(Self::from_parts(coeffs, fading))
    }

    pub fn from_parts(coeffs: CoefficientMatrices, fading: Fading) -> Self {
        Self {
            streams: coeffs.tx_input.ncols(),
            coeffs,
            r_tx: fading.r_tx,
            r_rx: fading.r_rx,
            g_bar: fading.g_bar,
            g: fading.g,
            gain: fading.gain,
            clipped: fading.clipped,
        }
    }

    pub fn layers(&self, side: Side) -> usize {
        match side {
            Side::Tx => self.coeffs.tx_hops.len() + 1,
            Side::Rx => self.coeffs.rx_hops.len() + 1,
        }
    }

    pub fn atoms(&self, side: Side) -> usize {
        match side {
            Side::Tx => self.coeffs.tx_input.nrows(),
            Side::Rx => self.coeffs.rx_output.ncols(),
        }
    }

    pub fn check_phases(&self, p: &PhaseConfig) -> Result<()> {
        for side in [Side::Tx, Side::Rx] {
            let layers = match side {
                Side::Tx => &p.tx,
                Side::Rx => &p.rx,
            };
            if layers.len() != self.layers(side) || layers.iter().any(|l| l.len() != self.atoms(side)) {
                return Err(Error::DimensionMismatch(format!(
                    "{} phases must be {} x {}",
                    side.label(),
                    self.layers(side),
                    self.atoms(side)
                )));
            }
        }
        Ok(())
    }

    /// Partial TX product `Phi^{to} W^{to} ... Phi^{from} W^{from}` applied to
    /// `input` (the output of layer `from - 1`). Layers are 1-based;
    /// `from = 1` starts from the sources and ignores `input`.
    fn tx_forward(&self, p: &PhaseConfig, from: usize, to: usize, input: Option<CMat>) -> CMat {
        let mut x = input.unwrap_or_else(|| self.coeffs.tx_input.clone());
        for l in from..=to {
            if l >= 2 {
                x = &self.coeffs.tx_hops[l - 2] * x;
            }
            x = diag_left(&p.coefficients(Side::Tx, l - 1), &x);
        }
        x
    }

    /// `X`, `M x S`.
    pub fn tx_cascade(&self, p: &PhaseConfig) -> CMat {
        self.tx_forward(p, 1, self.layers(Side::Tx), None)
    }

    /// `Y`, `S x N`.
    pub fn rx_cascade(&self, p: &PhaseConfig) -> CMat {
        let k = self.layers(Side::Rx);
        let mut y = self.coeffs.rx_output.clone();
        for layer in (1..=k).rev() {
            y = diag_right(&y, &p.coefficients(Side::Rx, layer - 1));
            if layer >= 2 {
                y = &y * &self.coeffs.rx_hops[layer - 2];
            }
        }
        y
    }

    /// End-to-end `H = Y G X`, `S x S`.
    pub fn assemble(&self, p: &PhaseConfig) -> Result<CMat> {
        self.check_phases(p)?;
        Ok(self.rx_cascade(p) * &self.g * self.tx_cascade(p))
    }

    /// Factors `(left, right)` with `H = left Diag(v) right` for the given layer,
    /// `v` being that layer's coefficients. `left` is `S x a`, `right` is `a x S`.
    pub fn layer_factors(&self, p: &PhaseConfig, side: Side, layer: usize) -> Result<(CMat, CMat)> {
        self.check_phases(p)?;
        let nl = self.layers(side);
        if layer == 0 || layer > nl {
            return Err(Error::IndexOutOfRange {
                what: "layer",
                index: layer,
                max: nl,
            });
        }
        match side {
            Side::Tx => {
                // right: W^p Phi^{p-1} W^{p-1} ... Phi^1 W^1
                let right = if layer == 1 {
                    self.coeffs.tx_input.clone()
                } else {
                    let below = self.tx_forward(p, 1, layer - 1, None);
                    &self.coeffs.tx_hops[layer - 2] * below
                };
                // left: Y G Phi^L W^L ... Phi^{p+1} W^{p+1}
                let mut left = self.rx_cascade(p) * &self.g;
                for l in ((layer + 1)..=nl).rev() {
                    left = diag_right(&left, &p.coefficients(Side::Tx, l - 1));
                    left = &left * &self.coeffs.tx_hops[l - 2];
                }
                Ok((left, right))
            }
            Side::Rx => {
                // left: U_out Psi^K U^K ... Psi^{p+1} U^{p+1}
                let mut left = self.coeffs.rx_output.clone();
                for k in ((layer + 1)..=nl).rev() {
                    left = diag_right(&left, &p.coefficients(Side::Rx, k - 1));
                    left = &left * &self.coeffs.rx_hops[k - 2];
                }
                // right: U^p Psi^{p-1} ... U^2 Psi^1 G X
                let mut right = &self.g * self.tx_cascade(p);
                for k in 1..layer {
                    right = diag_left(&p.coefficients(Side::Rx, k - 1), &right);
                    right = &self.coeffs.rx_hops[k - 1] * right;
                }
                Ok((left, right))
            }
        }
    }
}

/// `left Diag(v) right`.
pub fn factored_product(left: &CMat, v: &[Complex64], right: &CMat) -> CMat {
    diag_right(left, v) * right
}
