use num_complex::Complex64;

use crate::channel::{factored_product, ChannelState, PhaseConfig};
use crate::error::{Error, Result};
use crate::geometry::Side;
use crate::linalg::{relative_error, CMat};

/// Reconstruction error above which a factorization is treated as a bug.
pub const FACTORIZATION_TOL: f64 = 1e-6;

/// One layer's view of the channel: `H = left Diag(v) right`.
#[derive(Debug, Clone)]
pub struct LayerSubproblem {
    pub side: Side,
    /// 1-based layer index.
    pub layer: usize,
    /// `S x a`, everything after the layer.
    pub left: CMat,
    /// `a x S`, everything before the layer.
    pub right: CMat,
    /// Current coefficients of the layer.
    pub current: Vec<Complex64>,
    /// Relative error of `left Diag(current) right` against the assembled `H`.
    pub reconstruction_error: f64,
}

impl LayerSubproblem {
    pub fn atoms(&self) -> usize {
        self.current.len()
    }

    pub fn streams(&self) -> usize {
        self.left.nrows()
    }

    /// `H` with the layer set to `v`.
    pub fn channel(&self, v: &[Complex64]) -> CMat {
        factored_product(&self.left, v, &self.right)
    }

    /// `Λ_s = conj(Diag(left[s, :]) right)`, `a x S`, so that
    /// `‖v^H Λ_s‖ = ‖row_s(H(v))‖`.
    pub fn lambda(&self, s: usize) -> CMat {
        let a = self.atoms();
        CMat::from_fn(a, self.right.ncols(), |i, j| (self.left[(s, i)] * self.right[(i, j)]).conj())
    }

    /// `Σ_s ‖v^H Λ_s‖²`.
    pub fn quadratic_objective(&self, v: &[Complex64]) -> f64 {
        self.channel(v).norm_squared()
    }
}

pub fn factorize_layer(state: &ChannelState, phases: &PhaseConfig, side: Side, layer: usize) -> Result<LayerSubproblem> {
    let (left, right) = state.layer_factors(phases, side, layer)?;
    let current = phases.coefficients(side, layer - 1);
    let h = state.assemble(phases)?;
    let reconstruction_error = relative_error(&factored_product(&left, &current, &right), &h);
    if !(reconstruction_error <= FACTORIZATION_TOL) {
        return Err(Error::FactorizationMismatch {
            layer: format!("{} layer {layer}", side.label()),
            error: reconstruction_error,
        });
    }
    Ok(LayerSubproblem {
        side,
        layer,
        left,
        right,
        current,
        reconstruction_error,
    })
}

/// Padded costs `R_s = [[Λ_s Λ_s^H, 0], [0, 0]]`, each `(a + 1) x (a + 1)`.
pub fn lift_costs(sub: &LayerSubproblem) -> Vec<CMat> {
    let a = sub.atoms();
    (0..sub.streams())
        .map(|s| {
            let l = sub.lambda(s);
            let g = &l * l.adjoint();
            let mut r = CMat::zeros(a + 1, a + 1);
            r.view_mut((0, 0), (a, a)).copy_from(&g);
            // exact Hermitian symmetry
            (&r + r.adjoint()).scale(0.5)
        })
        .collect()
}
