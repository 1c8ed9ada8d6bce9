use num_complex::Complex64;
use rand::Rng;

use crate::channel::complex_normal;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMat};
use crate::sdp::SdpProblem;
use crate::seed::derive_rng;

/// Redraws allowed per candidate when an entry lands exactly on zero.
const MAX_REDRAWS: usize = 16;

/// Unit-modulus candidates drawn from an SDP solution.
#[derive(Debug, Clone)]
pub struct Randomization {
    /// Every candidate, first `a` entries only.
    pub candidates: Vec<Vec<Complex64>>,
    /// `v^H C v` of each candidate over the unpadded block.
    pub objectives: Vec<f64>,
    /// Index of the best candidate by objective.
    pub best: usize,
}

impl Randomization {
    pub fn best_vector(&self) -> &[Complex64] {
        &self.candidates[self.best]
    }

    pub fn best_objective(&self) -> f64 {
        self.objectives[self.best]
    }
}

/// Factor `P Diag(sqrt(σ))` of a PSD matrix. Eigenvalues at rounding level
/// are dropped so that numerically rank-one solutions stay exactly rank one.
fn sqrt_factor(v: &CMat) -> CMat {
    let vh = (v + v.adjoint()).scale(0.5);
    let (vals, mut vecs) = hermitian_eigen(&vh);
    let floor = vals.first().copied().unwrap_or(0.0).max(0.0) * 1e-12;
    for (k, &lam) in vals.iter().enumerate() {
        let r = if lam > floor { lam.sqrt() } else { 0.0 };
        vecs.column_mut(k).scale_mut(r);
    }
    vecs
}

/// One candidate `P Diag(sqrt(σ)) r`, de-rotated by the auxiliary entry and
/// projected onto the unit circle. `None` when some entry is exactly zero.
fn candidate<R: Rng + ?Sized>(factor: &CMat, atoms: usize, rng: &mut R) -> Option<Vec<Complex64>> {
    let n = factor.nrows();
    let r: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for (i, zi) in z.iter_mut().enumerate() {
        for (k, rk) in r.iter().enumerate() {
            *zi += factor[(i, k)] * rk;
        }
    }
    let aux = z[n - 1];
    let rot = if aux.norm() > 0.0 { aux.conj() / aux.norm() } else { Complex64::new(1.0, 0.0) };
    let mut out = Vec::with_capacity(atoms);
    for zi in z.iter().take(atoms) {
        let w = zi * rot;
        let m = w.norm();
        if !(m > 0.0) || !m.is_finite() {
            return None;
        }
        out.push(w / m);
    }
    Some(out)
}

/// Gaussian randomization over `draws` candidates.
///
/// Draw `i` uses its own RNG stream derived from `(base_seed, i)`, so the
/// candidate set does not depend on evaluation order.
pub fn gaussian_candidates(v: &CMat, atoms: usize, draws: usize, base_seed: u64) -> Result<Vec<Vec<Complex64>>> {
    if draws == 0 {
        return Err(Error::InvalidArgument("randomization needs at least one draw".into()));
    }
    if v.nrows() != atoms + 1 || v.ncols() != atoms + 1 {
        return Err(Error::DimensionMismatch(format!(
            "SDP solution is {:?}, expected {}x{}",
            v.shape(),
            atoms + 1,
            atoms + 1
        )));
    }
    let factor = sqrt_factor(v);
    (0..draws)
        .map(|i| {
            let mut rng = derive_rng(base_seed, &[i as u64]);
            (0..MAX_REDRAWS)
                .find_map(|_| candidate(&factor, atoms, &mut rng))
                .ok_or(Error::NonFinite("randomization candidate"))
        })
        .collect()
}

/// Best of `draws` candidates by the quadratic objective of `problem`.
pub fn gaussian_randomize<R: Rng + ?Sized>(
    v: &CMat,
    problem: &SdpProblem,
    draws: usize,
    rng: &mut R,
) -> Result<Randomization> {
    let atoms = problem.dim() - 1;
    let base: u64 = rng.random();
    let candidates = gaussian_candidates(v, atoms, draws, base)?;
    let objectives: Vec<f64> = candidates
        .iter()
        .map(|c| {
            let mut padded = c.clone();
            padded.push(Complex64::new(1.0, 0.0));
            problem.rank_one_objective(&padded)
        })
        .collect();
    let best = argmax(&objectives);
    Ok(Randomization {
        candidates,
        objectives,
        best,
    })
}

/// First index of the largest value.
pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cis;
    use crate::sdp::{solve, SolverOptions};
    use crate::seed::rng_from_seed;

    fn random_psd(n: usize, seed: u64) -> CMat {
        let mut rng = rng_from_seed(seed);
        let a = CMat::from_fn(n, 2, |_, _| complex_normal(&mut rng));
        &a * a.adjoint()
    }

    fn padded(c: &CMat) -> CMat {
        let a = c.nrows();
        let mut r = CMat::zeros(a + 1, a + 1);
        r.view_mut((0, 0), (a, a)).copy_from(c);
        r
    }

    #[test]
    fn rank_one_solution_is_recovered() {
        let c = random_psd(4, 1);
        let p = SdpProblem::from_aggregate(padded(&c)).unwrap();
        let vbar: Vec<Complex64> = [0.3, 1.1, 2.0, 4.0, 5.5].iter().map(|&t| cis(t)).collect();
        let v = CMat::from_fn(5, 5, |i, j| vbar[i] * vbar[j].conj());
        let r = gaussian_randomize(&v, &p, 20, &mut rng_from_seed(2)).unwrap();
        let expected = p.objective(&v);
        for o in &r.objectives {
            assert!((o - expected).abs() / expected < 1e-10);
        }
    }

    #[test]
    fn unit_modulus_and_dominated() {
        let c = random_psd(6, 3);
        let p = SdpProblem::from_aggregate(padded(&c)).unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        let r = gaussian_randomize(&sol.v, &p, 100, &mut rng_from_seed(4)).unwrap();
        assert!(r.candidates.iter().flatten().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!(r.best_objective() <= sol.objective + 1e-6 * sol.objective.abs().max(1.0));
    }

    #[test]
    fn same_seed_same_candidates() {
        let v = CMat::identity(4, 4);
        let a = gaussian_candidates(&v, 3, 10, 77).unwrap();
        let b = gaussian_candidates(&v, 3, 10, 77).unwrap();
        assert_eq!(a, b);
        // prefix property: draw i is independent of the total count
        let c = gaussian_candidates(&v, 3, 4, 77).unwrap();
        assert_eq!(&a[..4], &c[..]);
    }

    #[test]
    fn argmax_picks_first_maximum() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
    }
}
