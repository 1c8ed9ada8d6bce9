//! Unit-diagonal complex SDP: maximize `tr(C V)` over `V ⪰ 0`, `V_ii = 1`,
//! with `C = Σ_s R_s` Hermitian PSD.
//!
//! Two independent solvers are provided. [`Method::Mixing`] works on a
//! low-rank factor `V = Q Q^H` with unit-norm rows and updates one row at a
//! time in closed form, which never decreases the objective. [`Method::Admm`]
//! runs an alternating-direction method on the full real embedding of the
//! problem and never sees the complex factorisation.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{from_real_embedding, hermitian_asymmetry, hermitian_eigen, min_eigenvalue, real_embedding, CMat, RMat};
use crate::seed::rng_from_seed;

/// Relative Hermitian tolerance for input costs.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative PSD tolerance for input costs.
pub const PSD_INPUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SdpProblem {
    costs: Vec<CMat>,
    aggregate: CMat,
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

impl SdpProblem {
    pub fn new(costs: Vec<CMat>) -> Result<Self> {
        let first = costs
            .first()
            .ok_or_else(|| Error::InvalidArgument("SDP needs at least one cost matrix".into()))?;
        let n = first.nrows();
        if n == 0 {
            return Err(Error::InvalidArgument("SDP dimension must be positive".into()));
        }
        let mut aggregate = CMat::zeros(n, n);
        for r in &costs {
            if r.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!("cost is {:?}, expected {n}x{n}", r.shape())));
            }
            if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("SDP cost"));
            }
            let scale = max_abs(r);
            let asym = hermitian_asymmetry(r);
            if asym > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NotHermitian { asymmetry: asym });
            }
            if scale > 0.0 {
                let herm = (r + r.adjoint()).scale(0.5);
                let lam = min_eigenvalue(&herm);
                if lam < -PSD_INPUT_TOL * herm.norm() {
                    return Err(Error::NotPsd { min_eigenvalue: lam });
                }
            }
            aggregate += r;
        }
        let aggregate = (&aggregate + aggregate.adjoint()).scale(0.5);
        Ok(Self { costs, aggregate })
    }

    /// Problem with a single cost matrix.
    pub fn from_aggregate(c: CMat) -> Result<Self> {
        Self::new(vec![c])
    }

    pub fn dim(&self) -> usize {
        self.aggregate.nrows()
    }

    pub fn costs(&self) -> &[CMat] {
        &self.costs
    }

    pub fn aggregate(&self) -> &CMat {
        &self.aggregate
    }

    /// `Re tr(C V)`.
    pub fn objective(&self, v: &CMat) -> f64 {
        trace_product(&self.aggregate, v)
    }

    /// `Σ_s tr(R_s V)`, summed term by term.
    pub fn objective_by_terms(&self, v: &CMat) -> f64 {
        self.costs.iter().map(|r| trace_product(r, v)).sum()
    }

    /// Rank-one objective `v^H C v` of a phase vector.
    pub fn rank_one_objective(&self, v: &[Complex64]) -> f64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += self.aggregate[(i, j)] * v[j];
            }
            acc += v[i].conj() * row;
        }
        acc.re
    }

    /// Plain-text dump of the problem for offline debugging.
    pub fn dump(&self) -> String {
        let mut out = format!("dim {}\nterms {}\n", self.dim(), self.costs.len());
        for (k, r) in self.costs.iter().enumerate() {
            let _ = writeln!(out, "cost {k}");
            write_matrix(&mut out, r);
        }
        out
    }
}

fn write_matrix(out: &mut String, m: &CMat) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:e}{:+e}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// `Re tr(A B)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mixing,
    Admm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Unit-diagonal and PSD tolerance.
    pub feasibility_tol: f64,
    /// Relative duality-gap tolerance.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Factor width for the mixing method; `None` picks `ceil(sqrt(2n)) + 1`.
    pub rank: Option<usize>,
    /// Seed for the factor initialisation.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-6,
            gap_tol: 1e-4,
            max_iter: 20_000,
            rank: None,
            seed: 0x5d9,
        }
    }
}

/// Feasibility and optimality measurements of a candidate `V`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `max_i |V_ii - 1|`.
    pub diagonal_residual: f64,
    /// `max(0, -λ_min(V))`.
    pub psd_residual: f64,
    /// Dual variable `y_i = Re (C V)_ii`, shifted so that `Diag(y) - C ⪰ 0`.
    pub dual: Vec<f64>,
    /// `max(0, -λ_min(Diag(y) - C))` before the shift.
    pub dual_residual: f64,
    /// `Σ y_i - tr(C V)` with the shifted dual.
    pub gap: f64,
    /// `gap / max(|tr(C V)|, tiny)`.
    pub relative_gap: f64,
}

impl Certificate {
    pub fn accepted(&self, opts: &SolverOptions) -> bool {
        self.diagonal_residual <= opts.feasibility_tol
            && self.psd_residual <= opts.feasibility_tol
            && self.relative_gap <= opts.gap_tol
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub v: CMat,
    pub objective: f64,
    pub certificate: Certificate,
    pub iterations: usize,
    pub status: SdpStatus,
    pub method: Method,
    /// Objective after every sweep, mixing method only.
    pub history: Vec<f64>,
}

impl SdpSolution {
    pub fn dump(&self) -> String {
        let c = &self.certificate;
        let mut out = format!(
            "method {:?}\nstatus {:?}\niterations {}\nobjective {:e}\ndiag_residual {:e}\npsd_residual {:e}\ndual_residual {:e}\ngap {:e}\n",
            self.method, self.status, self.iterations, self.objective, c.diagonal_residual, c.psd_residual, c.dual_residual, c.gap
        );
        out.push_str("V\n");
        write_matrix(&mut out, &self.v);
        out
    }
}

/// Measures primal feasibility, dual feasibility and the duality gap of `v`.
pub fn check_certificate(problem: &SdpProblem, v: &CMat) -> Certificate {
    let c = problem.aggregate();
    let n = problem.dim();
    let scale = max_abs(c).max(f64::MIN_POSITIVE);
    let diagonal_residual = (0..n).map(|i| (v[(i, i)].re - 1.0).abs()).fold(0.0, f64::max);
    let vh = (v + v.adjoint()).scale(0.5);
    let psd_residual = (-min_eigenvalue(&vh)).max(0.0);

    // dual from the complementarity condition (Diag(y) - C) V = 0 on the diagonal
    let cv = c * v;
    let mut dual: Vec<f64> = (0..n).map(|i| cv[(i, i)].re).collect();
    let mut slack = -c.clone();
    for (i, y) in dual.iter().enumerate() {
        slack[(i, i)] += Complex64::new(*y, 0.0);
    }
    let lam = min_eigenvalue(&slack);
    // eigenvalue noise at the scale of C is not a dual violation
    let dual_residual = if lam < -1e-13 * scale * n as f64 { -lam } else { 0.0 };
    for y in dual.iter_mut() {
        *y += dual_residual;
    }
    let objective = problem.objective(v);
    let gap = dual.iter().sum::<f64>() - objective;
    let relative_gap = gap.abs() / objective.abs().max(scale * f64::EPSILON);
    Certificate {
        diagonal_residual,
        psd_residual,
        dual,
        dual_residual,
        gap,
        relative_gap,
    }
}

/// Solves with the mixing method, falling back to ADMM when the mixing
/// iterate cannot be certified. The better certified iterate is returned.
pub fn solve(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    let mixing = solve_with(problem, opts, Method::Mixing)?;
    if mixing.status == SdpStatus::Converged {
        return Ok(mixing);
    }
    let admm = solve_with(problem, opts, Method::Admm)?;
    let better = match (admm.status, mixing.status) {
        (SdpStatus::Converged, _) => admm.objective >= mixing.objective || !mixing.certificate.accepted(opts),
        _ => admm.certificate.relative_gap < mixing.certificate.relative_gap,
    };
    Ok(if better { admm } else { mixing })
}

pub fn solve_with(problem: &SdpProblem, opts: &SolverOptions, method: Method) -> Result<SdpSolution> {
    if !(opts.feasibility_tol > 0.0 && opts.gap_tol > 0.0) {
        return Err(Error::InvalidArgument("SDP tolerances must be positive".into()));
    }
    let scale = max_abs(problem.aggregate());
    let n = problem.dim();
    if scale == 0.0 {
        // every feasible point is optimal
        let v = CMat::identity(n, n);
        let certificate = check_certificate(problem, &v);
        return Ok(SdpSolution {
            v,
            objective: 0.0,
            certificate,
            iterations: 0,
            status: SdpStatus::Converged,
            method,
            history: vec![0.0],
        });
    }
    // entries can be ~1e20; both methods run on C / max|C_ij|
    let c = problem.aggregate().unscale(scale);
    let (v, iterations, history) = match method {
        Method::Mixing => mixing(&c, problem, opts),
        Method::Admm => admm(&c, problem, opts),
    };
    let certificate = check_certificate(problem, &v);
    let status = if certificate.accepted(opts) {
        SdpStatus::Converged
    } else {
        SdpStatus::MaxIterations
    };
    Ok(SdpSolution {
        objective: problem.objective(&v),
        v,
        certificate,
        iterations,
        status,
        method,
        history: history.into_iter().map(|h| h * scale).collect(),
    })
}

fn default_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize + 1).min(n.max(1))
}

fn factor_objective(c: &CMat, q: &CMat) -> f64 {
    trace_product(c, &(q * q.adjoint()))
}

fn mixing(c: &CMat, problem: &SdpProblem, opts: &SolverOptions) -> (CMat, usize, Vec<f64>) {
    let n = c.nrows();
    let k = opts.rank.unwrap_or_else(|| default_rank(n)).max(1);
    let mut rng = rng_from_seed(opts.seed);
    let mut q = CMat::from_fn(n, k, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    for i in 0..n {
        let norm = q.row(i).norm();
        q.row_mut(i).unscale_mut(norm);
    }
    let mut history = vec![factor_objective(c, &q)];
    let mut iterations = 0;
    let check_every = 10;
    while iterations < opts.max_iter {
        iterations += 1;
        for i in 0..n {
            // g = Σ_{j≠i} C_ij q_j maximises 2 Re <q_i, g> over the unit sphere
            let mut g = nalgebra::RowDVector::<Complex64>::zeros(k);
            for j in (0..n).filter(|&j| j != i) {
                let cij = c[(i, j)];
                for t in 0..k {
                    g[t] += cij * q[(j, t)];
                }
            }
            let norm = g.norm();
            if norm > 1e-300 {
                q.set_row(i, &g.unscale(norm));
            }
        }
        let obj = factor_objective(c, &q);
        let prev = *history.last().unwrap_or(&obj);
        history.push(obj);
        let stalled = (obj - prev).abs() <= 1e-15 * obj.abs().max(1.0);
        if stalled || iterations % check_every == 0 {
            let v = &q * q.adjoint();
            if check_certificate(problem, &v).relative_gap <= 0.1 * opts.gap_tol || stalled {
                break;
            }
        }
    }
    (&q * q.adjoint(), iterations, history)
}

/// Projection of a real symmetric matrix onto the PSD cone.
fn psd_part(m: &RMat) -> RMat {
    let eig = m.clone().symmetric_eigen();
    let d = eig.eigenvalues.map(|x| x.max(0.0));
    let q = &eig.eigenvectors;
    q * RMat::from_diagonal(&d) * q.transpose()
}

/// Equal-weight average over the rotation that maps the real embedding of a
/// complex matrix to itself, followed by PSD clipping and diagonal scaling.
fn embedding_to_feasible(x: &RMat, n: usize) -> CMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, i + n)] = -1.0;
        j[(i + n, i)] = 1.0;
    }
    let sym = (x + &j * x * j.transpose()) * 0.5;
    let v = from_real_embedding(&sym);
    let v = (&v + v.adjoint()).scale(0.5);
    let (vals, vecs) = hermitian_eigen(&v);
    let mut clipped = CMat::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate() {
        if lam > 0.0 {
            let col = vecs.column(k);
            clipped += (col * col.adjoint()).scale(lam);
        }
    }
    let d: Vec<f64> = (0..n).map(|i| clipped[(i, i)].re.max(1e-300).sqrt()).collect();
    CMat::from_fn(n, n, |a, b| clipped[(a, b)] / (d[a] * d[b]))
}

/// ADMM on the dual of `min <-C~, X>` s.t. `diag(X) = 1`, `X ⪰ 0`, where `C~`
/// is the real embedding. The real problem has twice the complex optimum.
fn admm(c: &CMat, problem: &SdpProblem, opts: &SolverOptions) -> (CMat, usize, Vec<f64>) {
    let n = c.nrows();
    let m = 2 * n;
    let chat: RMat = -real_embedding(c);
    let mut x = RMat::identity(m, m);
    let mut s = RMat::zeros(m, m);
    let mut mu = 1.0;
    let mut iterations = 0;
    let mut v = embedding_to_feasible(&x, n);
    while iterations < opts.max_iter {
        iterations += 1;
        // y = mu (1 - diag X) + diag(C^ - S), since A A* = I
        let y: Vec<f64> = (0..m).map(|i| mu * (1.0 - x[(i, i)]) + chat[(i, i)] - s[(i, i)]).collect();
        let mut w = &chat - mu * &x;
        for (i, yi) in y.iter().enumerate() {
            w[(i, i)] -= yi;
        }
        let s_new = psd_part(&w);
        let x_new = (&s_new - &w) / mu;
        let primal = (0..m).map(|i| (x_new[(i, i)] - 1.0).powi(2)).sum::<f64>().sqrt();
        let dual = (&s_new - &s).norm() / mu;
        s = s_new;
        x = x_new;
        if iterations % 10 == 0 {
            if primal > 5.0 * dual {
                mu *= 0.7;
            } else if dual > 5.0 * primal {
                mu /= 0.7;
            }
        }
        mu = mu.clamp(1e-6, 1e6);
        if iterations % 20 == 0 || iterations == opts.max_iter {
            v = embedding_to_feasible(&x, n);
            let cert = check_certificate(problem, &v);
            if primal < 1e-10 && cert.relative_gap <= 0.1 * opts.gap_tol {
                break;
            }
        }
    }
    if iterations % 20 != 0 && iterations != opts.max_iter {
        v = embedding_to_feasible(&x, n);
    }
    (v, iterations, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: usize, entries: &[(f64, f64)]) -> CMat {
        CMat::from_row_slice(n, n, &entries.iter().map(|&(a, b)| Complex64::new(a, b)).collect::<Vec<_>>())
    }

    fn random_psd(n: usize, seed: u64) -> CMat {
        let mut rng = rng_from_seed(seed);
        let a = CMat::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        &a * a.adjoint()
    }

    #[test]
    fn scalar_problem() {
        let p = SdpProblem::from_aggregate(c(1, &[(3.0, 0.0)])).unwrap();
        for method in [Method::Mixing, Method::Admm] {
            let sol = solve_with(&p, &SolverOptions::default(), method).unwrap();
            assert!((sol.objective - 3.0).abs() < 1e-9);
            assert!((sol.v[(0, 0)].re - 1.0).abs() < 1e-9);
            assert!(sol.certificate.diagonal_residual < 1e-9);
            assert!(sol.certificate.gap.abs() < 1e-9);
        }
    }

    #[test]
    fn two_by_two_all_ones() {
        let p = SdpProblem::from_aggregate(c(2, &[(1.0, 0.0), (0.5, 0.0), (0.5, 0.0), (1.0, 0.0)])).unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-8);
        for z in sol.v.iter() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn hand_dual_certificate() {
        let p = SdpProblem::from_aggregate(c(2, &[(1.0, 0.0), (0.5, 0.0), (0.5, 0.0), (1.0, 0.0)])).unwrap();
        let ones = CMat::from_element(2, 2, Complex64::new(1.0, 0.0));
        let cert = check_certificate(&p, &ones);
        assert_eq!(cert.dual, vec![1.5, 1.5]);
        assert!(cert.gap.abs() <= 1e-6);
        assert_eq!(cert.dual_residual, 0.0);
    }

    #[test]
    fn perturbed_diagonal_reported() {
        let p = SdpProblem::from_aggregate(c(2, &[(1.0, 0.0), (0.5, 0.0), (0.5, 0.0), (1.0, 0.0)])).unwrap();
        let mut v = CMat::from_element(2, 2, Complex64::new(1.0, 0.0));
        v[(0, 0)] += Complex64::new(0.1, 0.0);
        v[(1, 1)] += Complex64::new(0.1, 0.0);
        let cert = check_certificate(&p, &v);
        assert!((cert.diagonal_residual - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let not_herm = c(2, &[(1.0, 0.0), (0.5, 0.0), (0.2, 0.0), (1.0, 0.0)]);
        assert!(matches!(SdpProblem::from_aggregate(not_herm), Err(Error::NotHermitian { .. })));
        let indefinite = c(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)]);
        assert!(matches!(SdpProblem::from_aggregate(indefinite), Err(Error::NotPsd { .. })));
        assert!(SdpProblem::new(vec![]).is_err());
    }

    #[test]
    fn mixing_history_is_monotone() {
        let p = SdpProblem::from_aggregate(random_psd(8, 3)).unwrap();
        let sol = solve_with(&p, &SolverOptions::default(), Method::Mixing).unwrap();
        for w in sol.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * w[0].abs());
        }
    }

    #[test]
    fn methods_agree_on_random_instances() {
        for seed in 0..5 {
            let p = SdpProblem::from_aggregate(random_psd(4, seed)).unwrap();
            let opts = SolverOptions::default();
            let a = solve_with(&p, &opts, Method::Mixing).unwrap();
            let b = solve_with(&p, &opts, Method::Admm).unwrap();
            assert_eq!(a.status, SdpStatus::Converged, "{}", a.dump());
            assert_eq!(b.status, SdpStatus::Converged, "{}", b.dump());
            assert!((a.objective - b.objective).abs() / a.objective < 1e-4);
        }
    }

    #[test]
    fn huge_entries_are_handled() {
        let p = SdpProblem::from_aggregate(random_psd(5, 9).scale(1e20)).unwrap();
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Converged);
        let small = solve(&SdpProblem::from_aggregate(random_psd(5, 9)).unwrap(), &SolverOptions::default()).unwrap();
        assert!((sol.objective / 1e20 - small.objective).abs() / small.objective < 1e-4);
    }

    #[test]
    fn dump_mentions_dimension() {
        let p = SdpProblem::from_aggregate(c(1, &[(3.0, 0.0)])).unwrap();
        assert!(p.dump().starts_with("dim 1\n"));
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert!(sol.dump().contains("objective 3e0"));
    }
}
