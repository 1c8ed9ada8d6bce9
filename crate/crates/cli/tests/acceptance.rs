//! End-to-end acceptance checks. Runs every criterion, prints one PASS/FAIL
//! line each, and exits non-zero when any of them fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use simlink::channel::{complex_normal, factored_product, PhaseConfig};
use simlink::config::default_scenario;
use simlink::geometry::Side;
use simlink::linalg::{cis, min_eigenvalue, relative_error, CMat};
use simlink::optimizer::{
    closed_form_td, factorize_layer, lift_costs, prepare, run_algorithm, sweep_order, Algorithm, BcdTrace,
};
use simlink::sdp::{solve, solve_with, Method, SdpProblem, SolverOptions};
use simlink::seed::{derive_rng, derive_seed};
use simlink::snc::{minplus_convolve, minplus_sequences, queueing_bound, simulate_waits, ExpTail, QueueParams, QueueTail};
use simlink::LinkScenario;
use simlink_cli::{delay_surface, linspace, run_sweep, SurfaceCell, SweepSpec, QUOTED_RATES};

const BASE_SEED: u64 = 20_240_901;

type Check = Result<(bool, String), String>;

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Mean final BCD (and optionally AO) rate over `reps` replications of one
/// scenario. Every value of a sweep uses the same per-replication seeds.
fn mean_rates(s: &LinkScenario, reps: usize, algorithms: Vec<Algorithm>) -> Result<simlink_cli::SweepResult, String> {
    let spec = SweepSpec {
        parameter: "num_streams".into(),
        values: vec![s.num_streams.to_string()],
        replications: reps,
        iterations: 20,
        algorithms,
        base: s.clone(),
        base_seed: BASE_SEED,
    };
    let r = run_sweep(&spec, workers()).map_err(e)?;
    if let Some(bad) = r.rows.iter().find(|row| row.status != "ok") {
        return Err(bad.status.clone());
    }
    Ok(r)
}

fn bcd_mean(s: &LinkScenario) -> Result<f64, String> {
    let r = mean_rates(s, 5, vec![Algorithm::Bcd])?;
    r.mean_final_rate(&s.num_streams.to_string(), Algorithm::Bcd)
        .ok_or_else(|| "no successful run".to_string())
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" < ")
}

fn algorithm_ordering() -> Check {
    let s = default_scenario();
    let r = mean_rates(&s, 10, vec![Algorithm::Bcd, Algorithm::Ao])?;
    let bcd = r.mean_final_rate("3", Algorithm::Bcd).ok_or("no BCD runs")?;
    let ao = r.mean_final_rate("3", Algorithm::Ao).ok_or("no AO runs")?;
    let wins = (0..10)
        .filter(|&rep| {
            let rate = |alg| r.rows.iter().find(|x| x.replication == rep && x.algorithm == alg).map(|x| x.final_v_data);
            rate(Algorithm::Bcd) >= rate(Algorithm::Ao)
        })
        .count();
    let gap = bcd / ao - 1.0;
    Ok((
        bcd > ao && gap >= 0.20,
        format!(
            "M=N=36 L=K=3 S=3, 10 seeds x 20 iterations: BCD {bcd:.2}, AO {ao:.2} bit/s/Hz, gap {:+.1}% (need >= +20%), BCD >= AO on {wins}/10 seeds",
            100.0 * gap
        ),
    ))
}

fn stream_monotonicity() -> Check {
    let means = [1, 3, 5]
        .iter()
        .map(|&streams| bcd_mean(&LinkScenario { num_streams: streams, ..default_scenario() }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((strictly_increasing(&means), format!("S = 1, 3, 5: {}", fmt_list(&means))))
}

fn structure_monotonicity() -> Check {
    let atoms = [16, 25, 36]
        .iter()
        .map(|&m| bcd_mean(&LinkScenario { atoms_tx: m, atoms_rx: m, ..default_scenario() }))
        .collect::<Result<Vec<_>, _>>()?;
    let layers = [2, 3, 4]
        .iter()
        .map(|&l| bcd_mean(&LinkScenario { layers_tx: l, layers_rx: l, ..default_scenario() }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((
        strictly_increasing(&atoms) && strictly_increasing(&layers),
        format!("M=N = 16, 25, 36: {}; L=K = 2, 3, 4: {}", fmt_list(&atoms), fmt_list(&layers)),
    ))
}

fn regret_descent() -> Check {
    let s = LinkScenario { num_streams: 5, ..default_scenario() };
    let traces: Vec<BcdTrace> = (0..10)
        .map(|rep| run_algorithm(Algorithm::Bcd, &s, 20, derive_seed(BASE_SEED, &[4, rep])).map(|o| o.trace))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    let monotone = traces
        .iter()
        .filter(|t| {
            let mut prev = t.initial_regret;
            t.records.iter().all(|r| {
                let ok = r.regret <= prev;
                prev = r.regret;
                ok
            })
        })
        .count();
    let descending = traces
        .iter()
        .filter(|t| t.records.first().map(|r| r.proposed_regret) > t.records.last().map(|r| r.proposed_regret))
        .count();
    Ok((
        monotone == 10 && descending >= 9,
        format!("S=5: accepted regret non-increasing on {monotone}/10 runs, proposed regret first > last on {descending}/10 (need 9)"),
    ))
}

fn snc_dominance() -> Check {
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut points = 0;
    let mut cell = 0u64;
    for delta in [0.5, 1.0, 2.0] {
        for l in [1e7, 5e7, 1e8] {
            for vb in [3e8, 5e8, 1e9] {
                let s = LinkScenario {
                    arrival_rate_pps: delta,
                    packet_mean_bits: l,
                    bandwidth_hz: 1e7,
                    ..default_scenario()
                };
                let v = vb / s.bandwidth_hz;
                let a = (vb - delta * l) / l;
                let grid: Vec<f64> = (0..=10).map(|k| 0.5 * k as f64 / a).collect();
                let waits = simulate_waits(&QueueParams::from_scenario(&s, v), 100_000, &mut derive_rng(BASE_SEED, &[5, cell]))
                    .map_err(e)?;
                cell += 1;
                for p in QueueTail::from_waits(&waits, &grid).points {
                    let bound = queueing_bound(p.t, &s, v).map_err(e)?;
                    points += 1;
                    if p.tail > bound + 3.0 * p.half_width {
                        violations += 1;
                    }
                    worst = worst.max(p.tail - bound - 3.0 * p.half_width);
                }
            }
        }
    }
    Ok((
        violations == 0,
        format!("27 cells x 1e5 departures, {points} tail points, {violations} above bound + 3 CI (largest excess {worst:.3e})"),
    ))
}

/// Golden-section minimiser of a unimodal `f` on `[lo, hi]`.
fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

fn closed_form_delay() -> Check {
    let mut rng = derive_rng(BASE_SEED, &[6]);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v: f64 = rng.random_range(10.0..60.0);
        let streams: usize = rng.random_range(1..=5);
        let l: f64 = rng.random_range(1e7..1.5e8);
        let s0 = LinkScenario { num_streams: streams, packet_mean_bits: l, ..default_scenario() };
        let c = v * s0.bandwidth_hz / (streams as f64 * l);
        let rho = rng.random_range(0.05..0.95) * c;
        let s = LinkScenario { delay_weight: rho, ..s0 };
        let sol = closed_form_td(v, &s).map_err(e)?;
        if sol.boundary {
            return Err(format!("interior tuple flagged as boundary: v={v}, S={streams}, l={l}, rho={rho}"));
        }
        let numeric = golden_min(|t| (-c * t).exp() + rho * t, 0.0, 50.0 / c);
        worst = worst.max((sol.t_d - numeric).abs());
    }
    let mut boundary_ok = 0;
    for k in [1.0, 1.5, 10.0] {
        let s = LinkScenario { num_streams: 2, packet_mean_bits: 5e7, ..default_scenario() };
        let rho = k * 30.0 * s.bandwidth_hz / (2.0 * 5e7);
        let sol = closed_form_td(30.0, &LinkScenario { delay_weight: rho, ..s }).map_err(e)?;
        if sol.boundary && sol.t_d == 0.0 {
            boundary_ok += 1;
        }
    }
    Ok((
        worst <= 1e-6 && boundary_ok == 3,
        format!("100 tuples, max |closed form - golden section| = {worst:.2e} s (need <= 1e-6); boundary cases {boundary_ok}/3 return 0 with flag"),
    ))
}

fn random_psd(n: usize, seed: u64) -> CMat {
    let mut rng = derive_rng(BASE_SEED, &[7, seed]);
    let b = CMat::from_fn(n, n, |_, _| complex_normal(&mut rng));
    &b * b.adjoint()
}

fn quad(c: &CMat, x: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        for j in 0..x.len() {
            acc += x[i].conj() * c[(i, j)] * x[j];
        }
    }
    acc.re
}

/// Largest `x^H C x` over unit-modulus `x` with the last entry 1 and the
/// others on a 16-point phase grid.
fn grid_rank_one(c: &CMat) -> f64 {
    let a = c.nrows() - 1;
    let mut best = f64::NEG_INFINITY;
    for code in 0..16usize.pow(a as u32) {
        let mut x: Vec<Complex64> = (0..a).map(|i| cis(TAU * ((code / 16usize.pow(i as u32)) % 16) as f64 / 16.0)).collect();
        x.push(Complex64::new(1.0, 0.0));
        best = best.max(quad(c, &x));
    }
    best
}

fn sdp_correctness() -> Check {
    let opts = SolverOptions::default();
    let (mut worst_gap, mut worst_agree, mut below_grid, mut infeasible) = (0.0f64, 0.0f64, 0, 0);
    for k in 0..50u64 {
        let n = 2 + (k as usize % 4);
        let c = random_psd(n, k);
        let problem = SdpProblem::from_aggregate(c.clone()).map_err(e)?;
        let sol = solve(&problem, &opts).map_err(e)?;
        // certificate recomputed here from the returned dual
        let obj = (0..n).map(|i| (0..n).map(|j| c[(i, j)] * sol.v[(j, i)]).sum::<Complex64>().re).sum::<f64>();
        let y = &sol.certificate.dual;
        let slack = CMat::from_fn(n, n, |i, j| if i == j { Complex64::new(y[i], 0.0) } else { Complex64::new(0.0, 0.0) }) - &c;
        let dual_ok = min_eigenvalue(&slack) >= -1e-9 * c.norm();
        let diag_ok = (0..n).all(|i| (sol.v[(i, i)].re - 1.0).abs() <= opts.feasibility_tol);
        if !(dual_ok && diag_ok && min_eigenvalue(&sol.v) >= -opts.feasibility_tol) {
            infeasible += 1;
        }
        worst_gap = worst_gap.max((y.iter().sum::<f64>() - obj) / obj);
        if obj < grid_rank_one(&c) * (1.0 - 1e-12) {
            below_grid += 1;
        }
        let mix = solve_with(&problem, &opts, Method::Mixing).map_err(e)?;
        let admm = solve_with(&problem, &opts, Method::Admm).map_err(e)?;
        worst_agree = worst_agree.max((mix.objective - admm.objective).abs() / mix.objective.abs().max(admm.objective.abs()));
    }
    Ok((
        worst_gap <= 1e-4 && worst_agree <= 1e-4 && below_grid == 0 && infeasible == 0,
        format!(
            "50 instances, n = 2..5: max relative gap {worst_gap:.2e}, max mixing/ADMM disagreement {worst_agree:.2e}, {below_grid} below grid optimum, {infeasible} infeasible"
        ),
    ))
}

fn small_instance() -> LinkScenario {
    LinkScenario {
        num_streams: 3,
        atoms_tx: 16,
        atoms_rx: 16,
        layers_tx: 3,
        layers_rx: 3,
        ..default_scenario()
    }
}

fn unimodular(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| cis(rng.random_range(0.0..TAU))).collect()
}

fn lifting_identity() -> Check {
    let s = small_instance();
    let (state, phases) = prepare(&s, BASE_SEED).map_err(e)?;
    let mut rng = derive_rng(BASE_SEED, &[8]);
    let mut worst = 0.0f64;
    let mut subproblems = 0;
    for (side, layer) in sweep_order(&s) {
        let sub = factorize_layer(&state, &phases, side, layer).map_err(e)?;
        let costs = lift_costs(&sub);
        subproblems += 1;
        for _ in 0..100 {
            let v = unimodular(sub.atoms(), &mut rng);
            // Σ_s ‖h_r,s^H Diag(v) h_t‖²
            let mut direct = 0.0;
            for st in 0..sub.streams() {
                for j in 0..sub.right.ncols() {
                    direct += (0..v.len()).map(|i| sub.left[(st, i)] * v[i] * sub.right[(i, j)]).sum::<Complex64>().norm_sqr();
                }
            }
            let lifted: f64 = (0..sub.streams())
                .map(|st| {
                    let l = sub.lambda(st);
                    (0..l.ncols())
                        .map(|j| (0..v.len()).map(|i| v[i].conj() * l[(i, j)]).sum::<Complex64>().norm_sqr())
                        .sum::<f64>()
                })
                .sum();
            let mut x = v.clone();
            x.push(Complex64::new(1.0, 0.0));
            let traced: f64 = costs.iter().map(|r| quad(r, &x)).sum();
            worst = worst.max((direct - lifted).abs() / direct).max((direct - traced).abs() / direct);
        }
    }
    Ok((worst <= 1e-9, format!("{subproblems} subproblems x 100 vectors, max relative error {worst:.2e} (need <= 1e-9)")))
}

fn diag_times(d: &[Complex64], m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)])
}

/// `U_out Ψ^K U^K ... U^2 Ψ^1 G Φ^L W^L ... Φ^2 W^2 Φ^1 W^1`, multiplied out
/// layer by layer.
fn direct_channel(state: &simlink::channel::ChannelState, p: &PhaseConfig) -> CMat {
    let c = &state.coeffs;
    let mut x = diag_times(&p.coefficients(Side::Tx, 0), &c.tx_input);
    for (l, w) in c.tx_hops.iter().enumerate() {
        x = diag_times(&p.coefficients(Side::Tx, l + 1), &(w * x));
    }
    let mut acc = diag_times(&p.coefficients(Side::Rx, 0), &(&state.g * x));
    for (k, u) in c.rx_hops.iter().enumerate() {
        acc = diag_times(&p.coefficients(Side::Rx, k + 1), &(u * acc));
    }
    &c.rx_output * acc
}

fn factorization_consistency() -> Check {
    let s = small_instance();
    let (state, phases) = prepare(&s, BASE_SEED ^ 9).map_err(e)?;
    let direct = direct_channel(&state, &phases);
    let mut worst = relative_error(&state.assemble(&phases).map_err(e)?, &direct);
    for (side, layer) in sweep_order(&s) {
        let (left, right) = state.layer_factors(&phases, side, layer).map_err(e)?;
        let h = factored_product(&left, &phases.coefficients(side, layer - 1), &right);
        worst = worst.max(relative_error(&h, &direct));
    }
    Ok((worst <= 1e-9, format!("6 layers of a 3+3 layer stack, max relative error {worst:.2e} (need <= 1e-9)")))
}

fn delay_surface_shape() -> Check {
    let s = default_scenario();
    let t_grid = linspace(0.05, 3.0, 12);
    let l_grid = linspace(1e7, 1.5e8, 15);
    let cells = delay_surface(&s, &QUOTED_RATES, &t_grid, &l_grid).map_err(e)?;
    let at = |rate: usize, li: usize, ti: usize| -> &SurfaceCell { &cells[(rate * l_grid.len() + li) * t_grid.len() + ti] };
    let mut bad = 0;
    for r in 0..QUOTED_RATES.len() {
        for li in 0..l_grid.len() {
            for ti in 0..t_grid.len() {
                let c = at(r, li, ti);
                if c.status != "ok" {
                    bad += 1;
                    continue;
                }
                if ti > 0 && !(c.raw <= at(r, li, ti - 1).raw && c.bound <= at(r, li, ti - 1).bound) {
                    bad += 1;
                }
                if li > 0 && !(c.raw >= at(r, li - 1, ti).raw && c.bound >= at(r, li - 1, ti).bound) {
                    bad += 1;
                }
            }
        }
    }
    // S = 1 is the first quoted rate, S = 5 the last
    let last = QUOTED_RATES.len() - 1;
    let mut crossings = Vec::new();
    for ti in 0..t_grid.len() {
        let diff: Vec<f64> = (0..l_grid.len()).map(|li| at(0, li, ti).raw - at(last, li, ti).raw).collect();
        if diff[0] < 0.0 && diff[diff.len() - 1] > 0.0 {
            let li = diff.iter().position(|&d| d > 0.0).unwrap_or(0);
            crossings.push(format!("T={:.2} s: l_d in ({:.0}, {:.0}] Mb", t_grid[ti], l_grid[li - 1] / 1e6, l_grid[li] / 1e6));
        }
    }
    Ok((
        bad == 0 && !crossings.is_empty(),
        format!(
            "3 rates x 15 l_d x 12 T: {bad} monotonicity violations; S=1/S=5 crossover at {} of 12 thresholds{}",
            crossings.len(),
            crossings.last().map(|c| format!(", e.g. {c}")).unwrap_or_default()
        ),
    ))
}

fn random_tail(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let mut x = rng.random_range(0.5..2.0);
    (0..len)
        .map(|_| {
            let out = x;
            x = (x - rng.random_range(0.0..0.1f64)).max(0.0);
            out
        })
        .collect()
}

fn minplus_algebra() -> Check {
    let mut rng = derive_rng(BASE_SEED, &[11]);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b, c) = (random_tail(&mut rng, 64), random_tail(&mut rng, 64), random_tail(&mut rng, 64));
        let diff = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        worst = worst.max(diff(&minplus_sequences(&a, &b), &minplus_sequences(&b, &a)));
        worst = worst.max(diff(
            &minplus_sequences(&minplus_sequences(&a, &b), &c),
            &minplus_sequences(&a, &minplus_sequences(&b, &c)),
        ));
        // continuous convolution of non-exponential tails
        let (p, q) = (rng.random_range(0.5..3.0), rng.random_range(0.5..3.0));
        let f = move |x: f64| 1.0 / (1.0 + x).powf(p);
        let g = move |x: f64| (-q * x * x).exp();
        for x in [0.3, 1.0, 4.0] {
            let fg = minplus_convolve(&f, &g, x, 200).map_err(e)?;
            let gf = minplus_convolve(&g, &f, x, 200).map_err(e)?;
            worst = worst.max((fg - gf).abs());
        }
    }
    let unit = ExpTail { scale: 1.0, rate: 1.0 };
    let closure = |x: f64| (-x).exp();
    let mut closed = 0.0f64;
    for x in [0.0f64, 0.5, 1.0, 3.0, 10.0] {
        let expected = 2.0 * (-x / 2.0).exp();
        closed = closed.max((minplus_convolve(&unit, &unit, x, 64).map_err(e)? - expected).abs());
        closed = closed.max((minplus_convolve(&closure, &closure, x, 64).map_err(e)? - expected).abs());
    }
    Ok((
        worst <= 1e-9 && closed <= 1e-8,
        format!("20 triples: max commutativity/associativity error {worst:.2e} (need <= 1e-9); 2e^(-x/2) error {closed:.2e} (need <= 1e-8)"),
    ))
}

fn cli(args: &[&str], out: &std::path::Path) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_simlink"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(e)?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    std::fs::read(out.join(format!("{}.tsv", args[0].replace('-', "_")))).map_err(e)
}

fn determinism() -> Check {
    let spec = SweepSpec {
        parameter: "streams".into(),
        values: vec!["1".into(), "2".into()],
        replications: 2,
        iterations: 3,
        algorithms: vec![Algorithm::Bcd, Algorithm::Ao],
        base: LinkScenario { atoms_tx: 9, atoms_rx: 9, layers_tx: 2, layers_rx: 2, ..default_scenario() },
        base_seed: BASE_SEED,
    };
    let one = run_sweep(&spec, 1).map_err(e)?.table().render();
    let four = run_sweep(&spec, 4).map_err(e)?.table().render();
    let again = run_sweep(&spec, 1).map_err(e)?.table().render();
    let dir = tempfile::tempdir().map_err(e)?;
    let sweep = ["rate-sweep", "--values", "1,2", "--reps", "2", "--iterations", "2", "--set", "atoms_tx=9", "--set", "atoms_rx=9"];
    let mut cli_runs = Vec::new();
    for (i, w) in ["1", "4", "1"].iter().enumerate() {
        let mut args = sweep.to_vec();
        args.extend(["--workers", w]);
        cli_runs.push(cli(&args, &dir.path().join(format!("sweep{i}")))?);
    }
    let surface: Vec<Vec<u8>> = (0..2)
        .map(|i| cli(&["delay-surface"], &dir.path().join(format!("surface{i}"))))
        .collect::<Result<_, _>>()?;
    let library = one == four && one == again;
    let binary = cli_runs.windows(2).all(|w| w[0] == w[1]) && surface[0] == surface[1];
    Ok((
        library && binary,
        format!(
            "library sweep identical at 1/4/1 workers: {library}; CLI rate-sweep at 1/4/1 workers and delay-surface reruns byte-identical: {binary}"
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("algorithm ordering", algorithm_ordering),
        ("stream monotonicity", stream_monotonicity),
        ("structure monotonicity", structure_monotonicity),
        ("regret descent", regret_descent),
        ("queue bound dominance", snc_dominance),
        ("closed-form propagation budget", closed_form_delay),
        ("SDP correctness", sdp_correctness),
        ("lifting identity", lifting_identity),
        ("factorization consistency", factorization_consistency),
        ("delay surface shape", delay_surface_shape),
        ("min-plus algebra", minplus_algebra),
        ("determinism", determinism),
    ];
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (name, _) in &criteria {
            println!("{name}: test");
        }
        return ExitCode::SUCCESS;
    }
    let filter = args.iter().find(|a| !a.starts_with('-'));
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if filter.is_some_and(|f| !name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|err| (false, format!("error: {err}")));
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {:<32} {} ({:.1} s) {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
