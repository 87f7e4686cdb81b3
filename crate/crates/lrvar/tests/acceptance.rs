//! Acceptance suite. Prints one verdict line per criterion and exits
//! non-zero if any criterion fails for a reason other than a counterexample
//! established by the exact finite-sample calculation run alongside it.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use lrvar::config::{Experiment, StudyConfig};
use lrvar::harness::{replicate, run_experiment, MetricRecord};
use lrvar_core::estimators::{rank_transform, SQRT_HALF_PI};
use lrvar_core::sim::{
    gaussian_stream, mix_seed, simulate_arma, ArmaSpec, SimConfig, DEFAULT_BURN_IN, TABLE_1,
};
use lrvar_core::study::{EstimatorId, Smoothing};
use lrvar_core::truth::{arma_autocov, finite_n_variance, normal_cdf, sigma_f_sq, DEFAULT_TOL};
use lrvar_core::{
    bhat_n, carlstein, d_n, dhat_n, ecdf, jde_kernel_estimator, normal_abs_moment_inverse,
    overlapping_block, KernelSpec, Series,
};
use rayon::prelude::*;

const BLOCKS: [usize; 7] = [1, 2, 5, 10, 30, 50, 100];
/// Relative exact bias at or above which a cell counts as clearly biased.
const CLEAR_BIAS: f64 = 0.05;

enum Outcome {
    Pass,
    Fail,
    /// Fails only where exact calculation shows the claim cannot hold.
    KnownCounterexample(String),
}

struct Verdict {
    id: u8,
    title: &'static str,
    outcome: Outcome,
    details: Vec<String>,
}

impl Verdict {
    fn new(id: u8, title: &'static str, pass: bool, details: Vec<String>) -> Self {
        let outcome = if pass { Outcome::Pass } else { Outcome::Fail };
        Self {
            id,
            title,
            outcome,
            details,
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (m, (var / v.len() as f64).sqrt())
}

struct Part1 {
    exp: Experiment,
    records: Vec<MetricRecord>,
    seconds: f64,
}

impl Part1 {
    fn run() -> Self {
        let exp = StudyConfig::reference()
            .resolve()
            .expect("bundled config is valid")
            .into_iter()
            .find(|e| e.name == "part1")
            .expect("part1 experiment");
        let start = Instant::now();
        let records = run_experiment(&exp)
            .into_iter()
            .map(|o| o.expect("no failing cells"))
            .collect();
        Self {
            exp,
            records,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn spec_id(&self, ar: f64, ma: f64) -> usize {
        self.exp
            .specs
            .iter()
            .position(|s| s.ar() == ar && s.ma() == ma)
            .expect("spec in design")
    }

    fn cell(&self, spec_id: usize, est: EstimatorId, smoothing: Smoothing) -> &MetricRecord {
        self.records
            .iter()
            .find(|r| r.spec_id == spec_id && r.estimator == est && r.parameter == smoothing)
            .expect("cell in design")
    }

    fn grid_index(&self, est: EstimatorId, smoothing: Smoothing) -> usize {
        self.exp
            .grid
            .iter()
            .position(|c| c.estimator == est && c.smoothing == smoothing)
            .expect("cell in grid")
    }
}

fn c1(p: &Part1) -> Verdict {
    let id = p.spec_id(0.5, 0.5);
    let m = p.cell(id, EstimatorId::Carlstein, Smoothing::Adaptive);
    let len = m.mean_adaptive_length.expect("adaptive cell");
    let pass = (14.5..=17.5).contains(&len) && p.seconds < 60.0;
    Verdict::new(
        1,
        "adaptive block length anchor",
        pass,
        vec![format!(
            "ARMA(0.5,0.5): mean adaptive length {len:.3} (target [14.5, 17.5]); full 11-spec design in {:.1} s",
            p.seconds
        )],
    )
}

fn c2(p: &Part1) -> Verdict {
    let id = p.spec_id(0.0, 0.0);
    let mse: Vec<f64> = BLOCKS
        .iter()
        .map(|&l| {
            p.cell(id, EstimatorId::Carlstein, Smoothing::BlockLength(l))
                .mse
        })
        .collect();
    let best = (0..mse.len())
        .min_by(|&a, &b| mse[a].total_cmp(&mse[b]))
        .unwrap();
    let ratio = mse[1] / mse[0];
    let details = vec![
        format!(
            "carlstein MSE by l: {}",
            BLOCKS
                .iter()
                .zip(&mse)
                .map(|(l, m)| format!("{l}:{m:.5}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        format!(
            "argmin l = {}, MSE(2)/MSE(1) = {ratio:.3} (limit 2)",
            BLOCKS[best]
        ),
    ];
    Verdict::new(2, "white-noise optimum", best == 0 && ratio <= 2.0, details)
}

/// Exact mean of the carlstein estimator and of squared `bhat_n` for a
/// Gaussian ARMA path of length `n`, from the covariances of the centred
/// block sums `U_i = S_i − l·X̄`.
fn exact_block_means(spec: &ArmaSpec, n: usize, l: usize) -> (f64, f64) {
    let gamma: Vec<f64> = (0..n).map(|k| arma_autocov(spec, k)).collect();
    let k = n / l;
    let g = |d: i64| gamma[d.unsigned_abs() as usize];
    // Cov(S_i, S_j) depends on the block offset only
    let block_cov: Vec<f64> = (0..k as i64)
        .map(|d| {
            (-(l as i64 - 1)..l as i64)
                .map(|h| (l as i64 - h.abs()) as f64 * g(d * l as i64 + h))
                .sum()
        })
        .collect();
    let row: Vec<f64> = (0..n as i64)
        .map(|t| (0..n as i64).map(|s| g(t - s)).sum())
        .collect();
    let var_total: f64 = row.iter().sum();
    let with_total: Vec<f64> = (0..k)
        .map(|i| row[i * l..(i + 1) * l].iter().sum())
        .collect();
    let w = l as f64 / n as f64;
    let cov = |i: usize, j: usize| {
        block_cov[i.abs_diff(j)] - w * (with_total[i] + with_total[j]) + w * w * var_total
    };
    let sd: Vec<f64> = (0..k).map(|i| cov(i, i).sqrt()).collect();
    let carl = (0..k).map(|i| cov(i, i)).sum::<f64>() / (k * l) as f64;
    let mut abs_prod = 0.0;
    for i in 0..k {
        for j in 0..k {
            abs_prod += if i == j {
                cov(i, i)
            } else {
                let r = (cov(i, j) / (sd[i] * sd[j])).clamp(-1.0, 1.0);
                (2.0 / PI) * sd[i] * sd[j] * ((1.0 - r * r).sqrt() + r * r.asin())
            };
        }
    }
    (carl, FRAC_PI_2 * abs_prod / (k * k * l) as f64)
}

fn c3(p: &Part1) -> Verdict {
    // (ar, ma, required sign of the bias)
    let scope = [
        (0.5, 0.0, -1.0),
        (0.1, 0.0, -1.0),
        (0.0, 0.8, -1.0),
        (0.0, 0.1, -1.0),
        (0.5, 0.5, -1.0),
        (-0.8, 0.0, 1.0),
    ];
    let mut details = Vec::new();
    let mut unexplained = 0;
    let mut counterexamples = Vec::new();
    let mut checked = 0;
    for (ar, ma, sign) in scope {
        let spec = ArmaSpec::arma(ar, ma).unwrap();
        let id = p.spec_id(ar, ma);
        for &l in &BLOCKS {
            let (exact_c, exact_b) = exact_block_means(&spec, p.exp.n, l);
            for (est, exact) in [
                (EstimatorId::Bhat, exact_b),
                (EstimatorId::Carlstein, exact_c),
            ] {
                let m = p.cell(id, est, Smoothing::BlockLength(l));
                let exact_rel = exact / m.truth - 1.0;
                let z = m.bias / m.std_error;
                let sign_ok = m.bias * sign > 0.0;
                let clear = exact_rel * sign >= CLEAR_BIAS;
                let size_ok = !clear || z.abs() > 3.0;
                checked += 1;
                if sign_ok && size_ok {
                    continue;
                }
                let cell = format!(
                    "({ar},{ma}) {est} l={l}: bias {:+.4} ({z:+.1} SE), exact {exact_rel:+.3} relative",
                    m.bias
                );
                // the exact expectation itself has the wrong sign, and the simulation agrees with it
                if exact_rel * sign < 0.0
                    && ((m.bias - exact_rel * m.truth) / m.std_error).abs() < 3.0
                {
                    counterexamples.push(cell);
                } else {
                    unexplained += 1;
                    details.push(format!("violated: {cell}"));
                }
            }
        }
    }
    details.insert(
        0,
        format!("{checked} cells: negative bias for AR 0.5, AR 0.1, MA 0.8, MA 0.1, ARMA(0.5,0.5); positive for AR -0.8; 3 SE where exact relative bias >= {CLEAR_BIAS}"),
    );
    let outcome = if unexplained > 0 {
        Outcome::Fail
    } else if counterexamples.is_empty() {
        Outcome::Pass
    } else {
        for c in &counterexamples {
            details.push(format!("exact counterexample, matched by simulation: {c}"));
        }
        Outcome::KnownCounterexample(format!(
            "{} cell(s) where the exact finite-sample bias has the opposite sign",
            counterexamples.len()
        ))
    };
    Verdict {
        id: 3,
        title: "bias sign",
        outcome,
        details,
    }
}

fn c4() -> Verdict {
    let spec = ArmaSpec::arma(0.5, 0.0).unwrap();
    let sigma_f = sigma_f_sq(&spec, DEFAULT_TOL).unwrap();
    let mut details = Vec::new();
    let mut rel_b = Vec::new();
    let mut rel_d = Vec::new();
    for (i, n) in [500usize, 5000, 50_000].into_iter().enumerate() {
        let l = (n as f64).cbrt().ceil() as usize;
        let est: Vec<(f64, f64)> = (0..200u64)
            .into_par_iter()
            .map(|r| {
                let x = simulate_arma(
                    &spec,
                    &SimConfig::with_seed(n, mix_seed(404, i as u64, r)).unwrap(),
                );
                (
                    bhat_n(&x, l).unwrap().powi(2),
                    dhat_n(&x, l).unwrap().powi(2),
                )
            })
            .collect();
        let b = mean(&est.iter().map(|e| e.0).collect::<Vec<_>>()) / 4.0 - 1.0;
        let d = mean(&est.iter().map(|e| e.1).collect::<Vec<_>>()) / sigma_f - 1.0;
        details.push(format!(
            "n={n} l={l}: bhat^2 rel. error {b:+.4}, dhat^2 rel. error {d:+.4}"
        ));
        rel_b.push(b.abs());
        rel_d.push(d.abs());
    }
    let ok = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]) && v[2] < 0.10;
    Verdict::new(4, "consistency", ok(&rel_b) && ok(&rel_d), details)
}

fn c5() -> Verdict {
    let n = 500;
    let paths = 20_000u64;
    let mut details = Vec::new();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (s, &(ar, ma)) in TABLE_1.iter().enumerate() {
        let spec = ArmaSpec::arma(ar, ma).unwrap();
        let sums: Vec<f64> = (0..paths)
            .into_par_iter()
            .map(|r| {
                let x = simulate_arma(
                    &spec,
                    &SimConfig::new(n, DEFAULT_BURN_IN, mix_seed(505, s as u64, r)).unwrap(),
                );
                x.iter().sum::<f64>() / (n as f64).sqrt()
            })
            .collect();
        let m = mean(&sums);
        let dev: Vec<f64> = sums.iter().map(|v| (v - m).powi(2)).collect();
        let var = dev.iter().sum::<f64>() / (paths - 1) as f64;
        let m4 = mean(&dev.iter().map(|d| d * d).collect::<Vec<_>>());
        let se = ((m4 - var * var) / paths as f64).sqrt();
        let truth = finite_n_variance(&spec, n).unwrap();
        let z = (var - truth) / se;
        worst = worst.max(z.abs());
        if z.abs() >= 3.0 {
            pass = false;
            details.push(format!(
                "({ar},{ma}): MC {var:.4} vs {truth:.4} ({z:+.2} SE)"
            ));
        }
    }
    details.insert(
        0,
        format!("partial-sum variance, 11 specs x {paths} paths: max |z| = {worst:.2}"),
    );

    // Rank series: per path, average of u_t^2 + 2 Σ_{j≤50} u_t u_{t+j} over
    // 500 positions, where u = F(X) − 1/2 with the true marginal F.
    let (positions, lags) = (500usize, 50usize);
    for (s, ar) in [0.0, 0.5, -0.5].into_iter().enumerate() {
        let spec = ArmaSpec::arma(ar, 0.0).unwrap();
        let sd = arma_autocov(&spec, 0).sqrt();
        let g: Vec<f64> = (0..paths)
            .into_par_iter()
            .map(|r| {
                let x = simulate_arma(
                    &spec,
                    &SimConfig::with_seed(positions + lags, mix_seed(506, s as u64, r)).unwrap(),
                );
                let u: Vec<f64> = x.iter().map(|v| normal_cdf(v / sd) - 0.5).collect();
                let total: f64 = (0..positions)
                    .map(|t| u[t] * u[t] + 2.0 * u[t] * u[t + 1..=t + lags].iter().sum::<f64>())
                    .sum();
                total / positions as f64
            })
            .collect();
        let (m, se) = mean_and_se(&g);
        let truth = sigma_f_sq(&spec, DEFAULT_TOL).unwrap();
        let z = (m - truth) / se;
        pass &= z.abs() < 3.0;
        details.push(format!(
            "rank AR {ar}: MC {m:.5} vs {truth:.5} ({z:+.2} SE)"
        ));
    }
    Verdict::new(5, "oracle equivalence of truths", pass, details)
}

fn c6() -> Verdict {
    let n = 200;
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for i in 0..1000u64 {
        let x = Series::new(gaussian_stream(mix_seed(606, 0, i), n)).unwrap();
        let l = 1 + (mix_seed(606, 1, i) % 100) as usize;
        let gap = (d_n(&x, l, normal_cdf).unwrap() - dhat_n(&x, l).unwrap()).abs();
        let bound = (2.0 * PI).sqrt() * (l as f64).sqrt() * ecdf(&x).sup_distance(normal_cdf);
        if gap > bound {
            violations += 1;
        }
        worst = worst.max(gap / bound);
    }
    Verdict::new(
        6,
        "coupling bound",
        violations == 0,
        vec![format!(
            "1000 series, n={n}: {violations} violations, max gap/bound = {worst:.4}"
        )],
    )
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

fn c7() -> Verdict {
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };
    let digits12 = |a: f64, b: f64| (a - b).abs() <= 5e-13 * b.abs();
    check(
        normal_abs_moment_inverse(2.0).unwrap() == 1.0,
        "c_2 = 1".into(),
    );
    check(
        digits12(normal_abs_moment_inverse(1.0).unwrap(), FRAC_PI_2.sqrt()),
        "c_1 = sqrt(pi/2)".into(),
    );
    check(
        digits12(SQRT_HALF_PI, 1.253_314_137_315_5),
        "sqrt(pi/2) constant".into(),
    );

    let cases = 500u64;
    for i in 0..cases {
        let n = 2 + (mix_seed(707, 0, i) % 400) as usize;
        let ar = ((mix_seed(707, 1, i) % 1800) as f64 - 900.0) / 1000.0;
        let spec = ArmaSpec::arma(ar, 0.0).unwrap();
        let x = simulate_arma(
            &spec,
            &SimConfig::with_seed(n, mix_seed(707, 2, i)).unwrap(),
        );
        let l = 1 + (mix_seed(707, 3, i) as usize % (n / 2));
        let shift = ((mix_seed(707, 4, i) % 2001) as f64 - 1000.0) / 100.0;
        let scale = 0.01 + (mix_seed(707, 5, i) % 10_000) as f64 / 100.0;
        let gamma = 0.5 + (mix_seed(707, 6, i) % 300) as f64 / 10.0;
        let kern = KernelSpec::bartlett(gamma).unwrap();
        let tag = format!("case {i} (n={n}, l={l})");

        let c1 = carlstein(&x, 1).unwrap();
        check(
            overlapping_block(&x, 1, 2.0).unwrap() == c1,
            format!("{tag}: overlapping(1,2) = carlstein(1)"),
        );
        for g in [0.25, 1.0] {
            check(
                jde_kernel_estimator(&x, &KernelSpec::bartlett(g).unwrap()) == c1,
                format!("{tag}: jde({g}) = carlstein(1)"),
            );
        }

        let shifted = x.map(|v| v + shift).unwrap();
        let scaled = x.map(|v| v * scale).unwrap();
        for (est, f) in [
            (
                "bhat_n",
                &(|s: &Series| bhat_n(s, l).unwrap()) as &dyn Fn(&Series) -> f64,
            ),
            ("carlstein", &|s: &Series| carlstein(s, l).unwrap()),
            ("overlapping p=1.5", &|s: &Series| {
                overlapping_block(s, l, 1.5).unwrap()
            }),
            ("jde", &|s: &Series| jde_kernel_estimator(s, &kern)),
        ] {
            check(
                close(f(&shifted), f(&x)),
                format!("{tag}: {est} shift invariance"),
            );
            let power = match est {
                "bhat_n" => 1.0,
                "overlapping p=1.5" => 1.5,
                _ => 2.0,
            };
            check(
                close(f(&scaled), scale.powf(power) * f(&x)),
                format!("{tag}: {est} scale equivariance"),
            );
        }
        let monotone = x.map(|v| v.powi(3) + v + 7.0).unwrap();
        check(
            close(dhat_n(&monotone, l).unwrap(), dhat_n(&x, l).unwrap()),
            format!("{tag}: dhat_n rank invariance"),
        );
        check(
            rank_transform(&monotone) == rank_transform(&x),
            format!("{tag}: rank transform invariance"),
        );
    }
    let mut details = vec![format!("constants plus {cases} randomized series")];
    details.extend(failures.iter().take(10).cloned());
    Verdict::new(
        7,
        "exact identities and invariances",
        failures.is_empty(),
        details,
    )
}

fn c8(p: &Part1) -> Verdict {
    let id = p.spec_id(0.5, 0.5);
    let rows = replicate(&p.exp, id);
    let mut pass = true;
    let mut details = Vec::new();
    for l in [5, 10, 30, 50, 100] {
        let values = |est| {
            let col = p.grid_index(est, Smoothing::BlockLength(l));
            rows.iter()
                .map(|r| r[col].as_ref().unwrap().value)
                .collect::<Vec<f64>>()
        };
        let (b, c) = (values(EstimatorId::Bhat), values(EstimatorId::Carlstein));
        let truth = p
            .cell(id, EstimatorId::Carlstein, Smoothing::BlockLength(l))
            .truth;
        let (mb, mc) = (mean(&b), mean(&c));
        // both biases are negative here, so |bias| ordering is the ordering of the means
        let bias_gap = (mb - truth).abs() - (mc - truth).abs();
        let sign = if (mb - truth) < 0.0 && (mc - truth) < 0.0 {
            1.0
        } else {
            f64::NAN
        };
        let (_, bias_se) = mean_and_se(
            &b.iter()
                .zip(&c)
                .map(|(x, y)| sign * (x - y))
                .collect::<Vec<_>>(),
        );
        let var_diff: Vec<f64> = b
            .iter()
            .zip(&c)
            .map(|(x, y)| (x - mb).powi(2) - (y - mc).powi(2))
            .collect();
        let (var_gap, var_se) = mean_and_se(&var_diff);
        let ok = bias_gap < -3.0 * bias_se && var_gap > 3.0 * var_se;
        pass &= ok;
        details.push(format!(
            "l={l}: |bias| bhat^2 - carlstein = {bias_gap:+.4} ({:+.1} SE), variance difference = {var_gap:+.4} ({:+.1} SE)",
            bias_gap / bias_se,
            var_gap / var_se
        ));
    }
    Verdict::new(8, "estimator similarity ordering", pass, details)
}

fn main() -> ExitCode {
    let part1 = Part1::run();
    let verdicts = [
        c1(&part1),
        c2(&part1),
        c3(&part1),
        c4(),
        c5(),
        c6(),
        c7(),
        c8(&part1),
    ];
    let mut unexpected = 0;
    for v in &verdicts {
        let (word, note) = match &v.outcome {
            Outcome::Pass => ("PASS", String::new()),
            Outcome::Fail => {
                unexpected += 1;
                ("FAIL", String::new())
            }
            Outcome::KnownCounterexample(why) => ("FAIL", format!(" [known: {why}]")),
        };
        println!("criterion {} {word}: {}{note}", v.id, v.title);
        for d in &v.details {
            println!("    {d}");
        }
    }
    let passed = verdicts
        .iter()
        .filter(|v| matches!(v.outcome, Outcome::Pass))
        .count();
    println!(
        "{passed}/{} criteria pass, {unexpected} unexpected failure(s)",
        verdicts.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
