//! Acceptance criteria 1-9. Each test prints one PASS/FAIL line.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blockshrink::bounds::{
    density_d_dblprime, density_d_prime, g_from_lambdas, lambda1, lambda2, lambda3, minimax_benchmark, moment_bound,
    moment_bound_from, pinsker_constant, seq_d_dblstar, seq_d_star, seq_lower_bound, stirling_factors, Lambda1Form,
    Target, UniversalConstants,
};
use blockshrink::distributions::{
    block_pair_functionals, class_functional, energy_d, sample_with, sobolev_index, true_block_energy,
    FunctionClass,
};
use blockshrink::estimator::{
    cosine_estimate, ep_weight, ep_weights, oracle_block_risk, oracle_weights_from, plancherel_mise, stein_weight,
    stein_weights, EstimatorKind, SpectralTruth,
};
use blockshrink::harness::{run_experiment, ExperimentConfig};
use blockshrink::quad::GaussLegendre;
use blockshrink::sample::replication_rng;
use blockshrink::schedule::{build_schedule, build_schedule_with, cutoff_target, Lengths, Portfolio};
use blockshrink::seqmodel::{seq_risks, SeqEstimator, SeqExperiment};
use blockshrink::spectral::{
    block_energies, block_energy_exact, block_energy_quad, ecf_eval, BlockStats, EnergyMethod, DEFAULT_QUAD_NODES,
};
use blockshrink::{cf_true, DistributionSpec, Sample};

use common::{mean_se, rel_diff, second, spatial_ise, verdict};

fn test_specs() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::standard_normal(),
        DistributionSpec::cauchy(0.0, 1.0),
        DistributionSpec::Linnik { beta: 0.75 },
        DistributionSpec::PearsonType { rho: 0.4 },
        DistributionSpec::TriangularCf { s: 1.0 },
        DistributionSpec::NormalMixture {
            weights: vec![0.5, 0.5],
            means: vec![-1.5, 1.5],
            sds: vec![0.6, 0.6],
        },
    ]
}

fn heavy_tailed(spec: &DistributionSpec) -> bool {
    matches!(
        spec,
        DistributionSpec::CauchyMixture { .. } | DistributionSpec::TriangularCf { .. } | DistributionSpec::Linnik { .. }
    )
}

#[test]
fn criterion_1_ecf_variance_identity() {
    let start = Instant::now();
    let spec = DistributionSpec::standard_normal();
    let (n, reps) = (500, 10_000);
    let us = [0.5, 1.0, 2.0];
    let mut errs = vec![Vec::with_capacity(reps); us.len()];
    for r in 0..reps as u64 {
        let s = sample_with(&spec, n, &mut replication_rng(101, r)).unwrap();
        for (i, &u) in us.iter().enumerate() {
            errs[i].push((ecf_eval(&s, u) - cf_true(&spec, u)).norm_sqr());
        }
    }
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, &u) in us.iter().enumerate() {
        let (m, se) = mean_se(&errs[i]);
        let expected = (1.0 - (-u * u).exp()) / n as f64;
        let z = (m - expected) / se;
        pass &= z.abs() <= 4.0;
        detail.push(format!("u={u}: z={z:.2}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    verdict(1, pass, &format!("{}; {secs:.1}s", detail.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_2_oracle_block_risk_identity() {
    let start = Instant::now();
    let (n, reps, blocks) = (1000usize, 10_000u64, 5usize);
    let specs = [
        DistributionSpec::standard_normal(),
        DistributionSpec::cauchy(0.0, 1.0),
        DistributionSpec::Linnik { beta: 0.75 },
    ];
    let schedule = build_schedule(&Portfolio::LogCubic, n).unwrap();
    let bounds = &schedule.boundaries[..=blocks];
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut floored = 0usize;
    for spec in &specs {
        let truth = SpectralTruth::new(spec, &schedule).unwrap();
        let mu: Vec<f64> = truth.oracle_weights(n);
        let mut risks = vec![Vec::with_capacity(reps as usize); blocks];
        for r in 0..reps {
            let s = sample_with(spec, n, &mut replication_rng(202, r)).unwrap();
            let e = block_energies(&s, bounds, EnergyMethod::Auto).unwrap();
            for i in 0..blocks {
                let c = truth.cross_term(&s, i);
                let t = truth.true_energies[i];
                risks[i].push(mu[i] * mu[i] * e[i] - 2.0 * mu[i] * c + t);
            }
        }
        for i in 0..blocks {
            // z is scale-free; normalising keeps squared deviations of tiny risks from underflowing.
            let closed = second::oracle_risk(truth.true_energies[i], schedule.lengths[i], n as f64);
            let scaled: Vec<f64> = risks[i].iter().map(|r| r / closed).collect();
            let (m, se) = mean_se(&scaled);
            // Blocks whose sampling spread is below double resolution are compared to rounding.
            let floor = 64.0 * f64::EPSILON;
            floored += usize::from(se < floor);
            let z = (m - 1.0) / se.max(floor);
            worst = worst.max(z.abs());
            pass &= z.abs() <= 4.0;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    verdict(
        2,
        pass,
        &format!("max |z| = {worst:.2} over 3 laws x 5 blocks ({floored} at rounding floor); {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_exact_vs_quadrature_energy() {
    let start = Instant::now();
    let specs = test_specs();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for pair in 0..50 {
        let spec = &specs[pair % specs.len()];
        // Quadrature cost grows with the sample range; heavy tails stay at n <= 500.
        let n_max: f64 = if heavy_tailed(spec) { 500.0 } else { 2000.0 };
        let n = if pair == 0 { 2000 } else { (20.0 * (n_max / 20.0).powf(rng.random::<f64>())) as usize };
        let s = sample_with(spec, n, &mut replication_rng(303, pair as u64)).unwrap();
        let schedule = build_schedule(&Portfolio::LogCubic, n).unwrap();
        let k = rng.random_range(0..schedule.cutoff);
        let (a, b) = schedule.block(k);
        let exact = block_energy_exact(&s, a, b).unwrap();
        let quad = block_energy_quad(&s, a, b, DEFAULT_QUAD_NODES).unwrap();
        worst = worst.max(rel_diff(exact, quad));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-8 && secs < 60.0;
    verdict(3, pass, &format!("max relative difference {worst:.2e} on 50 pairs; {secs:.1}s"));
    assert!(pass);
}

#[test]
fn criterion_4_plancherel_cross_check() {
    let configs: Vec<(DistributionSpec, EstimatorKind)> = vec![
        (DistributionSpec::standard_normal(), EstimatorKind::Ep),
        (DistributionSpec::standard_normal(), EstimatorKind::Stein),
        (DistributionSpec::standard_normal(), EstimatorKind::Oracle),
        (DistributionSpec::cauchy(0.0, 1.0), EstimatorKind::Ep),
        (DistributionSpec::cauchy(0.0, 1.0), EstimatorKind::Oracle),
        (test_specs()[5].clone(), EstimatorKind::Ep),
        (DistributionSpec::Linnik { beta: 0.75 }, EstimatorKind::Ep),
        (DistributionSpec::PearsonType { rho: 0.4 }, EstimatorKind::Stein),
        (DistributionSpec::TriangularCf { s: 1.0 }, EstimatorKind::Ep),
        (DistributionSpec::Uniform { a: 0.0, b: 1.0 }, EstimatorKind::Ep),
    ];
    let n = 100;
    let schedule = build_schedule(&Portfolio::LogCubic, n).unwrap();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (i, (spec, kind)) in configs.iter().enumerate() {
        let s = sample_with(spec, n, &mut replication_rng(404, i as u64)).unwrap();
        let stats = BlockStats::compute(&s, &schedule, EnergyMethod::Exact).unwrap();
        let truth = SpectralTruth::new(spec, &schedule).unwrap();
        let profile = match kind {
            EstimatorKind::Ep => ep_weights(&stats, &schedule),
            EstimatorKind::Stein => stein_weights(&stats, &schedule),
            EstimatorKind::Oracle => oracle_weights_from(&truth.true_energies, &schedule),
        };
        let freq = plancherel_mise(&profile, &s, &truth, &stats.energies()).unwrap().mise;
        let space = spatial_ise(&profile, &s, spec, 1000.0);
        let d = rel_diff(freq, space);
        worst = worst.max(d);
        lines.push(format!("{} {}: {freq:.6e} vs {space:.6e}", spec.label(), kind.label()));
    }
    for l in &lines {
        println!("  {l}");
    }
    let pass = worst <= 1e-3;
    verdict(4, pass, &format!("max relative difference {worst:.2e} on 10 configurations"));
    assert!(pass);
}

#[test]
fn criterion_5_null_block_lower_bound() {
    let start = Instant::now();
    let n = 1000;
    let mut pass = true;
    let mut detail = Vec::new();
    for (l, t) in [(4.0, 1.0), (16.0, 0.5), (64.0, 0.25)] {
        let portfolio = Portfolio::Custom {
            lengths: vec![l; 400],
            thresholds: vec![t; 400],
        };
        let exp = SeqExperiment::new(Vec::new(), n, &portfolio, 505).unwrap();
        let r = seq_risks(&exp, &SeqEstimator::Ep, 10_000).unwrap();
        let (risk, se) = (r.block_risk[0], r.block_std_error[0]);
        let bound = seq_lower_bound(l, t, n as f64).unwrap();
        let ok = risk >= bound - 4.0 * se;
        pass &= ok;
        detail.push(format!("(L={l}, t={t}): risk {risk:.4e} se {se:.1e} bound {bound:.4e} ratio {:.3}", risk / bound));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    verdict(5, pass, &format!("{}; {secs:.1}s", detail.join("; ")));
    assert!(pass, "null-block risk falls below the lower bound; see the decisions ledger");
}

#[test]
fn criterion_6_moment_bound() {
    let start = Instant::now();
    let reps = 2000;
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for spec in test_specs() {
        for n in [100usize, 400] {
            let schedule = build_schedule(&Portfolio::LogCubic, n).unwrap();
            let picks: Vec<usize> = [0, 1, 2, schedule.cutoff - 1].into_iter().collect();
            let bounds = &schedule.boundaries[..=schedule.cutoff];
            let truth: Vec<f64> =
                picks.iter().map(|&i| true_block_energy(&spec, bounds[i], bounds[i + 1])).collect();
            let mut sq = vec![Vec::with_capacity(reps); picks.len()];
            for r in 0..reps as u64 {
                let s = sample_with(&spec, n, &mut replication_rng(606, r)).unwrap();
                let e = block_energies(&s, bounds, EnergyMethod::Exact).unwrap();
                for (j, &i) in picks.iter().enumerate() {
                    let l = schedule.lengths[i];
                    let hat = e[i] / l - 1.0 / n as f64;
                    sq[j].push((hat - truth[j] / l).powi(2));
                }
            }
            for (j, &i) in picks.iter().enumerate() {
                let (a, b) = (bounds[i], bounds[i + 1]);
                let rhs = moment_bound(&spec, a, b, n as f64).unwrap();
                let (m, se) = mean_se(&sq[j]);
                worst = worst.max((m - rhs) / se);
                pass &= m <= rhs + 3.0 * se;
                cases += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    verdict(6, pass, &format!("{cases} (law, n, block) cases, max (MC - RHS)/se = {worst:.2}; {secs:.1}s"));
    assert!(pass);
}

fn ep_mise(spec: &DistributionSpec, n: usize, seed: u64) -> (f64, f64) {
    let mut cfg = ExperimentConfig::new(spec.clone(), n);
    cfg.replications = 200;
    cfg.estimators = vec![EstimatorKind::Ep];
    cfg.seed = seed;
    let r = run_experiment(&cfg).unwrap();
    let s = r.summary(EstimatorKind::Ep).unwrap();
    (s.mise, s.std_error)
}

#[test]
fn criterion_7_rate_benchmarks() {
    let start = Instant::now();
    // a. Sobolev rate, Linnik(0.75).
    let linnik = DistributionSpec::Linnik { beta: 0.75 };
    let alpha = sobolev_index(&linnik);
    let below = class_functional(&linnik, &FunctionClass::Sobolev { alpha: alpha - 0.02, q: 1.0 }, 0.0).unwrap();
    let above = class_functional(&linnik, &FunctionClass::Sobolev { alpha: alpha + 0.02, q: 1.0 }, 0.0).unwrap();
    let index_ok = below.value.unwrap().is_finite() && !above.value.unwrap().is_finite();
    let (m1, _) = ep_mise(&linnik, 1000, 7001);
    let (m4, _) = ep_mise(&linnik, 4000, 7004);
    let target_a = 4f64.powf(-2.0 * alpha / (2.0 * alpha + 1.0));
    let ratio_a = m4 / m1;
    let pass_a = index_ok && (ratio_a / target_a - 1.0).abs() <= 0.3;

    // b. Analytic rate, N(0,1).
    let normal = DistributionSpec::standard_normal();
    let (g1, _) = ep_mise(&normal, 1000, 7101);
    let (g4, _) = ep_mise(&normal, 4000, 7104);
    let target_b = 0.25 * (4000f64.ln() / 1000f64.ln()).sqrt();
    let ratio_b = g4 / g1;
    let pass_b = (ratio_b / target_b - 1.0).abs() <= 0.3;

    // c. Bounded spectrum, TriangularCF(1).
    let tri = DistributionSpec::TriangularCf { s: 1.0 };
    let (mt, se_t) = ep_mise(&tri, 10_000, 7201);
    let yardstick = minimax_benchmark(&FunctionClass::BoundedSpectrum { s: 1.0 }, 1e4, Target::Density).unwrap();
    let pass_c = mt <= 3.0 * yardstick;

    let secs = start.elapsed().as_secs_f64();
    let pass = pass_a && pass_b && pass_c && secs < 1800.0;
    verdict(
        7,
        pass,
        &format!(
            "a: ratio {ratio_a:.3} vs {target_a:.3} (alpha {alpha}) {}; b: ratio {ratio_b:.3} vs {target_b:.3} {}; \
             c: MISE {mt:.3e} (se {se_t:.1e}) vs 3x{yardstick:.3e} {}; {secs:.0}s",
            if pass_a { "ok" } else { "off" },
            if pass_b { "ok" } else { "off" },
            if pass_c { "ok" } else { "off" },
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_stein_ep_proximity() {
    let start = Instant::now();
    let (n, reps) = (1000usize, 200u64);
    let schedule = build_schedule(&Portfolio::LogCubic, n).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for spec in test_specs() {
        let truth = SpectralTruth::new(&spec, &schedule).unwrap();
        let mut gap = Vec::new();
        let mut ise = Vec::new();
        for r in 0..reps {
            let s = sample_with(&spec, n, &mut replication_rng(808, r)).unwrap();
            let stats = BlockStats::compute(&s, &schedule, EnergyMethod::Auto).unwrap();
            let energies = stats.energies();
            let ep = ep_weights(&stats, &schedule);
            let stein = stein_weights(&stats, &schedule);
            // Plancherel: \int (f̄_S - f̃)^2 = π^{-1} Σ_k (μ̄_k - μ̃_k)^2 E_k.
            let g: f64 = (0..energies.len())
                .map(|k| (stein.weights[k] - ep.weights[k]).powi(2) * energies[k])
                .sum::<f64>()
                / PI;
            gap.push(g);
            ise.push(plancherel_mise(&ep, &s, &truth, &energies).unwrap().mise);
        }
        let (mg, _) = mean_se(&gap);
        let (me, _) = mean_se(&ise);
        let ratio = mg / me;
        pass &= ratio <= 0.1;
        detail.push(format!("{} {ratio:.3}", spec.label()));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 600.0;
    verdict(8, pass, &format!("gap / MISE(EP): {}; {secs:.1}s", detail.join(", ")));
    assert!(pass);
}

fn structural_weights() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    (0..100_000).all(|_| {
        let l: f64 = rng.random_range(0.5..500.0);
        let t: f64 = rng.random_range(0.01..4.0);
        let n: f64 = rng.random_range(4.0..1e6);
        let e: f64 = rng.random_range(0.0..1.0) * l * if rng.random::<bool>() { 1.0 } else { 10.0 / n };
        let ep = ep_weight(e, l, t, n);
        let st = stein_weight(e, l, t, n);
        (0.0..1.0).contains(&ep) && 0.0 <= st && st <= ep
    })
}

fn structural_straddle() -> bool {
    let portfolios = [
        Portfolio::LogCubic,
        Portfolio::Dyadic {
            first_length: 1.0,
            threshold: 0.5,
        },
        Portfolio::Dyadic {
            first_length: 3.0,
            threshold: 0.25,
        },
    ];
    let mut ok = true;
    for p in &portfolios {
        for kind in [Lengths::Continuous, Lengths::Integer] {
            let mut n = 10usize;
            while n <= 10_000_000 {
                let s = build_schedule_with(p, n, kind).unwrap();
                let target = cutoff_target(n);
                let sum: f64 = s.lengths.iter().sum();
                let (next, _) = s.next_block.unwrap();
                ok &= s.cutoff >= 1 && sum < target && target <= sum + next;
                n = n * 3 / 2;
            }
        }
    }
    ok
}

fn structural_pair_functionals() -> bool {
    let mut ok = true;
    for spec in test_specs().into_iter().chain([DistributionSpec::Uniform { a: 0.0, b: 1.0 }]) {
        let d = energy_d(&spec);
        for (a, b) in [(0.0, 1.0), (1.0, 3.0), (2.0, 3.0), (5.0, 12.0)] {
            let (d1, d2) = block_pair_functionals(&spec, a, b).unwrap();
            ok &= d1 >= 0.0 && d2 >= 0.0;
            ok &= d2 <= d * (1.0 + 1e-9) && d1 <= (2.0 * (b - a) * d2).sqrt() * (1.0 + 1e-9);
        }
    }
    ok
}

fn structural_cosine() -> bool {
    let spec = DistributionSpec::Uniform { a: 0.0, b: 1.0 };
    let schedule = build_schedule_with(&Portfolio::LogCubic, 500, Lengths::Integer).unwrap();
    let rule = GaussLegendre::new(64);
    let mut ok = true;
    for seed in 0..5 {
        let raw = sample_with(&spec, 500, &mut replication_rng(909, seed)).unwrap();
        // Fold onto a non-uniform law on [0, 1].
        let s = Sample::new(raw.values().iter().map(|x| x * x).collect()).unwrap();
        for kind in [EstimatorKind::Ep, EstimatorKind::Stein] {
            let est = cosine_estimate(&s, &schedule, kind).unwrap();
            let total = schedule.boundaries[schedule.cutoff];
            let integral = rule.composite(0.0, 1.0, total as usize, |x| est.eval(x));
            ok &= (integral - 1.0).abs() <= 1e-13;
        }
    }
    ok
}

/// Largest relative difference between library and second transcription.
fn structural_transcription() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let mut worst = 0.0f64;
    let mut track = |a: f64, b: f64| {
        assert!(a.is_finite() && b.is_finite(), "{a} vs {b}");
        worst = worst.max(rel_diff(a, b));
    };
    for _ in 0..100 {
        let l: f64 = rng.random_range(1.0..400.0);
        let t: f64 = rng.random_range(0.02..2.0);
        let d: f64 = rng.random_range(0.05..6.0);
        let ds: f64 = rng.random_range(0.05..4.0);
        let n: f64 = rng.random_range(4.0..1e5);
        let consts = UniversalConstants {
            c1: rng.random_range(0.3..3.0),
            c2: rng.random_range(0.3..3.0),
            c0: rng.random_range(0.3..3.0),
        };
        let nu: f64 = rng.random_range(0.02..0.98);
        let theta2: f64 = rng.random_range(0.0..3.0) * l / n;
        let mu = theta2 / (theta2 + l / n);

        let l1 = lambda1(l, t, d, ds, n, &consts, Lambda1Form::Statement).unwrap();
        track(l1, second::lambda1(l, t, d, ds, n, consts.c1, consts.c2));
        let l1d = lambda1(l, t, d, ds, n, &consts, Lambda1Form::Derivation).unwrap();
        track(l1d, second::lambda1_derivation(l, t, d, ds, n, consts.c1, consts.c2));
        let l2 = lambda2(l, t, d, n, &consts).unwrap();
        track(l2, second::lambda2(l, t, d, n, consts.c1));
        let l3 = lambda3(l, t, d, n, &consts).unwrap();
        track(l3, second::lambda3(l, t, d, n));
        // Scale the exponents down so the direct sum does not underflow.
        let lam = (l1 / (t * t * l), l2 / (t * t * l), l3 / (t * t * l));
        let g = g_from_lambdas(l, t, lam, &consts);
        track(g, second::g(l, t, lam, consts.c1, consts.c2));

        let dp = density_d_prime(l, t, d, nu, mu, theta2, theta2 < 2.0 * l * t / n);
        track(dp, second::d_prime(l, t, d, nu, mu, theta2, n));
        let ddp = density_d_dblprime(l, t, d, nu, g, theta2 < l.sqrt() * t / n);
        track(ddp, second::d_dblprime(l, t, d, nu, g, theta2, n));

        let ts: f64 = rng.random_range(0.02..1.0);
        let q: f64 = rng.random_range(0.25..1.0f64.min(0.25 / ts));
        let s_star = stirling_factors(l).unwrap().s_star;
        track(s_star, second::stirling(l));
        track(
            seq_d_star(l, ts, nu, q, mu, theta2, n, consts.c0, true),
            second::d_star(l, ts, nu, q, mu, theta2, n, consts.c0),
        );
        // Half of the draws exercise the indicator-on branch.
        let theta_small = theta2 * 0.1 * (1.0 - q.sqrt()).powi(2) * ts;
        for th in [theta2, theta_small] {
            track(
                seq_d_dblstar(l, ts, nu, q, th, n, s_star, true),
                second::d_dblstar(l, ts, nu, q, th, n, s_star),
            );
        }
        track(seq_lower_bound(l, ts, n).unwrap(), second::lower_bound(l, ts, n));

        let alpha: f64 = rng.random_range(0.05..5.0);
        let qq: f64 = rng.random_range(0.1..10.0);
        track(pinsker_constant(alpha, qq).unwrap(), second::pinsker(alpha, qq));
        let class = FunctionClass::Sobolev { alpha, q: qq };
        track(
            minimax_benchmark(&class, n, Target::Density).unwrap(),
            second::pinsker(alpha, qq) * n.powf(-2.0 * alpha / (2.0 * alpha + 1.0)),
        );
        let (r, gamma) = (rng.random_range(0.2..2.0), rng.random_range(0.1..3.0));
        track(
            minimax_benchmark(&FunctionClass::Analytic { r, gamma, q: 1.0 }, n, Target::Cf).unwrap(),
            2.0 * PI * (n.ln() / (2.0 * gamma)).powf(1.0 / r) / (PI * n),
        );

        let d2: f64 = rng.random_range(0.0..d);
        let d1: f64 = rng.random_range(0.0..(2.0 * l * d2).sqrt().max(1e-12));
        let theta: f64 = theta2 / l;
        track(moment_bound_from(d1, d2, theta, l, n), second::moment(d1, d2, theta, l, n));
        track(oracle_block_risk(theta2, l, n), second::oracle_risk(theta2, l, n));
    }
    worst
}

#[test]
fn criterion_9_structural_suite() {
    let weights = structural_weights();
    let straddle = structural_straddle();
    let pairs = structural_pair_functionals();
    let stirling = stirling_factors(1.0).unwrap().ratio;
    let stirling_ok = (stirling - 0.5f64.exp() / 2f64.sqrt()).abs() <= 1e-10;
    let pinsker = pinsker_constant(1.0, 1.0).unwrap();
    let pinsker_ok = (pinsker - 3.0 * (6.0 * PI).powf(-2.0 / 3.0)).abs() <= 1e-12;
    let cosine = structural_cosine();
    let transcription = structural_transcription();
    let transcription_ok = transcription <= 1e-12;
    let pass = weights && straddle && pairs && stirling_ok && pinsker_ok && cosine && transcription_ok;
    verdict(
        9,
        pass,
        &format!(
            "weights {weights}, straddle {straddle}, d1/d2 caps {pairs}, Stirling {stirling_ok}, \
             Pinsker {pinsker_ok}, cosine {cosine}, transcription max rel {transcription:.1e}"
        ),
    );
    assert!(pass);
}
