//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use compactum_core::boxdim::{dim_estimate, entropy_dim_bridge, BridgeConfig, DimensionClass};
use compactum_core::covering::{
    dyadic_entropy_brackets, dyadic_entropy_profile, exact_covering_number, greedy_cover, packing_number,
    ratio_diagnostic, verify_cover, EntropyProfile, DEFAULT_EXACT_LIMIT,
};
use compactum_core::diagonal::{asymptotic_envelope, example_k_profile, sigma_partition_profile, DiagonalModel};
use compactum_core::poly::{
    assemble_oxis, binomial, corank_report, corollary_check, exact_ratio, monomials, ExactPoly, SizeCaps,
    DEFAULT_RANK_TOL,
};
use compactum_core::taylor::{
    domain_sample, entire_exp, geometric_majorant, image_cloud, power_curve, select_centers, summability_diagnostic,
    taylor_coefficient, transfer_entropy_bound, witness_from_selection, HoloSampler, SummabilityVerdict,
    DEFAULT_QUADRATURE_NODES,
};
use compactum_core::{grid_segment, sample_ball, BallSpec, ComplexVector, NormKind, PointCloud};
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, || {
        format!("{what} took {:.2}s, limit {limit_secs}s", elapsed.as_secs_f64())
    })
}

fn real_cloud(xs: &[f64]) -> PointCloud {
    let pts = xs.iter().map(|&x| ComplexVector::from_real(&[x]).unwrap()).collect();
    PointCloud::new(pts, NormKind::Infinity, "line").unwrap()
}

/// Minimum cover of points on a line by closed `eps`-intervals centered at
/// the points: from the leftmost uncovered point, the farthest center that
/// still reaches it.
fn sweep_cover(xs: &[f64], eps: f64) -> usize {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let (mut i, mut count) = (0, 0);
    while i < s.len() {
        let left = s[i];
        let mut c = i;
        while c + 1 < s.len() && s[c + 1] - left <= eps {
            c += 1;
        }
        let reach = s[c];
        while i < s.len() && s[i] - reach <= eps {
            i += 1;
        }
        count += 1;
    }
    count
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let grid = grid_segment(0.0, 1.0, 1 << 12).map_err(|e| e.to_string())?;
    let brackets = dyadic_entropy_brackets(&grid, 8).map_err(|e| e.to_string())?;
    for (k, b) in brackets.iter().enumerate() {
        let n = k + 1;
        let truth = 0.5f64.powi(n as i32);
        ensure(b.lower <= truth && truth <= 2.0 * b.upper, || {
            format!("n={n}: bracket [{}, {}] vs 2^-n = {truth}", b.lower, b.upper)
        })?;
    }
    let xs: Vec<f64> = (0..1 << 12).map(|k| k as f64 / 4095.0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for _ in 0..200 {
        let size = rng.random_range(1..=64);
        let picked: Vec<f64> = sample(&mut rng, xs.len(), size).iter().map(|i| xs[i]).collect();
        let eps = [0.005, 0.02, 0.05, 0.1, 0.2, 0.4][rng.random_range(0..6)];
        let exact = exact_covering_number(&real_cloud(&picked), eps, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
        let oracle = sweep_cover(&picked, eps);
        ensure(exact == oracle, || format!("size {size}, eps {eps}: exact {exact} vs oracle {oracle}"))?;
        checked += 1;
    }
    within(start.elapsed(), 10.0, "criterion 1")?;
    Ok(format!("8 brackets hold; {checked} sub-clouds match the sweep oracle; {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let mut violations = 0;
    let mut checks = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let size = rng.random_range(2..=64);
        let dim = rng.random_range(1..=3);
        let norm = [NormKind::P(1.0), NormKind::P(2.0), NormKind::Infinity][rng.random_range(0..3)];
        let spec = BallSpec::centered(dim, 1.0, norm).map_err(|e| e.to_string())?;
        let cloud = sample_ball(&spec, size, seed).map_err(|e| e.to_string())?;
        let diam = cloud.diameter();
        for frac in [0.05, 0.12, 0.25, 0.4, 0.7] {
            let eps = frac * diam;
            let n = exact_covering_number(&cloud, eps, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
            let lo = packing_number(&cloud, 2.0 * eps).map_err(|e| e.to_string())?;
            let hi = packing_number(&cloud, eps).map_err(|e| e.to_string())?;
            checks += 1;
            if !(lo <= n && n <= hi) {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations in {checks} checks"))?;
    Ok(format!("{checks} checks, zero violations"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let spec = BallSpec::centered(1, 0.5, NormKind::Infinity).map_err(|e| e.to_string())?;
    let disc = sample_ball(&spec, 1 << 18, 3).map_err(|e| e.to_string())?;
    let est = dim_estimate(&disc, 2, 8).map_err(|e| e.to_string())?;
    let disc_time = start.elapsed();
    for (what, v) in [("regression", est.regression_slope), ("lower", est.lower_est), ("upper", est.upper_est)] {
        ensure((1.8..=2.2).contains(&v), || format!("disc {what} slope {v}"))?;
    }
    within(disc_time, 5.0, "disc estimate")?;

    let start = Instant::now();
    let seg = grid_segment(0.0, 1.0, 1 << 12).map_err(|e| e.to_string())?;
    let seg_est = dim_estimate(&seg, 2, 8).map_err(|e| e.to_string())?;
    let seg_time = start.elapsed();
    for (what, v) in
        [("regression", seg_est.regression_slope), ("lower", seg_est.lower_est), ("upper", seg_est.upper_est)]
    {
        ensure((0.9..=1.1).contains(&v), || format!("segment {what} slope {v}"))?;
    }
    within(seg_time, 5.0, "segment estimate")?;
    Ok(format!(
        "disc slope {:.3} (tail {:.3}..{:.3}, {:.2}s); segment slope {:.3} ({:.2}s)",
        est.regression_slope,
        est.lower_est,
        est.upper_est,
        disc_time.as_secs_f64(),
        seg_est.regression_slope,
        seg_time.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let (eps, trunc) = (0.5, 8);
    let model = DiagonalModel::geometric(eps, trunc).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let points = (0..20_000)
        .map(|_| {
            let entries = model
                .weights()
                .iter()
                .map(|&w| {
                    Complex64::from_polar(w * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>())
                })
                .collect();
            ComplexVector::new(entries).unwrap()
        })
        .collect();
    let cloud = PointCloud::new(points, NormKind::Infinity, "K^N").map_err(|e| e.to_string())?;
    let empirical = dyadic_entropy_brackets(&cloud, 6).map_err(|e| e.to_string())?;
    let analytic = example_k_profile(eps, trunc, 6).map_err(|e| e.to_string())?;
    for (b, a) in empirical.iter().zip(analytic.entries()) {
        ensure(b.intersects(&a.bracket()), || {
            format!(
                "n={}: empirical [{:.4}, {:.4}] misses analytic [{:.4}, {:.4}]",
                a.n, b.lower, b.upper, a.lower, a.upper
            )
        })?;
    }
    let env = asymptotic_envelope(eps, trunc, 1..=6).map_err(|e| e.to_string())?;
    ensure(env.brackets(&analytic), || "envelope fails on n = 1..6".into())?;
    let long = example_k_profile(eps, 24, 40).map_err(|e| e.to_string())?;
    let env_long = asymptotic_envelope(eps, 24, 1..=40).map_err(|e| e.to_string())?;
    ensure(env_long.brackets(&long), || "envelope fails on n = 1..40".into())?;
    Ok(format!("6 brackets intersect; C1 = {:.4}, C2 = {:.4} (s = S = {})", env.c1, env.c2, env.s))
}

fn criterion_5() -> Outcome {
    let oracle: Vec<f64> = (1..=8).map(|n| 0.5f64.powi(n)).collect();
    for w in oracle.windows(2) {
        ensure(w[1] / w[0] == 0.5, || "oracle ratio differs from 1/2".into())?;
    }
    let exact =
        ratio_diagnostic(&EntropyProfile::exact(&oracle).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(exact.flag_count() == 0, || format!("{} flags on the oracle profile", exact.flag_count()))?;
    let grid = grid_segment(0.0, 1.0, 1 << 12).map_err(|e| e.to_string())?;
    let measured =
        ratio_diagnostic(&dyadic_entropy_profile(&grid, 8).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(measured.flag_count() == 0, || format!("{} flags on the measured interval", measured.flag_count()))?;
    let spec = BallSpec::centered(1, 1.0, NormKind::Infinity).map_err(|e| e.to_string())?;
    let disc = sample_ball(&spec, 4000, 5).map_err(|e| e.to_string())?;
    let disc_report =
        ratio_diagnostic(&dyadic_entropy_profile(&disc, 8).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(disc_report.flag_count() == 0, || format!("{} flags on the disc", disc_report.flag_count()))?;
    Ok("ratios exactly 1/2 for n = 1..7; zero flags on interval oracle, measured interval and disc".into())
}

fn criterion_6() -> Outcome {
    let cfg = BridgeConfig::default();
    let mut roots = Vec::new();
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
        let xs: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let profile = dyadic_entropy_profile(&real_cloud(&xs), 10).map_err(|e| e.to_string())?;
        let r = entropy_dim_bridge(&profile, &cfg).map_err(|e| e.to_string())?;
        ensure(r.class == DimensionClass::FiniteDimConsistent, || {
            format!("seed {seed}: interval classified {}", r.class)
        })?;
        roots.push(r.max_upper_root);
    }
    let analytic: Vec<f64> = (1..=24).map(|n| 0.5f64.powi(n)).collect();
    let geo = entropy_dim_bridge(&EntropyProfile::exact(&analytic).map_err(|e| e.to_string())?, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(geo.class == DimensionClass::FiniteDimConsistent, || format!("geometric profile classified {}", geo.class))?;
    let diag = example_k_profile(0.5, 24, 24).map_err(|e| e.to_string())?;
    let r = entropy_dim_bridge(&diag, &cfg).map_err(|e| e.to_string())?;
    ensure(r.class == DimensionClass::InfiniteDimConsistent, || {
        format!(
            "diagonal profile classified {} (max upper root {:.3}, fitted limit {:?})",
            r.class, r.max_upper_root, r.extrapolated_lower_root
        )
    })?;
    Ok(format!(
        "geometric finite on 5 seeds (max root {:.3}); diagonal infinite (fitted lower-root limit {:.3})",
        roots.iter().copied().fold(0.0, f64::max),
        r.extrapolated_lower_root.unwrap_or(f64::NAN)
    ))
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn criterion_7() -> Outcome {
    let samplers: [(HoloSampler, bool); 2] = [
        (power_curve(8, 1.0).map_err(|e| e.to_string())?, false),
        (entire_exp(8, 1.0).map_err(|e| e.to_string())?, true),
    ];
    let theta = 0.9;
    let mut worst = 0.0f64;
    for (f, scaled) in &samplers {
        let xs = domain_sample(f, 100, 7).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for x in &xs {
            let x = x.scale(Complex64::new(theta, 0.0));
            let z = x[0];
            let lambda = Complex64::from_polar(rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>());
            let lx = x.scale(lambda);
            let value = f.evaluate(&x).map_err(|e| e.to_string())?;
            let mut partial = vec![Complex64::new(0.0, 0.0); 8];
            let mut prev_tail = f64::INFINITY;
            for m in 0..=8u32 {
                let p = taylor_coefficient(f, m, &x, DEFAULT_QUADRATURE_NODES).map_err(|e| e.to_string())?;
                for k in 1..=8u32 {
                    let want = if k == m {
                        z.powu(m) / if *scaled { factorial(m) } else { 1.0 }
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let err = (p[k as usize - 1] - want).norm();
                    worst = worst.max(err);
                    ensure(err <= 1e-12, || format!("{}: m={m} coordinate {k} error {err:e}", f.name))?;
                }
                let pl = taylor_coefficient(f, m, &lx, DEFAULT_QUADRATURE_NODES).map_err(|e| e.to_string())?;
                let hom = pl
                    .entries()
                    .iter()
                    .zip(p.entries())
                    .map(|(a, b)| (a - lambda.powu(m) * b).norm())
                    .fold(0.0, f64::max);
                ensure(hom <= 1e-10, || format!("{}: homogeneity defect {hom:e} at m={m}", f.name))?;
                for (s, v) in partial.iter_mut().zip(p.entries()) {
                    *s += v;
                }
                let tail = value.entries().iter().zip(&partial).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                if m >= 1 {
                    ensure(tail <= (theta + 0.05) * prev_tail + 1e-13, || {
                        format!("{}: tail {tail:e} after {prev_tail:e} at M={m}", f.name)
                    })?;
                }
                prev_tail = tail;
            }
        }
    }
    Ok(format!("200 points, m = 0..8: worst coefficient error {worst:.1e}; homogeneity and tail decay hold"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let f = power_curve(8, 0.9).map_err(|e| e.to_string())?;
    let cloud = image_cloud(&f, 20_000, 8).map_err(|e| e.to_string())?;
    let radius = 0.05;
    let net = greedy_cover(&cloud, radius).map_err(|e| e.to_string())?;
    ensure(verify_cover(&net, &cloud), || "net does not cover the image cloud".into())?;
    let plan = transfer_entropy_bound(1, radius, f.deriv_bound).map_err(|e| e.to_string())?;
    let xs = domain_sample(&f, 200, 88).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut passes = 0;
    for x in &xs {
        let selection = select_centers(&f, &plan, &net, x).map_err(|e| e.to_string())?;
        let mut all = true;
        for m in 1..=4 {
            let w = witness_from_selection(&f, &plan, &net, &selection, m, x).map_err(|e| e.to_string())?;
            worst = worst.max(w.error);
            all &= w.pass && w.error <= 0.10;
        }
        passes += usize::from(all);
    }
    ensure(passes == xs.len(), || format!("{passes}/{} witnesses pass (worst error {worst:.4})", xs.len()))?;
    within(start.elapsed(), 60.0, "criterion 8")?;
    Ok(format!(
        "200/200 witnesses within 0.10 (worst {worst:.4}); net of {} centers, C_n = {}; {:.1}s",
        net.len(),
        plan.c_n,
        start.elapsed().as_secs_f64()
    ))
}

fn powers(r: usize, n: usize, m: u32) -> Vec<ExactPoly> {
    (0..r).map(|i| ExactPoly::power(n, i, m)).collect()
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let caps = SizeCaps::default();
    let mut sharp = 0;
    for (r, m) in [(1usize, 2u32), (1, 3), (2, 2), (2, 3)] {
        for n in [3usize, 4] {
            let sys = assemble_oxis(&powers(r, n, m), &caps).map_err(|e| e.to_string())?;
            let rep = corank_report(&sys);
            let count = binomial(m as u64 + r as u64 - 1, r as u64 - 1);
            ensure(rep.corank as u64 == count, || format!("r={r} m={m} N={n}: corank {} vs {count}", rep.corank))?;
            sharp += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_gap = u64::MAX;
    for _ in 0..20 {
        let r = rng.random_range(1..=2usize);
        let m = rng.random_range(2..=3u32);
        let n = rng.random_range(3..=4usize);
        let basis = monomials(n, m);
        let family: Vec<ExactPoly> = (0..r)
            .map(|i| {
                let extra: Vec<_> = (0..3)
                    .map(|_| {
                        let g = basis[rng.random_range(0..basis.len())].clone();
                        (g, exact_ratio(rng.random_range(-5..=5), rng.random_range(1..=4)))
                    })
                    .collect();
                ExactPoly::from_terms(n, m, extra).unwrap().add(&ExactPoly::power(n, i, m)).unwrap()
            })
            .collect();
        let sys = assemble_oxis(&family, &caps).map_err(|e| e.to_string())?;
        for p in &family {
            ensure(sys.is_solution(p).map_err(|e| e.to_string())?, || "family member fails its own system".into())?;
        }
        let rep = corank_report(&sys);
        ensure(rep.within_bound, || format!("corank {} exceeds {}", rep.corank, rep.monomial_bound))?;
        worst_gap = worst_gap.min(rep.monomial_bound - rep.corank as u64);
    }
    within(start.elapsed(), 120.0, "criterion 9")?;
    Ok(format!(
        "{sharp} sharp families exact; 20 perturbed families within bound (min slack {worst_gap}); {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    let mut rejected = 0;
    while checked < 50 {
        let n = rng.random_range(2..=10usize);
        let basis = monomials(n, 2);
        let family: Vec<ExactPoly> = (0..n)
            .map(|_| {
                let mut terms = Vec::new();
                for g in &basis {
                    if rng.random::<f64>() < 0.4 {
                        terms.push((g.clone(), exact_ratio(rng.random_range(-3..=3), 1)));
                    }
                }
                ExactPoly::from_terms(n, 2, terms).unwrap()
            })
            .collect();
        let seed: u64 = rng.random();
        match corollary_check(&family, 8, seed, DEFAULT_RANK_TOL) {
            Ok(rep) => {
                let required = ((n as f64).sqrt() - 2.0).ceil();
                ensure(rep.rank as f64 >= required && rep.pass, || {
                    format!("N={n}: rank {} below {required}", rep.rank)
                })?;
                checked += 1;
            }
            Err(compactum_core::Error::DependentFamily { .. }) => rejected += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!("50 independent families pass ({rejected} dependent draws rejected with certificates)"))
}

fn criterion_11() -> Outcome {
    let rows = sigma_partition_profile(1, 5).map_err(|e| e.to_string())?;
    let sums: Vec<f64> = rows.iter().map(|r| r.partial_sums[0].1).collect();
    ensure(sums.windows(2).all(|w| w[1] > w[0]), || format!("partial sums not increasing: {sums:?}"))?;
    let first = sums[0];
    let last = sums[4] - sums[3];
    ensure(last > first, || format!("last increment {last} not above first {first}"))?;

    let f = power_curve(8, 0.9).map_err(|e| e.to_string())?;
    let xs = domain_sample(&f, 4000, 11).map_err(|e| e.to_string())?;
    let images = xs
        .iter()
        .map(|x| taylor_coefficient(&f, 2, x, DEFAULT_QUADRATURE_NODES))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let cloud = PointCloud::new(images, NormKind::Infinity, "P2-image").map_err(|e| e.to_string())?;
    let measured = dyadic_entropy_profile(&cloud, 10).map_err(|e| e.to_string())?;
    let majorant = geometric_majorant(&measured, 40).map_err(|e| e.to_string())?;
    let report = summability_diagnostic(&majorant.profile, 1.5).map_err(|e| e.to_string())?;
    let gap = report.partial_sums[39] - report.partial_sums[29];
    ensure(gap < 1e-3, || format!("partial sums move by {gap:e} after n = 30"))?;
    ensure(report.verdict == SummabilityVerdict::SummableConsistent, || format!("verdict {}", report.verdict))?;
    Ok(format!(
        "block sums strictly increasing, increments {first:.3} -> {last:.3}; majorant ratio {:.3}, S40 - S30 = {gap:.1e}",
        majorant.ratio
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("interval oracle", criterion_1),
        ("duality sandwich", criterion_2),
        ("disc box dimension", criterion_3),
        ("diagonal sandwich", criterion_4),
        ("entropy ratio floor", criterion_5),
        ("entropy-dimension bridge", criterion_6),
        ("taylor quadrature", criterion_7),
        ("net transfer", criterion_8),
        ("corank bound", criterion_9),
        ("corollary rank bound", criterion_10),
        ("block divergence", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
