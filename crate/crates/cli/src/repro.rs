//! Reproductions of the worked examples, one identifier each.

use compactum_core::covering::dyadic_entropy_brackets;
use compactum_core::diagonal::{asymptotic_envelope, example_k_profile};
use compactum_core::poly::{corollary_check, exact_ratio, family_rank, monomials, ExactPoly, DEFAULT_RANK_TOL};
use compactum_core::taylor::{
    builtin_sampler, domain_sample, image_rank, taylor_coefficient, DEFAULT_QUADRATURE_NODES,
};
use compactum_core::{grid_segment, sample_ball, BallSpec, NormKind, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{self, Failure, Outcome, TransferSetup};
use crate::config::{GridArg, ReproId, ReproParams};
use crate::output::Table;
use crate::row;

pub fn run(id: ReproId, p: ReproParams, seed: u64) -> Outcome {
    match id {
        ReproId::DiagK => diag_k(&p),
        ReproId::SigmaPartition => sigma_partition(&p),
        ReproId::PowerCurve | ReproId::EntireExp | ReproId::CoordinatePowers => sampler_example(id, &p, seed),
        ReproId::CorankSharp => {
            let n = p.nvars.unwrap_or(3);
            let (r, m) = (p.r.unwrap_or(2), p.m.unwrap_or(2));
            if r > n {
                return Err(Failure::Schema(format!("r = {r} exceeds Nvars = {n}")));
            }
            let family: Vec<ExactPoly> = (0..r).map(|i| ExactPoly::power(n, i, m)).collect();
            commands::corank_tables(id.as_str(), &family)
        }
        ReproId::CorollaryRank => corollary_rank(&p, seed),
        ReproId::IntervalOracle => interval_oracle(&p),
        ReproId::DiscBoxdim => {
            let spec = BallSpec::centered(1, p.radius.unwrap_or(0.5), NormKind::Infinity)?;
            let disc = sample_ball(&spec, p.points.unwrap_or(1 << 18), seed)?;
            let n_max = p.n_max.unwrap_or(8) as u32;
            commands::boxdim_tables(id.as_str(), &disc, 2, n_max, GridArg::Anchored)
        }
        ReproId::TransferPowerCurve => {
            let f = builtin_sampler("power-curve", p.size.unwrap_or(8), p.radius.unwrap_or(0.9))?;
            let setup = TransferSetup {
                epsilon: p.epsilon.unwrap_or(0.05),
                n: 1,
                cloud_points: p.points.unwrap_or(20_000),
                samples: p.samples.unwrap_or(200),
                m_max: p.m.unwrap_or(4),
            };
            commands::transfer_tables(id.as_str(), &f, &setup, seed)
        }
    }
}

fn diag_k(p: &ReproParams) -> Outcome {
    let eps = p.epsilon.unwrap_or(0.5);
    let trunc = p.truncation.unwrap_or(10);
    let n_max = p.n_max.unwrap_or(24);
    let profile = example_k_profile(eps, trunc, n_max)?;
    let env = asymptotic_envelope(eps, trunc, 1..=n_max)?;
    let mut t = Table::new("diag-k", &["n", "lower", "upper", "method", "envelope_lower", "envelope_upper"]);
    for e in profile.entries() {
        t.push(row![e.n, e.lower, e.upper, e.method.to_string(), env.lower_at(e.n), env.upper_at(e.n)]);
    }
    let lower = profile.entries().iter().map(|e| (e.n as f64, e.lower)).collect();
    let upper = profile.entries().iter().map(|e| (e.n as f64, e.upper)).collect();
    let t = t.with_series("lower", "n", "lower", lower).with_series("upper", "n", "upper", upper);
    let mut c = Table::new("diag-k-envelope", &["epsilon", "truncation", "c1", "c2", "s", "big_s", "brackets"]);
    c.push(row![eps, trunc, env.c1, env.c2, env.s, env.big_s, env.brackets(&profile)]);
    let mut tables = vec![t, c];
    tables.extend(commands::bridge_table("diag-k-bridge", &profile)?);
    Ok(tables)
}

fn sigma_partition(p: &ReproParams) -> Outcome {
    let r = p.r.unwrap_or(1) as u32;
    let mut tables = commands::sigma_tables("sigma-partition", r, p.n_max.unwrap_or(5))?;
    let sums: Vec<f64> = tables[0].rows.iter().map(|row| row[4].parse().unwrap_or(f64::NAN)).collect();
    let increasing = sums.windows(2).all(|w| w[1] > w[0]);
    let first = sums.first().copied().unwrap_or(f64::NAN);
    let last = match sums.len() {
        0 => f64::NAN,
        1 => first,
        k => sums[k - 1] - sums[k - 2],
    };
    let mut t = Table::new(
        "sigma-partition-check",
        &["p", "increasing", "first_increment", "last_increment", "divergence_signature"],
    );
    t.push(row![1.0, increasing, first, last, increasing && last > first]);
    tables.push(t);
    Ok(tables)
}

/// Rank growth of truncated images and the entropy profile of the
/// degree-`m` Taylor part at the origin, extended by a geometric majorant.
fn sampler_example(id: ReproId, p: &ReproParams, seed: u64) -> Outcome {
    let name = id.as_str();
    let size = p.size.unwrap_or(if id == ReproId::CoordinatePowers { 6 } else { 8 });
    let radius = p.radius.unwrap_or(0.9);
    let points = p.points.unwrap_or(4000);
    let mut ranks = Table::new(format!("{name}-rank"), &["truncation", "image_rank"]);
    for d in 1..=size {
        let f = builtin_sampler(name, d, radius)?;
        ranks.push(row![d, image_rank(&f, points.min(2000), seed, 1e-10)?]);
    }
    let f = builtin_sampler(name, size, radius)?;
    let m = p.m.unwrap_or(2);
    let xs = domain_sample(&f, points, seed.wrapping_add(1))?;
    let images =
        xs.iter().map(|x| taylor_coefficient(&f, m, x, DEFAULT_QUADRATURE_NODES)).collect::<Result<Vec<_>, _>>()?;
    let cloud = PointCloud::new(images, f.codomain_norm, format!("{name}-P{m}"))?;
    let measured = compactum_core::covering::dyadic_entropy_profile(&cloud, p.n_max.unwrap_or(10))?;
    let mut tables = vec![ranks];
    tables.extend(commands::summability_tables(name, &measured, 1.5, Some(40))?);
    Ok(tables)
}

fn corollary_rank(p: &ReproParams, seed: u64) -> Outcome {
    let families = p.samples.unwrap_or(50);
    let n_cap = p.nvars.unwrap_or(10).max(2);
    let m = p.m.unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(
        "corollary-rank",
        &["family", "nvars", "degree", "linear_rank", "generic_rank", "bound", "required", "pass", "chain_holds"],
    );
    let mut drawn = 0;
    while drawn < families {
        let n = rng.random_range(2..=n_cap);
        let basis = monomials(n, m);
        let mut family = Vec::with_capacity(n);
        for _ in 0..n {
            let mut terms = Vec::new();
            for g in &basis {
                if rng.random::<f64>() < 0.4 {
                    terms.push((g.clone(), exact_ratio(rng.random_range(-3..=3), 1)));
                }
            }
            family.push(ExactPoly::from_terms(n, m, terms)?);
        }
        let trial_seed: u64 = rng.random();
        if family_rank(&family)? < n {
            continue;
        }
        let rep = corollary_check(&family, 8, trial_seed, DEFAULT_RANK_TOL)?;
        let required = rep.bound.ceil().max(0.0);
        t.push(row![drawn, n, m, n, rep.rank, rep.bound, required, rep.pass, rep.chain_holds]);
        drawn += 1;
    }
    Ok(vec![t])
}

fn interval_oracle(p: &ReproParams) -> Outcome {
    let grid = grid_segment(0.0, 1.0, p.points.unwrap_or(1 << 12))?;
    let brackets = dyadic_entropy_brackets(&grid, p.n_max.unwrap_or(8))?;
    let mut t = Table::new("interval-oracle", &["n", "lower", "upper", "oracle", "holds"]);
    for (k, b) in brackets.iter().enumerate() {
        let oracle = 0.5f64.powi(k as i32 + 1);
        t.push(row![k + 1, b.lower, b.upper, oracle, b.lower <= oracle && oracle <= 2.0 * b.upper]);
    }
    Ok(vec![t])
}
