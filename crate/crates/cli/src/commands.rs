use std::fmt;
use std::path::Path;

use compactum_core::boxdim::{dim_estimate_with, entropy_dim_bridge, BridgeConfig, GridMode};
use compactum_core::covering::{
    dyadic_entropy_profile, exact_covering_number, greedy_cover, packing_number, ratio_diagnostic, verify_cover,
    BoundMethod, EntropyProfile, ProfileEntry, DEFAULT_EXACT_LIMIT,
};
use compactum_core::diagonal::{
    carl_stephani_bounds, example_k_profile, sigma_entropy_profile, sigma_partition_profile, DiagonalModel,
    SIGMA_EXPONENTS,
};
use compactum_core::poly::{
    assemble_oxis, corank_report, corollary_check, family_rank, generic_rank, ExactPoly, SizeCaps, DEFAULT_RANK_TOL,
};
use compactum_core::taylor::{
    builtin_sampler, domain_sample, geometric_majorant, image_cloud, lipschitz_probe, select_centers,
    summability_diagnostic, taylor_quadrature, transfer_entropy_bound, witness_from_selection, HoloSampler,
    DEFAULT_QUADRATURE_NODES,
};
use compactum_core::{grid_segment, sample_ball, BallSpec, ComplexVector, NormKind, PointCloud};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::*;
use crate::output::Table;
use crate::row;

#[derive(Debug)]
pub enum Failure {
    /// Malformed input; exit status 2.
    Schema(String),
    /// A module error, reported verbatim; exit status 1.
    Compute(compactum_core::Error),
    Io(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Schema(msg) => write!(f, "schema error: {msg}"),
            Self::Compute(e) => write!(f, "{e}"),
            Self::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<compactum_core::Error> for Failure {
    fn from(e: compactum_core::Error) -> Self {
        Self::Compute(e)
    }
}

pub type Outcome = Result<Vec<Table>, Failure>;

pub fn parse_norm(text: &str) -> Result<NormKind, Failure> {
    match text.trim() {
        "inf" | "infinity" | "∞" => Ok(NormKind::Infinity),
        other => {
            let p: f64 =
                other.parse().map_err(|_| Failure::Schema(format!("norm `{other}` is neither a number nor `inf`")))?;
            NormKind::p(p).map_err(|e| Failure::Schema(e.to_string()))
        }
    }
}

fn read_points(path: &Path, norm: NormKind) -> Result<PointCloud, Failure> {
    let schema = |msg: String| Failure::Schema(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| schema(e.to_string()))?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| schema(e.to_string()))?;
        if record.len() % 2 != 0 {
            return Err(schema(format!("row {} has an odd number of columns", line + 1)));
        }
        let values = record
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| schema(format!("row {}: `{v}` is not a number", line + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        let entries = values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        points.push(ComplexVector::new(entries)?);
    }
    Ok(PointCloud::new(points, norm, path.display().to_string())?)
}

pub fn build_cloud(p: &CloudParams, seed: u64) -> Result<PointCloud, Failure> {
    let norm = p.norm.as_deref().map(parse_norm).transpose()?.unwrap_or(NormKind::Infinity);
    match p.kind.unwrap_or(CloudKind::Interval) {
        CloudKind::Interval => Ok(grid_segment(0.0, 1.0, p.points.unwrap_or(4096))?.with_norm(norm)),
        CloudKind::Disc => {
            let spec = BallSpec::centered(1, p.radius.unwrap_or(0.5), norm)?;
            Ok(sample_ball(&spec, p.points.unwrap_or(10_000), seed)?)
        }
        CloudKind::Ball => {
            let spec = BallSpec::centered(p.dim.unwrap_or(2), p.radius.unwrap_or(1.0), norm)?;
            Ok(sample_ball(&spec, p.points.unwrap_or(2000), seed)?)
        }
        CloudKind::File => {
            let path = p.file.as_ref().ok_or_else(|| Failure::Schema("a `file` cloud needs `file`".into()))?;
            read_points(path, norm)
        }
    }
}

pub fn build_sampler(p: &SamplerParams, default_radius: f64) -> Result<HoloSampler, Failure> {
    let name = p.sampler.unwrap_or(SamplerName::PowerCurve);
    let size = p.size.unwrap_or(if name == SamplerName::SigmaPowers { 3 } else { 8 });
    Ok(builtin_sampler(name.as_str(), size, p.domain_radius.unwrap_or(default_radius))?)
}

pub fn build_family(p: &FamilyParams) -> Result<Vec<ExactPoly>, Failure> {
    match &p.polys {
        Some(texts) if !texts.is_empty() => texts
            .iter()
            .map(|t| {
                let parsed = match (p.nvars, p.m) {
                    (Some(n), Some(m)) => ExactPoly::parse_with_shape(t, n, m),
                    _ => t.parse::<ExactPoly>(),
                };
                parsed.map_err(|e| Failure::Schema(format!("polynomial `{t}`: {e}")))
            })
            .collect(),
        _ => {
            let (r, m, n) = (p.r.unwrap_or(2), p.m.unwrap_or(2), p.nvars.unwrap_or(3));
            if r > n {
                return Err(Failure::Schema(format!("r = {r} exceeds the number of variables {n}")));
            }
            Ok((0..r).map(|i| ExactPoly::power(n, i, m)).collect())
        }
    }
}

pub fn cover(p: CoverParams, seed: u64) -> Outcome {
    let cloud = build_cloud(&p.cloud, seed)?;
    let eps = p.epsilon.unwrap_or(0.1);
    let net = greedy_cover(&cloud, eps)?;
    let exact = if cloud.len() <= DEFAULT_EXACT_LIMIT {
        Some(exact_covering_number(&cloud, eps, DEFAULT_EXACT_LIMIT)?)
    } else {
        None
    };
    let mut summary = Table::new(
        "cover",
        &["epsilon", "cloud_size", "greedy_centers", "verified", "exact", "packing_2eps", "packing_eps"],
    );
    summary.push(row![
        eps,
        cloud.len(),
        net.len(),
        verify_cover(&net, &cloud),
        exact,
        packing_number(&cloud, 2.0 * eps)?,
        packing_number(&cloud, eps)?,
    ]);
    let mut centers = Table::new("cover-centers", &["center", "cloud_index"]);
    for (i, &idx) in net.center_indices.iter().enumerate() {
        centers.push(row![i, idx]);
    }
    Ok(vec![summary, centers])
}

fn profile_series(profile: &EntropyProfile, upper: bool) -> Vec<(f64, f64)> {
    profile.entries().iter().map(|e| (e.n as f64, if upper { e.upper } else { e.lower })).collect()
}

pub fn profile_table(name: &str, profile: &EntropyProfile) -> Table {
    let mut t = Table::new(name, &["n", "lower", "upper", "method"]);
    for e in profile.entries() {
        t.push(row![e.n, e.lower, e.upper, e.method.to_string()]);
    }
    t.with_series("lower", "n", "lower", profile_series(profile, false)).with_series(
        "upper",
        "n",
        "upper",
        profile_series(profile, true),
    )
}

pub fn entropy_tables(stem: &str, cloud: &PointCloud, n_max: usize) -> Outcome {
    let profile = dyadic_entropy_profile(cloud, n_max)?;
    let mut tables = vec![profile_table(stem, &profile)];
    if profile.len() >= 2 {
        let report = ratio_diagnostic(&profile)?;
        let mut t =
            Table::new(format!("{stem}-ratios"), &["n", "upper_ratio", "lower_ratio", "certified_max", "flagged"]);
        for r in &report.rows {
            t.push(row![r.n, r.upper_ratio, r.lower_ratio, r.certified_max, r.flagged]);
        }
        tables.push(t);
    }
    Ok(tables)
}

pub fn entropy(p: EntropyParams, seed: u64) -> Outcome {
    let cloud = build_cloud(&p.cloud, seed)?;
    entropy_tables("entropy", &cloud, p.n_max.unwrap_or(6))
}

pub fn boxdim_tables(stem: &str, cloud: &PointCloud, n_min: u32, n_max: u32, grid: GridArg) -> Outcome {
    let mode = match grid {
        GridArg::Anchored => GridMode::Anchored,
        GridArg::OffsetMax => GridMode::OffsetMax,
    };
    let est = dim_estimate_with(cloud, n_min, n_max, mode)?;
    let mut scales = Table::new(stem, &["n", "delta", "count", "slope"]);
    for (k, (&(delta, count), &slope)) in est.scales.iter().zip(&est.slope_table).enumerate() {
        scales.push(row![n_min as usize + k, delta, count, slope]);
    }
    let loglog = est.scales.iter().map(|&(d, c)| (-d.ln(), (c as f64).ln())).collect();
    let scales = scales.with_series("loglog", "neg_log_delta", "log_count", loglog);
    let mut summary = Table::new(
        format!("{stem}-summary"),
        &["n_min", "n_max", "grid", "regression_slope", "lower_est", "upper_est", "warnings"],
    );
    let grid_name = match grid {
        GridArg::Anchored => "anchored",
        GridArg::OffsetMax => "offset-max",
    };
    summary.push(row![
        n_min,
        n_max,
        grid_name,
        est.regression_slope,
        est.lower_est,
        est.upper_est,
        est.warnings.join("; ")
    ]);
    Ok(vec![scales, summary])
}

pub fn boxdim(p: BoxdimParams, seed: u64) -> Outcome {
    let cloud = build_cloud(&p.cloud, seed)?;
    boxdim_tables("boxdim", &cloud, p.n_min.unwrap_or(2), p.n_max.unwrap_or(8), p.grid.unwrap_or(GridArg::Anchored))
}

pub fn diagonal(p: DiagonalParams) -> Outcome {
    let model = match p.weights {
        Some(w) => DiagonalModel::new(w, NormKind::Infinity)?,
        None => DiagonalModel::geometric(p.epsilon.unwrap_or(0.5), p.truncation.unwrap_or(8))?,
    };
    let mut t = Table::new("diagonal", &["n", "lower", "upper", "lower_argmax", "consistent"]);
    for n in 1..=p.n_max.unwrap_or(10) {
        let b = carl_stephani_bounds(&model, n)?;
        t.push(row![n, b.lower, b.upper, b.lower_argmax, b.is_consistent()]);
    }
    Ok(vec![t])
}

pub fn sigma_tables(stem: &str, r: u32, n_max: usize) -> Outcome {
    let rows = sigma_partition_profile(r, n_max)?;
    let mut header = vec!["block", "n", "lower", "upper"];
    header.extend(["partial_sum_p1", "partial_sum_p1.5", "partial_sum_p2"].iter().take(SIGMA_EXPONENTS.len()));
    let mut t = Table::new(stem, &header);
    for r in &rows {
        let mut cells = row![r.block, r.n, r.lower, r.upper];
        cells.extend(r.partial_sums.iter().map(|&(_, s)| crate::output::fmt_f64(s)));
        t.push(cells);
    }
    let series = rows.iter().map(|r| (r.block as f64, r.partial_sums[0].1)).collect();
    Ok(vec![t.with_series("partial-sum-p1", "block", "partial_sum", series)])
}

pub fn sigma(p: SigmaParams) -> Outcome {
    sigma_tables("sigma", p.r.unwrap_or(1), p.n_max.unwrap_or(5))
}

pub fn polyrank(p: PolyrankParams, seed: u64) -> Outcome {
    let family = build_family(&p.family)?;
    let trials = p.trials.unwrap_or(8);
    let tol = p.tol.unwrap_or(DEFAULT_RANK_TOL);
    let linear = family_rank(&family)?;
    let rank = generic_rank(&family, trials, seed, tol)?;
    let mut t = Table::new(
        "polyrank",
        &["family_size", "nvars", "degree", "linear_rank", "generic_rank", "bound", "pass", "chain_holds"],
    );
    let (nvars, degree) = (family[0].nvars(), family[0].degree());
    if linear == family.len() {
        let rep = corollary_check(&family, trials, seed, tol)?;
        t.push(row![family.len(), nvars, degree, linear, rank, rep.bound, rep.pass, rep.chain_holds]);
    } else {
        t.push(row![family.len(), nvars, degree, linear, rank, None::<f64>, None::<bool>, None::<bool>]);
    }
    Ok(vec![t])
}

pub fn corank_tables(stem: &str, family: &[ExactPoly]) -> Outcome {
    let sys = assemble_oxis(family, &SizeCaps::default())?;
    let rep = corank_report(&sys);
    let mut t = Table::new(
        stem,
        &[
            "r",
            "m",
            "nvars",
            "unknowns",
            "nominal_rows",
            "corank",
            "monomial_bound",
            "statement_binomial",
            "proof_binomial",
            "within_bound",
            "sharp",
        ],
    );
    t.push(row![
        sys.r,
        sys.degree,
        sys.nvars,
        sys.unknown_count(),
        sys.nominal_row_count(),
        rep.corank,
        rep.monomial_bound,
        rep.statement_binomial,
        rep.proof_binomial,
        rep.within_bound,
        rep.corank as u64 == rep.monomial_bound,
    ]);
    Ok(vec![t])
}

pub fn corank(p: CorankParams) -> Outcome {
    corank_tables("corank", &build_family(&p.family)?)
}

pub fn taylor(p: TaylorParams, seed: u64) -> Outcome {
    let f = build_sampler(&p.sampler, 1.0)?;
    let m_max = p.m_max.unwrap_or(8);
    let nodes = p.nodes.unwrap_or(DEFAULT_QUADRATURE_NODES);
    let xs = domain_sample(&f, p.samples.unwrap_or(10), seed)?;
    let per_point = xs
        .par_iter()
        .map(|x| -> Result<_, compactum_core::Error> {
            let value = f.evaluate(x)?;
            let parts = (0..=m_max).map(|m| taylor_quadrature(&f, m, x, nodes)).collect::<Result<Vec<_>, _>>()?;
            Ok((value, parts))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut coeffs = Table::new("taylor", &["sample", "m", "coordinate", "re", "im", "nodes", "delta"]);
    let mut norms = Table::new("taylor-norms", &["sample", "m", "norm", "tail"]);
    for (s, (value, parts)) in per_point.iter().enumerate() {
        let mut partial = vec![Complex64::new(0.0, 0.0); value.dim()];
        for (m, q) in parts.iter().enumerate() {
            for (k, c) in q.value.entries().iter().enumerate() {
                coeffs.push(row![s, m, k + 1, c.re, c.im, q.nodes, q.delta]);
            }
            for (acc, c) in partial.iter_mut().zip(q.value.entries()) {
                *acc += c;
            }
            let diff: Vec<Complex64> = value.entries().iter().zip(&partial).map(|(a, b)| a - b).collect();
            norms.push(row![s, m, q.value.norm(f.codomain_norm), f.codomain_norm.eval(&diff)]);
        }
    }
    Ok(vec![coeffs, norms])
}

pub struct TransferSetup {
    pub epsilon: f64,
    pub n: usize,
    pub cloud_points: usize,
    pub samples: usize,
    pub m_max: u32,
}

pub fn transfer_tables(stem: &str, f: &HoloSampler, s: &TransferSetup, seed: u64) -> Outcome {
    let cloud = image_cloud(f, s.cloud_points, seed)?;
    let net = greedy_cover(&cloud, s.epsilon)?;
    let verified = verify_cover(&net, &cloud);
    let plan = transfer_entropy_bound(s.n, s.epsilon, f.deriv_bound)?;
    let probe = lipschitz_probe(f, 256, seed.wrapping_add(2))?;
    let xs = domain_sample(f, s.samples, seed.wrapping_add(1))?;
    let witnesses = xs
        .par_iter()
        .map(|x| -> Result<Vec<_>, compactum_core::Error> {
            let selection = select_centers(f, &plan, &net, x)?;
            (1..=s.m_max).map(|m| witness_from_selection(f, &plan, &net, &selection, m, x)).collect()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut plan_t = Table::new(
        format!("{stem}-plan"),
        &["n", "e_n", "c_n", "target_index", "guarantee", "net_size", "net_verified", "deriv_bound", "deriv_probe"],
    );
    plan_t.push(row![
        plan.n,
        plan.e_n,
        plan.c_n,
        plan.target_index,
        plan.guarantee,
        net.len(),
        verified,
        f.deriv_bound,
        probe
    ]);
    let mut t = Table::new(stem, &["sample", "m", "error", "guarantee", "pass"]);
    for (i, ws) in witnesses.iter().enumerate() {
        for (k, w) in ws.iter().enumerate() {
            t.push(row![i, k + 1, w.error, plan.guarantee, w.pass]);
        }
    }
    Ok(vec![t, plan_t])
}

pub fn transfer(p: TransferParams, seed: u64) -> Outcome {
    let f = build_sampler(&p.sampler, 0.9)?;
    let setup = TransferSetup {
        epsilon: p.epsilon.unwrap_or(0.05),
        n: p.n.unwrap_or(1),
        cloud_points: p.cloud_points.unwrap_or(20_000),
        samples: p.samples.unwrap_or(200),
        m_max: p.m_max.unwrap_or(4),
    };
    transfer_tables("transfer", &f, &setup, seed)
}

fn parse_method(text: &str) -> Result<BoundMethod, Failure> {
    match text {
        "greedy-packing" => Ok(BoundMethod::GreedyPacking),
        "exact" => Ok(BoundMethod::Exact),
        "carl-stephani" => Ok(BoundMethod::CarlStephani),
        "geometric-majorant" => Ok(BoundMethod::GeometricMajorant),
        other => Err(Failure::Schema(format!("unknown bound method `{other}`"))),
    }
}

#[derive(serde::Deserialize)]
struct ProfileRow {
    n: usize,
    lower: f64,
    upper: f64,
    method: Option<String>,
}

pub fn read_profile(path: &Path) -> Result<EntropyProfile, Failure> {
    let schema = |msg: String| Failure::Schema(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| schema(e.to_string()))?;
    let mut entries = Vec::new();
    for row in reader.deserialize::<ProfileRow>() {
        let row = row.map_err(|e| schema(e.to_string()))?;
        let method = match row.method.as_deref() {
            Some(m) if !m.is_empty() => parse_method(m)?,
            _ => BoundMethod::Exact,
        };
        entries.push(ProfileEntry { n: row.n, lower: row.lower, upper: row.upper, method });
    }
    Ok(EntropyProfile::new(entries)?)
}

pub fn summability_tables(stem: &str, profile: &EntropyProfile, p: f64, extend: Option<usize>) -> Outcome {
    let (profile, majorant) = match extend {
        Some(n) if n > profile.len() => {
            let g = geometric_majorant(profile, n)?;
            (g.profile.clone(), Some(g))
        }
        _ => (profile.clone(), None),
    };
    let report = summability_diagnostic(&profile, p)?;
    let mut t = Table::new(stem, &["n", "lower", "upper", "method", "partial_sum"]);
    for (e, s) in profile.entries().iter().zip(&report.partial_sums) {
        t.push(row![e.n, e.lower, e.upper, e.method.to_string(), *s]);
    }
    let series = profile.entries().iter().zip(&report.partial_sums).map(|(e, &s)| (e.n as f64, s)).collect();
    let mut v =
        Table::new(format!("{stem}-verdict"), &["p", "ratio_tail", "verdict", "majorant_constant", "majorant_ratio"]);
    v.push(row![
        report.p,
        report.ratio_tail,
        report.verdict.to_string(),
        majorant.as_ref().map(|g| g.constant),
        majorant.as_ref().map(|g| g.ratio)
    ]);
    Ok(vec![t.with_series("partial-sum", "n", "partial_sum", series), v])
}

pub fn summability(p: SummabilityParams, seed: u64) -> Outcome {
    let profile = match p.source.unwrap_or(ProfileSource::Cloud) {
        ProfileSource::Cloud => dyadic_entropy_profile(&build_cloud(&p.cloud, seed)?, p.n_max.unwrap_or(8))?,
        ProfileSource::DiagK => {
            example_k_profile(p.epsilon.unwrap_or(0.5), p.truncation.unwrap_or(24), p.n_max.unwrap_or(24))?
        }
        ProfileSource::Sigma => sigma_entropy_profile(p.r.unwrap_or(1), p.n_max.unwrap_or(4))?,
        ProfileSource::File => {
            let path = p.profile.as_ref().ok_or_else(|| Failure::Schema("a `file` source needs `profile`".into()))?;
            read_profile(path)?
        }
    };
    summability_tables("summability", &profile, p.p.unwrap_or(1.5), p.extend)
}

pub fn bridge_table(stem: &str, profile: &EntropyProfile) -> Outcome {
    let r = entropy_dim_bridge(profile, &BridgeConfig::default())?;
    let mut t =
        Table::new(stem, &["class", "tail_start", "max_upper_root", "min_lower_root", "extrapolated_lower_root"]);
    t.push(row![r.class.to_string(), r.tail_start, r.max_upper_root, r.min_lower_root, r.extrapolated_lower_root]);
    Ok(vec![t])
}
