//! Holomorphic maps given as black boxes: extraction of the homogeneous
//! Taylor parts by the Cauchy integral, image clouds, and the covering-net
//! transfer from `f(x₀ + εB)` to the Taylor part `P_m f(x₀)(εB)`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::covering::{BoundMethod, Cover, EntropyProfile, ProfileEntry};
use crate::diagonal::factorial;
use crate::error::{Error, Result};
use crate::metric::{sample_ball, BallSpec, ComplexVector, NormKind, PointCloud};
use crate::poly::numerical_rank;

/// Stop once two successive quadratures differ by less than this.
pub const QUADRATURE_TOL: f64 = 1e-12;
pub const MAX_QUADRATURE_NODES: usize = 1 << 16;
pub const DEFAULT_QUADRATURE_NODES: usize = 16;

type MapFn = dyn Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync;

/// A holomorphic map `f` near `x₀`, known on the ball `‖x − x₀‖ < radius`.
#[derive(Clone)]
pub struct HoloSampler {
    pub name: String,
    map: Arc<MapFn>,
    pub center: ComplexVector,
    pub radius: f64,
    pub domain_norm: NormKind,
    pub codomain_norm: NormKind,
    /// Upper bound on `‖d/dt f(x₀ + e^{it}x)‖` over the domain, the
    /// circle-direction Lipschitz constant used by the transfer.
    pub deriv_bound: f64,
}

impl fmt::Debug for HoloSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloSampler")
            .field("name", &self.name)
            .field("center", &self.center)
            .field("radius", &self.radius)
            .field("domain_norm", &self.domain_norm)
            .field("codomain_norm", &self.codomain_norm)
            .field("deriv_bound", &self.deriv_bound)
            .finish()
    }
}

impl HoloSampler {
    pub fn new(
        name: impl Into<String>,
        map: impl Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
        center: ComplexVector,
        radius: f64,
        domain_norm: NormKind,
        codomain_norm: NormKind,
        deriv_bound: f64,
    ) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("sampler radius must be positive, got {radius}")));
        }
        if !(deriv_bound >= 0.0) || !deriv_bound.is_finite() {
            return Err(Error::InvalidArgument(format!("derivative bound must be finite, got {deriv_bound}")));
        }
        Ok(Self { name: name.into(), map: Arc::new(map), center, radius, domain_norm, codomain_norm, deriv_bound })
    }

    pub fn domain_dim(&self) -> usize {
        self.center.dim()
    }

    /// `f(x₀ + x)` without the domain check.
    fn at_offset(&self, x: &[Complex64]) -> Vec<Complex64> {
        let z: Vec<Complex64> = self.center.entries().iter().zip(x).map(|(c, xi)| c + xi).collect();
        (self.map)(&z)
    }

    fn check_offset(&self, x: &ComplexVector) -> Result<()> {
        if x.dim() != self.domain_dim() {
            return Err(Error::DimensionMismatch { expected: self.domain_dim(), found: x.dim() });
        }
        let norm = x.norm(self.domain_norm);
        if norm >= self.radius {
            return Err(Error::Domain { norm, radius: self.radius });
        }
        Ok(())
    }

    /// `f(x₀ + x)` for `‖x‖ < radius`.
    pub fn evaluate(&self, x: &ComplexVector) -> Result<ComplexVector> {
        self.check_offset(x)?;
        ComplexVector::new(self.at_offset(x.entries()))
    }
}

fn codomain_dist(norm: NormKind, a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm.eval(&diff)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub value: ComplexVector,
    /// Nodes of the accepted rule.
    pub nodes: usize,
    /// Distance to the rule with half as many nodes.
    pub delta: f64,
}

/// `P_m f(x₀)(x) = (1/2π) ∫ f(x₀ + e^{it}x) e^{−imt} dt` by the trapezoidal
/// rule, doubling from `max(nodes, m + 2)` nodes until successive results
/// agree to [`QUADRATURE_TOL`]. Each doubling evaluates only the new nodes.
pub fn taylor_quadrature(f: &HoloSampler, m: u32, x: &ComplexVector, nodes: usize) -> Result<Quadrature> {
    f.check_offset(x)?;
    let mut k = nodes.max(m as usize + 2).next_power_of_two();
    // terms are evaluated in parallel but summed in index order
    let node_sum = |k: usize, indices: Vec<usize>| -> Vec<Complex64> {
        let terms: Vec<Vec<Complex64>> = indices
            .par_iter()
            .map(|&j| {
                let t = TAU * j as f64 / k as f64;
                let w = Complex64::from_polar(1.0, t);
                let point: Vec<Complex64> = x.entries().iter().map(|xi| w * xi).collect();
                let weight = Complex64::from_polar(1.0, -(m as f64) * t);
                f.at_offset(&point).into_iter().map(|v| v * weight).collect()
            })
            .collect();
        terms.into_iter().reduce(|a, b| a.iter().zip(&b).map(|(p, q)| p + q).collect()).unwrap_or_default()
    };
    let mut sum = node_sum(k, (0..k).collect());
    let mut current: Vec<Complex64> = sum.iter().map(|s| s / k as f64).collect();
    let mut delta = f64::INFINITY;
    while 2 * k <= MAX_QUADRATURE_NODES {
        let odd = node_sum(2 * k, (1..2 * k).step_by(2).collect());
        sum = sum.iter().zip(&odd).map(|(a, b)| a + b).collect();
        k *= 2;
        let next: Vec<Complex64> = sum.iter().map(|s| s / k as f64).collect();
        delta = codomain_dist(f.codomain_norm, &next, &current);
        if delta < QUADRATURE_TOL {
            return Ok(Quadrature { value: ComplexVector::new(next)?, nodes: k, delta });
        }
        current = next;
    }
    Err(Error::Convergence { nodes: k, delta })
}

pub fn taylor_coefficient(f: &HoloSampler, m: u32, x: &ComplexVector, nodes: usize) -> Result<ComplexVector> {
    taylor_quadrature(f, m, x, nodes).map(|q| q.value)
}

/// `f(x₀ + x)` for a seeded sample of displacements `x` in the domain ball.
pub fn image_cloud(f: &HoloSampler, count: usize, seed: u64) -> Result<PointCloud> {
    let spec = BallSpec::centered(f.domain_dim(), f.radius, f.domain_norm)?;
    let xs = sample_ball(&spec, count, seed)?;
    let points =
        xs.points().par_iter().map(|x| ComplexVector::new(f.at_offset(x.entries()))).collect::<Result<Vec<_>>>()?;
    PointCloud::new(points, f.codomain_norm, format!("{}-image", f.name))
}

/// Seeded displacements from the domain ball, for driving per-point checks.
pub fn domain_sample(f: &HoloSampler, count: usize, seed: u64) -> Result<Vec<ComplexVector>> {
    let spec = BallSpec::centered(f.domain_dim(), f.radius, f.domain_norm)?;
    Ok(sample_ball(&spec, count, seed)?.points().to_vec())
}

/// Numerical linear rank of a seeded image sample, a finite-truncation
/// proxy for the linear dimension of the image.
pub fn image_rank(f: &HoloSampler, count: usize, seed: u64, tol: f64) -> Result<usize> {
    let cloud = image_cloud(f, count, seed)?;
    let dim = cloud.dim().unwrap_or(0);
    let m = DMatrix::from_fn(cloud.len(), dim, |i, j| cloud.points()[i][j]);
    Ok(numerical_rank(&m, tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPlan {
    pub n: usize,
    /// Entropy bound (net radius) the plan is built from.
    pub e_n: f64,
    /// `⌈2π · deriv_bound / e_n⌉`, at least 1.
    pub c_n: usize,
    /// `(n − 1) C_n + 1`.
    pub target_index: usize,
    /// `2 e_n`.
    pub guarantee: f64,
}

pub fn transfer_entropy_bound(n: usize, e_n_upper: f64, deriv_bound: f64) -> Result<TransferPlan> {
    if n == 0 {
        return Err(Error::InvalidArgument("entropy numbers are indexed from n = 1".into()));
    }
    if !(e_n_upper > 0.0) || !e_n_upper.is_finite() {
        return Err(Error::InvalidArgument(format!("entropy bound must be positive, got {e_n_upper}")));
    }
    if !(deriv_bound >= 0.0) || !deriv_bound.is_finite() {
        return Err(Error::InvalidArgument(format!("derivative bound must be finite, got {deriv_bound}")));
    }
    let c_n = ((TAU * deriv_bound / e_n_upper).ceil() as usize).max(1);
    Ok(TransferPlan { n, e_n: e_n_upper, c_n, target_index: (n - 1) * c_n + 1, guarantee: 2.0 * e_n_upper })
}

/// Net centers chosen for `x`: for each of the `C_n` intervals, the center
/// nearest to `f(x₀ + e^{it*}x)` at the interval midpoint `t*`.
pub fn select_centers(f: &HoloSampler, plan: &TransferPlan, net: &Cover, x: &ComplexVector) -> Result<Vec<usize>> {
    f.check_offset(x)?;
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    let width = TAU / plan.c_n as f64;
    (0..plan.c_n)
        .into_par_iter()
        .map(|j| {
            let w = Complex64::from_polar(1.0, width * (j as f64 + 0.5));
            let point: Vec<Complex64> = x.entries().iter().map(|xi| w * xi).collect();
            let image = f.at_offset(&point);
            net.nearest(&image).map(|(i, _)| i).ok_or(Error::EmptyNet)
        })
        .collect()
}

/// `∫_a^b e^{−imt} dt`.
fn interval_integral(m: u32, a: f64, b: f64) -> Complex64 {
    if m == 0 {
        return Complex64::new(b - a, 0.0);
    }
    let mf = m as f64;
    (Complex64::from_polar(1.0, -mf * a) - Complex64::from_polar(1.0, -mf * b)) / Complex64::new(0.0, mf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub y: ComplexVector,
    pub reference: ComplexVector,
    pub error: f64,
    pub pass: bool,
}

/// `y = (1/2π) Σ_j z_j ∫_{J_j} e^{−imt} dt` from a center selection.
pub fn witness_from_selection(
    f: &HoloSampler,
    plan: &TransferPlan,
    net: &Cover,
    selection: &[usize],
    m: u32,
    x: &ComplexVector,
) -> Result<Witness> {
    if selection.len() != plan.c_n {
        return Err(Error::DimensionMismatch { expected: plan.c_n, found: selection.len() });
    }
    let width = TAU / plan.c_n as f64;
    let dim = net.centers.first().ok_or(Error::EmptyNet)?.dim();
    let mut y = vec![Complex64::new(0.0, 0.0); dim];
    for (j, &c) in selection.iter().enumerate() {
        let weight = interval_integral(m, width * j as f64, width * (j + 1) as f64) / TAU;
        for (yi, zi) in y.iter_mut().zip(net.centers[c].entries()) {
            *yi += zi * weight;
        }
    }
    let reference = taylor_coefficient(f, m, x, DEFAULT_QUADRATURE_NODES)?;
    let error = codomain_dist(f.codomain_norm, &y, reference.entries());
    Ok(Witness { y: ComplexVector::new(y)?, reference, error, pass: error <= plan.guarantee })
}

pub fn transfer_witness(
    f: &HoloSampler,
    plan: &TransferPlan,
    net: &Cover,
    m: u32,
    x: &ComplexVector,
) -> Result<Witness> {
    let selection = select_centers(f, plan, net, x)?;
    witness_from_selection(f, plan, net, &selection, m, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummabilityVerdict {
    SummableConsistent,
    DivergentConsistent,
    Inconclusive,
}

impl fmt::Display for SummabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SummableConsistent => "summable-consistent",
            Self::DivergentConsistent => "divergent-consistent",
            Self::Inconclusive => "inconclusive",
        })
    }
}

/// Entries examined at the end of the profile.
pub const SUMMABILITY_TAIL: usize = 5;
pub const SUMMABLE_RATIO: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityReport {
    pub p: f64,
    /// `Σ_{k ≤ n} upper_k^p` per entry.
    pub partial_sums: Vec<f64>,
    /// Largest `upper_{n+1}^p / upper_n^p` in the tail.
    pub ratio_tail: f64,
    pub verdict: SummabilityVerdict,
}

/// Tail test for `(e_n) ∈ ℓ_p`.
///
/// Summable when the tail ratios of `upper^p` stay below
/// [`SUMMABLE_RATIO`] (never issued for `p ≤ 1`); divergent when the lower
/// bounds are positive and `n · lower_n^p` is nondecreasing over the tail,
/// which dominates a harmonic tail.
pub fn summability_diagnostic(profile: &EntropyProfile, p: f64) -> Result<SummabilityReport> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("summability exponent must be at least 1, got {p}")));
    }
    let entries = profile.entries();
    if entries.is_empty() {
        return Err(Error::InvalidArgument("summability of an empty profile".into()));
    }
    let mut acc = 0.0;
    let partial_sums = entries
        .iter()
        .map(|e| {
            acc += e.upper.powf(p);
            acc
        })
        .collect();
    let tail = &entries[entries.len().saturating_sub(SUMMABILITY_TAIL)..];
    let ratio_tail = tail
        .windows(2)
        .map(|w| if w[0].upper == 0.0 { 0.0 } else { (w[1].upper / w[0].upper).powf(p) })
        .fold(0.0, f64::max);
    let full_tail = tail.len() == SUMMABILITY_TAIL;
    let all_zero = entries.iter().all(|e| e.upper == 0.0);
    let verdict = if all_zero || (p > 1.0 && full_tail && ratio_tail < SUMMABLE_RATIO) {
        SummabilityVerdict::SummableConsistent
    } else if full_tail
        && tail.iter().all(|e| e.lower > 0.0)
        && tail.windows(2).all(|w| w[1].n as f64 * w[1].lower.powf(p) >= w[0].n as f64 * w[0].lower.powf(p))
    {
        SummabilityVerdict::DivergentConsistent
    } else {
        SummabilityVerdict::Inconclusive
    };
    Ok(SummabilityReport { p, partial_sums, ratio_tail, verdict })
}

/// Largest observed `‖f(x₀+e^{it₀}x) − f(x₀+e^{it₁}x)‖ / |e^{it₀} − e^{it₁}|`
/// over seeded `(x, t₀, t₁)`; a lower estimate of the circle constant.
pub fn lipschitz_probe(f: &HoloSampler, samples: usize, seed: u64) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidArgument("lipschitz_probe needs at least two samples".into()));
    }
    let xs = domain_sample(f, samples, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let angles: Vec<(f64, f64)> =
        (0..samples).map(|_| (TAU * rng.random::<f64>(), TAU * rng.random::<f64>())).collect();
    Ok(xs
        .par_iter()
        .zip(angles.par_iter())
        .map(|(x, &(t0, t1))| {
            let w0 = Complex64::from_polar(1.0, t0);
            let w1 = Complex64::from_polar(1.0, t1);
            let chord = (w0 - w1).norm();
            if chord < 1e-9 {
                return 0.0;
            }
            let p0: Vec<Complex64> = x.entries().iter().map(|v| w0 * v).collect();
            let p1: Vec<Complex64> = x.entries().iter().map(|v| w1 * v).collect();
            codomain_dist(f.codomain_norm, &f.at_offset(&p0), &f.at_offset(&p1)) / chord
        })
        .reduce(|| 0.0, f64::max))
}

/// Majorant `C ρ^n` fitted by least squares on `ln upper_n` and raised to
/// dominate every measured entry; the profile is then extended to `n_max`
/// with the majorant above and zero below.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMajorant {
    pub constant: f64,
    pub ratio: f64,
    pub profile: EntropyProfile,
}

pub fn geometric_majorant(measured: &EntropyProfile, n_max: usize) -> Result<GeometricMajorant> {
    let pts: Vec<(f64, f64)> =
        measured.entries().iter().filter(|e| e.upper > 0.0).map(|e| (e.n as f64, e.upper.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument("need two positive upper bounds to fit a majorant".into()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / pts.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    let ratio = slope.exp();
    if !(ratio < 1.0) {
        return Err(Error::InvalidArgument(format!("fitted ratio {ratio} is not below 1")));
    }
    let constant = measured.entries().iter().map(|e| e.upper / ratio.powi(e.n as i32)).fold(0.0, f64::max)
        * (1.0 + 4.0 * f64::EPSILON);
    let last = measured.entries().last().map_or(0, |e| e.n);
    let mut entries: Vec<ProfileEntry> = measured.entries().to_vec();
    entries.extend((last + 1..=n_max).map(|n| ProfileEntry {
        n,
        lower: 0.0,
        upper: constant * ratio.powi(n as i32),
        method: BoundMethod::GeometricMajorant,
    }));
    Ok(GeometricMajorant { constant, ratio, profile: EntropyProfile::from_cummin(entries)? })
}

/// Built-in sampler families.
pub const BUILTIN_SAMPLERS: [&str; 4] = ["power-curve", "entire-exp", "coordinate-powers", "sigma-powers"];

/// `max_k k r^k` over the listed exponents: the circle constant of a map
/// whose coordinates are `k`-th powers of coordinates bounded by `r`.
fn power_circle_bound(exponents: impl Iterator<Item = u32>, radius: f64) -> f64 {
    exponents.map(|k| k as f64 * radius.powi(k as i32)).fold(0.0, f64::max)
}

/// `z ↦ (z, z², …, z^d)` on the disc of the given radius, into `ℓ_∞^d`.
pub fn power_curve(degree: u32, radius: f64) -> Result<HoloSampler> {
    check_size("d", degree as usize)?;
    HoloSampler::new(
        format!("power-curve(d={degree})"),
        move |z: &[Complex64]| (1..=degree).map(|k| z[0].powu(k)).collect(),
        ComplexVector::zeros(1),
        radius,
        NormKind::Infinity,
        NormKind::Infinity,
        power_circle_bound(1..=degree, radius),
    )
}

/// `z ↦ (z, z²/2!, …, z^d/d!)`.
pub fn entire_exp(terms: u32, radius: f64) -> Result<HoloSampler> {
    check_size("terms", terms as usize)?;
    let bound = (1..=terms).map(|k| radius.powi(k as i32) / factorial(k as usize - 1) as f64).fold(0.0, f64::max);
    HoloSampler::new(
        format!("entire-exp(terms={terms})"),
        move |z: &[Complex64]| (1..=terms).map(|k| z[0].powu(k) / factorial(k as usize) as f64).collect(),
        ComplexVector::zeros(1),
        radius,
        NormKind::Infinity,
        NormKind::Infinity,
        bound,
    )
}

/// `(x_k) ↦ (x₁, x₂², …, x_d^d)` on the sup-norm polydisc.
pub fn coordinate_powers(dim: u32, radius: f64) -> Result<HoloSampler> {
    check_size("d", dim as usize)?;
    HoloSampler::new(
        format!("coordinate-powers(d={dim})"),
        |x: &[Complex64]| x.iter().enumerate().map(|(k, v)| v.powu(k as u32 + 1)).collect(),
        ComplexVector::zeros(dim as usize),
        radius,
        NormKind::Infinity,
        NormKind::Infinity,
        power_circle_bound(1..=dim, radius),
    )
}

/// Coordinate `j` is `x_j^N` for `j` in the `N`-th factorial block, up to
/// block `n_max`.
pub fn sigma_powers(n_max: u32, radius: f64) -> Result<HoloSampler> {
    if n_max == 0 || n_max > 6 {
        return Err(Error::CapExceeded { what: "N_max", value: n_max as usize, cap: 6 });
    }
    let exponents: Vec<u32> = (1..=n_max).flat_map(|b| std::iter::repeat_n(b, factorial(b as usize))).collect();
    let dim = exponents.len();
    let exps = exponents.clone();
    HoloSampler::new(
        format!("sigma-powers(N_max={n_max})"),
        move |x: &[Complex64]| x.iter().zip(&exps).map(|(v, &e)| v.powu(e)).collect(),
        ComplexVector::zeros(dim),
        radius,
        NormKind::Infinity,
        NormKind::Infinity,
        power_circle_bound(1..=n_max, radius),
    )
}

fn check_size(what: &'static str, value: usize) -> Result<()> {
    const CAP: usize = 64;
    if value == 0 {
        return Err(Error::InvalidArgument(format!("{what} must be at least 1")));
    }
    if value > CAP {
        return Err(Error::CapExceeded { what, value, cap: CAP });
    }
    Ok(())
}

/// Looks up a built-in family; `size` is `d`, the number of terms, or
/// `N_max` depending on the family.
pub fn builtin_sampler(name: &str, size: u32, radius: f64) -> Result<HoloSampler> {
    match name {
        "power-curve" => power_curve(size, radius),
        "entire-exp" => entire_exp(size, radius),
        "coordinate-powers" => coordinate_powers(size, radius),
        "sigma-powers" => sigma_powers(size, radius),
        other => Err(Error::InvalidArgument(format!(
            "unknown sampler `{other}`; expected one of {}",
            BUILTIN_SAMPLERS.join(", ")
        ))),
    }
}
