//! Run configuration. Every parameter struct doubles as a TOML table and as
//! the flag set of its subcommand; flags override file values key by key.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

/// Fills unset fields of `self` from `base`; nested tables merge recursively.
pub trait Merge {
    fn merge(self, base: Self) -> Self;
}

macro_rules! merge_fields {
    ($ty:ident { $($field:ident),* } $(nested { $($inner:ident),* })?) => {
        impl Merge for $ty {
            fn merge(self, base: Self) -> Self {
                Self {
                    $($field: self.$field.or(base.$field),)*
                    $($($inner: self.$inner.merge(base.$inner),)*)?
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Cover,
    Entropy,
    Boxdim,
    Diagonal,
    Sigma,
    Polyrank,
    Corank,
    Taylor,
    Transfer,
    Summability,
    Repro,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CloudKind {
    /// Equispaced grid of [0, 1].
    Interval,
    /// Uniform sample of the complex disc.
    Disc,
    /// Uniform sample of the ℓ_p ball in ℂ^dim.
    Ball,
    /// Points read from a CSV file.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerName {
    PowerCurve,
    EntireExp,
    CoordinatePowers,
    SigmaPowers,
}

impl SamplerName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PowerCurve => "power-curve",
            Self::EntireExp => "entire-exp",
            Self::CoordinatePowers => "coordinate-powers",
            Self::SigmaPowers => "sigma-powers",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridArg {
    Anchored,
    OffsetMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileSource {
    /// Measured dyadic profile of a point cloud.
    Cloud,
    /// Analytic bounds for the geometric diagonal example.
    DiagK,
    /// Block profile of the factorial partition.
    Sigma,
    /// A profile CSV as written by `entropy`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReproId {
    DiagK,
    SigmaPartition,
    PowerCurve,
    EntireExp,
    CoordinatePowers,
    CorankSharp,
    CorollaryRank,
    IntervalOracle,
    DiscBoxdim,
    TransferPowerCurve,
}

impl ReproId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::DiagK => "diag-k",
            Self::SigmaPartition => "sigma-partition",
            Self::PowerCurve => "power-curve",
            Self::EntireExp => "entire-exp",
            Self::CoordinatePowers => "coordinate-powers",
            Self::CorankSharp => "corank-sharp",
            Self::CorollaryRank => "corollary-rank",
            Self::IntervalOracle => "interval-oracle",
            Self::DiscBoxdim => "disc-boxdim",
            Self::TransferPowerCurve => "transfer-power-curve",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudParams {
    /// Point cloud source.
    #[arg(long = "cloud", value_enum)]
    pub kind: Option<CloudKind>,
    /// Number of points (grid size or sample size).
    #[arg(long)]
    pub points: Option<usize>,
    /// Complex dimension of a `ball` cloud.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Radius of a `disc` or `ball` cloud.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Norm: a number p ≥ 1 or `inf`.
    #[arg(long)]
    pub norm: Option<String>,
    /// CSV of points for a `file` cloud.
    #[arg(long)]
    pub file: Option<PathBuf>,
}
merge_fields!(CloudParams { kind, points, dim, radius, norm, file });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerParams {
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerName>,
    /// Truncation size: d, number of terms, or N_max.
    #[arg(long)]
    pub size: Option<u32>,
    /// Radius of the domain ball.
    #[arg(long = "domain-radius")]
    pub domain_radius: Option<f64>,
}
merge_fields!(SamplerParams { sampler, size, domain_radius });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverParams {
    /// Covering radius.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub cloud: CloudParams,
}
merge_fields!(CoverParams { epsilon } nested { cloud });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyParams {
    /// Largest dyadic index.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub cloud: CloudParams,
}
merge_fields!(EntropyParams { n_max } nested { cloud });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxdimParams {
    /// Finest scale exponent is n_max, coarsest n_min (δ = 2^-n).
    #[arg(long)]
    pub n_min: Option<u32>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long, value_enum)]
    pub grid: Option<GridArg>,
    #[command(flatten)]
    #[serde(default)]
    pub cloud: CloudParams,
}
merge_fields!(BoxdimParams { n_min, n_max, grid } nested { cloud });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalParams {
    /// Nonincreasing diagonal weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Geometric weights ε^k, used when no weights are given.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, alias = "N")]
    #[serde(alias = "N")]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
}
merge_fields!(DiagonalParams { weights, epsilon, truncation, n_max });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaParams {
    /// Block radius exponent: radius 2^-r.
    #[arg(long)]
    pub r: Option<u32>,
    /// Number of blocks.
    #[arg(long)]
    pub n_max: Option<usize>,
}
merge_fields!(SigmaParams { r, n_max });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    /// Polynomials in text form; repeat the flag for each member.
    #[arg(long)]
    pub polys: Option<Vec<String>>,
    /// Number of variables of the family.
    #[arg(long, alias = "Nvars")]
    #[serde(alias = "Nvars")]
    pub nvars: Option<usize>,
    /// Common degree of the family.
    #[arg(long)]
    pub m: Option<u32>,
    /// Without explicit polynomials, use z_1^m, ..., z_r^m.
    #[arg(long)]
    pub r: Option<usize>,
}
merge_fields!(FamilyParams { polys, nvars, m, r });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyrankParams {
    /// Random evaluation points for the generic rank.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Singular value tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub family: FamilyParams,
}
merge_fields!(PolyrankParams { trials, tol } nested { family });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorankParams {
    #[command(flatten)]
    #[serde(default)]
    pub family: FamilyParams,
}
merge_fields!(CorankParams {} nested { family });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorParams {
    /// Highest homogeneous degree extracted.
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Number of seeded evaluation points.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Initial quadrature nodes.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    #[serde(default)]
    pub sampler: SamplerParams,
}
merge_fields!(TaylorParams { m_max, samples, nodes } nested { sampler });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferParams {
    /// Net radius on the image cloud.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Entropy index the net stands for.
    #[arg(long)]
    pub n: Option<usize>,
    /// Size of the image cloud the net covers.
    #[arg(long)]
    pub cloud_points: Option<usize>,
    /// Number of seeded witnesses.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub m_max: Option<u32>,
    #[command(flatten)]
    #[serde(default)]
    pub sampler: SamplerParams,
}
merge_fields!(TransferParams { epsilon, n, cloud_points, samples, m_max } nested { sampler });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummabilityParams {
    #[arg(long, value_enum)]
    pub source: Option<ProfileSource>,
    /// Summability exponent.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Extend the profile to this length with a fitted geometric majorant.
    #[arg(long)]
    pub extend: Option<usize>,
    /// Profile CSV for the `file` source.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, alias = "N")]
    #[serde(alias = "N")]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub r: Option<u32>,
    #[command(flatten)]
    #[serde(default)]
    pub cloud: CloudParams,
}
merge_fields!(SummabilityParams { source, p, n_max, extend, profile, epsilon, truncation, r } nested { cloud });

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproParams {
    /// Example to reproduce.
    #[arg(value_enum)]
    pub id: Option<ReproId>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, alias = "N")]
    #[serde(alias = "N")]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, alias = "Nvars")]
    #[serde(alias = "Nvars")]
    pub nvars: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub size: Option<u32>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Number of seeded families or witnesses.
    #[arg(long)]
    pub samples: Option<usize>,
}
merge_fields!(ReproParams { id, epsilon, truncation, n_max, r, m, nvars, points, size, radius, samples });

/// The TOML configuration document.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<CommandName>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    pub plot_data: Option<bool>,
    #[serde(default)]
    pub cover: CoverParams,
    #[serde(default)]
    pub entropy: EntropyParams,
    #[serde(default)]
    pub boxdim: BoxdimParams,
    #[serde(default)]
    pub diagonal: DiagonalParams,
    #[serde(default)]
    pub sigma: SigmaParams,
    #[serde(default)]
    pub polyrank: PolyrankParams,
    #[serde(default)]
    pub corank: CorankParams,
    #[serde(default)]
    pub taylor: TaylorParams,
    #[serde(default)]
    pub transfer: TransferParams,
    #[serde(default)]
    pub summability: SummabilityParams,
    #[serde(default)]
    pub repro: ReproParams,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = toml::from_str::<ConfigFile>("seed = 1\nbogus = 2\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        let err = toml::from_str::<ConfigFile>("[entropy]\nn_max = 3\nnmax = 4\n").unwrap_err();
        assert!(err.to_string().contains("nmax"));
        let err = toml::from_str::<ConfigFile>("[entropy.cloud]\nkind = \"interval\"\ncolour = 1\n").unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn nested_tables_and_aliases_parse() {
        let cfg: ConfigFile = toml::from_str(
            "command = \"repro\"\n[repro]\nid = \"diag-k\"\nN = 10\n[entropy.cloud]\nkind = \"disc\"\nradius = 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.command, Some(CommandName::Repro));
        assert_eq!(cfg.repro.id, Some(ReproId::DiagK));
        assert_eq!(cfg.repro.truncation, Some(10));
        assert_eq!(cfg.entropy.cloud.kind, Some(CloudKind::Disc));
    }

    #[test]
    fn flags_override_file_values() {
        let file = EntropyParams { n_max: Some(4), cloud: CloudParams { points: Some(10), ..Default::default() } };
        let flags = EntropyParams { n_max: Some(7), cloud: CloudParams::default() };
        let merged = flags.merge(file);
        assert_eq!(merged.n_max, Some(7));
        assert_eq!(merged.cloud.points, Some(10));
    }
}
