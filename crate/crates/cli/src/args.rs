use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "hyprig",
    version,
    about = "Volume cocycle, smearing and rigidity checks in hyperbolic space"
)]
pub struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Signed volume of an ideal simplex.
    Vol(VolArgs),
    /// Volume of the regular ideal n-simplex.
    Vn(VnArgs),
    /// Cocycle defect on random (n+2)-tuples of boundary points.
    CocycleCheck(CocycleArgs),
    /// Point of a straight simplex at barycentric coordinates.
    Straighten(StraightenArgs),
    /// Conformal barycenter of a boundary measure.
    Barycenter(BarycenterArgs),
    /// Reflection orbit of the reference regular simplex.
    Orbit(OrbitArgs),
    /// Closest reflection word to a target isometry.
    DensityProbe(DensityArgs),
    /// List or verify lattice presets.
    Preset(PresetArgs),
    /// Smearing estimate of the volume ratio λ (or of one simplex).
    Smear(SmearArgs),
    /// Volume of the representation attached to a boundary map.
    VolOfRep(SmearArgs),
    /// Fraction of regular simplices a boundary map keeps regular.
    PreservesRegular(PreservesArgs),
    /// Isometry extending a boundary map, by multi-seed consensus.
    Reconstruct(ReconstructArgs),
    /// Distance of a representation from a conjugate of the lattice.
    VerifyConjugacy(ConjugacyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct QuadArgs {
    /// Gauss–Legendre order of the cubature (n ≥ 4).
    #[arg(long, default_value_t = 8)]
    pub quad_order: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub quad_rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub quad_abs_tol: f64,
    #[arg(long, default_value_t = 50_000_000)]
    pub quad_max_evals: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct VolArgs {
    #[arg(long)]
    pub n: usize,
    /// JSON array of n+1 unit vectors.
    #[arg(long)]
    pub simplex: PathBuf,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct VnArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct CocycleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub tuples: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct StraightenArgs {
    /// JSON array of vertices, each {"finite": [...]} or {"ideal": [...]}.
    #[arg(long)]
    pub vertices: PathBuf,
    /// Comma-separated barycentric coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<f64>,
    /// Coordinates of the output point.
    #[arg(long, default_value = "hyperboloid")]
    pub model: String,
}

#[derive(Args, Debug, Serialize)]
pub struct BarycenterArgs {
    /// JSON array of atoms {"point": [...], "weight": w}.
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub orientation: i8,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    /// Include every orbit simplex and point in the output.
    #[arg(long)]
    pub full: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub n: usize,
    /// JSON (n+1)×(n+1) matrix of the target isometry.
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub depth: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PresetArgs {
    #[command(subcommand)]
    pub action: PresetAction,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum PresetAction {
    List,
    Verify { name: String },
}

#[derive(Args, Debug, Serialize)]
pub struct SmearArgs {
    #[arg(long)]
    pub preset: String,
    /// planted-identity, planted-reflection, constant, planted:<matrix.json>
    /// or spec:<map.json>.
    #[arg(long)]
    pub map: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    /// Cusp truncation height; defaults to the height with bias ≤ 1e−3.
    #[arg(long)]
    pub truncation: Option<f64>,
    /// Number of random test simplices for λ.
    #[arg(long, default_value_t = 8)]
    pub test_simplices: usize,
    /// Smear this simplex only instead of estimating λ.
    #[arg(long)]
    pub simplex: Option<PathBuf>,
    /// Emit CSV rows instead of JSON.
    #[arg(long)]
    pub csv: bool,
    /// Comma-separated sample counts for a convergence sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct PreservesArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub map: String,
    #[arg(long)]
    pub n: usize,
    /// Number of independent seed simplices.
    #[arg(long, default_value_t = 8)]
    pub seeds: usize,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub image_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub orbit_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub agreement: f64,
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ConjugacyArgs {
    #[arg(long)]
    pub preset: String,
    /// Matrix, or the output of `reconstruct`.
    #[arg(long)]
    pub h: PathBuf,
    /// JSON array of generator images.
    #[arg(long)]
    pub rho: PathBuf,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}
