use std::path::Path;

use hyprig::boundary::{make_boundary_map, BoundaryMap, MapSpec};
use hyprig::hypcore::{IdealPoint, Isometry};
use hyprig::linalg::Matrix;

use crate::io::{read_json, CliError};

/// Parses the `--map` grammar into a boundary map on `∂ℍⁿ`.
pub fn parse_map(arg: &str, n: usize) -> Result<BoundaryMap<f64>, CliError> {
    let spec = match arg {
        "planted-identity" => return Ok(BoundaryMap::planted(Isometry::identity(n))),
        "planted-reflection" => {
            let m = Matrix::from_fn(n + 1, n + 1, |i, j| match (i == j, i) {
                (false, _) => 0.0,
                (true, 0) => -1.0,
                _ => 1.0,
            });
            return Ok(BoundaryMap::planted(Isometry::new(m)?));
        }
        "constant" => return Ok(BoundaryMap::Constant(IdealPoint::axis(n, 0))),
        _ => match arg.split_once(':') {
            Some(("planted", path)) => MapSpec::Planted { matrix: read_json(Path::new(path))? },
            Some(("spec", path)) => read_json(Path::new(path))?,
            _ => return Err(CliError::usage("--map", format!("unrecognised map `{arg}`"))),
        },
    };
    let phi = make_boundary_map(&spec)?;
    let dim = map_dim(&phi);
    if dim.is_some_and(|d| d != n) {
        return Err(hyprig::Error::DimensionMismatch { expected: n, got: dim.unwrap_or(0) }.into());
    }
    Ok(phi)
}

fn map_dim(phi: &BoundaryMap<f64>) -> Option<usize> {
    match phi {
        BoundaryMap::Planted(g) => Some(g.dim()),
        BoundaryMap::Perturbed { g, .. } => Some(g.dim()),
        BoundaryMap::Tabulated { samples, .. } => samples.first().map(|s| s.0.dim()),
        BoundaryMap::Constant(p) => Some(p.dim()),
        BoundaryMap::Piecewise { positive, .. } => Some(positive.dim()),
        BoundaryMap::Composed { outer, .. } => Some(outer.dim()),
    }
}
