use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypcore::{hyperplane_through, minkowski_dot, IdealPoint, Isometry, Vertex};
use crate::linalg::Matrix;
use crate::regref::reference_regular;
use crate::rigidity::isometry_between;
use crate::scalar::Real;
use crate::volcocycle::{orientation_sign, reference_quad, regularity_deviation, volume, IdealSimplex};

/// Environment variable naming a directory searched for `<name>.json` before
/// the built-in presets.
pub const PRESET_DIR_ENV: &str = "HYPRIG_PRESET_DIR";

const BUILTIN: &[(&str, &str)] = &[
    ("figure_eight_3d", include_str!("../../presets/figure_eight_3d.json")),
    ("test_reflection_2d", include_str!("../../presets/test_reflection_2d.json")),
];

const CHECK_TOL: f64 = 1e-8;
const REGULAR_TOL: f64 = 1e-9;
const FLOOR_REL_TOL: f64 = 1e-6;

/// On-disk preset. Nothing in it is trusted until [`load_preset_from_file`]
/// has checked it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresetFile {
    pub name: String,
    pub n: usize,
    pub generators: Vec<Matrix<f64>>,
    /// Words in the generators, 1-based; `-k` is the inverse of generator `k`.
    pub relators: Vec<Vec<i64>>,
    /// Vertex arrays of the cells, points of `S^{n−1}`.
    pub cells: Vec<Vec<Vec<f64>>>,
    pub face_pairings: Vec<FacePairing>,
    pub cusps: Vec<CuspData>,
}

/// The element `word` (product of generators, left to right) carries the
/// face opposite vertex `face` of `cell` onto the face opposite `to_face` of
/// `to_cell`. An empty word marks a face shared by two cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacePairing {
    pub cell: usize,
    pub face: usize,
    pub word: Vec<i64>,
    pub to_cell: usize,
    pub to_face: usize,
}

/// Smallest horoball height at which the cusp's truncation horoballs in
/// every cell are pairwise disjoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspData {
    pub floor_height: f64,
}

/// A verified lattice `Γ < Isom⁺(ℍⁿ)` with a fundamental domain triangulated
/// by regular ideal simplices.
#[derive(Clone, Debug)]
pub struct LatticePreset<T> {
    pub name: String,
    pub n: usize,
    pub generators: Vec<Isometry<T>>,
    pub relators: Vec<Vec<i64>>,
    pub cells: Vec<IdealSimplex<T>>,
    pub face_pairings: Vec<FacePairing>,
    pub cusps: Vec<CuspData>,
    /// `cusp_of[c][v]`: the cusp containing vertex `v` of cell `c`.
    pub cusp_of: Vec<Vec<usize>>,
    covolume: f64,
    cell_volumes: Vec<f64>,
    /// Per cell and vertex, the chart taking the cell to standard position
    /// with that vertex at ∞.
    pub(crate) charts: Vec<Vec<Isometry<T>>>,
    /// Per cell and vertex `v`, the null vector `L` with `−⟨x, L⟩ = 1/height`
    /// in the chart putting `v` at ∞.
    pub(crate) horo: Vec<Vec<Vec<T>>>,
}

impl<T: Real> LatticePreset<T> {
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn cell_volumes(&self) -> &[f64] {
        &self.cell_volumes
    }

    /// Largest cusp floor; truncation heights must exceed it.
    pub fn floor(&self) -> f64 {
        self.cusps.iter().map(|c| c.floor_height).fold(1.0, f64::max)
    }

    /// Resolves a generator word, left to right, `-k` for inverses.
    pub fn word(&self, word: &[i64]) -> Result<Isometry<T>> {
        resolve(&self.generators, self.n, word)
    }
}

/// Names of the built-in presets.
pub fn list_presets() -> Vec<&'static str> {
    BUILTIN.iter().map(|(name, _)| *name).collect()
}

/// Loads a preset by name, from `$HYPRIG_PRESET_DIR/<name>.json` when that
/// file exists and from the built-in set otherwise, and verifies it.
pub fn load_preset<T: Real>(name: &str) -> Result<LatticePreset<T>> {
    let text = match std::env::var_os(PRESET_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{name}.json"))) {
        Some(path) if path.is_file() => {
            std::fs::read_to_string(&path).map_err(|e| Error::Io(e.to_string()))?
        }
        _ => BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))?,
    };
    let file: PresetFile =
        serde_json::from_str(&text).map_err(|e| corrupt(name, format!("malformed JSON: {e}")))?;
    load_preset_from_file(&file)
}

fn corrupt(name: &str, reason: impl Into<String>) -> Error {
    Error::PresetCorrupt { name: name.to_string(), reason: reason.into() }
}

/// `Σ |Vol_n(cell)|`.
pub fn cells_covolume<T: Real>(cells: &[IdealSimplex<T>]) -> Result<f64> {
    let quad = reference_quad();
    let mut total = 0.0;
    for c in cells {
        total += volume(c, &quad)?.value.as_f64().abs();
    }
    Ok(total)
}

fn resolve<T: Real>(gens: &[Isometry<T>], n: usize, word: &[i64]) -> Result<Isometry<T>> {
    let mut g = Isometry::identity(n);
    for (k, &letter) in word.iter().enumerate() {
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx > gens.len() {
            return Err(Error::InvalidInput(format!("generator index {letter} out of range")));
        }
        let h = &gens[idx - 1];
        g = if letter > 0 { g.compose(h) } else { g.compose(&h.inverse()) };
        if k % 8 == 7 {
            g = g.repaired();
        }
    }
    Ok(g)
}

/// Verifies a parsed preset: Lorentz, orientation-preserving generators;
/// relators equal to the identity; regular, nondegenerate cells; face
/// pairings that carry faces onto faces, glue cells from opposite sides and
/// come in inverse pairs; a cusp count matching the vertex classes; and cusp
/// floors that agree with the recomputed ones.
pub fn load_preset_from_file<T: Real>(file: &PresetFile) -> Result<LatticePreset<T>> {
    let verified = verify(file)?;
    Ok(verified.cast())
}

fn verify(file: &PresetFile) -> Result<LatticePreset<f64>> {
    let name = file.name.as_str();
    let n = file.n;
    let bad = |reason: String| corrupt(name, reason);
    if n < 2 {
        return Err(bad(format!("dimension {n} < 2")));
    }
    let mut generators = Vec::with_capacity(file.generators.len());
    for (i, m) in file.generators.iter().enumerate() {
        if m.rows() != n + 1 || !m.is_square() {
            return Err(bad(format!("generator {} is not {}×{}", i + 1, n + 1, n + 1)));
        }
        let g = Isometry::new(m.clone()).map_err(|e| bad(format!("generator {}: {e}", i + 1)))?;
        if g.sign() != 1 {
            return Err(bad(format!("generator {} reverses orientation", i + 1)));
        }
        generators.push(g);
    }
    let id = Isometry::<f64>::identity(n);
    for (i, rel) in file.relators.iter().enumerate() {
        let g = resolve(&generators, n, rel).map_err(|e| bad(format!("relator {}: {e}", i + 1)))?;
        let dev = g.distance(&id);
        if !(dev <= CHECK_TOL) {
            return Err(bad(format!("relator {} deviates from the identity by {dev:e}", i + 1)));
        }
    }
    if file.cells.is_empty() {
        return Err(bad("no cells".into()));
    }
    let mut cells = Vec::with_capacity(file.cells.len());
    for (c, verts) in file.cells.iter().enumerate() {
        let s = IdealSimplex::from_coords(verts.clone()).map_err(|e| bad(format!("cell {c}: {e}")))?;
        if s.dim() != n {
            return Err(bad(format!("cell {c} has dimension {}", s.dim())));
        }
        let dev = regularity_deviation(&s, REGULAR_TOL).map_err(|e| bad(format!("cell {c}: {e}")))?;
        if !(dev <= REGULAR_TOL) {
            return Err(bad(format!("cell {c} is not regular (deviation {dev:e})")));
        }
        cells.push(s);
    }
    check_pairings(file, &generators, &cells).map_err(bad)?;
    let cusp_of = cusp_classes(file, &generators, &cells).map_err(bad)?;
    let n_cusps = cusp_of.iter().flatten().max().map_or(0, |m| m + 1);
    if n_cusps != file.cusps.len() {
        return Err(bad(format!("{} cusp entries for {n_cusps} cusps", file.cusps.len())));
    }

    let quad = reference_quad();
    let mut cell_volumes = Vec::with_capacity(cells.len());
    let v_max = crate::volcocycle::v_n(n)?;
    for (c, s) in cells.iter().enumerate() {
        let v = volume(s, &quad)?.value.abs();
        if !(v > 0.0) || v > v_max.value * (1.0 + 1e-9) {
            return Err(bad(format!("cell {c} has volume {v}, outside (0, v_n]")));
        }
        cell_volumes.push(v);
    }
    let covolume: f64 = cell_volumes.iter().sum();

    let (charts, horo) = build_charts(&cells).map_err(|e| bad(format!("cusp charts: {e}")))?;
    let floors = cusp_floors(&horo, &cusp_of, n_cusps);
    for (k, (stored, computed)) in file.cusps.iter().zip(&floors).enumerate() {
        if !((stored.floor_height - computed).abs() <= FLOOR_REL_TOL * computed.max(1.0)) {
            return Err(bad(format!(
                "cusp {k} floor_height {} does not match the computed {computed}",
                stored.floor_height
            )));
        }
    }

    Ok(LatticePreset {
        name: file.name.clone(),
        n,
        generators,
        relators: file.relators.clone(),
        cells,
        face_pairings: file.face_pairings.clone(),
        cusps: floors.into_iter().map(|floor_height| CuspData { floor_height }).collect(),
        cusp_of,
        covolume,
        cell_volumes,
        charts,
        horo,
    })
}

fn face_vertices(s: &IdealSimplex<f64>, face: usize) -> Vec<&IdealPoint<f64>> {
    s.vertices().iter().enumerate().filter(|&(i, _)| i != face).map(|(_, v)| v).collect()
}

/// For each vertex of the source face, the index in the target cell of its
/// image under the pairing.
fn face_map(
    p: &FacePairing,
    g: &Isometry<f64>,
    cells: &[IdealSimplex<f64>],
) -> std::result::Result<Vec<(usize, usize)>, String> {
    let src = &cells[p.cell];
    let dst = &cells[p.to_cell];
    let mut pairs = Vec::new();
    for (i, v) in src.vertices().iter().enumerate() {
        if i == p.face {
            continue;
        }
        let img = g.act_ideal(v).map_err(|e| e.to_string())?;
        let hit = dst
            .vertices()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != p.to_face)
            .map(|(j, w)| (j, img.chord(w)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("faces are nonempty");
        if !(hit.1 <= CHECK_TOL) {
            return Err(format!(
                "pairing of cell {} face {} misses the target face by {:e}",
                p.cell, p.face, hit.1
            ));
        }
        pairs.push((i, hit.0));
    }
    let mut targets: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() != pairs.len() {
        return Err(format!("pairing of cell {} face {} is not injective", p.cell, p.face));
    }
    Ok(pairs)
}

fn check_pairings(
    file: &PresetFile,
    gens: &[Isometry<f64>],
    cells: &[IdealSimplex<f64>],
) -> std::result::Result<(), String> {
    let n = file.n;
    let mut seen = vec![vec![false; n + 1]; cells.len()];
    for p in &file.face_pairings {
        if p.cell >= cells.len() || p.to_cell >= cells.len() || p.face > n || p.to_face > n {
            return Err(format!("pairing {p:?} refers to a missing cell or face"));
        }
        if std::mem::replace(&mut seen[p.cell][p.face], true) {
            return Err(format!("cell {} face {} is paired twice", p.cell, p.face));
        }
        let g = resolve(gens, n, &p.word).map_err(|e| e.to_string())?;
        face_map(p, &g, cells)?;
        // The image of the source cell must sit on the far side of the target face.
        let face: Vec<Vertex<f64>> =
            face_vertices(&cells[p.to_cell], p.to_face).into_iter().cloned().map(Vertex::Ideal).collect();
        let h = hyperplane_through(&face)
            .map_err(|e| format!("face {} of cell {}: {e}", p.to_face, p.to_cell))?;
        let moved = g.act_ideal(cells[p.cell].vertex(p.face)).map_err(|e| e.to_string())?;
        let a = h.evaluate(&Vertex::Ideal(moved));
        let b = h.evaluate(&Vertex::Ideal(cells[p.to_cell].vertex(p.to_face).clone()));
        if !(a * b < 0.0) {
            return Err(format!(
                "pairing of cell {} face {} folds the cells onto each other",
                p.cell, p.face
            ));
        }
        let back = file
            .face_pairings
            .iter()
            .find(|q| q.cell == p.to_cell && q.face == p.to_face)
            .ok_or_else(|| format!("cell {} face {} has no pairing", p.to_cell, p.to_face))?;
        if back.to_cell != p.cell || back.to_face != p.face {
            return Err(format!("pairings of cell {} face {} are not mutually inverse", p.cell, p.face));
        }
        let round = resolve(gens, n, &back.word).map_err(|e| e.to_string())?.compose(&g);
        let dev = round.distance(&Isometry::identity(n));
        if !(dev <= CHECK_TOL * g.matrix().sup_norm().max(1.0).powi(2)) {
            return Err(format!(
                "pairing words of cell {} face {} are not inverse ({dev:e})",
                p.cell, p.face
            ));
        }
    }
    if let Some((c, f)) =
        seen.iter().enumerate().find_map(|(c, row)| row.iter().position(|s| !s).map(|f| (c, f)))
    {
        return Err(format!("cell {c} face {f} has no pairing"));
    }
    Ok(())
}

fn cusp_classes(
    file: &PresetFile,
    gens: &[Isometry<f64>],
    cells: &[IdealSimplex<f64>],
) -> std::result::Result<Vec<Vec<usize>>, String> {
    let n1 = file.n + 1;
    let mut parent: Vec<usize> = (0..cells.len() * n1).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for p in &file.face_pairings {
        let g = resolve(gens, file.n, &p.word).map_err(|e| e.to_string())?;
        for (i, j) in face_map(p, &g, cells)? {
            let a = root(&mut parent, p.cell * n1 + i);
            let b = root(&mut parent, p.to_cell * n1 + j);
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = std::collections::HashMap::new();
    let mut out = vec![vec![0; n1]; cells.len()];
    for (c, row) in out.iter_mut().enumerate() {
        for (v, slot) in row.iter_mut().enumerate() {
            let r = root(&mut parent, c * n1 + v);
            let next = label.len();
            *slot = *label.entry(r).or_insert(next);
        }
    }
    Ok(out)
}

/// The cell with vertex 0 at ∞ (the north pole) and the rest on the equator,
/// where they form a regular simplex centred at the origin of `R^{n−1}`.
pub(crate) fn standard_cell(n: usize) -> IdealSimplex<f64> {
    let equator: Vec<Vec<f64>> = if n == 2 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        reference_regular::<f64>(n - 1, 1).vertices().iter().map(|v| v.coords().to_vec()).collect()
    };
    let mut verts = vec![IdealPoint::axis(n, n - 1)];
    for q in equator {
        let mut c = q;
        c.push(0.0);
        verts.push(IdealPoint::new(c).expect("equator point"));
    }
    IdealSimplex::new(verts).expect("n + 1 distinct vertices")
}

type Charts = (Vec<Vec<Isometry<f64>>>, Vec<Vec<Vec<f64>>>);

fn build_charts(cells: &[IdealSimplex<f64>]) -> Result<Charts> {
    let n = cells[0].dim();
    let standard = standard_cell(n);
    let mirrored = standard.swapped(1, 2);
    let infinity = IdealPoint::<f64>::axis(n, n - 1).null_lift();
    let mut charts = Vec::with_capacity(cells.len());
    let mut horo = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut row = Vec::with_capacity(n + 1);
        let mut lifts = Vec::with_capacity(n + 1);
        for v in 0..=n {
            let order: Vec<IdealPoint<f64>> = std::iter::once(v)
                .chain((0..=n).filter(|&i| i != v))
                .map(|i| cell.vertex(i).clone())
                .collect();
            let moved = IdealSimplex::new(order)?;
            let target =
                if orientation_sign(&moved) == orientation_sign(&standard) { &standard } else { &mirrored };
            let a = isometry_between(&moved, target)?;
            lifts.push(a.inverse().act_vector(&infinity)?);
            row.push(a);
        }
        charts.push(row);
        horo.push(lifts);
    }
    Ok((charts, horo))
}

/// Horoballs at `vᵢ`, `vⱼ` of height `T` in their own charts touch when
/// `T² = −2/⟨Lᵢ, Lⱼ⟩`; the floor of a cusp is the largest such `T` over the
/// pairs involving one of its vertices.
fn cusp_floors(horo: &[Vec<Vec<f64>>], cusp_of: &[Vec<usize>], n_cusps: usize) -> Vec<f64> {
    let mut floors = vec![0.0_f64; n_cusps];
    for (lifts, cusps) in horo.iter().zip(cusp_of) {
        for i in 0..lifts.len() {
            for j in i + 1..lifts.len() {
                let t = (-2.0 / minkowski_dot(&lifts[i], &lifts[j])).sqrt();
                for k in [cusps[i], cusps[j]] {
                    floors[k] = floors[k].max(t);
                }
            }
        }
    }
    floors
}

impl LatticePreset<f64> {
    fn cast<T: Real>(self) -> LatticePreset<T> {
        let iso = |g: &Isometry<f64>| {
            let m = g.matrix();
            Isometry::new(Matrix::from_fn(m.rows(), m.cols(), |i, j| T::lit(m[(i, j)])))
                .expect("verified isometry survives rounding")
        };
        let vecf = |v: &[f64]| v.iter().map(|&x| T::lit(x)).collect::<Vec<T>>();
        LatticePreset {
            generators: self.generators.iter().map(iso).collect(),
            cells: self
                .cells
                .iter()
                .map(|s| {
                    IdealSimplex::new(
                        s.vertices()
                            .iter()
                            .map(|v| IdealPoint::from_direction(vecf(v.coords())).expect("unit"))
                            .collect(),
                    )
                    .expect("verified cell")
                })
                .collect(),
            charts: self.charts.iter().map(|row| row.iter().map(iso).collect()).collect(),
            horo: self.horo.iter().map(|row| row.iter().map(|v| vecf(v)).collect()).collect(),
            name: self.name,
            n: self.n,
            relators: self.relators,
            face_pairings: self.face_pairings,
            cusps: self.cusps,
            cusp_of: self.cusp_of,
            covolume: self.covolume,
            cell_volumes: self.cell_volumes,
        }
    }
}
