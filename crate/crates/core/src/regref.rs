//! Regular ideal simplices, their face reflections and reflection orbits.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypcore::{hyperplane_through, reflect_in, IdealPoint, Isometry, Vertex};
use crate::scalar::Real;
use crate::volcocycle::{orientation_sign, regularity_deviation, IdealSimplex};

/// An ideal simplex known to be regular, with its orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct RegularSimplex<T> {
    base: IdealSimplex<T>,
    orientation: i8,
}

impl<T: Real> RegularSimplex<T> {
    /// Checks regularity at `tol` and records the orientation.
    pub fn new(base: IdealSimplex<T>, tol: T) -> Result<Self> {
        let deviation = regularity_deviation(&base, tol)?;
        if !(deviation <= tol) {
            return Err(Error::NotRegular { deviation: deviation.as_f64() });
        }
        let orientation = orientation_sign(&base);
        if orientation == 0 {
            return Err(Error::NotRegular { deviation: f64::INFINITY });
        }
        Ok(Self { base, orientation })
    }

    pub fn simplex(&self) -> &IdealSimplex<T> {
        &self.base
    }

    pub fn into_simplex(self) -> IdealSimplex<T> {
        self.base
    }

    pub fn vertices(&self) -> &[IdealPoint<T>] {
        self.base.vertices()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// `g·s`; isometries preserve regularity and multiply orientation by `ε(g)`.
    pub fn transformed(&self, g: &Isometry<T>) -> Result<Self> {
        Ok(Self { base: self.base.transformed(g)?, orientation: self.orientation * g.sign() })
    }
}

/// The regular ideal simplex inscribed in `S^{n−1}` as a regular Euclidean
/// simplex: vertex 0 is `e₁`, vertices `0..n` come from the Cholesky factor of
/// the Gram matrix (`1` on the diagonal, `−1/n` off it) and the last vertex is
/// minus their sum. The last two vertices are swapped if needed to reach the
/// requested orientation.
pub fn reference_regular<T: Real>(n: usize, orientation: i8) -> RegularSimplex<T> {
    assert!(n >= 2, "regular simplices need n ≥ 2");
    let off = -1.0 / n as f64;
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let g = if i == j { 1.0 } else { off };
            let s: f64 = (0..j).map(|k| rows[i][k] * rows[j][k]).sum();
            if i == j {
                rows[i][i] = (g - s).sqrt();
            } else {
                rows[i][j] = (g - s) / rows[j][j];
            }
        }
    }
    let last: Vec<f64> = (0..n).map(|k| -rows.iter().map(|r| r[k]).sum::<f64>()).collect();
    rows.push(last);
    let mut vertices: Vec<IdealPoint<T>> = rows
        .into_iter()
        .map(|r| IdealPoint::from_direction(r.into_iter().map(T::lit).collect()).expect("unit"))
        .collect();
    let mut base = IdealSimplex::new(vertices.clone()).expect("n + 1 vertices");
    if orientation_sign(&base) != orientation.signum() && orientation != 0 {
        vertices.swap(n - 1, n);
        base = IdealSimplex::new(vertices).expect("n + 1 vertices");
    }
    let orientation = orientation_sign(&base);
    RegularSimplex { base, orientation }
}

/// Reflections in the `n + 1` faces; entry `i` fixes every vertex but `i`.
pub fn face_reflections<T: Real>(s: &RegularSimplex<T>) -> Result<Vec<Isometry<T>>> {
    let v = s.vertices();
    (0..v.len())
        .map(|i| {
            let face: Vec<Vertex<T>> = v
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| Vertex::Ideal(p.clone()))
                .collect();
            let h = hyperplane_through(&face).map_err(|_| Error::DegenerateFace(i))?;
            Ok(reflect_in(&h))
        })
        .collect()
}

/// Face indices `letters` and the isometry `r_{l1} ∘ r_{l2} ∘ ⋯` they resolve to,
/// `r_i` being the face reflections of the starting simplex. Reflecting the
/// current simplex `g·s` in its own face `i` is `(g r_i g⁻¹)`, so walking the
/// word face by face lands on `resolved · s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct ReflectionWord<T> {
    pub letters: Vec<usize>,
    pub resolved: Isometry<T>,
}

impl<T: Real> ReflectionWord<T> {
    pub fn empty(n: usize) -> Self {
        Self { letters: Vec::new(), resolved: Isometry::identity(n) }
    }

    /// Appends a letter, re-orthogonalizing every 8 letters.
    pub fn push(&self, letter: usize, reflections: &[Isometry<T>]) -> Self {
        let mut letters = self.letters.clone();
        letters.push(letter);
        let mut resolved = self.resolved.compose(&reflections[letter]);
        if letters.len().is_multiple_of(8) {
            resolved = resolved.repaired();
        }
        Self { letters, resolved }
    }
}

/// One simplex of a reflection orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct OrbitEntry<T> {
    pub word: ReflectionWord<T>,
    pub simplex: RegularSimplex<T>,
    /// Index of the simplex this one was reflected from, with the face used.
    pub parent: Option<(usize, usize)>,
    /// Indices into [`Orbit::points`] of the vertices, in vertex order.
    pub vertex_ids: Vec<usize>,
}

/// Breadth-first reflection orbit of a regular simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Orbit<T> {
    pub depth: usize,
    pub entries: Vec<OrbitEntry<T>>,
    /// Distinct vertex points `∪ᵢ Λ ξᵢ` reached so far.
    pub points: Vec<IdealPoint<T>>,
}

/// Deduplicates boundary points on a `1e−7` grid with a `1e−9` recheck that
/// also looks in neighbouring grid cells.
struct PointIndex<T> {
    cells: HashMap<Vec<i64>, Vec<usize>>,
    points: Vec<IdealPoint<T>>,
}

const GRID: f64 = 1e-7;
const MATCH: f64 = 1e-9;

impl<T: Real> PointIndex<T> {
    fn new() -> Self {
        Self { cells: HashMap::new(), points: Vec::new() }
    }

    fn key(p: &IdealPoint<T>) -> Vec<i64> {
        p.coords().iter().map(|c| (c.as_f64() / GRID).round() as i64).collect()
    }

    fn find(&self, p: &IdealPoint<T>) -> Option<usize> {
        let key = Self::key(p);
        let d = key.len();
        for code in 0..3usize.pow(d as u32) {
            let mut rem = code;
            let probe: Vec<i64> = key
                .iter()
                .map(|&k| {
                    let off = (rem % 3) as i64 - 1;
                    rem /= 3;
                    k + off
                })
                .collect();
            if let Some(ids) = self.cells.get(&probe) {
                if let Some(&i) = ids.iter().find(|&&i| self.points[i].chord(p).as_f64() < MATCH) {
                    return Some(i);
                }
            }
        }
        None
    }

    fn insert(&mut self, p: &IdealPoint<T>) -> usize {
        if let Some(i) = self.find(p) {
            return i;
        }
        let i = self.points.len();
        self.cells.entry(Self::key(p)).or_default().push(i);
        self.points.push(p.clone());
        i
    }
}

/// `(parent, letter, word, image)` of a candidate orbit entry.
type Child<T> = (usize, usize, ReflectionWord<T>, Result<RegularSimplex<T>>);

/// Enumerates the reflection orbit of `s` to word length `depth`.
///
/// Every new simplex is the reflection of its parent in one of the parent's
/// faces, never the face just crossed. Simplices reached by several words are
/// kept once (first word in breadth-first order). Fails with
/// [`Error::BudgetExceeded`] when more than `budget` simplices would be kept.
pub fn orbit<T: Real>(s: &RegularSimplex<T>, depth: usize, budget: usize) -> Result<Orbit<T>> {
    let n = s.dim();
    let reflections = face_reflections(s)?;
    let mut index = PointIndex::new();
    let ids: Vec<usize> = s.vertices().iter().map(|p| index.insert(p)).collect();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    seen.insert(sorted, 0);
    let mut entries = vec![OrbitEntry {
        word: ReflectionWord::empty(n),
        simplex: s.clone(),
        parent: None,
        vertex_ids: ids,
    }];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let children: Vec<Child<T>> = frontier
            .par_iter()
            .flat_map_iter(|&p| {
                let parent = &entries[p];
                let last = parent.word.letters.last().copied();
                let refl = &reflections;
                (0..=n).filter(move |&i| Some(i) != last).map(move |i| {
                    let word = parent.word.push(i, refl);
                    let simplex = s.transformed(&word.resolved);
                    (p, i, word, simplex)
                })
            })
            .collect();
        let mut next = Vec::new();
        for (p, face, word, simplex) in children {
            let simplex = simplex?;
            let ids: Vec<usize> = simplex.vertices().iter().map(|v| index.insert(v)).collect();
            let mut key = ids.clone();
            key.sort_unstable();
            if seen.contains_key(&key) {
                continue;
            }
            if entries.len() >= budget {
                return Err(Error::BudgetExceeded(budget));
            }
            seen.insert(key, entries.len());
            next.push(entries.len());
            entries.push(OrbitEntry { word, simplex, parent: Some((p, face)), vertex_ids: ids });
        }
        frontier = next;
    }
    Ok(Orbit { depth, entries, points: index.points })
}

/// Result of [`density_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityProbe {
    pub best_word: Vec<usize>,
    pub distance: f64,
    /// Best distance among words of length `≤ L` for each `L` up to the depth.
    pub by_length: Vec<f64>,
    pub words_examined: usize,
}

/// Closest word (in matrix sup norm) to `target` among products of the face
/// reflections of the reference regular simplex of length `≤ depth` without
/// immediate repetitions.
pub fn density_probe<T: Real>(
    n: usize,
    target: &Isometry<T>,
    depth: usize,
    budget: usize,
) -> Result<DensityProbe> {
    if target.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: target.dim() });
    }
    let reflections = face_reflections(&reference_regular::<T>(n, 1))?;
    let mut total = 1usize;
    let mut level = 1usize;
    for l in 0..depth {
        level = level.saturating_mul(if l == 0 { n + 1 } else { n });
        total = total.saturating_add(level);
    }
    if total > budget {
        return Err(Error::BudgetExceeded(budget));
    }
    let mut by_length = vec![f64::INFINITY; depth + 1];
    let mut best = (target.distance(&Isometry::identity(n)).as_f64(), Vec::new());
    by_length[0] = best.0;
    let mut frontier = vec![ReflectionWord::empty(n)];
    for slot in by_length.iter_mut().skip(1) {
        let next: Vec<ReflectionWord<T>> = frontier
            .par_iter()
            .flat_map_iter(|w| {
                let last = w.letters.last().copied();
                let refl = &reflections;
                (0..=n).filter(move |&i| Some(i) != last).map(move |i| w.push(i, refl))
            })
            .collect();
        for w in &next {
            let d = target.distance(&w.resolved).as_f64();
            if d < best.0 {
                best = (d, w.letters.clone());
            }
        }
        *slot = best.0;
        frontier = next;
    }
    Ok(DensityProbe { best_word: best.1, distance: best.0, by_length, words_examined: total })
}

/// Resolves a word of face letters against the reference simplex reflections.
pub fn resolve_word<T: Real>(n: usize, letters: &[usize]) -> Result<ReflectionWord<T>> {
    let reflections = face_reflections(&reference_regular::<T>(n, 1))?;
    let mut w = ReflectionWord::empty(n);
    for &l in letters {
        if l > n {
            return Err(Error::InvalidInput(format!("face index {l} > {n}")));
        }
        w = w.push(l, &reflections);
    }
    Ok(w)
}
