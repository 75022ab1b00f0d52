use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimplicialError};
use crate::Coord;

/// Vertex indices in geometrically positive order plus the sign of the
/// manifold orientation relative to that order.
///
/// Top simplices are positive when their signed volume is positive (for
/// intervals: increasing coordinate). Boundary edges of planar regions have no
/// intrinsic positive order and are stored in their induced direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub orientation: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TriangulationFile", into = "TriangulationFile")]
pub struct Triangulation {
    dimension: usize,
    vertices: Vec<Coord>,
    simplices: Vec<Simplex>,
    boundary: Vec<Simplex>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TriangulationFile {
    dimension: usize,
    vertices: Vec<Coord>,
    simplices: Vec<Vec<usize>>,
    orientations: Vec<i8>,
    boundary: Vec<Vec<usize>>,
    boundary_orientations: Vec<i8>,
}

impl TryFrom<TriangulationFile> for Triangulation {
    type Error = SimplicialError;

    fn try_from(f: TriangulationFile) -> Result<Self> {
        if f.simplices.len() != f.orientations.len() || f.boundary.len() != f.boundary_orientations.len() {
            return Err(SimplicialError::Invalid("orientation list length differs from simplex list".into()));
        }
        let zip = |s: Vec<Vec<usize>>, o: Vec<i8>| -> Vec<Simplex> {
            s.into_iter().zip(o).map(|(vertices, orientation)| Simplex { vertices, orientation }).collect()
        };
        Triangulation::new(
            f.dimension,
            f.vertices,
            zip(f.simplices, f.orientations),
            zip(f.boundary, f.boundary_orientations),
        )
    }
}

impl From<Triangulation> for TriangulationFile {
    fn from(t: Triangulation) -> Self {
        let split = |s: Vec<Simplex>| -> (Vec<Vec<usize>>, Vec<i8>) {
            s.into_iter().map(|x| (x.vertices, x.orientation)).unzip()
        };
        let (simplices, orientations) = split(t.simplices);
        let (boundary, boundary_orientations) = split(t.boundary);
        Self { dimension: t.dimension, vertices: t.vertices, simplices, orientations, boundary, boundary_orientations }
    }
}

/// Signed volume of the simplex spanned by `pts` (length ≤ 3).
pub(crate) fn signed_volume(pts: &[Coord]) -> f64 {
    match pts.len() {
        1 => 1.0,
        2 => pts[1][0] - pts[0][0],
        3 => {
            0.5 * ((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1])
                - (pts[1][1] - pts[0][1]) * (pts[2][0] - pts[0][0]))
        }
        _ => f64::NAN,
    }
}

fn dist(a: Coord, b: Coord) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

impl Triangulation {
    /// Validates geometry, orientation consistency and the boundary list.
    pub fn new(
        dimension: usize,
        vertices: Vec<Coord>,
        simplices: Vec<Simplex>,
        boundary: Vec<Simplex>,
    ) -> Result<Self> {
        let t = Self { dimension, vertices, simplices, boundary };
        t.validate()?;
        Ok(t)
    }

    /// Builds from tuples listed in manifold-orientation order; each tuple is
    /// reordered to positive geometric order and flagged accordingly.
    pub fn from_oriented(
        dimension: usize,
        vertices: Vec<Coord>,
        tuples: &[Vec<usize>],
        boundary: Vec<Simplex>,
    ) -> Result<Self> {
        let simplices = tuples
            .iter()
            .map(|t| {
                let pts: Vec<Coord> = t.iter().map(|&i| vertices.get(i).copied().unwrap_or([f64::NAN; 2])).collect();
                let mut v = t.clone();
                if signed_volume(&pts) < 0.0 {
                    v.swap(0, 1);
                    Simplex { vertices: v, orientation: -1 }
                } else {
                    Simplex { vertices: v, orientation: 1 }
                }
            })
            .collect();
        Self::new(dimension, vertices, simplices, boundary)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[Coord] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn boundary(&self) -> &[Simplex] {
        &self.boundary
    }

    pub fn points(&self, s: &Simplex) -> Vec<Coord> {
        s.vertices.iter().map(|&i| self.vertices[i]).collect()
    }

    /// Unsigned volume, compensated summation.
    pub fn total_volume(&self) -> f64 {
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for s in &self.simplices {
            let v = signed_volume(&self.points(s)).abs();
            let t = sum + v;
            comp += if sum.abs() >= v { (sum - t) + v } else { (v - t) + sum };
            sum = t;
        }
        sum + comp
    }

    pub fn max_diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for s in &self.simplices {
            let p = self.points(s);
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    d = d.max(dist(p[i], p[j]));
                }
            }
        }
        d
    }

    fn validate(&self) -> Result<()> {
        let n = self.dimension;
        if !(1..=2).contains(&n) {
            return Err(SimplicialError::Dimension(n));
        }
        if self.vertices.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
            return Err(SimplicialError::Invalid("non-finite vertex".into()));
        }
        if n == 1 && self.vertices.iter().any(|v| v[1] != 0.0) {
            return Err(SimplicialError::Invalid("one-dimensional vertices must have zero second coordinate".into()));
        }
        if self.simplices.is_empty() {
            return Err(SimplicialError::Invalid("no simplices".into()));
        }
        let check_indices = |s: &Simplex, len: usize| -> Result<()> {
            if s.vertices.len() != len || s.vertices.iter().any(|&i| i >= self.vertices.len()) {
                return Err(SimplicialError::Invalid(format!("bad vertex tuple {:?}", s.vertices)));
            }
            if s.orientation != 1 && s.orientation != -1 {
                return Err(SimplicialError::Orientation(format!("flag {} is not ±1", s.orientation)));
            }
            Ok(())
        };
        let scale = self.max_diameter().max(f64::MIN_POSITIVE);
        // induced orientation of each face: key is the sorted face, value the
        // accumulated signed incidence and the count
        let mut faces: HashMap<Vec<usize>, (i32, usize)> = HashMap::new();
        for (k, s) in self.simplices.iter().enumerate() {
            check_indices(s, n + 1)?;
            let vol = signed_volume(&self.points(s));
            if vol.abs() <= 1e-14 * scale.powi(n as i32) {
                return Err(SimplicialError::Degenerate(k));
            }
            if vol < 0.0 {
                return Err(SimplicialError::Orientation(format!("simplex {k} is not stored in positive order")));
            }
            for (key, sign) in induced_faces(&s.vertices) {
                let e = faces.entry(key).or_insert((0, 0));
                e.0 += sign * s.orientation as i32;
                e.1 += 1;
            }
        }
        let mut expected: HashMap<Vec<usize>, i32> = HashMap::new();
        for (key, (sign, count)) in faces {
            match count {
                1 => {
                    expected.insert(key, sign);
                }
                2 if sign == 0 => {}
                2 => {
                    return Err(SimplicialError::Orientation(format!("face {key:?} has matching induced orientations")))
                }
                _ => return Err(SimplicialError::Invalid(format!("face {key:?} is shared by {count} simplices"))),
            }
        }
        if self.boundary.len() != expected.len() {
            return Err(SimplicialError::Invalid(format!(
                "boundary lists {} faces, triangulation has {}",
                self.boundary.len(),
                expected.len()
            )));
        }
        for b in &self.boundary {
            check_indices(b, n)?;
            let (key, sign) = directed_key(&b.vertices);
            match expected.get(&key) {
                Some(&want) if want == sign * b.orientation as i32 => {}
                Some(_) => {
                    return Err(SimplicialError::Orientation(format!(
                        "boundary face {:?} has the wrong orientation",
                        b.vertices
                    )))
                }
                None => return Err(SimplicialError::Invalid(format!("{:?} is not a boundary face", b.vertices))),
            }
        }
        Ok(())
    }

    /// Uniform subdivision of `[a, b]`.
    pub fn interval(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 || b.is_nan() || a.is_nan() || b <= a {
            return Err(SimplicialError::Invalid(format!("interval [{a}, {b}] with {n} pieces")));
        }
        let pts: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
        Self::interval_from_points(pts)
    }

    /// Interval triangulation with the given breakpoints (sorted on input).
    pub fn interval_from_points(mut pts: Vec<f64>) -> Result<Self> {
        pts.sort_by(f64::total_cmp);
        if pts.len() < 2 {
            return Err(SimplicialError::Invalid("need at least two points".into()));
        }
        let m = pts.len();
        let vertices = pts.into_iter().map(|x| [x, 0.0]).collect();
        let simplices = (0..m - 1).map(|k| Simplex { vertices: vec![k, k + 1], orientation: 1 }).collect();
        let boundary =
            vec![Simplex { vertices: vec![0], orientation: -1 }, Simplex { vertices: vec![m - 1], orientation: 1 }];
        Self::new(1, vertices, simplices, boundary)
    }

    /// `[a, b]` cut at `cuts` uniformly random interior points.
    pub fn random_interval(a: f64, b: f64, cuts: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut pts = vec![a, b];
        pts.extend((0..cuts).map(|_| rng.gen_range(a..b)));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Self::interval_from_points(pts)
    }

    pub fn unit_square() -> Self {
        Self::rectangle(0.0, 1.0, 0.0, 1.0, 1, 1).expect("valid square")
    }

    /// `nx × ny` grid of squares on a rectangle, each cut along its diagonal.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || !(x1 > x0 && y1 > y0) {
            return Err(SimplicialError::Invalid("degenerate rectangle".into()));
        }
        let idx = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([x0 + (x1 - x0) * i as f64 / nx as f64, y0 + (y1 - y0) * j as f64 / ny as f64]);
            }
        }
        let mut simplices = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                simplices.push(Simplex { vertices: vec![a, b, c], orientation: 1 });
                simplices.push(Simplex { vertices: vec![a, c, d], orientation: 1 });
            }
        }
        let mut boundary = Vec::new();
        let mut push = |u: usize, v: usize| boundary.push(Simplex { vertices: vec![u, v], orientation: 1 });
        for i in 0..nx {
            push(idx(i, 0), idx(i + 1, 0));
        }
        for j in 0..ny {
            push(idx(nx, j), idx(nx, j + 1));
        }
        for i in (0..nx).rev() {
            push(idx(i + 1, ny), idx(i, ny));
        }
        for j in (0..ny).rev() {
            push(idx(0, j + 1), idx(0, j));
        }
        Self::new(2, vertices, simplices, boundary)
    }

    /// Regular `k`-gon inscribed in the circle of radius `r`, fanned from the
    /// center.
    pub fn polygon(k: usize, r: f64) -> Result<Self> {
        if k < 3 || r.is_nan() || r <= 0.0 {
            return Err(SimplicialError::Invalid(format!("polygon with {k} sides and radius {r}")));
        }
        let mut vertices = vec![[0.0, 0.0]];
        for j in 0..k {
            let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vertices.push([r * t.cos(), r * t.sin()]);
        }
        let next = |j: usize| 1 + (j + 1) % k;
        let simplices = (0..k).map(|j| Simplex { vertices: vec![0, 1 + j, next(j)], orientation: 1 }).collect();
        let boundary = (0..k).map(|j| Simplex { vertices: vec![1 + j, next(j)], orientation: 1 }).collect();
        Self::new(2, vertices, simplices, boundary)
    }

    /// Same simplices with the opposite manifold orientation.
    pub fn reversed(&self) -> Self {
        let flip = |s: &[Simplex]| {
            s.iter().map(|x| Simplex { vertices: x.vertices.clone(), orientation: -x.orientation }).collect()
        };
        Self {
            dimension: self.dimension,
            vertices: self.vertices.clone(),
            simplices: flip(&self.simplices),
            boundary: flip(&self.boundary),
        }
    }

    /// Union of two triangulations of disjoint regions.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(SimplicialError::Invalid("dimensions differ".into()));
        }
        let off = self.vertices.len();
        let shift = |s: &[Simplex]| -> Vec<Simplex> {
            s.iter()
                .map(|x| Simplex { vertices: x.vertices.iter().map(|i| i + off).collect(), orientation: x.orientation })
                .collect()
        };
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut simplices = self.simplices.clone();
        simplices.extend(shift(&other.simplices));
        let mut boundary = self.boundary.clone();
        boundary.extend(shift(&other.boundary));
        Self::new(self.dimension, vertices, simplices, boundary)
    }

    /// Random local refinements: point insertions inside simplices and
    /// splits of boundary faces. The region and its orientation are kept.
    pub fn refine_randomly(&self, steps: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut t = self.clone();
        for _ in 0..steps {
            let k = rng.gen_range(0..t.simplices.len());
            if t.dimension == 1 {
                let s = t.simplices[k].clone();
                let (a, b) = (t.vertices[s.vertices[0]], t.vertices[s.vertices[1]]);
                let x = a[0] + (b[0] - a[0]) * rng.gen_range(0.2..0.8);
                let m = t.vertices.len();
                t.vertices.push([x, 0.0]);
                t.simplices[k] = Simplex { vertices: vec![s.vertices[0], m], orientation: s.orientation };
                t.simplices.push(Simplex { vertices: vec![m, s.vertices[1]], orientation: s.orientation });
            } else if rng.gen_bool(0.6) {
                t.insert_point(k, rng);
            } else {
                let e = rng.gen_range(0..t.boundary.len());
                t.split_boundary_edge(e, rng.gen_range(0.2..0.8));
            }
        }
        t.validate()?;
        Ok(t)
    }

    fn insert_point(&mut self, k: usize, rng: &mut impl Rng) {
        let s = self.simplices[k].clone();
        let mut w = [rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0)];
        let tot: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= tot);
        let p = self.points(&s);
        let m = self.vertices.len();
        self.vertices
            .push([w[0] * p[0][0] + w[1] * p[1][0] + w[2] * p[2][0], w[0] * p[0][1] + w[1] * p[1][1] + w[2] * p[2][1]]);
        let [a, b, c] = [s.vertices[0], s.vertices[1], s.vertices[2]];
        let o = s.orientation;
        self.simplices[k] = Simplex { vertices: vec![a, b, m], orientation: o };
        self.simplices.push(Simplex { vertices: vec![b, c, m], orientation: o });
        self.simplices.push(Simplex { vertices: vec![c, a, m], orientation: o });
    }

    fn split_boundary_edge(&mut self, e: usize, t: f64) {
        let edge = self.boundary[e].clone();
        let (u, v) = (edge.vertices[0], edge.vertices[1]);
        let (pu, pv) = (self.vertices[u], self.vertices[v]);
        let m = self.vertices.len();
        self.vertices.push([pu[0] + t * (pv[0] - pu[0]), pu[1] + t * (pv[1] - pu[1])]);
        self.boundary[e] = Simplex { vertices: vec![u, m], orientation: edge.orientation };
        self.boundary.push(Simplex { vertices: vec![m, v], orientation: edge.orientation });
        let k = self
            .simplices
            .iter()
            .position(|s| s.vertices.contains(&u) && s.vertices.contains(&v))
            .expect("boundary edge lies on a simplex");
        let s = self.simplices[k].clone();
        // rotate so the split edge is (x0, x1) in positive order
        let r = (0..3).find(|&r| {
            let a = s.vertices[r];
            let b = s.vertices[(r + 1) % 3];
            (a == u && b == v) || (a == v && b == u)
        });
        let r = r.expect("edge of the simplex");
        let (a, b, c) = (s.vertices[r], s.vertices[(r + 1) % 3], s.vertices[(r + 2) % 3]);
        self.simplices[k] = Simplex { vertices: vec![a, m, c], orientation: s.orientation };
        self.simplices.push(Simplex { vertices: vec![m, b, c], orientation: s.orientation });
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Faces of a positively ordered simplex with their induced orientation
/// signs, keyed by sorted vertex sets.
fn induced_faces(v: &[usize]) -> Vec<(Vec<usize>, i32)> {
    (0..v.len())
        .map(|i| {
            let face: Vec<usize> = v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let (key, s) = directed_key(&face);
            (key, sign * s)
        })
        .collect()
}

/// Sorted key of a face together with the parity of the sorting permutation.
fn directed_key(face: &[usize]) -> (Vec<usize>, i32) {
    let mut key = face.to_vec();
    let mut sign = 1;
    for i in 0..key.len() {
        for j in 0..key.len() - 1 - i {
            if key[j] > key[j + 1] {
                key.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    (key, sign)
}

/// Standard barycentric subdivision. Each simplex is replaced by the
/// `(n+1)!` chains of its faces; barycenters of shared faces are shared.
pub fn barycentric_subdivide(tri: &Triangulation) -> Triangulation {
    let n = tri.dimension;
    let mut vertices = tri.vertices.clone();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut barycenter = |set: &[usize], vertices: &mut Vec<Coord>| -> usize {
        if set.len() == 1 {
            return set[0];
        }
        let mut key = set.to_vec();
        key.sort_unstable();
        *index.entry(key).or_insert_with(|| {
            let k = set.len() as f64;
            let c = set.iter().fold([0.0, 0.0], |acc, &i| [acc[0] + vertices[i][0] / k, acc[1] + vertices[i][1] / k]);
            vertices.push(c);
            vertices.len() - 1
        })
    };
    let perms = permutations(n + 1);
    let mut simplices = Vec::with_capacity(tri.simplices.len() * perms.len());
    for s in &tri.simplices {
        for p in &perms {
            let mut chain = Vec::with_capacity(n + 1);
            for len in 1..=n + 1 {
                let set: Vec<usize> = p[..len].iter().map(|&j| s.vertices[j]).collect();
                chain.push(barycenter(&set, &mut vertices));
            }
            let pts: Vec<Coord> = chain.iter().map(|&i| vertices[i]).collect();
            if signed_volume(&pts) < 0.0 {
                chain.swap(n - 1, n);
            }
            simplices.push(Simplex { vertices: chain, orientation: s.orientation });
        }
    }
    let mut boundary = Vec::new();
    for b in &tri.boundary {
        if n == 1 {
            boundary.push(b.clone());
            continue;
        }
        let (u, v) = (b.vertices[0], b.vertices[1]);
        let m = barycenter(&[u, v], &mut vertices);
        boundary.push(Simplex { vertices: vec![u, m], orientation: b.orientation });
        boundary.push(Simplex { vertices: vec![m, v], orientation: b.orientation });
    }
    Triangulation { dimension: n, vertices, simplices, boundary }
}
