//! Cluster configurations to triangulations with fully packed twofold loops.
//!
//! Each corner of `M` becomes a bichromatic edge joining a red (primal) vertex to
//! a green (dual) vertex, which turns `M` into a quadrangulation with one face
//! per edge of `M`. Every quadrangle is then split by its primal diagonal when
//! the edge is in `S` and by its dual diagonal otherwise. Loops cross the
//! bichromatic edges and separate red domains from green ones.

use super::potts::ClusterConfig;
use super::{cycles, RotationMap};
use crate::error::{Error, Result};
use crate::model::ExactWeights;
use crate::scalar::{Rational, Scalar};
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Color {
    Red,
    Green,
}

/// A half-edge of the recovered map, named by triangulation data.
///
/// `Diagonal(x)`: the monochromatic triangulation half-edge `x` itself.
/// `Corner(x)`: the edge crossing the monochromatic side of the triangle in the
/// corner between `x` and `sigma(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Handle {
    Diagonal(usize),
    Corner(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwofoldLoopConfig {
    /// Empty for the image of the vertex map.
    pub triangulation: RotationMap,
    /// Indexed by the vertices of `triangulation`.
    /// The empty triangulation stands for one red and one green vertex.
    pub vertex_color: Vec<Color>,
    /// For each face of `triangulation`, the two visited edges (as their smaller half-edge).
    pub arcs: Vec<(usize, usize)>,
    pub root_red: Handle,
    pub root_green: Handle,
}

impl TwofoldLoopConfig {
    fn trivial() -> Self {
        TwofoldLoopConfig {
            triangulation: RotationMap::vertex_map(),
            vertex_color: vec![Color::Red, Color::Green],
            arcs: Vec::new(),
            root_red: Handle::Diagonal(0),
            root_green: Handle::Diagonal(0),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.triangulation.is_vertex_map()
    }

    pub fn num_triangles(&self) -> usize {
        if self.is_trivial() {
            0
        } else {
            self.triangulation.num_faces()
        }
    }

    /// Loops as cyclic lists of visited edges. The trivial config has one loop
    /// separating its two vertices, with no edge to cross.
    pub fn loops(&self) -> Vec<Vec<usize>> {
        if self.is_trivial() {
            return vec![Vec::new()];
        }
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(p, q) in &self.arcs {
            adj.entry(p).or_default().push(q);
            adj.entry(q).or_default().push(p);
        }
        let mut keys: Vec<usize> = adj.keys().copied().collect();
        keys.sort_unstable();
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for start in keys {
            if seen.contains_key(&start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut stack = vec![start];
            seen.insert(start, ());
            while let Some(x) = stack.pop() {
                cycle.push(x);
                for &y in &adj[&x] {
                    if seen.insert(y, ()).is_none() {
                        stack.push(y);
                    }
                }
            }
            out.push(cycle);
        }
        out
    }

    pub fn num_loops(&self) -> usize {
        self.loops().len()
    }

    /// Triangles whose unvisited side joins two vertices of `color`.
    pub fn facing(&self, color: Color) -> usize {
        if self.is_trivial() {
            return 0;
        }
        let t = &self.triangulation;
        let vof = t.vertex_of();
        let (fof, _) = cycles(&t.phi());
        let mut faces = vec![false; self.arcs.len()];
        for x in 0..t.num_half_edges() {
            let y = t.alpha()[x];
            if self.vertex_color[vof[x]] == color && self.vertex_color[vof[y]] == color {
                faces[fof[x]] = true;
            }
        }
        faces.iter().filter(|&&f| f).count()
    }

    pub fn count_vertices(&self, color: Color) -> usize {
        self.vertex_color.iter().filter(|&&c| c == color).count()
    }

    /// `n^L h1^{red-facing} h2^{green-facing} u1^{red vertices} u2^{green vertices}`.
    pub fn weight(&self, w: &ExactWeights) -> Rational {
        Scalar::pow(&w.n, self.num_loops() as u32)
            * Scalar::pow(&w.h1, self.facing(Color::Red) as u32)
            * Scalar::pow(&w.h2, self.facing(Color::Green) as u32)
            * Scalar::pow(&w.u1, self.count_vertices(Color::Red) as u32)
            * Scalar::pow(&w.u2, self.count_vertices(Color::Green) as u32)
    }

    /// Checks planarity, full packing and the coloring rule.
    pub fn validate(&self) -> Result<()> {
        if self.is_trivial() {
            return Ok(());
        }
        let t = &self.triangulation;
        if !t.is_planar() {
            return Err(Error::NotFullyPacked("triangulation is not planar".into()));
        }
        if self.vertex_color.len() != t.num_vertices() {
            return Err(Error::NotFullyPacked("one color per vertex expected".into()));
        }
        let vof = t.vertex_of();
        let phi = t.phi();
        let (fof, nf) = cycles(&phi);
        let mut sizes = vec![0usize; nf];
        let mut mono = vec![0usize; nf];
        for x in 0..t.num_half_edges() {
            sizes[fof[x]] += 1;
            if self.vertex_color[vof[x]] == self.vertex_color[vof[t.alpha()[x]]] {
                mono[fof[x]] += 1;
            }
        }
        if sizes.iter().any(|&s| s != 3) {
            return Err(Error::NotFullyPacked("a face is not a triangle".into()));
        }
        if mono.iter().any(|&m| m != 1) {
            return Err(Error::NotFullyPacked(
                "each triangle needs exactly one unvisited side".into(),
            ));
        }
        if self.arcs.len() != nf {
            return Err(Error::NotFullyPacked("one arc per triangle expected".into()));
        }
        Ok(())
    }
}

/// Builds the fully packed loop configuration of `(M, S)`.
///
/// Triangulation half-edges: `2k` and `2k+1` are the red and green ends of the
/// corner edge of corner `k` (between `k` and `sigma k`), and `4E + h` is the
/// diagonal half-edge attached to `h`. The resulting loop count is
/// `2 c(S) + |S| - |V|`.
pub fn potts_to_loops(c: &ClusterConfig) -> TwofoldLoopConfig {
    let m = &c.map;
    if m.is_vertex_map() {
        return TwofoldLoopConfig::trivial();
    }
    let e = m.num_edges();
    let in_s = c.half_edge_flags();
    let sigma = m.sigma();
    let alpha = m.alpha();
    let phi = m.phi();
    let qv = |k: usize| 2 * k;
    let qf = |k: usize| 2 * k + 1;
    let diag = |h: usize| 4 * e + h;

    let mut t_sigma = vec![usize::MAX; 6 * e];
    let mut t_alpha = vec![usize::MAX; 6 * e];
    for k in 0..2 * e {
        t_alpha[qv(k)] = qf(k);
        t_alpha[qf(k)] = qv(k);
        t_alpha[diag(k)] = diag(alpha[k]);
    }
    let mut link = |seq: &[usize]| {
        for i in 0..seq.len() {
            t_sigma[seq[i]] = seq[(i + 1) % seq.len()];
        }
    };
    let mut done = vec![false; 2 * e];
    for h0 in 0..2 * e {
        if done[h0] {
            continue;
        }
        let mut seq = Vec::new();
        let mut h = h0;
        loop {
            done[h] = true;
            if in_s[h] {
                seq.push(diag(h));
            }
            seq.push(qv(h));
            h = sigma[h];
            if h == h0 {
                break;
            }
        }
        link(&seq);
    }
    let mut done = vec![false; 2 * e];
    for h0 in 0..2 * e {
        if done[h0] {
            continue;
        }
        let mut seq = Vec::new();
        let mut h = h0;
        loop {
            done[h] = true;
            if !in_s[h] {
                seq.push(diag(h));
            }
            seq.push(qf(alpha[h]));
            h = phi[h];
            if h == h0 {
                break;
            }
        }
        // Dual vertices are traversed against `phi` to keep the embedding planar.
        seq.reverse();
        link(&seq);
    }
    let tri = RotationMap {
        sigma: t_sigma,
        alpha: t_alpha,
        root: qv(0),
    };

    let red = |x: usize| {
        if x >= 4 * e {
            in_s[x - 4 * e]
        } else {
            x % 2 == 0
        }
    };
    let vof = tri.vertex_of();
    let mut vertex_color = vec![Color::Red; tri.num_vertices()];
    for x in 0..6 * e {
        if !red(x) {
            vertex_color[vof[x]] = Color::Green;
        }
    }
    let arcs = arcs_of(&tri, |x| x < 4 * e);

    let h0 = m.root();
    let sigma_inv = invert(sigma);
    let root_red = if in_s[h0] {
        Handle::Diagonal(diag(h0))
    } else {
        Handle::Corner(qv(sigma_inv[h0]))
    };
    let root_green = if in_s[h0] {
        Handle::Corner(qf(alpha[h0]))
    } else {
        Handle::Diagonal(diag(h0))
    };
    TwofoldLoopConfig {
        triangulation: tri,
        vertex_color,
        arcs,
        root_red,
        root_green,
    }
}

/// For each face, its two visited edges, identified by their smaller half-edge.
fn arcs_of(t: &RotationMap, visited: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let phi = t.phi();
    let (fof, nf) = cycles(&phi);
    let mut per_face: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for x in 0..t.num_half_edges() {
        if visited(x) {
            per_face[fof[x]].push(x.min(t.alpha()[x]));
        }
    }
    per_face
        .into_iter()
        .map(|v| {
            debug_assert_eq!(v.len(), 2);
            (v[0], v[1])
        })
        .collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Recovers `(M, S)` from red domains or the dual pair `(M*, S*)` from green ones.
pub fn loops_to_potts(cfg: &TwofoldLoopConfig, color: Color) -> Result<ClusterConfig> {
    cfg.validate()?;
    if cfg.is_trivial() {
        return ClusterConfig::new(RotationMap::vertex_map(), Vec::new());
    }
    let t = &cfg.triangulation;
    let n = t.num_half_edges();
    let ts = t.sigma();
    let ta = t.alpha();
    let vof = t.vertex_of();
    let (fof, nf) = cycles(&t.phi());
    let col = |x: usize| cfg.vertex_color[vof[x]];
    let is_mono = |x: usize| col(x) == col(ta[x]);
    let corner_face = |x: usize| fof[ta[x]];

    let mut face_diag = vec![usize::MAX; nf];
    let mut face_corners: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for x in 0..n {
        if is_mono(x) {
            face_diag[fof[x]] = x;
        }
        face_corners[corner_face(x)].push(x);
    }
    // `Corner(x)` exists when the triangle at the corner has its unvisited side opposite `x`.
    let has_corner = |x: usize| col(face_diag[corner_face(x)]) != color;

    let mut ids: HashMap<Handle, usize> = HashMap::new();
    let mut sigma_m: Vec<usize> = Vec::new();
    let mut done = vec![false; n];
    for x0 in 0..n {
        if done[x0] || col(x0) != color {
            continue;
        }
        let mut seq = Vec::new();
        let mut x = x0;
        loop {
            done[x] = true;
            if is_mono(x) {
                seq.push(Handle::Diagonal(x));
            }
            if has_corner(x) {
                seq.push(Handle::Corner(x));
            }
            x = ts[x];
            if x == x0 {
                break;
            }
        }
        let base = ids.len();
        for (i, hd) in seq.iter().enumerate() {
            ids.insert(*hd, base + i);
        }
        for i in 0..seq.len() {
            sigma_m.push(base + (i + 1) % seq.len());
        }
    }
    let mut alpha_m = vec![usize::MAX; ids.len()];
    let mut flags = vec![false; ids.len()];
    for (&hd, &id) in &ids {
        let other = match hd {
            Handle::Diagonal(x) => {
                flags[id] = true;
                Handle::Diagonal(ta[x])
            }
            Handle::Corner(x) => {
                let d = face_diag[corner_face(x)];
                let across = fof[ta[d]];
                let y = face_corners[across]
                    .iter()
                    .copied()
                    .find(|&y| col(y) == color)
                    .ok_or_else(|| Error::NotFullyPacked("missing corner across a diagonal".into()))?;
                Handle::Corner(y)
            }
        };
        alpha_m[id] = *ids
            .get(&other)
            .ok_or_else(|| Error::NotFullyPacked("unpaired half-edge".into()))?;
    }
    let root_handle = match color {
        Color::Red => cfg.root_red,
        Color::Green => cfg.root_green,
    };
    let root = *ids
        .get(&root_handle)
        .ok_or_else(|| Error::NotFullyPacked("root handle not found".into()))?;
    // Around green vertices the embedding turns along `phi^-1`; mirroring lands on
    // the orientation used by `RotationMap::dual`.
    if color == Color::Green {
        sigma_m = invert(&sigma_m);
    }
    let map = RotationMap::new(sigma_m, alpha_m, root)?;
    ClusterConfig::from_half_edge_flags(&map, &flags)
}

/// Grand sum of cluster weights over every `(M, S)` with exactly `e` edges.
pub fn cluster_grand_sum(configs: &[ClusterConfig], e: usize, p: &crate::model::PottsParams<Rational>) -> Rational {
    configs
        .iter()
        .filter(|c| c.map.num_edges() == e)
        .fold(Rational::from_i64(0), |acc, c| acc + c.weight(p))
}

/// Grand sum of loop weights over the bijection images with exactly `e` edges.
pub fn loop_grand_sum(configs: &[ClusterConfig], e: usize, w: &ExactWeights) -> Rational {
    configs
        .iter()
        .filter(|c| c.map.num_edges() == e)
        .fold(Rational::from_i64(0), |acc, c| acc + potts_to_loops(c).weight(w))
}
