//! Rooted planar maps as rotation systems.
//!
//! A map with `E` edges has half-edges `0..2E`. `sigma` turns counterclockwise
//! around a vertex, `alpha` pairs half-edges into edges and faces are the cycles
//! of `phi = sigma . alpha` (`phi[h] = sigma[alpha[h]]`). The vertex map has no
//! half-edges, one vertex and one face.

mod bijection;
mod potts;

pub use bijection::{cluster_grand_sum, loop_grand_sum, loops_to_potts, potts_to_loops, Color, Handle, TwofoldLoopConfig};
pub use potts::{
    duality_identity_check, potts_partition_cluster, potts_partition_spin, ClusterConfig,
};

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Practical bound on exhaustive enumeration.
pub const MAX_ENUM_EDGES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RotationMap {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    root: usize,
}

impl RotationMap {
    /// The one-vertex map without edges.
    pub fn vertex_map() -> Self {
        RotationMap {
            sigma: Vec::new(),
            alpha: Vec::new(),
            root: 0,
        }
    }

    /// Validates permutations, connectivity and the root; any genus is accepted.
    pub fn new(sigma: Vec<usize>, alpha: Vec<usize>, root: usize) -> Result<Self> {
        let m = sigma.len();
        if alpha.len() != m || m % 2 != 0 {
            return Err(Error::InvalidMap(format!(
                "sigma and alpha must have the same even length, got {} and {}",
                m,
                alpha.len()
            )));
        }
        if m == 0 {
            return Ok(Self::vertex_map());
        }
        if !is_permutation(&sigma) || !is_permutation(&alpha) {
            return Err(Error::InvalidMap("sigma or alpha is not a permutation".into()));
        }
        if (0..m).any(|h| alpha[h] == h || alpha[alpha[h]] != h) {
            return Err(Error::InvalidMap("alpha must be a fixed-point-free involution".into()));
        }
        if root >= m {
            return Err(Error::InvalidMap(format!("root {root} out of range")));
        }
        let map = RotationMap { sigma, alpha, root };
        if !map.is_connected() {
            return Err(Error::InvalidMap("the group <sigma, alpha> is not transitive".into()));
        }
        Ok(map)
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn num_half_edges(&self) -> usize {
        self.sigma.len()
    }

    pub fn num_edges(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn is_vertex_map(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Face permutation `phi[h] = sigma[alpha[h]]`.
    pub fn phi(&self) -> Vec<usize> {
        (0..self.sigma.len()).map(|h| self.sigma[self.alpha[h]]).collect()
    }

    pub fn num_vertices(&self) -> usize {
        if self.is_vertex_map() {
            1
        } else {
            cycles(&self.sigma).1
        }
    }

    pub fn num_faces(&self) -> usize {
        if self.is_vertex_map() {
            1
        } else {
            cycles(&self.phi()).1
        }
    }

    /// Vertex index of every half-edge, vertices numbered by first appearance.
    pub fn vertex_of(&self) -> Vec<usize> {
        cycles(&self.sigma).0
    }

    /// Face index of every half-edge, as the `phi`-cycle containing it.
    pub fn face_of(&self) -> Vec<usize> {
        cycles(&self.phi()).0
    }

    /// `2 - 2g = V - E + F`.
    pub fn genus(&self) -> usize {
        let chi = self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64;
        ((2 - chi) / 2) as usize
    }

    pub fn is_planar(&self) -> bool {
        self.genus() == 0
    }

    /// Dual map `(sigma . alpha, alpha)` with the same root half-edge.
    ///
    /// Because `sigma** = sigma . alpha . alpha = sigma`, this is an exact involution.
    /// It is the mirror image of the geometric dual, which has the same weights.
    pub fn dual(&self) -> Self {
        RotationMap {
            sigma: self.phi(),
            alpha: self.alpha.clone(),
            root: self.root,
        }
    }

    /// Canonical relabeling by discovery order from the root.
    ///
    /// Returns the relabeled map and `new_of_old`.
    pub fn canonical(&self) -> (Self, Vec<usize>) {
        let m = self.sigma.len();
        if m == 0 {
            return (self.clone(), Vec::new());
        }
        let mut new_of_old = vec![usize::MAX; m];
        let mut order = Vec::with_capacity(m);
        new_of_old[self.root] = 0;
        order.push(self.root);
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for y in [self.alpha[x], self.sigma[x]] {
                if new_of_old[y] == usize::MAX {
                    new_of_old[y] = order.len();
                    order.push(y);
                }
            }
            i += 1;
        }
        let sigma = order.iter().map(|&x| new_of_old[self.sigma[x]]).collect();
        let alpha = order.iter().map(|&x| new_of_old[self.alpha[x]]).collect();
        (
            RotationMap {
                sigma,
                alpha,
                root: 0,
            },
            new_of_old,
        )
    }

    /// Edges as `(h, alpha h)` with `h < alpha h`, sorted by `h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.sigma.len())
            .filter(|&h| h < self.alpha[h])
            .map(|h| (h, self.alpha[h]))
            .collect()
    }

    fn is_connected(&self) -> bool {
        let m = self.sigma.len();
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in [self.sigma[x], self.alpha[x]] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == m
    }
}

/// Text codec: `sigma:1,0;alpha:1,0;root:0`.
impl fmt::Display for RotationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "sigma:{};alpha:{};root:{}", join(&self.sigma), join(&self.alpha), self.root)
    }
}

impl FromStr for RotationMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sigma = None;
        let mut alpha = None;
        let mut root = None;
        for part in s.trim().split(';') {
            let (key, val) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in {part:?}")))?;
            let list = || -> Result<Vec<usize>> {
                val.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
                    .collect()
            };
            match key.trim() {
                "sigma" => sigma = Some(list()?),
                "alpha" => alpha = Some(list()?),
                "root" => {
                    root = Some(val.trim().parse().map_err(|_| Error::Parse(format!("bad root {val:?}")))?)
                }
                other => return Err(Error::Parse(format!("unknown field {other:?}"))),
            }
        }
        match (sigma, alpha, root) {
            (Some(s), Some(a), Some(r)) => RotationMap::new(s, a, r),
            _ => Err(Error::Parse("expected sigma, alpha and root".into())),
        }
    }
}

/// Cycle index of each point and the number of cycles.
pub(crate) fn cycles(p: &[usize]) -> (Vec<usize>, usize) {
    let mut idx = vec![usize::MAX; p.len()];
    let mut c = 0;
    for start in 0..p.len() {
        if idx[start] != usize::MAX {
            continue;
        }
        let mut x = start;
        while idx[x] == usize::MAX {
            idx[x] = c;
            x = p[x];
        }
        c += 1;
    }
    (idx, c)
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Number of rooted planar maps with `e` edges: `2 3^e (2e)! / (e! (e+2)!)`.
pub fn rooted_map_count(e: usize) -> u128 {
    let mut num: u128 = 2 * 3u128.pow(e as u32);
    let mut den: u128 = 1;
    for k in (e + 1)..=(2 * e) {
        num *= k as u128;
    }
    for k in 1..=(e + 2) {
        den *= k as u128;
    }
    num / den
}

/// All rooted planar maps with at most `max_edges` edges, one canonical labeling each.
///
/// Labels are assigned in discovery order from the root (alpha before sigma), so
/// each rooted map is produced exactly once without any isomorphism test.
pub fn enumerate_rooted_maps(max_edges: usize) -> Result<Vec<RotationMap>> {
    if max_edges > MAX_ENUM_EDGES {
        return Err(Error::BoundExceeded {
            what: "enumerate_rooted_maps max_edges",
            max: MAX_ENUM_EDGES,
            got: max_edges,
        });
    }
    let mut out = vec![RotationMap::vertex_map()];
    for e in 1..=max_edges {
        out.extend(rooted_maps_with_edges(e));
    }
    Ok(out)
}

/// Rooted planar maps with exactly `e >= 1` edges.
pub fn rooted_maps_with_edges(e: usize) -> Vec<RotationMap> {
    let mut st = EnumState {
        m: 2 * e,
        sigma: vec![usize::MAX; 2 * e],
        alpha: vec![usize::MAX; 2 * e],
        has_pre: vec![false; 2 * e],
        count: 1,
        out: Vec::new(),
    };
    st.step(0);
    st.out
}

struct EnumState {
    m: usize,
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    has_pre: Vec<bool>,
    count: usize,
    out: Vec<RotationMap>,
}

impl EnumState {
    fn step(&mut self, i: usize) {
        if i == self.count {
            if self.count == self.m {
                let map = RotationMap {
                    sigma: self.sigma.clone(),
                    alpha: self.alpha.clone(),
                    root: 0,
                };
                if map.is_planar() {
                    self.out.push(map);
                }
            }
            return;
        }
        if self.alpha[i] != usize::MAX {
            self.sigma_step(i);
            return;
        }
        for j in (i + 1)..self.count {
            if self.alpha[j] == usize::MAX {
                self.alpha[i] = j;
                self.alpha[j] = i;
                self.sigma_step(i);
                self.alpha[j] = usize::MAX;
            }
        }
        if self.count < self.m {
            let j = self.count;
            self.count += 1;
            self.alpha[i] = j;
            self.alpha[j] = i;
            self.sigma_step(i);
            self.alpha[j] = usize::MAX;
            self.count -= 1;
        }
        self.alpha[i] = usize::MAX;
    }

    fn sigma_step(&mut self, i: usize) {
        for j in 0..self.count {
            if !self.has_pre[j] {
                self.sigma[i] = j;
                self.has_pre[j] = true;
                self.step(i + 1);
                self.has_pre[j] = false;
            }
        }
        if self.count < self.m {
            let j = self.count;
            self.count += 1;
            self.sigma[i] = j;
            self.has_pre[j] = true;
            self.step(i + 1);
            self.has_pre[j] = false;
            self.count -= 1;
        }
        self.sigma[i] = usize::MAX;
    }
}
