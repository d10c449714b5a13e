//! Random-cluster and spin partition functions on a single map.

use super::RotationMap;
use crate::error::{Error, Result};
use crate::model::PottsParams;
use crate::scalar::{Rational, Scalar};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A map with an edge subset `S`, indexed like [`RotationMap::edges`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClusterConfig {
    pub map: RotationMap,
    pub subset: Vec<bool>,
    pub clusters: usize,
}

impl ClusterConfig {
    pub fn new(map: RotationMap, subset: Vec<bool>) -> Result<Self> {
        if subset.len() != map.num_edges() {
            return Err(Error::InvalidMap(format!(
                "subset has {} flags for {} edges",
                subset.len(),
                map.num_edges()
            )));
        }
        let clusters = cluster_count(&map, &subset);
        Ok(ClusterConfig {
            map,
            subset,
            clusters,
        })
    }

    /// Every subset of every map with at most `max_edges` edges.
    pub fn enumerate(max_edges: usize) -> Result<Vec<ClusterConfig>> {
        let maps = super::enumerate_rooted_maps(max_edges)?;
        let mut out = Vec::new();
        for m in maps {
            let e = m.num_edges();
            for mask in 0u32..(1 << e) {
                let subset = (0..e).map(|i| mask >> i & 1 == 1).collect();
                out.push(ClusterConfig::new(m.clone(), subset)?);
            }
        }
        Ok(out)
    }

    pub fn subset_size(&self) -> usize {
        self.subset.iter().filter(|&&s| s).count()
    }

    /// Whether half-edge `h` lies on an edge of `S`.
    pub fn contains_half_edge(&self, h: usize) -> bool {
        let a = self.map.alpha()[h];
        let lo = h.min(a);
        let idx = self.map.edges().iter().position(|&(x, _)| x == lo).expect("edge");
        self.subset[idx]
    }

    /// Per half-edge membership in `S`.
    pub fn half_edge_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.map.num_half_edges()];
        for (i, &(x, y)) in self.map.edges().iter().enumerate() {
            flags[x] = self.subset[i];
            flags[y] = self.subset[i];
        }
        flags
    }

    /// Builds a config from per half-edge flags; the map is relabeled canonically.
    pub fn from_half_edge_flags(map: &RotationMap, flags: &[bool]) -> Result<Self> {
        let (canon, new_of_old) = map.canonical();
        let mut canon_flags = vec![false; flags.len()];
        for (old, &new) in new_of_old.iter().enumerate() {
            canon_flags[new] = flags[old];
        }
        let subset = canon.edges().iter().map(|&(x, _)| canon_flags[x]).collect();
        ClusterConfig::new(canon, subset)
    }

    /// The dual pair `(M*, S*)` where `S*` holds the duals of the edges not in `S`.
    pub fn dual(&self) -> Result<Self> {
        let flags: Vec<bool> = self.half_edge_flags().iter().map(|f| !f).collect();
        ClusterConfig::from_half_edge_flags(&self.map.dual(), &flags)
    }

    /// `t^E J^|S| Q^c(S) mu_v^V mu_f^F`.
    pub fn weight<S: Scalar>(&self, p: &PottsParams<S>) -> S {
        p.t.pow(self.map.num_edges() as u32)
            * p.j.pow(self.subset_size() as u32)
            * p.q.pow(self.clusters as u32)
            * p.mu_v.pow(self.map.num_vertices() as u32)
            * p.mu_f.pow(self.map.num_faces() as u32)
    }
}

/// Connected components of `(V, S)`, isolated vertices included.
pub fn cluster_count(map: &RotationMap, subset: &[bool]) -> usize {
    let nv = map.num_vertices();
    if map.is_vertex_map() {
        return 1;
    }
    let vof = map.vertex_of();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut comps = nv;
    for (i, &(x, y)) in map.edges().iter().enumerate() {
        if subset[i] {
            let (rx, ry) = (find(&mut parent, vof[x]), find(&mut parent, vof[y]));
            if rx != ry {
                parent[rx] = ry;
                comps -= 1;
            }
        }
    }
    comps
}

/// `t^E sum_S J^|S| Q^c(S)`.
pub fn potts_partition_cluster<S: Scalar>(m: &RotationMap, q: &S, t: &S, j: &S) -> S {
    let e = m.num_edges();
    let mut sum = S::zero();
    for mask in 0u32..(1 << e) {
        let subset: Vec<bool> = (0..e).map(|i| mask >> i & 1 == 1).collect();
        let c = cluster_count(m, &subset);
        sum = sum + j.pow(mask.count_ones()) * q.pow(c as u32);
    }
    t.pow(e as u32) * sum
}

/// Spin sum `t^E sum_sigma prod_e w^{delta}` with `w = e^K = 1 + J`.
pub fn potts_partition_spin(m: &RotationMap, q: &Rational, t: &Rational, w: &Rational) -> Result<Rational> {
    if !q.is_integer() || !q.is_positive() {
        return Err(Error::NonIntegerQ(q.to_string()));
    }
    let states = q.to_integer().to_usize().ok_or_else(|| Error::NonIntegerQ(q.to_string()))?;
    let nv = m.num_vertices();
    let vof = m.vertex_of();
    let edges = m.edges();
    let total = states.checked_pow(nv as u32).ok_or(Error::BoundExceeded {
        what: "spin configurations",
        max: usize::MAX,
        got: usize::MAX,
    })?;
    let mut sum = Rational::zero();
    let mut spins = vec![0usize; nv];
    for code in 0..total {
        let mut c = code;
        for s in spins.iter_mut() {
            let (quot, rem) = c.div_rem(&states);
            *s = rem;
            c = quot;
        }
        let aligned = edges.iter().filter(|&&(x, y)| spins[vof[x]] == spins[vof[y]]).count();
        sum += Scalar::pow(w, aligned as u32);
    }
    Ok(Scalar::pow(t, m.num_edges() as u32) * sum)
}

/// Checks `Q^{-V/2} Z(M; t, J) = Q^{-V*/2} Z(M*; t*, J*)` exactly.
///
/// With `t* = J t / sqrt(Q)` the half-integer powers of `Q` combine into
/// `Q^{1 - F}` by Euler's relation, so the check stays rational for any `Q`.
pub fn duality_identity_check(m: &RotationMap, q: &Rational, t: &Rational, j: &Rational) -> Result<bool> {
    if j.is_zero() {
        return Err(Error::DualUndefined);
    }
    let lhs = potts_partition_cluster(m, q, t, j);
    let dual = m.dual();
    let e = m.num_edges() as u32;
    let j_star = q / j;
    let sum_star = potts_partition_cluster(&dual, q, &Rational::one(), &j_star);
    let f = m.num_faces() as i32;
    let q_pow = if f >= 1 {
        Scalar::pow(&(Rational::one() / q), (f - 1) as u32)
    } else {
        q.clone()
    };
    let rhs = q_pow * Scalar::pow(&(j * t), e) * sum_star;
    Ok(lhs == rhs)
}
