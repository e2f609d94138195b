//! Finite ordered simplicial complexes, flat orthogonal local systems given
//! as edge cocycles, twisted chain complexes and barycentric subdivision.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::chain::ChainComplex;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

const ORTHOGONALITY_TOL: f64 = 1e-12;
const FLATNESS_TOL: f64 = 1e-10;

/// A simplex as its strictly ascending vertex list.
pub type Simplex = Vec<usize>;

#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    /// `simplices[q]` lists the q-simplices in lexicographic order.
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

fn faces(s: &[usize]) -> impl Iterator<Item = (usize, Simplex)> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

impl SimplicialComplex {
    /// Builds a complex from explicit per-dimension simplex lists. Every face
    /// of a listed simplex must itself be listed and the complex must be
    /// connected.
    pub fn new(simplices: Vec<Vec<Simplex>>) -> Result<Self> {
        let mut sorted: Vec<Vec<Simplex>> = Vec::with_capacity(simplices.len());
        for (q, list) in simplices.into_iter().enumerate() {
            let mut set = BTreeSet::new();
            for s in list {
                if s.len() != q + 1 {
                    return Err(Error::input(format!(
                        "simplex {s:?} listed in dimension {q} has {} vertices",
                        s.len()
                    )));
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::input(format!(
                        "simplex {s:?} is not strictly ascending"
                    )));
                }
                set.insert(s);
            }
            sorted.push(set.into_iter().collect());
        }
        while sorted.last().is_some_and(|l| l.is_empty()) {
            sorted.pop();
        }
        if sorted.is_empty() {
            return Err(Error::input("simplicial complex has no vertices"));
        }
        let index: Vec<HashMap<Simplex, usize>> = sorted
            .iter()
            .map(|l| l.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect())
            .collect();
        for q in 1..sorted.len() {
            for s in &sorted[q] {
                for (_, f) in faces(s) {
                    if !index[q - 1].contains_key(&f) {
                        return Err(Error::input(format!("face {f:?} of {s:?} is missing")));
                    }
                }
            }
        }
        let k = SimplicialComplex {
            simplices: sorted,
            index,
        };
        if !k.is_connected() {
            return Err(Error::input("simplicial complex is not connected"));
        }
        Ok(k)
    }

    /// Closure of a list of simplices (vertex lists in any order).
    pub fn from_maximal(maximal: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        for s in maximal {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            let n = s.len();
            // every nonempty subset
            for mask in 1u64..(1u64 << n) {
                let sub: Simplex = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| s[i])
                    .collect();
                let d = sub.len() - 1;
                if by_dim.len() <= d {
                    by_dim.resize_with(d + 1, BTreeSet::new);
                }
                by_dim[d].insert(sub);
            }
        }
        SimplicialComplex::new(
            by_dim
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
        )
    }

    /// The `m`-cycle graph on vertices `0..m`.
    pub fn cycle(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::input(format!(
                "a simplicial cycle needs at least 3 vertices, got {m}"
            )));
        }
        let edges: Vec<Vec<usize>> = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
        SimplicialComplex::from_maximal(&edges)
    }

    pub fn dimension(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.simplices[0].iter().map(|s| s[0]).collect()
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.simplices.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn all_simplices(&self) -> &[Vec<Simplex>] {
        &self.simplices
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let e = if a < b { [a, b] } else { [b, a] };
        self.index_of(&e).is_some()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(q, &c)| if q % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self
            .vertices()
            .into_iter()
            .map(|v| (v, Vec::new()))
            .collect();
        for e in self.simplices(1) {
            adj.get_mut(&e[0]).unwrap().push(e[1]);
            adj.get_mut(&e[1]).unwrap().push(e[0]);
        }
        adj
    }

    fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let Some(&start) = adj.keys().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == adj.len()
    }

    /// Breadth-first spanning tree: parent of each non-root vertex.
    fn spanning_tree(&self, root: usize) -> Result<Vec<(usize, usize)>> {
        let adj = self.adjacency();
        if !adj.contains_key(&root) {
            return Err(Error::input(format!("basepoint {root} is not a vertex")));
        }
        let mut order = Vec::new();
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    order.push((v, w));
                    queue.push_back(w);
                }
            }
        }
        Ok(order)
    }

    /// Untwisted simplicial chain complex with ascending-vertex orientations.
    pub fn boundary_matrices(&self) -> ChainComplex {
        let counts = self.counts();
        let boundaries = (1..counts.len())
            .map(|q| {
                let mut d = Matrix::zeros(counts[q - 1], counts[q]);
                for (j, s) in self.simplices[q].iter().enumerate() {
                    for (i, f) in faces(s) {
                        let row = self.index[q - 1][&f];
                        d[(row, j)] = if i % 2 == 0 { 1.0 } else { -1.0 };
                    }
                }
                d
            })
            .collect();
        ChainComplex::new(counts, boundaries, "simplicial").expect("shapes are consistent")
    }
}

/// Flat orthogonal local system as transport matrices on oriented edges:
/// `transport(a, b)` carries the fiber at `a` to the fiber at `b`, and the
/// reversed edge carries the transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCocycle {
    fiber_dim: usize,
    /// Keyed by `(a, b)` with `a < b`.
    edges: BTreeMap<(usize, usize), Matrix>,
}

impl EdgeCocycle {
    /// Accepts matrices on edges given in either orientation.
    pub fn new(fiber_dim: usize, edges: BTreeMap<(usize, usize), Matrix>) -> Result<Self> {
        if fiber_dim == 0 {
            return Err(Error::input("fiber dimension must be positive"));
        }
        let mut normalized = BTreeMap::new();
        for ((a, b), m) in edges {
            if a == b {
                return Err(Error::input(format!("degenerate edge ({a}, {b})")));
            }
            if m.shape() != (fiber_dim, fiber_dim) {
                return Err(Error::input(format!(
                    "edge ({a}, {b}) carries a {:?} matrix, expected {fiber_dim}x{fiber_dim}",
                    m.shape()
                )));
            }
            let defect = m.orthogonality_defect();
            if defect > ORTHOGONALITY_TOL {
                return Err(Error::input(format!(
                    "edge ({a}, {b}) matrix is not orthogonal (defect {defect:e})"
                )));
            }
            let (key, m) = if a < b {
                ((a, b), m)
            } else {
                ((b, a), m.transpose())
            };
            if normalized.insert(key, m).is_some() {
                return Err(Error::input(format!("edge {key:?} given twice")));
            }
        }
        Ok(EdgeCocycle {
            fiber_dim,
            edges: normalized,
        })
    }

    pub fn trivial(k: &SimplicialComplex, fiber_dim: usize) -> Self {
        let edges = k
            .simplices(1)
            .iter()
            .map(|e| ((e[0], e[1]), Matrix::identity(fiber_dim)))
            .collect();
        EdgeCocycle { fiber_dim, edges }
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), Matrix> {
        &self.edges
    }

    pub fn transport(&self, a: usize, b: usize) -> Result<Matrix> {
        if a == b {
            return Ok(Matrix::identity(self.fiber_dim));
        }
        if a < b {
            self.edges.get(&(a, b)).cloned()
        } else {
            self.edges.get(&(b, a)).map(Matrix::transpose)
        }
        .ok_or_else(|| Error::input(format!("no transport on edge ({a}, {b})")))
    }

    /// Checks that every edge of `k` carries a matrix and that transport is
    /// path independent around every triangle.
    pub fn check_flat(&self, k: &SimplicialComplex) -> Result<()> {
        for e in k.simplices(1) {
            if !self.edges.contains_key(&(e[0], e[1])) {
                return Err(Error::input(format!("cocycle is missing edge {e:?}")));
            }
        }
        for t in k.simplices(2) {
            let (a, b, c) = (t[0], t[1], t[2]);
            let around = self.transport(b, c)?.matmul(&self.transport(a, b)?);
            let defect = around.sub(&self.transport(a, c)?).max_abs();
            if defect > FLATNESS_TOL {
                return Err(Error::Flatness {
                    triangle: [a, b, c],
                    defect,
                });
            }
        }
        Ok(())
    }

    /// Change of frame: with `frames[v]` an orthogonal matrix at each vertex,
    /// returns `frames[b] M(a, b) frames[a]^T`. Vertices without a frame keep
    /// the identity.
    pub fn gauge_transform(&self, frames: &BTreeMap<usize, Matrix>) -> EdgeCocycle {
        let id = Matrix::identity(self.fiber_dim);
        let edges = self
            .edges
            .iter()
            .map(|(&(a, b), m)| {
                let ga = frames.get(&a).unwrap_or(&id);
                let gb = frames.get(&b).unwrap_or(&id);
                ((a, b), gb.matmul(m).matmul(&ga.transpose()))
            })
            .collect();
        EdgeCocycle {
            fiber_dim: self.fiber_dim,
            edges,
        }
    }

    /// Ordered product of transports along a closed vertex path.
    pub fn holonomy(&self, k: &SimplicialComplex, path: &[usize]) -> Result<Matrix> {
        if path.len() < 2 || path.first() != path.last() {
            return Err(Error::input("holonomy needs a closed path"));
        }
        let mut acc = Matrix::identity(self.fiber_dim);
        for w in path.windows(2) {
            if !k.has_edge(w[0], w[1]) {
                return Err(Error::input(format!("({}, {}) is not an edge", w[0], w[1])));
            }
            acc = self.transport(w[0], w[1])?.matmul(&acc);
        }
        Ok(acc)
    }
}

/// Twisted chain complex of `k` with coefficients in `rho`.
///
/// A twisted q-chain assigns to each q-simplex a vector in the fiber at its
/// lead (smallest) vertex. Before assembling, the cocycle is gauge fixed so
/// that transport along a breadth-first spanning tree rooted at `basepoint`
/// is the identity. The block of the boundary coupling face `i` of `s` is
/// `(-1)^i` times the transport from the lead vertex of `s` to the lead
/// vertex of the face.
pub fn twist(k: &SimplicialComplex, rho: &EdgeCocycle, basepoint: usize) -> Result<ChainComplex> {
    rho.check_flat(k)?;
    let n = rho.fiber_dim();
    let mut frames: BTreeMap<usize, Matrix> = BTreeMap::new();
    frames.insert(basepoint, Matrix::identity(n));
    for (parent, child) in k.spanning_tree(basepoint)? {
        // frame maps the fiber at v to the basepoint frame
        let f = frames[&parent].matmul(&rho.transport(child, parent)?);
        frames.insert(child, f);
    }
    let gauged = rho.gauge_transform(&frames);

    let counts = k.counts();
    let dims: Vec<usize> = counts.iter().map(|c| c * n).collect();
    let mut boundaries = Vec::with_capacity(counts.len().saturating_sub(1));
    for q in 1..counts.len() {
        let mut d = Matrix::zeros(dims[q - 1], dims[q]);
        for (j, s) in k.simplices(q).iter().enumerate() {
            for (i, f) in faces(s) {
                let row = k.index_of(&f).expect("closed under faces");
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let block = gauged.transport(s[0], f[0])?.scale(sign);
                d.set_block(row * n, j * n, &block);
            }
        }
        boundaries.push(d);
    }
    ChainComplex::new(dims, boundaries, "twisted")
}

/// Barycentric subdivision with the induced local system.
///
/// New vertices are the simplices of `k`, numbered by dimension then
/// lexicographically; vertex `i` of the result is the barycenter of the
/// `i`-th vertex of `k` for `i < #vertices`. The fiber at a barycenter is
/// identified with the fiber at the lead vertex of its simplex, and the new
/// edge `b(s) -- b(t)` (`s` a face of `t`) carries the old transport between
/// the two lead vertices, which is path independent inside `t` because `rho`
/// is flat.
pub fn barycentric_subdivide(
    k: &SimplicialComplex,
    rho: &EdgeCocycle,
) -> Result<(SimplicialComplex, EdgeCocycle)> {
    rho.check_flat(k)?;
    let mut ids: HashMap<Simplex, usize> = HashMap::new();
    let mut lead: Vec<usize> = Vec::new();
    for list in k.all_simplices() {
        for s in list {
            ids.insert(s.clone(), lead.len());
            lead.push(s[0]);
        }
    }

    // all flags s_0 < s_1 < ... < s_r, built by extending downward
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for list in k.all_simplices() {
        for top in list {
            let mut stack: Vec<Vec<Simplex>> = vec![vec![top.clone()]];
            while let Some(chain) = stack.pop() {
                let smallest = chain.last().unwrap().clone();
                chains.push(chain.iter().rev().map(|s| ids[s]).collect());
                if smallest.len() > 1 {
                    let n = smallest.len();
                    for mask in 1u64..((1u64 << n) - 1) {
                        let sub: Simplex = (0..n)
                            .filter(|i| mask & (1 << i) != 0)
                            .map(|i| smallest[i])
                            .collect();
                        let mut next = chain.clone();
                        next.push(sub);
                        stack.push(next);
                    }
                }
            }
        }
    }

    let max_len = chains.iter().map(Vec::len).max().unwrap_or(1);
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); max_len];
    for c in chains {
        by_dim[c.len() - 1].push(c);
    }
    let subdivided = SimplicialComplex::new(by_dim)?;

    let mut edges = BTreeMap::new();
    for e in subdivided.simplices(1) {
        let (a, b) = (e[0], e[1]);
        edges.insert((a, b), rho.transport(lead[a], lead[b])?);
    }
    let cocycle = EdgeCocycle {
        fiber_dim: rho.fiber_dim(),
        edges,
    };
    Ok((subdivided, cocycle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rotation_cycle(m: usize, theta: f64) -> (SimplicialComplex, EdgeCocycle) {
        let k = SimplicialComplex::cycle(m).unwrap();
        let mut rho = EdgeCocycle::trivial(&k, 2);
        rho.edges.insert((0, 1), Matrix::rotation(theta));
        (k, rho)
    }

    #[test]
    fn rejects_bad_complexes() {
        assert!(SimplicialComplex::new(vec![vec![vec![0], vec![1]], vec![vec![0, 2]]]).is_err());
        assert!(SimplicialComplex::new(vec![vec![vec![0], vec![1]]]).is_err()); // disconnected
        assert!(SimplicialComplex::new(vec![vec![vec![0], vec![1]], vec![vec![1, 0]]]).is_err());
        assert!(SimplicialComplex::cycle(2).is_err());
    }

    #[test]
    fn triangle_boundary_is_a_circle() {
        let k = SimplicialComplex::cycle(3).unwrap();
        let c = k.boundary_matrices();
        assert_eq!(c.dims(), &[3, 3]);
        let d = &c.boundaries()[0];
        // edge [0,1] -> [1] - [0]
        assert_eq!(d[(0, 0)], -1.0);
        assert_eq!(d[(1, 0)], 1.0);
        assert_eq!(c.homology_dims().unwrap(), vec![1, 1]);
    }

    #[test]
    fn full_simplex_is_contractible() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1, 2]]).unwrap();
        assert_eq!(
            k.boundary_matrices().homology_dims().unwrap(),
            vec![1, 0, 0]
        );
    }

    #[test]
    fn octahedron_is_a_sphere() {
        // vertices 0..6, antipodal pairs (0,1), (2,3), (4,5)
        let mut tris = Vec::new();
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    tris.push(vec![a, b, c]);
                }
            }
        }
        let k = SimplicialComplex::from_maximal(&tris).unwrap();
        assert_eq!(k.counts(), vec![6, 12, 8]);
        assert_eq!(
            k.boundary_matrices().homology_dims().unwrap(),
            vec![1, 0, 1]
        );
    }

    #[test]
    fn trivial_twist_is_kronecker() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let rho = EdgeCocycle::trivial(&k, 2);
        let t = twist(&k, &rho, 0).unwrap();
        let plain = k.boundary_matrices();
        for (tb, pb) in t.boundaries().iter().zip(plain.boundaries()) {
            assert_eq!(tb, &pb.kron(&Matrix::identity(2)));
        }
    }

    #[test]
    fn twisted_cycle_acyclic_iff_nontrivial_holonomy() {
        let (k, rho) = rotation_cycle(3, 2.0 * PI / 7.0);
        assert_eq!(
            twist(&k, &rho, 0).unwrap().homology_dims().unwrap(),
            vec![0, 0]
        );
        let (k, rho) = rotation_cycle(3, 2.0 * PI);
        assert_eq!(
            twist(&k, &rho, 0).unwrap().homology_dims().unwrap(),
            vec![2, 2]
        );
    }

    #[test]
    fn non_flat_cocycle_rejected() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1, 2]]).unwrap();
        let mut rho = EdgeCocycle::trivial(&k, 2);
        rho.edges.insert((0, 1), Matrix::rotation(0.3));
        match twist(&k, &rho, 0) {
            Err(Error::Flatness { triangle, .. }) => assert_eq!(triangle, [0, 1, 2]),
            other => panic!("expected flatness error, got {other:?}"),
        }
    }

    #[test]
    fn non_orthogonal_edge_rejected() {
        let mut e = BTreeMap::new();
        e.insert((0, 1), Matrix::diag(&[2.0, 1.0]));
        assert!(EdgeCocycle::new(2, e).is_err());
    }

    #[test]
    fn holonomy_of_cycles() {
        let theta = 0.9;
        let (k, rho) = rotation_cycle(4, theta);
        let h = rho.holonomy(&k, &[0, 1, 2, 3, 0]).unwrap();
        assert!(h.sub(&Matrix::rotation(theta)).max_abs() < 1e-15);
        let back = rho.holonomy(&k, &[0, 1, 2, 3, 0, 3, 2, 1, 0]).unwrap();
        assert!(back.sub(&Matrix::identity(2)).max_abs() < 1e-15);
        let triv = EdgeCocycle::trivial(&k, 2)
            .holonomy(&k, &[0, 1, 2, 3, 0])
            .unwrap();
        assert_eq!(triv, Matrix::identity(2));
        assert!(rho.holonomy(&k, &[0, 2, 0]).is_err());
        assert!(rho.holonomy(&k, &[0, 1, 2]).is_err());
    }

    #[test]
    fn subdivide_single_edge() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1]]).unwrap();
        let m = Matrix::rotation(0.4);
        let rho = EdgeCocycle::new(2, BTreeMap::from([((0, 1), m.clone())])).unwrap();
        let (k2, rho2) = barycentric_subdivide(&k, &rho).unwrap();
        assert_eq!(k2.counts(), vec![3, 2]);
        // barycenter of the edge is vertex 2, framed at vertex 0
        assert_eq!(rho2.transport(0, 2).unwrap(), Matrix::identity(2));
        assert!(rho2.transport(2, 1).unwrap().sub(&m).max_abs() < 1e-15);
    }

    #[test]
    fn subdivided_triangle_boundary_keeps_holonomy() {
        let theta = 1.3;
        let (k, rho) = rotation_cycle(3, theta);
        let (k2, rho2) = barycentric_subdivide(&k, &rho).unwrap();
        assert_eq!(k2.counts(), vec![6, 6]);
        // vertices 0,1,2 old; 3 = b[0,1], 4 = b[0,2], 5 = b[1,2]
        let h = rho2.holonomy(&k2, &[0, 3, 1, 5, 2, 4, 0]).unwrap();
        assert!(h.sub(&Matrix::rotation(theta)).max_abs() < 1e-14);
    }

    #[test]
    fn subdivision_counts_top_cells() {
        let k = SimplicialComplex::from_maximal(&[vec![0, 1, 2, 3]]).unwrap();
        let rho = EdgeCocycle::trivial(&k, 1);
        let (k2, rho2) = barycentric_subdivide(&k, &rho).unwrap();
        assert_eq!(k2.simplices(3).len(), 24);
        assert_eq!(k2.euler_characteristic(), 1);
        assert!(rho2.check_flat(&k2).is_ok());
        let k = SimplicialComplex::from_maximal(&[vec![0, 1, 2]]).unwrap();
        let (k2, _) = barycentric_subdivide(&k, &EdgeCocycle::trivial(&k, 1)).unwrap();
        assert_eq!(k2.simplices(2).len(), 6);
    }
}
