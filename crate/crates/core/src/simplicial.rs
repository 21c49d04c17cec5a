//! Finite abstract simplicial complexes and simplicial maps, with their
//! induced chain complexes and Lefschetz numbers.
//!
//! Simplices are stored sorted, closed under faces, and indexed in sorted
//! order per dimension, so induced chain maps are deterministic. A vertex
//! map induces, on each simplex, either zero (when it collapses vertices)
//! or a signed basis vector, the sign being that of the permutation that
//! resorts the image.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::chain::{cone_endo, ChainComplex, ChainMap, Ring, RingMatrix, TwistedEndo};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

/// Abstract simplicial complex on vertices `0..n_vertices`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    /// dimension -> sorted list of sorted vertex tuples.
    simplices: BTreeMap<usize, Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Builds the complex generated by the given simplices: all faces are
    /// added automatically. Vertices must lie in `0..n_vertices`; repeated
    /// vertices in a generator are rejected.
    pub fn new(n_vertices: usize, generators: Vec<Vec<usize>>) -> Result<Self> {
        let mut closed: BTreeSet<Vec<usize>> = BTreeSet::new();
        for g in generators {
            if g.is_empty() {
                return Err(Error::Invalid("empty simplex".into()));
            }
            let mut s = g;
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid("simplex with repeated vertex".into()));
            }
            if *s.last().unwrap() >= n_vertices {
                return Err(Error::Invalid(format!(
                    "vertex {} out of range",
                    s.last().unwrap()
                )));
            }
            // Every nonempty subset is a face; simplex dimensions stay
            // small so the power set is fine.
            let k = s.len();
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
                closed.insert(face);
            }
        }
        let mut simplices: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for s in closed {
            simplices.entry(s.len() - 1).or_default().push(s);
        }
        Ok(SimplicialComplex { n_vertices, simplices })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Largest simplex dimension, None for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.keys().next_back().copied()
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(&dim).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.values().flatten()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index_of(simplex).is_some()
    }

    fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        if simplex.is_empty() {
            return None;
        }
        self.simplices
            .get(&(simplex.len() - 1))?
            .binary_search_by(|s| s.as_slice().cmp(simplex))
            .ok()
    }

    /// Simplicial chain complex over Z with the alternating face boundary.
    pub fn chain_complex(&self) -> ChainComplex {
        let mut ranks = BTreeMap::new();
        for (&dim, list) in &self.simplices {
            ranks.insert(dim as i64, list.len());
        }
        let mut diffs = BTreeMap::new();
        for (&dim, list) in &self.simplices {
            if dim == 0 {
                continue;
            }
            let below = self.simplices(dim - 1);
            let mut d = IntMatrix::zeros(below.len(), list.len());
            for (j, s) in list.iter().enumerate() {
                for drop in 0..s.len() {
                    let mut face: Vec<usize> = s.clone();
                    face.remove(drop);
                    let i = self
                        .index_of(&face)
                        .expect("faces are present by closure");
                    let sign = if drop % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    let v = d.get(i, j) + sign;
                    d.set(i, j, v);
                }
            }
            diffs.insert(dim as i64, RingMatrix::Int(d));
        }
        ChainComplex::new(Ring::Int, ranks, diffs)
            .expect("simplicial boundaries square to zero")
    }

    pub fn euler_characteristic(&self) -> BigInt {
        self.chain_complex().euler_characteristic()
    }

    /// True when every simplex of `self` is a simplex of `other`, read in
    /// the same vertex numbering.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.n_vertices <= other.n_vertices
            && self.all_simplices().all(|s| other.contains(s))
    }
}

/// Vertex map between simplicial complexes, validated to send simplices
/// to simplices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplicialMap {
    source: SimplicialComplex,
    target: SimplicialComplex,
    vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        source: SimplicialComplex,
        target: SimplicialComplex,
        vertex_map: Vec<usize>,
    ) -> Result<Self> {
        if vertex_map.len() != source.n_vertices {
            return Err(Error::Invalid(format!(
                "vertex map has {} entries for {} vertices",
                vertex_map.len(),
                source.n_vertices
            )));
        }
        if vertex_map.iter().any(|&v| v >= target.n_vertices) {
            return Err(Error::Invalid("vertex image out of range".into()));
        }
        for s in source.all_simplices() {
            let mut image: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
            image.sort_unstable();
            image.dedup();
            if !target.contains(&image) {
                return Err(Error::Invalid(format!(
                    "image of simplex {:?} is not a simplex",
                    s
                )));
            }
        }
        Ok(SimplicialMap { source, target, vertex_map })
    }

    pub fn identity(c: &SimplicialComplex) -> Self {
        SimplicialMap {
            source: c.clone(),
            target: c.clone(),
            vertex_map: (0..c.n_vertices).collect(),
        }
    }

    /// The map collapsing everything to one vertex of the target.
    pub fn constant(
        source: &SimplicialComplex,
        target: &SimplicialComplex,
        vertex: usize,
    ) -> Result<Self> {
        if !target.contains(&[vertex]) {
            return Err(Error::Invalid("constant target vertex is not in the complex".into()));
        }
        SimplicialMap::new(
            source.clone(),
            target.clone(),
            vec![vertex; source.n_vertices],
        )
    }

    pub fn source(&self) -> &SimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.n_vertices];
        for &v in &self.vertex_map {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &SimplicialMap) -> Result<SimplicialMap> {
        if first.target != self.source {
            return Err(Error::Invalid("composition endpoints do not match".into()));
        }
        SimplicialMap::new(
            first.source.clone(),
            self.target.clone(),
            first.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
        )
    }

    /// Induced map on simplicial chains: zero on collapsed simplices,
    /// otherwise the resorted image with its permutation sign.
    pub fn chain_map(&self) -> Result<ChainMap> {
        let sc = self.source.chain_complex();
        let tc = self.target.chain_complex();
        let mut components = BTreeMap::new();
        for (&dim, list) in &self.source.simplices {
            let rows = self.target.simplices(dim).len();
            let mut m = IntMatrix::zeros(rows, list.len());
            for (j, s) in list.iter().enumerate() {
                let image: Vec<usize> = s.iter().map(|&v| self.vertex_map[v]).collect();
                let mut sorted = image.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let i = self
                    .target
                    .index_of(&sorted)
                    .expect("map validity guarantees the image simplex");
                m.set(i, j, permutation_sign(&image));
            }
            components.insert(dim as i64, RingMatrix::Int(m));
        }
        ChainMap::new(sc, tc, components)
    }

    /// The chain endomorphism of a simplicial self-map.
    pub fn endo(&self) -> Result<TwistedEndo> {
        if !self.is_endo() {
            return Err(Error::Invalid("not a self-map".into()));
        }
        let f = self.chain_map()?;
        let components = f.components().map(|(&n, m)| (n, m.clone())).collect();
        TwistedEndo::new(self.source.chain_complex(), None, components)
    }

    /// Chain-level Lefschetz number.
    pub fn lefschetz_number(&self) -> Result<BigInt> {
        self.endo()?.lefschetz_trace()
    }

    /// Lefschetz number computed on free homology. Equality with the
    /// chain-level number is the trace-on-homology consistency law.
    pub fn homology_lefschetz_number(&self) -> Result<BigInt> {
        self.endo()?.homology_lefschetz()
    }
}

/// Sign of the permutation sorting `image` (which must have no repeats).
fn permutation_sign(image: &[usize]) -> BigInt {
    let mut inversions = 0usize;
    for i in 0..image.len() {
        for j in i + 1..image.len() {
            if image[i] > image[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Outcome of the Lefschetz additivity check for a subcomplex pair.
#[derive(Clone, Debug)]
pub struct AdditivityReport {
    pub ambient: BigInt,
    pub sub: BigInt,
    pub relative: BigInt,
    pub holds: bool,
}

/// Verifies Lefschetz additivity for `f` on an ambient complex preserving
/// the image of an injective inclusion `i`, with `g` the restricted map:
/// the relative number is computed independently as the trace on the
/// mapping cone of `i`, and the law is `ambient - sub == relative`.
pub fn verify_additivity(
    i: &SimplicialMap,
    f: &SimplicialMap,
    g: &SimplicialMap,
) -> Result<AdditivityReport> {
    if !i.is_injective() {
        return Err(Error::Invalid("inclusion must be injective on vertices".into()));
    }
    if !f.is_endo() || !g.is_endo() {
        return Err(Error::Invalid("additivity needs self-maps".into()));
    }
    if f.source() != i.target() || g.source() != i.source() {
        return Err(Error::Invalid(
            "maps do not match the inclusion's endpoints".into(),
        ));
    }
    if f.compose(i)? != i.compose(g)? {
        return Err(Error::Invalid(
            "ambient map does not restrict to the subcomplex map".into(),
        ));
    }
    let j = i.chain_map()?;
    let fe = f.endo()?;
    let ge = g.endo()?;
    let cone_f = cone_endo(&j, &fe, &ge)?;
    let ambient = fe.lefschetz_trace()?;
    let sub = ge.lefschetz_trace()?;
    let relative = cone_f.lefschetz_trace()?;
    let holds = &ambient - &sub == relative;
    Ok(AdditivityReport { ambient, sub, relative, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn circle(n: usize) -> SimplicialComplex {
        let edges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SimplicialComplex::new(n, edges).unwrap()
    }

    fn arc(n_edges: usize) -> SimplicialComplex {
        let edges = (0..n_edges).map(|i| vec![i, i + 1]).collect();
        SimplicialComplex::new(n_edges + 1, edges).unwrap()
    }

    fn tetra_boundary() -> SimplicialComplex {
        let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        SimplicialComplex::new(4, faces).unwrap()
    }

    #[test]
    fn closure_generates_faces() {
        let c = SimplicialComplex::new(3, vec![vec![2, 0, 1]]).unwrap();
        assert_eq!(c.simplices(0).len(), 3);
        assert_eq!(c.simplices(1).len(), 3);
        assert_eq!(c.simplices(2).len(), 1);
        assert!(c.contains(&[0, 2]));
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(SimplicialComplex::new(2, vec![vec![0, 0]]).is_err());
        assert!(SimplicialComplex::new(2, vec![vec![0, 5]]).is_err());
        assert!(SimplicialComplex::new(2, vec![vec![]]).is_err());
    }

    #[test]
    fn circle_homology() {
        let c = circle(6).chain_complex();
        assert_eq!(c.homology_at(0).unwrap().to_string(), "Z");
        assert_eq!(c.homology_at(1).unwrap().to_string(), "Z");
        assert_eq!(circle(6).euler_characteristic(), BigInt::zero());
    }

    #[test]
    fn sphere_homology() {
        let s = tetra_boundary().chain_complex();
        assert_eq!(s.homology_at(0).unwrap().to_string(), "Z");
        assert!(s.homology_at(1).unwrap().is_trivial());
        assert_eq!(s.homology_at(2).unwrap().to_string(), "Z");
        assert_eq!(tetra_boundary().euler_characteristic(), BigInt::from(2));
    }

    #[test]
    fn map_validation_rejects_non_simplicial_images() {
        let c = circle(4);
        // Sending 0 -> 0, 1 -> 2 maps the edge {0,1} to {0,2}, not an edge.
        assert!(SimplicialMap::new(c.clone(), c, vec![0, 2, 2, 3]).is_err());
    }

    #[test]
    fn rotation_of_circle_has_zero_lefschetz() {
        let c = circle(6);
        let rot = SimplicialMap::new(c.clone(), c.clone(), vec![1, 2, 3, 4, 5, 0]).unwrap();
        assert_eq!(rot.lefschetz_number().unwrap(), BigInt::zero());
        assert_eq!(rot.homology_lefschetz_number().unwrap(), BigInt::zero());
    }

    #[test]
    fn reflection_of_circle_has_lefschetz_two() {
        let c = circle(6);
        // Reflection fixing vertices 0 and 3.
        let refl = SimplicialMap::new(c.clone(), c.clone(), vec![0, 5, 4, 3, 2, 1]).unwrap();
        assert_eq!(refl.lefschetz_number().unwrap(), BigInt::from(2));
        assert_eq!(refl.homology_lefschetz_number().unwrap(), BigInt::from(2));
    }

    #[test]
    fn constant_map_has_lefschetz_one() {
        let c = circle(5);
        let k = SimplicialMap::constant(&c, &c, 2).unwrap();
        assert_eq!(k.lefschetz_number().unwrap(), BigInt::one());
        assert_eq!(k.homology_lefschetz_number().unwrap(), BigInt::one());
    }

    #[test]
    fn antipode_of_sphere_has_degree_minus_one_lefschetz() {
        // The boundary of the tetrahedron has no free antipode; use the
        // octahedron, whose antipodal vertex map is simplicial.
        let faces = vec![
            vec![0, 2, 4], vec![0, 2, 5], vec![0, 3, 4], vec![0, 3, 5],
            vec![1, 2, 4], vec![1, 2, 5], vec![1, 3, 4], vec![1, 3, 5],
        ];
        let oct = SimplicialComplex::new(6, faces).unwrap();
        assert_eq!(oct.euler_characteristic(), BigInt::from(2));
        let antipode = SimplicialMap::new(oct.clone(), oct.clone(), vec![1, 0, 3, 2, 5, 4]).unwrap();
        // deg == -1 on the two-sphere: L == 1 + (-1)^2 * (-1) == 0.
        assert_eq!(antipode.lefschetz_number().unwrap(), BigInt::zero());
        assert_eq!(antipode.homology_lefschetz_number().unwrap(), BigInt::zero());
    }

    #[test]
    fn identity_additivity_is_euler_additivity() {
        let x = circle(6);
        let a = arc(2);
        let i = SimplicialMap::new(a.clone(), x.clone(), vec![0, 1, 2]).unwrap();
        let report = verify_additivity(
            &i,
            &SimplicialMap::identity(&x),
            &SimplicialMap::identity(&a),
        )
        .unwrap();
        assert!(report.holds);
        assert_eq!(report.ambient, BigInt::zero());
        assert_eq!(report.sub, BigInt::one());
        assert_eq!(report.relative, BigInt::from(-1));
    }

    #[test]
    fn reflection_additivity_on_preserved_arc() {
        let x = circle(6);
        // Reflection fixing 1 and 4 preserves the arc on vertices 0..2.
        let f = SimplicialMap::new(x.clone(), x.clone(), vec![2, 1, 0, 5, 4, 3]).unwrap();
        let a = arc(2);
        let i = SimplicialMap::new(a.clone(), x.clone(), vec![0, 1, 2]).unwrap();
        let g = SimplicialMap::new(a.clone(), a.clone(), vec![2, 1, 0]).unwrap();
        let report = verify_additivity(&i, &f, &g).unwrap();
        assert!(report.holds);
        assert_eq!(report.ambient, BigInt::from(2));
        assert_eq!(report.sub, BigInt::one());
        assert_eq!(report.relative, BigInt::one());
    }

    #[test]
    fn additivity_rejects_non_commuting_data() {
        let x = circle(6);
        let a = arc(2);
        let i = SimplicialMap::new(a.clone(), x.clone(), vec![0, 1, 2]).unwrap();
        let rot = SimplicialMap::new(x.clone(), x.clone(), vec![1, 2, 3, 4, 5, 0]).unwrap();
        let g = SimplicialMap::identity(&a);
        assert!(verify_additivity(&i, &rot, &g).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// Random generated complexes: the boundary squares to zero (by
        /// construction), the Euler characteristic matches the homology
        /// ranks, and the identity satisfies the homology trace law.
        #[test]
        fn random_complex_euler_vs_homology(
            gens in proptest::collection::vec(
                proptest::collection::btree_set(0usize..5, 1..=3),
                1..6,
            )
        ) {
            let gens: Vec<Vec<usize>> = gens.into_iter().map(|s| s.into_iter().collect()).collect();
            let c = SimplicialComplex::new(5, gens).unwrap();
            let chain = c.chain_complex();
            let mut alt = BigInt::zero();
            for n in 0..=3i64 {
                let h = chain.homology_at(n).unwrap();
                let r = BigInt::from(h.free_rank);
                if n % 2 == 0 { alt += r } else { alt -= r }
            }
            prop_assert_eq!(c.euler_characteristic(), alt);
            let id = SimplicialMap::identity(&c);
            prop_assert_eq!(id.lefschetz_number().unwrap(), id.homology_lefschetz_number().unwrap());
        }

        /// Any valid vertex self-map of a random complex satisfies the
        /// chain/homology trace consistency.
        #[test]
        fn random_self_map_hopf_consistency(
            gens in proptest::collection::vec(
                proptest::collection::btree_set(0usize..5, 1..=3),
                1..6,
            ),
            vmap in proptest::collection::vec(0usize..5, 5),
        ) {
            let gens: Vec<Vec<usize>> = gens.into_iter().map(|s| s.into_iter().collect()).collect();
            let c = SimplicialComplex::new(5, gens).unwrap();
            let map = SimplicialMap::new(c.clone(), c.clone(), vmap);
            prop_assume!(map.is_ok());
            let map = map.unwrap();
            prop_assert_eq!(map.lefschetz_number().unwrap(), map.homology_lefschetz_number().unwrap());
        }
    }
}
