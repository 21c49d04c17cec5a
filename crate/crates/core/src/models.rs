//! Worked models and seeded generators for the self-test suites.
//!
//! Three catalogs live here: simplicial spaces with standard self-maps,
//! finite groups of order at most six with full homomorphism enumeration,
//! and the circle and torus presented as free complexes over their
//! fundamental group rings, where a self-map of degree `d` (or with a
//! matrix of winding numbers) acts through Fox derivatives of the induced
//! endomorphism. The random generators produce simplicial self-maps,
//! invariant subcomplex triples, integer chain endomorphisms, twisted
//! group ring endomorphisms, and diagram endomorphisms for the linearity
//! checks; each takes a caller-owned RNG so runs are reproducible.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::chain::{direct_sum_endo, ChainComplex, ChainMap, Ring, RingMatrix, TwistedEndo};
use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::groupring::{
    Group, GroupElement, GroupEndo, GroupHom, GroupRingElement, GroupRingMatrix,
};
use crate::linalg::IntMatrix;
use crate::profunctor::{Profunctor, ProfunctorMap};
use crate::simplicial::{SimplicialComplex, SimplicialMap};

// ---------------------------------------------------------------------
// Simplicial catalog

pub fn point() -> SimplicialComplex {
    SimplicialComplex::new(1, vec![vec![0]]).expect("a vertex is a complex")
}

pub fn interval() -> SimplicialComplex {
    SimplicialComplex::new(2, vec![vec![0, 1]]).expect("an edge is a complex")
}

/// Path with `n_edges` edges on `n_edges + 1` vertices.
pub fn arc(n_edges: usize) -> Result<SimplicialComplex> {
    if n_edges == 0 {
        return Err(Error::Invalid("an arc needs at least one edge".into()));
    }
    SimplicialComplex::new(n_edges + 1, (0..n_edges).map(|i| vec![i, i + 1]).collect())
}

/// Cycle graph on `n >= 3` vertices.
pub fn circle(n: usize) -> Result<SimplicialComplex> {
    if n < 3 {
        return Err(Error::Invalid("a triangulated circle needs three vertices".into()));
    }
    SimplicialComplex::new(n, (0..n).map(|i| vec![i, (i + 1) % n]).collect())
}

/// Boundary of the tetrahedron, a triangulated 2-sphere.
pub fn tetra_boundary() -> SimplicialComplex {
    SimplicialComplex::new(4, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
        .expect("the tetrahedron boundary is a complex")
}

/// Octahedron surface: vertices `i` and `5 - i` are antipodal, faces pick
/// one vertex from each antipodal pair.
pub fn octahedron() -> SimplicialComplex {
    let mut faces = Vec::new();
    for &a in &[0usize, 5] {
        for &b in &[1usize, 4] {
            for &c in &[2usize, 3] {
                faces.push(vec![a, b, c]);
            }
        }
    }
    SimplicialComplex::new(6, faces).expect("the octahedron is a complex")
}

pub fn circle_rotation(n: usize, k: usize) -> Result<SimplicialMap> {
    let c = circle(n)?;
    SimplicialMap::new(c.clone(), c, (0..n).map(|i| (i + k) % n).collect())
}

pub fn circle_reflection(n: usize) -> Result<SimplicialMap> {
    let c = circle(n)?;
    SimplicialMap::new(c.clone(), c, (0..n).map(|i| (n - i) % n).collect())
}

pub fn octahedron_antipode() -> Result<SimplicialMap> {
    let c = octahedron();
    SimplicialMap::new(c.clone(), c, (0..6).map(|i| 5 - i).collect())
}

/// Every shipped simplicial self-map, labeled. The self-test and the
/// chain-versus-homology consistency check walk this list.
pub fn simplicial_catalog() -> Result<Vec<(String, SimplicialMap)>> {
    let mut out: Vec<(String, SimplicialMap)> = Vec::new();
    let mut push = |name: &str, m: SimplicialMap| out.push((name.to_string(), m));

    push("point/id", SimplicialMap::identity(&point()));
    push("interval/id", SimplicialMap::identity(&interval()));
    let iv = interval();
    push("interval/flip", SimplicialMap::new(iv.clone(), iv, vec![1, 0])?);
    let a3 = arc(3)?;
    push("arc3/id", SimplicialMap::identity(&a3));
    push("arc3/collapse", SimplicialMap::constant(&a3, &a3, 0)?);
    let c6 = circle(6)?;
    push("circle6/id", SimplicialMap::identity(&c6));
    push("circle6/rotation", circle_rotation(6, 1)?);
    push("circle6/reflection", circle_reflection(6)?);
    push("circle6/collapse", SimplicialMap::constant(&c6, &c6, 0)?);
    let tb = tetra_boundary();
    push("tetra_boundary/id", SimplicialMap::identity(&tb));
    push("tetra_boundary/swap", SimplicialMap::new(tb.clone(), tb, vec![1, 0, 2, 3])?);
    push("octahedron/id", SimplicialMap::identity(&octahedron()));
    push("octahedron/antipode", octahedron_antipode()?);
    Ok(out)
}

// ---------------------------------------------------------------------
// Small groups and homomorphism enumeration

/// Table groups of order at most six, plus both order-four isomorphism
/// types: the cyclic groups, the Klein four-group, and S3.
pub fn small_groups() -> Result<Vec<(String, Group)>> {
    let c2 = Group::cyclic(2)?;
    Ok(vec![
        ("C1".to_string(), Group::cyclic(1)?),
        ("C2".to_string(), c2.clone()),
        ("C3".to_string(), Group::cyclic(3)?),
        ("C4".to_string(), Group::cyclic(4)?),
        ("C5".to_string(), Group::cyclic(5)?),
        ("C6".to_string(), Group::cyclic(6)?),
        ("V4".to_string(), Group::direct_product(&c2, &c2)?),
        ("S3".to_string(), Group::symmetric(3)?),
    ])
}

fn elem_index(e: &GroupElement) -> Result<usize> {
    match e {
        GroupElement::Finite(i) => Ok(*i),
        _ => Err(Error::Unsupported("expected a table group element".into())),
    }
}

fn table_order(g: &Group) -> Result<usize> {
    if !g.is_finite_table() {
        return Err(Error::Unsupported("homomorphism enumeration needs table groups".into()));
    }
    Ok(g.order().expect("table groups are finite").to_usize().expect("small order"))
}

/// Greedy generating set: repeatedly adjoin the first element outside the
/// subgroup generated so far.
fn greedy_generators(g: &Group) -> Result<Vec<usize>> {
    let n = table_order(g)?;
    let id = elem_index(&g.identity())?;
    let closure = |gens: &[usize]| -> Result<BTreeSet<usize>> {
        let mut seen = BTreeSet::from([id]);
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for &s in gens {
                let y = elem_index(
                    &g.mul(&GroupElement::Finite(x), &GroupElement::Finite(s)),
                )?;
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Ok(seen)
    };
    let mut gens = Vec::new();
    let mut generated = closure(&gens)?;
    while generated.len() < n {
        let next = (0..n).find(|i| !generated.contains(i)).expect("missing element");
        gens.push(next);
        generated = closure(&gens)?;
    }
    Ok(gens)
}

/// All group homomorphisms between two table groups, found by assigning
/// images to a generating set and extending along a breadth-first
/// spanning tree; each candidate is validated on the full table.
pub fn all_homs(source: &Group, target: &Group) -> Result<Vec<GroupHom>> {
    let n = table_order(source)?;
    let m = table_order(target)?;
    let gens = greedy_generators(source)?;
    let id_src = elem_index(&source.identity())?;
    let id_tgt = elem_index(&target.identity())?;

    // Spanning tree: every element is reached as parent * generator.
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order_bfs = vec![id_src];
    let mut seen = vec![false; n];
    seen[id_src] = true;
    let mut qi = 0;
    while qi < order_bfs.len() {
        let x = order_bfs[qi];
        qi += 1;
        for (slot, &s) in gens.iter().enumerate() {
            let y = elem_index(
                &source.mul(&GroupElement::Finite(x), &GroupElement::Finite(s)),
            )?;
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some((x, slot));
                order_bfs.push(y);
            }
        }
    }

    let mut out = Vec::new();
    let total = m.pow(gens.len() as u32);
    for code in 0..total {
        let mut img = Vec::with_capacity(gens.len());
        let mut c = code;
        for _ in 0..gens.len() {
            img.push(c % m);
            c /= m;
        }
        let mut images = vec![0usize; n];
        images[id_src] = id_tgt;
        for &x in &order_bfs[1..] {
            let (p, slot) = parent[x].expect("spanning tree covers the group");
            images[x] = elem_index(&target.mul(
                &GroupElement::Finite(images[p]),
                &GroupElement::Finite(img[slot]),
            ))?;
        }
        if let Ok(h) = GroupHom::finite(source.clone(), target.clone(), images) {
            out.push(h);
        }
    }
    Ok(out)
}

pub fn all_endos(g: &Group) -> Result<Vec<GroupEndo>> {
    all_homs(g, g)?.into_iter().map(GroupEndo::new).collect()
}

/// Z/n presented as a finitely generated abelian group, compatible with
/// matrix homomorphisms out of Z.
pub fn integers_mod(n: u64) -> Result<Group> {
    match n {
        0 => Err(Error::NotAGroup("modulus must be positive".into())),
        1 => Group::fg_abelian(0, Vec::new()),
        _ => Group::fg_abelian(0, vec![BigInt::from(n)]),
    }
}

/// The reduction Z -> Z/n sending the generator to the generator.
pub fn reduction_mod(n: u64) -> Result<GroupHom> {
    let target = integers_mod(n)?;
    let matrix = if n == 1 {
        IntMatrix::zeros(0, 1)
    } else {
        IntMatrix::from_i64(1, 1, &[1])
    };
    GroupHom::abelian(Group::integers(), target, matrix)
}

// ---------------------------------------------------------------------
// Circle and torus over their fundamental group rings

/// Monomial `t_gen^k` in an abelian group ring.
fn gen_power(group: &Group, gen: usize, k: i64) -> Result<GroupRingElement> {
    let dim = group
        .abelian_dim()
        .ok_or_else(|| Error::Unsupported("monomial powers need an abelian group".into()))?;
    let mut coords = vec![BigInt::zero(); dim];
    coords[gen] = BigInt::from(k);
    GroupRingElement::monomial(group, &GroupElement::Abelian(coords), BigInt::one())
}

/// Fox derivative of `t_gen -> t_gen^e` with respect to `t_gen`: the
/// geometric sum `1 + t + ... + t^(e-1)` for `e >= 0`, and
/// `-(t^-1 + ... + t^e)` for negative `e`. In both cases
/// `(t - 1) * fox_delta(e) == t^e - 1`.
fn fox_delta(group: &Group, gen: usize, e: i64) -> Result<GroupRingElement> {
    let mut acc = GroupRingElement::zero(group);
    if e >= 0 {
        for j in 0..e {
            acc = acc.add(&gen_power(group, gen, j)?);
        }
    } else {
        for j in 1..=(-e) {
            acc = acc.sub(&gen_power(group, gen, -j)?);
        }
    }
    Ok(acc)
}

/// The circle as a free Z[Z]-complex: one cell in degrees 0 and 1 with
/// differential `t - 1`.
pub fn circle_complex() -> Result<ChainComplex> {
    let g = Group::integers();
    let d1 = GroupRingMatrix::new(
        &g,
        1,
        1,
        vec![gen_power(&g, 0, 1)?.sub(&GroupRingElement::one(&g))],
    )?;
    ChainComplex::new(
        Ring::Group(g),
        BTreeMap::from([(0, 1), (1, 1)]),
        BTreeMap::from([(1, RingMatrix::Grp(d1))]),
    )
}

/// Degree-`d` self-map of the circle: the twist sends `t` to `t^d` and
/// the degree-one component is the Fox derivative of `t^d`.
pub fn circle_endo(d: i64) -> Result<TwistedEndo> {
    let c = circle_complex()?;
    let g = c.ring().group().expect("circle complex is over Z[Z]").clone();
    let phi = GroupEndo::abelian(g.clone(), IntMatrix::from_i64(1, 1, &[d]))?;
    let f0 = GroupRingMatrix::identity(&g, 1);
    let f1 = GroupRingMatrix::new(&g, 1, 1, vec![fox_delta(&g, 0, d)?])?;
    TwistedEndo::new(
        c,
        Some(phi),
        BTreeMap::from([(0, RingMatrix::Grp(f0)), (1, RingMatrix::Grp(f1))]),
    )
}

/// The torus as a free Z[Z^2]-complex: cells 1, 2, 1 in degrees 0, 1, 2
/// with the standard CW differentials.
pub fn torus_complex() -> Result<ChainComplex> {
    let g = Group::integers_squared();
    let one = GroupRingElement::one(&g);
    let t1 = gen_power(&g, 0, 1)?;
    let t2 = gen_power(&g, 1, 1)?;
    let d2 = GroupRingMatrix::new(&g, 2, 1, vec![one.sub(&t2), t1.sub(&one)])?;
    let d1 = GroupRingMatrix::new(&g, 1, 2, vec![t1.sub(&one), t2.sub(&one)])?;
    ChainComplex::new(
        Ring::Group(g),
        BTreeMap::from([(0, 1), (1, 2), (2, 1)]),
        BTreeMap::from([(1, RingMatrix::Grp(d1)), (2, RingMatrix::Grp(d2))]),
    )
}

/// Torus self-map with winding matrix `[[a, b], [c, d]]`: the twist sends
/// `t1` to `t1^a t2^c` and `t2` to `t1^b t2^d`. Degree-one components are
/// the Fox derivative matrix of the twist, the degree-two component is
/// its determinant-like expansion; the twisted chain law is checked at
/// construction.
pub fn torus_endo(m: &IntMatrix) -> Result<TwistedEndo> {
    if m.rows() != 2 || m.cols() != 2 {
        return Err(Error::Dimension("torus winding matrix must be 2 by 2".into()));
    }
    let small = |i: usize, j: usize| -> Result<i64> {
        m.get(i, j)
            .to_i64()
            .ok_or_else(|| Error::Invalid("winding number out of range".into()))
    };
    let (a, b) = (small(0, 0)?, small(0, 1)?);
    let (c, d) = (small(1, 0)?, small(1, 1)?);

    let complex = torus_complex()?;
    let g = complex.ring().group().expect("torus complex is over Z[Z^2]").clone();
    let phi = GroupEndo::abelian(g.clone(), m.clone())?;

    let da_t1 = fox_delta(&g, 0, a)?;
    let db_t1 = fox_delta(&g, 0, b)?;
    let dc_t2 = fox_delta(&g, 1, c)?;
    let dd_t2 = fox_delta(&g, 1, d)?;
    let f1 = GroupRingMatrix::new(
        &g,
        2,
        2,
        vec![
            da_t1.clone(),
            db_t1.clone(),
            gen_power(&g, 0, a)?.mul(&dc_t2),
            gen_power(&g, 0, b)?.mul(&dd_t2),
        ],
    )?;
    let f2 = GroupRingMatrix::new(
        &g,
        1,
        1,
        vec![da_t1
            .mul(&gen_power(&g, 0, b)?)
            .mul(&dd_t2)
            .sub(&db_t1.mul(&gen_power(&g, 0, a)?).mul(&dc_t2))],
    )?;
    TwistedEndo::new(
        complex,
        Some(phi),
        BTreeMap::from([
            (0, RingMatrix::Grp(GroupRingMatrix::identity(&g, 1))),
            (1, RingMatrix::Grp(f1)),
            (2, RingMatrix::Grp(f2)),
        ]),
    )
}

// ---------------------------------------------------------------------
// Random simplicial data

/// Random complex on at most `max_vertices` vertices: every vertex is
/// present, edges appear independently, and a few random triangles are
/// thrown in.
pub fn random_complex(rng: &mut impl Rng, max_vertices: usize) -> Result<SimplicialComplex> {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let mut gens: Vec<Vec<usize>> = (0..nv).map(|i| vec![i]).collect();
    for i in 0..nv {
        for j in (i + 1)..nv {
            if rng.gen_bool(0.3) {
                gens.push(vec![i, j]);
            }
        }
    }
    if nv >= 3 {
        for _ in 0..rng.gen_range(0..=3) {
            let mut pool: Vec<usize> = (0..nv).collect();
            for k in 0..3 {
                let r = rng.gen_range(k..nv);
                pool.swap(k, r);
            }
            let mut tri = pool[..3].to_vec();
            tri.sort_unstable();
            gens.push(tri);
        }
    }
    SimplicialComplex::new(nv, gens)
}

/// Random simplicial self-map: rejection sampling over vertex maps with a
/// constant map as fallback, so the draw always succeeds.
pub fn random_self_map(rng: &mut impl Rng, c: &SimplicialComplex) -> SimplicialMap {
    let nv = c.n_vertices();
    if nv == 0 {
        return SimplicialMap::identity(c);
    }
    for _ in 0..40 {
        let vm: Vec<usize> = (0..nv).map(|_| rng.gen_range(0..nv)).collect();
        if let Ok(m) = SimplicialMap::new(c.clone(), c.clone(), vm) {
            return m;
        }
    }
    SimplicialMap::constant(c, c, rng.gen_range(0..nv)).expect("vertices are simplices")
}

/// Random invariant-subcomplex instance `(i, f, g)`: an inclusion
/// `i: A -> X`, a self-map `f` of `X` with `f(A)` inside `A`, and the
/// restriction `g`. The subcomplex is grown from a random seed of
/// simplices and closed under images of `f`; closing the generating set
/// suffices because faces of images are images of faces.
pub fn random_invariant_triple(
    rng: &mut impl Rng,
    max_vertices: usize,
) -> Result<(SimplicialMap, SimplicialMap, SimplicialMap)> {
    let x = random_complex(rng, max_vertices)?;
    let f = random_self_map(rng, &x);

    let mut selected: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in x.all_simplices() {
        if rng.gen_bool(0.35) {
            selected.insert(s.clone());
        }
    }
    loop {
        let mut grew = false;
        for s in selected.iter().cloned().collect::<Vec<_>>() {
            let mut img: Vec<usize> = s.iter().map(|&v| f.vertex_map()[v]).collect();
            img.sort_unstable();
            img.dedup();
            if selected.insert(img) {
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }

    let verts: Vec<usize> =
        selected.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let local: BTreeMap<usize, usize> =
        verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let a = SimplicialComplex::new(
        verts.len(),
        selected.iter().map(|s| s.iter().map(|v| local[v]).collect()).collect(),
    )?;
    let i = SimplicialMap::new(a.clone(), x.clone(), verts.clone())?;
    let g_images: Vec<usize> = verts.iter().map(|&v| local[&f.vertex_map()[v]]).collect();
    let g = SimplicialMap::new(a.clone(), a, g_images)?;
    Ok((i, f, g))
}

// ---------------------------------------------------------------------
// Random integer chain endomorphisms

fn random_int_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, BigInt::from(rng.gen_range(-bound..=bound)));
        }
    }
    m
}

/// Random bounded complex over Z with a chain endomorphism: a direct sum
/// of concentrated and two-term pieces carrying blockwise endomorphisms,
/// perturbed by a null-homotopic term `d h + h d` so components mix
/// across the blocks.
pub fn random_chain_endo(rng: &mut impl Rng) -> Result<TwistedEndo> {
    let mut acc: Option<TwistedEndo> = None;
    for _ in 0..rng.gen_range(1..=3) {
        let piece = if rng.gen_bool(0.4) {
            let deg = rng.gen_range(0..=3i64);
            let rank = rng.gen_range(1..=2usize);
            let c = ChainComplex::concentrated(Ring::Int, deg, rank);
            let m = RingMatrix::Int(random_int_matrix(rng, rank, rank, 3));
            TwistedEndo::new(c, None, BTreeMap::from([(deg, m)]))?
        } else {
            let deg = rng.gen_range(0..=2i64);
            let r0 = rng.gen_range(1..=2usize);
            let r1 = rng.gen_range(1..=2usize);
            let d = RingMatrix::Int(random_int_matrix(rng, r0, r1, 2));
            let c = ChainComplex::new(
                Ring::Int,
                BTreeMap::from([(deg, r0), (deg + 1, r1)]),
                BTreeMap::from([(deg + 1, d)]),
            )?;
            let s = BigInt::from(rng.gen_range(-2..=2i64));
            let comps = BTreeMap::from([
                (deg, RingMatrix::Int(IntMatrix::identity(r0).scale(&s))),
                (deg + 1, RingMatrix::Int(IntMatrix::identity(r1).scale(&s))),
            ]);
            TwistedEndo::new(c, None, comps)?
        };
        acc = Some(match acc {
            None => piece,
            Some(e) => direct_sum_endo(&e, &piece)?,
        });
    }
    let f = acc.expect("at least one piece");
    let c = f.complex().clone();

    let mut h: BTreeMap<i64, RingMatrix> = BTreeMap::new();
    for &n in &c.degrees() {
        if c.rank(n + 1) > 0 && rng.gen_bool(0.7) {
            h.insert(n, RingMatrix::Int(random_int_matrix(rng, c.rank(n + 1), c.rank(n), 2)));
        }
    }
    let h_at = |n: i64| -> RingMatrix {
        h.get(&n).cloned().unwrap_or_else(|| RingMatrix::zeros(c.ring(), c.rank(n + 1), c.rank(n)))
    };
    let mut comps = BTreeMap::new();
    for &n in &c.degrees() {
        let perturbed = f
            .component(n)
            .add(&c.diff(n + 1).mul(&h_at(n))?)?
            .add(&h_at(n - 1).mul(&c.diff(n))?)?;
        comps.insert(n, perturbed);
    }
    TwistedEndo::new(c, None, comps)
}

// ---------------------------------------------------------------------
// Random group ring data

pub fn random_group_element(rng: &mut impl Rng, group: &Group) -> Result<GroupElement> {
    if group.is_finite_table() {
        let n = table_order(group)?;
        return Ok(GroupElement::Finite(rng.gen_range(0..n)));
    }
    let shape = group
        .abelian_shape()
        .ok_or_else(|| Error::Unsupported("cannot sample from this group".into()))?
        .clone();
    let mut coords = Vec::new();
    for _ in 0..shape.free_rank {
        coords.push(BigInt::from(rng.gen_range(-2..=2i64)));
    }
    for t in &shape.torsion {
        let b = t.to_i64().unwrap_or(i64::MAX).max(1);
        coords.push(BigInt::from(rng.gen_range(0..b)));
    }
    Ok(GroupElement::Abelian(coords))
}

pub fn random_group_ring_element(
    rng: &mut impl Rng,
    group: &Group,
    max_terms: usize,
    bound: i64,
) -> Result<GroupRingElement> {
    let mut acc = GroupRingElement::zero(group);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let g = random_group_element(rng, group)?;
        let c = BigInt::from(rng.gen_range(-bound..=bound));
        acc = acc.add(&GroupRingElement::monomial(group, &g, c)?);
    }
    Ok(acc)
}

pub fn random_group_ring_matrix(
    rng: &mut impl Rng,
    group: &Group,
    rows: usize,
    cols: usize,
) -> Result<GroupRingMatrix> {
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        entries.push(random_group_ring_element(rng, group, 2, 2)?);
    }
    GroupRingMatrix::new(group, rows, cols, entries)
}

/// Random twisted endomorphism over a group ring. Either the differential
/// vanishes and the components are free, or the complex is a two-term
/// `R: C_1 -> C_0` with components `(R W, W phi(R))`, which satisfy the
/// twisted chain law for every choice of the matrix `W`.
pub fn random_twisted_endo(
    rng: &mut impl Rng,
    group: &Group,
    phi: &GroupEndo,
) -> Result<TwistedEndo> {
    let ring = Ring::Group(group.clone());
    let r0 = rng.gen_range(1..=2usize);
    let r1 = rng.gen_range(1..=2usize);
    if rng.gen_bool(0.35) {
        let c = ChainComplex::new(
            ring.clone(),
            BTreeMap::from([(0, r0), (1, r1)]),
            BTreeMap::new(),
        )?;
        let comps = BTreeMap::from([
            (0, RingMatrix::Grp(random_group_ring_matrix(rng, group, r0, r0)?)),
            (1, RingMatrix::Grp(random_group_ring_matrix(rng, group, r1, r1)?)),
        ]);
        return TwistedEndo::new(c, Some(phi.clone()), comps);
    }
    let r = random_group_ring_matrix(rng, group, r0, r1)?;
    let w = random_group_ring_matrix(rng, group, r1, r0)?;
    let c = ChainComplex::new(
        ring,
        BTreeMap::from([(0, r0), (1, r1)]),
        BTreeMap::from([(1, RingMatrix::Grp(r.clone()))]),
    )?;
    let comps = BTreeMap::from([
        (0, RingMatrix::Grp(r.mul(&w)?)),
        (1, RingMatrix::Grp(w.mul(&r.twist(phi)?)?)),
    ]);
    TwistedEndo::new(c, Some(phi.clone()), comps)
}

// ---------------------------------------------------------------------
// Random diagrams for the linearity checks

/// Random diagram on the discrete two-object category with an
/// endomorphism: naturality is vacuous, so both legs are independent
/// random chain endomorphisms.
pub fn random_diagram_on_discrete(rng: &mut impl Rng) -> Result<(Profunctor, ProfunctorMap)> {
    let e0 = random_chain_endo(rng)?;
    let e1 = random_chain_endo(rng)?;
    let prof = Profunctor::new(
        FinCategory::discrete(2)?,
        FinCategory::terminal(),
        vec![e0.complex().clone(), e1.complex().clone()],
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let f = ProfunctorMap::new(
        prof.clone(),
        prof.clone(),
        vec![e0.as_chain_map()?, e1.as_chain_map()?],
    )?;
    Ok((prof, f))
}

/// Random diagram on the arrow category with a natural endomorphism. One
/// family uses graded entries with a free random action and one scalar
/// per degree shared by both legs; the other uses independent random
/// endomorphisms over the zero action. Both make naturality automatic.
pub fn random_diagram_on_arrow(rng: &mut impl Rng) -> Result<(Profunctor, ProfunctorMap)> {
    let cat = FinCategory::arrow();
    let alpha = cat.hom(0, 1)[0];
    if rng.gen_bool(0.5) {
        let degs: Vec<i64> = (0..=2).collect();
        let mut ranks_a = BTreeMap::new();
        let mut ranks_b = BTreeMap::new();
        for &n in &degs {
            ranks_a.insert(n, rng.gen_range(0..=2usize));
            ranks_b.insert(n, rng.gen_range(0..=2usize));
        }
        let ca = ChainComplex::new(Ring::Int, ranks_a, BTreeMap::new())?;
        let cb = ChainComplex::new(Ring::Int, ranks_b, BTreeMap::new())?;
        let mut act = BTreeMap::new();
        let mut fa = BTreeMap::new();
        let mut fb = BTreeMap::new();
        for &n in &degs {
            let (ra, rb) = (ca.rank(n), cb.rank(n));
            if ra > 0 && rb > 0 {
                act.insert(n, RingMatrix::Int(random_int_matrix(rng, rb, ra, 2)));
            }
            let s = BigInt::from(rng.gen_range(-2..=2i64));
            if ra > 0 {
                fa.insert(n, RingMatrix::Int(IntMatrix::identity(ra).scale(&s)));
            }
            if rb > 0 {
                fb.insert(n, RingMatrix::Int(IntMatrix::identity(rb).scale(&s)));
            }
        }
        let action = ChainMap::new(ca.clone(), cb.clone(), act)?;
        let prof = Profunctor::new(
            cat,
            FinCategory::terminal(),
            vec![ca.clone(), cb.clone()],
            BTreeMap::from([((alpha, 0), action)]),
            BTreeMap::new(),
        )?;
        let f = ProfunctorMap::new(
            prof.clone(),
            prof.clone(),
            vec![ChainMap::new(ca.clone(), ca, fa)?, ChainMap::new(cb.clone(), cb, fb)?],
        )?;
        return Ok((prof, f));
    }
    let ea = random_chain_endo(rng)?;
    let eb = random_chain_endo(rng)?;
    let (ca, cb) = (ea.complex().clone(), eb.complex().clone());
    let action = ChainMap::new(ca.clone(), cb.clone(), BTreeMap::new())?;
    let prof = Profunctor::new(
        cat,
        FinCategory::terminal(),
        vec![ca, cb],
        BTreeMap::from([((alpha, 0), action)]),
        BTreeMap::new(),
    )?;
    let f = ProfunctorMap::new(
        prof.clone(),
        prof.clone(),
        vec![ea.as_chain_map()?, eb.as_chain_map()?],
    )?;
    Ok((prof, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::chain::trace_via_dual;
    use crate::groupring::twisted_classes;
    use crate::profunctor::{
        cofiber_weight_certificate, coproduct_weight_certificate, verify_linearity,
    };
    use crate::simplicial::verify_additivity;

    #[test]
    fn octahedron_is_a_two_sphere() {
        let c = octahedron().chain_complex();
        assert_eq!(c.homology_at(0).unwrap().to_string(), "Z");
        assert!(c.homology_at(1).unwrap().is_trivial());
        assert_eq!(c.homology_at(2).unwrap().to_string(), "Z");
    }

    #[test]
    fn catalog_maps_equate_chain_and_homology_traces() {
        for (name, m) in simplicial_catalog().unwrap() {
            let chain = m.lefschetz_number().unwrap();
            let homology = m.homology_lefschetz_number().unwrap();
            assert_eq!(chain, homology, "trace mismatch for {}", name);
        }
    }

    #[test]
    fn hom_counts_match_known_values() {
        let groups: BTreeMap<String, Group> = small_groups().unwrap().into_iter().collect();
        let count = |a: &str, b: &str| all_homs(&groups[a], &groups[b]).unwrap().len();
        assert_eq!(count("S3", "S3"), 10);
        assert_eq!(count("C6", "C6"), 6);
        assert_eq!(count("C2", "C4"), 2);
        assert_eq!(count("V4", "C2"), 4);
        assert_eq!(count("S3", "C3"), 1);
        assert_eq!(count("C3", "S3"), 3);
        assert_eq!(count("C1", "S3"), 1);
    }

    #[test]
    fn hom_enumeration_rejects_infinite_groups() {
        assert!(all_homs(&Group::integers(), &Group::cyclic(2).unwrap()).is_err());
    }

    #[test]
    fn reduction_mod_wraps_the_generator() {
        let i = reduction_mod(4).unwrap();
        let target = integers_mod(4).unwrap();
        let img = i.apply(&GroupElement::Abelian(vec![BigInt::from(5)])).unwrap();
        let expected = target.element(&GroupElement::Abelian(vec![BigInt::one()])).unwrap();
        assert_eq!(target.element(&img).unwrap(), expected);
    }

    #[test]
    fn circle_endo_augmented_lefschetz_is_one_minus_degree() {
        for d in -2..=5i64 {
            let f = circle_endo(d).unwrap();
            assert_eq!(f.augmented_lefschetz().unwrap(), BigInt::from(1 - d));
        }
    }

    #[test]
    fn circle_endo_reidemeister_has_all_classes_with_coefficient_minus_one() {
        for d in [2i64, 3, 5] {
            let r = circle_endo(d).unwrap().reidemeister_trace().unwrap();
            let labels = r.set().labels().unwrap();
            assert_eq!(labels.len(), (d - 1) as usize, "degree {}", d);
            for l in &labels {
                assert_eq!(r.coeff(l), -BigInt::one(), "degree {}", d);
            }
            assert_eq!(r.augment(), BigInt::from(1 - d));
        }
    }

    #[test]
    fn torus_twisted_classes_count_the_cokernel() {
        let m = IntMatrix::from_i64(2, 2, &[2, 1, 0, 3]);
        let f = torus_endo(&m).unwrap();
        let phi = f.twist().as_ref().unwrap();
        let set = twisted_classes(f.complex().ring().group().unwrap(), phi).unwrap();
        assert_eq!(set.labels().unwrap().len(), 2);
        assert_eq!(f.reidemeister_trace().unwrap().augment(), BigInt::from(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn torus_endo_augment_is_det_of_identity_minus_winding(
            a in -3i64..=3, b in -3i64..=3, c in -3i64..=3, d in -3i64..=3,
        ) {
            let m = IntMatrix::from_i64(2, 2, &[a, b, c, d]);
            // Construction proves the Fox components satisfy the twisted
            // chain law; the augmentation gives the Lefschetz number.
            let f = torus_endo(&m).unwrap();
            let det = (1 - a) * (1 - d) - b * c;
            prop_assert_eq!(f.augmented_lefschetz().unwrap(), BigInt::from(det));
        }
    }

    #[test]
    fn random_invariant_triples_satisfy_additivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let (i, f, g) = random_invariant_triple(&mut rng, 7).unwrap();
            let report = verify_additivity(&i, &f, &g).unwrap();
            assert!(report.holds, "{:?}", report);
        }
    }

    #[test]
    fn random_chain_endos_trace_the_same_through_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let f = random_chain_endo(&mut rng).unwrap();
            assert_eq!(trace_via_dual(&f).unwrap(), f.lefschetz_trace().unwrap());
        }
    }

    #[test]
    fn random_twisted_endos_build_over_every_small_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (_, g) in small_groups().unwrap() {
            for phi in all_endos(&g).unwrap().into_iter().take(3) {
                let f = random_twisted_endo(&mut rng, &g, &phi).unwrap();
                f.reidemeister_trace().unwrap();
            }
        }
    }

    #[test]
    fn random_diagrams_obey_the_linearity_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let cofiber = cofiber_weight_certificate().unwrap();
        for _ in 0..8 {
            let (diagram, f) = random_diagram_on_arrow(&mut rng).unwrap();
            let report = verify_linearity(&cofiber, &diagram, &f).unwrap();
            assert!(report.ok, "{:?}", report);
        }
        let coproduct = coproduct_weight_certificate().unwrap();
        for _ in 0..8 {
            let (diagram, f) = random_diagram_on_discrete(&mut rng).unwrap();
            let report = verify_linearity(&coproduct, &diagram, &f).unwrap();
            assert!(report.ok, "{:?}", report);
        }
    }
}
