//! Chain-valued profunctors between finite loop-free categories.
//!
//! Composition is the two-sided bar construction over the middle category,
//! shadows are its cyclic variant, and both come with explicit basis
//! bookkeeping so that the structural maps (associator, unitors, cyclic
//! symmetry) can be written down as matrices and validated numerically.
//! On top of that sit duality certificates: replacement objects for the
//! unit and counit of a dual pair, quasi-isomorphism legs, and triangle
//! identities checked per entry through homotopy witnesses that an integer
//! linear solver can search for. Traces of endomorphisms of a certified
//! dualizable profunctor are read off in the class basis of the unit
//! shadow, which for loop-free categories is free on the identities.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chain::{
    coevaluation_z, dual_z, evaluation_z, mapping_cone, tensor_map_z, tensor_z,
    verify_chain_homotopy, ChainComplex, ChainMap, Ring, RingMatrix, TwistedEndo,
};
use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::linalg::{solve, HomologyPresentation, IntMatrix, LinearSystem};

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn place(out: &mut IntMatrix, r0: usize, c0: usize, block: &IntMatrix) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let v = out.get(r0 + i, c0 + j) + block.get(i, j);
            out.set(r0 + i, c0 + j, v);
        }
    }
}

/// Composable string of nonidentity morphisms `b_k -> ... -> b_1 -> b_0`;
/// `mors[j]` points from object `j+1` to object `j`. The empty string is
/// the bar-degree-zero cell at `obj`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct BarChain {
    obj: usize,
    mors: Vec<usize>,
}

impl BarChain {
    fn len(&self) -> usize {
        self.mors.len()
    }

    fn front(&self) -> usize {
        self.obj
    }

    fn back(&self, cat: &FinCategory) -> usize {
        match self.mors.last() {
            Some(&m) => cat.morphism(m).source,
            None => self.obj,
        }
    }
}

/// All bar cells of a loop-free category, by length and then discovery
/// order. Loop-freeness forbids repeated objects along a string, so the
/// enumeration stops after at most `n_objects - 1` extensions.
fn bar_chains(cat: &FinCategory) -> Vec<BarChain> {
    let mut level: Vec<BarChain> = (0..cat.n_objects())
        .map(|b| BarChain { obj: b, mors: Vec::new() })
        .collect();
    let mut all = Vec::new();
    while !level.is_empty() {
        all.extend(level.iter().cloned());
        let mut next = Vec::new();
        for ch in &level {
            let back = ch.back(cat);
            for m in cat.nonidentity_morphisms() {
                if cat.morphism(m).target == back {
                    let mut mors = ch.mors.clone();
                    mors.push(m);
                    next.push(BarChain { obj: ch.obj, mors });
                }
            }
        }
        level = next;
    }
    all
}

/// Block decomposition of a tensor product in one total degree, mirroring
/// the tensor basis order: ascending in the left degree `p`, with
/// `x_i (x) y_j` at `offset + i * rank_y(q) + j`.
fn tensor_offsets(x: &ChainComplex, y: &ChainComplex, n: i64) -> Vec<(i64, i64, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for &p in x.degrees().iter() {
        let q = n - p;
        let r = x.rank(p) * y.rank(q);
        if r > 0 {
            out.push((p, q, offset));
            offset += r;
        }
    }
    out
}

fn tensor_encode(x: &ChainComplex, y: &ChainComplex, n: i64, p: i64, i: usize, j: usize) -> usize {
    for (bp, bq, off) in tensor_offsets(x, y, n) {
        if bp == p {
            return off + i * y.rank(bq) + j;
        }
    }
    panic!("tensor block absent in degree {}", n);
}

fn tensor_decode(x: &ChainComplex, y: &ChainComplex, n: i64, idx: usize) -> (i64, usize, usize) {
    for (p, q, off) in tensor_offsets(x, y, n) {
        let r = x.rank(p) * y.rank(q);
        if idx < off + r {
            let local = idx - off;
            let ry = y.rank(q);
            return (p, local / ry, local % ry);
        }
    }
    panic!("tensor index {} out of range in degree {}", idx, n);
}

/// Basis bookkeeping for a direct sum of shifted summands, one per bar
/// chain: summand `i` sits at total degree `chains[i].len() + internal`.
struct BarLayout<'a> {
    chains: &'a [BarChain],
    summands: &'a [ChainComplex],
}

impl BarLayout<'_> {
    fn rank(&self, t: i64) -> usize {
        self.chains
            .iter()
            .zip(self.summands)
            .map(|(ch, s)| s.rank(t - ch.len() as i64))
            .sum()
    }

    fn offset(&self, t: i64, ci: usize) -> usize {
        let mut off = 0;
        for (i, (ch, s)) in self.chains.iter().zip(self.summands).enumerate() {
            if i == ci {
                return off;
            }
            off += s.rank(t - ch.len() as i64);
        }
        panic!("chain index {} out of range", ci);
    }

    fn encode(&self, t: i64, ci: usize, local: usize) -> usize {
        self.offset(t, ci) + local
    }

    fn decode(&self, t: i64, idx: usize) -> (usize, usize) {
        let mut off = 0;
        for (i, (ch, s)) in self.chains.iter().zip(self.summands).enumerate() {
            let r = s.rank(t - ch.len() as i64);
            if idx < off + r {
                return (i, idx - off);
            }
            off += r;
        }
        panic!("bar index {} out of range in degree {}", idx, t);
    }

    fn degrees(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for (ch, s) in self.chains.iter().zip(self.summands) {
            let k = ch.len() as i64;
            for n in s.degrees() {
                out.insert(n + k);
            }
        }
        out
    }
}

/// One simplicial face out of a bar summand: target chain, sign, and the
/// map to apply (`None` means the summand is unchanged).
type Face = (usize, BigInt, Option<ChainMap>);

/// Total complex of a bar-style direct sum: internal differentials carry
/// the sign `(-1)^k` of their bar degree, faces carry their alternating
/// signs and land one bar degree lower.
fn assemble_bar_complex(
    chains: &[BarChain],
    summands: &[ChainComplex],
    faces: &[Vec<Face>],
) -> Result<ChainComplex> {
    let layout = BarLayout { chains, summands };
    let mut ranks = BTreeMap::new();
    for t in layout.degrees() {
        let r = layout.rank(t);
        if r > 0 {
            ranks.insert(t, r);
        }
    }
    let mut diffs = BTreeMap::new();
    for &t in ranks.keys() {
        let rows = layout.rank(t - 1);
        let cols = layout.rank(t);
        if rows == 0 {
            continue;
        }
        let mut d = IntMatrix::zeros(rows, cols);
        for (ci, ch) in chains.iter().enumerate() {
            let k = ch.len() as i64;
            let s = &summands[ci];
            let w = s.rank(t - k);
            if w == 0 {
                continue;
            }
            let c0 = layout.offset(t, ci);
            if s.rank(t - k - 1) > 0 {
                let block = s.diff(t - k).as_int()?.scale(&sign(k));
                place(&mut d, layout.offset(t - 1, ci), c0, &block);
            }
            for (tgt, sg, map) in &faces[ci] {
                let block = match map {
                    Some(m) => m.component(t - k).as_int()?.clone(),
                    None => IntMatrix::identity(w),
                };
                if block.rows() == 0 {
                    continue;
                }
                place(&mut d, layout.offset(t - 1, *tgt), c0, &block.scale(sg));
            }
        }
        diffs.insert(t, RingMatrix::Int(d));
    }
    ChainComplex::new(Ring::Int, ranks, diffs)
}

/// Chain-complex-valued profunctor between finite loop-free categories.
/// `entry(a, b)` is covariant in the source object `a` and contravariant
/// in the target object `b`. Construction validates functoriality of both
/// actions and that they commute with each other.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Profunctor {
    source: FinCategory,
    target: FinCategory,
    entries: Vec<ChainComplex>,
    left: BTreeMap<(usize, usize), ChainMap>,
    right: BTreeMap<(usize, usize), ChainMap>,
}

impl Profunctor {
    /// Entries are indexed by `a * target.n_objects() + b`. The map
    /// `left[(f, b)]` is the action `entry(src f, b) -> entry(dst f, b)` of
    /// a nonidentity source morphism, `right[(a, g)]` the action
    /// `entry(a, dst g) -> entry(a, src g)` of a nonidentity target
    /// morphism. Actions with a zero complex on either end may be omitted.
    pub fn new(
        source: FinCategory,
        target: FinCategory,
        entries: Vec<ChainComplex>,
        mut left: BTreeMap<(usize, usize), ChainMap>,
        mut right: BTreeMap<(usize, usize), ChainMap>,
    ) -> Result<Profunctor> {
        if !source.is_loop_free() || !target.is_loop_free() {
            return Err(Error::Unsupported(
                "profunctors are implemented over loop-free categories".into(),
            ));
        }
        let (na, nb) = (source.n_objects(), target.n_objects());
        if entries.len() != na * nb {
            return Err(Error::NotAProfunctor(format!(
                "expected {} entries, got {}",
                na * nb,
                entries.len()
            )));
        }
        for e in &entries {
            if *e.ring() != Ring::Int {
                return Err(Error::Unsupported("profunctor entries are integer complexes".into()));
            }
        }
        for &(f, b) in left.keys() {
            if f >= source.n_morphisms() || source.is_identity(f) || b >= nb {
                return Err(Error::NotAProfunctor(
                    "left action keyed by an identity or out-of-range morphism".into(),
                ));
            }
        }
        for &(a, g) in right.keys() {
            if g >= target.n_morphisms() || target.is_identity(g) || a >= na {
                return Err(Error::NotAProfunctor(
                    "right action keyed by an identity or out-of-range morphism".into(),
                ));
            }
        }
        let entry = |a: usize, b: usize| &entries[a * nb + b];
        for f in source.nonidentity_morphisms() {
            let (x, x2) = (source.morphism(f).source, source.morphism(f).target);
            for b in 0..nb {
                let (s, t) = (entry(x, b), entry(x2, b));
                match left.get(&(f, b)) {
                    Some(map) => {
                        if map.source() != s || map.target() != t {
                            return Err(Error::NotAProfunctor(format!(
                                "left action of morphism {} at object {} has wrong endpoints",
                                f, b
                            )));
                        }
                    }
                    None => {
                        if s.is_zero() || t.is_zero() {
                            left.insert((f, b), ChainMap::zero(s, t)?);
                        } else {
                            return Err(Error::NotAProfunctor(format!(
                                "missing left action of morphism {} at object {}",
                                f, b
                            )));
                        }
                    }
                }
            }
        }
        for g in target.nonidentity_morphisms() {
            let (y, y2) = (target.morphism(g).source, target.morphism(g).target);
            for a in 0..na {
                let (s, t) = (entry(a, y2), entry(a, y));
                match right.get(&(a, g)) {
                    Some(map) => {
                        if map.source() != s || map.target() != t {
                            return Err(Error::NotAProfunctor(format!(
                                "right action of morphism {} at object {} has wrong endpoints",
                                g, a
                            )));
                        }
                    }
                    None => {
                        if s.is_zero() || t.is_zero() {
                            right.insert((a, g), ChainMap::zero(s, t)?);
                        } else {
                            return Err(Error::NotAProfunctor(format!(
                                "missing right action of morphism {} at object {}",
                                g, a
                            )));
                        }
                    }
                }
            }
        }
        let p = Profunctor { source, target, entries, left, right };
        // Functoriality of the covariant action.
        for f in p.source.nonidentity_morphisms() {
            for g in p.source.nonidentity_morphisms() {
                if p.source.morphism(f).target != p.source.morphism(g).source {
                    continue;
                }
                let gf = p.source.compose(g, f)?;
                for b in 0..p.target.n_objects() {
                    let composite = p.left_action(g, b).compose(&p.left_action(f, b))?;
                    if composite != p.left_action(gf, b) {
                        return Err(Error::NotAProfunctor(format!(
                            "left action is not functorial at composite of {} and {}",
                            g, f
                        )));
                    }
                }
            }
        }
        // Functoriality of the contravariant action.
        for f in p.target.nonidentity_morphisms() {
            for g in p.target.nonidentity_morphisms() {
                if p.target.morphism(f).target != p.target.morphism(g).source {
                    continue;
                }
                let gf = p.target.compose(g, f)?;
                for a in 0..p.source.n_objects() {
                    let composite = p.right_action(a, f).compose(&p.right_action(a, g))?;
                    if composite != p.right_action(a, gf) {
                        return Err(Error::NotAProfunctor(format!(
                            "right action is not functorial at composite of {} and {}",
                            g, f
                        )));
                    }
                }
            }
        }
        // The two actions commute.
        for f in p.source.nonidentity_morphisms() {
            let (x, x2) = (p.source.morphism(f).source, p.source.morphism(f).target);
            for g in p.target.nonidentity_morphisms() {
                let (y, y2) = (p.target.morphism(g).source, p.target.morphism(g).target);
                let one = p.left_action(f, y).compose(&p.right_action(x, g))?;
                let two = p.right_action(x2, g).compose(&p.left_action(f, y2))?;
                if one != two {
                    return Err(Error::NotAProfunctor(format!(
                        "actions of source morphism {} and target morphism {} do not commute",
                        f, g
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn source(&self) -> &FinCategory {
        &self.source
    }

    pub fn target(&self) -> &FinCategory {
        &self.target
    }

    pub fn entry(&self, a: usize, b: usize) -> &ChainComplex {
        &self.entries[a * self.target.n_objects() + b]
    }

    pub fn entries(&self) -> &[ChainComplex] {
        &self.entries
    }

    pub fn left_actions(&self) -> &BTreeMap<(usize, usize), ChainMap> {
        &self.left
    }

    pub fn right_actions(&self) -> &BTreeMap<(usize, usize), ChainMap> {
        &self.right
    }

    /// Covariant action of any source morphism, identities included.
    pub fn left_action(&self, f: usize, b: usize) -> ChainMap {
        if self.source.is_identity(f) {
            ChainMap::identity(self.entry(self.source.morphism(f).source, b))
        } else {
            self.left[&(f, b)].clone()
        }
    }

    /// Contravariant action of any target morphism, identities included.
    pub fn right_action(&self, a: usize, g: usize) -> ChainMap {
        if self.target.is_identity(g) {
            ChainMap::identity(self.entry(a, self.target.morphism(g).source))
        } else {
            self.right[&(a, g)].clone()
        }
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target
    }

    pub fn shift(&self, k: i64) -> Result<Profunctor> {
        let entries = self.entries.iter().map(|e| e.shift(k)).collect();
        let mut left = BTreeMap::new();
        for (&key, f) in &self.left {
            left.insert(key, shift_chain_map(f, k)?);
        }
        let mut right = BTreeMap::new();
        for (&key, f) in &self.right {
            right.insert(key, shift_chain_map(f, k)?);
        }
        Profunctor::new(self.source.clone(), self.target.clone(), entries, left, right)
    }
}

fn shift_chain_map(f: &ChainMap, k: i64) -> Result<ChainMap> {
    let components = f.components().map(|(&n, m)| (n + k, m.clone())).collect();
    ChainMap::new(f.source().shift(k), f.target().shift(k), components)
}

/// Entrywise chain map between parallel profunctors, natural in both
/// slots; naturality is validated at construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProfunctorMap {
    source: Profunctor,
    target: Profunctor,
    components: Vec<ChainMap>,
}

impl ProfunctorMap {
    pub fn new(source: Profunctor, target: Profunctor, components: Vec<ChainMap>) -> Result<Self> {
        if source.source != target.source || source.target != target.target {
            return Err(Error::NotAProfunctor("profunctor map endpoints are not parallel".into()));
        }
        if components.len() != source.entries.len() {
            return Err(Error::NotAProfunctor("one component per entry required".into()));
        }
        let (na, nb) = (source.source.n_objects(), source.target.n_objects());
        let comp = |a: usize, b: usize| &components[a * nb + b];
        for a in 0..na {
            for b in 0..nb {
                let c = comp(a, b);
                if c.source() != source.entry(a, b) || c.target() != target.entry(a, b) {
                    return Err(Error::NotAProfunctor(format!(
                        "component at ({}, {}) has wrong endpoints",
                        a, b
                    )));
                }
            }
        }
        for f in source.source.nonidentity_morphisms() {
            let (x, x2) = (source.source.morphism(f).source, source.source.morphism(f).target);
            for b in 0..nb {
                let one = target.left_action(f, b).compose(comp(x, b))?;
                let two = comp(x2, b).compose(&source.left_action(f, b))?;
                if one != two {
                    return Err(Error::NotAProfunctor(format!(
                        "not natural for source morphism {} at object {}",
                        f, b
                    )));
                }
            }
        }
        for g in source.target.nonidentity_morphisms() {
            let (y, y2) = (source.target.morphism(g).source, source.target.morphism(g).target);
            for a in 0..na {
                let one = target.right_action(a, g).compose(comp(a, y2))?;
                let two = comp(a, y).compose(&source.right_action(a, g))?;
                if one != two {
                    return Err(Error::NotAProfunctor(format!(
                        "not natural for target morphism {} at object {}",
                        g, a
                    )));
                }
            }
        }
        Ok(ProfunctorMap { source, target, components })
    }

    pub fn identity(p: &Profunctor) -> Self {
        let components = p.entries.iter().map(ChainMap::identity).collect();
        ProfunctorMap { source: p.clone(), target: p.clone(), components }
    }

    pub fn source(&self) -> &Profunctor {
        &self.source
    }

    pub fn target(&self) -> &Profunctor {
        &self.target
    }

    pub fn component(&self, a: usize, b: usize) -> &ChainMap {
        &self.components[a * self.source.target.n_objects() + b]
    }

    pub fn components(&self) -> &[ChainMap] {
        &self.components
    }

    /// `self` after `first`. Naturality is preserved, so no revalidation.
    pub fn compose(&self, first: &ProfunctorMap) -> Result<ProfunctorMap> {
        if first.target != self.source {
            return Err(Error::NotAProfunctor("composition endpoints do not match".into()));
        }
        let mut components = Vec::with_capacity(self.components.len());
        for (mine, theirs) in self.components.iter().zip(&first.components) {
            components.push(mine.compose(theirs)?);
        }
        Ok(ProfunctorMap {
            source: first.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    pub fn scale(&self, c: &BigInt) -> ProfunctorMap {
        ProfunctorMap {
            source: self.source.clone(),
            target: self.target.clone(),
            components: self.components.iter().map(|f| f.scale(c)).collect(),
        }
    }

    /// True when every component has an acyclic mapping cone.
    pub fn is_objectwise_quasi_iso(&self) -> Result<bool> {
        for comp in &self.components {
            let cone = mapping_cone(comp)?;
            for n in cone.degrees() {
                if !cone.homology_at(n)?.is_trivial() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Unit profunctor of a category: `entry(x, y)` is free on the morphisms
/// `y -> x` in degree zero, with post- and pre-composition actions.
pub fn unit_profunctor(cat: &FinCategory) -> Result<Profunctor> {
    let n = cat.n_objects();
    let mut entries = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            entries.push(ChainComplex::concentrated(Ring::Int, 0, cat.hom(y, x).len()));
        }
    }
    let entry = |x: usize, y: usize| entries[x * n + y].clone();
    let mut left = BTreeMap::new();
    for f in cat.nonidentity_morphisms() {
        let (x, x2) = (cat.morphism(f).source, cat.morphism(f).target);
        for y in 0..n {
            let dom = cat.hom(y, x);
            let cod = cat.hom(y, x2);
            let mut m = IntMatrix::zeros(cod.len(), dom.len());
            for (j, &g) in dom.iter().enumerate() {
                let fg = cat.compose(f, g)?;
                let i = cod.iter().position(|&h| h == fg).expect("composite lies in hom set");
                m.set(i, j, BigInt::one());
            }
            let map = ChainMap::new(
                entry(x, y),
                entry(x2, y),
                [(0, RingMatrix::Int(m))].into_iter().collect(),
            )?;
            left.insert((f, y), map);
        }
    }
    let mut right = BTreeMap::new();
    for g in cat.nonidentity_morphisms() {
        let (y, y2) = (cat.morphism(g).source, cat.morphism(g).target);
        for x in 0..n {
            let dom = cat.hom(y2, x);
            let cod = cat.hom(y, x);
            let mut m = IntMatrix::zeros(cod.len(), dom.len());
            for (j, &h) in dom.iter().enumerate() {
                let hg = cat.compose(h, g)?;
                let i = cod.iter().position(|&e| e == hg).expect("composite lies in hom set");
                m.set(i, j, BigInt::one());
            }
            let map = ChainMap::new(
                entry(x, y2),
                entry(x, y),
                [(0, RingMatrix::Int(m))].into_iter().collect(),
            )?;
            right.insert((x, g), map);
        }
    }
    Profunctor::new(cat.clone(), cat.clone(), entries, left, right)
}

/// Bar composite of two profunctors, keeping the summand bookkeeping so
/// structural maps can address individual basis vectors.
#[derive(Clone, Debug)]
pub struct Coend {
    prof: Profunctor,
    chains: Vec<BarChain>,
    /// Per entry `a * nC + c`, one tensor summand per chain.
    summands: Vec<Vec<ChainComplex>>,
}

impl Coend {
    pub fn profunctor(&self) -> &Profunctor {
        &self.prof
    }

    pub fn into_profunctor(self) -> Profunctor {
        self.prof
    }

    fn layout(&self, a: usize, c: usize) -> BarLayout<'_> {
        let nc = self.prof.target.n_objects();
        BarLayout { chains: &self.chains, summands: &self.summands[a * nc + c] }
    }
}

/// Composite `fst (.) snd` over the middle category: in entry `(a, c)`,
/// the summand for a middle chain is `fst(a, front) (x) snd(back, c)`
/// placed in total degree `chain length + internal degree`. The faces act
/// by the contravariant action of `fst` at the front, composition inside
/// the chain, and the covariant action of `snd` at the back; internal
/// differentials carry the bar-degree sign.
pub fn coend(fst: &Profunctor, snd: &Profunctor) -> Result<Coend> {
    if fst.target() != snd.source() {
        return Err(Error::NotAProfunctor(
            "composition needs a shared middle category".into(),
        ));
    }
    let mid = fst.target().clone();
    let a_cat = fst.source().clone();
    let c_cat = snd.target().clone();
    let chains = bar_chains(&mid);
    let index: BTreeMap<&BarChain, usize> =
        chains.iter().enumerate().map(|(i, ch)| (ch, i)).collect();
    let (na, nc) = (a_cat.n_objects(), c_cat.n_objects());

    let mut summands = Vec::with_capacity(na * nc);
    for a in 0..na {
        for c in 0..nc {
            let mut v = Vec::with_capacity(chains.len());
            for ch in &chains {
                v.push(tensor_z(fst.entry(a, ch.front()), snd.entry(ch.back(&mid), c))?);
            }
            summands.push(v);
        }
    }

    let mut entries = Vec::with_capacity(na * nc);
    for a in 0..na {
        for c in 0..nc {
            let mut faces: Vec<Vec<Face>> = Vec::with_capacity(chains.len());
            for ch in &chains {
                let k = ch.len();
                let mut fs = Vec::new();
                if k > 0 {
                    let back = ch.back(&mid);
                    let beta1 = ch.mors[0];
                    let tgt = BarChain {
                        obj: mid.morphism(beta1).source,
                        mors: ch.mors[1..].to_vec(),
                    };
                    let map = tensor_map_z(
                        &fst.right_action(a, beta1),
                        &ChainMap::identity(snd.entry(back, c)),
                    )?;
                    fs.push((index[&tgt], BigInt::one(), Some(map)));
                    for i in 1..k {
                        let comp = mid.compose(ch.mors[i - 1], ch.mors[i])?;
                        let mut mors = ch.mors.clone();
                        mors.splice(i - 1..=i, [comp]);
                        let tgt = BarChain { obj: ch.obj, mors };
                        fs.push((index[&tgt], sign(i as i64), None));
                    }
                    let betak = ch.mors[k - 1];
                    let tgt = BarChain { obj: ch.obj, mors: ch.mors[..k - 1].to_vec() };
                    let map = tensor_map_z(
                        &ChainMap::identity(fst.entry(a, ch.front())),
                        &snd.left_action(betak, c),
                    )?;
                    fs.push((index[&tgt], sign(k as i64), Some(map)));
                }
                faces.push(fs);
            }
            entries.push(assemble_bar_complex(&chains, &summands[a * nc + c], &faces)?);
        }
    }

    // Outer actions, block diagonal over chains.
    let entry_of = |a: usize, c: usize| &entries[a * nc + c];
    let mut left = BTreeMap::new();
    for f in a_cat.nonidentity_morphisms() {
        let (x, x2) = (a_cat.morphism(f).source, a_cat.morphism(f).target);
        for c in 0..nc {
            let src_layout = BarLayout { chains: &chains, summands: &summands[x * nc + c] };
            let dst_layout = BarLayout { chains: &chains, summands: &summands[x2 * nc + c] };
            let mut components = BTreeMap::new();
            for t in src_layout.degrees().union(&dst_layout.degrees()).copied().collect::<Vec<_>>() {
                let (rows, cols) = (dst_layout.rank(t), src_layout.rank(t));
                if cols == 0 || rows == 0 {
                    continue;
                }
                let mut m = IntMatrix::zeros(rows, cols);
                for (ci, ch) in chains.iter().enumerate() {
                    let k = ch.len() as i64;
                    let block = tensor_map_z(
                        &fst.left_action(f, ch.front()),
                        &ChainMap::identity(snd.entry(ch.back(&mid), c)),
                    )?;
                    let b = block.component(t - k).as_int()?.clone();
                    if b.rows() > 0 && b.cols() > 0 {
                        place(&mut m, dst_layout.offset(t, ci), src_layout.offset(t, ci), &b);
                    }
                }
                components.insert(t, RingMatrix::Int(m));
            }
            left.insert(
                (f, c),
                ChainMap::new(entry_of(x, c).clone(), entry_of(x2, c).clone(), components)?,
            );
        }
    }
    let mut right = BTreeMap::new();
    for g in c_cat.nonidentity_morphisms() {
        let (y, y2) = (c_cat.morphism(g).source, c_cat.morphism(g).target);
        for a in 0..na {
            let src_layout = BarLayout { chains: &chains, summands: &summands[a * nc + y2] };
            let dst_layout = BarLayout { chains: &chains, summands: &summands[a * nc + y] };
            let mut components = BTreeMap::new();
            for t in src_layout.degrees().union(&dst_layout.degrees()).copied().collect::<Vec<_>>() {
                let (rows, cols) = (dst_layout.rank(t), src_layout.rank(t));
                if cols == 0 || rows == 0 {
                    continue;
                }
                let mut m = IntMatrix::zeros(rows, cols);
                for (ci, ch) in chains.iter().enumerate() {
                    let k = ch.len() as i64;
                    let block = tensor_map_z(
                        &ChainMap::identity(fst.entry(a, ch.front())),
                        &snd.right_action(ch.back(&mid), g),
                    )?;
                    let b = block.component(t - k).as_int()?.clone();
                    if b.rows() > 0 && b.cols() > 0 {
                        place(&mut m, dst_layout.offset(t, ci), src_layout.offset(t, ci), &b);
                    }
                }
                components.insert(t, RingMatrix::Int(m));
            }
            right.insert(
                (a, g),
                ChainMap::new(entry_of(a, y2).clone(), entry_of(a, y).clone(), components)?,
            );
        }
    }

    let prof = Profunctor::new(a_cat, c_cat, entries, left, right)?;
    Ok(Coend { prof, chains, summands })
}

/// Functoriality of the composite in both arguments.
pub fn coend_map(f: &ProfunctorMap, g: &ProfunctorMap) -> Result<ProfunctorMap> {
    let src = coend(f.source(), g.source())?;
    let dst = coend(f.target(), g.target())?;
    let mid = f.source().target().clone();
    let (na, nc) = (src.prof.source.n_objects(), src.prof.target.n_objects());
    let mut components = Vec::with_capacity(na * nc);
    for a in 0..na {
        for c in 0..nc {
            let src_layout = src.layout(a, c);
            let dst_layout = dst.layout(a, c);
            let mut comps = BTreeMap::new();
            for t in src_layout.degrees().union(&dst_layout.degrees()).copied().collect::<Vec<_>>() {
                let (rows, cols) = (dst_layout.rank(t), src_layout.rank(t));
                if rows == 0 || cols == 0 {
                    continue;
                }
                let mut m = IntMatrix::zeros(rows, cols);
                for (ci, ch) in src.chains.iter().enumerate() {
                    let k = ch.len() as i64;
                    let block = tensor_map_z(
                        f.component(a, ch.front()),
                        g.component(ch.back(&mid), c),
                    )?;
                    let b = block.component(t - k).as_int()?.clone();
                    if b.rows() > 0 && b.cols() > 0 {
                        place(&mut m, dst_layout.offset(t, ci), src_layout.offset(t, ci), &b);
                    }
                }
                comps.insert(t, RingMatrix::Int(m));
            }
            components.push(ChainMap::new(
                src.prof.entry(a, c).clone(),
                dst.prof.entry(a, c).clone(),
                comps,
            )?);
        }
    }
    ProfunctorMap::new(src.into_profunctor(), dst.into_profunctor(), components)
}

/// Cyclic bar complex of an endo-profunctor: the summand of a chain is the
/// entry from its back object to its front object, so the first face acts
/// on the contravariant slot and the last face wraps around through the
/// covariant one.
#[derive(Clone, Debug)]
pub struct Shadow {
    complex: ChainComplex,
    chains: Vec<BarChain>,
    summands: Vec<ChainComplex>,
}

impl Shadow {
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    fn layout(&self) -> BarLayout<'_> {
        BarLayout { chains: &self.chains, summands: &self.summands }
    }
}

pub fn shadow(q: &Profunctor) -> Result<Shadow> {
    if !q.is_endo() {
        return Err(Error::NotAProfunctor("shadows take endo-profunctors".into()));
    }
    let cat = q.source().clone();
    let chains = bar_chains(&cat);
    let index: BTreeMap<&BarChain, usize> =
        chains.iter().enumerate().map(|(i, ch)| (ch, i)).collect();
    let summands: Vec<ChainComplex> = chains
        .iter()
        .map(|ch| q.entry(ch.back(&cat), ch.front()).clone())
        .collect();
    let mut faces: Vec<Vec<Face>> = Vec::with_capacity(chains.len());
    for ch in &chains {
        let k = ch.len();
        let mut fs = Vec::new();
        if k > 0 {
            let back = ch.back(&cat);
            let alpha1 = ch.mors[0];
            let tgt = BarChain { obj: cat.morphism(alpha1).source, mors: ch.mors[1..].to_vec() };
            fs.push((index[&tgt], BigInt::one(), Some(q.right_action(back, alpha1))));
            for i in 1..k {
                let comp = cat.compose(ch.mors[i - 1], ch.mors[i])?;
                let mut mors = ch.mors.clone();
                mors.splice(i - 1..=i, [comp]);
                let tgt = BarChain { obj: ch.obj, mors };
                fs.push((index[&tgt], sign(i as i64), None));
            }
            let alphak = ch.mors[k - 1];
            let tgt = BarChain { obj: ch.obj, mors: ch.mors[..k - 1].to_vec() };
            fs.push((index[&tgt], sign(k as i64), Some(q.left_action(alphak, ch.front()))));
        }
        faces.push(fs);
    }
    let complex = assemble_bar_complex(&chains, &summands, &faces)?;
    Ok(Shadow { complex, chains, summands })
}

/// Map induced on shadows by a map of endo-profunctors.
pub fn shadow_map(f: &ProfunctorMap) -> Result<ChainMap> {
    let src = shadow(f.source())?;
    let dst = shadow(f.target())?;
    let cat = f.source().source().clone();
    let src_layout = src.layout();
    let dst_layout = dst.layout();
    let mut comps = BTreeMap::new();
    for t in src_layout.degrees().union(&dst_layout.degrees()).copied().collect::<Vec<_>>() {
        let (rows, cols) = (dst_layout.rank(t), src_layout.rank(t));
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = IntMatrix::zeros(rows, cols);
        for (ci, ch) in src.chains.iter().enumerate() {
            let k = ch.len() as i64;
            let block = f.component(ch.back(&cat), ch.front());
            let b = block.component(t - k).as_int()?.clone();
            if b.rows() > 0 && b.cols() > 0 {
                place(&mut m, dst_layout.offset(t, ci), src_layout.offset(t, ci), &b);
            }
        }
        comps.insert(t, RingMatrix::Int(m));
    }
    ChainMap::new(src.complex, dst.complex, comps)
}

/// The trace-like symmetry of shadows: rotating `M (.) N` to `N (.) M`
/// swaps the two bar directions and the two tensor factors, for the Koszul
/// sign `(-1)^{lk + pq}` in the bar lengths and internal degrees.
pub fn cyclic_symmetry(m: &Profunctor, n: &Profunctor) -> Result<ChainMap> {
    if m.target() != n.source() || n.target() != m.source() {
        return Err(Error::NotAProfunctor(
            "cyclic symmetry needs profunctors in opposite directions".into(),
        ));
    }
    let mn = coend(m, n)?;
    let nm = coend(n, m)?;
    let sh_src = shadow(mn.profunctor())?;
    let sh_dst = shadow(nm.profunctor())?;
    let chains_a = &sh_src.chains;
    let chains_b = &sh_dst.chains;
    let a_cat = m.source();
    let b_cat = m.target();
    let src_layout = sh_src.layout();
    let dst_layout = sh_dst.layout();
    let mut comps = BTreeMap::new();
    for t in src_layout.degrees() {
        let cols = src_layout.rank(t);
        let rows = dst_layout.rank(t);
        if cols == 0 {
            continue;
        }
        let mut mat = IntMatrix::zeros(rows, cols);
        for idx in 0..cols {
            let (si, inner) = src_layout.decode(t, idx);
            let sigma = &chains_a[si];
            let l = sigma.len() as i64;
            let (ti, tens) = mn.layout(sigma.back(a_cat), sigma.front()).decode(t - l, inner);
            let tau = &chains_b[ti];
            let k = tau.len() as i64;
            let m_e = m.entry(sigma.back(a_cat), tau.front());
            let n_e = n.entry(tau.back(b_cat), sigma.front());
            let (p, i, j) = tensor_decode(m_e, n_e, t - l - k, tens);
            let q = t - l - k - p;
            let tens2 = tensor_encode(n_e, m_e, t - l - k, q, j, i);
            let inner2 = nm.layout(tau.back(b_cat), tau.front()).encode(t - k, si, tens2);
            let out = dst_layout.encode(t, ti, inner2);
            mat.set(out, idx, sign(l * k + p * q));
        }
        comps.insert(t, RingMatrix::Int(mat));
    }
    ChainMap::new(sh_src.complex, sh_dst.complex, comps)
}

fn assoc_core(m: &Profunctor, n: &Profunctor, p: &Profunctor, invert: bool) -> Result<ProfunctorMap> {
    let mn = coend(m, n)?;
    let np = coend(n, p)?;
    let lhs = coend(mn.profunctor(), p)?;
    let rhs = coend(m, np.profunctor())?;
    let c_cat = p.source();
    let b_cat = n.source();
    let (na, nd) = (m.source().n_objects(), p.target().n_objects());
    let mut components = Vec::with_capacity(na * nd);
    for a in 0..na {
        for d in 0..nd {
            let lhs_layout = lhs.layout(a, d);
            let rhs_layout = rhs.layout(a, d);
            let mut comps = BTreeMap::new();
            for t in lhs_layout.degrees() {
                let lr = lhs_layout.rank(t);
                let rr = rhs_layout.rank(t);
                if lr == 0 {
                    continue;
                }
                let (rows, cols) = if invert { (lr, rr) } else { (rr, lr) };
                let mut mat = IntMatrix::zeros(rows, cols);
                for idx in 0..lr {
                    let (si, outer) = lhs_layout.decode(t, idx);
                    let sigma = &lhs.chains[si];
                    let s = sigma.len() as i64;
                    let mn_e = mn.profunctor().entry(a, sigma.front());
                    let p_e = p.entry(sigma.back(c_cat), d);
                    let (pdeg, i, j) = tensor_decode(mn_e, p_e, t - s, outer);
                    let r = t - s - pdeg;
                    let (ti, tens_in) = mn.layout(a, sigma.front()).decode(pdeg, i);
                    let tau = &mn.chains[ti];
                    let k = tau.len() as i64;
                    let m_e = m.entry(a, tau.front());
                    let n_e = n.entry(tau.back(b_cat), sigma.front());
                    let (pm, im, jn) = tensor_decode(m_e, n_e, pdeg - k, tens_in);
                    let qn = pdeg - k - pm;
                    let np_e = np.profunctor().entry(tau.back(b_cat), d);
                    let tens2 = tensor_encode(n_e, p_e, qn + r, qn, jn, j);
                    let inner2 = np.layout(tau.back(b_cat), d).encode(t - k - pm, si, tens2);
                    let outer2 = tensor_encode(m_e, np_e, t - k, pm, im, inner2);
                    let out = rhs_layout.encode(t, ti, outer2);
                    let sg = sign(s * (k + pm));
                    if invert {
                        mat.set(idx, out, sg);
                    } else {
                        mat.set(out, idx, sg);
                    }
                }
                comps.insert(t, RingMatrix::Int(mat));
            }
            let (src_e, dst_e) = if invert {
                (rhs.profunctor().entry(a, d).clone(), lhs.profunctor().entry(a, d).clone())
            } else {
                (lhs.profunctor().entry(a, d).clone(), rhs.profunctor().entry(a, d).clone())
            };
            components.push(ChainMap::new(src_e, dst_e, comps)?);
        }
    }
    if invert {
        ProfunctorMap::new(rhs.into_profunctor(), lhs.into_profunctor(), components)
    } else {
        ProfunctorMap::new(lhs.into_profunctor(), rhs.into_profunctor(), components)
    }
}

/// Reassociation `(M (.) N) (.) P -> M (.) (N (.) P)`. On a summand it is
/// the identity on tensor factors; the sign `(-1)^{s(k + pm)}` moves the
/// outer chain of length `s` past the inner chain of length `k` and the
/// first factor's internal degree `pm`.
pub fn associator(m: &Profunctor, n: &Profunctor, p: &Profunctor) -> Result<ProfunctorMap> {
    assoc_core(m, n, p, false)
}

pub fn associator_inv(m: &Profunctor, n: &Profunctor, p: &Profunctor) -> Result<ProfunctorMap> {
    assoc_core(m, n, p, true)
}

/// Collapse `U[k] (.) M -> M[k]`: a bar-zero element `g (x) x` maps to the
/// covariant action of `g` on `x`; higher bar degrees die. No sign.
pub fn left_unitor(m: &Profunctor, k: i64) -> Result<ProfunctorMap> {
    let a_cat = m.source().clone();
    let unit = unit_profunctor(&a_cat)?.shift(k)?;
    let um = coend(&unit, m)?;
    let target = m.shift(k)?;
    let (na, nb) = (a_cat.n_objects(), m.target().n_objects());
    let mut components = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in 0..nb {
            let layout = um.layout(a, b);
            let tgt_e = target.entry(a, b);
            let mut comps = BTreeMap::new();
            for t in layout.degrees() {
                let cols = layout.rank(t);
                let rows = tgt_e.rank(t);
                if cols == 0 || rows == 0 {
                    continue;
                }
                let mut mat = IntMatrix::zeros(rows, cols);
                for (ci, ch) in um.chains.iter().enumerate() {
                    if ch.len() != 0 {
                        continue;
                    }
                    let x = ch.obj;
                    let ue = unit.entry(a, x);
                    let me = m.entry(x, b);
                    if me.rank(t - k) == 0 || ue.rank(k) == 0 {
                        continue;
                    }
                    let homs = a_cat.hom(x, a);
                    for (gi, &g) in homs.iter().enumerate() {
                        let act = m.left_action(g, b);
                        let comp = act.component(t - k).as_int()?.clone();
                        for j in 0..me.rank(t - k) {
                            let col = layout.encode(t, ci, tensor_encode(ue, me, t, k, gi, j));
                            for r in 0..rows {
                                let v = mat.get(r, col) + comp.get(r, j);
                                mat.set(r, col, v);
                            }
                        }
                    }
                }
                comps.insert(t, RingMatrix::Int(mat));
            }
            components.push(ChainMap::new(
                um.profunctor().entry(a, b).clone(),
                tgt_e.clone(),
                comps,
            )?);
        }
    }
    ProfunctorMap::new(um.into_profunctor(), target, components)
}

/// Collapse `M (.) U[k] -> M[k]`: a bar-zero element `x (x) g` maps to the
/// contravariant action of `g` on `x`, with the sign `(-1)^{k p}` for the
/// internal degree `p` of `x`; higher bar degrees die.
pub fn right_unitor(m: &Profunctor, k: i64) -> Result<ProfunctorMap> {
    let b_cat = m.target().clone();
    let unit = unit_profunctor(&b_cat)?.shift(k)?;
    let mu = coend(m, &unit)?;
    let target = m.shift(k)?;
    let (na, nb) = (m.source().n_objects(), b_cat.n_objects());
    let mut components = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in 0..nb {
            let layout = mu.layout(a, b);
            let tgt_e = target.entry(a, b);
            let mut comps = BTreeMap::new();
            for t in layout.degrees() {
                let cols = layout.rank(t);
                let rows = tgt_e.rank(t);
                if cols == 0 || rows == 0 {
                    continue;
                }
                let mut mat = IntMatrix::zeros(rows, cols);
                for (ci, ch) in mu.chains.iter().enumerate() {
                    if ch.len() != 0 {
                        continue;
                    }
                    let x = ch.obj;
                    let me = m.entry(a, x);
                    let ue = unit.entry(x, b);
                    if me.rank(t - k) == 0 || ue.rank(k) == 0 {
                        continue;
                    }
                    let homs = b_cat.hom(b, x);
                    let sg = sign(k * (t - k));
                    for (gi, &g) in homs.iter().enumerate() {
                        let act = m.right_action(a, g);
                        let comp = act.component(t - k).as_int()?.scale(&sg);
                        for i in 0..me.rank(t - k) {
                            let col = layout.encode(t, ci, tensor_encode(me, ue, t, t - k, i, gi));
                            for r in 0..rows {
                                let v = mat.get(r, col) + comp.get(r, i);
                                mat.set(r, col, v);
                            }
                        }
                    }
                }
                comps.insert(t, RingMatrix::Int(mat));
            }
            components.push(ChainMap::new(
                mu.profunctor().entry(a, b).clone(),
                tgt_e.clone(),
                comps,
            )?);
        }
    }
    ProfunctorMap::new(mu.into_profunctor(), target, components)
}

/// Objectwise witness for one triangle identity: a comparison map per
/// entry plus the two homotopies tying the composites together. The
/// comparison maps need not assemble into anything natural.
#[derive(Clone, Debug)]
pub struct TriangleWitness {
    pub lambda: Vec<ChainMap>,
    pub h_square: Vec<BTreeMap<i64, RingMatrix>>,
    pub h_unit: Vec<BTreeMap<i64, RingMatrix>>,
}

/// Duality data for `m` with a degree shift: replacement objects `r_eta`
/// and `r_eps` stand in for the unit and counit composites, connected by
/// quasi-isomorphism legs, and the triangle identities are certified per
/// entry by homotopy witnesses (supplied or solved for).
#[derive(Clone, Debug)]
pub struct DualPairCertificate {
    m: Profunctor,
    dual: Profunctor,
    shift: i64,
    r_eta: Profunctor,
    rho_eta: ProfunctorMap,
    eta: ProfunctorMap,
    r_eps: Profunctor,
    rho_eps: ProfunctorMap,
    eps: ProfunctorMap,
    t1: Option<TriangleWitness>,
    t2: Option<TriangleWitness>,
}

impl DualPairCertificate {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: Profunctor,
        dual: Profunctor,
        shift: i64,
        r_eta: Profunctor,
        rho_eta: ProfunctorMap,
        eta: ProfunctorMap,
        r_eps: Profunctor,
        rho_eps: ProfunctorMap,
        eps: ProfunctorMap,
    ) -> Result<Self> {
        let a_cat = m.source().clone();
        let b_cat = m.target().clone();
        if dual.source() != &b_cat || dual.target() != &a_cat {
            return Err(Error::NotAProfunctor("dual runs in the wrong direction".into()));
        }
        if r_eta.source() != &a_cat || r_eta.target() != &a_cat {
            return Err(Error::NotAProfunctor("unit replacement is not an endo-profunctor".into()));
        }
        if r_eps.source() != &b_cat || r_eps.target() != &b_cat {
            return Err(Error::NotAProfunctor(
                "counit replacement is not an endo-profunctor".into(),
            ));
        }
        let unit_a = unit_profunctor(&a_cat)?.shift(shift)?;
        if rho_eta.source() != &r_eta || rho_eta.target() != &unit_a {
            return Err(Error::NotAProfunctor(
                "unit leg must map the replacement to the shifted unit".into(),
            ));
        }
        let m_dual = coend(&m, &dual)?;
        if eta.source() != &r_eta || eta.target() != m_dual.profunctor() {
            return Err(Error::NotAProfunctor(
                "unit map must go from the replacement to the composite with the dual".into(),
            ));
        }
        let dual_m = coend(&dual, &m)?;
        if rho_eps.source() != &r_eps || rho_eps.target() != dual_m.profunctor() {
            return Err(Error::NotAProfunctor(
                "counit leg must map the replacement to the composite with the dual".into(),
            ));
        }
        let unit_b = unit_profunctor(&b_cat)?.shift(shift)?;
        if eps.source() != &r_eps || eps.target() != &unit_b {
            return Err(Error::NotAProfunctor(
                "counit map must go from the replacement to the shifted unit".into(),
            ));
        }
        Ok(DualPairCertificate {
            m,
            dual,
            shift,
            r_eta,
            rho_eta,
            eta,
            r_eps,
            rho_eps,
            eps,
            t1: None,
            t2: None,
        })
    }

    pub fn with_witnesses(mut self, t1: TriangleWitness, t2: TriangleWitness) -> Self {
        self.t1 = Some(t1);
        self.t2 = Some(t2);
        self
    }

    pub fn m(&self) -> &Profunctor {
        &self.m
    }

    pub fn dual(&self) -> &Profunctor {
        &self.dual
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn r_eta(&self) -> &Profunctor {
        &self.r_eta
    }

    pub fn rho_eta(&self) -> &ProfunctorMap {
        &self.rho_eta
    }

    pub fn eta(&self) -> &ProfunctorMap {
        &self.eta
    }

    pub fn r_eps(&self) -> &Profunctor {
        &self.r_eps
    }

    pub fn rho_eps(&self) -> &ProfunctorMap {
        &self.rho_eps
    }

    pub fn eps(&self) -> &ProfunctorMap {
        &self.eps
    }

    pub fn witnesses(&self) -> (Option<&TriangleWitness>, Option<&TriangleWitness>) {
        (self.t1.as_ref(), self.t2.as_ref())
    }
}

/// One triangle identity, reduced to parallel chain maps per entry. The
/// witness map lands in `square_post`'s source and must intertwine the
/// square composites and the unit composites up to supplied homotopies.
struct TriangleProblem {
    square_target: ProfunctorMap,
    square_post: ProfunctorMap,
    unit_target: ProfunctorMap,
    unit_post: ProfunctorMap,
}

fn triangle_problems(cert: &DualPairCertificate) -> Result<(TriangleProblem, TriangleProblem)> {
    let id_m = ProfunctorMap::identity(&cert.m);
    let id_dual = ProfunctorMap::identity(&cert.dual);

    // Side one, entries of r_eta (.) m.
    let eta_m = coend_map(&cert.eta, &id_m)?;
    let square_target1 = associator(&cert.m, &cert.dual, &cert.m)?.compose(&eta_m)?;
    let square_post1 = coend_map(&id_m, &cert.rho_eps)?;
    let rho_m = coend_map(&cert.rho_eta, &id_m)?;
    let unit_target1 = left_unitor(&cert.m, cert.shift)?.compose(&rho_m)?;
    let eps_m = coend_map(&id_m, &cert.eps)?;
    let unit_post1 = right_unitor(&cert.m, cert.shift)?.compose(&eps_m)?;

    // Side two, entries of dual (.) r_eta; the identity side carries the
    // transposition sign of the shift.
    let m_eta = coend_map(&id_dual, &cert.eta)?;
    let square_target2 = associator_inv(&cert.dual, &cert.m, &cert.dual)?.compose(&m_eta)?;
    let square_post2 = coend_map(&cert.rho_eps, &id_dual)?;
    let eps_d = coend_map(&cert.eps, &id_dual)?;
    let unit_post2 = left_unitor(&cert.dual, cert.shift)?.compose(&eps_d)?;
    let rho_d = coend_map(&id_dual, &cert.rho_eta)?;
    let unit_target2 = right_unitor(&cert.dual, cert.shift)?
        .compose(&rho_d)?
        .scale(&sign(cert.shift));

    Ok((
        TriangleProblem {
            square_target: square_target1,
            square_post: square_post1,
            unit_target: unit_target1,
            unit_post: unit_post1,
        },
        TriangleProblem {
            square_target: square_target2,
            square_post: square_post2,
            unit_target: unit_target2,
            unit_post: unit_post2,
        },
    ))
}

fn verify_triangle(p: &TriangleProblem, w: &TriangleWitness) -> Result<bool> {
    let dom = p.square_target.source();
    let lt = p.square_post.source();
    let n_entries = dom.entries().len();
    if w.lambda.len() != n_entries || w.h_square.len() != n_entries || w.h_unit.len() != n_entries {
        return Err(Error::Invalid("triangle witness has the wrong number of entries".into()));
    }
    let (na, nb) = (dom.source().n_objects(), dom.target().n_objects());
    for a in 0..na {
        for b in 0..nb {
            let idx = a * nb + b;
            let lam = &w.lambda[idx];
            if lam.source() != dom.entry(a, b) || lam.target() != lt.entry(a, b) {
                return Err(Error::Invalid(format!(
                    "triangle witness at ({}, {}) has wrong endpoints",
                    a, b
                )));
            }
            let f_sq = p.square_post.component(a, b).compose(lam)?;
            if !verify_chain_homotopy(&f_sq, p.square_target.component(a, b), &w.h_square[idx])? {
                return Ok(false);
            }
            let f_un = p.unit_post.component(a, b).compose(lam)?;
            if !verify_chain_homotopy(&f_un, p.unit_target.component(a, b), &w.h_unit[idx])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Searches for a comparison map and both homotopies at one entry as one
/// integer linear system: the unknowns are the components of the map and
/// of the homotopies, the equations are the chain-map law and the two
/// homotopy conditions.
fn solve_triangle_entry(
    dom: &ChainComplex,
    lt: &ChainComplex,
    sq_post: &ChainMap,
    sq_target: &ChainMap,
    un_post: &ChainMap,
    un_target: &ChainMap,
) -> Result<Option<(ChainMap, BTreeMap<i64, RingMatrix>, BTreeMap<i64, RingMatrix>)>> {
    let big = sq_post.target();
    let sh = un_post.target();
    let mut degrees: BTreeSet<i64> = BTreeSet::new();
    for c in [dom, lt, big, sh] {
        for n in c.degrees() {
            degrees.insert(n - 1);
            degrees.insert(n);
            degrees.insert(n + 1);
        }
    }

    let mut sys = LinearSystem::new();
    let mut lam_base: BTreeMap<i64, usize> = BTreeMap::new();
    let mut h1_base: BTreeMap<i64, usize> = BTreeMap::new();
    let mut h2_base: BTreeMap<i64, usize> = BTreeMap::new();
    for &t in &degrees {
        let c = dom.rank(t);
        if c == 0 {
            continue;
        }
        if lt.rank(t) > 0 {
            lam_base.insert(t, sys.new_vars(lt.rank(t) * c));
        }
        if big.rank(t + 1) > 0 {
            h1_base.insert(t, sys.new_vars(big.rank(t + 1) * c));
        }
        if sh.rank(t + 1) > 0 {
            h2_base.insert(t, sys.new_vars(sh.rank(t + 1) * c));
        }
    }
    let lam_var = |t: i64, r: usize, c: usize| lam_base.get(&t).map(|&b| b + r * dom.rank(t) + c);
    let h1_var = |t: i64, r: usize, c: usize| h1_base.get(&t).map(|&b| b + r * dom.rank(t) + c);
    let h2_var = |t: i64, r: usize, c: usize| h2_base.get(&t).map(|&b| b + r * dom.rank(t) + c);

    // Chain-map law for the comparison map.
    for &t in &degrees {
        let rows = lt.rank(t - 1);
        let cols = dom.rank(t);
        if rows == 0 || cols == 0 {
            continue;
        }
        let d_lt = lt.diff(t).as_int()?.clone();
        let d_dom = dom.diff(t).as_int()?.clone();
        for r in 0..rows {
            for c in 0..cols {
                let mut terms = Vec::new();
                for s in 0..lt.rank(t) {
                    if let Some(v) = lam_var(t, s, c) {
                        let coeff = d_lt.get(r, s).clone();
                        if !coeff.is_zero() {
                            terms.push((v, coeff));
                        }
                    }
                }
                for s in 0..dom.rank(t - 1) {
                    if let Some(v) = lam_var(t - 1, r, s) {
                        let coeff = -d_dom.get(s, c).clone();
                        if !coeff.is_zero() {
                            terms.push((v, coeff));
                        }
                    }
                }
                if !terms.is_empty() {
                    sys.add_equation(terms, BigInt::zero());
                }
            }
        }
    }

    // post . lambda - d h - h d == target, for both conditions.
    let mut add_homotopy_equations =
        |post: &ChainMap, target_map: &ChainMap, tgt: &ChainComplex, is_square: bool| -> Result<()> {
            for &t in &degrees {
                let cols = dom.rank(t);
                let rows = tgt.rank(t);
                if cols == 0 || rows == 0 {
                    continue;
                }
                let post_t = post.component(t).as_int()?.clone();
                let target_t = target_map.component(t).as_int()?.clone();
                let d_tgt = tgt.diff(t + 1).as_int()?.clone();
                let d_dom = dom.diff(t).as_int()?.clone();
                let hv = |tt: i64, r: usize, c: usize| {
                    if is_square {
                        h1_var(tt, r, c)
                    } else {
                        h2_var(tt, r, c)
                    }
                };
                for r in 0..rows {
                    for c in 0..cols {
                        let mut terms = Vec::new();
                        for s in 0..lt.rank(t) {
                            if let Some(v) = lam_var(t, s, c) {
                                let coeff = post_t.get(r, s).clone();
                                if !coeff.is_zero() {
                                    terms.push((v, coeff));
                                }
                            }
                        }
                        for s in 0..tgt.rank(t + 1) {
                            if let Some(v) = hv(t, s, c) {
                                let coeff = -d_tgt.get(r, s).clone();
                                if !coeff.is_zero() {
                                    terms.push((v, coeff));
                                }
                            }
                        }
                        for s in 0..dom.rank(t - 1) {
                            if let Some(v) = hv(t - 1, r, s) {
                                let coeff = -d_dom.get(s, c).clone();
                                if !coeff.is_zero() {
                                    terms.push((v, coeff));
                                }
                            }
                        }
                        let rhs = target_t.get(r, c).clone();
                        if !terms.is_empty() || !rhs.is_zero() {
                            sys.add_equation(terms, rhs);
                        }
                    }
                }
            }
            Ok(())
        };
    add_homotopy_equations(sq_post, sq_target, big, true)?;
    add_homotopy_equations(un_post, un_target, sh, false)?;

    let Some(x) = sys.solve() else {
        return Ok(None);
    };

    let mut lam_comps = BTreeMap::new();
    for (&t, &base) in &lam_base {
        let (rows, cols) = (lt.rank(t), dom.rank(t));
        let mut m = IntMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, x[base + r * cols + c].clone());
            }
        }
        lam_comps.insert(t, RingMatrix::Int(m));
    }
    let lambda = ChainMap::new(dom.clone(), lt.clone(), lam_comps)?;
    let collect_h = |base_map: &BTreeMap<i64, usize>, tgt: &ChainComplex| {
        let mut out = BTreeMap::new();
        for (&t, &base) in base_map {
            let (rows, cols) = (tgt.rank(t + 1), dom.rank(t));
            let mut m = IntMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, x[base + r * cols + c].clone());
                }
            }
            if !m.is_zero() {
                out.insert(t, RingMatrix::Int(m));
            }
        }
        out
    };
    let h1 = collect_h(&h1_base, big);
    let h2 = collect_h(&h2_base, sh);
    Ok(Some((lambda, h1, h2)))
}

fn solve_triangle(p: &TriangleProblem) -> Result<Option<TriangleWitness>> {
    let dom = p.square_target.source();
    let lt = p.square_post.source();
    let (na, nb) = (dom.source().n_objects(), dom.target().n_objects());
    let mut lambda = Vec::new();
    let mut h_square = Vec::new();
    let mut h_unit = Vec::new();
    for a in 0..na {
        for b in 0..nb {
            match solve_triangle_entry(
                dom.entry(a, b),
                lt.entry(a, b),
                p.square_post.component(a, b),
                p.square_target.component(a, b),
                p.unit_post.component(a, b),
                p.unit_target.component(a, b),
            )? {
                Some((lam, h1, h2)) => {
                    lambda.push(lam);
                    h_square.push(h1);
                    h_unit.push(h2);
                }
                None => return Ok(None),
            }
        }
    }
    Ok(Some(TriangleWitness { lambda, h_square, h_unit }))
}

/// Finds witnesses for both triangle identities, independently per entry.
pub fn solve_triangle_witnesses(
    cert: &DualPairCertificate,
) -> Result<Option<(TriangleWitness, TriangleWitness)>> {
    let (p1, p2) = triangle_problems(cert)?;
    let Some(w1) = solve_triangle(&p1)? else {
        return Ok(None);
    };
    let Some(w2) = solve_triangle(&p2)? else {
        return Ok(None);
    };
    Ok(Some((w1, w2)))
}

/// Outcome of checking a certificate: both legs must be objectwise
/// quasi-isomorphisms and both triangles must close up to homotopy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPairReport {
    pub unit_leg_quasi_iso: bool,
    pub counit_leg_quasi_iso: bool,
    pub triangle_on_m: bool,
    pub triangle_on_dual: bool,
    pub ok: bool,
}

/// Checks every condition of a duality certificate. Triangle witnesses are
/// taken from the certificate when present and searched for otherwise.
pub fn verify_dual_pair(cert: &DualPairCertificate) -> Result<DualPairReport> {
    let unit_leg = cert.rho_eta.is_objectwise_quasi_iso()?;
    let counit_leg = cert.rho_eps.is_objectwise_quasi_iso()?;
    let (p1, p2) = triangle_problems(cert)?;
    let t1 = match &cert.t1 {
        Some(w) => verify_triangle(&p1, w)?,
        None => match solve_triangle(&p1)? {
            Some(w) => verify_triangle(&p1, &w)?,
            None => false,
        },
    };
    let t2 = match &cert.t2 {
        Some(w) => verify_triangle(&p2, w)?,
        None => match solve_triangle(&p2)? {
            Some(w) => verify_triangle(&p2, &w)?,
            None => false,
        },
    };
    let ok = unit_leg && counit_leg && t1 && t2;
    Ok(DualPairReport {
        unit_leg_quasi_iso: unit_leg,
        counit_leg_quasi_iso: counit_leg,
        triangle_on_m: t1,
        triangle_on_dual: t2,
        ok,
    })
}

fn homology_free_map(f: &ChainMap, t: i64) -> Result<IntMatrix> {
    let src = f.source().homology_presentation(t)?;
    let dst = f.target().homology_presentation(t)?;
    HomologyPresentation::induced_free_matrix(f.component(t).as_int()?, &src, &dst)
}

fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension("only square matrices invert".into()));
    }
    solve(m, &IntMatrix::identity(m.rows()))?
        .ok_or_else(|| Error::NoSolution("matrix is not invertible over the integers".into()))
}

/// Class labels of a loop-free category: its conjugacy classes are the
/// identities, one per object, in object order.
pub fn class_labels(cat: &FinCategory) -> Vec<String> {
    (0..cat.n_objects())
        .map(|x| format!("[{}]", cat.morphism(cat.identity_of(x)).name))
        .collect()
}

/// Trace of an endomorphism of a certified dualizable profunctor, as a
/// matrix from the classes of the source category to the classes of the
/// target category. The composite runs through the shadows of the
/// certificate data at the shift degree, on torsion-free homology, with
/// the quasi-isomorphism legs inverted there; endpoints are converted to
/// the class basis of the unit shadows, which have zero differential.
pub fn trace_class_matrix(cert: &DualPairCertificate, f: &ProfunctorMap) -> Result<IntMatrix> {
    if f.source() != &cert.m || f.target() != &cert.m {
        return Err(Error::Invalid("trace takes an endomorphism of the certified 1-cell".into()));
    }
    let n = cert.shift;
    let s_rho_eta = shadow_map(&cert.rho_eta)?;
    let s_eta = shadow_map(&cert.eta)?;
    let f_tensor = coend_map(f, &ProfunctorMap::identity(&cert.dual))?;
    let s_f = shadow_map(&f_tensor)?;
    let cyc = cyclic_symmetry(&cert.m, &cert.dual)?;
    let s_rho_eps = shadow_map(&cert.rho_eps)?;
    let s_eps = shadow_map(&cert.eps)?;

    let m_rho_eta = homology_free_map(&s_rho_eta, n)?;
    let m_eta = homology_free_map(&s_eta, n)?;
    let m_f = homology_free_map(&s_f, n)?;
    let m_cyc = homology_free_map(&cyc, n)?;
    let m_rho_eps = homology_free_map(&s_rho_eps, n)?;
    let m_eps = homology_free_map(&s_eps, n)?;

    let morph = m_eps
        .mul(&unimodular_inverse(&m_rho_eps)?)?
        .mul(&m_cyc)?
        .mul(&m_f)?
        .mul(&m_eta)?
        .mul(&unimodular_inverse(&m_rho_eta)?)?;

    let sh_ua = s_rho_eta.target();
    let sh_ub = s_eps.target();
    let pres_a = sh_ua.homology_presentation(n)?;
    let pres_b = sh_ub.homology_presentation(n)?;
    let to_free = pres_a.free_coords(&IntMatrix::identity(sh_ua.rank(n)))?;
    let from_free = pres_b.free_basis_cycles()?;
    from_free.mul(&morph)?.mul(&to_free)
}

/// Coefficient vector of a certified weight (a 1-cell out of the point):
/// the trace of its identity, one integer per class of the indexing
/// category.
pub fn coefficient_vector(cert: &DualPairCertificate) -> Result<Vec<(String, BigInt)>> {
    if cert.m.source().n_objects() != 1 {
        return Err(Error::Invalid("coefficient vectors are defined for weights".into()));
    }
    let t = trace_class_matrix(cert, &ProfunctorMap::identity(&cert.m))?;
    let labels = class_labels(cert.m.target());
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, t.get(i, 0).clone()))
        .collect())
}

/// Class-indexed trace of an endomorphism of a certified 1-cell into the
/// point: one integer per class of the source category.
pub fn per_class_trace(
    cert: &DualPairCertificate,
    f: &ProfunctorMap,
) -> Result<Vec<(String, BigInt)>> {
    if cert.m.target().n_objects() != 1 {
        return Err(Error::Invalid(
            "per-class traces are defined for 1-cells into the point".into(),
        ));
    }
    let t = trace_class_matrix(cert, f)?;
    let labels = class_labels(cert.m.source());
    Ok(labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, t.get(0, i).clone()))
        .collect())
}

fn dual_map_z(f: &ChainMap) -> Result<ChainMap> {
    let source = dual_z(f.target())?;
    let target = dual_z(f.source())?;
    let mut components = BTreeMap::new();
    for (&n, c) in f.components() {
        components.insert(-n, RingMatrix::Int(c.as_int()?.transpose()));
    }
    ChainMap::new(source, target, components)
}

/// Strict duality certificate for a 1-cell into the point whose entries
/// are bounded complexes of free modules: the dual takes entrywise linear
/// duals, the unit pushes coevaluations along the covariant action, the
/// counit evaluates bar-zero summands, and all triangle homotopies vanish.
pub fn pointwise_certificate(m: &Profunctor) -> Result<DualPairCertificate> {
    let b_cat = m.target().clone();
    if b_cat.n_objects() != 1 || b_cat.n_morphisms() != 1 {
        return Err(Error::Unsupported(
            "pointwise duals need a one-object identity-only target".into(),
        ));
    }
    let a_cat = m.source().clone();
    let na = a_cat.n_objects();

    let mut dual_entries = Vec::with_capacity(na);
    for x in 0..na {
        dual_entries.push(dual_z(m.entry(x, 0))?);
    }
    let mut right = BTreeMap::new();
    for f in a_cat.nonidentity_morphisms() {
        right.insert((0, f), dual_map_z(&m.left_action(f, 0))?);
    }
    let dual = Profunctor::new(b_cat.clone(), a_cat.clone(), dual_entries, BTreeMap::new(), right)?;

    let r_eta = unit_profunctor(&a_cat)?;
    let rho_eta = ProfunctorMap::identity(&r_eta);

    let m_dual = coend(&m, &dual)?;
    let mut eta_comps = Vec::with_capacity(na * na);
    for a in 0..na {
        for a2 in 0..na {
            let src_e = r_eta.entry(a, a2);
            let tgt_e = m_dual.profunctor().entry(a, a2);
            let homs = a_cat.hom(a2, a);
            let mut mat = IntMatrix::zeros(tgt_e.rank(0), homs.len());
            for (gi, &g) in homs.iter().enumerate() {
                let lg = m.left_action(g, 0);
                let coev = coevaluation_z(m.entry(a2, 0))?;
                let push = tensor_map_z(&lg, &ChainMap::identity(&dual_z(m.entry(a2, 0))?))?;
                let col = push.compose(&coev)?.component(0).as_int()?.clone();
                for r in 0..col.rows() {
                    mat.set(r, gi, col.get(r, 0).clone());
                }
            }
            eta_comps.push(ChainMap::new(
                src_e.clone(),
                tgt_e.clone(),
                [(0, RingMatrix::Int(mat))].into_iter().collect(),
            )?);
        }
    }
    let eta = ProfunctorMap::new(r_eta.clone(), m_dual.profunctor().clone(), eta_comps)?;

    let dual_m = coend(&dual, &m)?;
    let r_eps = dual_m.profunctor().clone();
    let rho_eps = ProfunctorMap::identity(&r_eps);
    let unit_b = unit_profunctor(&b_cat)?;
    let src_e = r_eps.entry(0, 0);
    let layout = dual_m.layout(0, 0);
    let mut row = IntMatrix::zeros(1, src_e.rank(0));
    for (ci, ch) in dual_m.chains.iter().enumerate() {
        if ch.len() != 0 {
            continue;
        }
        let ev = evaluation_z(m.entry(ch.obj, 0))?;
        let r = ev.component(0).as_int()?.clone();
        if r.cols() > 0 {
            place(&mut row, 0, layout.offset(0, ci), &r);
        }
    }
    let eps_comp = ChainMap::new(
        src_e.clone(),
        unit_b.entry(0, 0).clone(),
        [(0, RingMatrix::Int(row))].into_iter().collect(),
    )?;
    let eps = ProfunctorMap::new(r_eps.clone(), unit_b, vec![eps_comp])?;

    let cert = DualPairCertificate::new(
        m.clone(),
        dual,
        0,
        r_eta,
        rho_eta,
        eta,
        r_eps,
        rho_eps,
        eps,
    )?;
    // Both comparison maps are the honest square composites; the counit
    // legs are identities, so every homotopy is zero.
    let (p1, p2) = triangle_problems(&cert)?;
    let n1 = p1.square_target.components().len();
    let n2 = p2.square_target.components().len();
    let t1 = TriangleWitness {
        lambda: p1.square_target.components().to_vec(),
        h_square: vec![BTreeMap::new(); n1],
        h_unit: vec![BTreeMap::new(); n1],
    };
    let t2 = TriangleWitness {
        lambda: p2.square_target.components().to_vec(),
        h_square: vec![BTreeMap::new(); n2],
        h_unit: vec![BTreeMap::new(); n2],
    };
    Ok(cert.with_witnesses(t1, t2))
}

/// The weight over the empty category. Every condition holds vacuously
/// and the coefficient vector is empty.
pub fn empty_weight_certificate() -> Result<DualPairCertificate> {
    let point = FinCategory::terminal();
    let none = FinCategory::empty();
    let m = Profunctor::new(point.clone(), none.clone(), Vec::new(), BTreeMap::new(), BTreeMap::new())?;
    let dual = Profunctor::new(none.clone(), point.clone(), Vec::new(), BTreeMap::new(), BTreeMap::new())?;
    let r_eta = unit_profunctor(&point)?;
    let rho_eta = ProfunctorMap::identity(&r_eta);
    let m_dual = coend(&m, &dual)?;
    let eta = ProfunctorMap::new(
        r_eta.clone(),
        m_dual.profunctor().clone(),
        vec![ChainMap::zero(r_eta.entry(0, 0), m_dual.profunctor().entry(0, 0))?],
    )?;
    let r_eps = Profunctor::new(none.clone(), none, Vec::new(), BTreeMap::new(), BTreeMap::new())?;
    let rho_eps = ProfunctorMap::new(r_eps.clone(), coend(&dual, &m)?.into_profunctor(), Vec::new())?;
    let eps = ProfunctorMap::new(r_eps.clone(), unit_profunctor(m.target())?, Vec::new())?;
    DualPairCertificate::new(m, dual, 0, r_eta, rho_eta, eta, r_eps, rho_eps, eps)
}

/// The weight selecting two summands: its colimits are binary direct
/// sums and its coefficient vector is `(1, 1)`.
pub fn coproduct_weight_certificate() -> Result<DualPairCertificate> {
    let point = FinCategory::terminal();
    let two = FinCategory::discrete(2)?;
    let z0 = ChainComplex::concentrated(Ring::Int, 0, 1);
    let z1 = ChainComplex::concentrated(Ring::Int, 1, 1);
    let m = Profunctor::new(
        point.clone(),
        two.clone(),
        vec![z0.clone(), z0.clone()],
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let dual = Profunctor::new(
        two.clone(),
        point.clone(),
        vec![z1.clone(), z1.clone()],
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let r_eta = unit_profunctor(&point)?.shift(1)?;
    let rho_eta = ProfunctorMap::identity(&r_eta);
    let m_dual = coend(&m, &dual)?;
    let eta_mat = IntMatrix::from_i64(2, 1, &[1, 1]);
    let eta = ProfunctorMap::new(
        r_eta.clone(),
        m_dual.profunctor().clone(),
        vec![ChainMap::new(
            r_eta.entry(0, 0).clone(),
            m_dual.profunctor().entry(0, 0).clone(),
            [(1, RingMatrix::Int(eta_mat))].into_iter().collect(),
        )?],
    )?;
    let dual_m = coend(&dual, &m)?;
    let r_eps = dual_m.profunctor().clone();
    let rho_eps = ProfunctorMap::identity(&r_eps);
    let unit_b = unit_profunctor(&two)?.shift(1)?;
    let mut eps_comps = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let src_e = r_eps.entry(i, j);
            let tgt_e = unit_b.entry(i, j);
            let comps = if i == j {
                [(1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect()
            } else {
                BTreeMap::new()
            };
            eps_comps.push(ChainMap::new(src_e.clone(), tgt_e.clone(), comps)?);
        }
    }
    let eps = ProfunctorMap::new(r_eps.clone(), unit_b, eps_comps)?;
    DualPairCertificate::new(m, dual, 1, r_eta, rho_eta, eta, r_eps, rho_eps, eps)
}

/// The weight collapsing an arrow to its cofiber: its colimits are mapping
/// cones and its coefficient vector is `(-1, +1)`.
pub fn cofiber_weight_certificate() -> Result<DualPairCertificate> {
    let point = FinCategory::terminal();
    let arrow = FinCategory::arrow();
    let alpha = 2usize;
    let zero = ChainComplex::zero(Ring::Int);
    let z0 = ChainComplex::concentrated(Ring::Int, 0, 1);

    // Weight: nothing over a, one generator over b.
    let m = Profunctor::new(
        point.clone(),
        arrow.clone(),
        vec![zero.clone(), z0.clone()],
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    // Dual: one generator over a, nothing over b.
    let dual = Profunctor::new(
        arrow.clone(),
        point.clone(),
        vec![z0.clone(), zero.clone()],
        BTreeMap::new(),
        BTreeMap::new(),
    )?;

    let r_eta = unit_profunctor(&point)?.shift(1)?;
    let rho_eta = ProfunctorMap::identity(&r_eta);
    let m_dual = coend(&m, &dual)?;
    let eta = ProfunctorMap::new(
        r_eta.clone(),
        m_dual.profunctor().clone(),
        vec![ChainMap::new(
            r_eta.entry(0, 0).clone(),
            m_dual.profunctor().entry(0, 0).clone(),
            [(1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect(),
        )?],
    )?;

    // Counit replacement: contractible cells over the diagonal, a single
    // generator from a to b, and a two-cell square from b to a.
    let disc = |top: i64| -> Result<ChainComplex> {
        ChainComplex::new(
            Ring::Int,
            [(top, 1), (top - 1, 1)].into_iter().collect(),
            [(top, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect(),
        )
    };
    let r_aa = disc(1)?;
    let r_bb = disc(1)?;
    let r_ab = z0.clone();
    let r_ba = ChainComplex::new(
        Ring::Int,
        [(2, 1), (1, 2), (0, 1)].into_iter().collect(),
        [
            (2, RingMatrix::Int(IntMatrix::from_i64(2, 1, &[1, -1]))),
            (1, RingMatrix::Int(IntMatrix::from_i64(1, 2, &[1, 1]))),
        ]
        .into_iter()
        .collect(),
    )?;
    let mut left = BTreeMap::new();
    let mut right_acts = BTreeMap::new();
    // Covariant action at y = a: v1 -> w, e1 -> p.
    left.insert(
        (alpha, 0),
        ChainMap::new(
            r_aa.clone(),
            r_ba.clone(),
            [
                (0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1]))),
                (1, RingMatrix::Int(IntMatrix::from_i64(2, 1, &[1, 0]))),
            ]
            .into_iter()
            .collect(),
        )?,
    );
    // Covariant action at y = b: s -> v2.
    left.insert(
        (alpha, 1),
        ChainMap::new(
            r_ab.clone(),
            r_bb.clone(),
            [(0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect(),
        )?,
    );
    // Contravariant action at x = a: s -> v1.
    right_acts.insert(
        (0, alpha),
        ChainMap::new(
            r_ab.clone(),
            r_aa.clone(),
            [(0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect(),
        )?,
    );
    // Contravariant action at x = b: v2 -> w, e2 -> q.
    right_acts.insert(
        (1, alpha),
        ChainMap::new(
            r_bb.clone(),
            r_ba.clone(),
            [
                (0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1]))),
                (1, RingMatrix::Int(IntMatrix::from_i64(2, 1, &[0, 1]))),
            ]
            .into_iter()
            .collect(),
        )?,
    );
    let r_eps = Profunctor::new(
        arrow.clone(),
        arrow.clone(),
        vec![r_aa, r_ab, r_ba, r_bb],
        left,
        right_acts,
    )?;

    let dual_m = coend(&dual, &m)?;
    let mut rho_comps = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            let src_e = r_eps.entry(x, y);
            let tgt_e = dual_m.profunctor().entry(x, y);
            let comps = if (x, y) == (0, 1) {
                [(0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect()
            } else {
                BTreeMap::new()
            };
            rho_comps.push(ChainMap::new(src_e.clone(), tgt_e.clone(), comps)?);
        }
    }
    let rho_eps = ProfunctorMap::new(r_eps.clone(), dual_m.profunctor().clone(), rho_comps)?;

    let unit_b = unit_profunctor(&arrow)?.shift(1)?;
    let mut eps_comps = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            let src_e = r_eps.entry(x, y);
            let tgt_e = unit_b.entry(x, y);
            let comps: BTreeMap<i64, RingMatrix> = match (x, y) {
                // e1 -> [id_a], e2 -> [id_b].
                (0, 0) | (1, 1) => {
                    [(1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect()
                }
                // p, q -> [alpha].
                (1, 0) => {
                    [(1, RingMatrix::Int(IntMatrix::from_i64(1, 2, &[1, 1])))].into_iter().collect()
                }
                _ => BTreeMap::new(),
            };
            eps_comps.push(ChainMap::new(src_e.clone(), tgt_e.clone(), comps)?);
        }
    }
    let eps = ProfunctorMap::new(r_eps.clone(), unit_b, eps_comps)?;
    DualPairCertificate::new(m, dual, 1, r_eta, rho_eta, eta, r_eps, rho_eps, eps)
}

/// Colimit of a 1-cell into the point, weighted by a 1-cell out of it:
/// the single entry of their composite.
pub fn weighted_colimit(weight: &Profunctor, diagram: &Profunctor) -> Result<ChainComplex> {
    if weight.source().n_objects() != 1 || diagram.target().n_objects() != 1 {
        return Err(Error::Invalid(
            "weighted colimits take a weight out of the point and a diagram into it".into(),
        ));
    }
    Ok(coend(weight, diagram)?.profunctor().entry(0, 0).clone())
}

/// Endomorphism induced on the weighted colimit by an endomorphism of the
/// diagram.
pub fn colimit_endo(
    weight: &Profunctor,
    diagram: &Profunctor,
    f: &ProfunctorMap,
) -> Result<ChainMap> {
    if f.source() != diagram || f.target() != diagram {
        return Err(Error::Invalid("colimit endomorphisms come from diagram endomorphisms".into()));
    }
    let induced = coend_map(&ProfunctorMap::identity(weight), f)?;
    Ok(induced.component(0, 0).clone())
}

/// Alternating trace on torsion-free homology of an integer chain
/// endomorphism.
pub fn chain_endo_lefschetz(f: &ChainMap) -> Result<BigInt> {
    if f.source() != f.target() {
        return Err(Error::Invalid("Lefschetz traces take endomorphisms".into()));
    }
    let components = f.components().map(|(&n, m)| (n, m.clone())).collect();
    TwistedEndo::new(f.source().clone(), None, components)?.homology_lefschetz()
}

/// Both sides of the linearity formula for one weighted colimit: the
/// trace downstairs against the weighted sum of the objectwise traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearityReport {
    pub colimit_trace: BigInt,
    /// Per class: label, weight coefficient, objectwise trace.
    pub terms: Vec<(String, BigInt, BigInt)>,
    pub weighted_sum: BigInt,
    pub ok: bool,
}

/// Checks that the trace of the induced endomorphism of the weighted
/// colimit equals the coefficient-weighted sum of the objectwise traces.
/// The two sides are computed along independent routes: the left through
/// the colimit complex, the right through the certificate's coefficient
/// vector and plain homology traces.
pub fn verify_linearity(
    cert: &DualPairCertificate,
    diagram: &Profunctor,
    f: &ProfunctorMap,
) -> Result<LinearityReport> {
    if cert.m.target() != diagram.source() {
        return Err(Error::Invalid("weight and diagram index different categories".into()));
    }
    let colim_f = colimit_endo(&cert.m, diagram, f)?;
    let colimit_trace = chain_endo_lefschetz(&colim_f)?;
    let coeffs = coefficient_vector(cert)?;
    let mut terms = Vec::new();
    let mut weighted_sum = BigInt::zero();
    for (x, (label, phi)) in coeffs.into_iter().enumerate() {
        let l = chain_endo_lefschetz(f.component(x, 0))?;
        weighted_sum += &phi * &l;
        terms.push((label, phi, l));
    }
    let ok = colimit_trace == weighted_sum;
    Ok(LinearityReport { colimit_trace, terms, weighted_sum, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circle_like() -> ChainComplex {
        ChainComplex::new(Ring::Int, [(0, 1), (1, 1)].into_iter().collect(), BTreeMap::new())
            .unwrap()
    }

    fn point() -> ChainComplex {
        ChainComplex::concentrated(Ring::Int, 0, 1)
    }

    /// Diagram over the arrow category: a circle-like object over `a`
    /// collapsing onto a point over `b`.
    fn circle_to_point_diagram() -> Profunctor {
        let act = ChainMap::new(
            circle_like(),
            point(),
            [(0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1])))].into_iter().collect(),
        )
        .unwrap();
        Profunctor::new(
            FinCategory::arrow(),
            FinCategory::terminal(),
            vec![circle_like(), point()],
            [((2, 0), act)].into_iter().collect(),
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn unit_profunctor_matches_hom_sets() {
        let u = unit_profunctor(&FinCategory::arrow()).unwrap();
        assert_eq!(u.entry(0, 0).rank(0), 1);
        assert_eq!(u.entry(1, 0).rank(0), 1);
        assert_eq!(u.entry(0, 1).rank(0), 0);
        assert_eq!(u.entry(1, 1).rank(0), 1);
    }

    #[test]
    fn class_labels_name_identities() {
        assert_eq!(class_labels(&FinCategory::arrow()), vec!["[id_a]", "[id_b]"]);
        assert!(class_labels(&FinCategory::empty()).is_empty());
    }

    #[test]
    fn missing_actions_are_rejected() {
        let err = Profunctor::new(
            FinCategory::arrow(),
            FinCategory::terminal(),
            vec![point(), point()],
            BTreeMap::new(),
            BTreeMap::new(),
        );
        assert!(matches!(err, Err(Error::NotAProfunctor(_))));
    }

    #[test]
    fn noncommuting_actions_are_rejected() {
        let arrow = FinCategory::arrow();
        let z = point();
        let one = |s: &ChainComplex, t: &ChainComplex, v: i64| {
            ChainMap::new(
                s.clone(),
                t.clone(),
                [(0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[v])))].into_iter().collect(),
            )
            .unwrap()
        };
        let entries = vec![z.clone(), z.clone(), z.clone(), z.clone()];
        let left = [((2, 0), one(&z, &z, 1)), ((2, 1), one(&z, &z, 1))].into_iter().collect();
        let right = [((0, 2), one(&z, &z, 1)), ((1, 2), one(&z, &z, 2))].into_iter().collect();
        let err = Profunctor::new(arrow.clone(), arrow, entries, left, right);
        assert!(matches!(err, Err(Error::NotAProfunctor(_))));
    }

    #[test]
    fn composite_over_discrete_category_is_entrywise_tensor() {
        let two = FinCategory::discrete(2).unwrap();
        let point_cat = FinCategory::terminal();
        let m0 = circle_like();
        let m1 = ChainComplex::concentrated(Ring::Int, 2, 2);
        let n0 = point();
        let n1 = ChainComplex::new(
            Ring::Int,
            [(0, 1), (1, 1)].into_iter().collect(),
            [(1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[3])))].into_iter().collect(),
        )
        .unwrap();
        let m = Profunctor::new(
            point_cat.clone(),
            two.clone(),
            vec![m0.clone(), m1.clone()],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let n = Profunctor::new(
            two,
            point_cat,
            vec![n0.clone(), n1.clone()],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let c = coend(&m, &n).unwrap();
        let e = c.profunctor().entry(0, 0);
        let t0 = tensor_z(&m0, &n0).unwrap();
        let t1 = tensor_z(&m1, &n1).unwrap();
        for t in -1..=4 {
            assert_eq!(e.rank(t), t0.rank(t) + t1.rank(t));
        }
        assert_eq!(e.diff(3), t1.diff(3));
    }

    #[test]
    fn unit_shadow_is_free_on_classes() {
        let sh = shadow(&unit_profunctor(&FinCategory::arrow()).unwrap()).unwrap();
        assert_eq!(sh.complex().homology_at(0).unwrap().free_rank, 2);
        for t in 1..=2 {
            assert!(sh.complex().homology_at(t).unwrap().is_trivial());
        }
        let none = shadow(&unit_profunctor(&FinCategory::empty()).unwrap()).unwrap();
        assert!(none.complex().is_zero());
    }

    #[test]
    fn unitors_are_objectwise_quasi_isomorphisms() {
        let r = cofiber_weight_certificate().unwrap().r_eps().clone();
        for k in [0i64, 1] {
            assert!(left_unitor(&r, k).unwrap().is_objectwise_quasi_iso().unwrap());
            assert!(right_unitor(&r, k).unwrap().is_objectwise_quasi_iso().unwrap());
        }
        let m = circle_to_point_diagram();
        assert!(left_unitor(&m, 0).unwrap().is_objectwise_quasi_iso().unwrap());
        assert!(right_unitor(&m, 2).unwrap().is_objectwise_quasi_iso().unwrap());
    }

    #[test]
    fn associator_composes_to_identity() {
        let cert = cofiber_weight_certificate().unwrap();
        let m = cert.m().clone();
        let n = cert.r_eps().clone();
        let p = circle_to_point_diagram();
        let fwd = associator(&m, &n, &p).unwrap();
        let bwd = associator_inv(&m, &n, &p).unwrap();
        assert_eq!(bwd.compose(&fwd).unwrap(), ProfunctorMap::identity(fwd.source()));
        assert_eq!(fwd.compose(&bwd).unwrap(), ProfunctorMap::identity(fwd.target()));
    }

    #[test]
    fn cyclic_symmetry_validates_and_preserves_homology() {
        let cert = cofiber_weight_certificate().unwrap();
        let cyc = cyclic_symmetry(cert.m(), cert.dual()).unwrap();
        for t in -1..=3 {
            assert_eq!(cyc.source().homology_at(t).unwrap(), cyc.target().homology_at(t).unwrap());
        }
    }

    #[test]
    fn pointwise_certificate_is_strict() {
        let m = circle_to_point_diagram();
        let cert = pointwise_certificate(&m).unwrap();
        let (t1, t2) = cert.witnesses();
        assert!(t1.is_some() && t2.is_some());
        let report = verify_dual_pair(&cert).unwrap();
        assert!(report.ok, "{:?}", report);
    }

    #[test]
    fn per_class_trace_lists_objectwise_lefschetz_numbers() {
        let m = circle_to_point_diagram();
        let cert = pointwise_certificate(&m).unwrap();
        let f_a = ChainMap::new(
            circle_like(),
            circle_like(),
            [
                (0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[1]))),
                (1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[3]))),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let f_b = ChainMap::identity(&point());
        let f = ProfunctorMap::new(m.clone(), m.clone(), vec![f_a.clone(), f_b]).unwrap();
        let tr = per_class_trace(&cert, &f).unwrap();
        assert_eq!(
            tr,
            vec![
                ("[id_a]".to_string(), BigInt::from(-2)),
                ("[id_b]".to_string(), BigInt::one()),
            ]
        );
        assert_eq!(tr[0].1, chain_endo_lefschetz(&f_a).unwrap());
    }

    #[test]
    fn trace_handles_torsion_only_homology() {
        let c = ChainComplex::new(
            Ring::Int,
            [(0, 1), (1, 1)].into_iter().collect(),
            [(1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[2])))].into_iter().collect(),
        )
        .unwrap();
        let point_cat = FinCategory::terminal();
        let m = Profunctor::new(
            point_cat.clone(),
            point_cat,
            vec![c],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let cert = pointwise_certificate(&m).unwrap();
        let tr = per_class_trace(&cert, &ProfunctorMap::identity(&m)).unwrap();
        assert_eq!(tr, vec![("[id]".to_string(), BigInt::zero())]);
    }

    #[test]
    fn empty_certificate_verifies() {
        let cert = empty_weight_certificate().unwrap();
        assert!(verify_dual_pair(&cert).unwrap().ok);
        assert!(coefficient_vector(&cert).unwrap().is_empty());
    }

    #[test]
    fn coproduct_certificate_verifies_via_solver() {
        let cert = coproduct_weight_certificate().unwrap();
        let (t1, t2) = cert.witnesses();
        assert!(t1.is_none() && t2.is_none());
        let report = verify_dual_pair(&cert).unwrap();
        assert!(report.ok, "{:?}", report);
        let v = coefficient_vector(&cert).unwrap();
        assert_eq!(
            v,
            vec![
                ("[id_b0]".to_string(), BigInt::one()),
                ("[id_b1]".to_string(), BigInt::one()),
            ]
        );
    }

    #[test]
    fn cofiber_certificate_verifies_via_solver() {
        let cert = cofiber_weight_certificate().unwrap();
        let (t1, t2) = cert.witnesses();
        assert!(t1.is_none() && t2.is_none());
        let report = verify_dual_pair(&cert).unwrap();
        assert!(report.ok, "{:?}", report);
        let v = coefficient_vector(&cert).unwrap();
        assert_eq!(
            v,
            vec![
                ("[id_a]".to_string(), BigInt::from(-1)),
                ("[id_b]".to_string(), BigInt::one()),
            ]
        );
    }

    /// Witness data worked out by hand: both comparison maps, written in
    /// the same summand bases the code uses, satisfy the triangles on the
    /// nose. Keeps the solver path honest.
    #[test]
    fn cofiber_hand_witnesses_verify() {
        let cert = cofiber_weight_certificate().unwrap();
        let (p1, p2) = triangle_problems(&cert).unwrap();
        let dom1 = p1.square_target.source();
        let lt1 = p1.square_post.source();
        let lam1 = vec![
            ChainMap::zero(dom1.entry(0, 0), lt1.entry(0, 0)).unwrap(),
            ChainMap::new(
                dom1.entry(0, 1).clone(),
                lt1.entry(0, 1).clone(),
                [(1, RingMatrix::Int(IntMatrix::from_i64(2, 1, &[1, 1])))].into_iter().collect(),
            )
            .unwrap(),
        ];
        let w1 = TriangleWitness {
            lambda: lam1,
            h_square: vec![BTreeMap::new(); 2],
            h_unit: vec![BTreeMap::new(); 2],
        };
        let dom2 = p2.square_target.source();
        let lt2 = p2.square_post.source();
        let lam2 = vec![
            ChainMap::new(
                dom2.entry(0, 0).clone(),
                lt2.entry(0, 0).clone(),
                [(1, RingMatrix::Int(IntMatrix::from_i64(2, 1, &[-1, 1])))].into_iter().collect(),
            )
            .unwrap(),
            ChainMap::zero(dom2.entry(1, 0), lt2.entry(1, 0)).unwrap(),
        ];
        let w2 = TriangleWitness {
            lambda: lam2,
            h_square: vec![BTreeMap::new(); 2],
            h_unit: vec![BTreeMap::new(); 2],
        };
        let cert = cert.with_witnesses(w1, w2);
        let report = verify_dual_pair(&cert).unwrap();
        assert!(report.ok, "{:?}", report);
    }

    #[test]
    fn cofiber_colimit_matches_mapping_cone() {
        let cert = cofiber_weight_certificate().unwrap();
        let d = circle_to_point_diagram();
        let colim = weighted_colimit(cert.m(), &d).unwrap();
        let cone = mapping_cone(&d.left_action(2, 0)).unwrap();
        for t in -1..=3 {
            assert_eq!(colim.homology_at(t).unwrap(), cone.homology_at(t).unwrap());
        }
    }

    #[test]
    fn constant_weight_colimit_collapses_to_the_end_of_the_arrow() {
        let z0 = point();
        let w = Profunctor::new(
            FinCategory::terminal(),
            FinCategory::arrow(),
            vec![z0.clone(), z0.clone()],
            BTreeMap::new(),
            [((0, 2), ChainMap::identity(&z0))].into_iter().collect(),
        )
        .unwrap();
        let d = circle_to_point_diagram();
        let colim = weighted_colimit(&w, &d).unwrap();
        for t in -1..=2 {
            assert_eq!(colim.homology_at(t).unwrap(), d.entry(1, 0).homology_at(t).unwrap());
        }
    }

    #[test]
    fn linearity_recovers_the_cofiber_example() {
        let cert = cofiber_weight_certificate().unwrap();
        let d = circle_to_point_diagram();
        let f = ProfunctorMap::identity(&d);
        let rep = verify_linearity(&cert, &d, &f).unwrap();
        assert!(rep.ok, "{:?}", rep);
        assert_eq!(rep.colimit_trace, BigInt::one());
        assert_eq!(
            rep.terms,
            vec![
                ("[id_a]".to_string(), BigInt::from(-1), BigInt::zero()),
                ("[id_b]".to_string(), BigInt::one(), BigInt::one()),
            ]
        );
    }

    #[test]
    fn linearity_for_the_coproduct_weight() {
        let cert = coproduct_weight_certificate().unwrap();
        let c0 = circle_like();
        let c1 = ChainComplex::concentrated(Ring::Int, 0, 2);
        let d = Profunctor::new(
            FinCategory::discrete(2).unwrap(),
            FinCategory::terminal(),
            vec![c0.clone(), c1.clone()],
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let f0 = ChainMap::new(
            c0.clone(),
            c0,
            [
                (0, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[2]))),
                (1, RingMatrix::Int(IntMatrix::from_i64(1, 1, &[5]))),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let f1 = ChainMap::new(
            c1.clone(),
            c1,
            [(0, RingMatrix::Int(IntMatrix::from_i64(2, 2, &[1, 1, 0, 1])))].into_iter().collect(),
        )
        .unwrap();
        let f = ProfunctorMap::new(d.clone(), d.clone(), vec![f0, f1]).unwrap();
        let rep = verify_linearity(&cert, &d, &f).unwrap();
        assert!(rep.ok, "{:?}", rep);
        assert_eq!(rep.colimit_trace, BigInt::from(-1));
    }

    #[test]
    fn linearity_for_the_empty_weight() {
        let cert = empty_weight_certificate().unwrap();
        let d = Profunctor::new(
            FinCategory::empty(),
            FinCategory::terminal(),
            Vec::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let f = ProfunctorMap::identity(&d);
        let rep = verify_linearity(&cert, &d, &f).unwrap();
        assert!(rep.ok);
        assert!(rep.terms.is_empty());
        assert_eq!(rep.colimit_trace, BigInt::zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Rotating the two factors of a composite is a degreewise signed
        /// bijection compatible with the differentials, so the two cyclic
        /// bar complexes share all homology.
        #[test]
        fn shadow_rotation_preserves_homology(
            ra0 in 0usize..=2, ra1 in 0usize..=2,
            rb0 in 0usize..=2, rb1 in 0usize..=2,
            na0 in 0usize..=2, na1 in 0usize..=2,
            nb0 in 0usize..=2, nb1 in 0usize..=2,
            coeffs in proptest::collection::vec(-2i64..=2, 64),
        ) {
            let mk = |r0: usize, r1: usize| ChainComplex::new(
                Ring::Int,
                [(0, r0), (1, r1)].into_iter().collect(),
                BTreeMap::new(),
            ).unwrap();
            let ma = mk(ra0, ra1);
            let mb = mk(rb0, rb1);
            let nae = mk(na0, na1);
            let nbe = mk(nb0, nb1);
            let mut it = coeffs.iter().cycle();
            let mut fill = |rows: usize, cols: usize| {
                let mut m = IntMatrix::zeros(rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        m.set(i, j, BigInt::from(*it.next().unwrap()));
                    }
                }
                m
            };
            let act_m = ChainMap::new(ma.clone(), mb.clone(), [
                (0, RingMatrix::Int(fill(rb0, ra0))),
                (1, RingMatrix::Int(fill(rb1, ra1))),
            ].into_iter().collect()).unwrap();
            let act_n = ChainMap::new(nbe.clone(), nae.clone(), [
                (0, RingMatrix::Int(fill(na0, nb0))),
                (1, RingMatrix::Int(fill(na1, nb1))),
            ].into_iter().collect()).unwrap();
            let m = Profunctor::new(
                FinCategory::arrow(),
                FinCategory::terminal(),
                vec![ma, mb],
                [((2usize, 0usize), act_m)].into_iter().collect(),
                BTreeMap::new(),
            ).unwrap();
            let n = Profunctor::new(
                FinCategory::terminal(),
                FinCategory::arrow(),
                vec![nae, nbe],
                BTreeMap::new(),
                [((0usize, 2usize), act_n)].into_iter().collect(),
            ).unwrap();
            let cyc = cyclic_symmetry(&m, &n).unwrap();
            for t in -1..=4 {
                prop_assert_eq!(
                    cyc.source().homology_at(t).unwrap(),
                    cyc.target().homology_at(t).unwrap()
                );
            }
        }

        /// Reassociation against a middle profunctor with genuine
        /// differentials and actions is an isomorphism both ways.
        #[test]
        fn reassociation_inverts(
            r0 in 0usize..=1, r1 in 0usize..=1,
            p0 in 0usize..=1, p1 in 0usize..=1,
            coeffs in proptest::collection::vec(-2i64..=2, 32),
        ) {
            let n = cofiber_weight_certificate().unwrap().r_eps().clone();
            let mk = |a: usize, b: usize| ChainComplex::new(
                Ring::Int,
                [(0, a), (1, b)].into_iter().collect(),
                BTreeMap::new(),
            ).unwrap();
            let ma = mk(r0, r1);
            let mb = mk(r1, r0);
            let pa = mk(p0, p1);
            let pb = mk(p1, p0);
            let mut it = coeffs.iter().cycle();
            let mut fill = |rows: usize, cols: usize| {
                let mut m = IntMatrix::zeros(rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        m.set(i, j, BigInt::from(*it.next().unwrap()));
                    }
                }
                m
            };
            let m_act = ChainMap::new(mb.clone(), ma.clone(), [
                (0, RingMatrix::Int(fill(r0, r1))),
                (1, RingMatrix::Int(fill(r1, r0))),
            ].into_iter().collect()).unwrap();
            let p_act = ChainMap::new(pa.clone(), pb.clone(), [
                (0, RingMatrix::Int(fill(p1, p0))),
                (1, RingMatrix::Int(fill(p0, p1))),
            ].into_iter().collect()).unwrap();
            let m = Profunctor::new(
                FinCategory::terminal(),
                FinCategory::arrow(),
                vec![ma, mb],
                BTreeMap::new(),
                [((0usize, 2usize), m_act)].into_iter().collect(),
            ).unwrap();
            let p = Profunctor::new(
                FinCategory::arrow(),
                FinCategory::terminal(),
                vec![pa, pb],
                [((2usize, 0usize), p_act)].into_iter().collect(),
                BTreeMap::new(),
            ).unwrap();
            let fwd = associator(&m, &n, &p).unwrap();
            let bwd = associator_inv(&m, &n, &p).unwrap();
            prop_assert_eq!(bwd.compose(&fwd).unwrap(), ProfunctorMap::identity(fwd.source()));
            prop_assert_eq!(fwd.compose(&bwd).unwrap(), ProfunctorMap::identity(fwd.target()));
        }
    }
}
