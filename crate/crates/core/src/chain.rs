//! Bounded chain complexes of free modules over Z or a group ring, chain
//! maps, twisted endomorphisms, and the chain-level trace theory.
//!
//! Complexes are validated at construction: differentials must have the
//! right shapes and square to zero. A twisted endomorphism carries a group
//! endomorphism `phi` and components `F_n` acting by `x -> F phi(x)`; its
//! defining law is `d F == F phi(d)` degreewise. Lefschetz numbers are
//! alternating traces, Reidemeister traces are alternating
//! Hattori-Stallings traces in twisted conjugacy classes.
//!
//! Over Z the module also implements strict duality: the dual complex,
//! tensor products, and the coevaluation and evaluation maps whose zig-zag
//! composite recovers the Lefschetz number. The identity between the
//! categorical trace and the alternating sum is checked in tests and again
//! by the self-test suite.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::groupring::{
    hs_trace, twisted_classes, Group, GroupEndo, GroupHom, GroupRingElement, GroupRingMatrix,
    TwistedClassVector,
};
use crate::linalg::{FgAbelianGroup, HomologyPresentation, IntMatrix, LinearSystem};

/// Coefficient ring of a complex: the integers or an integral group ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Ring {
    Int,
    Group(Group),
}

impl Ring {
    pub fn group(&self) -> Option<&Group> {
        match self {
            Ring::Int => None,
            Ring::Group(g) => Some(g),
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Int => write!(f, "Z"),
            Ring::Group(g) => write!(f, "Z[{}]", g),
        }
    }
}

/// Matrix over a coefficient ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RingMatrix {
    Int(IntMatrix),
    Grp(GroupRingMatrix),
}

impl RingMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        match ring {
            Ring::Int => RingMatrix::Int(IntMatrix::zeros(rows, cols)),
            Ring::Group(g) => RingMatrix::Grp(GroupRingMatrix::zeros(g, rows, cols)),
        }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        match ring {
            Ring::Int => RingMatrix::Int(IntMatrix::identity(n)),
            Ring::Group(g) => RingMatrix::Grp(GroupRingMatrix::identity(g, n)),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            RingMatrix::Int(_) => Ring::Int,
            RingMatrix::Grp(m) => Ring::Group(m.group().clone()),
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            RingMatrix::Int(m) => m.rows(),
            RingMatrix::Grp(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            RingMatrix::Int(m) => m.cols(),
            RingMatrix::Grp(m) => m.cols(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RingMatrix::Int(m) => m.is_zero(),
            RingMatrix::Grp(m) => m.is_zero(),
        }
    }

    pub fn as_int(&self) -> Result<&IntMatrix> {
        match self {
            RingMatrix::Int(m) => Ok(m),
            RingMatrix::Grp(_) => Err(Error::RingMismatch("expected an integer matrix".into())),
        }
    }

    pub fn as_grp(&self) -> Result<&GroupRingMatrix> {
        match self {
            RingMatrix::Grp(m) => Ok(m),
            RingMatrix::Int(_) => Err(Error::RingMismatch("expected a group ring matrix".into())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (RingMatrix::Int(a), RingMatrix::Int(b)) => Ok(RingMatrix::Int(a.add(b)?)),
            (RingMatrix::Grp(a), RingMatrix::Grp(b)) => Ok(RingMatrix::Grp(a.add(b)?)),
            _ => Err(Error::RingMismatch("sum of matrices over different rings".into())),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        match self {
            RingMatrix::Int(m) => RingMatrix::Int(m.neg()),
            RingMatrix::Grp(m) => RingMatrix::Grp(m.neg()),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        match self {
            RingMatrix::Int(m) => RingMatrix::Int(m.scale(c)),
            RingMatrix::Grp(m) => RingMatrix::Grp(m.scale(c)),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (RingMatrix::Int(a), RingMatrix::Int(b)) => Ok(RingMatrix::Int(a.mul(b)?)),
            (RingMatrix::Grp(a), RingMatrix::Grp(b)) => Ok(RingMatrix::Grp(a.mul(b)?)),
            _ => Err(Error::RingMismatch("product of matrices over different rings".into())),
        }
    }

    /// Entrywise coefficient sum; collapses a group ring matrix to Z.
    pub fn augment(&self) -> IntMatrix {
        match self {
            RingMatrix::Int(m) => m.clone(),
            RingMatrix::Grp(m) => m.augment(),
        }
    }

    /// Applies a group homomorphism to every entry (group rings only).
    pub fn map_group(&self, hom: &GroupHom) -> Result<Self> {
        match self {
            RingMatrix::Grp(m) => Ok(RingMatrix::Grp(m.map_group(hom)?)),
            RingMatrix::Int(_) => Err(Error::RingMismatch(
                "cannot push an integer matrix through a group homomorphism".into(),
            )),
        }
    }

    fn set_block(&mut self, r0: usize, c0: usize, block: &RingMatrix) {
        match (self, block) {
            (RingMatrix::Int(out), RingMatrix::Int(b)) => {
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        out.set(r0 + i, c0 + j, b.get(i, j).clone());
                    }
                }
            }
            (RingMatrix::Grp(out), RingMatrix::Grp(b)) => {
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        out.set(r0 + i, c0 + j, b.get(i, j).clone());
                    }
                }
            }
            _ => panic!("block ring mismatch"),
        }
    }
}

/// Applies the twist to a matrix: the identity over Z, entrywise `phi`
/// over a group ring.
fn apply_twist(m: &RingMatrix, twist: &Option<GroupEndo>) -> Result<RingMatrix> {
    match twist {
        None => Ok(m.clone()),
        Some(phi) => m.map_group(phi.hom()),
    }
}

/// Bounded chain complex of finitely generated free modules.
///
/// `ranks` records the free rank in each degree; `diffs` the differentials
/// `d_n: C_n -> C_{n-1}`. Both are normalized: zero ranks and zero
/// differentials are dropped, so structural equality is meaningful.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainComplex {
    ring: Ring,
    ranks: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, RingMatrix>,
}

impl ChainComplex {
    pub fn new(
        ring: Ring,
        ranks: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, RingMatrix>,
    ) -> Result<Self> {
        let ranks: BTreeMap<i64, usize> =
            ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let rank_of = |n: i64| ranks.get(&n).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (n, d) in diffs {
            if d.ring() != ring {
                return Err(Error::RingMismatch(format!(
                    "differential in degree {} is over {}, complex over {}",
                    n,
                    d.ring(),
                    ring
                )));
            }
            if d.rows() != rank_of(n - 1) || d.cols() != rank_of(n) {
                return Err(Error::NotAComplex(format!(
                    "differential in degree {} is {} by {}, expected {} by {}",
                    n,
                    d.rows(),
                    d.cols(),
                    rank_of(n - 1),
                    rank_of(n)
                )));
            }
            if !d.is_zero() {
                kept.insert(n, d);
            }
        }
        let c = ChainComplex { ring, ranks, diffs: kept };
        for (&n, d) in &c.diffs {
            if let Some(d_next) = c.diffs.get(&(n + 1)) {
                if !d.mul(d_next)?.is_zero() {
                    return Err(Error::NotAComplex(format!(
                        "differential does not square to zero in degree {}",
                        n + 1
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn zero(ring: Ring) -> Self {
        ChainComplex { ring, ranks: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// Free module of the given rank concentrated in one degree.
    pub fn concentrated(ring: Ring, degree: i64, rank: usize) -> Self {
        let mut ranks = BTreeMap::new();
        if rank > 0 {
            ranks.insert(degree, rank);
        }
        ChainComplex { ring, ranks, diffs: BTreeMap::new() }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self, n: i64) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    /// Degrees with nonzero rank, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.ranks.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// The differential `d_n`, materialized as zeros when absent.
    pub fn diff(&self, n: i64) -> RingMatrix {
        match self.diffs.get(&n) {
            Some(d) => d.clone(),
            None => RingMatrix::zeros(&self.ring, self.rank(n - 1), self.rank(n)),
        }
    }

    pub fn euler_characteristic(&self) -> BigInt {
        let mut chi = BigInt::zero();
        for (&n, &r) in &self.ranks {
            if n.rem_euclid(2) == 0 {
                chi += r;
            } else {
                chi -= r;
            }
        }
        chi
    }

    /// Degree shift: `C[k]_n = C_{n-k}` with differential scaled by
    /// `(-1)^k`.
    pub fn shift(&self, k: i64) -> Self {
        let sign = if k.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
        let ranks = self.ranks.iter().map(|(&n, &r)| (n + k, r)).collect();
        let diffs = self
            .diffs
            .iter()
            .map(|(&n, d)| (n + k, d.scale(&sign)))
            .collect();
        ChainComplex { ring: self.ring.clone(), ranks, diffs }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("direct sum over different rings".into()));
        }
        let mut ranks = self.ranks.clone();
        for (&n, &r) in &other.ranks {
            *ranks.entry(n).or_insert(0) += r;
        }
        let mut diffs = BTreeMap::new();
        let degrees: BTreeSet<i64> = self.diffs.keys().chain(other.diffs.keys()).copied().collect();
        for n in degrees {
            let a = self.diff(n);
            let b = other.diff(n);
            let mut d = RingMatrix::zeros(
                &self.ring,
                a.rows() + b.rows(),
                a.cols() + b.cols(),
            );
            d.set_block(0, 0, &a);
            d.set_block(a.rows(), a.cols(), &b);
            diffs.insert(n, d);
        }
        ChainComplex::new(self.ring.clone(), ranks, diffs)
    }

    /// Homology in degree `n` as an abstract group (integer complexes).
    pub fn homology_at(&self, n: i64) -> Result<FgAbelianGroup> {
        let d_next = self.diff(n + 1).as_int()?.clone();
        let d_this = self.diff(n).as_int()?.clone();
        crate::linalg::homology(&d_next, &d_this)
    }

    /// Homology presentation in degree `n`, for computing induced maps.
    pub fn homology_presentation(&self, n: i64) -> Result<HomologyPresentation> {
        let d_next = self.diff(n + 1).as_int()?.clone();
        let d_this = self.diff(n).as_int()?.clone();
        HomologyPresentation::new(&d_next, &d_this)
    }
}

/// Degree-zero chain map, validated to commute with the differentials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: BTreeMap<i64, RingMatrix>,
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        components: BTreeMap<i64, RingMatrix>,
    ) -> Result<Self> {
        if source.ring != target.ring {
            return Err(Error::RingMismatch("chain map between different rings".into()));
        }
        let mut kept = BTreeMap::new();
        for (n, f) in components {
            if f.ring() != source.ring {
                return Err(Error::RingMismatch(format!(
                    "component in degree {} is over the wrong ring",
                    n
                )));
            }
            if f.rows() != target.rank(n) || f.cols() != source.rank(n) {
                return Err(Error::NotAChainMap(format!(
                    "component in degree {} is {} by {}, expected {} by {}",
                    n,
                    f.rows(),
                    f.cols(),
                    target.rank(n),
                    source.rank(n)
                )));
            }
            if !f.is_zero() {
                kept.insert(n, f);
            }
        }
        let map = ChainMap { source, target, components: kept };
        for &n in map.source.degrees().iter() {
            if map.target.rank(n - 1) == 0 {
                continue;
            }
            let lhs = map.target.diff(n).mul(&map.component(n))?;
            let rhs = map.component(n - 1).mul(&map.source.diff(n))?;
            if lhs != rhs {
                return Err(Error::NotAChainMap(format!(
                    "does not commute with the differential in degree {}",
                    n
                )));
            }
        }
        Ok(map)
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let components = c
            .ranks
            .iter()
            .map(|(&n, &r)| (n, RingMatrix::identity(&c.ring, r)))
            .collect();
        ChainMap { source: c.clone(), target: c.clone(), components }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Result<Self> {
        ChainMap::new(source.clone(), target.clone(), BTreeMap::new())
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, n: i64) -> RingMatrix {
        match self.components.get(&n) {
            Some(f) => f.clone(),
            None => RingMatrix::zeros(&self.source.ring, self.target.rank(n), self.source.rank(n)),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&i64, &RingMatrix)> {
        self.components.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        if first.target != self.source {
            return Err(Error::NotAChainMap("composition endpoints do not match".into()));
        }
        let degrees: BTreeSet<i64> = first
            .components
            .keys()
            .copied()
            .collect();
        let mut components = BTreeMap::new();
        for n in degrees {
            components.insert(n, self.component(n).mul(&first.component(n))?);
        }
        ChainMap::new(first.source.clone(), self.target.clone(), components)
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::NotAChainMap("sum endpoints do not match".into()));
        }
        let degrees: BTreeSet<i64> =
            self.components.keys().chain(other.components.keys()).copied().collect();
        let mut components = BTreeMap::new();
        for n in degrees {
            components.insert(n, self.component(n).add(&other.component(n))?);
        }
        ChainMap::new(self.source.clone(), self.target.clone(), components)
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.add(&other.scale(&-BigInt::one()))
    }

    pub fn scale(&self, c: &BigInt) -> ChainMap {
        let components = self
            .components
            .iter()
            .map(|(&n, f)| (n, f.scale(c)))
            .filter(|(_, f)| !f.is_zero())
            .collect();
        ChainMap { source: self.source.clone(), target: self.target.clone(), components }
    }
}

/// Endomorphism of a complex over Z[G], twisted by a group endomorphism:
/// the action is `x -> F_n phi(x)` in each degree, and the defining law is
/// `d_n F_n == F_{n-1} phi(d_n)`. Over Z the twist is absent and this is an
/// ordinary chain endomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistedEndo {
    complex: ChainComplex,
    twist: Option<GroupEndo>,
    components: BTreeMap<i64, RingMatrix>,
}

impl TwistedEndo {
    pub fn new(
        complex: ChainComplex,
        twist: Option<GroupEndo>,
        components: BTreeMap<i64, RingMatrix>,
    ) -> Result<Self> {
        match (&complex.ring, &twist) {
            (Ring::Int, None) => {}
            (Ring::Group(g), Some(phi)) => {
                if phi.group() != g {
                    return Err(Error::Invalid(
                        "twist endomorphism acts on a different group".into(),
                    ));
                }
            }
            (Ring::Int, Some(_)) => {
                return Err(Error::Invalid("integer complexes take no twist".into()))
            }
            (Ring::Group(_), None) => {
                return Err(Error::Invalid(
                    "group ring complexes need an explicit twist (use the identity)".into(),
                ))
            }
        }
        let mut kept = BTreeMap::new();
        for (n, f) in components {
            if f.ring() != complex.ring {
                return Err(Error::RingMismatch(format!(
                    "component in degree {} is over the wrong ring",
                    n
                )));
            }
            if f.rows() != complex.rank(n) || f.cols() != complex.rank(n) {
                return Err(Error::NotAChainMap(format!(
                    "component in degree {} is {} by {}, expected square of size {}",
                    n,
                    f.rows(),
                    f.cols(),
                    complex.rank(n)
                )));
            }
            if !f.is_zero() {
                kept.insert(n, f);
            }
        }
        let endo = TwistedEndo { complex, twist, components: kept };
        for &n in endo.complex.degrees().iter() {
            if endo.complex.rank(n - 1) == 0 {
                continue;
            }
            let d = endo.complex.diff(n);
            let lhs = d.mul(&endo.component(n))?;
            let rhs = endo.component(n - 1).mul(&apply_twist(&d, &endo.twist)?)?;
            if lhs != rhs {
                return Err(Error::NotAChainMap(format!(
                    "twisted chain law fails in degree {}",
                    n
                )));
            }
        }
        Ok(endo)
    }

    pub fn identity(complex: &ChainComplex, twist: Option<GroupEndo>) -> Result<Self> {
        let components = complex
            .ranks
            .iter()
            .map(|(&n, &r)| (n, RingMatrix::identity(&complex.ring, r)))
            .collect();
        TwistedEndo::new(complex.clone(), twist, components)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn twist(&self) -> &Option<GroupEndo> {
        &self.twist
    }

    pub fn component(&self, n: i64) -> RingMatrix {
        match self.components.get(&n) {
            Some(f) => f.clone(),
            None => RingMatrix::zeros(&self.complex.ring, self.complex.rank(n), self.complex.rank(n)),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&i64, &RingMatrix)> {
        self.components.iter()
    }

    /// Forgets the twist; only valid over Z.
    pub fn as_chain_map(&self) -> Result<ChainMap> {
        if self.twist.is_some() {
            return Err(Error::Unsupported(
                "twisted endomorphisms are not plain chain maps".into(),
            ));
        }
        ChainMap::new(self.complex.clone(), self.complex.clone(), self.components.clone())
    }

    /// Alternating sum of componentwise traces; integer complexes.
    pub fn lefschetz_trace(&self) -> Result<BigInt> {
        if self.complex.ring != Ring::Int {
            return Err(Error::RingMismatch(
                "Lefschetz traces are defined over Z; augment first".into(),
            ));
        }
        let mut total = BigInt::zero();
        for &n in self.complex.degrees().iter() {
            let t = self.component(n).augment().trace()?;
            if n.rem_euclid(2) == 0 {
                total += t;
            } else {
                total -= t;
            }
        }
        Ok(total)
    }

    /// Alternating trace after collapsing the group ring to Z.
    pub fn augmented_lefschetz(&self) -> Result<BigInt> {
        let mut total = BigInt::zero();
        for &n in self.complex.degrees().iter() {
            let t = self.component(n).augment().trace()?;
            if n.rem_euclid(2) == 0 {
                total += t;
            } else {
                total -= t;
            }
        }
        Ok(total)
    }

    /// Reidemeister trace: the alternating Hattori-Stallings trace, a class
    /// vector over the twisted conjugacy classes of the twist.
    pub fn reidemeister_trace(&self) -> Result<TwistedClassVector> {
        let (Ring::Group(group), Some(phi)) = (&self.complex.ring, &self.twist) else {
            return Err(Error::RingMismatch(
                "Reidemeister traces live over a group ring".into(),
            ));
        };
        let set = twisted_classes(group, phi)?;
        let mut total = TwistedClassVector::zero(&set);
        for &n in self.complex.degrees().iter() {
            let sign = if n.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
            let t = hs_trace(self.component(n).as_grp()?, phi)?;
            total = total.add(&t.scale(&sign))?;
        }
        Ok(total)
    }

    /// Alternating trace of the induced maps on free homology; integer
    /// complexes, untwisted.
    pub fn homology_lefschetz(&self) -> Result<BigInt> {
        if self.complex.ring != Ring::Int {
            return Err(Error::RingMismatch("homology traces are defined over Z".into()));
        }
        let mut total = BigInt::zero();
        for &n in self.complex.degrees().iter() {
            let pres = self.complex.homology_presentation(n)?;
            let t = pres.free_trace(self.component(n).as_int()?)?;
            if n.rem_euclid(2) == 0 {
                total += t;
            } else {
                total -= t;
            }
        }
        Ok(total)
    }
}

/// Mapping cone of a chain map `j: A -> X`: degree `n` is
/// `X_n + A_{n-1}` with differential `[[d_X, j], [0, -d_A]]`.
pub fn mapping_cone(j: &ChainMap) -> Result<ChainComplex> {
    let a = j.source();
    let x = j.target();
    let ring = x.ring.clone();
    let mut ranks = BTreeMap::new();
    let degrees: BTreeSet<i64> = x
        .degrees()
        .into_iter()
        .chain(a.degrees().into_iter().map(|n| n + 1))
        .collect();
    for &n in &degrees {
        let r = x.rank(n) + a.rank(n - 1);
        if r > 0 {
            ranks.insert(n, r);
        }
    }
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        let (rt, rb) = (x.rank(n - 1), a.rank(n - 2));
        let (ct, cb) = (x.rank(n), a.rank(n - 1));
        if (rt + rb) == 0 || (ct + cb) == 0 {
            continue;
        }
        let mut d = RingMatrix::zeros(&ring, rt + rb, ct + cb);
        d.set_block(0, 0, &x.diff(n));
        d.set_block(0, ct, &j.component(n - 1));
        d.set_block(rt, ct, &a.diff(n - 1).scale(&-BigInt::one()));
        diffs.insert(n, d);
    }
    ChainComplex::new(ring, ranks, diffs)
}

/// The canonical inclusion `X -> cone(j)`.
pub fn cone_inclusion(j: &ChainMap) -> Result<ChainMap> {
    let cone = mapping_cone(j)?;
    let x = j.target();
    let mut components = BTreeMap::new();
    for &n in x.degrees().iter() {
        let mut f = RingMatrix::zeros(&x.ring, cone.rank(n), x.rank(n));
        f.set_block(0, 0, &RingMatrix::identity(&x.ring, x.rank(n)));
        components.insert(n, f);
    }
    ChainMap::new(x.clone(), cone, components)
}

/// The canonical projection `cone(j) -> A[1]`.
pub fn cone_projection(j: &ChainMap) -> Result<ChainMap> {
    let cone = mapping_cone(j)?;
    let a = j.source();
    let shifted = a.shift(1);
    let mut components = BTreeMap::new();
    for &n in shifted.degrees().iter() {
        let mut f = RingMatrix::zeros(&a.ring, shifted.rank(n), cone.rank(n));
        let xt = j.target().rank(n);
        f.set_block(0, xt, &RingMatrix::identity(&a.ring, a.rank(n - 1)));
        components.insert(n, f);
    }
    ChainMap::new(cone, shifted, components)
}

/// Diagonal endomorphism of a mapping cone. Requires `f` on the target,
/// `g` on the source, a shared twist, and the intertwining law
/// `F_n phi(J_n) == J_n G_n`, which is exactly what makes the block
/// diagonal a twisted chain map on the cone.
pub fn cone_endo(j: &ChainMap, f: &TwistedEndo, g: &TwistedEndo) -> Result<TwistedEndo> {
    if f.complex() != j.target() || g.complex() != j.source() {
        return Err(Error::Invalid(
            "cone endomorphism needs endomorphisms of the map's target and source".into(),
        ));
    }
    if f.twist() != g.twist() {
        return Err(Error::Invalid("cone endomorphism needs a shared twist".into()));
    }
    for &n in j.source().degrees().iter() {
        if j.target().rank(n) == 0 {
            continue;
        }
        let jn = j.component(n);
        let lhs = f.component(n).mul(&apply_twist(&jn, f.twist())?)?;
        let rhs = jn.mul(&g.component(n))?;
        if lhs != rhs {
            return Err(Error::Invalid(format!(
                "endomorphisms do not commute with the map in degree {}",
                n
            )));
        }
    }
    let cone = mapping_cone(j)?;
    let ring = cone.ring.clone();
    let mut components = BTreeMap::new();
    for &n in cone.degrees().iter() {
        let xt = j.target().rank(n);
        let ab = j.source().rank(n - 1);
        let mut m = RingMatrix::zeros(&ring, xt + ab, xt + ab);
        if xt > 0 {
            m.set_block(0, 0, &f.component(n));
        }
        if ab > 0 {
            m.set_block(xt, xt, &g.component(n - 1));
        }
        components.insert(n, m);
    }
    TwistedEndo::new(cone, f.twist().clone(), components)
}

/// Block diagonal endomorphism of a direct sum.
pub fn direct_sum_endo(f: &TwistedEndo, g: &TwistedEndo) -> Result<TwistedEndo> {
    if f.twist() != g.twist() {
        return Err(Error::Invalid("direct sum needs a shared twist".into()));
    }
    let sum = f.complex().direct_sum(g.complex())?;
    let ring = sum.ring.clone();
    let mut components = BTreeMap::new();
    for &n in sum.degrees().iter() {
        let (ra, rb) = (f.complex().rank(n), g.complex().rank(n));
        let mut m = RingMatrix::zeros(&ring, ra + rb, ra + rb);
        if ra > 0 {
            m.set_block(0, 0, &f.component(n));
        }
        if rb > 0 {
            m.set_block(ra, ra, &g.component(n));
        }
        components.insert(n, m);
    }
    TwistedEndo::new(sum, f.twist().clone(), components)
}

/// Z concentrated in degree zero: the tensor unit.
pub fn unit_z() -> ChainComplex {
    ChainComplex::concentrated(Ring::Int, 0, 1)
}

/// Blocks of the tensor product in one degree: `(p, q, offset)` for each
/// pair with `p + q == n`, ascending in `p`.
fn tensor_blocks(a: &ChainComplex, b: &ChainComplex, n: i64) -> Vec<(i64, i64, usize)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for &p in a.degrees().iter() {
        let q = n - p;
        let r = a.rank(p) * b.rank(q);
        if r > 0 {
            out.push((p, q, offset));
            offset += r;
        }
    }
    out
}

/// Tensor product of integer complexes, with the Koszul differential
/// `d(x ox y) = dx ox y + (-1)^p x ox dy`.
pub fn tensor_z(a: &ChainComplex, b: &ChainComplex) -> Result<ChainComplex> {
    if a.ring != Ring::Int || b.ring != Ring::Int {
        return Err(Error::Unsupported("tensor products are implemented over Z".into()));
    }
    let mut ranks = BTreeMap::new();
    let mut lows = Vec::new();
    let mut highs = Vec::new();
    for c in [a, b] {
        match (c.degrees().first(), c.degrees().last()) {
            (Some(&lo), Some(&hi)) => {
                lows.push(lo);
                highs.push(hi);
            }
            _ => return ChainComplex::new(Ring::Int, ranks, BTreeMap::new()),
        }
    }
    let (lo, hi) = (lows[0] + lows[1], highs[0] + highs[1]);
    for n in lo..=hi {
        let r: usize = tensor_blocks(a, b, n).iter().map(|&(p, q, _)| a.rank(p) * b.rank(q)).sum();
        if r > 0 {
            ranks.insert(n, r);
        }
    }
    let mut diffs = BTreeMap::new();
    for n in lo..=hi {
        let src = tensor_blocks(a, b, n);
        let dst = tensor_blocks(a, b, n - 1);
        let rows: usize = dst.iter().map(|&(p, q, _)| a.rank(p) * b.rank(q)).sum();
        let cols: usize = src.iter().map(|&(p, q, _)| a.rank(p) * b.rank(q)).sum();
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut d = IntMatrix::zeros(rows, cols);
        for &(p, q, c0) in &src {
            // d_a ox 1 into block (p-1, q).
            if let Some(&(_, _, r0)) = dst.iter().find(|&&(dp, dq, _)| dp == p - 1 && dq == q) {
                let block = a.diff(p).as_int()?.kronecker(&IntMatrix::identity(b.rank(q)));
                place_int(&mut d, r0, c0, &block);
            }
            // (-1)^p 1 ox d_b into block (p, q-1).
            if let Some(&(_, _, r0)) = dst.iter().find(|&&(dp, dq, _)| dp == p && dq == q - 1) {
                let sign = if p.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
                let block = IntMatrix::identity(a.rank(p))
                    .kronecker(b.diff(q).as_int()?)
                    .scale(&sign);
                place_int(&mut d, r0, c0, &block);
            }
        }
        diffs.insert(n, RingMatrix::Int(d));
    }
    ChainComplex::new(Ring::Int, ranks, diffs)
}

fn place_int(out: &mut IntMatrix, r0: usize, c0: usize, block: &IntMatrix) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let v = out.get(r0 + i, c0 + j) + block.get(i, j);
            out.set(r0 + i, c0 + j, v);
        }
    }
}

/// Tensor product of two degree-zero chain maps over Z.
pub fn tensor_map_z(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
    let source = tensor_z(f.source(), g.source())?;
    let target = tensor_z(f.target(), g.target())?;
    let mut components = BTreeMap::new();
    for &n in source.degrees().iter() {
        let src = tensor_blocks(f.source(), g.source(), n);
        let dst = tensor_blocks(f.target(), g.target(), n);
        let mut m = IntMatrix::zeros(target.rank(n), source.rank(n));
        for &(p, q, c0) in &src {
            if let Some(&(_, _, r0)) = dst.iter().find(|&&(dp, dq, _)| dp == p && dq == q) {
                let block = f.component(p).as_int()?.kronecker(g.component(q).as_int()?);
                place_int(&mut m, r0, c0, &block);
            }
        }
        components.insert(n, RingMatrix::Int(m));
    }
    ChainMap::new(source, target, components)
}

/// Strict dual of an integer complex: degree `n` is the dual of `C_{-n}`,
/// with differential `(-1)^n` times the transpose of `d_{1-n}`.
pub fn dual_z(c: &ChainComplex) -> Result<ChainComplex> {
    if c.ring != Ring::Int {
        return Err(Error::Unsupported("duals are implemented over Z".into()));
    }
    let ranks = c.ranks.iter().map(|(&n, &r)| (-n, r)).collect();
    let mut diffs = BTreeMap::new();
    for (&m, d) in &c.diffs {
        // d_m: C_m -> C_{m-1} dualizes to degree n = 1 - m.
        let n = 1 - m;
        let sign = if n.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
        diffs.insert(n, RingMatrix::Int(d.as_int()?.transpose().scale(&sign)));
    }
    ChainComplex::new(Ring::Int, ranks, diffs)
}

/// Coevaluation `Z -> C ox C*`: in degree zero, the alternating sum of
/// the identity coherences `(-1)^p sum_i e_i ox e_i*`. Constructing it as
/// a `ChainMap` proves it is a cycle.
pub fn coevaluation_z(c: &ChainComplex) -> Result<ChainMap> {
    let dual = dual_z(c)?;
    let t = tensor_z(c, &dual)?;
    let mut m = IntMatrix::zeros(t.rank(0), 1);
    for &(p, _, offset) in &tensor_blocks(c, &dual, 0) {
        let r = c.rank(p);
        let sign = if p.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
        for i in 0..r {
            m.set(offset + i * r + i, 0, sign.clone());
        }
    }
    let mut components = BTreeMap::new();
    components.insert(0, RingMatrix::Int(m));
    ChainMap::new(unit_z(), t, components)
}

/// Evaluation `C* ox C -> Z`: `e_i* ox e_j -> (-1)^p delta_ij` on matching
/// degrees. Constructing it as a `ChainMap` proves it kills boundaries.
pub fn evaluation_z(c: &ChainComplex) -> Result<ChainMap> {
    let dual = dual_z(c)?;
    let t = tensor_z(&dual, c)?;
    let mut m = IntMatrix::zeros(1, t.rank(0));
    for &(u, q, offset) in &tensor_blocks(&dual, c, 0) {
        debug_assert_eq!(u, -q);
        let r = c.rank(q);
        let sign = if q.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
        for i in 0..r {
            m.set(0, offset + i * r + i, sign.clone());
        }
    }
    let mut components = BTreeMap::new();
    components.insert(0, RingMatrix::Int(m));
    ChainMap::new(t, unit_z(), components)
}

/// The symmetry `C ox D -> D ox C` with the Koszul sign `(-1)^{pq}`.
pub fn swap_z(a: &ChainComplex, b: &ChainComplex) -> Result<ChainMap> {
    let source = tensor_z(a, b)?;
    let target = tensor_z(b, a)?;
    let mut components = BTreeMap::new();
    for &n in source.degrees().iter() {
        let src = tensor_blocks(a, b, n);
        let dst = tensor_blocks(b, a, n);
        let mut m = IntMatrix::zeros(target.rank(n), source.rank(n));
        for &(p, q, c0) in &src {
            let Some(&(_, _, r0)) = dst.iter().find(|&&(dp, dq, _)| dp == q && dq == p) else {
                continue;
            };
            let sign = if (p * q).rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
            let (ra, rb) = (a.rank(p), b.rank(q));
            for i in 0..ra {
                for j in 0..rb {
                    // x_i ox y_j at c0 + i*rb + j maps to y_j ox x_i.
                    m.set(r0 + j * ra + i, c0 + i * rb + j, sign.clone());
                }
            }
        }
        components.insert(n, RingMatrix::Int(m));
    }
    ChainMap::new(source, target, components)
}

/// Trace of an integer chain endomorphism through the duality zig-zag:
/// evaluation after symmetry after `f ox 1` after coevaluation. Equal to
/// the Lefschetz trace; the equality is the chain-level trace identity.
pub fn trace_via_dual(f: &TwistedEndo) -> Result<BigInt> {
    let c = f.complex();
    let f_map = f.as_chain_map()?;
    let dual = dual_z(c)?;
    let coev = coevaluation_z(c)?;
    let ev = evaluation_z(c)?;
    let swap = swap_z(c, &dual)?;
    let f_tensor_one = tensor_map_z(&f_map, &ChainMap::identity(&dual))?;
    let composite = ev.compose(&swap.compose(&f_tensor_one.compose(&coev)?)?)?;
    let m = composite.component(0);
    let m = m.as_int()?;
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(BigInt::zero());
    }
    Ok(m.get(0, 0).clone())
}

/// Checks `d h + h phi(d) == f - g` degreewise by substitution. Works over
/// any ring, including group rings where no search is possible.
pub fn verify_twisted_homotopy(
    f: &TwistedEndo,
    g: &TwistedEndo,
    h: &BTreeMap<i64, RingMatrix>,
) -> Result<bool> {
    if f.complex() != g.complex() || f.twist() != g.twist() {
        return Err(Error::Invalid(
            "homotopy endpoints must share a complex and twist".into(),
        ));
    }
    let c = f.complex();
    for (&n, hn) in h {
        if hn.rows() != c.rank(n + 1) || hn.cols() != c.rank(n) {
            return Err(Error::Dimension(format!(
                "homotopy component in degree {} is {} by {}, expected {} by {}",
                n,
                hn.rows(),
                hn.cols(),
                c.rank(n + 1),
                c.rank(n)
            )));
        }
        if hn.ring() != *c.ring() {
            return Err(Error::RingMismatch("homotopy component over the wrong ring".into()));
        }
    }
    let comp = |n: i64| -> RingMatrix {
        h.get(&n)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(c.ring(), c.rank(n + 1), c.rank(n)))
    };
    for &n in c.degrees().iter() {
        let lhs = c
            .diff(n + 1)
            .mul(&comp(n))?
            .add(&comp(n - 1).mul(&apply_twist(&c.diff(n), f.twist())?)?)?;
        let rhs = f.component(n).sub(&g.component(n))?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `d h + h d == f - g` for parallel chain maps by substitution.
pub fn verify_chain_homotopy(
    f: &ChainMap,
    g: &ChainMap,
    h: &BTreeMap<i64, RingMatrix>,
) -> Result<bool> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::Invalid("homotopy endpoints must be parallel".into()));
    }
    let (s, t) = (f.source(), f.target());
    for (&n, hn) in h {
        if hn.rows() != t.rank(n + 1) || hn.cols() != s.rank(n) {
            return Err(Error::Dimension(format!(
                "homotopy component in degree {} has the wrong shape",
                n
            )));
        }
    }
    let comp = |n: i64| -> RingMatrix {
        h.get(&n)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(s.ring(), t.rank(n + 1), s.rank(n)))
    };
    for &n in s.degrees().iter() {
        if t.rank(n) == 0 && s.rank(n) == 0 {
            continue;
        }
        let lhs = t.diff(n + 1).mul(&comp(n))?.add(&comp(n - 1).mul(&s.diff(n))?)?;
        let rhs = f.component(n).sub(&g.component(n))?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shared solver: finds `h` with `d_T h + h d'_S == delta`, where the
/// source differentials are supplied already twisted. One integer linear
/// system; over a finite group ring each entry expands through the regular
/// representation.
fn homotopy_search(
    target: &ChainComplex,
    source: &ChainComplex,
    src_diff: &BTreeMap<i64, RingMatrix>,
    delta: &BTreeMap<i64, RingMatrix>,
) -> Result<Option<BTreeMap<i64, RingMatrix>>> {
    let ring = target.ring().clone();
    // Group size 1 encodes the integer case.
    let (group, gsize, gelems) = match &ring {
        Ring::Int => (None, 1usize, Vec::new()),
        Ring::Group(g) => {
            let elems = g.elements().map_err(|_| {
                Error::Unsupported(
                    "homotopy search needs Z or a finite group ring; verify a supplied homotopy instead"
                        .into(),
                )
            })?;
            (Some(g.clone()), elems.len(), elems)
        }
    };
    let _ = &gelems;
    let mut sys = LinearSystem::new();
    // Variable layout: h_n is rank_T(n+1) x rank_S(n), each entry a block
    // of gsize integers.
    let mut bases: BTreeMap<i64, usize> = BTreeMap::new();
    for &n in source.degrees().iter() {
        let (r, c) = (target.rank(n + 1), source.rank(n));
        if r * c > 0 {
            bases.insert(n, sys.new_vars(r * c * gsize));
        }
    }
    let var = |bases: &BTreeMap<i64, usize>, n: i64, p: usize, q: usize, cols: usize| -> Option<usize> {
        bases.get(&n).map(|b| b + (p * cols + q) * gsize)
    };
    // Left/right coefficient blocks for one ring element.
    let left_block = |e: &RingMatrix, i: usize, k: usize| -> Result<IntMatrix> {
        match e {
            RingMatrix::Int(m) => Ok(IntMatrix::new(1, 1, vec![m.get(i, k).clone()])?),
            RingMatrix::Grp(m) => m.get(i, k).left_mult_matrix(),
        }
    };
    let right_block = |e: &RingMatrix, k: usize, j: usize| -> Result<IntMatrix> {
        match e {
            RingMatrix::Int(m) => Ok(IntMatrix::new(1, 1, vec![m.get(k, j).clone()])?),
            RingMatrix::Grp(m) => m.get(k, j).right_mult_matrix(),
        }
    };
    let coeff_vec = |e: &RingMatrix, i: usize, j: usize| -> Result<Vec<BigInt>> {
        match e {
            RingMatrix::Int(m) => Ok(vec![m.get(i, j).clone()]),
            RingMatrix::Grp(m) => m.get(i, j).to_coeff_vec(),
        }
    };
    let zeros_delta = |n: i64| RingMatrix::zeros(&ring, target.rank(n), source.rank(n));
    let src_d = |n: i64| -> RingMatrix {
        src_diff
            .get(&n)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(&ring, source.rank(n - 1), source.rank(n)))
    };
    // One equation per degree n, entry (i, j), group coordinate.
    for &n in source.degrees().iter() {
        let rows = target.rank(n);
        let cols = source.rank(n);
        if rows == 0 {
            continue;
        }
        let d_t = target.diff(n + 1);
        let d_s = src_d(n);
        let delta_n = delta.get(&n).cloned().unwrap_or_else(|| zeros_delta(n));
        for i in 0..rows {
            for j in 0..cols {
                let mut terms: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); gsize];
                // (d_T h_n)[i][j] = sum_p d_T[i][p] h_n[p][j].
                for p in 0..target.rank(n + 1) {
                    if let Some(base) = var(&bases, n, p, j, cols) {
                        let l = left_block(&d_t, i, p)?;
                        for k in 0..gsize {
                            for t in 0..gsize {
                                let c = l.get(k, t);
                                if !c.is_zero() {
                                    terms[k].push((base + t, c.clone()));
                                }
                            }
                        }
                    }
                }
                // (h_{n-1} d'_S)[i][j] = sum_q h_{n-1}[i][q] d'_S[q][j].
                for q in 0..source.rank(n - 1) {
                    if let Some(base) = var(&bases, n - 1, i, q, source.rank(n - 1)) {
                        let r = right_block(&d_s, q, j)?;
                        for k in 0..gsize {
                            for t in 0..gsize {
                                let c = r.get(k, t);
                                if !c.is_zero() {
                                    terms[k].push((base + t, c.clone()));
                                }
                            }
                        }
                    }
                }
                let rhs = coeff_vec(&delta_n, i, j)?;
                for k in 0..gsize {
                    sys.add_equation(std::mem::take(&mut terms[k]), rhs[k].clone());
                }
            }
        }
    }
    let Some(solution) = sys.solve() else {
        return Ok(None);
    };
    let mut h = BTreeMap::new();
    for (&n, &base) in &bases {
        let (r, c) = (target.rank(n + 1), source.rank(n));
        let m = match &group {
            None => {
                let mut m = IntMatrix::zeros(r, c);
                for p in 0..r {
                    for q in 0..c {
                        m.set(p, q, solution[base + p * c + q].clone());
                    }
                }
                RingMatrix::Int(m)
            }
            Some(g) => {
                let mut m = GroupRingMatrix::zeros(g, r, c);
                for p in 0..r {
                    for q in 0..c {
                        let start = base + (p * c + q) * gsize;
                        let e = GroupRingElement::from_coeff_vec(g, &solution[start..start + gsize])?;
                        m.set(p, q, e);
                    }
                }
                RingMatrix::Grp(m)
            }
        };
        if !m.is_zero() {
            h.insert(n, m);
        }
    }
    Ok(Some(h))
}

/// Searches for a twisted chain homotopy between `f` and `g`. Complete
/// over Z and over finite group rings: returns None only when no homotopy
/// exists. Infinite group rings are not searchable; use
/// `verify_twisted_homotopy` with a supplied certificate.
pub fn find_twisted_homotopy(
    f: &TwistedEndo,
    g: &TwistedEndo,
) -> Result<Option<BTreeMap<i64, RingMatrix>>> {
    if f.complex() != g.complex() || f.twist() != g.twist() {
        return Err(Error::Invalid(
            "homotopy endpoints must share a complex and twist".into(),
        ));
    }
    let c = f.complex();
    let mut src_diff = BTreeMap::new();
    let mut delta = BTreeMap::new();
    for &n in c.degrees().iter() {
        src_diff.insert(n, apply_twist(&c.diff(n), f.twist())?);
        delta.insert(n, f.component(n).sub(&g.component(n))?);
    }
    let h = homotopy_search(c, c, &src_diff, &delta)?;
    if let Some(h) = &h {
        debug_assert!(verify_twisted_homotopy(f, g, h)?);
    }
    Ok(h)
}

/// Searches for a chain homotopy between parallel chain maps; complete
/// over Z and finite group rings.
pub fn find_chain_homotopy(
    f: &ChainMap,
    g: &ChainMap,
) -> Result<Option<BTreeMap<i64, RingMatrix>>> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::Invalid("homotopy endpoints must be parallel".into()));
    }
    let (s, t) = (f.source(), f.target());
    let mut src_diff = BTreeMap::new();
    let mut delta = BTreeMap::new();
    for &n in s.degrees().iter() {
        src_diff.insert(n, s.diff(n));
        delta.insert(n, f.component(n).sub(&g.component(n))?);
    }
    let h = homotopy_search(t, s, &src_diff, &delta)?;
    if let Some(h) = &h {
        debug_assert!(verify_chain_homotopy(f, g, h)?);
    }
    Ok(h)
}
