//! Groups, group rings, and twisted conjugacy.
//!
//! Two kinds of groups are supported: finite groups presented by complete
//! multiplication tables, where every law is checked by enumeration, and
//! finitely generated abelian groups in canonical invariant-factor form,
//! where elements are integer tuples reduced modulo the torsion. These are
//! exactly the groups for which twisted conjugacy classes have an exact
//! normal form: orbit enumeration in the finite case, a Smith-normal-form
//! quotient presentation in the abelian case.
//!
//! The Hattori-Stallings trace of a square matrix over a group ring lands
//! in the free abelian group on twisted conjugacy classes; `push_classes`
//! transports such class vectors along intertwining homomorphisms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{smith, FgAbelianGroup, IntMatrix};

#[derive(Debug, PartialEq, Eq, Hash)]
enum GroupImpl {
    /// Complete multiplication table: `mul[a][b]` is the product, `inv[a]`
    /// the inverse, `id` the identity index.
    FiniteTable {
        mul: Vec<Vec<usize>>,
        inv: Vec<usize>,
        id: usize,
        names: Vec<String>,
    },
    /// Z^free + Z/t_1 + ... + Z/t_k with t_i | t_{i+1}.
    FgAbelian { shape: FgAbelianGroup },
}

/// A group value. Cheap to clone; equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group(Arc<GroupImpl>);

impl Group {
    /// Builds a finite group from its multiplication table, deriving the
    /// identity and inverses. All group laws are checked by enumeration.
    pub fn from_table(mul: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = mul.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty multiplication table".into()));
        }
        for row in &mul {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::NotAGroup("malformed multiplication table".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            a, b, c
                        )));
                    }
                }
            }
        }
        let id = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        let mut inv = vec![0; n];
        for a in 0..n {
            inv[a] = (0..n)
                .find(|&b| mul[a][b] == id && mul[b][a] == id)
                .ok_or_else(|| Error::NotAGroup(format!("element {} has no inverse", a)))?;
        }
        let names = match names {
            Some(ns) => {
                if ns.len() != n {
                    return Err(Error::NotAGroup("name count mismatch".into()));
                }
                ns
            }
            None => (0..n).map(|i| format!("g{}", i)).collect(),
        };
        Ok(Group(Arc::new(GroupImpl::FiniteTable { mul, inv, id, names })))
    }

    /// Z^free_rank + Z/t_1 + ... with the invariant factors in canonical
    /// form (each at least 2, each dividing the next).
    pub fn fg_abelian(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        let shape = FgAbelianGroup::new(free_rank, torsion)?;
        Ok(Group(Arc::new(GroupImpl::FgAbelian { shape })))
    }

    pub fn trivial() -> Self {
        Group::fg_abelian(0, vec![]).expect("trivial group is canonical")
    }

    pub fn integers() -> Self {
        Group::fg_abelian(1, vec![]).expect("Z is canonical")
    }

    pub fn integers_squared() -> Self {
        Group::fg_abelian(2, vec![]).expect("Z^2 is canonical")
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotAGroup("cyclic group of order 0".into()));
        }
        let n = n as usize;
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let names = (0..n)
            .map(|i| if i == 0 { "e".to_string() } else { format!("r{}", i) })
            .collect();
        Group::from_table(mul, Some(names))
    }

    /// Symmetric group on `k` letters as a table, elements ordered by the
    /// lexicographic order of their permutation words.
    pub fn symmetric(k: usize) -> Result<Self> {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            let mut out = vec![vec![]];
            for _ in 0..k {
                out = out
                    .into_iter()
                    .flat_map(|p: Vec<usize>| {
                        (0..k).filter_map(move |x| {
                            if p.contains(&x) {
                                None
                            } else {
                                let mut q = p.clone();
                                q.push(x);
                                Some(q)
                            }
                        })
                    })
                    .collect();
            }
            out
        }
        let ps = perms(k);
        let index: BTreeMap<Vec<usize>, usize> =
            ps.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mul = ps
            .iter()
            .map(|a| {
                ps.iter()
                    .map(|b| {
                        // (a * b)(x) = a(b(x))
                        let c: Vec<usize> = (0..k).map(|x| a[b[x]]).collect();
                        index[&c]
                    })
                    .collect()
            })
            .collect();
        let names = ps.iter().map(|p| format!("p{:?}", p)).collect();
        Group::from_table(mul, Some(names))
    }

    /// Direct product of two finite table groups.
    pub fn direct_product(a: &Group, b: &Group) -> Result<Self> {
        match (&*a.0, &*b.0) {
            (
                GroupImpl::FiniteTable { mul: ma, names: na, .. },
                GroupImpl::FiniteTable { mul: mb, names: nb, .. },
            ) => {
                let (s, t) = (ma.len(), mb.len());
                let code = |x: usize, y: usize| x * t + y;
                let mul = (0..s * t)
                    .map(|p| {
                        let (x1, y1) = (p / t, p % t);
                        (0..s * t)
                            .map(|q| {
                                let (x2, y2) = (q / t, q % t);
                                code(ma[x1][x2], mb[y1][y2])
                            })
                            .collect()
                    })
                    .collect();
                let names = (0..s * t)
                    .map(|p| format!("({},{})", na[p / t], nb[p % t]))
                    .collect();
                Group::from_table(mul, Some(names))
            }
            _ => Err(Error::Unsupported(
                "direct products are implemented for table groups".into(),
            )),
        }
    }

    pub fn is_finite_table(&self) -> bool {
        matches!(&*self.0, GroupImpl::FiniteTable { .. })
    }

    pub fn is_abelian_presentation(&self) -> bool {
        matches!(&*self.0, GroupImpl::FgAbelian { .. })
    }

    /// The multiplication table of a finite-table group.
    pub fn mul_table(&self) -> Option<&Vec<Vec<usize>>> {
        match &*self.0 {
            GroupImpl::FiniteTable { mul, .. } => Some(mul),
            _ => None,
        }
    }

    /// Element names of a finite-table group, in index order.
    pub fn table_names(&self) -> Option<&[String]> {
        match &*self.0 {
            GroupImpl::FiniteTable { names, .. } => Some(names),
            _ => None,
        }
    }

    /// Number of coordinates of an abelian element tuple.
    pub fn abelian_dim(&self) -> Option<usize> {
        match &*self.0 {
            GroupImpl::FgAbelian { shape } => Some(shape.free_rank + shape.torsion.len()),
            _ => None,
        }
    }

    pub fn abelian_shape(&self) -> Option<&FgAbelianGroup> {
        match &*self.0 {
            GroupImpl::FgAbelian { shape } => Some(shape),
            _ => None,
        }
    }

    pub fn order(&self) -> Option<BigInt> {
        match &*self.0 {
            GroupImpl::FiniteTable { mul, .. } => Some(BigInt::from(mul.len())),
            GroupImpl::FgAbelian { shape } => {
                if shape.free_rank > 0 {
                    None
                } else {
                    Some(shape.torsion.iter().product())
                }
            }
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &*self.0 {
            GroupImpl::FiniteTable { id, .. } => GroupElement::Finite(*id),
            GroupImpl::FgAbelian { shape } => {
                GroupElement::Abelian(vec![BigInt::zero(); shape.free_rank + shape.torsion.len()])
            }
        }
    }

    pub fn element(&self, e: &GroupElement) -> Result<GroupElement> {
        self.check_element(e)?;
        Ok(self.normalize(e.clone()))
    }

    fn check_element(&self, e: &GroupElement) -> Result<()> {
        match (&*self.0, e) {
            (GroupImpl::FiniteTable { mul, .. }, GroupElement::Finite(i)) => {
                if *i < mul.len() {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("element index {} out of range", i)))
                }
            }
            (GroupImpl::FgAbelian { shape }, GroupElement::Abelian(v)) => {
                if v.len() == shape.free_rank + shape.torsion.len() {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!(
                        "element tuple length {} for a group of {} coordinates",
                        v.len(),
                        shape.free_rank + shape.torsion.len()
                    )))
                }
            }
            _ => Err(Error::Invalid("element kind does not match group kind".into())),
        }
    }

    fn normalize(&self, e: GroupElement) -> GroupElement {
        match (&*self.0, e) {
            (GroupImpl::FgAbelian { shape }, GroupElement::Abelian(mut v)) => {
                for (k, t) in shape.torsion.iter().enumerate() {
                    let i = shape.free_rank + k;
                    v[i] = v[i].mod_floor(t);
                }
                GroupElement::Abelian(v)
            }
            (_, e) => e,
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&*self.0, a, b) {
            (GroupImpl::FiniteTable { mul, .. }, GroupElement::Finite(x), GroupElement::Finite(y)) => {
                GroupElement::Finite(mul[*x][*y])
            }
            (GroupImpl::FgAbelian { .. }, GroupElement::Abelian(x), GroupElement::Abelian(y)) => {
                let sum = x.iter().zip(y).map(|(p, q)| p + q).collect();
                self.normalize(GroupElement::Abelian(sum))
            }
            _ => panic!("element kind does not match group kind"),
        }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        match (&*self.0, a) {
            (GroupImpl::FiniteTable { inv, .. }, GroupElement::Finite(x)) => {
                GroupElement::Finite(inv[*x])
            }
            (GroupImpl::FgAbelian { .. }, GroupElement::Abelian(x)) => {
                self.normalize(GroupElement::Abelian(x.iter().map(|p| -p).collect()))
            }
            _ => panic!("element kind does not match group kind"),
        }
    }

    /// All elements; an error for infinite groups.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        match &*self.0 {
            GroupImpl::FiniteTable { mul, .. } => {
                Ok((0..mul.len()).map(GroupElement::Finite).collect())
            }
            GroupImpl::FgAbelian { shape } => {
                if shape.free_rank > 0 {
                    return Err(Error::Unsupported(
                        "cannot enumerate an infinite group".into(),
                    ));
                }
                let mut out = vec![vec![]];
                for t in &shape.torsion {
                    let tu = t.to_u64_digits().1;
                    let bound = if tu.is_empty() { 0 } else { tu[0] };
                    out = out
                        .into_iter()
                        .flat_map(|prefix: Vec<BigInt>| {
                            (0..bound).map(move |v| {
                                let mut p = prefix.clone();
                                p.push(BigInt::from(v));
                                p
                            })
                        })
                        .collect();
                }
                Ok(out.into_iter().map(GroupElement::Abelian).collect())
            }
        }
    }

    pub fn element_name(&self, e: &GroupElement) -> String {
        match (&*self.0, e) {
            (GroupImpl::FiniteTable { names, .. }, GroupElement::Finite(i)) => names[*i].clone(),
            (_, GroupElement::Abelian(v)) => {
                let coords: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                format!("({})", coords.join(","))
            }
            _ => "?".into(),
        }
    }

    /// A spanning set of generators: all elements when finite, the
    /// coordinate generators when abelian.
    pub fn generators(&self) -> Vec<GroupElement> {
        match &*self.0 {
            GroupImpl::FiniteTable { mul, .. } => (0..mul.len()).map(GroupElement::Finite).collect(),
            GroupImpl::FgAbelian { shape } => {
                let n = shape.free_rank + shape.torsion.len();
                (0..n)
                    .map(|i| {
                        let mut v = vec![BigInt::zero(); n];
                        v[i] = BigInt::one();
                        self.normalize(GroupElement::Abelian(v))
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            GroupImpl::FiniteTable { mul, .. } => write!(f, "finite group of order {}", mul.len()),
            GroupImpl::FgAbelian { shape } => write!(f, "{}", shape),
        }
    }
}

/// Element of a group: an index into a table, or a reduced integer tuple.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum GroupElement {
    Finite(usize),
    Abelian(Vec<BigInt>),
}

/// Homomorphism between groups of the same presentation kind.
///
/// Finite: the full element map, checked on all pairs. Abelian: an integer
/// matrix on coordinates, checked to respect the torsion relations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupHom {
    source: Group,
    target: Group,
    map: HomMap,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum HomMap {
    Finite(Vec<usize>),
    Abelian(IntMatrix),
}

impl GroupHom {
    pub fn finite(source: Group, target: Group, images: Vec<usize>) -> Result<Self> {
        if !source.is_finite_table() || !target.is_finite_table() {
            return Err(Error::NotAHomomorphism(
                "finite element maps need table groups on both sides".into(),
            ));
        }
        let n = source.order().unwrap();
        if BigInt::from(images.len()) != n {
            return Err(Error::NotAHomomorphism("image list length mismatch".into()));
        }
        let hom = GroupHom { source, target, map: HomMap::Finite(images) };
        for a in hom.source.elements()? {
            for b in hom.source.elements()? {
                let lhs = hom.apply(&hom.source.mul(&a, &b))?;
                let rhs = hom.target.mul(&hom.apply(&a)?, &hom.apply(&b)?);
                if lhs != rhs {
                    return Err(Error::NotAHomomorphism(format!(
                        "map does not respect the product at ({:?}, {:?})",
                        a, b
                    )));
                }
            }
        }
        Ok(hom)
    }

    pub fn abelian(source: Group, target: Group, matrix: IntMatrix) -> Result<Self> {
        let (Some(sdim), Some(tdim)) = (source.abelian_dim(), target.abelian_dim()) else {
            return Err(Error::NotAHomomorphism(
                "matrix maps need abelian presentations on both sides".into(),
            ));
        };
        if matrix.rows() != tdim || matrix.cols() != sdim {
            return Err(Error::Dimension(format!(
                "homomorphism matrix is {} by {}, expected {} by {}",
                matrix.rows(),
                matrix.cols(),
                tdim,
                sdim
            )));
        }
        // Respecting relations: t_j times the image of the j-th torsion
        // generator must vanish in the target.
        let sshape = source.abelian_shape().unwrap().clone();
        let tshape = target.abelian_shape().unwrap().clone();
        for (j, tj) in sshape.torsion.iter().enumerate() {
            let col = sshape.free_rank + j;
            for i in 0..tdim {
                let v = matrix.get(i, col) * tj;
                let ok = if i < tshape.free_rank {
                    v.is_zero()
                } else {
                    v.mod_floor(&tshape.torsion[i - tshape.free_rank]).is_zero()
                };
                if !ok {
                    return Err(Error::NotAHomomorphism(format!(
                        "image of torsion generator {} is not annihilated by {}",
                        j, tj
                    )));
                }
            }
        }
        Ok(GroupHom { source, target, map: HomMap::Abelian(matrix) })
    }

    pub fn identity(group: &Group) -> Self {
        match &*group.0 {
            GroupImpl::FiniteTable { mul, .. } => GroupHom {
                source: group.clone(),
                target: group.clone(),
                map: HomMap::Finite((0..mul.len()).collect()),
            },
            GroupImpl::FgAbelian { shape } => {
                let n = shape.free_rank + shape.torsion.len();
                GroupHom {
                    source: group.clone(),
                    target: group.clone(),
                    map: HomMap::Abelian(IntMatrix::identity(n)),
                }
            }
        }
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn is_endo(&self) -> bool {
        self.source == self.target
    }

    pub fn apply(&self, e: &GroupElement) -> Result<GroupElement> {
        self.source.check_element(e)?;
        match (&self.map, e) {
            (HomMap::Finite(images), GroupElement::Finite(i)) => {
                Ok(GroupElement::Finite(images[*i]))
            }
            (HomMap::Abelian(m), GroupElement::Abelian(v)) => {
                let col = IntMatrix::new(v.len(), 1, v.clone())?;
                let out = m.mul(&col)?;
                Ok(self.target.normalize(GroupElement::Abelian(out.column(0))))
            }
            _ => unreachable!("constructors match map kind to group kind"),
        }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &GroupHom) -> Result<GroupHom> {
        if first.target != self.source {
            return Err(Error::NotAHomomorphism(
                "composition endpoints do not match".into(),
            ));
        }
        match (&self.map, &first.map) {
            (HomMap::Finite(g), HomMap::Finite(f)) => Ok(GroupHom {
                source: first.source.clone(),
                target: self.target.clone(),
                map: HomMap::Finite(f.iter().map(|&x| g[x]).collect()),
            }),
            (HomMap::Abelian(g), HomMap::Abelian(f)) => Ok(GroupHom {
                source: first.source.clone(),
                target: self.target.clone(),
                map: HomMap::Abelian(g.mul(f)?),
            }),
            _ => Err(Error::NotAHomomorphism("mixed presentation kinds".into())),
        }
    }

    /// Pointwise equality of maps, checked on a spanning set.
    /// Element-image table of a finite-table homomorphism.
    pub fn finite_images(&self) -> Option<&[usize]> {
        match &self.map {
            HomMap::Finite(images) => Some(images),
            _ => None,
        }
    }

    /// Coordinate matrix of an abelian homomorphism.
    pub fn matrix(&self) -> Option<&IntMatrix> {
        match &self.map {
            HomMap::Abelian(m) => Some(m),
            _ => None,
        }
    }

    pub fn agrees_with(&self, other: &GroupHom) -> bool {
        if self.source != other.source || self.target != other.target {
            return false;
        }
        self.source.generators().iter().all(|g| {
            self.apply(g).ok() == other.apply(g).ok()
        })
    }
}

/// Endomorphism wrapper; construction enforces source == target.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupEndo(GroupHom);

impl GroupEndo {
    pub fn new(hom: GroupHom) -> Result<Self> {
        if !hom.is_endo() {
            return Err(Error::NotAHomomorphism(
                "endomorphism must have equal source and target".into(),
            ));
        }
        Ok(GroupEndo(hom))
    }

    pub fn identity(group: &Group) -> Self {
        GroupEndo(GroupHom::identity(group))
    }

    pub fn finite(group: Group, images: Vec<usize>) -> Result<Self> {
        GroupEndo::new(GroupHom::finite(group.clone(), group, images)?)
    }

    pub fn abelian(group: Group, matrix: IntMatrix) -> Result<Self> {
        GroupEndo::new(GroupHom::abelian(group.clone(), group, matrix)?)
    }

    pub fn group(&self) -> &Group {
        self.0.source()
    }

    pub fn hom(&self) -> &GroupHom {
        &self.0
    }

    pub fn apply(&self, e: &GroupElement) -> Result<GroupElement> {
        self.0.apply(e)
    }

    pub fn compose(&self, first: &GroupEndo) -> Result<GroupEndo> {
        GroupEndo::new(self.0.compose(&first.0)?)
    }

    /// Matrix of the endomorphism on abelian coordinates.
    pub fn matrix(&self) -> Option<&IntMatrix> {
        match &self.0.map {
            HomMap::Abelian(m) => Some(m),
            _ => None,
        }
    }
}

/// Element of the integral group ring Z[G], a finite formal sum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupRingElement {
    group: Group,
    terms: BTreeMap<GroupElement, BigInt>,
}

impl GroupRingElement {
    pub fn zero(group: &Group) -> Self {
        GroupRingElement { group: group.clone(), terms: BTreeMap::new() }
    }

    pub fn one(group: &Group) -> Self {
        GroupRingElement::monomial(group, &group.identity(), BigInt::one())
            .expect("identity is an element")
    }

    pub fn monomial(group: &Group, g: &GroupElement, c: BigInt) -> Result<Self> {
        let g = group.element(g)?;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        Ok(GroupRingElement { group: group.clone(), terms })
    }

    pub fn from_terms(group: &Group, list: Vec<(GroupElement, BigInt)>) -> Result<Self> {
        let mut out = GroupRingElement::zero(group);
        for (g, c) in list {
            out.add_term(&group.element(&g)?, &c);
        }
        Ok(out)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, g: &GroupElement, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(g.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(g);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.group, other.group, "group ring mismatch");
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return GroupRingElement::zero(&self.group);
        }
        GroupRingElement {
            group: self.group.clone(),
            terms: self.terms.iter().map(|(g, k)| (g.clone(), k * c)).collect(),
        }
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.group, other.group, "group ring mismatch");
        let mut out = GroupRingElement::zero(&self.group);
        for (g, a) in &self.terms {
            for (h, b) in &other.terms {
                out.add_term(&self.group.mul(g, h), &(a * b));
            }
        }
        out
    }

    /// Pushes every term through a homomorphism; lands in Z[target].
    pub fn map_group(&self, hom: &GroupHom) -> Result<Self> {
        if hom.source() != &self.group {
            return Err(Error::RingMismatch(
                "element group is not the homomorphism source".into(),
            ));
        }
        let mut out = GroupRingElement::zero(hom.target());
        for (g, c) in &self.terms {
            out.add_term(&hom.apply(g)?, c);
        }
        Ok(out)
    }

    pub fn twist(&self, endo: &GroupEndo) -> Result<Self> {
        self.map_group(endo.hom())
    }

    /// Sum of coefficients: the augmentation Z[G] -> Z.
    pub fn augment(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Coefficient vector indexed by the `elements()` ordering; finite
    /// groups only.
    pub fn to_coeff_vec(&self) -> Result<Vec<BigInt>> {
        let elements = self.group.elements()?;
        let index: BTreeMap<&GroupElement, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut v = vec![BigInt::zero(); elements.len()];
        for (g, c) in &self.terms {
            v[index[g]] = c.clone();
        }
        Ok(v)
    }

    pub fn from_coeff_vec(group: &Group, v: &[BigInt]) -> Result<Self> {
        let elements = group.elements()?;
        if elements.len() != v.len() {
            return Err(Error::Dimension("coefficient vector length mismatch".into()));
        }
        let mut out = GroupRingElement::zero(group);
        for (g, c) in elements.iter().zip(v) {
            out.add_term(g, c);
        }
        Ok(out)
    }

    /// Matrix of left multiplication by `self` on Z[G]; finite groups only.
    pub fn left_mult_matrix(&self) -> Result<IntMatrix> {
        let elements = self.group.elements()?;
        let n = elements.len();
        let index: BTreeMap<&GroupElement, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut m = IntMatrix::zeros(n, n);
        for (g, c) in &self.terms {
            for (h_idx, h) in elements.iter().enumerate() {
                let gh = self.group.mul(g, h);
                let row = index[&gh];
                let cur = m.get(row, h_idx) + c;
                m.set(row, h_idx, cur);
            }
        }
        Ok(m)
    }

    /// Matrix of right multiplication by `self` on Z[G]; finite groups only.
    pub fn right_mult_matrix(&self) -> Result<IntMatrix> {
        let elements = self.group.elements()?;
        let n = elements.len();
        let index: BTreeMap<&GroupElement, usize> =
            elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut m = IntMatrix::zeros(n, n);
        for (g, c) in &self.terms {
            for (h_idx, h) in elements.iter().enumerate() {
                let hg = self.group.mul(h, g);
                let row = index[&hg];
                let cur = m.get(row, h_idx) + c;
                m.set(row, h_idx, cur);
            }
        }
        Ok(m)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(g, c)| format!("{}*{}", c, self.group.element_name(g)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense matrix over a group ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupRingMatrix {
    group: Group,
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement>,
}

impl GroupRingMatrix {
    pub fn zeros(group: &Group, rows: usize, cols: usize) -> Self {
        GroupRingMatrix {
            group: group.clone(),
            rows,
            cols,
            entries: vec![GroupRingElement::zero(group); rows * cols],
        }
    }

    pub fn identity(group: &Group, n: usize) -> Self {
        let mut m = GroupRingMatrix::zeros(group, n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::one(group));
        }
        m
    }

    pub fn new(group: &Group, rows: usize, cols: usize, entries: Vec<GroupRingElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension("entry count mismatch".into()));
        }
        for e in &entries {
            if e.group() != group {
                return Err(Error::RingMismatch("entry from a different group ring".into()));
            }
        }
        Ok(GroupRingMatrix { group: group.clone(), rows, cols, entries })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GroupRingElement) {
        assert_eq!(v.group(), &self.group, "group ring mismatch");
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols || self.group != other.group {
            return Err(Error::Dimension("matrix sum shapes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(GroupRingMatrix { group: self.group.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GroupRingMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        GroupRingMatrix {
            group: self.group.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.group != other.group {
            return Err(Error::Dimension(format!(
                "product of {} by {} with {} by {}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = GroupRingMatrix::zeros(&self.group, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    /// Applies a group homomorphism to every term of every entry.
    pub fn map_group(&self, hom: &GroupHom) -> Result<GroupRingMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.map_group(hom))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupRingMatrix {
            group: hom.target().clone(),
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn twist(&self, endo: &GroupEndo) -> Result<GroupRingMatrix> {
        self.map_group(endo.hom())
    }

    /// Entrywise augmentation: the integer matrix of coefficient sums.
    pub fn augment(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).augment());
            }
        }
        m
    }

    pub fn block_diag(group: &Group, blocks: &[&GroupRingMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = GroupRingMatrix::zeros(group, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn from_int(group: &Group, m: &IntMatrix) -> Self {
        let mut out = GroupRingMatrix::zeros(group, m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(
                    i,
                    j,
                    GroupRingElement::monomial(group, &group.identity(), m.get(i, j).clone())
                        .expect("identity"),
                );
            }
        }
        out
    }
}

/// Label of a twisted conjugacy class, usable as a map key.
///
/// Finite: the least element index in the orbit. Abelian: reduced quotient
/// coordinates (free coordinates unreduced, torsion coordinates in range).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ClassLabel {
    Finite(usize),
    Abelian(Vec<BigInt>),
}

/// The set of twisted conjugacy classes of (G, phi): orbits of
/// g ~ h g phi(h)^{-1}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TwistedClassSet {
    Finite {
        group: Group,
        twist: GroupEndo,
        /// class_of[element index] == class label (least orbit member).
        class_of: Vec<usize>,
        representatives: Vec<usize>,
    },
    Abelian {
        group: Group,
        twist: GroupEndo,
        /// Quotient of the coordinate lattice by im(1 - phi) and the
        /// torsion relations, as a Smith presentation.
        quotient: FgAbelianGroup,
        proj: IntMatrix,
        proj_inv: IntMatrix,
        /// One modulus per projected coordinate; 0 marks a free coordinate.
        moduli: Vec<BigInt>,
    },
}

impl TwistedClassSet {
    pub fn group(&self) -> &Group {
        match self {
            TwistedClassSet::Finite { group, .. } => group,
            TwistedClassSet::Abelian { group, .. } => group,
        }
    }

    pub fn twist(&self) -> &GroupEndo {
        match self {
            TwistedClassSet::Finite { twist, .. } => twist,
            TwistedClassSet::Abelian { twist, .. } => twist,
        }
    }

    /// Number of classes; None when infinite.
    pub fn class_count(&self) -> Option<BigInt> {
        match self {
            TwistedClassSet::Finite { representatives, .. } => {
                Some(BigInt::from(representatives.len()))
            }
            TwistedClassSet::Abelian { quotient, .. } => {
                if quotient.free_rank > 0 {
                    None
                } else {
                    Some(quotient.torsion.iter().product())
                }
            }
        }
    }

    pub fn quotient_shape(&self) -> Option<&FgAbelianGroup> {
        match self {
            TwistedClassSet::Abelian { quotient, .. } => Some(quotient),
            TwistedClassSet::Finite { .. } => None,
        }
    }

    pub fn class_of(&self, e: &GroupElement) -> Result<ClassLabel> {
        match (self, e) {
            (TwistedClassSet::Finite { class_of, .. }, GroupElement::Finite(i)) => {
                if *i >= class_of.len() {
                    return Err(Error::Invalid("element index out of range".into()));
                }
                Ok(ClassLabel::Finite(class_of[*i]))
            }
            (TwistedClassSet::Abelian { proj, moduli, .. }, GroupElement::Abelian(v)) => {
                if v.len() != proj.cols() {
                    return Err(Error::Invalid("element tuple length mismatch".into()));
                }
                let col = IntMatrix::new(v.len(), 1, v.clone())?;
                let y = proj.mul(&col)?;
                let mut label = Vec::new();
                for i in 0..y.rows() {
                    let m = &moduli[i];
                    if m.is_one() {
                        continue;
                    }
                    if m.is_zero() {
                        label.push(y.get(i, 0).clone());
                    } else {
                        label.push(y.get(i, 0).mod_floor(m));
                    }
                }
                Ok(ClassLabel::Abelian(label))
            }
            _ => Err(Error::Invalid("element kind does not match class set".into())),
        }
    }

    /// A concrete group element in the labelled class.
    pub fn representative(&self, label: &ClassLabel) -> Result<GroupElement> {
        match (self, label) {
            (TwistedClassSet::Finite { .. }, ClassLabel::Finite(i)) => {
                Ok(GroupElement::Finite(*i))
            }
            (
                TwistedClassSet::Abelian { proj_inv, moduli, .. },
                ClassLabel::Abelian(coords),
            ) => {
                let mut full = Vec::with_capacity(moduli.len());
                let mut it = coords.iter();
                for m in moduli {
                    if m.is_one() {
                        full.push(BigInt::zero());
                    } else {
                        full.push(
                            it.next()
                                .ok_or_else(|| Error::Invalid("label too short".into()))?
                                .clone(),
                        );
                    }
                }
                if it.next().is_some() {
                    return Err(Error::Invalid("label too long".into()));
                }
                let y = IntMatrix::new(full.len(), 1, full)?;
                let x = proj_inv.mul(&y)?;
                Ok(self.group().normalize(GroupElement::Abelian(x.column(0))))
            }
            _ => Err(Error::Invalid("label kind does not match class set".into())),
        }
    }

    /// All class labels; error when the class set is infinite.
    pub fn labels(&self) -> Result<Vec<ClassLabel>> {
        match self {
            TwistedClassSet::Finite { representatives, .. } => {
                Ok(representatives.iter().map(|&r| ClassLabel::Finite(r)).collect())
            }
            TwistedClassSet::Abelian { moduli, .. } => {
                let mut labels = vec![vec![]];
                for m in moduli {
                    if m.is_one() {
                        continue;
                    }
                    if m.is_zero() {
                        return Err(Error::Unsupported(
                            "infinitely many twisted conjugacy classes".into(),
                        ));
                    }
                    let bound = m.to_u64_digits().1.first().copied().unwrap_or(0);
                    labels = labels
                        .into_iter()
                        .flat_map(|prefix: Vec<BigInt>| {
                            (0..bound).map(move |v| {
                                let mut p = prefix.clone();
                                p.push(BigInt::from(v));
                                p
                            })
                        })
                        .collect();
                }
                Ok(labels.into_iter().map(ClassLabel::Abelian).collect())
            }
        }
    }

    pub fn label_name(&self, label: &ClassLabel) -> String {
        match (self, label) {
            (TwistedClassSet::Finite { group, .. }, ClassLabel::Finite(i)) => {
                format!("[{}]", group.element_name(&GroupElement::Finite(*i)))
            }
            (_, ClassLabel::Abelian(coords)) => {
                let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                format!("[{}]", parts.join(","))
            }
            _ => "[?]".into(),
        }
    }
}

/// Twisted conjugacy classes of `phi` on its group.
pub fn twisted_classes(group: &Group, twist: &GroupEndo) -> Result<TwistedClassSet> {
    if twist.group() != group {
        return Err(Error::Invalid("twist endomorphism acts on a different group".into()));
    }
    match &*group.0 {
        GroupImpl::FiniteTable { mul, .. } => {
            let n = mul.len();
            let mut class_of = vec![usize::MAX; n];
            let mut representatives = Vec::new();
            for start in 0..n {
                if class_of[start] != usize::MAX {
                    continue;
                }
                // Orbit of start under g -> h g phi(h)^{-1}.
                let mut stack = vec![start];
                class_of[start] = start;
                representatives.push(start);
                while let Some(x) = stack.pop() {
                    for h in 0..n {
                        let hx = group.mul(&GroupElement::Finite(h), &GroupElement::Finite(x));
                        let ph = twist.apply(&GroupElement::Finite(h))?;
                        let y = group.mul(&hx, &group.inv(&ph));
                        let GroupElement::Finite(yi) = y else { unreachable!() };
                        if class_of[yi] == usize::MAX {
                            class_of[yi] = start;
                            stack.push(yi);
                        }
                    }
                }
            }
            Ok(TwistedClassSet::Finite {
                group: group.clone(),
                twist: twist.clone(),
                class_of,
                representatives,
            })
        }
        GroupImpl::FgAbelian { shape } => {
            let n = shape.free_rank + shape.torsion.len();
            let m = twist.matrix().expect("abelian endo has a matrix").clone();
            let one_minus = IntMatrix::identity(n).sub(&m)?;
            // Quotient of Z^n by the columns of (1 - phi) and the torsion
            // relations t_j e_j.
            let mut rel = IntMatrix::zeros(n, shape.torsion.len());
            for (j, t) in shape.torsion.iter().enumerate() {
                rel.set(shape.free_rank + j, j, t.clone());
            }
            let b = one_minus.hstack(&rel)?;
            let s = smith(&b);
            let mut moduli = Vec::with_capacity(n);
            for i in 0..n {
                if i < s.d.rows().min(s.d.cols()) {
                    moduli.push(s.d.get(i, i).clone());
                } else {
                    moduli.push(BigInt::zero());
                }
            }
            let quotient = FgAbelianGroup::from_diagonal(&moduli, n);
            Ok(TwistedClassSet::Abelian {
                group: group.clone(),
                twist: twist.clone(),
                quotient,
                proj: s.u,
                proj_inv: s.u_inv,
                moduli,
            })
        }
    }
}

/// Finite formal sum of twisted conjugacy classes with integer coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistedClassVector {
    set: TwistedClassSet,
    coeffs: BTreeMap<ClassLabel, BigInt>,
}

impl TwistedClassVector {
    pub fn zero(set: &TwistedClassSet) -> Self {
        TwistedClassVector { set: set.clone(), coeffs: BTreeMap::new() }
    }

    pub fn set(&self) -> &TwistedClassSet {
        &self.set
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&ClassLabel, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, label: &ClassLabel) -> BigInt {
        self.coeffs.get(label).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_class(&mut self, label: ClassLabel, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(label.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&label);
        }
    }

    pub fn add_element(&mut self, e: &GroupElement, c: &BigInt) -> Result<()> {
        let label = self.set.class_of(e)?;
        self.add_class(label, c);
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.set != other.set {
            return Err(Error::Invalid("class vectors over different class sets".into()));
        }
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            out.add_class(l.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TwistedClassVector {
            set: self.set.clone(),
            coeffs: self.coeffs.iter().map(|(l, c)| (l.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return TwistedClassVector { set: self.set.clone(), coeffs: BTreeMap::new() };
        }
        TwistedClassVector {
            set: self.set.clone(),
            coeffs: self.coeffs.iter().map(|(l, k)| (l.clone(), k * c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total coefficient: collapses every class to a point.
    pub fn augment(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }
}

impl fmt::Display for TwistedClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(l, c)| format!("{}*{}", c, self.set.label_name(l)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Hattori-Stallings trace of a square group-ring matrix, twisted by `phi`:
/// the diagonal coefficient sum, read in twisted conjugacy classes.
pub fn hs_trace(m: &GroupRingMatrix, twist: &GroupEndo) -> Result<TwistedClassVector> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension("trace of a non-square matrix".into()));
    }
    let set = twisted_classes(m.group(), twist)?;
    let mut out = TwistedClassVector::zero(&set);
    for i in 0..m.rows() {
        for (g, c) in m.get(i, i).terms() {
            out.add_element(g, c)?;
        }
    }
    Ok(out)
}

/// Transports a class vector along `i: G -> H`. Requires the intertwining
/// law i . phi_src == phi_dst . i, which is what makes the induced map on
/// twisted classes well defined.
pub fn push_classes(
    i: &GroupHom,
    twist_src: &GroupEndo,
    twist_dst: &GroupEndo,
    v: &TwistedClassVector,
) -> Result<TwistedClassVector> {
    if v.set().group() != i.source() || v.set().twist() != twist_src {
        return Err(Error::Invalid("vector does not live over the source twist".into()));
    }
    if twist_dst.group() != i.target() {
        return Err(Error::Invalid("target twist acts on the wrong group".into()));
    }
    let left = i.compose(twist_src.hom())?;
    let right = twist_dst.hom().compose(i)?;
    if !left.agrees_with(&right) {
        return Err(Error::Invalid(
            "homomorphism does not intertwine the twists".into(),
        ));
    }
    let target_set = twisted_classes(i.target(), twist_dst)?;
    let mut out = TwistedClassVector::zero(&target_set);
    for (label, c) in v.coeffs() {
        let rep = v.set().representative(label)?;
        out.add_element(&i.apply(&rep)?, c)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> Group {
        Group::symmetric(3).unwrap()
    }

    #[test]
    fn cyclic_group_laws() {
        let g = Group::cyclic(6).unwrap();
        assert_eq!(g.order(), Some(BigInt::from(6)));
        let a = GroupElement::Finite(2);
        let b = GroupElement::Finite(5);
        assert_eq!(g.mul(&a, &b), GroupElement::Finite(1));
        assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
    }

    #[test]
    fn broken_table_is_rejected() {
        // Left translation by 1 is not injective here.
        let mul = vec![vec![0, 1], vec![1, 1]];
        assert!(Group::from_table(mul, None).is_err());
    }

    #[test]
    fn abelian_constructor_rejects_non_canonical_factors() {
        assert!(Group::fg_abelian(0, vec![BigInt::from(2), BigInt::from(3)]).is_err());
        assert!(Group::fg_abelian(0, vec![BigInt::from(1)]).is_err());
        assert!(Group::fg_abelian(1, vec![BigInt::from(2), BigInt::from(4)]).is_ok());
    }

    #[test]
    fn finite_hom_checked() {
        let c2 = Group::cyclic(2).unwrap();
        let c4 = Group::cyclic(4).unwrap();
        // x -> 2x embeds C2 in C4.
        assert!(GroupHom::finite(c2.clone(), c4.clone(), vec![0, 2]).is_ok());
        assert!(GroupHom::finite(c2, c4, vec![0, 1]).is_err());
    }

    #[test]
    fn abelian_hom_respects_torsion() {
        let z = Group::integers();
        let z2 = Group::fg_abelian(0, vec![BigInt::from(2)]).unwrap();
        // Z -> Z/2 reduction is fine.
        assert!(GroupHom::abelian(z.clone(), z2.clone(), IntMatrix::from_i64(1, 1, &[1])).is_ok());
        // Z/2 -> Z by 1 is not a homomorphism.
        assert!(GroupHom::abelian(z2, z, IntMatrix::from_i64(1, 1, &[1])).is_err());
    }

    #[test]
    fn group_ring_multiplication_in_s3() {
        let g = s3();
        // Pick two elements and check (a + b)^2 expands correctly.
        let a = GroupRingElement::monomial(&g, &GroupElement::Finite(1), BigInt::one()).unwrap();
        let b = GroupRingElement::monomial(&g, &GroupElement::Finite(4), BigInt::from(2)).unwrap();
        let s = a.add(&b);
        let sq = s.mul(&s);
        let expect = a
            .mul(&a)
            .add(&a.mul(&b))
            .add(&b.mul(&a))
            .add(&b.mul(&b));
        assert_eq!(sq, expect);
        assert_eq!(sq.augment(), BigInt::from(9));
    }

    #[test]
    fn trivial_twist_on_s3_gives_ordinary_conjugacy() {
        let g = s3();
        let id = GroupEndo::identity(&g);
        let set = twisted_classes(&g, &id).unwrap();
        // S3 has three conjugacy classes.
        assert_eq!(set.class_count(), Some(BigInt::from(3)));
    }

    #[test]
    fn twisted_classes_partition_elements() {
        let g = s3();
        let id = GroupEndo::identity(&g);
        let set = twisted_classes(&g, &id).unwrap();
        for e in g.elements().unwrap() {
            let label = set.class_of(&e).unwrap();
            let rep = set.representative(&label).unwrap();
            assert_eq!(set.class_of(&rep).unwrap(), label);
        }
    }

    #[test]
    fn twisted_relation_holds_finite() {
        let g = s3();
        // A nontrivial endomorphism: conjugation by element 1.
        let c = GroupElement::Finite(1);
        let images = g
            .elements()
            .unwrap()
            .iter()
            .map(|x| {
                let y = g.mul(&g.mul(&c, x), &g.inv(&c));
                let GroupElement::Finite(i) = y else { unreachable!() };
                i
            })
            .collect();
        let phi = GroupEndo::finite(g.clone(), images).unwrap();
        let set = twisted_classes(&g, &phi).unwrap();
        for x in g.elements().unwrap() {
            for h in g.elements().unwrap() {
                let hx = g.mul(&h, &x);
                let y = g.mul(&hx, &g.inv(&phi.apply(&h).unwrap()));
                assert_eq!(set.class_of(&x).unwrap(), set.class_of(&y).unwrap());
            }
        }
    }

    #[test]
    fn abelian_twisted_classes_degree_three() {
        // Z with phi = multiplication by 3: classes form Z/2.
        let z = Group::integers();
        let phi = GroupEndo::abelian(z.clone(), IntMatrix::from_i64(1, 1, &[3])).unwrap();
        let set = twisted_classes(&z, &phi).unwrap();
        assert_eq!(set.class_count(), Some(BigInt::from(2)));
        let a = set.class_of(&GroupElement::Abelian(vec![BigInt::from(5)])).unwrap();
        let b = set.class_of(&GroupElement::Abelian(vec![BigInt::from(7)])).unwrap();
        assert_eq!(a, b);
        let c = set.class_of(&GroupElement::Abelian(vec![BigInt::from(4)])).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn abelian_identity_twist_has_free_class_set() {
        let z = Group::integers();
        let phi = GroupEndo::identity(&z);
        let set = twisted_classes(&z, &phi).unwrap();
        assert_eq!(set.class_count(), None);
        assert_eq!(set.quotient_shape().unwrap(), &FgAbelianGroup::free(1));
    }

    #[test]
    fn hs_trace_of_identity_counts_rank() {
        let g = s3();
        let id = GroupEndo::identity(&g);
        let m = GroupRingMatrix::identity(&g, 3);
        let t = hs_trace(&m, &id).unwrap();
        assert_eq!(t.augment(), BigInt::from(3));
        assert_eq!(t.support_size(), 1);
    }

    #[test]
    fn hs_cyclicity_on_random_pairs() {
        let g = s3();
        let id = GroupEndo::identity(&g);
        // a: 2 by 3, b: 3 by 2 with deterministic pseudo-entries.
        let mut a = GroupRingMatrix::zeros(&g, 2, 3);
        let mut b = GroupRingMatrix::zeros(&g, 3, 2);
        let mut k = 1usize;
        for i in 0..2 {
            for j in 0..3 {
                a.set(
                    i,
                    j,
                    GroupRingElement::monomial(&g, &GroupElement::Finite(k % 6), BigInt::from(k as i64))
                        .unwrap(),
                );
                k += 1;
            }
        }
        for i in 0..3 {
            for j in 0..2 {
                b.set(
                    i,
                    j,
                    GroupRingElement::monomial(&g, &GroupElement::Finite((k * 2) % 6), BigInt::from(3 - k as i64))
                        .unwrap(),
                );
                k += 1;
            }
        }
        let ab = hs_trace(&a.mul(&b).unwrap(), &id).unwrap();
        let ba = hs_trace(&b.mul(&a).unwrap(), &id).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn push_classes_along_reduction() {
        // Z -> Z/2 with identity twists on both sides.
        let z = Group::integers();
        let z2 = Group::fg_abelian(0, vec![BigInt::from(2)]).unwrap();
        let i = GroupHom::abelian(z.clone(), z2.clone(), IntMatrix::from_i64(1, 1, &[1])).unwrap();
        let phi_z = GroupEndo::identity(&z);
        let phi_z2 = GroupEndo::identity(&z2);
        let src = twisted_classes(&z, &phi_z).unwrap();
        let mut v = TwistedClassVector::zero(&src);
        v.add_element(&GroupElement::Abelian(vec![BigInt::from(3)]), &BigInt::one()).unwrap();
        v.add_element(&GroupElement::Abelian(vec![BigInt::from(4)]), &BigInt::from(5)).unwrap();
        let pushed = push_classes(&i, &phi_z, &phi_z2, &v).unwrap();
        // 3 and 4 land in the two distinct classes mod 2.
        assert_eq!(pushed.support_size(), 2);
        assert_eq!(pushed.augment(), BigInt::from(6));
    }

    #[test]
    fn push_classes_requires_intertwining() {
        let z = Group::integers();
        let i = GroupHom::identity(&z);
        let phi2 = GroupEndo::abelian(z.clone(), IntMatrix::from_i64(1, 1, &[2])).unwrap();
        let phi3 = GroupEndo::abelian(z.clone(), IntMatrix::from_i64(1, 1, &[3])).unwrap();
        let src = twisted_classes(&z, &phi2).unwrap();
        let v = TwistedClassVector::zero(&src);
        assert!(push_classes(&i, &phi2, &phi3, &v).is_err());
    }

    #[test]
    fn augmentation_commutes_with_hs_trace() {
        let g = Group::cyclic(4).unwrap();
        let id = GroupEndo::identity(&g);
        let mut m = GroupRingMatrix::zeros(&g, 2, 2);
        m.set(
            0,
            0,
            GroupRingElement::from_terms(
                &g,
                vec![
                    (GroupElement::Finite(1), BigInt::from(2)),
                    (GroupElement::Finite(3), BigInt::from(-1)),
                ],
            )
            .unwrap(),
        );
        m.set(1, 1, GroupRingElement::one(&g));
        let t = hs_trace(&m, &id).unwrap();
        assert_eq!(t.augment(), m.augment().trace().unwrap());
    }

    #[test]
    fn left_and_right_mult_matrices_represent_the_ring() {
        let g = s3();
        let a = GroupRingElement::from_terms(
            &g,
            vec![
                (GroupElement::Finite(2), BigInt::from(3)),
                (GroupElement::Finite(5), BigInt::from(-1)),
            ],
        )
        .unwrap();
        let b = GroupRingElement::from_terms(
            &g,
            vec![
                (GroupElement::Finite(1), BigInt::from(1)),
                (GroupElement::Finite(4), BigInt::from(2)),
            ],
        )
        .unwrap();
        let ab = a.mul(&b);
        let la = a.left_mult_matrix().unwrap();
        let vb = IntMatrix::new(6, 1, b.to_coeff_vec().unwrap()).unwrap();
        let vab = IntMatrix::new(6, 1, ab.to_coeff_vec().unwrap()).unwrap();
        assert_eq!(la.mul(&vb).unwrap(), vab);
        let rb = b.right_mult_matrix().unwrap();
        let va = IntMatrix::new(6, 1, a.to_coeff_vec().unwrap()).unwrap();
        assert_eq!(rb.mul(&va).unwrap(), vab);
    }
}
