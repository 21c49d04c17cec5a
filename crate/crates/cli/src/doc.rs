//! JSON document formats. Every file carries a top-level "kind"
//! discriminator and "version": 1. Integer entries are decimal strings,
//! so coefficients are arbitrary precision; structural numbers (ranks,
//! degrees, vertex indices) are plain JSON numbers.
//!
//! Matrix shapes are never stored: a differential in degree n is
//! rank(n-1) by rank(n), a map component is target rank by source rank,
//! a homomorphism matrix is target dimension by source dimension. The
//! parser checks the nested arrays against the context and rejects
//! ragged or mis-sized data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use fptrace_core::chain::{ChainComplex, ChainMap, Ring, RingMatrix, TwistedEndo};
use fptrace_core::fincat::FinCategory;
use fptrace_core::groupring::{
    Group, GroupElement, GroupEndo, GroupHom, GroupRingElement, GroupRingMatrix,
};
use fptrace_core::linalg::IntMatrix;
use fptrace_core::profunctor::{coend, unit_profunctor, DualPairCertificate, Profunctor, ProfunctorMap};
use fptrace_core::reidemeister::RelativeTraceInput;
use fptrace_core::simplicial::SimplicialComplex;
use fptrace_core::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

/// Arbitrary-precision integer carried as a decimal string.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Big(pub BigInt);

impl Serialize for Big {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Big {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        BigInt::from_str(&raw)
            .map(Big)
            .map_err(|_| D::Error::custom(format!("not a decimal integer: {:?}", raw)))
    }
}

impl fmt::Display for Big {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(tag = "kind")]
pub enum Document {
    #[serde(rename = "simplicial_complex")]
    SimplicialComplex(SimplicialComplexDoc),
    #[serde(rename = "simplicial_map")]
    SimplicialMap(SimplicialMapDoc),
    #[serde(rename = "group")]
    Group(GroupDoc),
    #[serde(rename = "group_endo")]
    GroupEndo(GroupEndoDoc),
    #[serde(rename = "chain_complex")]
    ChainComplex(ChainComplexDoc),
    #[serde(rename = "twisted_endo")]
    TwistedEndo(TwistedEndoDoc),
    #[serde(rename = "profunctor")]
    Profunctor(ProfunctorDoc),
    #[serde(rename = "weight_certificate")]
    WeightCertificate(WeightCertificateDoc),
    #[serde(rename = "relative_input")]
    RelativeInput(RelativeInputDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::SimplicialComplex(_) => "simplicial_complex",
            Document::SimplicialMap(_) => "simplicial_map",
            Document::Group(_) => "group",
            Document::GroupEndo(_) => "group_endo",
            Document::ChainComplex(_) => "chain_complex",
            Document::TwistedEndo(_) => "twisted_endo",
            Document::Profunctor(_) => "profunctor",
            Document::WeightCertificate(_) => "weight_certificate",
            Document::RelativeInput(_) => "relative_input",
        }
    }

    pub fn version(&self) -> u32 {
        match self {
            Document::SimplicialComplex(d) => d.version,
            Document::SimplicialMap(d) => d.version,
            Document::Group(d) => d.version,
            Document::GroupEndo(d) => d.version,
            Document::ChainComplex(d) => d.version,
            Document::TwistedEndo(d) => d.version,
            Document::Profunctor(d) => d.version,
            Document::WeightCertificate(d) => d.version,
            Document::RelativeInput(d) => d.version,
        }
    }

    pub fn check_version(&self) -> Result<()> {
        if self.version() != FORMAT_VERSION {
            return Err(invalid(format!(
                "unsupported document version {} (supported: {})",
                self.version(),
                FORMAT_VERSION
            )));
        }
        Ok(())
    }
}

// -------------------------------------------------------------------
// Simplicial documents

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SimplicialComplexDoc {
    pub version: u32,
    pub n_vertices: usize,
    /// Generating simplices; faces are closed over on load.
    pub simplices: Vec<Vec<usize>>,
}

impl SimplicialComplexDoc {
    pub fn to_core(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::new(self.n_vertices, self.simplices.clone())
    }

    pub fn from_core(c: &SimplicialComplex) -> Self {
        let mut simplices = Vec::new();
        if let Some(top) = c.dimension() {
            for d in 0..=top {
                simplices.extend(c.simplices(d).iter().cloned());
            }
        }
        SimplicialComplexDoc { version: FORMAT_VERSION, n_vertices: c.n_vertices(), simplices }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct SimplicialMapDoc {
    pub version: u32,
    /// Image of each source vertex; source and target complexes come
    /// from companion documents.
    pub vertex_map: Vec<usize>,
}

// -------------------------------------------------------------------
// Groups, homomorphisms, group rings

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupDto {
    /// Finite group as a full multiplication table; `table[a][b]` is the
    /// index of the product.
    FiniteTable {
        table: Vec<Vec<usize>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
    /// Z^free_rank plus cyclic factors with the listed moduli.
    FgAbelian { free_rank: usize, torsion: Vec<Big> },
}

impl GroupDto {
    pub fn to_core(&self) -> Result<Group> {
        match self {
            GroupDto::FiniteTable { table, names } => {
                Group::from_table(table.clone(), names.clone())
            }
            GroupDto::FgAbelian { free_rank, torsion } => {
                Group::fg_abelian(*free_rank, torsion.iter().map(|b| b.0.clone()).collect())
            }
        }
    }

    pub fn from_core(g: &Group) -> Result<Self> {
        if let Some(table) = g.mul_table() {
            let names = g.table_names().map(|n| n.to_vec());
            return Ok(GroupDto::FiniteTable { table: table.clone(), names });
        }
        if let Some(shape) = g.abelian_shape() {
            return Ok(GroupDto::FgAbelian {
                free_rank: shape.free_rank,
                torsion: shape.torsion.iter().cloned().map(Big).collect(),
            });
        }
        Err(invalid("group has no serializable presentation"))
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct GroupDoc {
    pub version: u32,
    #[serde(flatten)]
    pub group: GroupDto,
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HomDto {
    /// Image element index for every source element, in index order.
    Finite { images: Vec<usize> },
    /// Coordinate matrix, target dimension by source dimension.
    Abelian { matrix: Vec<Vec<Big>> },
}

impl HomDto {
    pub fn to_hom(&self, source: &Group, target: &Group) -> Result<GroupHom> {
        match self {
            HomDto::Finite { images } => {
                GroupHom::finite(source.clone(), target.clone(), images.clone())
            }
            HomDto::Abelian { matrix } => {
                let tdim = target
                    .abelian_dim()
                    .ok_or_else(|| invalid("abelian matrix against a table group"))?;
                let sdim = source
                    .abelian_dim()
                    .ok_or_else(|| invalid("abelian matrix against a table group"))?;
                GroupHom::abelian(source.clone(), target.clone(), int_matrix(matrix, tdim, sdim)?)
            }
        }
    }

    pub fn from_hom(h: &GroupHom) -> Result<Self> {
        if let Some(images) = h.finite_images() {
            return Ok(HomDto::Finite { images: images.to_vec() });
        }
        if let Some(m) = h.matrix() {
            return Ok(HomDto::Abelian { matrix: int_matrix_dto(m) });
        }
        Err(invalid("homomorphism has no serializable presentation"))
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct GroupEndoDoc {
    pub version: u32,
    pub group: GroupDto,
    pub endo: HomDto,
}

impl GroupEndoDoc {
    pub fn to_core(&self) -> Result<(Group, GroupEndo)> {
        let g = self.group.to_core()?;
        let endo = GroupEndo::new(self.endo.to_hom(&g, &g)?)?;
        Ok((g, endo))
    }

    pub fn from_core(endo: &GroupEndo) -> Result<Self> {
        Ok(GroupEndoDoc {
            version: FORMAT_VERSION,
            group: GroupDto::from_core(endo.group())?,
            endo: HomDto::from_hom(endo.hom())?,
        })
    }
}

/// Group element: `{"index": i}` in a table group, `{"coords": [...]}`
/// in an abelian presentation.
#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(untagged)]
pub enum ElementDto {
    Finite { index: usize },
    Abelian { coords: Vec<Big> },
}

impl ElementDto {
    fn to_core(&self, group: &Group) -> Result<GroupElement> {
        let raw = match self {
            ElementDto::Finite { index } => GroupElement::Finite(*index),
            ElementDto::Abelian { coords } => {
                GroupElement::Abelian(coords.iter().map(|b| b.0.clone()).collect())
            }
        };
        group.element(&raw)
    }

    fn from_core(e: &GroupElement) -> Self {
        match e {
            GroupElement::Finite(i) => ElementDto::Finite { index: *i },
            GroupElement::Abelian(coords) => {
                ElementDto::Abelian { coords: coords.iter().cloned().map(Big).collect() }
            }
        }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct TermDto {
    pub element: ElementDto,
    pub coeff: Big,
}

/// Matrix over the ambient ring: nested rows of decimal strings over Z,
/// nested rows of term lists over a group ring.
#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(untagged)]
pub enum MatrixDto {
    Int(Vec<Vec<Big>>),
    Grp(Vec<Vec<Vec<TermDto>>>),
}

fn check_shape<T>(rows: &[Vec<T>], want_rows: usize, want_cols: usize) -> Result<()> {
    if rows.len() != want_rows || rows.iter().any(|r| r.len() != want_cols) {
        return Err(invalid(format!(
            "matrix shape mismatch: expected {} by {}",
            want_rows, want_cols
        )));
    }
    Ok(())
}

fn int_matrix(rows: &[Vec<Big>], want_rows: usize, want_cols: usize) -> Result<IntMatrix> {
    check_shape(rows, want_rows, want_cols)?;
    let mut m = IntMatrix::zeros(want_rows, want_cols);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m.set(i, j, v.0.clone());
        }
    }
    Ok(m)
}

fn int_matrix_dto(m: &IntMatrix) -> Vec<Vec<Big>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| Big(m.get(i, j).clone())).collect())
        .collect()
}

impl MatrixDto {
    pub fn to_core(&self, ring: &Ring, rows: usize, cols: usize) -> Result<RingMatrix> {
        match (self, ring) {
            (MatrixDto::Int(data), Ring::Int) => {
                Ok(RingMatrix::Int(int_matrix(data, rows, cols)?))
            }
            (MatrixDto::Grp(data), Ring::Group(g)) => {
                check_shape(data, rows, cols)?;
                let mut m = GroupRingMatrix::zeros(g, rows, cols);
                for (i, row) in data.iter().enumerate() {
                    for (j, terms) in row.iter().enumerate() {
                        let list = terms
                            .iter()
                            .map(|t| Ok((t.element.to_core(g)?, t.coeff.0.clone())))
                            .collect::<Result<Vec<_>>>()?;
                        m.set(i, j, GroupRingElement::from_terms(g, list)?);
                    }
                }
                Ok(RingMatrix::Grp(m))
            }
            // An empty nested array parses as the integer arm regardless
            // of the ring; only shape 0 by 0 can be meant.
            (MatrixDto::Int(data), Ring::Group(g)) if data.is_empty() && rows == 0 => {
                Ok(RingMatrix::Grp(GroupRingMatrix::zeros(g, 0, cols)))
            }
            (MatrixDto::Int(_), Ring::Group(_)) => {
                Err(invalid("matrix of plain integers in a group ring context"))
            }
            (MatrixDto::Grp(_), Ring::Int) => {
                Err(invalid("matrix of group ring terms in an integer context"))
            }
        }
    }

    pub fn from_core(m: &RingMatrix) -> Result<Self> {
        match m {
            RingMatrix::Int(m) => Ok(MatrixDto::Int(int_matrix_dto(m))),
            RingMatrix::Grp(m) => {
                let data = (0..m.rows())
                    .map(|i| {
                        (0..m.cols())
                            .map(|j| {
                                m.get(i, j)
                                    .terms()
                                    .map(|(e, c)| TermDto {
                                        element: ElementDto::from_core(e),
                                        coeff: Big(c.clone()),
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                Ok(MatrixDto::Grp(data))
            }
        }
    }
}

// -------------------------------------------------------------------
// Chain complexes, chain maps, twisted endomorphisms

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RingDto {
    Int,
    Group { group: GroupDto },
}

impl RingDto {
    pub fn to_core(&self) -> Result<Ring> {
        match self {
            RingDto::Int => Ok(Ring::Int),
            RingDto::Group { group } => Ok(Ring::Group(group.to_core()?)),
        }
    }

    pub fn from_core(r: &Ring) -> Result<Self> {
        match r {
            Ring::Int => Ok(RingDto::Int),
            Ring::Group(g) => Ok(RingDto::Group { group: GroupDto::from_core(g)? }),
        }
    }
}

fn parse_degree(key: &str) -> Result<i64> {
    key.parse::<i64>().map_err(|_| invalid(format!("degree key {:?} is not an integer", key)))
}

fn degree_keyed<T>(map: &BTreeMap<String, T>) -> Result<Vec<(i64, &T)>> {
    map.iter().map(|(k, v)| Ok((parse_degree(k)?, v))).collect()
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct ChainComplexDto {
    pub ring: RingDto,
    /// Degree -> rank; omitted degrees are zero.
    pub ranks: BTreeMap<String, usize>,
    /// Degree n -> differential into degree n-1; zero maps may be
    /// omitted.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diffs: BTreeMap<String, MatrixDto>,
}

impl ChainComplexDto {
    pub fn to_core(&self) -> Result<ChainComplex> {
        let ring = self.ring.to_core()?;
        let mut ranks = BTreeMap::new();
        for (k, &r) in &self.ranks {
            ranks.insert(parse_degree(k)?, r);
        }
        let rank_of = |n: i64| ranks.get(&n).copied().unwrap_or(0);
        let mut diffs = BTreeMap::new();
        for (n, dto) in degree_keyed(&self.diffs)? {
            diffs.insert(n, dto.to_core(&ring, rank_of(n - 1), rank_of(n))?);
        }
        ChainComplex::new(ring, ranks, diffs)
    }

    pub fn from_core(c: &ChainComplex) -> Result<Self> {
        let mut ranks = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for n in c.degrees() {
            ranks.insert(n.to_string(), c.rank(n));
            let d = c.diff(n);
            if !d.is_zero() {
                diffs.insert(n.to_string(), MatrixDto::from_core(&d)?);
            }
        }
        Ok(ChainComplexDto { ring: RingDto::from_core(c.ring())?, ranks, diffs })
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct ChainComplexDoc {
    pub version: u32,
    #[serde(flatten)]
    pub complex: ChainComplexDto,
}

/// Components of a chain map; the endpoints come from context.
#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ChainMapDto {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, MatrixDto>,
}

impl ChainMapDto {
    pub fn to_core(&self, source: &ChainComplex, target: &ChainComplex) -> Result<ChainMap> {
        let ring = source.ring();
        let mut components = BTreeMap::new();
        for (n, dto) in degree_keyed(&self.components)? {
            components.insert(n, dto.to_core(ring, target.rank(n), source.rank(n))?);
        }
        ChainMap::new(source.clone(), target.clone(), components)
    }

    pub fn from_core(map: &ChainMap) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (n, m) in map.components() {
            components.insert(n.to_string(), MatrixDto::from_core(m)?);
        }
        Ok(ChainMapDto { components })
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct TwistedEndoDto {
    pub complex: ChainComplexDto,
    /// Group ring complexes carry the twisting endomorphism of the
    /// group; integer complexes leave it null.
    pub twist: Option<HomDto>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub components: BTreeMap<String, MatrixDto>,
}

impl TwistedEndoDto {
    pub fn to_core(&self) -> Result<TwistedEndo> {
        let complex = self.complex.to_core()?;
        let twist = match (&self.twist, complex.ring()) {
            (None, _) => None,
            (Some(dto), Ring::Group(g)) => Some(GroupEndo::new(dto.to_hom(g, g)?)?),
            (Some(_), Ring::Int) => {
                return Err(invalid("twist given for a complex over the integers"))
            }
        };
        let mut components = BTreeMap::new();
        for (n, dto) in degree_keyed(&self.components)? {
            components.insert(n, dto.to_core(complex.ring(), complex.rank(n), complex.rank(n))?);
        }
        TwistedEndo::new(complex, twist, components)
    }

    pub fn from_core(f: &TwistedEndo) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (n, m) in f.components() {
            components.insert(n.to_string(), MatrixDto::from_core(m)?);
        }
        Ok(TwistedEndoDto {
            complex: ChainComplexDto::from_core(f.complex())?,
            twist: f.twist().as_ref().map(|e| HomDto::from_hom(e.hom())).transpose()?,
            components,
        })
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct TwistedEndoDoc {
    pub version: u32,
    #[serde(flatten)]
    pub endo: TwistedEndoDto,
}

// -------------------------------------------------------------------
// Categories, profunctors, weight certificates

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CategoryDto {
    Empty,
    Terminal,
    Arrow,
    Discrete { n: usize },
}

impl CategoryDto {
    pub fn to_core(&self) -> Result<FinCategory> {
        match self {
            CategoryDto::Empty => Ok(FinCategory::empty()),
            CategoryDto::Terminal => Ok(FinCategory::terminal()),
            CategoryDto::Arrow => Ok(FinCategory::arrow()),
            CategoryDto::Discrete { n } => FinCategory::discrete(*n),
        }
    }

    pub fn from_core(cat: &FinCategory) -> Result<Self> {
        if *cat == FinCategory::empty() {
            return Ok(CategoryDto::Empty);
        }
        if *cat == FinCategory::terminal() {
            return Ok(CategoryDto::Terminal);
        }
        if *cat == FinCategory::arrow() {
            return Ok(CategoryDto::Arrow);
        }
        if let Ok(d) = FinCategory::discrete(cat.n_objects()) {
            if *cat == d {
                return Ok(CategoryDto::Discrete { n: cat.n_objects() });
            }
        }
        Err(invalid("only the named category shapes serialize"))
    }
}

/// Action of one nonidentity morphism at one object. For the covariant
/// slot, `mor` runs in the source category and `obj` is a target object;
/// for the contravariant slot, the roles swap.
#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ActionDto {
    pub mor: usize,
    pub obj: usize,
    pub map: ChainMapDto,
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct ProfunctorDto {
    pub source: CategoryDto,
    pub target: CategoryDto,
    /// Entry at (a, b) sits at index a * n_target_objects + b.
    pub entries: Vec<ChainComplexDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub left: Vec<ActionDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub right: Vec<ActionDto>,
}

impl ProfunctorDto {
    pub fn to_core(&self) -> Result<Profunctor> {
        let source = self.source.to_core()?;
        let target = self.target.to_core()?;
        let entries: Vec<ChainComplex> =
            self.entries.iter().map(|e| e.to_core()).collect::<Result<Vec<_>>>()?;
        let nb = target.n_objects();
        let entry = |a: usize, b: usize| -> Result<&ChainComplex> {
            entries
                .get(a * nb + b)
                .ok_or_else(|| invalid(format!("profunctor has no entry at ({}, {})", a, b)))
        };
        let mut left = BTreeMap::new();
        for act in &self.left {
            if act.mor >= source.n_morphisms() {
                return Err(invalid(format!("left action morphism {} out of range", act.mor)));
            }
            let m = source.morphism(act.mor);
            let map = act.map.to_core(entry(m.source, act.obj)?, entry(m.target, act.obj)?)?;
            left.insert((act.mor, act.obj), map);
        }
        let mut right = BTreeMap::new();
        for act in &self.right {
            if act.mor >= target.n_morphisms() {
                return Err(invalid(format!("right action morphism {} out of range", act.mor)));
            }
            let m = target.morphism(act.mor);
            let map = act.map.to_core(entry(act.obj, m.target)?, entry(act.obj, m.source)?)?;
            right.insert((act.obj, act.mor), map);
        }
        Profunctor::new(source, target, entries, left, right)
    }

    pub fn from_core(p: &Profunctor) -> Result<Self> {
        let entries =
            p.entries().iter().map(ChainComplexDto::from_core).collect::<Result<Vec<_>>>()?;
        let left = p
            .left_actions()
            .iter()
            .map(|(&(mor, obj), map)| {
                Ok(ActionDto { mor, obj, map: ChainMapDto::from_core(map)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let right = p
            .right_actions()
            .iter()
            .map(|(&(obj, mor), map)| {
                Ok(ActionDto { mor, obj, map: ChainMapDto::from_core(map)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProfunctorDto {
            source: CategoryDto::from_core(p.source())?,
            target: CategoryDto::from_core(p.target())?,
            entries,
            left,
            right,
        })
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct ProfunctorDoc {
    pub version: u32,
    #[serde(flatten)]
    pub profunctor: ProfunctorDto,
    /// Optional natural endomorphism, one component per entry, used by
    /// the linearity verifier; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endo: Option<Vec<ChainMapDto>>,
}

impl ProfunctorDoc {
    pub fn to_core(&self) -> Result<(Profunctor, ProfunctorMap)> {
        let p = self.profunctor.to_core()?;
        let f = match &self.endo {
            None => ProfunctorMap::identity(&p),
            Some(comps) => {
                if comps.len() != p.entries().len() {
                    return Err(invalid(format!(
                        "endomorphism has {} components, profunctor has {} entries",
                        comps.len(),
                        p.entries().len()
                    )));
                }
                let components = comps
                    .iter()
                    .zip(p.entries())
                    .map(|(dto, e)| dto.to_core(e, e))
                    .collect::<Result<Vec<_>>>()?;
                ProfunctorMap::new(p.clone(), p.clone(), components)?
            }
        };
        Ok((p, f))
    }
}

/// Duality data for a weight. The endpoints of the four structure maps
/// are forced (replacement to shifted unit, replacement to the coend
/// with the dual), so only their components are stored. Triangle
/// witnesses are never stored; the verifier solves for them.
#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct WeightCertificateDoc {
    pub version: u32,
    pub m: ProfunctorDto,
    pub dual: ProfunctorDto,
    pub shift: i64,
    pub r_eta: ProfunctorDto,
    pub rho_eta: Vec<ChainMapDto>,
    pub eta: Vec<ChainMapDto>,
    pub r_eps: ProfunctorDto,
    pub rho_eps: Vec<ChainMapDto>,
    pub eps: Vec<ChainMapDto>,
}

fn profunctor_map(
    source: &Profunctor,
    target: &Profunctor,
    comps: &[ChainMapDto],
) -> Result<ProfunctorMap> {
    if comps.len() != source.entries().len() {
        return Err(invalid(format!(
            "map has {} components, source has {} entries",
            comps.len(),
            source.entries().len()
        )));
    }
    let components = comps
        .iter()
        .zip(source.entries().iter().zip(target.entries()))
        .map(|(dto, (s, t))| dto.to_core(s, t))
        .collect::<Result<Vec<_>>>()?;
    ProfunctorMap::new(source.clone(), target.clone(), components)
}

fn map_components(map: &ProfunctorMap) -> Result<Vec<ChainMapDto>> {
    map.components().iter().map(ChainMapDto::from_core).collect()
}

impl WeightCertificateDoc {
    pub fn to_core(&self) -> Result<DualPairCertificate> {
        let m = self.m.to_core()?;
        let dual = self.dual.to_core()?;
        let r_eta = self.r_eta.to_core()?;
        let r_eps = self.r_eps.to_core()?;
        let unit_a = unit_profunctor(m.source())?.shift(self.shift)?;
        let unit_b = unit_profunctor(m.target())?.shift(self.shift)?;
        let m_dual = coend(&m, &dual)?.into_profunctor();
        let dual_m = coend(&dual, &m)?.into_profunctor();
        let rho_eta = profunctor_map(&r_eta, &unit_a, &self.rho_eta)?;
        let eta = profunctor_map(&r_eta, &m_dual, &self.eta)?;
        let rho_eps = profunctor_map(&r_eps, &dual_m, &self.rho_eps)?;
        let eps = profunctor_map(&r_eps, &unit_b, &self.eps)?;
        DualPairCertificate::new(m, dual, self.shift, r_eta, rho_eta, eta, r_eps, rho_eps, eps)
    }

    pub fn from_core(cert: &DualPairCertificate) -> Result<Self> {
        Ok(WeightCertificateDoc {
            version: FORMAT_VERSION,
            m: ProfunctorDto::from_core(cert.m())?,
            dual: ProfunctorDto::from_core(cert.dual())?,
            shift: cert.shift(),
            r_eta: ProfunctorDto::from_core(cert.r_eta())?,
            rho_eta: map_components(cert.rho_eta())?,
            eta: map_components(cert.eta())?,
            r_eps: ProfunctorDto::from_core(cert.r_eps())?,
            rho_eps: map_components(cert.rho_eps())?,
            eps: map_components(cert.eps())?,
        })
    }
}

// -------------------------------------------------------------------
// Relative trace inputs

/// Homomorphism between two named groups.
#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
pub struct HomDoc {
    pub source: GroupDto,
    pub target: GroupDto,
    #[serde(flatten)]
    pub map: HomDto,
}

impl HomDoc {
    pub fn to_core(&self) -> Result<GroupHom> {
        self.map.to_hom(&self.source.to_core()?, &self.target.to_core()?)
    }

    pub fn from_core(h: &GroupHom) -> Result<Self> {
        Ok(HomDoc {
            source: GroupDto::from_core(h.source())?,
            target: GroupDto::from_core(h.target())?,
            map: HomDto::from_hom(h)?,
        })
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct RelativeInputDoc {
    pub version: u32,
    /// Ambient twisted endomorphism over the target group ring.
    pub f_x: TwistedEndoDto,
    /// Subspace endomorphism over the source group ring.
    pub g_a: TwistedEndoDto,
    /// Group homomorphism along which the subspace is induced up.
    pub i: HomDoc,
    /// Inclusion of the induced subspace complex into the ambient one.
    pub j: ChainMapDto,
}

impl RelativeInputDoc {
    pub fn to_core(&self) -> Result<RelativeTraceInput> {
        let f_x = self.f_x.to_core()?;
        let g_a = self.g_a.to_core()?;
        let i = self.i.to_core()?;
        let phi_h = f_x
            .twist()
            .clone()
            .ok_or_else(|| invalid("ambient endomorphism must carry a twist"))?;
        let induced = fptrace_core::reidemeister::induce_up(&g_a, &i, &phi_h)?;
        let j = self.j.to_core(induced.complex(), f_x.complex())?;
        RelativeTraceInput::new(f_x, g_a, i, j)
    }

    pub fn from_core(input: &RelativeTraceInput) -> Result<Self> {
        Ok(RelativeInputDoc {
            version: FORMAT_VERSION,
            f_x: TwistedEndoDto::from_core(input.ambient())?,
            g_a: TwistedEndoDto::from_core(input.sub())?,
            i: HomDoc::from_core(input.inclusion_hom())?,
            j: ChainMapDto::from_core(input.inclusion_map())?,
        })
    }
}
