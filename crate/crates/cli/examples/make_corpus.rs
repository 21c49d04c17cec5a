//! Regenerates the corpus directory from the canned library values.
//! Every document is validated before it is written: certificates must
//! verify, relative inputs must satisfy additivity, and the headline
//! numbers are asserted against their expected values.
//!
//! Usage: cargo run -p fptrace-cli --example make_corpus -- [dir]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::One;

use fptrace_cli::doc::{
    ChainComplexDoc, ChainComplexDto, Document, GroupDoc, GroupDto, GroupEndoDoc,
    ProfunctorDoc, ProfunctorDto, RelativeInputDoc, SimplicialComplexDoc, SimplicialMapDoc,
    TwistedEndoDoc, TwistedEndoDto, WeightCertificateDoc, FORMAT_VERSION,
};
use fptrace_core::chain::{ChainMap, Ring, RingMatrix};
use fptrace_core::groupring::{Group, GroupEndo, GroupHom, GroupRingMatrix};
use fptrace_core::linalg::IntMatrix;
use fptrace_core::models::{
    arc, circle, circle_endo, integers_mod, tetra_boundary, torus_endo,
};
use fptrace_core::profunctor::{
    cofiber_weight_certificate, coproduct_weight_certificate, empty_weight_certificate,
    verify_dual_pair, verify_linearity, Profunctor, ProfunctorMap,
};
use fptrace_core::reidemeister::{
    circle_with_basepoint, torus_with_basepoint, verify_reidemeister_additivity,
    RelativeTraceInput,
};
use fptrace_core::simplicial::{SimplicialComplex, SimplicialMap};
use fptrace_core::Result;

fn write(dir: &Path, name: &str, doc: &Document) {
    let path = dir.join(name);
    let body = serde_json::to_string_pretty(doc).expect("document serializes");
    fs::write(&path, body + "\n").unwrap_or_else(|e| panic!("write {}: {}", path.display(), e));
    println!("wrote {}", path.display());
}

fn simplicial(dir: &Path, name: &str, c: &SimplicialComplex) {
    write(dir, name, &Document::SimplicialComplex(SimplicialComplexDoc::from_core(c)));
}

fn vertex_map(dir: &Path, name: &str, map: Vec<usize>) {
    write(
        dir,
        name,
        &Document::SimplicialMap(SimplicialMapDoc { version: FORMAT_VERSION, vertex_map: map }),
    );
}

fn group(dir: &Path, name: &str, g: &Group) -> Result<()> {
    write(
        dir,
        name,
        &Document::Group(GroupDoc { version: FORMAT_VERSION, group: GroupDto::from_core(g)? }),
    );
    Ok(())
}

fn twisted_endo(dir: &Path, name: &str, f: &fptrace_core::chain::TwistedEndo) -> Result<()> {
    write(
        dir,
        name,
        &Document::TwistedEndo(TwistedEndoDoc {
            version: FORMAT_VERSION,
            endo: TwistedEndoDto::from_core(f)?,
        }),
    );
    Ok(())
}

fn relative(dir: &Path, name: &str, input: &RelativeTraceInput) -> Result<()> {
    let report = verify_reidemeister_additivity(input)?;
    assert!(report.ok, "{}: relative instance does not verify", name);
    write(
        dir,
        name,
        &Document::RelativeInput(RelativeInputDoc::from_core(input)?),
    );
    Ok(())
}

/// The torus self-map with winding matrix [[2,1],[0,3]] restricted to
/// the first-coordinate circle: the twist fixes the subgroup Z x 0, so
/// the 1-skeleton circle is preserved and carries the degree-2 map.
fn torus_circle_pair() -> Result<RelativeTraceInput> {
    let m = IntMatrix::from_i64(2, 2, &[2, 1, 0, 3]);
    let f_x = torus_endo(&m)?;
    let g_a = circle_endo(2)?;
    let z = Group::integers();
    let z2 = Group::integers_squared();
    let i = GroupHom::abelian(z, z2.clone(), IntMatrix::from_i64(2, 1, &[1, 0]))?;
    let ring = Ring::Group(z2.clone());
    let one = |r: usize, c: usize, entries: &[(usize, usize)]| -> Result<RingMatrix> {
        let mut g = GroupRingMatrix::zeros(&z2, r, c);
        for &(i0, j0) in entries {
            g.set(i0, j0, fptrace_core::groupring::GroupRingElement::one(&z2));
        }
        Ok(RingMatrix::Grp(g))
    };
    let induced = fptrace_core::reidemeister::induce_up(
        &g_a,
        &i,
        f_x.twist().as_ref().expect("torus endo is twisted"),
    )?;
    let j = ChainMap::new(
        induced.complex().clone(),
        f_x.complex().clone(),
        BTreeMap::from([(0, one(1, 1, &[(0, 0)])?), (1, one(2, 1, &[(0, 0)])?)]),
    )?;
    assert_eq!(*f_x.complex().ring(), ring);
    RelativeTraceInput::new(f_x, g_a, i, j)
}

/// Arrow-shaped diagram collapsing nothing: the boundary circle of a
/// triangle included in the full triangle, identity endomorphism.
fn circle_into_disk() -> Result<(Profunctor, ChainMap)> {
    let boundary = circle(3)?;
    let disk = SimplicialComplex::new(3, vec![vec![0, 1, 2]])?;
    let incl = SimplicialMap::new(boundary.clone(), disk.clone(), vec![0, 1, 2])?.chain_map()?;
    let cat = fptrace_core::fincat::FinCategory::arrow();
    let alpha = cat.hom(0, 1)[0];
    let p = Profunctor::new(
        cat,
        fptrace_core::fincat::FinCategory::terminal(),
        vec![boundary.chain_complex(), disk.chain_complex()],
        BTreeMap::from([((alpha, 0), incl.clone())]),
        BTreeMap::new(),
    )?;
    Ok((p, incl))
}

fn main() -> Result<()> {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "corpus".into());
    let dir = Path::new(&arg);
    fs::create_dir_all(dir).expect("corpus directory");

    // Simplicial complexes and maps.
    let tetra = tetra_boundary();
    assert_eq!(SimplicialMap::identity(&tetra).lefschetz_number()?, BigInt::from(2));
    simplicial(dir, "tetra_boundary.json", &tetra);
    vertex_map(dir, "id_map.json", (0..4).collect());

    let c6 = circle(6)?;
    let a3 = arc(3)?;
    simplicial(dir, "circle6.json", &c6);
    simplicial(dir, "arc3.json", &a3);
    vertex_map(dir, "id.json", (0..6).collect());
    let reflection: Vec<usize> = (0..6).map(|k| (6 - k) % 6).collect();
    let refl = SimplicialMap::new(c6.clone(), c6.clone(), reflection.clone())?;
    assert_eq!(refl.lefschetz_number()?, BigInt::from(2));
    vertex_map(dir, "reflection6.json", reflection);

    let c3 = circle(3)?;
    simplicial(dir, "circle3.json", &c3);
    write(
        dir,
        "chain_circle.json",
        &Document::ChainComplex(ChainComplexDoc {
            version: FORMAT_VERSION,
            complex: ChainComplexDto::from_core(&c3.chain_complex())?,
        }),
    );

    // Groups and group endomorphisms.
    group(dir, "c3.json", &Group::cyclic(3)?)?;
    group(dir, "s3.json", &Group::symmetric(3)?)?;
    group(dir, "z_mod4.json", &integers_mod(4)?)?;
    write(
        dir,
        "z_times3.json",
        &Document::GroupEndo(GroupEndoDoc::from_core(&GroupEndo::abelian(
            Group::integers(),
            IntMatrix::from_i64(1, 1, &[3]),
        )?)?),
    );

    // Twisted chain endomorphisms.
    for d in [2i64, 3, 5] {
        let f = circle_endo(d)?;
        let r = f.reidemeister_trace()?;
        assert_eq!(r.set().labels()?.len() as i64, d - 1);
        assert_eq!(r.augment(), BigInt::from(1 - d));
        twisted_endo(dir, &format!("circle_deg{}.json", d), &f)?;
    }
    let m = IntMatrix::from_i64(2, 2, &[2, 1, 0, 3]);
    let torus = torus_endo(&m)?;
    let r = torus.reidemeister_trace()?;
    assert_eq!(r.set().labels()?.len(), 2);
    assert_eq!(r.augment(), BigInt::from(2));
    for label in r.set().labels()? {
        assert!(r.coeff(&label).is_one(), "torus class indices are +1");
    }
    twisted_endo(dir, "torus_endo.json", &torus)?;

    // Weight certificates. Witnesses are never serialized; reparse and
    // verify each one through the solver before shipping.
    for (name, cert) in [
        ("cofiber_weight.json", cofiber_weight_certificate()?),
        ("coproduct_weight.json", coproduct_weight_certificate()?),
        ("empty_weight.json", empty_weight_certificate()?),
    ] {
        let doc = WeightCertificateDoc::from_core(&cert)?;
        let reparsed = doc.to_core()?;
        assert!(verify_dual_pair(&reparsed)?.ok, "{}: certificate fails", name);
        write(dir, name, &Document::WeightCertificate(doc));
    }

    // Linearity diagram: circle into disk over the arrow category.
    let (diagram, _) = circle_into_disk()?;
    let cert = cofiber_weight_certificate()?;
    let report = verify_linearity(&cert, &diagram, &ProfunctorMap::identity(&diagram))?;
    assert!(report.ok && report.colimit_trace == BigInt::one());
    write(
        dir,
        "circle_into_disk.json",
        &Document::Profunctor(ProfunctorDoc {
            version: FORMAT_VERSION,
            profunctor: ProfunctorDto::from_core(&diagram)?,
            endo: None,
        }),
    );

    // Relative inputs.
    for d in [2i64, 3, 5] {
        relative(dir, &format!("circle_basepoint_deg{}.json", d), &circle_with_basepoint(d)?)?;
    }
    relative(dir, "torus_basepoint.json", &torus_with_basepoint(&m)?)?;
    relative(dir, "torus_circle.json", &torus_circle_pair()?)?;

    println!("corpus regenerated in {}", dir.display());
    Ok(())
}
