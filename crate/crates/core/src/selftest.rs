//! The consolidated verification suite: nine independent checks covering
//! weight coefficient vectors, additivity, linearity, certificate
//! verification, Reidemeister traces, base change, and trace identities.
//! The acceptance test target and the command line `selftest` both run
//! these, so the shipped binary re-proves the library's claims on demand.
//!
//! Every check is exact: integer equalities with no tolerance. Random
//! instances are drawn from seeded generators so failures reproduce.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{trace_via_dual, ChainComplex, ChainMap, Ring, RingMatrix};
use crate::error::Result;
use crate::fincat::FinCategory;
use crate::groupring::{hs_trace, push_classes};
use crate::linalg::IntMatrix;
use crate::models::{
    all_homs, arc, circle, circle_endo, random_chain_endo, random_diagram_on_arrow,
    random_diagram_on_discrete, random_group_ring_matrix, random_invariant_triple,
    reduction_mod, simplicial_catalog, small_groups,
};
use crate::profunctor::{
    chain_endo_lefschetz, coefficient_vector, coend_map, cofiber_weight_certificate,
    coproduct_weight_certificate, cyclic_symmetry, empty_weight_certificate, shadow_map,
    verify_dual_pair, verify_linearity, Profunctor, ProfunctorMap,
};
use crate::reidemeister::{
    circle_with_basepoint, random_compatible_base, random_relative_instance,
    torus_with_basepoint, verify_base_change, verify_reidemeister_additivity,
};
use crate::simplicial::{verify_additivity, SimplicialMap};

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

fn outcome(name: &'static str, failures: Vec<String>, detail_ok: String) -> CheckOutcome {
    if failures.is_empty() {
        CheckOutcome { name, passed: true, details: detail_ok }
    } else {
        let shown = failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ");
        CheckOutcome {
            name,
            passed: false,
            details: format!("{} failure(s): {}", failures.len(), shown),
        }
    }
}

/// Coefficient vectors of the shipped weights, compared entry by entry.
pub fn check_weight_vectors() -> Result<CheckOutcome> {
    let mut failures = Vec::new();

    let got = coefficient_vector(&cofiber_weight_certificate()?)?;
    let want = vec![
        ("[id_a]".to_string(), BigInt::from(-1)),
        ("[id_b]".to_string(), BigInt::one()),
    ];
    if got != want {
        failures.push(format!("cofiber weight vector {:?}", got));
    }

    let got = coefficient_vector(&coproduct_weight_certificate()?)?;
    let want = vec![
        ("[id_b0]".to_string(), BigInt::one()),
        ("[id_b1]".to_string(), BigInt::one()),
    ];
    if got != want {
        failures.push(format!("coproduct weight vector {:?}", got));
    }

    let got = coefficient_vector(&empty_weight_certificate()?)?;
    if !got.is_empty() {
        failures.push(format!("empty weight vector {:?}", got));
    }

    Ok(outcome(
        "weight coefficient vectors",
        failures,
        "cofiber (-1, 1), coproduct (1, 1), empty ()".into(),
    ))
}

/// Lefschetz additivity `L(f) - L(f|A) == L(cone)` on the named
/// circle-and-arc pair and on random invariant subcomplex instances.
pub fn check_simplicial_additivity(seed: u64, random_instances: usize) -> Result<CheckOutcome> {
    let mut failures = Vec::new();

    let x = circle(6)?;
    let a = arc(3)?;
    let i = SimplicialMap::new(a.clone(), x.clone(), vec![0, 1, 2, 3])?;
    let f = SimplicialMap::identity(&x);
    let g = SimplicialMap::identity(&a);
    let report = verify_additivity(&i, &f, &g)?;
    if !(report.holds
        && report.ambient == BigInt::from(0)
        && report.sub == BigInt::one()
        && report.relative == BigInt::from(-1))
    {
        failures.push(format!("arc in circle: {:?}", report));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random_instances {
        let (i, f, g) = random_invariant_triple(&mut rng, 8)?;
        let report = verify_additivity(&i, &f, &g)?;
        if !report.holds {
            failures.push(format!("random instance {}: {:?}", k, report));
        }
    }

    Ok(outcome(
        "lefschetz additivity on subcomplex pairs",
        failures,
        format!("named pair and {} random instances", random_instances),
    ))
}

fn graded(ranks: &[(i64, usize)]) -> Result<ChainComplex> {
    ChainComplex::new(
        Ring::Int,
        ranks.iter().copied().collect(),
        BTreeMap::new(),
    )
}

/// The fixed diagram used with the cofiber weight: a circle-shaped entry
/// collapsing onto a point, with the identity endomorphism.
fn collapse_diagram() -> Result<(Profunctor, ProfunctorMap)> {
    let cat = FinCategory::arrow();
    let alpha = cat.hom(0, 1)[0];
    let circle_like = graded(&[(0, 1), (1, 1)])?;
    let point = ChainComplex::concentrated(Ring::Int, 0, 1);
    let act = ChainMap::new(
        circle_like.clone(),
        point.clone(),
        BTreeMap::from([(0, RingMatrix::Int(IntMatrix::identity(1)))]),
    )?;
    let prof = Profunctor::new(
        cat,
        FinCategory::terminal(),
        vec![circle_like, point],
        BTreeMap::from([((alpha, 0), act)]),
        BTreeMap::new(),
    )?;
    let f = ProfunctorMap::identity(&prof);
    Ok((prof, f))
}

/// Fixed diagram for the coproduct weight: two concentrated summands
/// scaled by 2 and 3.
fn two_scalars_diagram() -> Result<(Profunctor, ProfunctorMap)> {
    let c0 = ChainComplex::concentrated(Ring::Int, 0, 1);
    let c1 = ChainComplex::concentrated(Ring::Int, 0, 1);
    let prof = Profunctor::new(
        FinCategory::discrete(2)?,
        FinCategory::terminal(),
        vec![c0.clone(), c1.clone()],
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let scale = |c: &ChainComplex, s: i64| -> Result<ChainMap> {
        ChainMap::new(
            c.clone(),
            c.clone(),
            BTreeMap::from([(0, RingMatrix::Int(IntMatrix::identity(1).scale(&BigInt::from(s))))]),
        )
    };
    let f = ProfunctorMap::new(prof.clone(), prof.clone(), vec![scale(&c0, 2)?, scale(&c1, 3)?])?;
    Ok((prof, f))
}

/// Linearity of the colimit trace in the weight: fixed diagrams for each
/// shipped weight, then random diagrams. The two sides of the law run
/// through independent code paths: bar-complex homology on the left,
/// coefficient vectors dotted with objectwise traces on the right.
pub fn check_linearity(seed: u64, random_instances: usize) -> Result<CheckOutcome> {
    let mut failures = Vec::new();

    let cofiber = cofiber_weight_certificate()?;
    let (diagram, f) = collapse_diagram()?;
    let report = verify_linearity(&cofiber, &diagram, &f)?;
    if !(report.ok && report.colimit_trace == BigInt::one()) {
        failures.push(format!("cofiber weight on the collapse diagram: {:?}", report));
    }

    let coproduct = coproduct_weight_certificate()?;
    let (diagram, f) = two_scalars_diagram()?;
    let report = verify_linearity(&coproduct, &diagram, &f)?;
    if !(report.ok && report.colimit_trace == BigInt::from(5)) {
        failures.push(format!("coproduct weight on two scalars: {:?}", report));
    }

    let empty = empty_weight_certificate()?;
    let none = Profunctor::new(
        FinCategory::empty(),
        FinCategory::terminal(),
        Vec::new(),
        BTreeMap::new(),
        BTreeMap::new(),
    )?;
    let idle = ProfunctorMap::identity(&none);
    let report = verify_linearity(&empty, &none, &idle)?;
    if !(report.ok && report.colimit_trace == BigInt::from(0)) {
        failures.push(format!("empty weight: {:?}", report));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random_instances {
        let (cert, diagram, f) = if k % 2 == 0 {
            let (d, f) = random_diagram_on_arrow(&mut rng)?;
            (&cofiber, d, f)
        } else {
            let (d, f) = random_diagram_on_discrete(&mut rng)?;
            (&coproduct, d, f)
        };
        let report = verify_linearity(cert, &diagram, &f)?;
        if !report.ok {
            failures.push(format!("random diagram {}: {:?}", k, report));
        }
    }

    Ok(outcome(
        "weighted colimit trace linearity",
        failures,
        format!("three shipped weights and {} random diagrams", random_instances),
    ))
}

/// The shipped duality certificates verify with solver-found triangle
/// witnesses: the canned data carries no witnesses of its own.
pub fn check_certificates() -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let certs = [
        ("empty", empty_weight_certificate()?),
        ("coproduct", coproduct_weight_certificate()?),
        ("cofiber", cofiber_weight_certificate()?),
    ];
    for (name, cert) in &certs {
        let (t1, t2) = cert.witnesses();
        if t1.is_some() || t2.is_some() {
            failures.push(format!("{} certificate ships pre-baked witnesses", name));
            continue;
        }
        match verify_dual_pair(cert) {
            Ok(report) if report.ok => {}
            Ok(report) => failures.push(format!("{} certificate: {:?}", name, report)),
            Err(e) => failures.push(format!("{} certificate: {}", name, e)),
        }
    }
    Ok(outcome(
        "duality certificate verification",
        failures,
        "empty, coproduct, and cofiber certificates with solver-found witnesses".into(),
    ))
}

/// Reidemeister traces of degree-`d` circle maps: `|1 - d|` twisted
/// classes, every coefficient `-1`, augmentation `1 - d`.
pub fn check_circle_reidemeister() -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    for d in [2i64, 3, 5] {
        let r = circle_endo(d)?.reidemeister_trace()?;
        let labels = r.set().labels()?;
        if labels.len() != (d - 1) as usize {
            failures.push(format!("degree {}: {} classes", d, labels.len()));
        }
        for l in &labels {
            if r.coeff(l) != BigInt::from(-1) {
                failures.push(format!("degree {}: coefficient {} at {}", d, r.coeff(l), r.set().label_name(l)));
            }
        }
        if r.augment() != BigInt::from(1 - d) {
            failures.push(format!("degree {}: augmentation {}", d, r.augment()));
        }
    }
    Ok(outcome(
        "circle reidemeister traces",
        failures,
        "degrees 2, 3, 5 with all classes at coefficient -1".into(),
    ))
}

/// Reidemeister additivity on the named circle and torus instances and
/// on random relative instances over small groups.
pub fn check_reidemeister_additivity(seed: u64, random_instances: usize) -> Result<CheckOutcome> {
    let mut failures = Vec::new();

    for d in [2i64, 3, 5] {
        let report = verify_reidemeister_additivity(&circle_with_basepoint(d)?)?;
        if !report.ok {
            failures.push(format!("circle degree {}: {:?}", d, report));
        }
    }

    let m = IntMatrix::from_i64(2, 2, &[2, 1, 0, 3]);
    let report = verify_reidemeister_additivity(&torus_with_basepoint(&m)?)?;
    if !report.ok {
        failures.push(format!("torus: {:?}", report));
    }
    if report.ambient.set().labels()?.len() != 2 {
        failures.push(format!(
            "torus class count {}",
            report.ambient.set().labels()?.len()
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random_instances {
        let (i, phi_g, phi_h) = random_compatible_base(&mut rng)?;
        let input = random_relative_instance(&mut rng, &i, &phi_g, &phi_h)?;
        let report = verify_reidemeister_additivity(&input)?;
        if !report.ok {
            failures.push(format!("random instance {}: {:?}", k, report));
        }
    }

    Ok(outcome(
        "reidemeister additivity",
        failures,
        format!(
            "circle degrees 2, 3, 5, the torus winding [[2,1],[0,3]], and {} random instances",
            random_instances
        ),
    ))
}

/// Random profunctors out of and into the arrow category with natural
/// endomorphisms, for the shadow cyclicity check.
fn random_shadow_pair(
    rng: &mut impl Rng,
) -> Result<(Profunctor, ProfunctorMap, Profunctor, ProfunctorMap)> {
    let pt = FinCategory::terminal();
    let ar = FinCategory::arrow();
    let alpha = ar.hom(0, 1)[0];
    let degs: Vec<i64> = vec![0, 1];

    let rand_graded = |rng: &mut dyn rand::RngCore| -> Result<ChainComplex> {
        let ranks: Vec<(i64, usize)> =
            degs.iter().map(|&n| (n, rng.gen_range(0..=2usize))).collect();
        graded(&ranks)
    };
    let m_a = rand_graded(rng)?;
    let m_b = rand_graded(rng)?;
    let n_a = rand_graded(rng)?;
    let n_b = rand_graded(rng)?;

    let rand_map = |rng: &mut dyn rand::RngCore, src: &ChainComplex, tgt: &ChainComplex| -> Result<ChainMap> {
        let mut comps = BTreeMap::new();
        for &n in &degs {
            if src.rank(n) > 0 && tgt.rank(n) > 0 {
                let mut m = IntMatrix::zeros(tgt.rank(n), src.rank(n));
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        m.set(i, j, BigInt::from(rng.gen_range(-2..=2i64)));
                    }
                }
                comps.insert(n, RingMatrix::Int(m));
            }
        }
        ChainMap::new(src.clone(), tgt.clone(), comps)
    };

    // m: point -> arrow is contravariant in the arrow, so the action runs
    // m(0, b) -> m(0, a); n: arrow -> point is covariant.
    let m_act = rand_map(rng, &m_b, &m_a)?;
    let n_act = rand_map(rng, &n_a, &n_b)?;
    let m = Profunctor::new(
        pt.clone(),
        ar.clone(),
        vec![m_a.clone(), m_b.clone()],
        BTreeMap::new(),
        BTreeMap::from([((0, alpha), m_act)]),
    )?;
    let n = Profunctor::new(
        ar,
        pt,
        vec![n_a.clone(), n_b.clone()],
        BTreeMap::from([((alpha, 0), n_act)]),
        BTreeMap::new(),
    )?;

    // One scalar per degree, shared across the entries of each
    // profunctor, commutes with every action.
    let scalar_endo = |rng: &mut dyn rand::RngCore, p: &Profunctor| -> Result<ProfunctorMap> {
        let scalars: BTreeMap<i64, BigInt> =
            degs.iter().map(|&n| (n, BigInt::from(rng.gen_range(-2..=2i64)))).collect();
        let comps = p
            .entries()
            .iter()
            .map(|c| {
                let mut parts = BTreeMap::new();
                for &n in &degs {
                    if c.rank(n) > 0 {
                        parts.insert(
                            n,
                            RingMatrix::Int(IntMatrix::identity(c.rank(n)).scale(&scalars[&n])),
                        );
                    }
                }
                ChainMap::new(c.clone(), c.clone(), parts)
            })
            .collect::<Result<Vec<_>>>()?;
        ProfunctorMap::new(p.clone(), p.clone(), comps)
    };
    let f = scalar_endo(rng, &m)?;
    let g = scalar_endo(rng, &n)?;
    Ok((m, f, n, g))
}

/// Trace identities: the duality composite over Z agrees with the
/// alternating trace, the twisted Hattori-Stallings trace satisfies its
/// transported cyclicity laws, and the shadow rotation intertwines
/// composite endomorphisms exactly.
pub fn check_trace_identities(
    seed: u64,
    dual_instances: usize,
    cyclicity_instances: usize,
    shadow_instances: usize,
) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for k in 0..dual_instances {
        let f = random_chain_endo(&mut rng)?;
        let via_dual = trace_via_dual(&f)?;
        let alternating = f.lefschetz_trace()?;
        if via_dual != alternating {
            failures.push(format!("duality trace {}: {} vs {}", k, via_dual, alternating));
        }
    }

    let groups = small_groups()?;
    for k in 0..cyclicity_instances {
        let (_, g) = &groups[rng.gen_range(0..groups.len())];
        let endos = crate::models::all_endos(g)?;
        let phi = endos[rng.gen_range(0..endos.len())].clone();
        let n = rng.gen_range(1..=2usize);
        let m = rng.gen_range(1..=2usize);
        let a = random_group_ring_matrix(&mut rng, g, n, m)?;
        let b = random_group_ring_matrix(&mut rng, g, m, n)?;

        // tr(A phi(B)) == tr(B A) and tr(A B) == tr(B phi(A)), both over
        // the phi-twisted classes.
        let lhs1 = hs_trace(&a.mul(&b.twist(&phi)?)?, &phi)?;
        let rhs1 = hs_trace(&b.mul(&a)?, &phi)?;
        if lhs1 != rhs1 {
            failures.push(format!("cyclicity {}: tr(A phi(B)) != tr(B A)", k));
        }
        let lhs2 = hs_trace(&a.mul(&b)?, &phi)?;
        let rhs2 = hs_trace(&b.mul(&a.twist(&phi)?)?, &phi)?;
        if lhs2 != rhs2 {
            failures.push(format!("cyclicity {}: tr(A B) != tr(B phi(A))", k));
        }

        // Transported form over the square twist: pushing the classes of
        // tr(A phi(B)) along phi lands on tr(B phi(A)).
        let phi2 = phi.compose(&phi)?;
        let lhs3 = hs_trace(&b.mul(&a.twist(&phi)?)?, &phi2)?;
        let rhs3 = push_classes(
            phi.hom(),
            &phi2,
            &phi2,
            &hs_trace(&a.mul(&b.twist(&phi)?)?, &phi2)?,
        )?;
        if lhs3 != rhs3 {
            failures.push(format!("cyclicity {}: transported square-twist law", k));
        }
    }

    for k in 0..shadow_instances {
        let (m, f, n, g) = random_shadow_pair(&mut rng)?;
        let sigma = cyclic_symmetry(&m, &n)?;
        let s_fg = shadow_map(&coend_map(&f, &g)?)?;
        let s_gf = shadow_map(&coend_map(&g, &f)?)?;
        if sigma.compose(&s_fg)? != s_gf.compose(&sigma)? {
            failures.push(format!("shadow rotation {}: naturality square broken", k));
        }
        if chain_endo_lefschetz(&s_fg)? != chain_endo_lefschetz(&s_gf)? {
            failures.push(format!("shadow rotation {}: homology traces differ", k));
        }
    }

    Ok(outcome(
        "trace identities and shadow cyclicity",
        failures,
        format!(
            "{} duality traces, {} twisted cyclicity pairs, {} shadow rotations",
            dual_instances, cyclicity_instances, shadow_instances
        ),
    ))
}

/// Strict base-change duality for every homomorphism between the catalog
/// groups and for the reductions out of the integers.
pub fn check_base_change() -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let groups = small_groups()?;
    let mut n_homs = 0usize;
    for (na, a) in &groups {
        for (nb, b) in &groups {
            for i in all_homs(a, b)? {
                n_homs += 1;
                let report = verify_base_change(&i)?;
                if !report.ok {
                    failures.push(format!("{} -> {}: {:?}", na, nb, report));
                }
            }
        }
    }
    for n in 1..=6u64 {
        let report = verify_base_change(&reduction_mod(n)?)?;
        if !(report.ok && report.tensor_rank == n as usize) {
            failures.push(format!("Z -> Z/{}: {:?}", n, report));
        }
    }
    Ok(outcome(
        "base change strict duality",
        failures,
        format!("{} homomorphisms between catalog groups and Z -> Z/n for n <= 6", n_homs),
    ))
}

/// Chain-level and homology-level Lefschetz numbers agree on every
/// shipped simplicial self-map.
pub fn check_hopf_consistency() -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let catalog = simplicial_catalog()?;
    let total = catalog.len();
    for (name, map) in catalog {
        let chain = map.lefschetz_number()?;
        let homology = map.homology_lefschetz_number()?;
        if chain != homology {
            failures.push(format!("{}: {} on chains, {} on homology", name, chain, homology));
        }
    }
    Ok(outcome(
        "chain versus homology traces",
        failures,
        format!("{} catalog self-maps", total),
    ))
}

/// Runs every check with production instance counts.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_weight_vectors()?,
        check_simplicial_additivity(seed, 1000)?,
        check_linearity(seed.wrapping_add(1), 500)?,
        check_certificates()?,
        check_circle_reidemeister()?,
        check_reidemeister_additivity(seed.wrapping_add(2), 200)?,
        check_trace_identities(seed.wrapping_add(3), 500, 500, 100)?,
        check_base_change()?,
        check_hopf_consistency()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    // Smoke runs with small instance counts; the acceptance target runs
    // the full suite.

    #[test]
    fn every_check_passes_at_smoke_scale() {
        let checks = vec![
            check_weight_vectors().unwrap(),
            check_simplicial_additivity(7, 40).unwrap(),
            check_linearity(8, 20).unwrap(),
            check_certificates().unwrap(),
            check_circle_reidemeister().unwrap(),
            check_reidemeister_additivity(9, 10).unwrap(),
            check_trace_identities(10, 40, 40, 10).unwrap(),
            check_base_change().unwrap(),
            check_hopf_consistency().unwrap(),
        ];
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.details);
        }
        assert_eq!(checks.len(), 9);
    }

    #[test]
    fn outcomes_carry_failure_details() {
        let o = outcome("sample", vec!["boom".into()], "ok".into());
        assert!(!o.passed);
        assert!(o.details.contains("boom"));
    }
}
