//! fptrace: compute fixed-point invariants and verify their identities
//! on documents in the JSON formats described in docs/schemas.md.
//!
//! Exit codes: 0 when the computation succeeds or the verification
//! passes, 1 when a verification fails, 2 on malformed or semantically
//! invalid input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use fptrace_core::groupring::{twisted_classes, GroupEndo};
use fptrace_core::profunctor::{coefficient_vector, verify_dual_pair, verify_linearity};
use fptrace_core::reidemeister::verify_reidemeister_additivity;
use fptrace_core::selftest;
use fptrace_core::simplicial::{verify_additivity, SimplicialMap};

use fptrace_cli::doc::Document;
use fptrace_cli::output::{big, class_vector, emit, Format, Outcome};

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "fptrace", version, about = "Fixed-point invariants in an exact chain model")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic of a simplicial or chain complex.
    Euler { complex: PathBuf },
    /// Lefschetz number of a simplicial self-map (complex plus vertex
    /// map) or of an untwisted chain endomorphism (single file).
    Lefschetz { complex: PathBuf, map: Option<PathBuf> },
    /// Reidemeister trace of a twisted chain endomorphism.
    Reidemeister { endo: PathBuf },
    /// Conjugacy classes of a group.
    ConjugacyClasses { group: PathBuf },
    /// Twisted conjugacy classes of a group endomorphism.
    TwistedClasses { endo: PathBuf },
    /// Coefficient vector of a dualizable weight.
    CoefficientVector { certificate: PathBuf },
    /// Check a duality certificate: quasi-isomorphism legs and both
    /// triangle identities, solving for homotopy witnesses.
    VerifyDualPair { certificate: PathBuf },
    /// Check Lefschetz additivity L(f) == L(f restricted) + L(cone) for
    /// a simplicial pair. The subcomplex includes by vertex identity
    /// unless an explicit inclusion map is given.
    VerifyAdditivity {
        ambient: PathBuf,
        sub: PathBuf,
        map: PathBuf,
        inclusion: Option<PathBuf>,
    },
    /// Check the linearity formula: the trace on the weighted colimit
    /// equals the weight coefficients dotted with objectwise traces.
    VerifyLinearity { certificate: PathBuf, diagram: PathBuf },
    /// Check Reidemeister additivity for a relative input.
    VerifyReidemeisterAdditivity { input: PathBuf },
    /// Run the full verification suite and print a summary.
    Selftest {
        /// Seed for the randomized instance generators.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    match run(cli.command) {
        Ok(outcome) => {
            emit(format, &outcome);
            if outcome.ok {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            emit(
                format,
                &Outcome { ok: false, result: Value::Null, details: e.to_string(), text: None },
            );
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> fptrace_core::Result<Document> {
    let raw = fs::read_to_string(path).map_err(|e| {
        fptrace_core::Error::Invalid(format!("cannot read {}: {}", path.display(), e))
    })?;
    let doc: Document = serde_json::from_str(&raw).map_err(|e| {
        fptrace_core::Error::Invalid(format!("{}: {}", path.display(), e))
    })?;
    doc.check_version()?;
    Ok(doc)
}

fn wrong_kind(path: &Path, want: &str, got: &Document) -> fptrace_core::Error {
    fptrace_core::Error::Invalid(format!(
        "{}: expected a {} document, found {}",
        path.display(),
        want,
        got.kind()
    ))
}

fn run(cmd: Command) -> fptrace_core::Result<Outcome> {
    match cmd {
        Command::Euler { complex } => {
            let chi = match load(&complex)? {
                Document::SimplicialComplex(d) => d.to_core()?.chain_complex().euler_characteristic(),
                Document::ChainComplex(d) => d.complex.to_core()?.euler_characteristic(),
                other => return Err(wrong_kind(&complex, "complex", &other)),
            };
            Ok(Outcome::pass(big(&chi), "euler characteristic"))
        }
        Command::Lefschetz { complex, map } => match map {
            Some(map_path) => {
                let Document::SimplicialComplex(cd) = load(&complex)? else {
                    return Err(wrong_kind(&complex, "simplicial_complex", &load(&complex)?));
                };
                let Document::SimplicialMap(md) = load(&map_path)? else {
                    return Err(wrong_kind(&map_path, "simplicial_map", &load(&map_path)?));
                };
                let space = cd.to_core()?;
                let f = SimplicialMap::new(space.clone(), space, md.vertex_map)?;
                Ok(Outcome::pass(big(&f.lefschetz_number()?), "lefschetz number"))
            }
            None => {
                let Document::TwistedEndo(ed) = load(&complex)? else {
                    return Err(wrong_kind(&complex, "twisted_endo", &load(&complex)?));
                };
                let f = ed.endo.to_core()?;
                Ok(Outcome::pass(big(&f.lefschetz_trace()?), "lefschetz trace"))
            }
        },
        Command::Reidemeister { endo } => {
            let Document::TwistedEndo(ed) = load(&endo)? else {
                return Err(wrong_kind(&endo, "twisted_endo", &load(&endo)?));
            };
            let f = ed.endo.to_core()?;
            let r = f.reidemeister_trace()?;
            Ok(Outcome::pass(class_vector(&r)?, "reidemeister trace by twisted class"))
        }
        Command::ConjugacyClasses { group } => {
            let Document::Group(gd) = load(&group)? else {
                return Err(wrong_kind(&group, "group", &load(&group)?));
            };
            let g = gd.group.to_core()?;
            let classes = twisted_classes(&g, &GroupEndo::identity(&g))?;
            let labels: Vec<String> =
                classes.labels()?.iter().map(|l| classes.label_name(l)).collect();
            Ok(Outcome::pass(
                json!({"count": labels.len(), "labels": labels}),
                "conjugacy classes",
            ))
        }
        Command::TwistedClasses { endo } => {
            let Document::GroupEndo(ed) = load(&endo)? else {
                return Err(wrong_kind(&endo, "group_endo", &load(&endo)?));
            };
            let (g, phi) = ed.to_core()?;
            let classes = twisted_classes(&g, &phi)?;
            let labels: Vec<String> =
                classes.labels()?.iter().map(|l| classes.label_name(l)).collect();
            Ok(Outcome::pass(
                json!({"count": labels.len(), "labels": labels}),
                "twisted conjugacy classes",
            ))
        }
        Command::CoefficientVector { certificate } => {
            let Document::WeightCertificate(cd) = load(&certificate)? else {
                return Err(wrong_kind(&certificate, "weight_certificate", &load(&certificate)?));
            };
            let cert = cd.to_core()?;
            let mut out = Map::new();
            for (label, coeff) in coefficient_vector(&cert)? {
                out.insert(label, big(&coeff));
            }
            Ok(Outcome::pass(Value::Object(out), "weight coefficients by class"))
        }
        Command::VerifyDualPair { certificate } => {
            let Document::WeightCertificate(cd) = load(&certificate)? else {
                return Err(wrong_kind(&certificate, "weight_certificate", &load(&certificate)?));
            };
            let report = verify_dual_pair(&cd.to_core()?)?;
            Ok(Outcome::verdict(
                report.ok,
                json!({
                    "unit_leg_quasi_iso": report.unit_leg_quasi_iso,
                    "counit_leg_quasi_iso": report.counit_leg_quasi_iso,
                    "triangle_on_m": report.triangle_on_m,
                    "triangle_on_dual": report.triangle_on_dual,
                }),
                if report.ok { "duality certificate verified" } else { "duality certificate rejected" },
            ))
        }
        Command::VerifyAdditivity { ambient, sub, map, inclusion } => {
            let Document::SimplicialComplex(xd) = load(&ambient)? else {
                return Err(wrong_kind(&ambient, "simplicial_complex", &load(&ambient)?));
            };
            let Document::SimplicialComplex(ad) = load(&sub)? else {
                return Err(wrong_kind(&sub, "simplicial_complex", &load(&sub)?));
            };
            let Document::SimplicialMap(fd) = load(&map)? else {
                return Err(wrong_kind(&map, "simplicial_map", &load(&map)?));
            };
            let x = xd.to_core()?;
            let a = ad.to_core()?;
            let i_vertices = match inclusion {
                Some(p) => {
                    let Document::SimplicialMap(id) = load(&p)? else {
                        return Err(wrong_kind(&p, "simplicial_map", &load(&p)?));
                    };
                    id.vertex_map
                }
                None => (0..a.n_vertices()).collect(),
            };
            let i = SimplicialMap::new(a.clone(), x.clone(), i_vertices)?;
            let f = SimplicialMap::new(x.clone(), x.clone(), fd.vertex_map)?;
            let g = restrict(&f, &i)?;
            let report = verify_additivity(&i, &f, &g)?;
            Ok(Outcome::verdict(
                report.holds,
                json!({
                    "L_f": big(&report.ambient),
                    "L_fA": big(&report.sub),
                    "L_cone": big(&report.relative),
                }),
                "L(f) - L(f restricted) == L(cone)",
            ))
        }
        Command::VerifyLinearity { certificate, diagram } => {
            let Document::WeightCertificate(cd) = load(&certificate)? else {
                return Err(wrong_kind(&certificate, "weight_certificate", &load(&certificate)?));
            };
            let Document::Profunctor(pd) = load(&diagram)? else {
                return Err(wrong_kind(&diagram, "profunctor", &load(&diagram)?));
            };
            let cert = cd.to_core()?;
            let (d, f) = pd.to_core()?;
            let report = verify_linearity(&cert, &d, &f)?;
            let terms: Vec<Value> = report
                .terms
                .iter()
                .map(|(label, coeff, tr)| {
                    json!({"label": label, "coefficient": big(coeff), "trace": big(tr)})
                })
                .collect();
            Ok(Outcome::verdict(
                report.ok,
                json!({
                    "colimit_trace": big(&report.colimit_trace),
                    "weighted_sum": big(&report.weighted_sum),
                    "terms": terms,
                }),
                "trace on the weighted colimit equals the weighted sum",
            ))
        }
        Command::VerifyReidemeisterAdditivity { input } => {
            let Document::RelativeInput(rd) = load(&input)? else {
                return Err(wrong_kind(&input, "relative_input", &load(&input)?));
            };
            let report = verify_reidemeister_additivity(&rd.to_core()?)?;
            Ok(Outcome::verdict(
                report.ok,
                json!({
                    "ambient": class_vector(&report.ambient)?,
                    "pushed_sub": class_vector(&report.pushed_sub)?,
                    "relative": class_vector(&report.relative)?,
                    "augments": {
                        "ambient": big(&report.augment_ambient),
                        "sub": big(&report.augment_sub),
                        "relative": big(&report.augment_relative),
                    },
                    "classes_hold": report.classes_hold,
                    "augments_hold": report.augments_hold,
                }),
                "R(f) == push(R(g)) + relative trace",
            ))
        }
        Command::Selftest { seed } => {
            let checks = selftest::run_all(seed)?;
            let all = checks.iter().all(|c| c.passed);
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "details": c.details}))
                .collect();
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let table: String = checks
                .iter()
                .map(|c| {
                    format!(
                        "{}  {:width$}  {}\n",
                        if c.passed { "pass" } else { "FAIL" },
                        c.name,
                        c.details,
                        width = width
                    )
                })
                .collect();
            Ok(Outcome::verdict(
                all,
                json!(rows),
                format!("{}/{} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len()),
            )
            .with_text(table))
        }
    }
}

/// Restriction of an ambient self-map to a subcomplex along an injective
/// inclusion: each subcomplex vertex must map back into the image.
fn restrict(f: &SimplicialMap, i: &SimplicialMap) -> fptrace_core::Result<SimplicialMap> {
    let mut back: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, &v) in i.vertex_map().iter().enumerate() {
        back.insert(v, k);
    }
    let mut g = Vec::with_capacity(i.source().n_vertices());
    for &v in i.vertex_map() {
        let image = f.vertex_map()[v];
        let Some(&pre) = back.get(&image) else {
            return Err(fptrace_core::Error::Invalid(format!(
                "map does not preserve the subcomplex: vertex {} leaves the image",
                v
            )));
        };
        g.push(pre);
    }
    SimplicialMap::new(i.source().clone(), i.source().clone(), g)
}
