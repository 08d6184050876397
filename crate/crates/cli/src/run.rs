//! Pipeline dispatch and report text.

use std::fmt::Write;

use pdiv_core::cone::QCone;
use pdiv_core::cox::{run_cox, CoxReport, CoxSetup, RaySource};
use pdiv_core::engine::{run_general, EngineConfig, GeneratorSet, NormalizationStatus};
use pdiv_core::hilbert::hilbert_basis;
use pdiv_core::linalg::fmt_int_vec;
use pdiv_core::pdivisor::PDivisor;
use pdiv_core::torus::run_torus;
use pdiv_core::variety::{SectionOracle, Variety};
use pdiv_core::{verify, Error};

use crate::job::{build_cone, build_fan, build_pdivisor, build_variety, JobDescription, Pipeline, VarietySpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;
pub const EXIT_CAP: i32 = 4;
pub const EXIT_UNSUPPORTED: i32 = 5;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IterationLimitExceeded { .. } => EXIT_CAP,
        Error::UnsupportedBackend(_) | Error::UnsupportedBase(_) => EXIT_UNSUPPORTED,
        _ => EXIT_SEMANTIC,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub max_iterations: Option<usize>,
    pub verify: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub report: String,
    /// Machine-readable generator list.
    pub generators: Option<String>,
    /// Presentation for external normalization.
    pub export: Option<String>,
    pub verify_failed: bool,
}

fn semantic(m: String) -> Error {
    Error::Invalid(m)
}

fn pdivisor(job: &JobDescription) -> Result<PDivisor, Error> {
    let p = job.pdivisor.as_ref().ok_or_else(|| semantic("missing [pdivisor]".into()))?;
    build_pdivisor(p).map_err(|(_, m)| semantic(m))
}

fn variety(job: &JobDescription) -> Result<Variety, Error> {
    build_variety(job.variety.as_ref().ok_or_else(|| semantic("missing [variety]".into()))?)
}

fn status_name(s: NormalizationStatus) -> &'static str {
    match s {
        NormalizationStatus::Normal => "normal",
        NormalizationStatus::SaturatedToric => "saturated-toric",
        NormalizationStatus::ExportedForNormalization => "exported-for-normalization",
    }
}

/// The generator file: a header, then one `weight | section` line each.
pub fn generator_file(g: &GeneratorSet, names: &[String]) -> String {
    let mut s = String::new();
    writeln!(s, "status {}", status_name(g.status)).unwrap();
    writeln!(s, "coordinates {}", names.join(" ")).unwrap();
    writeln!(s, "generators {}", g.elements.len()).unwrap();
    for e in &g.elements {
        let w: Vec<String> = e.weight.iter().map(|x| x.to_string()).collect();
        writeln!(s, "{} | {}", w.join(" "), e.section.display(names)).unwrap();
    }
    s
}

fn write_generators(r: &mut String, g: &GeneratorSet, names: &[String]) {
    writeln!(r, "{} generators", g.elements.len()).unwrap();
    for e in &g.elements {
        writeln!(r, "  {}", e.display(names)).unwrap();
    }
    if !g.added.is_empty() {
        writeln!(r, "added by saturation: {}", g.added.len()).unwrap();
    }
    writeln!(r, "status: {}", status_name(g.status)).unwrap();
    writeln!(r, "quotient witness: {}", if g.witness.complete { "complete" } else { "incomplete" }).unwrap();
}

fn finish(g: &GeneratorSet, names: &[String], report: String) -> Outcome {
    Outcome {
        report,
        generators: Some(generator_file(g, names)),
        export: g.export.clone(),
        verify_failed: false,
    }
}

fn general(job: &JobDescription, cfg: &EngineConfig) -> Result<Outcome, Error> {
    let d = pdivisor(job)?;
    let v = variety(job)?;
    let y = v.oracle();
    let validation = d.validate(y);
    if validation.has_failures() {
        return Err(semantic(format!("p-divisor validation failed:\n{validation}")));
    }
    let rep = run_general(&d, y, cfg)?;
    let names = y.coordinates().to_vec();
    let mut r = String::new();
    writeln!(r, "pipeline: general").unwrap();
    write!(r, "{validation}").unwrap();
    writeln!(r, "linearity cells: {}", rep.cells).unwrap();
    writeln!(r, "rays: {}", rep.rays.len()).unwrap();
    for rec in &rep.rays {
        writeln!(r, "  ray {} k={} D={} sections={}", fmt_int_vec(&rec.ray), rec.k, rec.divisor, rec.dim).unwrap();
    }
    writeln!(r, "twists: {}", rep.twists.len()).unwrap();
    writeln!(r, "lattice completion added: {}", rep.lattice_added.len()).unwrap();
    writeln!(r, "quotient completion added: {}", rep.quotient_added.len()).unwrap();
    writeln!(r, "before pruning: {}, after: {}", rep.raw.len(), rep.pruned.len()).unwrap();
    write_generators(&mut r, &rep.generators, &names);
    Ok(finish(&rep.generators, &names, r))
}

fn torus(job: &JobDescription) -> Result<Outcome, Error> {
    let d = pdivisor(job)?;
    let v = variety(job)?;
    let y = v.oracle();
    let nv = match &job.variety {
        Some(VarietySpec::Projective { coordinates, .. }) => coordinates.len(),
        _ => 0,
    };
    let fan = build_fan(job.torus.as_ref().ok_or_else(|| semantic("missing [torus]".into()))?, nv)?;
    let rep = run_torus(y, &d, &fan)?;
    let names = y.coordinates().to_vec();
    let mut r = String::new();
    writeln!(r, "pipeline: torus").unwrap();
    writeln!(r, "unimodular cells: {}", rep.cells.len()).unwrap();
    for c in &rep.cells {
        let rays: Vec<String> = c.rays.iter().map(|x| fmt_int_vec(x)).collect();
        writeln!(r, "  cell {}", rays.join(" ")).unwrap();
        let sigma: Vec<String> = c.sigma.rays().iter().map(|x| fmt_int_vec(x)).collect();
        writeln!(r, "    upgraded cone rays: {}", sigma.join(" ")).unwrap();
        writeln!(r, "    Hilbert basis of the dual: {}", c.hilbert.len()).unwrap();
        writeln!(r, "    downgraded elements: {}", c.elements.len()).unwrap();
    }
    let total: usize = rep.cells.iter().map(|c| c.elements.len()).sum();
    writeln!(r, "{total} generators from {} cells, {} distinct", rep.cells.len(), rep.generators.elements.len()).unwrap();
    write_generators(&mut r, &rep.generators, &names);
    Ok(finish(&rep.generators, &names, r))
}

fn cox_block(r: &mut String, label: &str, rep: &CoxReport, names: &[String]) {
    writeln!(r, "ray source: {label}").unwrap();
    writeln!(r, "  cells: {}", rep.cells).unwrap();
    writeln!(r, "  rays: {}", rep.rays.len()).unwrap();
    let classes: Vec<String> = rep.classes.iter().map(|c| CoxReport::class_name(c)).collect();
    writeln!(r, "  classes ({}): {}", classes.len(), classes.join(", ")).unwrap();
    writeln!(r, "  rays after reduction: {}", rep.reduced.len()).unwrap();
    writeln!(r, "  section pool: {}", rep.pool.len()).unwrap();
    writeln!(r, "  lattice completion added: {}", rep.lattice_added).unwrap();
    writeln!(r, "  {} generators", rep.presentation.len()).unwrap();
    for p in &rep.presentation {
        writeln!(r, "    {}", p.display(names)).unwrap();
    }
    writeln!(r, "  toric relations: {}", rep.toric_relations.len()).unwrap();
    writeln!(r, "  minors certificate: {}", if rep.minors_ok { "pass" } else { "FAIL" }).unwrap();
    writeln!(r, "  status: {}", status_name(rep.generators.status)).unwrap();
    writeln!(
        r,
        "  quotient witness: {}",
        if rep.generators.witness.complete { "complete" } else { "incomplete" }
    )
    .unwrap();
}

fn cox(cfg: &EngineConfig) -> Result<Outcome, Error> {
    let setup = CoxSetup::s5();
    let names = setup.surface.coordinates().to_vec();
    let lin = run_cox(&setup, RaySource::Linearity, cfg)?;
    let arr = run_cox(&setup, RaySource::SignedArrangement, cfg)?;
    let mut r = String::new();
    writeln!(r, "pipeline: cox-s5").unwrap();
    cox_block(&mut r, "linearity", &lin, &names);
    cox_block(&mut r, "signed arrangement", &arr, &names);
    Ok(finish(&arr.generators, &names, r))
}

fn hilbert(job: &JobDescription) -> Result<Outcome, Error> {
    let c: QCone = build_cone(job.cone.as_ref().ok_or_else(|| semantic("missing [cone]".into()))?).map_err(semantic)?;
    let hb = hilbert_basis(&c)?;
    let mut r = String::new();
    writeln!(r, "pipeline: hilbert").unwrap();
    writeln!(r, "{} elements", hb.len()).unwrap();
    for h in &hb {
        let row: Vec<String> = h.iter().map(|x| x.to_string()).collect();
        writeln!(r, "{}", row.join(" ")).unwrap();
    }
    Ok(Outcome {
        report: r,
        ..Default::default()
    })
}

fn subdivide(job: &JobDescription) -> Result<Outcome, Error> {
    let d = pdivisor(job)?;
    let dom = d.linearity_subdivision();
    let mut r = String::new();
    writeln!(r, "pipeline: subdivide").unwrap();
    writeln!(r, "{} cells", dom.cells().len()).unwrap();
    for c in dom.cells() {
        let rays: Vec<String> = c.rays().iter().map(|x| fmt_int_vec(x)).collect();
        writeln!(r, "  {}", rays.join(" ")).unwrap();
    }
    let rays: Vec<String> = dom.rays().iter().map(|x| fmt_int_vec(x)).collect();
    writeln!(r, "{} rays: {}", rays.len(), rays.join(" ")).unwrap();
    Ok(Outcome {
        report: r,
        ..Default::default()
    })
}

fn eval(job: &JobDescription) -> Result<Outcome, Error> {
    let d = pdivisor(job)?;
    let u = job.weight.as_ref().ok_or_else(|| semantic("missing weight".into()))?;
    let du = d.evaluate_int(u)?;
    let mut r = String::new();
    writeln!(r, "pipeline: eval").unwrap();
    writeln!(r, "D{} = {du}", fmt_int_vec(u)).unwrap();
    Ok(Outcome {
        report: r,
        ..Default::default()
    })
}

/// Runs the job's pipeline.
pub fn run_job(job: &JobDescription, opts: &Options) -> Result<Outcome, Error> {
    let mut cfg = EngineConfig::default();
    if let Some(m) = opts.max_iterations {
        cfg.max_iterations = m;
    }
    let mut out = match job.pipeline {
        Pipeline::General => general(job, &cfg)?,
        Pipeline::Torus => torus(job)?,
        Pipeline::CoxS5 => cox(&cfg)?,
        Pipeline::Hilbert => hilbert(job)?,
        Pipeline::Subdivide => subdivide(job)?,
        Pipeline::Eval => eval(job)?,
    };
    if opts.verify {
        out.report.push_str("verification:\n");
        for c in verify::all(opts.seed) {
            out.verify_failed |= !c.passed();
            writeln!(out.report, "  {}", c.line()).unwrap();
        }
    }
    Ok(out)
}
