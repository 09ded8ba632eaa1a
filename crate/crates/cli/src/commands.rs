//! The six commands, each producing a Report and an exit code. All
//! computation happens in the core crate; this layer builds inputs,
//! names rows and renders values.

use std::path::Path;

use hilbtaut_core::deform::{
    deformation_split, kuranishi_quadratic_targets, singularity_report, SingularExample,
};
use hilbtaut_core::even::{EvenRing, Normalization};
use hilbtaut_core::expr::{eval_class_expr, Evaluated};
use hilbtaut_core::graded::GradedDims;
use hilbtaut_core::lattice::{
    degree_against_polarization, slope, HilbClass, KummerClass, SurfaceDesc, SurfaceKind,
    VarietyClass,
};
use hilbtaut_core::rat::Rat;
use hilbtaut_core::stability::{
    candidate_fate, destabilizer_search, stability_verdict, Fate, Setting, Target,
};
use hilbtaut_core::taut::{
    kummer_restrict, serre_flip, taut_cohomology_dims, taut_ext_dims, tautologize, SheafDesc,
};
use hilbtaut_core::torus::{Degree, RingElement};
use hilbtaut_core::verify::{run_verify, Provenance};

use crate::config::{module_err, parse_rat, CliError, Job, JobConfig, RatSpec, TargetSpec};
use crate::report::{Report, ReportRow};

fn provenance_tag(p: Provenance) -> &'static str {
    match p {
        Provenance::Oracle => "ORACLE",
        Provenance::Formula => "FORMULA",
        Provenance::Both => "BOTH",
    }
}

// ---- verify ----

pub fn cmd_verify() -> Result<(Report, i32), CliError> {
    let suite = run_verify();
    let rows = suite
        .rows
        .iter()
        .map(|row| ReportRow {
            label: row.label.to_string(),
            citation: Some(row.citation.to_string()),
            provenance: provenance_tag(row.provenance),
            expected: Some(row.expected.to_string()),
            computed: row.computed.clone(),
            matches: row.ok,
        })
        .collect();
    Ok((Report::new("verify", rows), suite.exit_code()))
}

// ---- slope ----

/// Linear-combination rendering; zero terms are dropped, unit
/// coefficients keep only the class name.
fn render_linear(terms: &[(Rat, String)]) -> String {
    let mut out = String::new();
    for (c, name) in terms {
        if c.is_zero() {
            continue;
        }
        let (sign, mag) = if c.is_negative() {
            ("-", -c)
        } else {
            ("+", c.clone())
        };
        if out.is_empty() {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(if sign == "-" { " - " } else { " + " });
        }
        if mag != Rat::one() {
            out.push_str(&format!("{mag} "));
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn render_hilb_class(surface: &SurfaceDesc, c: &HilbClass) -> String {
    let mut terms: Vec<(Rat, String)> = surface
        .basis_names()
        .iter()
        .zip(&c.h_part)
        .map(|(name, coeff)| (coeff.clone(), name.clone()))
        .collect();
    if let Some(m) = &c.m_part {
        terms.push((m.clone(), "m^*H".into()));
    }
    terms.push((c.d_part.clone(), "delta".into()));
    render_linear(&terms)
}

fn render_nodal_part(c: &KummerClass) -> String {
    let first = &c.nodal[0];
    if c.nodal.iter().all(|nu| nu == first) {
        format!("{first} on each of the 16 nodal classes")
    } else {
        let list: Vec<String> = c.nodal.iter().map(|nu| nu.to_string()).collect();
        format!("[{}]", list.join(", "))
    }
}

pub fn cmd_slope(config_path: &Path) -> Result<(Report, i32), CliError> {
    let job = JobConfig::load(config_path)?.resolve()?;
    let mut rows = Vec::new();
    let (rank, class) = match job.target {
        TargetSpec::Hilb | TargetSpec::GenKummer => {
            let taut = tautologize(&job.sheaf, job.n).map_err(module_err)?;
            rows.push(ReportRow::info("induced rank", "FORMULA", taut.rank.to_string()));
            rows.push(ReportRow::info(
                "induced first Chern class",
                "FORMULA",
                render_hilb_class(&job.surface, &taut.c1),
            ));
            (taut.rank, VarietyClass::Hilb(taut.c1))
        }
        TargetSpec::Kummer => {
            let restricted = kummer_restrict(&job.sheaf).map_err(module_err)?;
            rows.push(ReportRow::info(
                "restricted rank",
                "FORMULA",
                restricted.rank.to_string(),
            ));
            rows.push(ReportRow::info(
                "restricted class, doubling part",
                "FORMULA",
                render_linear(
                    &job.surface
                        .basis_names()
                        .iter()
                        .zip(&restricted.c1.alpha_part)
                        .map(|(name, c)| (c.clone(), format!("alpha({name})")))
                        .collect::<Vec<_>>(),
                ),
            ));
            rows.push(ReportRow::info(
                "restricted class, nodal part",
                "FORMULA",
                render_nodal_part(&restricted.c1),
            ));
            (restricted.rank, VarietyClass::Kummer(restricted.c1))
        }
    };
    rows.push(ReportRow::info(
        "polarisation family",
        "FORMULA",
        format!("{:?}", job.pol),
    ));
    let degree = degree_against_polarization(&job.surface, &class, job.pol).map_err(module_err)?;
    rows.push(ReportRow::info("degree", "FORMULA", degree.to_string()));
    let mu = slope(&job.surface, rank, &class, job.pol).map_err(module_err)?;
    rows.push(ReportRow::info("slope", "FORMULA", mu.to_string()));
    let command = format!("slope --config {}", config_path.display());
    Ok((Report::new(command, rows), 0))
}

// ---- stability ----

fn setting_for(job: &Job) -> Result<Setting, CliError> {
    let abelian = job.surface.kind() == SurfaceKind::AbelianStar;
    match (job.target, abelian) {
        (TargetSpec::Hilb, true) => match job.n {
            2 => Ok(Setting::AbelianHilb2),
            3 => Ok(Setting::AbelianHilb3),
            _ => Err(CliError::Config(
                "n: the abelian search engines cover n in {2, 3}".into(),
            )),
        },
        (TargetSpec::Hilb, false) => Setting::regular_hilb(job.n).map_err(module_err),
        (TargetSpec::Kummer, true) => Ok(Setting::Kummer),
        (TargetSpec::GenKummer, true) => Ok(Setting::GenKummer4),
        _ => Err(CliError::Config(
            "target: quotient targets need the abelian surface".into(),
        )),
    }
}

pub fn cmd_stability(config_path: &Path, bound: i64) -> Result<(Report, i32), CliError> {
    let job = JobConfig::load(config_path)?.resolve()?;
    let target = match job.target {
        TargetSpec::Hilb => Target::Hilb,
        TargetSpec::Kummer => Target::Kummer,
        TargetSpec::GenKummer => Target::GenKummer,
    };
    let verdict = stability_verdict(&job.sheaf, job.n, target);
    let mut rows = Vec::new();
    let mut verdict_row = ReportRow::info("verdict", "FORMULA", verdict.outcome.to_string());
    if let Some(citation) = verdict.citation {
        verdict_row = verdict_row.with_citation(citation);
    }
    rows.push(verdict_row);
    for hyp in &verdict.trail {
        rows.push(ReportRow::info(
            format!("hypothesis: {}", hyp.name),
            "FORMULA",
            if hyp.holds { "holds" } else { "fails" },
        ));
    }
    for (i, ineq) in verdict.inequalities.iter().enumerate() {
        rows.push(ReportRow::info(
            format!("side condition {}", i + 1),
            "FORMULA",
            ineq.clone(),
        ));
    }
    let setting = setting_for(&job)?;
    let search = destabilizer_search(&job.sheaf, setting, bound).map_err(module_err)?;
    rows.push(ReportRow::info(
        "destabiliser search",
        "FORMULA",
        format!(
            "bound {bound}: {} survivors among {} matched of {} examined",
            search.survivors.len(),
            search.matched,
            search.examined
        ),
    ));
    for (tag, count) in &search.kills {
        rows.push(ReportRow::info(
            format!("exclusion: {tag}"),
            "FORMULA",
            count.to_string(),
        ));
    }
    const LISTED: usize = 16;
    for (i, cand) in search.survivors.iter().take(LISTED).enumerate() {
        let fate = candidate_fate(setting, cand, &job.sheaf).map_err(module_err)?;
        let note = match fate {
            Fate::Survives { exception } => format!(" (exception: {exception})"),
            _ => String::new(),
        };
        rows.push(ReportRow::info(
            format!("survivor {}", i + 1),
            "FORMULA",
            format!("{cand}{note}"),
        ));
    }
    if search.survivors.len() > LISTED {
        rows.push(ReportRow::info(
            "survivors omitted",
            "FORMULA",
            (search.survivors.len() - LISTED).to_string(),
        ));
    }
    let command = format!(
        "stability --config {} --search-bound {bound}",
        config_path.display()
    );
    Ok((Report::new(command, rows), 0))
}

// ---- cohomology ----

fn structure_cohomology(surface: &SurfaceDesc) -> GradedDims {
    match surface.kind() {
        SurfaceKind::AbelianStar => GradedDims::new(&[1, 2, 1]),
        _ => {
            let h2 = (surface.chi_o() - 1).max(0) as u64;
            GradedDims::new(&[1, 0, h2])
        }
    }
}

pub fn cmd_cohomology(config_path: &Path) -> Result<(Report, i32), CliError> {
    let job = JobConfig::load(config_path)?.resolve()?;
    let coh = job.sheaf.coh().ok_or_else(|| {
        CliError::Config("sheaf.coh: the cohomology command needs source cohomology dims".into())
    })?;
    let coh_o = structure_cohomology(&job.surface);
    let mut rows = vec![
        ReportRow::info("source cohomology", "FORMULA", coh.to_string()),
        ReportRow::info("structure-sheaf cohomology", "FORMULA", coh_o.to_string()),
    ];
    let induced = taut_cohomology_dims(coh, &coh_o, job.n);
    rows.push(ReportRow::info("induced cohomology", "FORMULA", induced.to_string()));
    rows.push(ReportRow::info(
        "induced total dimension",
        "FORMULA",
        induced.total().to_string(),
    ));
    if let Some(ext) = job.sheaf.ext_self() {
        let full = taut_ext_dims(ext, &coh_o, &serre_flip(coh), coh, job.n);
        rows.push(ReportRow::info(
            "induced self-extensions",
            "FORMULA",
            full.to_string(),
        ));
        rows.push(ReportRow::info(
            "first-order self-extensions",
            "FORMULA",
            full.dim(1).to_string(),
        ));
        rows.push(ReportRow::info(
            "second-order self-extensions",
            "FORMULA",
            full.dim(2).to_string(),
        ));
    }
    let command = format!("cohomology --config {}", config_path.display());
    Ok((Report::new(command, rows), 0))
}

// ---- deform ----

pub fn cmd_deform(k: u64) -> Result<(Report, i32), CliError> {
    let f = SheafDesc::base_point_ideal_twist(k).map_err(module_err)?;
    let split = deformation_split(&f).map_err(module_err)?;
    let (q0, q1) = kuranishi_quadratic_targets(&f).map_err(module_err)?;
    let report = singularity_report(SingularExample::BasePointIdeal { k }).map_err(module_err)?;
    let rows = vec![
        ReportRow::info("deformation split", "FORMULA", split.to_string()),
        ReportRow::info("tangent dimension", "FORMULA", report.tangent.to_string()),
        ReportRow::info("quadratic targets", "FORMULA", format!("({q0}, {q1})")),
        ReportRow::info("sections", "FORMULA", report.h0.to_string()),
        ReportRow::info("first cohomology", "FORMULA", report.h1.to_string()),
        ReportRow::info("source self-extensions", "FORMULA", report.ext1.to_string()),
        ReportRow::info(
            "assumes nonvanishing pairing",
            "FORMULA",
            report.assumes_nonvanishing_pairing.to_string(),
        ),
    ];
    Ok((Report::new(format!("deform --k {k}"), rows), 0))
}

// ---- eval ----

enum RingChoice {
    Torus(usize),
    Even { factors: usize, gram: Vec<Vec<Rat>> },
}

fn parse_ring(spec: &str) -> Result<RingChoice, CliError> {
    match spec {
        "A2" => Ok(RingChoice::Torus(2)),
        "A3" => Ok(RingChoice::Torus(3)),
        _ => {
            let rest = spec.strip_prefix("Xn:").ok_or_else(|| {
                CliError::Config("ring: expected A2, A3 or Xn:<factors>,<gram JSON>".into())
            })?;
            let (n_text, gram_text) = rest.split_once(',').ok_or_else(|| {
                CliError::Config("ring: expected Xn:<factors>,<gram JSON>".into())
            })?;
            let factors: usize = n_text
                .trim()
                .parse()
                .map_err(|_| CliError::Config("ring: factor count must be an integer".into()))?;
            if !(1..=8).contains(&factors) {
                return Err(CliError::Config("ring: factor count must lie in 1..=8".into()));
            }
            let gram: Vec<Vec<i64>> = serde_json::from_str(gram_text)
                .map_err(|e| CliError::Config(format!("ring: gram matrix: {e}")))?;
            let rank = gram.len();
            if rank == 0 || gram.iter().any(|row| row.len() != rank) {
                return Err(CliError::Config("ring: gram matrix must be square".into()));
            }
            for (i, row) in gram.iter().enumerate() {
                for (j, x) in row.iter().enumerate().take(i) {
                    if *x != gram[j][i] {
                        return Err(CliError::Config("ring: gram matrix must be symmetric".into()));
                    }
                }
            }
            let gram = gram
                .into_iter()
                .map(|row| row.into_iter().map(Rat::int).collect())
                .collect();
            Ok(RingChoice::Even { factors, gram })
        }
    }
}

/// Even-ring queries: `int([..] . [..] . ...)` with one coordinate tuple
/// per box class; `H` abbreviates the generator of a rank-1 lattice.
fn parse_even_classes(expr: &str, rank: usize) -> Result<Vec<Vec<Rat>>, CliError> {
    let inner = expr
        .trim()
        .strip_prefix("int(")
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| {
            CliError::Config("expr: even-ring queries have the form int([..] . [..] . ...)".into())
        })?;
    inner
        .split('.')
        .map(|atom| {
            let atom = atom.trim();
            if atom == "H" {
                if rank == 1 {
                    return Ok(vec![Rat::one()]);
                }
                return Err(CliError::Config(
                    "expr: `H` abbreviates only rank-1 lattices; give coordinates".into(),
                ));
            }
            let specs: Vec<RatSpec> = serde_json::from_str(atom)
                .map_err(|e| CliError::Config(format!("expr: atom `{atom}`: {e}")))?;
            specs
                .iter()
                .map(|s| parse_rat(s, "expr"))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect()
}

fn render_element(el: &RingElement, factors: usize) -> String {
    if el.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for mask in 0..(1u32 << (4 * factors)) {
        let c = el.coefficient(mask);
        if c.is_zero() {
            continue;
        }
        let name = if mask == 0 {
            "1".to_string()
        } else {
            (0..32)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| format!("e{}", i + 1))
                .collect::<Vec<_>>()
                .join("^")
        };
        terms.push((c, name));
    }
    render_linear(&terms)
}

fn render_degree(d: Degree) -> String {
    match d {
        Degree::Zero => "zero element".into(),
        Degree::Homogeneous(d) => format!("homogeneous of degree {d}"),
        Degree::Mixed => "mixed".into(),
    }
}

pub fn cmd_eval(ring_spec: &str, expr: &str) -> Result<(Report, i32), CliError> {
    let command = format!("eval --ring {ring_spec} --expr {expr}");
    let rows = match parse_ring(ring_spec)? {
        RingChoice::Torus(factors) => {
            let mut rows = vec![ReportRow::info(
                "ring",
                "ORACLE",
                format!("{factors} abelian-surface factors"),
            )];
            match eval_class_expr(expr, factors).map_err(module_err)? {
                Evaluated::Number { value, not_top } => {
                    rows.push(ReportRow::info("value", "ORACLE", value.to_string()));
                    if not_top {
                        rows.push(ReportRow::info(
                            "below top degree",
                            "ORACLE",
                            "integral reported as 0",
                        ));
                    }
                }
                Evaluated::Class(el) => {
                    rows.push(ReportRow::info("class", "ORACLE", render_element(&el, factors)));
                    rows.push(ReportRow::info("degree", "ORACLE", render_degree(el.degree())));
                    rows.push(ReportRow::info("terms", "ORACLE", el.term_count().to_string()));
                }
            }
            rows
        }
        RingChoice::Even { factors, gram } => {
            let rank = gram.len();
            let ring = EvenRing::new(factors, gram);
            let coords = parse_even_classes(expr, rank)?;
            let classes = coords
                .iter()
                .map(|c| ring.box_class(c).map_err(module_err))
                .collect::<Result<Vec<_>, _>>()?;
            let raw = ring
                .even_intersection(&classes, Normalization::Raw)
                .map_err(module_err)?;
            let sym = ring
                .even_intersection(&classes, Normalization::SymmetricQuotient)
                .map_err(module_err)?;
            vec![
                ReportRow::info(
                    "ring",
                    "ORACLE",
                    format!("{factors} symmetric factors over a rank-{rank} lattice"),
                ),
                ReportRow::info("box classes", "ORACLE", classes.len().to_string()),
                ReportRow::info("raw intersection", "ORACLE", raw.to_string()),
                ReportRow::info("symmetrised intersection", "ORACLE", sym.to_string()),
            ]
        }
    };
    Ok((Report::new(command, rows), 0))
}
