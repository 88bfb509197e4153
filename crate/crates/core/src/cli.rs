//! Command-line frontend: human-readable and JSON verification reports.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::arithmetic::PiRational;
use crate::catalog::{
    catalog, classify_degeneracies, collapse_table_discrepancies, cone_angles, derive_params,
    DegeneracyReport, DerivedParams, LatticeSignature, Ridge,
};
use crate::check::{Check, Status};
use crate::domain::{
    bisd_bullets, bisd_sample, boundary_vertices, build_domain, glue_check, in_d_union,
    kneg_collapsed_vertex, kneg_form, same_lines_checks, side_pairing_checks, vertices_d,
    DomainD, DomainVertexTable,
};
use crate::error::{Error, Result};
use crate::moves::{
    all_moves, check_braid, configurations_of, isometry_defect, ConfigTag, Configuration,
    LatticeConfigs,
};
use crate::polyhedron::{
    bisector_equivalence_sample, collapse_status, incidence_residual, s_consistency_defect,
    SampleReport,
};
use crate::tolerances;
use crate::verification::{
    bfs_oracle, check_relations, commensurability_check, cycle_orders, euler_characteristic,
    tessellation_sign_table, triangle_checks, EulerReport, OrderEntry, TessellationReport,
};

pub const SCHEMA_VERSION: &str = "dmlat-report/1";

/// Samples per sampled lemma in `check`.
const LEMMA_SAMPLES: usize = 1000;

/// Stabiliser orders above this are not enumerated.
const BFS_CAP: i64 = 400;

#[derive(Parser, Debug)]
#[command(name = "dmlat", version, about = "Verify the fundamental polyhedra of the 2-fold symmetry lattices")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit a single JSON report on standard output.
    #[arg(long, global = true)]
    json: bool,

    /// Projective tolerance for relations and cycle orders.
    #[arg(long, global = true, default_value_t = tolerances::PROJECTIVE)]
    tolerance: f64,

    /// Largest power tried when measuring a projective order.
    #[arg(long, global = true, default_value_t = tolerances::MAX_ORDER)]
    max_order: usize,

    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Accept signatures outside the catalog (generic chart checks only).
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Args, Debug, Clone, Copy)]
struct SigArgs {
    p: u32,
    k: u32,
    #[arg(value_name = "P'")]
    p_prime: u32,
}

impl SigArgs {
    fn sig(self) -> LatticeSignature {
        LatticeSignature::new(self.p, self.k, self.p_prime)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the catalog with derived parameters.
    List,
    /// Run the full verification for one lattice or the whole catalog.
    Check {
        #[arg(long)]
        all: bool,
        p: Option<u32>,
        k: Option<u32>,
        #[arg(value_name = "P'")]
        p_prime: Option<u32>,
    },
    /// Exact orbifold Euler characteristic and volume.
    Euler(SigArgs),
    /// The 24 vertices of D with their argument table.
    Vertices(SigArgs),
    /// Sampled sign table around a ridge.
    Tessellate {
        #[command(flatten)]
        sig: SigArgs,
        /// Ridge identifier, e.g. `K,R1` or `K,Kinv`.
        #[arg(long)]
        ridge: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overall {
    Pass,
    Fail,
    PassWithWarnings,
}

impl Overall {
    fn label(self) -> &'static str {
        match self {
            Overall::Pass => "pass",
            Overall::Fail => "fail",
            Overall::PassWithWarnings => "pass-with-warnings",
        }
    }

    fn combine(items: impl IntoIterator<Item = Overall>) -> Overall {
        items.into_iter().fold(Overall::Pass, |a, b| match (a, b) {
            (Overall::Fail, _) | (_, Overall::Fail) => Overall::Fail,
            (Overall::PassWithWarnings, _) | (_, Overall::PassWithWarnings) => Overall::PassWithWarnings,
            _ => Overall::Pass,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParametersSection {
    pub params: Option<DerivedParams>,
    pub cone_angles: Option<[PiRational; 5]>,
    pub degeneracies: Option<DegeneracyReport>,
    pub configurations: [Configuration; 3],
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Sections {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParametersSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<OrderEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<OrderEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub stabilisers: Vec<OrderEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub vertices: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_table: Option<DomainVertexTable>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bisectors: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tessellation: Option<TessellationReport>,
}

impl Sections {
    fn statuses(&self) -> Vec<Status> {
        let checks = self
            .parameters
            .iter()
            .flat_map(|p| p.checks.iter())
            .chain(&self.moves)
            .chain(&self.vertices)
            .chain(&self.domain)
            .chain(&self.bisectors)
            .map(|c| c.status);
        let orders = self.relations.iter().chain(&self.cycles).chain(&self.stabilisers).map(|e| e.status);
        checks.chain(orders).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: &'static str,
    pub signature: [u32; 3],
    pub exploratory: bool,
    pub sections: Sections,
    pub warnings: Vec<String>,
    pub overall: Overall,
}

impl ReportDocument {
    fn new(sig: LatticeSignature, exploratory: bool, sections: Sections, warnings: Vec<String>) -> Self {
        let failed = sections.statuses().contains(&Status::Fail)
            || sections.tessellation.as_ref().is_some_and(|t| !t.passed(1));
        let overall = if failed {
            Overall::Fail
        } else if warnings.is_empty() {
            Overall::Pass
        } else {
            Overall::PassWithWarnings
        };
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            signature: [sig.p, sig.k, sig.p_prime],
            exploratory,
            sections,
            warnings,
            overall,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub tolerance: f64,
    pub max_order: usize,
    pub seed: u64,
    pub samples: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { tolerance: tolerances::PROJECTIVE, max_order: tolerances::MAX_ORDER, seed: 7, samples: LEMMA_SAMPLES }
    }
}

/// Errors that are expected when a chart degenerates count as skips.
fn degenerate(e: &Error) -> bool {
    matches!(e, Error::DegenerateDenominator(_) | Error::SingularMatrix(_) | Error::PointAtInfinity | Error::SingularSystem)
}

fn from_result(name: String, r: Result<f64>, tol: f64) -> Check {
    match r {
        Err(e) if degenerate(&e) => Check::skipped(name, format!("degenerate chart: {e}")),
        other => Check::defect(name, other, tol),
    }
}

fn tag(c: &Configuration) -> String {
    match c.tag {
        ConfigTag::Generic => c.to_string(),
        t => format!("{t:?}"),
    }
}

fn move_checks(cs: &[Configuration; 3]) -> Vec<Check> {
    let mut out = Vec::new();
    for c in cs {
        let name = format!("{}: R1R2R1 = R2R1R2", tag(c));
        out.push(match check_braid(c) {
            Ok(ok) => Check::new(name, ok, "configuration-tracked"),
            Err(e) if degenerate(&e) => Check::skipped(name, format!("passes through a degenerate chart: {e}")),
            Err(e) => Check::failed(name, e.to_string()),
        });
        for (label, m) in all_moves(c) {
            let name = format!("{}: {label} is an isometry", tag(c));
            out.push(from_result(name, m.and_then(|m| isometry_defect(&m)), tolerances::ISOMETRY));
        }
    }
    out
}

fn chart_vertex_checks(cs: &[Configuration; 3]) -> Vec<Check> {
    let mut out = Vec::new();
    for c in cs {
        let generic = !collapse_status(c).iter().any(|&b| b);
        let mut push = |name: String, r: Result<f64>, tol: f64| {
            let chk = from_result(name, r, tol);
            out.push(if chk.status == Status::Skipped && generic {
                Check::failed(chk.name, chk.detail)
            } else {
                chk
            });
        };
        push(format!("{}: vertices lie on their lines", tag(c)), incidence_residual(c), tolerances::INCIDENCE);
        push(format!("{}: s-vertices = P⁻¹ t-vertices", tag(c)), s_consistency_defect(c), tolerances::VERTEX);
    }
    out
}

fn domain_vertex_checks(dom: &DomainD) -> Result<(Vec<Check>, DomainVertexTable)> {
    let table = vertices_d(dom)?;
    let mut out = Vec::new();
    let bad: Vec<String> = table.vertices.iter().filter(|v| !v.matches()).map(|v| format!("v{}", v.label)).collect();
    let checked = table.vertices.iter().filter(|v| !v.collapsed && !v.unavailable).count();
    out.push(Check::new(
        "vertex table of D matches its argument columns",
        bad.is_empty(),
        if bad.is_empty() { format!("{checked} vertices checked") } else { format!("mismatch at {}", bad.join(", ")) },
    ));
    let mut outside = Vec::new();
    for v in table.vertices.iter().filter(|v| !v.collapsed) {
        if let Some(p) = v.point {
            if !in_d_union(&p, dom, tolerances::MEMBERSHIP)? {
                outside.push(format!("v{}", v.label));
            }
        }
    }
    out.push(Check::new(
        "non-collapsed vertices lie in D",
        outside.is_empty(),
        if outside.is_empty() { "closure membership at 1e-6".to_string() } else { format!("outside: {}", outside.join(", ")) },
    ));
    Ok((out, table))
}

fn domain_checks(dom: &DomainD, opts: &CheckOptions, warnings: &mut Vec<String>) -> Result<Vec<Check>> {
    let mut out = dom.diagram.clone();
    out.extend(side_pairing_checks(dom));
    out.push(glue_check(dom, opts.samples, opts.seed)?);
    out.extend(same_lines_checks(dom, opts.seed)?);
    for b in boundary_vertices(dom)? {
        out.push(Check::new(
            format!("{} = ∞: {} is null", b.parameter, b.vertex),
            b.is_null(),
            format!("⟨v,v⟩ = {:.1e}", b.norm),
        ));
    }
    if dom.kneg {
        warnings.push(format!(
            "k′ = {}: k′-negative regime, bisD sampling replaced by form and vertex checks",
            dom.params.k_prime
        ));
        if dom.configs.c2.phi.is_negative() {
            let h = kneg_form(&dom.configs.c2).map(|_| 0.0);
            out.push(Check::defect("C2 area form has signature (1,2)", h, 0.0));
        }
        match kneg_collapsed_vertex(dom) {
            Ok(v) => out.push(Check::new(
                "v*23 is null iff k′ = ∞",
                v.consistent,
                format!("⟨v,v⟩ = {:.3e}, k′ = {}", v.norm, dom.params.k_prime),
            )),
            Err(e) => out.push(Check::failed("v*23 is null iff k′ = ∞", e.to_string())),
        }
    }
    for c in out.iter().filter(|c| c.status == Status::Skipped) {
        warnings.push(format!("skipped {}: {}", c.name, c.detail));
    }
    Ok(out)
}

fn summarize(r: &SampleReport) -> String {
    let worst = r.bullets.iter().map(|b| b.fraction()).fold(1.0, f64::min);
    format!("{} samples, seed {}, worst bullet agreement {:.3}", r.samples, r.seed, worst)
}

/// Sampled lemma checks. They are asserted where their hypotheses hold
/// (no collapsing vertices for the chart lemma, l positive finite for bisD)
/// and reported as skipped elsewhere.
fn bisector_checks(dom: &DomainD, opts: &CheckOptions, warnings: &mut Vec<String>) -> Vec<Check> {
    let mut out = Vec::new();
    for c in dom.configs.all() {
        let name = format!("{}: bisector lemma (8 bullets)", tag(&c));
        let generic = !collapse_status(&c).iter().any(|&b| b);
        out.push(match bisector_equivalence_sample(&c, opts.samples, opts.seed) {
            Ok(r) if generic => Check::new(name, r.all_agree(), summarize(&r)),
            Ok(r) if r.all_agree() => Check::new(name, true, summarize(&r)),
            Ok(r) => {
                warnings.push(format!("{name}: vertices collapse in this chart; {}", summarize(&r)));
                Check::skipped(name, format!("collapsing chart, informational: {}", summarize(&r)))
            }
            Err(e) => Check::skipped(name, e.to_string()),
        });
    }
    let name = "bisD inequalities (12 bullets)";
    if dom.kneg {
        out.push(Check::skipped(name, "k′-negative regime"));
        return out;
    }
    out.push(match bisd_bullets(dom).and_then(|b| bisd_sample(dom, &b, opts.samples, opts.seed)) {
        Ok(r) if dom.params.l.is_positive_finite() || r.all_agree() => Check::new(name, r.all_agree(), summarize(&r)),
        Ok(r) => {
            warnings.push(format!("{name}: l = {} collapses L*1 and L*3 vertices; {}", dom.params.l, summarize(&r)));
            Check::skipped(name, format!("l = {}, informational: {}", dom.params.l, summarize(&r)))
        }
        Err(e) => Check::failed(name, e.to_string()),
    });
    out
}

fn catalog_warnings(sig: LatticeSignature, euler: &EulerReport) -> Vec<String> {
    let mut w = Vec::new();
    let key = sig.to_string();
    w.extend(collapse_table_discrepancies().into_iter().filter(|m| m.contains(&key)));
    if let Ok(pairs) = commensurability_check() {
        for e in pairs.iter().filter(|e| e.signature == sig && !e.printed_matches) {
            w.push(format!(
                "printed volume-table χ {} differs from computed {}; computed/partner {} = {}",
                e.printed_chi, euler.chi, e.partner, e.ratio
            ));
        }
    }
    let dp = derive_params(sig).ok();
    if dp.is_some_and(|d| d.k_prime.is_positive_finite()) {
        w.push("edge labels γ_{7,15}, γ_{11,15}, γ_{15,19}, γ_{15,21} name v15, read as v0".to_string());
    }
    w.extend(euler.notes.iter().cloned());
    w
}

/// Full verification of a catalog lattice.
pub fn check_lattice(sig: LatticeSignature, opts: &CheckOptions) -> Result<ReportDocument> {
    let dom = build_domain(sig)?;
    let mut warnings = Vec::new();
    let mut sections = Sections { parameters: Some(parameters_section(sig, &dom.configs)), ..Default::default() };
    let cs = dom.configs.all();
    sections.moves = move_checks(&cs);
    sections.relations = check_relations(&dom, opts.max_order, opts.tolerance).entries;
    let cycles = cycle_orders(&dom, opts.max_order, opts.tolerance)?;
    sections.cycles = cycles.entries;
    sections.stabilisers = bfs_oracle(&dom, BFS_CAP, tolerances::BFS_MATCH)?;
    let mut vertices = chart_vertex_checks(&cs);
    let (dv, table) = domain_vertex_checks(&dom)?;
    vertices.extend(dv);
    sections.vertices = vertices;
    sections.vertex_table = Some(table);
    let mut domain = domain_checks(&dom, opts, &mut warnings)?;
    domain.extend(cycles.q_square_fixes_ridge);
    domain.extend(triangle_checks(sig, &dom.params));
    sections.domain = domain;
    sections.bisectors = bisector_checks(&dom, opts, &mut warnings);
    let euler = euler_characteristic(sig)?;
    warnings.extend(catalog_warnings(sig, &euler));
    for c in sections.moves.iter().filter(|c| c.status == Status::Skipped) {
        warnings.push(format!("skipped {}: {}", c.name, c.detail));
    }
    sections.euler = Some(euler);
    Ok(ReportDocument::new(sig, false, sections, warnings))
}

fn parameters_section(sig: LatticeSignature, cs: &LatticeConfigs) -> ParametersSection {
    let params = derive_params(sig).ok();
    let angles = cone_angles(sig).ok();
    let mut checks = Vec::new();
    if let Some(a) = angles {
        let total = a.iter().fold(PiRational::zero(), |s, &x| s + x);
        checks.push(Check::new("cone angles sum to 6π", total == PiRational::new(6, 1), format!("Σθᵢ = {total}")));
    }
    ParametersSection {
        params,
        cone_angles: angles,
        degeneracies: params.as_ref().map(classify_degeneracies),
        configurations: cs.all(),
        checks,
    }
}

/// The chart triple of a signature, without requiring integral parameters.
fn exploratory_configs(sig: LatticeSignature) -> LatticeConfigs {
    let pi = PiRational::pi();
    let a = PiRational::new(1, 2) + PiRational::new(1, sig.p_prime as i64);
    let t = PiRational::new(1, sig.p as i64);
    let f = PiRational::new(1, sig.k as i64);
    let c1 = Configuration::new(a, a, t, f).with_tag(ConfigTag::C1);
    let c2 = Configuration::new(pi + t - a, a, a * 2 - pi, pi + t + f - a * 2).with_tag(ConfigTag::C2);
    let c3 = Configuration::new(a, pi + t - a, t, f).with_tag(ConfigTag::C3);
    LatticeConfigs { c1, c2, c3, kneg: !c2.phi.is_positive() }
}

/// Chart-level checks for a signature outside the catalog.
pub fn check_exploratory(sig: LatticeSignature, opts: &CheckOptions) -> ReportDocument {
    let cs = configurations_of(sig).unwrap_or_else(|_| exploratory_configs(sig));
    let mut warnings = vec![format!("{sig} is not a catalog signature: chart checks only, no Euler characteristic")];
    if let Err(e) = derive_params(sig) {
        warnings.push(format!("parameters: {e}"));
    }
    let all = cs.all();
    let mut sections = Sections { parameters: Some(parameters_section(sig, &cs)), ..Default::default() };
    sections.moves = move_checks(&all);
    sections.vertices = chart_vertex_checks(&all);
    for c in &all {
        let name = format!("{}: bisector lemma (8 bullets)", tag(c));
        sections.bisectors.push(match bisector_equivalence_sample(c, opts.samples, opts.seed) {
            Ok(r) => Check::skipped(name, format!("informational: {}", summarize(&r))),
            Err(e) => Check::skipped(name, e.to_string()),
        });
    }
    ReportDocument::new(sig, true, sections, warnings)
}

#[derive(Serialize)]
struct Batch<'a> {
    schema_version: &'static str,
    reports: &'a [ReportDocument],
    overall: Overall,
}

#[derive(Serialize)]
struct ListEntry {
    signature: [u32; 3],
    params: DerivedParams,
    cone_angles: [PiRational; 5],
}

#[derive(Serialize)]
struct ListDocument {
    schema_version: &'static str,
    catalog: Vec<ListEntry>,
}

struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

fn resolve(sig: LatticeSignature, force: bool) -> std::result::Result<LatticeSignature, Usage> {
    for (name, v) in [("p", sig.p), ("k", sig.k), ("p'", sig.p_prime)] {
        if v < 2 {
            return Err(Usage(format!("{name} = {v} must be at least 2")));
        }
    }
    if !sig.is_catalog() && !force {
        return Err(Usage(format!("{sig} is not a catalog signature (use --force for exploratory mode)")));
    }
    Ok(sig)
}

fn require_catalog(sig: LatticeSignature) -> std::result::Result<LatticeSignature, Usage> {
    if sig.is_catalog() {
        Ok(sig)
    } else {
        Err(Usage(format!("{sig} is not a catalog signature; this command has no exploratory mode")))
    }
}

/// Entry point used by the binary: parses `argv` and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run`], writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Usage> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Usage(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Usage(e.to_string()))
}

fn exit_code(o: Overall) -> i32 {
    if o == Overall::Fail {
        1
    } else {
        0
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> std::result::Result<i32, Usage> {
    let opts = CheckOptions { tolerance: cli.tolerance, max_order: cli.max_order, seed: cli.seed, samples: LEMMA_SAMPLES };
    if !(cli.tolerance > 0.0 && cli.tolerance < 1.0) {
        return Err(Usage(format!("tolerance {} must lie in (0, 1)", cli.tolerance)));
    }
    let io = |e: std::io::Error| Usage(e.to_string());
    match &cli.command {
        Command::List => {
            let mut entries = Vec::new();
            for sig in catalog() {
                entries.push(ListEntry {
                    signature: [sig.p, sig.k, sig.p_prime],
                    params: derive_params(sig)?,
                    cone_angles: cone_angles(sig)?,
                });
            }
            if cli.json {
                emit_json(out, &ListDocument { schema_version: SCHEMA_VERSION, catalog: entries })?;
            } else {
                writeln!(out, "{:<11} {:>6} {:>5} {:>5} {:>4} {:>4} {:>4} {:>4}", "(p,k,p')", "α", "θ", "φ", "k'", "l", "l'", "d").map_err(io)?;
                for e in &entries {
                    let p = &e.params;
                    let sig = format!("({},{},{})", e.signature[0], e.signature[1], e.signature[2]);
                    writeln!(
                        out,
                        "{:<11} {:>6} {:>5} {:>5} {:>4} {:>4} {:>4} {:>4}",
                        sig,
                        p.alpha.to_string(),
                        p.theta.to_string(),
                        p.phi.to_string(),
                        p.k_prime.to_string(),
                        p.l.to_string(),
                        p.l_prime.to_string(),
                        p.d.to_string()
                    )
                    .map_err(io)?;
                }
            }
            Ok(0)
        }
        Command::Check { all, p, k, p_prime } => {
            let sigs = match (all, p, k, p_prime) {
                (true, None, None, None) => catalog(),
                (false, Some(p), Some(k), Some(q)) => vec![resolve(LatticeSignature::new(*p, *k, *q), cli.force)?],
                (true, ..) => return Err(Usage("--all takes no signature".into())),
                _ => return Err(Usage("check needs <P> <K> <P'> or --all".into())),
            };
            let mut reports = Vec::new();
            for sig in sigs {
                reports.push(if sig.is_catalog() { check_lattice(sig, &opts)? } else { check_exploratory(sig, &opts) });
            }
            let overall = Overall::combine(reports.iter().map(|r| r.overall));
            if cli.json {
                if let [one] = reports.as_slice() {
                    emit_json(out, one)?;
                } else {
                    emit_json(out, &Batch { schema_version: SCHEMA_VERSION, reports: &reports, overall })?;
                }
            } else {
                for r in &reports {
                    write_report(out, r).map_err(io)?;
                }
                if reports.len() > 1 {
                    let fails = reports.iter().filter(|r| r.overall == Overall::Fail).count();
                    writeln!(out, "{} lattices, {} failed: {}", reports.len(), fails, overall.label()).map_err(io)?;
                }
            }
            Ok(exit_code(overall))
        }
        Command::Euler(s) => {
            let sig = require_catalog(resolve(s.sig(), cli.force)?)?;
            let e = euler_characteristic(sig)?;
            let line = format!("chi = {}, volume = {} · π²", e.chi, e.volume_coeff);
            let warnings = catalog_warnings(sig, &e);
            let doc = ReportDocument::new(sig, false, Sections { euler: Some(e), ..Default::default() }, warnings);
            if cli.json {
                emit_json(out, &doc)?;
            } else {
                writeln!(out, "{line}").map_err(io)?;
                for w in &doc.warnings {
                    writeln!(out, "warning: {w}").map_err(io)?;
                }
            }
            Ok(exit_code(doc.overall))
        }
        Command::Vertices(s) => {
            let sig = require_catalog(resolve(s.sig(), cli.force)?)?;
            let dom = build_domain(sig)?;
            let (checks, table) = domain_vertex_checks(&dom)?;
            let doc = ReportDocument::new(
                sig,
                false,
                Sections { vertices: checks, vertex_table: Some(table), ..Default::default() },
                Vec::new(),
            );
            if cli.json {
                emit_json(out, &doc)?;
            } else {
                write_vertices(out, &doc).map_err(io)?;
            }
            Ok(exit_code(doc.overall))
        }
        Command::Tessellate { sig, ridge, samples } => {
            let sig = require_catalog(resolve(sig.sig(), cli.force)?)?;
            let r = Ridge::from_id(ridge).ok_or_else(|| {
                let ids: Vec<&str> = Ridge::ALL.iter().map(|r| r.id()).collect();
                Usage(format!("unknown ridge {ridge}; expected one of {}", ids.join(" ")))
            })?;
            let dom = build_domain(sig)?;
            let t = tessellation_sign_table(&dom, r, *samples, cli.seed)?;
            let ok = t.passed(*samples);
            let mut doc = ReportDocument::new(sig, false, Sections { tessellation: Some(t), ..Default::default() }, Vec::new());
            if !ok {
                doc.overall = Overall::Fail;
            }
            if cli.json {
                emit_json(out, &doc)?;
            } else if let Some(t) = &doc.sections.tessellation {
                writeln!(out, "{sig} {}  seed {}  {} tries", t.ridge, t.seed, t.tries).map_err(io)?;
                for row in &t.rows {
                    writeln!(out, "  {:<14} expected {:?}  {}/{} match", row.image, row.expected, row.matches, row.samples).map_err(io)?;
                }
                writeln!(out, "{}", doc.overall.label()).map_err(io)?;
            }
            Ok(exit_code(doc.overall))
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Skipped => "skip",
    }
}

fn write_section(out: &mut dyn Write, name: &str, items: &[(String, Status, String)]) -> std::io::Result<()> {
    if items.is_empty() {
        return Ok(());
    }
    let count = |s| items.iter().filter(|i| i.1 == s).count();
    writeln!(
        out,
        "  {name:<12} {} pass, {} fail, {} skipped",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Skipped)
    )?;
    for (n, s, d) in items.iter().filter(|i| i.1 != Status::Pass) {
        writeln!(out, "    {} {n}: {d}", status_word(*s))?;
    }
    Ok(())
}

fn checks(cs: &[Check]) -> Vec<(String, Status, String)> {
    cs.iter().map(|c| (c.name.clone(), c.status, c.detail.clone())).collect()
}

fn orders(es: &[OrderEntry]) -> Vec<(String, Status, String)> {
    es.iter().map(|e| (format!("{} [{}]", e.name, e.symbolic), e.status, e.detail.clone())).collect()
}

fn write_report(out: &mut dyn Write, r: &ReportDocument) -> std::io::Result<()> {
    let [p, k, q] = r.signature;
    writeln!(out, "({p},{k},{q})  {}", r.overall.label())?;
    let s = &r.sections;
    if let Some(ps) = &s.parameters {
        if let Some(dp) = &ps.params {
            writeln!(
                out,
                "  parameters   α = {}, θ = {}, φ = {}, k′ = {}, l = {}, l′ = {}, d = {}",
                dp.alpha, dp.theta, dp.phi, dp.k_prime, dp.l, dp.l_prime, dp.d
            )?;
        }
        write_section(out, "cone angles", &checks(&ps.checks))?;
    }
    write_section(out, "moves", &checks(&s.moves))?;
    write_section(out, "relations", &orders(&s.relations))?;
    write_section(out, "cycles", &orders(&s.cycles))?;
    write_section(out, "stabilisers", &orders(&s.stabilisers))?;
    write_section(out, "vertices", &checks(&s.vertices))?;
    write_section(out, "domain", &checks(&s.domain))?;
    write_section(out, "bisectors", &checks(&s.bisectors))?;
    if let Some(e) = &s.euler {
        writeln!(out, "  euler        chi = {}, volume = {} · π²", e.chi, e.volume_coeff)?;
    }
    for w in &r.warnings {
        writeln!(out, "  warning: {w}")?;
    }
    Ok(())
}

fn write_vertices(out: &mut dyn Write, doc: &ReportDocument) -> std::io::Result<()> {
    let [p, k, q] = doc.signature;
    writeln!(out, "({p},{k},{q})  vertices of D in the z-frame")?;
    if let Some(t) = &doc.sections.vertex_table {
        for v in &t.vertices {
            let z = match v.z {
                Some([a, b, c, d]) => format!("z = ({a:+.6}{b:+.6}i, {c:+.6}{d:+.6}i)"),
                None => "z-frame point unavailable".to_string(),
            };
            let state = if v.collapsed {
                "collapsed"
            } else if v.unavailable {
                "skipped"
            } else if v.matches() {
                "ok"
            } else {
                "MISMATCH"
            };
            let cells: Vec<String> = v
                .cells
                .iter()
                .map(|c| format!("{} {}{}", c.column, c.printed, if c.ok { "" } else { "!" }))
                .collect();
            writeln!(out, "  v{:<3} {:<9} {z}  [{}]", v.label, state, cells.join(", "))?;
        }
    }
    for c in &doc.sections.vertices {
        writeln!(out, "  {} {}: {}", status_word(c.status), c.name, c.detail)?;
    }
    writeln!(out, "{}", doc.overall.label())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("dmlat").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn euler_line() {
        let (code, out, _) = run_capture(&["euler", "4", "4", "6"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("chi = 13/48, volume = 13/18 · π²"), "{out}");
    }

    #[test]
    fn non_catalog_is_usage_error() {
        let (code, _, err) = run_capture(&["check", "9", "9", "9"]);
        assert_eq!(code, 2);
        assert!(err.contains("not a catalog signature (use --force for exploratory mode)"), "{err}");
    }

    #[test]
    fn bad_arguments() {
        assert_eq!(run_capture(&["check"]).0, 2);
        assert_eq!(run_capture(&["euler", "4", "4"]).0, 2);
        assert_eq!(run_capture(&["tessellate", "4", "4", "6", "--ridge", "nope"]).0, 2);
        assert_eq!(run_capture(&["--help"]).0, 0);
    }
}
