//! Verification scenarios producing serializable reports.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalog::{lookup, QuotientType};
use crate::complex::SimplicialComplex;
use crate::group::{classify_group, rr_normal_closure, FiniteMatrixGroup, GroupError, GroupKind, Subgroup};
use crate::homology::{edge_path_presentation, homology, transfer_criterion, HomologyError, HomologyReport, HomologyResult, PresentationReport, PresentationStatus};
use crate::polytope::{boundary_identifications, default_base_point, dirichlet_domain, domain_report, DomainReport, PolytopeError};
use crate::quotient::{DomainQuotient, DomainScaffold, QuotientError};
use crate::recognition::{
    complex_digest, double_along_boundary, greedy_collapse, induced_collapse, manifold_check, replay_bistellar, replay_collapse, verdict_ball, verdict_sphere,
    gluing_matches, BistellarCertificate, CollapseCertificate, CollapseOutcome, CollapseTarget, ReplayFailure, Verdict,
};
use crate::scalar::ExactVector;

pub const REPORT_SCHEMA: &str = "orbiquot-report/1";
pub const CERTIFICATE_SCHEMA: &str = "orbiquot-certificate/1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Options {
    pub seed: u64,
    /// Collapse restarts (restart 0 is lexicographic).
    pub restarts: usize,
    /// Bistellar moves tried before falling back to a punctured collapse.
    pub bistellar_budget: usize,
    /// Keep full certificates in the report (for writing them out).
    pub keep_certificates: bool,
    /// Record wall-clock time per stage.
    pub timing: bool,
    /// Print each finished stage to stderr.
    pub progress: bool,
    /// Largest `sd^2 T(Lambda)` (top simplices) for which the converse check
    /// builds the quotient complex; above it only domain-level checks run.
    pub max_quotient_facets: u128,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, restarts: 50, bistellar_budget: 20_000, keep_certificates: false, timing: false, progress: false, max_quotient_facets: 2_000_000 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{group} is a {found}, this check needs a {expected}")]
    KindMismatch { group: String, expected: GroupKind, found: GroupKind },
    #[error("no subgroup of order {0}")]
    NoSubgroup(usize),
    #[error("unknown group {0}")]
    UnknownGroup(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("certificate: {0}")]
    Certificate(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSize {
    pub name: String,
    pub f_vector: Vec<usize>,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRef {
    pub name: String,
    pub kind: String,
    pub complex_digest: String,
    /// Collapse steps or bistellar moves.
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restart: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationSummary {
    pub status: PresentationStatus,
    pub generators_left: usize,
    pub relators_left: usize,
    pub abelianization: Vec<String>,
}

impl From<&PresentationReport> for PresentationSummary {
    fn from(p: &PresentationReport) -> Self {
        PresentationSummary {
            status: p.status,
            generators_left: p.generators_left,
            relators_left: p.relators_left.len(),
            abelianization: p.abelianization.iter().map(|x| x.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    Collapse(CollapseCertificate),
    Bistellar(BistellarCertificate),
}

/// A certificate together with the complex it refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    pub name: String,
    pub n_vertices: usize,
    pub facets: Vec<Vec<u32>>,
    pub certificate: Certificate,
}

impl CertificateFile {
    pub fn new(name: &str, k: &SimplicialComplex, certificate: Certificate) -> Self {
        CertificateFile { schema: CERTIFICATE_SCHEMA.into(), name: name.into(), n_vertices: k.n_vertices(), facets: k.maximal_simplices(), certificate }
    }

    pub fn complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_facets(self.n_vertices, &self.facets)
    }

    pub fn replay(&self, homology_every: Option<usize>) -> Result<(), ReplayFailure> {
        let k = self.complex();
        match &self.certificate {
            Certificate::Collapse(c) => replay_collapse(&k, c, homology_every),
            Certificate::Bistellar(c) => replay_bistellar(&k, c, homology_every),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub scenario: String,
    pub group: String,
    pub order: usize,
    pub kind: GroupKind,
    pub seed: u64,
    pub restarts: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainReport>,
    pub complexes: Vec<ComplexSize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<HomologyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi1: Option<PresentationSummary>,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    pub verdict: QuotientType,
    pub certificates: Vec<CertificateRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<Stage>>,
    #[serde(skip)]
    pub bundles: Vec<CertificateFile>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn certificate(&self, name: &str) -> Option<&CertificateRef> {
        self.certificates.iter().find(|c| c.name == name)
    }

    pub fn complex(&self, name: &str) -> Option<&ComplexSize> {
        self.complexes.iter().find(|c| c.name == name)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} / {}\n", self.scenario, self.group);
        let _ = writeln!(s, "order {}, {}, seed {}, restarts {}\n", self.order, self.kind, self.seed, self.restarts);
        let _ = writeln!(s, "verdict: **{:?}**\n", self.verdict);
        if let Some(h) = &self.homology {
            let _ = writeln!(s, "homology: {}\n", h.summary);
        }
        if let Some(p) = &self.pi1 {
            let _ = writeln!(s, "edge-path group: {:?}, {} generators left, abelianization {:?}\n", p.status, p.generators_left, p.abelianization);
        }
        let _ = writeln!(s, "| check | result | detail |\n|---|---|---|");
        for c in &self.checks {
            let _ = writeln!(s, "| {} | {} | {} |", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
        }
        if !self.observations.is_empty() {
            let _ = writeln!(s, "\n| observation | value |\n|---|---|");
            for o in &self.observations {
                let _ = writeln!(s, "| {} | {} |", o.name, o.value);
            }
        }
        let _ = writeln!(s, "\n| complex | f-vector |\n|---|---|");
        for c in &self.complexes {
            let _ = writeln!(s, "| {} | {:?} |", c.name, c.f_vector);
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(s, "\n| certificate | kind | length | restart |\n|---|---|---|---|");
            for c in &self.certificates {
                let r = c.restart.map(|r| r.to_string()).unwrap_or_default();
                let _ = writeln!(s, "| {} | {} | {} | {} |", c.name, c.kind, c.length, r);
            }
        }
        if let Some(st) = &self.stages {
            let _ = writeln!(s, "\n| stage | ms |\n|---|---|");
            for x in st {
                let _ = writeln!(s, "| {} | {} |", x.name, x.ms);
            }
        }
        s
    }
}

struct Recorder<'o> {
    report: VerificationReport,
    opts: &'o Options,
    last: Instant,
}

impl<'o> Recorder<'o> {
    fn new(scenario: &str, g: &FiniteMatrixGroup, kind: GroupKind, opts: &'o Options) -> Self {
        Recorder {
            report: VerificationReport {
                schema: REPORT_SCHEMA.into(),
                scenario: scenario.into(),
                group: g.name().into(),
                order: g.order(),
                kind,
                seed: opts.seed,
                restarts: opts.restarts,
                domain: None,
                complexes: Vec::new(),
                homology: None,
                pi1: None,
                checks: Vec::new(),
                observations: Vec::new(),
                verdict: QuotientType::Unknown,
                certificates: Vec::new(),
                stages: opts.timing.then(Vec::new),
                bundles: Vec::new(),
            },
            opts,
            last: Instant::now(),
        }
    }

    fn stage(&mut self, name: &str) {
        if self.opts.progress {
            eprintln!("[{}] {name}: {} ms", self.report.scenario, self.last.elapsed().as_millis());
        }
        if let Some(st) = &mut self.report.stages {
            st.push(Stage { name: name.into(), ms: self.last.elapsed().as_millis() });
        }
        self.last = Instant::now();
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> bool {
        self.report.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        passed
    }

    fn observe(&mut self, name: &str, value: impl Into<String>) {
        self.report.observations.push(Observation { name: name.into(), value: value.into() });
    }

    fn complex(&mut self, name: &str, k: &SimplicialComplex) {
        self.report.complexes.push(ComplexSize { name: name.into(), f_vector: k.f_vector(), digest: complex_digest(k) });
    }

    fn collapse(&mut self, name: &str, k: &SimplicialComplex, c: &CollapseCertificate) {
        self.report.certificates.push(CertificateRef {
            name: name.into(),
            kind: if c.punctured.is_empty() { "collapse".into() } else { "punctured collapse".into() },
            complex_digest: c.complex_digest.clone(),
            length: c.steps.len(),
            restart: Some(c.restart),
        });
        if self.opts.keep_certificates {
            self.report.bundles.push(CertificateFile::new(name, k, Certificate::Collapse(c.clone())));
        }
    }

    /// Records the certificate of `v` and a check that it is certified.
    fn verdict(&mut self, name: &str, k: &SimplicialComplex, v: &Verdict) -> bool {
        if let Some(c) = &v.collapse {
            self.collapse(name, k, c);
        }
        if let Some(c) = &v.bistellar {
            self.report.certificates.push(CertificateRef {
                name: name.into(),
                kind: "bistellar".into(),
                complex_digest: c.complex_digest.clone(),
                length: c.moves.len(),
                restart: None,
            });
            if self.opts.keep_certificates {
                self.report.bundles.push(CertificateFile::new(name, k, Certificate::Bistellar(c.clone())));
            }
        }
        let detail = match &v.manifold {
            Some(m) => format!("{:?} via {}; {} interior and {} boundary vertices", v.status, v.method, m.interior_vertices, m.boundary_vertices),
            None => format!("{:?} via {}", v.status, v.method),
        };
        self.check(name, v.certified(), detail)
    }

    fn homology(&mut self, h: &HomologyResult) {
        self.report.homology = Some(h.into());
    }

    fn finish(mut self, verdict: QuotientType) -> VerificationReport {
        self.report.verdict = if self.report.passed() { verdict } else { QuotientType::Unknown };
        self.report
    }
}

fn require(g: &FiniteMatrixGroup, expected: GroupKind) -> Result<GroupKind, PipelineError> {
    let found = classify_group(g).kind;
    if found != expected {
        return Err(PipelineError::KindMismatch { group: g.name().into(), expected, found });
    }
    Ok(found)
}

/// Renumbers `facets` onto their used vertices; returns the complex and the
/// map from new to old vertex ids.
pub fn renumber(facets: &[Vec<u32>]) -> (SimplicialComplex, Vec<u32>) {
    let mut used: Vec<u32> = facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let pos: HashMap<u32, u32> = used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let k = SimplicialComplex::from_facets(used.len(), facets.iter().map(|f| f.iter().map(|v| pos[v]).collect::<Vec<u32>>()));
    (k, used)
}

fn map_facets(facets: &[Vec<u32>], m: &[u32]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = facets
        .iter()
        .map(|f| {
            let mut t: Vec<u32> = f.iter().map(|&v| m[v as usize]).collect();
            t.sort_unstable();
            t
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Reflection group `W`: the domain is a simplicial chamber, `S/W` is a ball,
/// its double is a sphere, and `S/W+` has sphere homology and is a sphere.
pub fn verify_reflection_group(g: &FiniteMatrixGroup, v0: Option<&ExactVector>, opts: &Options) -> Result<VerificationReport, PipelineError> {
    let kind = require(g, GroupKind::ReflectionGroup)?;
    let mut rec = Recorder::new("reflection", g, kind, opts);
    let q = DomainQuotient::new(g, v0)?;
    let sphere_dim = g.dim() - 1;
    if let Some(p) = &q.part {
        let cone = &p.domain.cone;
        rec.check("domain is a simplicial cone", cone.is_simplex_cone(), format!("{} rays, {} facets", cone.rays().len(), cone.facets().len()));
        let ids = boundary_identifications(g, &p.domain)?;
        let mirrors = ids.iter().all(|i| i.facet == i.partner && g.is_reflection(i.element));
        rec.check("each facet is fixed by a reflection", mirrors, format!("{} pairings", ids.len()));
        rec.check("nothing on the domain is identified", q.x.f_vector() == p.s.f_vector(), format!("{:?}", q.x.f_vector()));
        rec.report.domain = Some(domain_report(g, &p.domain)?);
    } else {
        rec.observe("domain", "not pointed, cross-polytope used");
    }
    rec.complex("K", &q.k);
    rec.complex("X", &q.x);
    rec.stage("quotient");
    rec.check("quotient has mirror facets", !q.mirror_facets().is_empty(), "");
    let hx = homology(&q.x)?;
    rec.check("quotient is acyclic", hx.is_acyclic(), hx.summary());
    rec.homology(&hx);
    rec.stage("homology");
    let vb = verdict_ball(&q.x, opts.restarts, opts.seed);
    rec.verdict("quotient is a ball", &q.x, &vb);
    rec.stage("ball");
    let dbl = double_along_boundary(&q.x).map_err(|e| PipelineError::Certificate(e.to_string()))?;
    rec.complex("double", &dbl.complex);
    let hd = homology(&dbl.complex)?;
    rec.check("double has sphere homology", hd.is_sphere_homology(sphere_dim), hd.summary());
    let vd = verdict_sphere(&dbl.complex, opts.restarts, opts.bistellar_budget, opts.seed);
    rec.verdict("double is a sphere", &dbl.complex, &vd);
    rec.stage("double");
    let h = g.orientation_subgroup();
    let gp = g.subgroup_as_group(&h).with_name(format!("{}+", g.name()));
    rec.check("rotation subgroup has index 2", 2 * gp.order() == g.order(), format!("order {}", gp.order()));
    let qp = DomainQuotient::new(&gp, None)?;
    rec.complex("X+", &qp.x);
    let hp = homology(&qp.x)?;
    rec.check("rotation quotient has sphere homology", hp.is_sphere_homology(sphere_dim), hp.summary());
    let vp = verdict_sphere(&qp.x, opts.restarts, opts.bistellar_budget, opts.seed);
    rec.verdict("rotation quotient is a sphere", &qp.x, &vp);
    rec.stage("rotation subgroup");
    Ok(rec.finish(QuotientType::Ball))
}

/// Rotation group: `S/G` has no boundary, has sphere homology and is a sphere.
pub fn verify_rotation_quotient(g: &FiniteMatrixGroup, v0: Option<&ExactVector>, opts: &Options) -> Result<VerificationReport, PipelineError> {
    let kind = require(g, GroupKind::RotationGroup)?;
    let mut rec = Recorder::new("rotation", g, kind, opts);
    let q = DomainQuotient::new(g, v0)?;
    if let Some(p) = &q.part {
        rec.report.domain = Some(domain_report(g, &p.domain)?);
    }
    rec.complex("K", &q.k);
    rec.complex("X", &q.x);
    rec.stage("quotient");
    let sphere_dim = g.dim() - 1;
    rec.check("no mirror facets", q.mirror_facets().is_empty(), "");
    rec.check("quotient has empty boundary", q.x.boundary().is_empty(), "");
    let hx = homology(&q.x)?;
    rec.check("quotient has sphere homology", hx.is_sphere_homology(sphere_dim), hx.summary());
    rec.homology(&hx);
    rec.stage("homology");
    let p = edge_path_presentation(&q.x)?;
    let pi_ok = if sphere_dim >= 2 { p.status == PresentationStatus::TrivialCertified } else { p.abelianization.len() == 1 };
    rec.check("edge-path group matches a sphere", pi_ok, format!("{:?}", p.status));
    rec.report.pi1 = Some((&p).into());
    rec.stage("edge-path group");
    let v = verdict_sphere(&q.x, opts.restarts, opts.bistellar_budget, opts.seed);
    rec.verdict("quotient is a sphere", &q.x, &v);
    rec.stage("sphere");
    Ok(rec.finish(QuotientType::Sphere))
}

/// Kind-agnostic analysis: homology, edge-path group, boundary and a ball or
/// sphere recognition attempt. Reports `Unknown` unless a certificate is found.
pub fn analyze_quotient(g: &FiniteMatrixGroup, v0: Option<&ExactVector>, opts: &Options) -> Result<VerificationReport, PipelineError> {
    let cls = classify_group(g);
    let mut rec = Recorder::new("analyze", g, cls.kind, opts);
    let q = DomainQuotient::new(g, v0)?;
    if let Some(p) = &q.part {
        rec.report.domain = Some(domain_report(g, &p.domain)?);
    }
    rec.complex("K", &q.k);
    rec.complex("X", &q.x);
    rec.stage("quotient");
    let hx = homology(&q.x)?;
    rec.homology(&hx);
    rec.stage("homology");
    let p = edge_path_presentation(&q.x)?;
    rec.report.pi1 = Some((&p).into());
    rec.stage("edge-path group");
    let bd = !q.x.boundary().is_empty();
    rec.observe("boundary", if bd { "nonempty" } else { "empty" });
    let (v, t) = if bd {
        (verdict_ball(&q.x, opts.restarts, opts.seed), QuotientType::Ball)
    } else {
        (verdict_sphere(&q.x, opts.restarts, opts.bistellar_budget, opts.seed), QuotientType::Sphere)
    };
    let name = if bd { "ball recognition" } else { "sphere recognition" };
    let certified = v.certified();
    rec.observe(name, format!("{:?} via {}", v.status, v.method));
    if certified {
        rec.verdict(name, &q.x, &v);
    }
    rec.stage("recognition");
    Ok(rec.finish(if certified { t } else { QuotientType::Unknown }))
}

/// The converse direction: boundary appears exactly when reflections are
/// present, stabilizers are compared with the reflection-rotation closure,
/// and a group outside that class must not receive a sphere or ball certificate.
pub fn verify_only_if(g: &FiniteMatrixGroup, v0: Option<&ExactVector>, opts: &Options) -> Result<VerificationReport, PipelineError> {
    let cls = classify_group(g);
    let mut rec = Recorder::new("only-if", g, cls.kind, opts);
    let rr = rr_normal_closure(g)?;
    let is_rr = cls.kind != GroupKind::NotRR;
    rec.check("rr-closure is everything exactly for rr groups", (rr.order() == g.order()) == is_rr, format!("closure of order {}", rr.order()));
    let v0 = match v0 {
        Some(v) => v.clone(),
        None => default_base_point(g)?,
    };
    let q = match dirichlet_domain(g, &v0) {
        Ok(d) => {
            let sc = DomainScaffold::new(g, d)?;
            let size = sc.second_subdivision_size();
            if size > opts.max_quotient_facets {
                let mirrors = sc.mirror_facets();
                rec.complex("K", &sc.k);
                rec.complex("sd T", &sc.sd1);
                rec.check(
                    "boundary is nonempty exactly when reflections are present",
                    mirrors.is_empty() != (cls.reflections > 0),
                    format!("{} mirror facets, {} reflections", mirrors.len(), cls.reflections),
                );
                rec.observe("quotient complex", format!("not built: sd^2 T has {size} top simplices, limit {}", opts.max_quotient_facets));
                rec.stage("domain");
                return Ok(rec.finish(QuotientType::Unknown));
            }
            DomainQuotient::from_scaffold(sc)
        }
        Err(PolytopeError::NotPointed) => DomainQuotient::fallback(g)?,
        Err(e) => return Err(e.into()),
    };
    rec.complex("K", &q.k);
    rec.complex("X", &q.x);
    rec.stage("quotient");
    let mirrors = q.mirror_facets();
    let refl = cls.reflections > 0;
    rec.check(
        "boundary is nonempty exactly when reflections are present",
        mirrors.is_empty() != refl,
        format!("{} mirror facets, {} reflections", mirrors.len(), cls.reflections),
    );
    let bd = !q.x.boundary().is_empty();
    rec.check("boundary of the quotient complex agrees", bd == !mirrors.is_empty(), format!("boundary {}", if bd { "nonempty" } else { "empty" }));
    let stabs = q.vertex_stabilizers();
    let outside = stabs.iter().filter(|s| s.iter().any(|&h| !rr.contains(h))).count();
    let free = stabs.iter().filter(|s| s.len() == 1).count();
    rec.observe("vertex stabilizers outside the rr-closure", format!("{outside} of {} vertices", stabs.len()));
    rec.observe("vertices with trivial stabilizer", format!("{free} of {}", stabs.len()));
    let hx = homology(&q.x)?;
    rec.homology(&hx);
    rec.stage("homology");
    let (v, t) = if bd {
        (verdict_ball(&q.x, opts.restarts, opts.seed), QuotientType::Ball)
    } else {
        (verdict_sphere(&q.x, opts.restarts, opts.bistellar_budget, opts.seed), QuotientType::Sphere)
    };
    rec.stage("recognition");
    if is_rr {
        rec.verdict(if bd { "quotient is a ball" } else { "quotient is a sphere" }, &q.x, &v);
        Ok(rec.finish(t))
    } else {
        let p = edge_path_presentation(&q.x)?;
        rec.report.pi1 = Some((&p).into());
        rec.check("edge-path group is not certified trivial", p.status != PresentationStatus::TrivialCertified, format!("{:?}", p.status));
        rec.check("no sphere or ball certificate", !v.certified(), format!("{:?} via {}", v.status, v.method));
        Ok(rec.finish(QuotientType::Neither))
    }
}

/// First subgroup of the given order generated by one or two elements, scanning
/// generator pairs in index order.
pub fn find_subgroup(g: &FiniteMatrixGroup, order: usize) -> Option<Subgroup> {
    if !g.order().is_multiple_of(order) {
        return None;
    }
    for a in 0..g.order() {
        let h = g.subgroup_generated(&[a]);
        if h.order() == order {
            return Some(h);
        }
    }
    for a in 0..g.order() {
        for b in a + 1..g.order() {
            let h = g.subgroup_generated(&[a, b]);
            if h.order() == order {
                return Some(h);
            }
        }
    }
    None
}

/// Transfer: `H_i(S/G) = 0` predicted from subgroups of coprime indices with
/// `H_i(S/H) = 0`, compared with the direct computation.
pub fn verify_transfer(g: &FiniteMatrixGroup, subgroup_orders: &[usize], degree: usize, opts: &Options) -> Result<VerificationReport, PipelineError> {
    let cls = classify_group(g);
    let mut rec = Recorder::new("transfer", g, cls.kind, opts);
    let mut results: Vec<(u64, HomologyResult)> = Vec::new();
    for &o in subgroup_orders {
        let h = find_subgroup(g, o).ok_or(PipelineError::NoSubgroup(o))?;
        let gh = g.subgroup_as_group(&h).with_name(format!("H{o}"));
        let qh = DomainQuotient::new(&gh, None)?;
        let hh = homology(&qh.x)?;
        let index = (g.order() / o) as u64;
        rec.complex(&format!("X/H{o}"), &qh.x);
        rec.observe(&format!("subgroup of order {o}"), format!("index {index}, homology {}", hh.summary()));
        results.push((index, hh));
    }
    rec.stage("subgroups");
    let refs: Vec<(u64, &HomologyResult)> = results.iter().map(|(i, h)| (*i, h)).collect();
    let predicted = transfer_criterion(&refs, degree);
    let q = DomainQuotient::new(g, None)?;
    rec.complex("X", &q.x);
    let hx = homology(&q.x)?;
    let direct = hx.is_zero(degree);
    rec.check(&format!("criterion predicts H_{degree} = 0"), predicted, format!("indices {:?}", refs.iter().map(|r| r.0).collect::<Vec<_>>()));
    rec.check("direct computation agrees", !predicted || direct, hx.summary());
    rec.homology(&hx);
    rec.stage("direct");
    Ok(rec.finish(QuotientType::Unknown))
}

/// The M(R5) run: domain, `X = S/~`, the collar `N = p(A)` of the image of the
/// domain boundary and the complementary ball `B`; `N` is collapsed to a point
/// through the image of the boundary, `B` is a ball, and `X = N ∪ B`.
pub fn verify_r5(opts: &Options) -> Result<VerificationReport, PipelineError> {
    let entry = lookup("M(R5)").ok_or_else(|| PipelineError::UnknownGroup("M(R5)".into()))?;
    let g = entry.build()?;
    let kind = require(&g, GroupKind::RotationGroup)?;
    let mut rec = Recorder::new("r5", &g, kind, opts);
    let q = DomainQuotient::new(&g, entry.base_point.as_ref())?;
    let p = q.part.as_ref().ok_or(PipelineError::Polytope(PolytopeError::NotPointed))?;
    let dr = domain_report(&g, &p.domain)?;
    rec.check("domain has 8 facets", dr.facets.len() == 8, format!("{} facets, {} rays", dr.facets.len(), dr.rays.len()));
    rec.report.domain = Some(dr);
    rec.stage("domain");
    let (s, x) = (&p.s, &q.x);
    rec.complex("K", &q.k);
    rec.complex("T", &p.t);
    rec.complex("S", s);
    rec.complex("X", x);
    rec.stage("quotient");

    let keep_bd = &p.s_boundary;
    let sb_facets: Vec<Vec<u32>> = s.full_subcomplex(keep_bd).maximal_simplices().into_iter().filter(|f| keep_bd[f[0] as usize]).collect();
    let a_facets: Vec<Vec<u32>> = s.maximal_simplices().into_iter().filter(|f| f.iter().any(|&v| keep_bd[v as usize])).collect();
    let off: Vec<bool> = keep_bd.iter().map(|b| !b).collect();
    let b_facets: Vec<Vec<u32>> = s.full_subcomplex(&off).maximal_simplices().into_iter().filter(|f| off[f[0] as usize]).collect();

    // A collapses onto Sb inside S
    let (a, a_back) = renumber(&a_facets);
    let a_pos: HashMap<u32, u32> = a_back.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let l: Vec<Vec<u32>> = sb_facets.iter().map(|f| f.iter().map(|v| a_pos[v]).collect()).collect();
    rec.complex("A", &a);
    let ca = match greedy_collapse(&a, &CollapseTarget::Subcomplex(l.clone()), opts.restarts, opts.seed) {
        CollapseOutcome::Certified(c) => c,
        CollapseOutcome::Inconclusive { restarts, best_remaining } => {
            rec.check("A collapses onto the domain boundary", false, format!("{restarts} restarts, {best_remaining} simplices left"));
            return Ok(rec.finish(QuotientType::Unknown));
        }
    };
    rec.check("A collapses onto the domain boundary", true, format!("{} steps", ca.steps.len()));
    rec.collapse("A to boundary", &a, &ca);
    rec.stage("collapse A");

    // push it forward to N = p(A), which collapses onto Q = p(Sb)
    let proj = &p.projection;
    let n_facets_x = map_facets(&a_facets, proj);
    let (n, n_back) = renumber(&n_facets_x);
    let n_pos: HashMap<u32, u32> = n_back.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let p_an: Vec<u32> = a_back.iter().map(|&v| n_pos[&proj[v as usize]]).collect();
    rec.complex("N", &n);
    let cn = induced_collapse(&a, &n, &p_an, &l, &ca).map_err(|e| PipelineError::Certificate(e.to_string()))?;
    rec.check("collapse pushes forward to N onto Q", true, format!("{} steps", cn.steps.len()));
    rec.collapse("N to Q", &n, &cn);
    rec.stage("induced collapse");

    let (qc, q_back) = renumber(&cn.terminal);
    rec.complex("Q", &qc);
    let cq = match greedy_collapse(&qc, &CollapseTarget::Point, opts.restarts, opts.seed) {
        CollapseOutcome::Certified(c) => c,
        CollapseOutcome::Inconclusive { restarts, best_remaining } => {
            rec.check("Q collapses to a point", false, format!("{restarts} restarts, {best_remaining} simplices left"));
            return Ok(rec.finish(QuotientType::Unknown));
        }
    };
    rec.check("Q collapses to a point", true, format!("restart {}, {} steps", cq.restart, cq.steps.len()));
    rec.collapse("Q to point", &qc, &cq);
    let lift = |s: &Vec<u32>| -> Vec<u32> {
        let mut t: Vec<u32> = s.iter().map(|&v| q_back[v as usize]).collect();
        t.sort_unstable();
        t
    };
    let mut steps = cn.steps.clone();
    steps.extend(cq.steps.iter().map(|(f, c)| (lift(f), lift(c))));
    let full = CollapseCertificate {
        complex_digest: complex_digest(&n),
        f_vector: n.f_vector(),
        punctured: Vec::new(),
        steps,
        terminal: cq.terminal.iter().map(lift).collect(),
        seed: opts.seed,
        restart: cq.restart,
    };
    let replayed = replay_collapse(&n, &full, None);
    let detail = match &replayed {
        Ok(()) => format!("{} steps replayed", full.steps.len()),
        Err(e) => format!("replay failed: {e}"),
    };
    rec.check("N collapses to a point", replayed.is_ok() && full.terminal_is_point(), detail);
    rec.collapse("N to point", &n, &full);
    rec.stage("collapse Q");

    let mn = manifold_check(&n, opts.seed);
    rec.check("N is a manifold with boundary", mn.manifold && mn.boundary_vertices > 0, format!("{} interior, {} boundary vertices", mn.interior_vertices, mn.boundary_vertices));
    rec.stage("manifold N");

    let (b, _) = renumber(&b_facets);
    rec.complex("B", &b);
    let vb = verdict_ball(&b, opts.restarts, opts.seed);
    rec.verdict("B is a ball", &b, &vb);
    rec.stage("ball B");

    let n_in_x = x.subcomplex(&n_facets_x);
    let b_in_x = x.subcomplex(map_facets(&b_facets, proj));
    rec.check("X is N and B glued along their common boundary", gluing_matches(x, &n_in_x, &b_in_x), "");
    rec.stage("gluing");

    let hx = homology(x)?;
    rec.check("X has the homology of the 4-sphere", hx.is_sphere_homology(4), hx.summary());
    rec.homology(&hx);
    rec.stage("homology");
    Ok(rec.finish(QuotientType::Sphere))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(name: &str) -> FiniteMatrixGroup {
        lookup(name).unwrap().build().unwrap()
    }

    #[test]
    fn reflection_a2() {
        let r = verify_reflection_group(&group("W(A2)"), None, &Options::default()).unwrap();
        assert!(r.passed(), "{}", r.to_markdown());
        assert_eq!(r.verdict, QuotientType::Ball);
    }

    #[test]
    fn kind_mismatch() {
        let e = verify_reflection_group(&group("W+(A3)"), None, &Options::default()).unwrap_err();
        assert!(matches!(e, PipelineError::KindMismatch { found: GroupKind::RotationGroup, .. }));
        let e = verify_rotation_quotient(&group("W(A2)"), None, &Options::default()).unwrap_err();
        assert!(matches!(e, PipelineError::KindMismatch { .. }));
    }

    #[test]
    fn rotation_a4() {
        let r = verify_rotation_quotient(&group("W+(A3)"), None, &Options::default()).unwrap();
        assert!(r.passed(), "{}", r.to_markdown());
        assert_eq!(r.verdict, QuotientType::Sphere);
    }

    #[test]
    fn report_roundtrip() {
        let opts = Options { keep_certificates: true, ..Options::default() };
        let r = verify_rotation_quotient(&group("D+(3)"), None, &opts).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.schema, REPORT_SCHEMA);
        assert_eq!(back.checks, r.checks);
        assert!(!text.contains("\"stages\""));
        for b in &r.bundles {
            b.replay(Some(5)).unwrap();
        }
    }
}
