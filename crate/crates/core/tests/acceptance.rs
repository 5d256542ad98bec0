//! One line per acceptance criterion. Tolerances are pinned here: every
//! comparison is exact, and the time limits are the stated desk-scale bounds.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use orbiquot::catalog::{catalog, lookup, QuotientType};
use orbiquot::group::{classify_group, orbit_stabilizer, rr_normal_closure, GroupKind};
use orbiquot::homology::{boundary_squares_to_zero, homology, homology_with, verify_homology, HomologyReport, PresentationStatus};
use orbiquot::pipeline::{verify_only_if, verify_r5, verify_reflection_group, verify_transfer, Options, VerificationReport};
use orbiquot::polytope::{default_base_point, dirichlet_domain};
use orbiquot::quotient::DomainQuotient;

const FACET_LIMIT: Duration = Duration::from_secs(60);
const HOMOLOGY_LIMIT: Duration = Duration::from_secs(600);
const PROPERTY_LIMIT: Duration = Duration::from_secs(900);
const MAX_RESTARTS: usize = 50;
const SAMPLES: usize = 1000;

struct Outcome {
    lines: Vec<(bool, String)>,
}

impl Outcome {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: impl AsRef<str>) {
        println!("[{}] {id:>2} {name}: {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
        self.lines.push((pass, name.to_string()));
    }
}

fn is_sphere(h: &HomologyReport, dim: usize) -> bool {
    let mut betti = vec![0; dim + 1];
    betti[0] += 1;
    betti[dim] += 1;
    h.betti == betti && h.torsion.iter().all(Vec::is_empty)
}

fn failed(r: &VerificationReport) -> String {
    let bad: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if bad.is_empty() {
        "all checks pass".into()
    } else {
        format!("failed: {}", bad.join("; "))
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut out = Outcome { lines: Vec::new() };
    let opts = Options { keep_certificates: true, timing: true, restarts: MAX_RESTARTS, ..Options::default() };

    // 1-3: the M(R5) domain against the reference data
    let (g, v0) = common::r5();
    let t = Instant::now();
    let l = common::labelled(&g, &v0);
    let elapsed = t.elapsed();
    let nf = l.domain.cone.facets().len();
    out.line(
        1,
        "R5 facets",
        nf == 8 && common::Labelled::is_bijective(&l.facet_label) && elapsed < FACET_LIMIT,
        format!("{nf} irredundant inequalities, labels {:?}, {} ms (limit {} s)", l.facet_label, elapsed.as_millis(), FACET_LIMIT.as_secs()),
    );
    let nr = l.domain.cone.rays().len();
    out.line(2, "R5 vertices", nr == 8 && common::Labelled::is_bijective(&l.ray_label), format!("{nr} extreme rays, labels {:?}", l.ray_label));
    let comb = l.facet_vertex_sets_match().and_then(|_| l.identifications_match());
    out.line(3, "R5 combinatorics and identifications", comb.is_ok(), comb.err().unwrap_or_else(|| format!("8 facet vertex sets, {} identifications", common::IDENTIFICATIONS.len())));

    // 4-5: the full run
    let r5 = match verify_r5(&opts) {
        Ok(r) => r,
        Err(e) => {
            println!("[FAIL]  4 verify-r5: {e}");
            return ExitCode::FAILURE;
        }
    };
    let q_check = r5.check("Q collapses to a point").is_some_and(|c| c.passed);
    let q_cert = r5.certificate("Q to point");
    let q_replay = r5.bundles.iter().find(|b| b.name == "Q to point").map(|b| b.replay(None));
    out.line(
        4,
        "Q collapsible",
        q_check && q_cert.is_some_and(|c| c.restart.is_some_and(|r| r < MAX_RESTARTS)) && matches!(q_replay, Some(Ok(()))),
        format!(
            "restart {:?} of {MAX_RESTARTS}, {} steps, replay {:?}",
            q_cert.and_then(|c| c.restart),
            q_cert.map_or(0, |c| c.length),
            q_replay.map(|r| r.map_err(|e| e.to_string()))
        ),
    );
    let hms = r5.stages.as_ref().and_then(|s| s.iter().find(|x| x.name == "homology")).map_or(u128::MAX, |s| s.ms);
    let hx = r5.homology.as_ref();
    out.line(
        5,
        "R5 quotient homology",
        hx.is_some_and(|h| is_sphere(h, 4)) && hms < HOMOLOGY_LIMIT.as_millis() && r5.verdict == QuotientType::Sphere,
        format!(
            "{} on X with f-vector {:?}, SNF {hms} ms (limit {} s), verdict {:?}",
            hx.map_or("-".into(), |h| h.summary.clone()),
            hx.map(|h| h.f_vector.clone()).unwrap_or_default(),
            HOMOLOGY_LIMIT.as_secs(),
            r5.verdict
        ),
    );

    // 6: reflection groups
    let mut ok = true;
    let mut detail = Vec::new();
    for name in ["W(A2)", "W(A3)", "W(B3)"] {
        let e = lookup(name).expect("catalog");
        let w = e.build().expect("group");
        match verify_reflection_group(&w, None, &opts) {
            Ok(r) => {
                let cone = r.check("domain is a simplicial cone");
                let facets_n = r.domain.as_ref().is_some_and(|d| d.facets.len() == w.subspace().dim());
                let pass = r.passed() && r.verdict == QuotientType::Ball && cone.is_some_and(|c| c.passed) && facets_n;
                ok &= pass;
                detail.push(format!("{name} {} ({})", if pass { "ok" } else { "bad" }, failed(&r)));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{name}: {e}"));
            }
        }
    }
    out.line(6, "reflection suite", ok, detail.join(", "));

    // 7: converse direction over the catalog
    let mut ok = true;
    let mut detail = Vec::new();
    let mut p_report = None;
    for e in catalog() {
        let h = e.build().expect("group");
        let r = match verify_only_if(&h, e.base_point.as_ref(), &Options { timing: false, ..opts.clone() }) {
            Ok(r) => r,
            Err(err) => {
                ok = false;
                detail.push(format!("{}: {err}", e.name));
                continue;
            }
        };
        if e.expected_kind == GroupKind::NotRR {
            let closure = rr_normal_closure(&h).map(|c| c.order()).unwrap_or(0);
            let pass = closure == 1 && r.check("rr-closure is everything exactly for rr groups").is_some_and(|c| c.passed);
            ok &= pass;
            detail.push(format!("{} rr-closure of order {closure}", e.name));
            p_report = Some(r);
        } else {
            let pass = ["rr-closure is everything exactly for rr groups", "boundary is nonempty exactly when reflections are present"]
                .iter()
                .all(|n| r.check(n).is_some_and(|c| c.passed))
                && r.passed();
            ok &= pass;
            if !pass {
                detail.push(format!("{}: {}", e.name, failed(&r)));
            }
        }
    }
    out.line(7, "only-if suite", ok, format!("{} groups; {}", catalog().len(), detail.join(", ")));

    // 8: negative control
    match &p_report {
        Some(r) => {
            let hp = r.homology.as_ref();
            let pi = r.pi1.as_ref().map(|p| p.status);
            let no_cert = r.check("no sphere or ball certificate").is_some_and(|c| c.passed) && r.certificates.is_empty();
            out.line(
                8,
                "negative control",
                hp.is_some_and(|h| is_sphere(h, 3)) && pi.is_some_and(|s| s != PresentationStatus::TrivialCertified) && no_cert,
                format!("S^3/P homology {}, edge-path group {:?}, certificates {}", hp.map_or("-".into(), |h| h.summary.clone()), pi, r.certificates.len()),
            );
        }
        None => out.line(8, "negative control", false, "no report for the binary icosahedral group"),
    }

    // 9: transfer
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, orders, degree) in [("P", vec![24, 20], 2), ("W+(A3)", vec![3, 4], 1)] {
        let h = lookup(name).expect("catalog").build().expect("group");
        match verify_transfer(&h, &orders, degree, &opts) {
            Ok(r) => {
                let pass = r.passed();
                ok &= pass;
                detail.push(format!("{name} from orders {orders:?}: H_{degree} {}", r.homology.as_ref().map_or("-".into(), |h| h.summary.clone())));
            }
            Err(e) => {
                ok = false;
                detail.push(format!("{name}: {e}"));
            }
        }
    }
    out.line(9, "transfer", ok, detail.join(", "));

    // 10: property suites
    let t = Instant::now();
    let mut problems: Vec<String> = Vec::new();
    let pts = common::sample_points(&g, SAMPLES, 1);
    let v = common::covering_violations(&g, &l.domain, &pts);
    if v > 0 {
        problems.push(format!("{v} covering violations for M(R5)"));
    }
    let mut orbit_checks = 0;
    for e in catalog() {
        let h = e.build().expect("group");
        for x in common::sample_points(&h, 20, 2).iter().chain(l.domain.cone.rays().iter().filter(|_| e.name == "M(R5)")) {
            let os = orbit_stabilizer(&h, x).expect("nonzero");
            orbit_checks += 1;
            if os.orbit.len() * os.stabilizer.order() != h.order() {
                problems.push(format!("orbit-stabilizer fails for {}", e.name));
            }
        }
        if classify_group(&h).kind != e.expected_kind {
            problems.push(format!("{} misclassified", e.name));
        }
    }
    let mut replays = 0;
    for name in ["W(B3)", "W+(A3)", "D+(3)", "I2(5)"] {
        let h = lookup(name).expect("catalog").build().expect("group");
        let base = default_base_point(&h).expect("base point");
        let d = dirichlet_domain(&h, &base).expect("domain");
        let v = common::covering_violations(&h, &d, &common::sample_points(&h, 250, 3));
        if v > 0 {
            problems.push(format!("{v} covering violations for {name}"));
        }
        let q = DomainQuotient::new(&h, None).expect("quotient");
        for dim in 2..=q.x.dim() as usize {
            if !boundary_squares_to_zero(&q.x, dim) {
                problems.push(format!("boundary of boundary nonzero for {name}"));
            }
        }
        let hq = homology_with(&q.x, true).expect("homology");
        if let Err(e) = verify_homology(&q.x, &hq) {
            problems.push(format!("{name}: {e}"));
        }
        replays += hq.certificates.len();
        let hs = homology(&q.x.barycentric_subdivision().0).expect("homology");
        if hs.betti != hq.betti || hs.torsion != hq.torsion {
            problems.push(format!("subdivision changes homology for {name}"));
        }
    }
    for b in &r5.bundles {
        replays += 1;
        if let Err(e) = b.replay(None) {
            problems.push(format!("{} does not replay: {e}", b.name));
        }
    }
    let pt = t.elapsed();
    out.line(
        10,
        "property suites",
        problems.is_empty() && pt < PROPERTY_LIMIT,
        format!(
            "{SAMPLES} R5 samples, {orbit_checks} orbit-stabilizer checks, {replays} certificate replays, {} ms (limit {} s){}",
            pt.as_millis(),
            PROPERTY_LIMIT.as_secs(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    );

    let failed = out.lines.iter().filter(|(p, _)| !p).count();
    println!("{} of {} criteria pass in {} s", out.lines.len() - failed, out.lines.len(), start.elapsed().as_secs());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
