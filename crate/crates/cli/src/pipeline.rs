use std::time::Instant;

use sqc_core::convexity::{
    default_rank_tol, find_k, min_hess_defect, numeric_rank, scan_axis_spectrum, search_radius,
    spectrum_samples, HessSearch, KBudget,
};
use sqc_core::matcore::build_base_n;
use sqc_core::tartar::{tartar_suite, TartarConfig};
use sqc_core::torus::{build_bn, check_div_free, choose_epsilon, moments, sq_defect};
use sqc_core::{Error, Extension, ExtensionParams, SpanBasis};

use crate::config::{Format, RunConfig};
use crate::report::{
    spectrum_csv, to_json, to_key_value_csv, BasisCheck, CertificateReport, ConvexityCheck,
    DefectRecord, FindKRecord, SpectrumRecord, TartarRecord, ToolInfo, Verdict, SCHEMA,
};

/// Tolerance on the smallest second derivative for convexity to count.
pub const CONVEXITY_TOL: f64 = 1e-8;
/// Accuracy of the exact quadrature; the defect must be below `−10×` this.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// What a subcommand produced: the record text and the process exit code.
#[derive(Clone, Debug)]
pub struct Output {
    pub text: String,
    /// Human-readable summary for stderr, if any.
    pub summary: Option<String>,
    pub exit_code: i32,
}

impl Output {
    fn new(text: String, passed: bool) -> Self {
        Self {
            text,
            summary: None,
            exit_code: if passed { 0 } else { 1 },
        }
    }
}

fn render<T: serde::Serialize>(cfg: &RunConfig, record: &T) -> String {
    match cfg.format {
        Format::Json => to_json(record),
        Format::Csv => to_key_value_csv(record),
    }
}

fn basis_of(cfg: &RunConfig) -> Result<SpanBasis, Error> {
    let rule = cfg
        .diag_rule()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    build_base_n(cfg.n, cfg.m, &rule)
}

pub fn rank_tolerance(cfg: &RunConfig) -> f64 {
    default_rank_tol(cfg.m, cfg.n)
}

/// Spectrum minima at or below this are indistinguishable from rank loss.
pub fn spectrum_threshold(cfg: &RunConfig) -> f64 {
    10.0 * rank_tolerance(cfg)
}

fn basis_check(basis: &SpanBasis, cfg: &RunConfig) -> BasisCheck {
    let tol = rank_tolerance(cfg);
    let ranks = [0, 1, 2].map(|i| numeric_rank(basis.generator(i), tol));
    BasisCheck {
        ranks,
        rank_tolerance: tol,
        gram: basis.gram(),
        all_rank_deficient: ranks.iter().all(|r| *r < cfg.n),
    }
}

fn k_budget(cfg: &RunConfig) -> KBudget {
    KBudget {
        samples: cfg.samples,
        restarts: cfg.restarts,
        seed: cfg.seed,
        ..KBudget::default()
    }
}

/// Independent re-run of the Hessian search at `k` with the next seed.
fn convexity_check(basis: &SpanBasis, cfg: &RunConfig, epsilon: f64, k: f64) -> Result<ConvexityCheck, Error> {
    let ext = Extension::new(basis, ExtensionParams::new(epsilon, k)?);
    let search = HessSearch {
        search_radius: search_radius(basis, epsilon),
        samples: cfg.samples,
        restarts: cfg.restarts,
        seed: cfg.seed.wrapping_add(1),
    };
    let found = min_hess_defect(&ext, &search)?;
    Ok(ConvexityCheck {
        k,
        seed: search.seed,
        samples: search.samples,
        restarts: search.restarts,
        search_radius: search.search_radius,
        min_defect: found.value,
        tolerance: CONVEXITY_TOL,
    })
}

fn epsilon_for(
    cfg: &RunConfig,
    basis: &SpanBasis,
) -> Result<(f64, &'static str), Error> {
    match cfg.epsilon {
        Some(e) => Ok((e, "override")),
        None => Ok((choose_epsilon(&build_bn(basis), basis, cfg.safety)?, "choose_epsilon")),
    }
}

/// An error that must abort the run instead of being folded into a verdict.
fn is_fatal(e: &Error) -> bool {
    matches!(e, Error::Inexact { .. })
}

/// Runs every stage and assembles the certificate.
///
/// Stage errors produce a `failed` verdict naming the stage; quadrature
/// exactness errors are returned instead, since no verdict can be trusted.
pub fn run_certify(cfg: &RunConfig) -> Result<CertificateReport, Error> {
    let start = Instant::now();
    let mut report = CertificateReport {
        schema: SCHEMA,
        tool: ToolInfo::default(),
        config: cfg.clone(),
        basis_check: None,
        spectrum: None,
        divergence_free: None,
        moments: None,
        epsilon: None,
        epsilon_source: None,
        k_search: None,
        k: None,
        convexity_check: None,
        convexity_min_defect: None,
        sq_defect: None,
        verdict: Verdict::Failed,
        failed_stage: None,
        failed_conditions: Vec::new(),
        wall_time_s: 0.0,
    };
    match certify_stages(cfg, &mut report) {
        Ok(()) => {}
        Err((_, e)) if is_fatal(&e) => return Err(e),
        Err((stage, e)) => {
            report.verdict = Verdict::Failed;
            report.failed_stage = Some(stage.to_string());
            report.failed_conditions.push(e.to_string());
        }
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

type StageResult = Result<(), (&'static str, Error)>;

fn certify_stages(cfg: &RunConfig, r: &mut CertificateReport) -> StageResult {
    fn at<T>(stage: &'static str, v: Result<T, Error>) -> Result<T, (&'static str, Error)> {
        v.map_err(|e| (stage, e))
    }
    // definite refutations fail the run; sampling shortfalls leave it open
    let mut refuted = Vec::new();
    let mut open = Vec::new();

    let basis = at("build_basis", basis_of(cfg))?;
    let bc = basis_check(&basis, cfg);
    if !bc.all_rank_deficient {
        refuted.push(format!("generator ranks {:?} not all <= n - 1", bc.ranks));
    }
    r.basis_check = Some(bc);

    let spec = at(
        "rank_spectrum",
        scan_axis_spectrum(&basis, cfg.grid_resolution, cfg.exclusion_radius),
    )?;
    if spec.min_sigma_n <= spectrum_threshold(cfg) {
        open.push(format!(
            "min sigma_n {:e} not above {:e}",
            spec.min_sigma_n,
            spectrum_threshold(cfg)
        ));
    }
    r.spectrum = Some(spec);

    let field = build_bn(&basis);
    let div_free = check_div_free(&field);
    if !div_free {
        refuted.push("field is not divergence-free".into());
    }
    r.divergence_free = Some(div_free);
    r.moments = Some(at("moments", moments(&field, &basis, cfg.nodes_per_axis))?);

    let (epsilon, source) = at("choose_epsilon", epsilon_for(cfg, &basis))?;
    r.epsilon = Some(epsilon);
    r.epsilon_source = Some(source);

    let k = match cfg.k {
        Some(k) => k,
        None => {
            let ks = at("find_k", find_k(&basis, epsilon, CONVEXITY_TOL, &k_budget(cfg)))?;
            if !ks.success {
                open.push("k search did not reach the convexity tolerance".into());
            }
            let k = ks.k;
            r.k_search = Some(ks);
            k
        }
    };
    r.k = Some(k);

    let check = at("convexity_check", convexity_check(&basis, cfg, epsilon, k))?;
    if check.min_defect < -CONVEXITY_TOL {
        open.push(format!(
            "second derivative {:e} below -{:e} at k = {k}",
            check.min_defect, CONVEXITY_TOL
        ));
    }
    r.convexity_min_defect = Some(check.min_defect);
    r.convexity_check = Some(check);

    let params = at("sq_defect", ExtensionParams::new(epsilon, k))?;
    let d = at("sq_defect", sq_defect(&basis, params, &field, cfg.nodes_per_axis))?;
    if d.defect >= -10.0 * QUADRATURE_TOL {
        refuted.push(format!("defect {:e} is not negative", d.defect));
    }
    r.sq_defect = Some(d);

    r.verdict = if !refuted.is_empty() {
        r.failed_stage = Some("verdict".into());
        Verdict::Failed
    } else if !open.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::CounterexampleCertified
    };
    r.failed_conditions = refuted.into_iter().chain(open).collect();
    Ok(())
}

pub fn certify(cfg: &RunConfig) -> Result<Output, Error> {
    let report = run_certify(cfg)?;
    let mut out = Output::new(
        render(cfg, &report),
        report.verdict == Verdict::CounterexampleCertified,
    );
    out.summary = Some(format!(
        "verdict: {}",
        serde_json::to_value(report.verdict).expect("enum serializes")
    ));
    Ok(out)
}

pub fn rank_spectrum(cfg: &RunConfig) -> Result<Output, Error> {
    let basis = basis_of(cfg)?;
    let bc = basis_check(&basis, cfg);
    let spectrum = scan_axis_spectrum(&basis, cfg.grid_resolution, cfg.exclusion_radius)?;
    let passed = bc.all_rank_deficient && spectrum.min_sigma_n > spectrum_threshold(cfg);
    let summary = format!(
        "ranks {:?}; admissible points {}; grid min sigma_n {:.6e}; refined min sigma_n {:.6e} at {:?}; axis sigma_n {:?}",
        bc.ranks,
        spectrum.admissible_points,
        spectrum.grid_min_sigma_n,
        spectrum.min_sigma_n,
        spectrum.argmin_alpha,
        spectrum.axis_sigmas
    );
    let text = match cfg.format {
        Format::Csv => spectrum_csv(&spectrum_samples(
            &basis,
            cfg.grid_resolution,
            cfg.exclusion_radius,
        )?),
        Format::Json => to_json(&SpectrumRecord {
            schema: SCHEMA,
            kind: "rank-spectrum",
            config: cfg.clone(),
            basis_check: bc,
            spectrum,
        }),
    };
    let mut out = Output::new(text, passed);
    out.summary = Some(summary);
    Ok(out)
}

pub fn find_k_stage(cfg: &RunConfig) -> Result<Output, Error> {
    let basis = basis_of(cfg)?;
    let (epsilon, epsilon_source) = epsilon_for(cfg, &basis)?;
    let k_search = find_k(&basis, epsilon, CONVEXITY_TOL, &k_budget(cfg))?;
    let recheck = convexity_check(&basis, cfg, epsilon, k_search.k)?;
    let passed = k_search.success && recheck.min_defect >= -CONVEXITY_TOL;
    let record = FindKRecord {
        schema: SCHEMA,
        kind: "find-k",
        config: cfg.clone(),
        epsilon,
        epsilon_source,
        k_search,
        recheck,
    };
    Ok(Output::new(render(cfg, &record), passed))
}

/// The defect does not depend on `k` for fields with values in the span, so
/// `k` defaults to 0 here rather than running the search.
pub fn defect_stage(cfg: &RunConfig) -> Result<Output, Error> {
    let basis = basis_of(cfg)?;
    let field = build_bn(&basis);
    let divergence_free = check_div_free(&field);
    let mo = moments(&field, &basis, cfg.nodes_per_axis)?;
    let (epsilon, epsilon_source) = epsilon_for(cfg, &basis)?;
    let params = ExtensionParams::new(epsilon, cfg.k.unwrap_or(0.0))?;
    let d = sq_defect(&basis, params, &field, cfg.nodes_per_axis)?;
    let passed = divergence_free && d.defect < -10.0 * QUADRATURE_TOL;
    let record = DefectRecord {
        schema: SCHEMA,
        kind: "defect",
        config: cfg.clone(),
        divergence_free,
        moments: mo,
        epsilon_source,
        sq_defect: d,
    };
    Ok(Output::new(render(cfg, &record), passed))
}

pub fn tartar_stage(cfg: &RunConfig, fields: usize, forms: usize) -> Result<Output, Error> {
    let tc = TartarConfig {
        m: cfg.m,
        n: cfg.n,
        forms,
        samples: cfg.samples,
        fields,
        seed: cfg.seed,
        ..TartarConfig::default()
    };
    let summary = tartar_suite(&tc)?;
    let passed = summary.violations == 0 && summary.control_violations == 0;
    let note = format!(
        "{} of {} forms accepted ({} indefinite); {} violations; {} control violations",
        summary.accepted, forms, summary.accepted_indefinite, summary.violations, summary.control_violations
    );
    let record = TartarRecord {
        schema: SCHEMA,
        kind: "tartar-check",
        config: cfg.clone(),
        summary,
    };
    let mut out = Output::new(render(cfg, &record), passed);
    out.summary = Some(note);
    Ok(out)
}
