use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;
use transverse_blowup::blowup_surgery::{
    build_surgery_blowup, isotopy_parity, SurgeryBlowupModel, SurgeryError, CORE_GUARD, R_MAX,
};
use transverse_blowup::bw::{
    brute_force_kernel_agrees, brute_force_surjective, product_quotient, verify_exact_sequence,
    BwError,
};
use transverse_blowup::cut::{make_action, make_cut, zero_radius, CutError};
use transverse_blowup::exterior::{
    conformal_check, contact_check, reeb_symbolic_verify, ContactVerdict,
};
use transverse_blowup::models::{
    displacement, make_tube_with, phi_ab, phi_map, psi_squeeze, radial_squeeze, squeeze_radius,
    ModelError,
};
use transverse_blowup::profile::JOINT_TOL;
use transverse_blowup::uniqueness::{
    build_presentation, check_radial, compare_constructions, convex_path, Construction,
    UniquenessError, Verdict, COMPARE_RADIUS,
};
use transverse_blowup::{Env, Expr, TubeModel, ZeroTestConfig};

use crate::report::Check;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Checks and payload produced by one subcommand.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub data: Value,
}

/// Parameter errors from model construction are the caller's fault.
fn model_error(e: ModelError) -> CliError {
    CliError::Usage(e.to_string())
}

fn tube(n: usize, r_min: f64, r_max: f64, cfg: &ZeroTestConfig) -> Result<TubeModel, CliError> {
    make_tube_with(n, r_min, r_max, cfg).map_err(model_error)
}

fn contact(name: &str, v: &ContactVerdict) -> Check {
    Check::verdict(name, v.contact)
        .with_margin(v.margin)
        .with_witness(v.witness.clone())
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

pub fn model_dump(
    n: usize,
    r_min: f64,
    r_max: f64,
    cfg: &ZeroTestConfig,
) -> Result<Outcome, CliError> {
    let t = tube(n, r_min, r_max, cfg)?;
    let none = Env::new();
    let err = |e: transverse_blowup::FormError| CliError::Usage(e.to_string());
    let mut checks = Vec::new();
    for (name, form) in [("eta", &t.eta), ("lambda", &t.lambda)] {
        checks.push(contact(
            &format!("{name} contact"),
            &contact_check(form, &none, cfg).map_err(err)?,
        ));
    }
    let reeb_eta = reeb_symbolic_verify(&t.eta, &t.r_s(), &none, cfg).map_err(err)?;
    checks.push(Check::zero("eta Reeb field is d/dtheta", &reeb_eta));
    let reeb_lambda = reeb_symbolic_verify(&t.lambda, &t.r_std(), &none, cfg).map_err(err)?;
    checks.push(Check::zero("lambda Reeb field is R_std", &reeb_lambda));
    let data = json!({
        "n": n,
        "dimension": t.dim(),
        "r_min": r_min,
        "r_max": r_max,
        "coordinates": t.chart.names(),
        "forms": {
            "alpha_std": t.alpha_std.to_text(),
            "eta": t.eta.to_text(),
            "lambda": t.lambda.to_text(),
        },
    });
    Ok(Outcome { checks, data })
}

fn surgery_checks(m: &SurgeryBlowupModel) -> Vec<Check> {
    let c = &m.certificates;
    let p = &m.profile;
    vec![
        contact("glued form contact", &c.contact),
        Check::zero("inner band equals lambda", &c.inner),
        Check::verdict(
            "outer band conformal to phi_l* eta",
            c.outer.proportional && c.outer.single_signed,
        )
        .with_margin(c.outer.ratio_min.abs().min(c.outer.ratio_max.abs()))
        .with_residual(c.outer.wedge_report.worst_residual),
        Check::verdict("profile increasing", p.monotonicity.min_derivative > 0.0)
            .with_margin(p.monotonicity.min_derivative),
        Check::verdict(
            "profile C2 at joints",
            p.smoothness.max_jump.iter().all(|j| *j <= JOINT_TOL),
        )
        .with_residual(p.smoothness.max_jump.iter().cloned().fold(0.0, f64::max)),
    ]
}

pub fn blowup_surgery(
    l: i64,
    n: usize,
    emit_profile: Option<&Path>,
    rows: usize,
    cfg: &ZeroTestConfig,
) -> Result<Outcome, CliError> {
    let t = tube(n, CORE_GUARD, R_MAX, cfg)?;
    let model = match build_surgery_blowup(l, &t, cfg) {
        Ok(m) => m,
        Err(SurgeryError::Model(e)) => return Err(model_error(e)),
        Err(e) => {
            return Ok(Outcome {
                checks: vec![Check::fail("surgery blow-up", e.to_string())],
                data: json!({ "l": l, "n": n }),
            })
        }
    };
    if let Some(path) = emit_profile {
        let table: Vec<Vec<f64>> = model
            .profile
            .table(rows)
            .into_iter()
            .map(|r| r.to_vec())
            .collect();
        write_csv(path, &["r", "H", "dH"], &table)?;
    }
    let data = json!({
        "l": l,
        "n": n,
        "profile": model.profile,
        "divisor": model.divisor,
        "alpha_glued": model.alpha_glued.to_text(),
    });
    Ok(Outcome {
        checks: surgery_checks(&model),
        data,
    })
}

fn not_free(e: &BwError) -> Check {
    Check::fail("free circle action", e.to_string())
}

pub fn bw_product(a: i64, b: i64) -> Result<Outcome, CliError> {
    let q = match product_quotient(a, b) {
        Ok(q) => q,
        Err(e) => {
            return Ok(Outcome {
                checks: vec![not_free(&e)],
                data: json!({ "a": a, "b": b }),
            })
        }
    };
    let cert = verify_exact_sequence(&q.sequence);
    let mut exact = Check::verdict("exact sequence", cert.exact);
    if let Some(reason) = &cert.reason {
        exact = exact.with_detail(reason.to_string());
    }
    let bound = a.abs().max(b.abs()).max(1);
    let checks = vec![
        Check::pass("free circle action"),
        exact,
        Check::verdict(
            "kernel enumeration on [-10, 10]",
            brute_force_kernel_agrees(&q.sequence, 10),
        ),
        Check::verdict(
            "surjectivity by enumeration",
            brute_force_surjective(&q.sequence, bound),
        ),
    ];
    Ok(Outcome {
        checks,
        data: json!({ "quotient": q, "certificate": cert }),
    })
}

fn cut_failure(e: CutError, a: i64, b: i64) -> Result<Outcome, CliError> {
    let check = match &e {
        CutError::Bw(bw) => not_free(bw),
        CutError::TubeTooSmall { .. } => Check::fail("tube contains the zero level", e.to_string()),
        CutError::Model(_) | CutError::NoZeroLevel { .. } => {
            return Err(CliError::Usage(e.to_string()))
        }
        _ => Check::fail("contact cut", e.to_string()),
    };
    Ok(Outcome {
        checks: vec![check],
        data: json!({ "a": a, "b": b }),
    })
}

pub fn cut(
    a: i64,
    b: i64,
    radius: f64,
    n: usize,
    cfg: &ZeroTestConfig,
) -> Result<Outcome, CliError> {
    if let Err(e) = product_quotient(a, b) {
        return cut_failure(CutError::Bw(e), a, b);
    }
    if let Err(e) = zero_radius(a, b) {
        return cut_failure(e, a, b);
    }
    let t = tube(n, CORE_GUARD, radius, cfg)?;
    let model = match make_action(a, b, &t, cfg).and_then(|spec| make_cut(&spec, cfg)) {
        Ok(m) => m,
        Err(e) => return cut_failure(e, a, b),
    };
    let c = &model.certificates;
    let mut checks = vec![
        Check::pass("free circle action"),
        Check::zero("action preserves the form", &c.invariance),
        Check::zero("moment map equals alpha(X)", &c.moment),
        Check::zero("chart map pushes d/dtheta to X", &c.generator_pullback),
        Check::zero("chart map pulls the form back to lambda_ab", &c.chart_form),
        Check::verdict("zero level regular", c.regularity > 0.0).with_margin(c.regularity),
    ];
    let presentation = match &model.presentation {
        Some(p) => {
            match check_radial(p, cfg) {
                Ok(cert) => checks.push(
                    Check::verdict(
                        "radial presentation",
                        cert.contact.contact && cert.margin > 0.0,
                    )
                    .with_margin(cert.margin),
                ),
                Err(e) => checks.push(Check::fail("radial presentation", e.to_string())),
            }
            Some(p.hamiltonian.clone())
        }
        None => {
            checks.push(Check::skipped(
                "radial presentation",
                "no room between the zero level and the tube edge",
            ));
            None
        }
    };
    let data = json!({
        "a": a,
        "b": b,
        "radius": radius,
        "zero_radius": model.zero_radius,
        "region": model.region,
        "moment": model.moment,
        "divisor": model.divisor,
        "hamiltonian": presentation,
    });
    Ok(Outcome { checks, data })
}

fn uniqueness_failure(e: UniquenessError) -> Result<Outcome, CliError> {
    match e {
        UniquenessError::Model(m) => Err(model_error(m)),
        UniquenessError::Cut(c) => cut_failure(c, 0, 0).map(|mut o| {
            o.data = Value::Null;
            o
        }),
        UniquenessError::Bw(bw) => Ok(Outcome {
            checks: vec![not_free(&bw)],
            data: Value::Null,
        }),
        other => Ok(Outcome {
            checks: vec![Check::fail("presentations", other.to_string())],
            data: Value::Null,
        }),
    }
}

pub fn uniq_compare(a: i64, b: i64, n: usize, cfg: &ZeroTestConfig) -> Result<Outcome, CliError> {
    let matrix = match compare_constructions(a, b, n, cfg) {
        Ok(m) => m,
        Err(e) => return uniqueness_failure(e),
    };
    let mut checks = Vec::new();
    for p in &matrix.presentations {
        let r = &p.radial;
        checks.push(
            Check::verdict(
                format!("{} radial", p.construction),
                r.contact.contact && r.margin > 0.0,
            )
            .with_margin(r.margin)
            .with_witness(r.margin_at.clone()),
        );
    }
    for cell in &matrix.cells {
        let name = format!("{} <-> {}", cell.pair.0, cell.pair.1);
        checks.push(match &cell.verdict {
            Verdict::Pass { min_margin } => Check::pass(name).with_margin(*min_margin),
            Verdict::Fail { reason } => Check::fail(name, reason.clone()),
            Verdict::NotApplicable => Check::skipped(name, "surgery needs a = 1"),
        });
    }
    Ok(Outcome {
        checks,
        data: serde_json::to_value(&matrix)?,
    })
}

pub fn uniq_path(
    a: i64,
    b: i64,
    from: Construction,
    to: Construction,
    n: usize,
    emit: Option<&Path>,
    cfg: &ZeroTestConfig,
) -> Result<Outcome, CliError> {
    let t = tube(n, CORE_GUARD, COMPARE_RADIUS, cfg)?;
    let build = |c| build_presentation(c, a, b, &t, cfg);
    let (p0, p1) = match (build(from), build(to)) {
        (Ok(p0), Ok(p1)) => (p0, p1),
        (Err(e), _) | (_, Err(e)) => return uniqueness_failure(e),
    };
    let path = match convex_path(&p0, &p1, p0.outer_band, cfg) {
        Ok(path) => path,
        Err(e) => return uniqueness_failure(e),
    };
    if let Some(file) = emit {
        let rows: Vec<Vec<f64>> = path
            .points
            .iter()
            .map(|p| vec![p.t, p.margin, p.contact_margin])
            .collect();
        write_csv(file, &["t", "margin", "contact_margin"], &rows)?;
    }
    let checks = vec![
        Check::verdict("radial at every grid point", path.min_margin > 0.0)
            .with_margin(path.min_margin),
        Check::pass("fixed on the outer band").with_residual(path.boundary_residual),
    ];
    Ok(Outcome {
        checks,
        data: json!({ "a": a, "b": b, "from": from, "to": to, "path": path }),
    })
}

/// The full certificate suite at the given sampling budget.
pub fn verify_all(cfg: &ZeroTestConfig) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let none = Env::new();
    let form_err = |e: transverse_blowup::FormError| CliError::Usage(e.to_string());

    let t = tube(2, 0.1, 1.9, cfg)?;
    for l in 1..=5 {
        let rep = phi_map(l, &t)
            .pullback(&t.eta)
            .map_err(form_err)?
            .sub(&t.lambda_bar(&Expr::int(l)))
            .is_zero(&none, cfg)
            .map_err(form_err)?;
        checks.push(Check::zero(format!("pullback phi_{l}"), &rep));
    }
    for (a, b) in [(1, 1), (1, 3), (2, 3), (3, 2)] {
        let rep = phi_ab(a, b, &t)
            .map_err(model_error)?
            .pullback(&t.eta)
            .map_err(form_err)?
            .sub(&t.lambda_ab(&Expr::int(a), &Expr::int(b)))
            .is_zero(&none, cfg)
            .map_err(form_err)?;
        checks.push(Check::zero(format!("pullback phi_({a},{b})"), &rep));
    }
    for l in 2..=4 {
        let left = phi_map(l, &t)
            .compose(&radial_squeeze(l - 1, &t).map_err(model_error)?)
            .map_err(form_err)?;
        let right = psi_squeeze(l - 1, t.r_max, &t)
            .map_err(model_error)?
            .compose(&phi_map(1, &t))
            .map_err(form_err)?;
        let cmp = left
            .compare(&right, t.chart.domain(), &none, cfg)
            .map_err(form_err)?;
        checks.push(
            Check::verdict(format!("square for l = {l}"), cmp.equal)
                .with_residual(cmp.max_residual),
        );
    }

    let core = tube(2, 1e-7, 2.0, cfg)?;
    for k in 1..=6 {
        let psi = psi_squeeze(k, 2.0, &core).map_err(model_error)?;
        let pulled = psi.pullback(&core.eta).map_err(form_err)?;
        let rep = conformal_check(&pulled, &core.eta, psi.source().domain(), &none, cfg)
            .map_err(form_err)?;
        checks.push(
            Check::verdict(
                format!("psi_{k} contactomorphism"),
                rep.proportional && rep.single_signed,
            )
            .with_margin(rep.factor_min),
        );
        let near = core
            .chart
            .domain()
            .restrict("r", 1e-7, 1e-6)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let mut worst: f64 = 0.0;
        for p in near.sample_points(cfg.samples, cfg.seed, &none) {
            worst = worst.max(displacement(&psi, 2, &p).map_err(model_error)?);
        }
        checks.push(
            Check::verdict(format!("psi_{k} identity near the core"), worst <= 1e-5)
                .with_residual(worst),
        );
    }
    let image = squeeze_radius(2.0, 6);
    checks.push(
        Check::verdict("squeeze radius (2, 6)", (image - 0.4).abs() <= 1e-12)
            .with_residual((image - 0.4).abs()),
    );

    for l in 1..=5 {
        for c in blowup_surgery(l, 2, None, 2, cfg)?.checks {
            checks.push(Check {
                name: format!("surgery l = {l}: {}", c.name),
                ..c
            });
        }
    }

    let mut parity_ok = true;
    for k in -5..=5i64 {
        for l in -5..=5i64 {
            for n in 1..=6i64 {
                parity_ok &= isotopy_parity(k, l, n) == ((k - l) % 2 == 0 || n % 2 == 0);
            }
        }
    }
    checks.push(Check::verdict("isotopy parity table", parity_ok));

    let mut bw_ok = true;
    for a in -20..=20i64 {
        for b in -20..=20i64 {
            bw_ok &= match product_quotient(a, b) {
                Ok(q) => {
                    verify_exact_sequence(&q.sequence).exact
                        && brute_force_kernel_agrees(&q.sequence, 10)
                }
                Err(BwError::ActionNotFree { gcd, .. }) => gcd != 1,
                Err(_) => false,
            };
        }
    }
    checks.push(Check::verdict("exact sequences for |a|, |b| <= 20", bw_ok));

    for (a, b) in [(1, 1), (1, 4), (4, 1), (2, 3)] {
        for c in cut(a, b, 2.5, 2, cfg)?.checks {
            checks.push(Check {
                name: format!("cut ({a},{b}): {}", c.name),
                ..c
            });
        }
    }
    for c in uniq_compare(1, 1, 2, cfg)?.checks {
        checks.push(Check {
            name: format!("compare (1,1): {}", c.name),
            ..c
        });
    }
    Ok(Outcome {
        checks,
        data: Value::Null,
    })
}
