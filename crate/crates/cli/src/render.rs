//! Report rendering: a typed report body is turned into a JSON value or a
//! markdown page. JSON output is deterministic byte for byte: objects are
//! backed by sorted maps and every float prints through the standard
//! shortest-round-trip formatter.

use bismut_core::catalog::{Built, CatalogKind, ENTRIES};
use bismut_core::classify::Classification;
use bismut_core::conditions::Flag;
use bismut_core::curvature::Curvature4Tensor;
use bismut_core::identities::IdentitySuite;
use bismut_core::metric::RiemannianPointCurvature;
use bismut_core::structure::ValidationReport;
use bismut_core::{ConditionReport, Cx, PointReport};
use serde_json::{json, Map, Value};

/// Typed result of one command run on one input.
pub enum ReportBody {
    LieValidation(ValidationReport),
    MetricValidation { identity_residual: f64, conjugation_residual: f64 },
    Condition(Box<ConditionReport>),
    Point(Box<PointReport>),
    Classification(Box<Classification>),
    Identities(IdentitySuite),
    LieCurvature { n: usize, chern: Curvature4Tensor, bismut: Curvature4Tensor },
    CoordCurvature { n: usize, chern: Curvature4Tensor, riemannian: Box<RiemannianPointCurvature> },
}

pub fn cx_value(c: Cx) -> Value {
    json!([c.re, c.im])
}

fn cx_list(v: &[Cx]) -> Value {
    Value::Array(v.iter().map(|c| cx_value(*c)).collect())
}

fn real_list(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| json!(x)).collect())
}

fn flag_value(f: &Flag) -> Value {
    json!({"holds": f.holds, "residual": f.residual})
}

fn rank_of(eigenvalues: &[f64], tol: f64) -> usize {
    let top = eigenvalues.first().copied().unwrap_or(0.0).max(1.0);
    eigenvalues.iter().filter(|v| **v > tol * top).count()
}

fn classification_value(c: &Classification) -> Value {
    let mut m = Map::new();
    m.insert("label".into(), json!(c.label));
    m.insert("vaisman_refinement".into(), json!(c.vaisman_refinement));
    m.insert("rank_b".into(), c.rank_b.map_or(Value::Null, |r| json!(r)));
    m.insert(
        "b_eigenvalues".into(),
        c.b_eigenvalues.as_deref().map_or(Value::Null, real_list),
    );
    m.insert(
        "middle".into(),
        c.middle.as_ref().map_or(Value::Null, |d| {
            json!({"x": d.x, "y": d.y, "z": d.z, "shape_residual": d.shape_residual})
        }),
    );
    m.insert(
        "admissible".into(),
        c.admissible.as_ref().map_or(Value::Null, |d| {
            json!({
                "lambda": d.lambda,
                "eigenvalues": [cx_value(d.eigenvalues[0]), cx_value(d.eigenvalues[1])],
                "branch_sum": cx_value(d.branch_sum),
                "branch_diff": cx_value(d.branch_diff),
                "d_lee_residual": d.d_lee_residual,
            })
        }),
    );
    Value::Object(m)
}

fn condition_report_value(r: &ConditionReport) -> Value {
    let mut m = Map::new();
    m.insert("n".into(), json!(r.n));
    m.insert("kahler".into(), flag_value(&r.kahler));
    m.insert("balanced".into(), flag_value(&r.balanced));
    m.insert("gauduchon".into(), flag_value(&r.gauduchon));
    m.insert("pluriclosed".into(), flag_value(&r.pluriclosed));
    m.insert(
        "pluriclosed_torsion_residual".into(),
        json!(r.pluriclosed_torsion_residual),
    );
    m.insert("btp".into(), flag_value(&r.btp_direct));
    m.insert(
        "btp_theorem".into(),
        json!({
            "holds": r.btp_theorem.holds,
            "hol_block": r.btp_theorem.hol_block,
            "pair_symmetry": r.btp_theorem.pair_symmetry,
            "ric_q_parallel": r.btp_theorem.ric_q_parallel,
            "ric_q_chi": r.btp_theorem.ric_q_chi,
        }),
    );
    m.insert("bkl".into(), flag_value(&r.bkl));
    m.insert(
        "lck".into(),
        json!({
            "holds": r.lck.holds,
            "shape_residual": r.lck.shape_residual,
            "lee_closed_residual": r.lck.lee_closed_residual,
        }),
    );
    m.insert("vaisman".into(), flag_value(&r.vaisman));
    m.insert(
        "lee_potential".into(),
        json!({
            "holds": r.lp.holds,
            "partial_eta_residual": r.lp.partial_eta_residual,
            "proportionality_residual": r.lp.proportionality_residual,
            "c": r.lp.c.map_or(Value::Null, cx_value),
        }),
    );
    m.insert(
        "degenerate_torsion".into(),
        r.degenerate_torsion.as_ref().map_or(Value::Null, |d| {
            json!({"holds": d.holds, "residual": d.residual})
        }),
    );
    m.insert("gce".into(), flag_value(&r.gce));
    m.insert("eta".into(), cx_list(&r.eta));
    m.insert("b_eigenvalues".into(), real_list(&r.b_eigenvalues));
    m.insert("rank_b".into(), json!(rank_of(&r.b_eigenvalues, r.tol)));
    m.insert(
        "classification".into(),
        r.classification.as_ref().map_or(Value::Null, classification_value),
    );
    Value::Object(m)
}

fn point_report_value(r: &PointReport) -> Value {
    let mut m = Map::new();
    m.insert("n".into(), json!(r.n));
    m.insert("normalized".into(), json!(r.normalized));
    m.insert("identity_residual".into(), json!(r.identity_residual));
    m.insert("conjugation_residual".into(), json!(r.conjugation_residual));
    m.insert("torsion_norm".into(), json!(r.torsion.norm_inf()));
    m.insert("kahler".into(), flag_value(&r.kahler));
    m.insert("balanced".into(), flag_value(&r.balanced));
    m.insert("lck_shape".into(), flag_value(&r.lck_shape));
    m.insert("btp".into(), flag_value(&r.btp));
    m.insert(
        "btp_components".into(),
        json!({
            "holomorphic": r.btp_components.holomorphic,
            "antiholomorphic": r.btp_components.antiholomorphic,
        }),
    );
    m.insert("vaisman".into(), flag_value(&r.vaisman));
    m.insert("eta".into(), cx_list(&r.eta));
    m.insert("b_eigenvalues".into(), real_list(&r.b_eigenvalues));
    m.insert("rank_b".into(), json!(r.rank_b));
    m.insert(
        "chern_conjugate_residual".into(),
        json!(r.chern_conjugate_residual),
    );
    m.insert("riemann_pair_residual".into(), json!(r.riemann_pair_residual));
    m.insert("riemann_btp_warning".into(), json!(r.riemannian.btp_warning));
    Value::Object(m)
}

fn identities_value(s: &IdentitySuite) -> Value {
    json!({
        "identities": s
            .entries
            .iter()
            .map(|e| json!({"name": e.name, "residual": e.residual, "applicable": e.applicable}))
            .collect::<Vec<_>>(),
        "max_residual": s.max_residual(),
    })
}

const MIXED_CONVENTION: &str =
    "R[a][b][c][d] = R_{a b̄ c d̄}, 0-based: endomorphism pair (a, b̄) first, direction pair (c, d̄) last";
const R20_CONVENTION: &str = "R20[i][j][k][l] = R_{i j k l̄}, 0-based";

/// Dense display-order array: `out[a][b][c][d] = R_{a b̄ c d̄}` where the
/// internal accessor stores the direction pair first.
fn mixed_display_array(n: usize, get: impl Fn(usize, usize, usize, usize) -> Cx) -> Value {
    Value::Array(
        (0..n)
            .map(|a| {
                Value::Array(
                    (0..n)
                        .map(|b| {
                            Value::Array(
                                (0..n)
                                    .map(|c| {
                                        Value::Array(
                                            (0..n).map(|d| cx_value(get(c, d, a, b))).collect(),
                                        )
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn plain_array(n: usize, get: impl Fn(usize, usize, usize, usize) -> Cx) -> Value {
    Value::Array(
        (0..n)
            .map(|i| {
                Value::Array(
                    (0..n)
                        .map(|j| {
                            Value::Array(
                                (0..n)
                                    .map(|k| {
                                        Value::Array(
                                            (0..n).map(|l| cx_value(get(i, j, k, l))).collect(),
                                        )
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn json_body(body: &ReportBody) -> Value {
    match body {
        ReportBody::LieValidation(v) => json!({
            "max_integrability_residual": v.max_integrability_residual,
            "max_jacobi_residual": v.max_jacobi_residual,
        }),
        ReportBody::MetricValidation { identity_residual, conjugation_residual } => json!({
            "identity_residual": identity_residual,
            "conjugation_residual": conjugation_residual,
        }),
        ReportBody::Condition(r) => condition_report_value(r),
        ReportBody::Point(r) => point_report_value(r),
        ReportBody::Classification(c) => classification_value(c),
        ReportBody::Identities(s) => identities_value(s),
        ReportBody::LieCurvature { n, chern, bismut } => json!({
            "n": n,
            "convention": MIXED_CONVENTION,
            "chern": mixed_display_array(*n, |i, j, k, l| chern.mixed(i, j, k, l)),
            "bismut": mixed_display_array(*n, |i, j, k, l| bismut.mixed(i, j, k, l)),
        }),
        ReportBody::CoordCurvature { n, chern, riemannian } => json!({
            "n": n,
            "convention": MIXED_CONVENTION,
            "convention_20": R20_CONVENTION,
            "chern": mixed_display_array(*n, |i, j, k, l| chern.mixed(i, j, k, l)),
            "riemannian_11": mixed_display_array(*n, |i, j, k, l| riemannian.r11(i, j, k, l)),
            "riemannian_20": plain_array(*n, |i, j, k, l| riemannian.r20(i, j, k, l)),
        }),
    }
}

/// Standard command envelope.
pub fn envelope(command: &str, tol: f64, input_echo: &Value, report: Value) -> Value {
    json!({
        "tool": "bismut-lab",
        "command": command,
        "tol": tol,
        "input": input_echo,
        "report": report,
    })
}

pub fn catalog_list_value() -> Value {
    let entries: Vec<Value> = ENTRIES
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "kind": match e.kind {
                    CatalogKind::Lie => "lie",
                    CatalogKind::Coordinate => "coordinate",
                },
                "params": e
                    .params
                    .iter()
                    .map(|(n, d)| json!({"name": n, "description": d}))
                    .collect::<Vec<_>>(),
                "expect": e.expect,
            })
        })
        .collect();
    json!({"tool": "bismut-lab", "command": "catalog list", "entries": entries})
}

/// A catalog build re-expressed as a standalone input document.
pub fn emit_document(built: &Built) -> Value {
    match built {
        Built::Lie(s) => {
            let n = s.n();
            let mut d = Map::new();
            for k in 0..n {
                let f = s.dphi(k);
                let mut inner = Map::new();
                for fa in 0..2 * n {
                    for fb in (fa + 1)..2 * n {
                        let ga = (fa % n, fa >= n);
                        let gb = (fb % n, fb >= n);
                        let c = f.coeff(&[ga, gb]);
                        if c.norm() > 0.0 {
                            inner.insert(
                                format!("{}*{}", gen_token(ga), gen_token(gb)),
                                cx_value(c),
                            );
                        }
                    }
                }
                if !inner.is_empty() {
                    d.insert((k + 1).to_string(), Value::Object(inner));
                }
            }
            json!({"type": "lie_hermitian", "dim": n, "payload": {"d": d}})
        }
        Built::Metric(m) => {
            let n = m.n();
            let entries: Vec<Value> = (0..n)
                .map(|i| {
                    Value::Array(
                        (0..n)
                            .map(|j| Value::String(m.entry(i, j).to_string()))
                            .collect(),
                    )
                })
                .collect();
            let point: Vec<Value> = m.point().iter().map(|c| cx_value(*c)).collect();
            json!({
                "type": "coordinate_metric",
                "dim": n,
                "payload": {"entries": entries, "point": point},
            })
        }
    }
}

fn gen_token((index, barred): (usize, bool)) -> String {
    format!("{}{}", index + 1, if barred { "b" } else { "" })
}

// ---------------------------------------------------------------- markdown

fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-3 && v.abs() < 1e6 {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_residual(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.3e}")
    }
}

pub fn fmt_cx(c: Cx) -> String {
    if c.im == 0.0 {
        return fmt_real(c.re);
    }
    let imag = match c.im {
        v if v == 1.0 => "i".to_string(),
        v if v == -1.0 => "-i".to_string(),
        v => format!("{}i", fmt_real(v)),
    };
    if c.re == 0.0 {
        imag
    } else if imag.starts_with('-') {
        format!("{}{}", fmt_real(c.re), imag)
    } else {
        format!("{}+{}", fmt_real(c.re), imag)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn flag_row(out: &mut String, name: &str, f: &Flag) {
    out.push_str(&format!(
        "| {name} | {} | {} |\n",
        yes_no(f.holds),
        fmt_residual(f.residual)
    ));
}

fn cx_list_inline(v: &[Cx]) -> String {
    let items: Vec<String> = v.iter().map(|c| fmt_cx(*c)).collect();
    format!("({})", items.join(", "))
}

fn real_list_inline(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| fmt_real(*x)).collect();
    format!("({})", items.join(", "))
}

fn barred(i: usize) -> String {
    // combining macron over the 1-based index
    format!("{}\u{0304}", i + 1)
}

/// Table of nonzero entries of a mixed tensor in display order.
fn mixed_table(
    out: &mut String,
    title: &str,
    symbol: &str,
    n: usize,
    tol: f64,
    get: &dyn Fn(usize, usize, usize, usize) -> Cx,
) {
    out.push_str(&format!("## {title}\n\n"));
    let mut rows = String::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = get(c, d, a, b);
                    if v.norm() > tol {
                        rows.push_str(&format!(
                            "| {symbol}_{{{} {} {} {}}} | {} |\n",
                            a + 1,
                            barred(b),
                            c + 1,
                            barred(d),
                            fmt_cx(v)
                        ));
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        out.push_str("(all entries below tolerance)\n\n");
    } else {
        out.push_str("| entry | value |\n|---|---|\n");
        out.push_str(&rows);
        out.push('\n');
    }
}

fn r20_table(out: &mut String, n: usize, tol: f64, r: &RiemannianPointCurvature) {
    out.push_str("## Levi-Civita curvature (2,0)-block\n\n");
    let mut rows = String::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = r.r20(i, j, k, l);
                    if v.norm() > tol {
                        rows.push_str(&format!(
                            "| R_{{{} {} {} {}}} | {} |\n",
                            i + 1,
                            j + 1,
                            k + 1,
                            barred(l),
                            fmt_cx(v)
                        ));
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        out.push_str("(all entries below tolerance)\n\n");
    } else {
        out.push_str("| entry | value |\n|---|---|\n");
        out.push_str(&rows);
        out.push('\n');
    }
}

fn classification_md(out: &mut String, c: &Classification) {
    out.push_str("## classification\n\n");
    out.push_str(&format!("- label: {}\n", c.label));
    if c.vaisman_refinement {
        out.push_str("- refinement: vaisman\n");
    }
    if let Some(r) = c.rank_b {
        out.push_str(&format!("- rank B: {r}\n"));
    }
    if let Some(ev) = &c.b_eigenvalues {
        out.push_str(&format!("- B eigenvalues: {}\n", real_list_inline(ev)));
    }
    if let Some(m) = &c.middle {
        out.push_str(&format!(
            "- normal form: x = {}, y = {}, z = {} (shape residual {})\n",
            fmt_real(m.x),
            fmt_real(m.y),
            fmt_real(m.z),
            fmt_residual(m.shape_residual)
        ));
    }
    if let Some(a) = &c.admissible {
        out.push_str(&format!(
            "- admissible frame: λ = {}, eigenvalues {}, sum {}, diff {}\n",
            fmt_real(a.lambda),
            cx_list_inline(&a.eigenvalues),
            fmt_cx(a.branch_sum),
            fmt_cx(a.branch_diff)
        ));
    }
    out.push('\n');
}

fn condition_md(out: &mut String, r: &ConditionReport) {
    out.push_str("| condition | holds | residual |\n|---|---|---|\n");
    flag_row(out, "kahler", &r.kahler);
    flag_row(out, "balanced", &r.balanced);
    flag_row(out, "gauduchon", &r.gauduchon);
    flag_row(out, "pluriclosed", &r.pluriclosed);
    flag_row(out, "bismut torsion-parallel", &r.btp_direct);
    flag_row(out, "bismut Kahler-like", &r.bkl);
    out.push_str(&format!(
        "| locally conformally Kahler | {} | {} |\n",
        yes_no(r.lck.holds),
        fmt_residual(r.lck.shape_residual.max(r.lck.lee_closed_residual))
    ));
    flag_row(out, "vaisman", &r.vaisman);
    out.push_str(&format!(
        "| Lee potential | {} | {} |\n",
        yes_no(r.lp.holds),
        fmt_residual(r.lp.partial_eta_residual.max(r.lp.proportionality_residual))
    ));
    if let Some(d) = &r.degenerate_torsion {
        out.push_str(&format!(
            "| degenerate torsion | {} | {} |\n",
            yes_no(d.holds),
            fmt_residual(d.residual)
        ));
    }
    flag_row(out, "Gauduchon curvature equality", &r.gce);
    out.push('\n');
    out.push_str(&format!(
        "- torsion-parallel by curvature criteria: {} (max residual {})\n",
        yes_no(r.btp_theorem.holds),
        fmt_residual(r.btp_theorem.max_residual())
    ));
    out.push_str(&format!("- η: {}\n", cx_list_inline(&r.eta)));
    out.push_str(&format!(
        "- B eigenvalues: {} (rank {})\n\n",
        real_list_inline(&r.b_eigenvalues),
        rank_of(&r.b_eigenvalues, r.tol)
    ));
    if let Some(c) = &r.classification {
        classification_md(out, c);
    }
}

fn point_md(out: &mut String, r: &PointReport) {
    if r.normalized {
        out.push_str("- point normalized to make g the identity\n\n");
    }
    out.push_str("| condition | holds | residual |\n|---|---|---|\n");
    flag_row(out, "kahler at the point", &r.kahler);
    flag_row(out, "balanced at the point", &r.balanced);
    flag_row(out, "LCK torsion shape", &r.lck_shape);
    flag_row(out, "torsion-parallel at the point", &r.btp);
    flag_row(out, "vaisman at the point", &r.vaisman);
    out.push('\n');
    out.push_str(&format!("- η: {}\n", cx_list_inline(&r.eta)));
    out.push_str(&format!(
        "- B eigenvalues: {} (rank {})\n",
        real_list_inline(&r.b_eigenvalues),
        r.rank_b
    ));
    out.push_str(&format!(
        "- curvature conjugation residual: {}\n",
        fmt_residual(r.chern_conjugate_residual)
    ));
    out.push_str(&format!(
        "- Levi-Civita pair-symmetry residual: {}\n\n",
        fmt_residual(r.riemann_pair_residual)
    ));
}

pub fn md_body(body: &ReportBody, tol: f64) -> String {
    let mut out = String::new();
    match body {
        ReportBody::LieValidation(v) => {
            out.push_str(&format!(
                "- max integrability residual: {}\n",
                fmt_residual(v.max_integrability_residual)
            ));
            out.push_str(&format!(
                "- max Jacobi residual: {}\n",
                fmt_residual(v.max_jacobi_residual)
            ));
            out.push_str(&format!("- ok: {}\n", yes_no(v.ok(tol))));
        }
        ReportBody::MetricValidation { identity_residual, conjugation_residual } => {
            out.push_str(&format!(
                "- identity residual at the point: {}\n",
                fmt_residual(*identity_residual)
            ));
            out.push_str(&format!(
                "- conjugation residual: {}\n",
                fmt_residual(*conjugation_residual)
            ));
            out.push_str("- ok: yes\n");
        }
        ReportBody::Condition(r) => condition_md(&mut out, r),
        ReportBody::Point(r) => point_md(&mut out, r),
        ReportBody::Classification(c) => classification_md(&mut out, c),
        ReportBody::Identities(s) => {
            out.push_str("| identity | applicable | residual |\n|---|---|---|\n");
            for e in &s.entries {
                out.push_str(&format!(
                    "| {} | {} | {} |\n",
                    e.name,
                    yes_no(e.applicable),
                    fmt_residual(e.residual)
                ));
            }
            out.push_str(&format!("\n- max residual: {}\n", fmt_residual(s.max_residual())));
        }
        ReportBody::LieCurvature { n, chern, bismut } => {
            mixed_table(&mut out, "Chern curvature", "R^c", *n, tol, &|i, j, k, l| {
                chern.mixed(i, j, k, l)
            });
            mixed_table(&mut out, "Bismut curvature", "R^b", *n, tol, &|i, j, k, l| {
                bismut.mixed(i, j, k, l)
            });
        }
        ReportBody::CoordCurvature { n, chern, riemannian } => {
            mixed_table(&mut out, "Chern curvature", "R^c", *n, tol, &|i, j, k, l| {
                chern.mixed(i, j, k, l)
            });
            mixed_table(
                &mut out,
                "Levi-Civita curvature (1,1)-block",
                "R",
                *n,
                tol,
                &|i, j, k, l| riemannian.r11(i, j, k, l),
            );
            r20_table(&mut out, *n, tol, riemannian);
        }
    }
    out
}

pub fn md_page(command: &str, tol: f64, input_line: &str, body: &str) -> String {
    let mut out = format!("# bismut-lab {command}\n\n");
    out.push_str(&format!("- input: {input_line}\n"));
    out.push_str(&format!("- tol: {tol:e}\n\n"));
    out.push_str(body);
    out
}

pub fn catalog_list_md() -> String {
    let mut out = String::from("# bismut-lab catalog\n\n");
    out.push_str("| name | kind | parameters | expected |\n|---|---|---|---|\n");
    for e in ENTRIES {
        let params: Vec<&str> = e.params.iter().map(|(n, _)| *n).collect();
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            e.name,
            match e.kind {
                CatalogKind::Lie => "lie",
                CatalogKind::Coordinate => "coordinate",
            },
            if params.is_empty() { "-".to_string() } else { params.join(", ") },
            e.expect
        ));
    }
    out
}
