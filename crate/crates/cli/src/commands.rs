//! The batch commands. Each produces a [`Report`]: a JSON result, an
//! optional table for CSV output, and the list of hard failures.

use d4_selmer::core_algebra::funcfield::RatFunc;
use d4_selmer::core_algebra::{quartic_disc, Field, Gf, Ring};
use d4_selmer::curves_arithmetic::{
    curve_group, format_place, format_poly, minimal_data, random_section, to_weierstrass,
    two_torsion_over_function_field, xd_membership, DEFAULT_MAX_Q,
};
use d4_selmer::densities;
use d4_selmer::hn_weights::{boundary_tail_bound, trivial_inv_slopes, verify_cusp_table, CuspRow, DEFAULT_TRUNCATION};
use d4_selmer::lie_d4::W0;
use d4_selmer::rng::{job, stream};
use d4_selmer::suites::{self, SuiteConfig, SuiteOutcome};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
    pub failures: Vec<String>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn suite_config(cfg: &RunConfig) -> SuiteConfig {
    let mut s = SuiteConfig {
        seed: cfg.seed(),
        ..SuiteConfig::default()
    };
    if let Some(p) = cfg.p {
        s.p = p;
    }
    if let Some(t) = cfg.trials {
        s.trials = t;
    }
    if let Some(t) = cfg.truncation {
        s.truncation = t;
    }
    if let Some(m) = cfg.max_q {
        s.max_q = m;
    }
    s
}

fn suite_report(outcomes: Vec<SuiteOutcome>) -> Report {
    let mut table = Table::new(&["criterion", "name", "passed", "detail"]);
    let mut failures = Vec::new();
    for o in &outcomes {
        table.rows.push(vec![
            o.criterion.to_string(),
            o.name.to_string(),
            o.passed.to_string(),
            o.detail.clone(),
        ]);
        failures.extend(
            o.failures
                .iter()
                .map(|f| format!("criterion {} ({}): {f}", o.criterion, o.name)),
        );
    }
    Report {
        result: to_value(&outcomes),
        table: Some(table),
        failures,
    }
}

fn run_suites(cfg: &RunConfig, which: &[u8]) -> Report {
    let sc = suite_config(cfg);
    let outcomes: Vec<SuiteOutcome> = suites::all_suites()
        .into_iter()
        .filter(|(c, _)| which.contains(c))
        .map(|(_, f)| f(&sc))
        .collect();
    suite_report(outcomes)
}

/// Structure, invariant theory, discriminant comparison and `pi_1(G)`.
pub fn verify_algebra(cfg: &RunConfig) -> Result<Report, String> {
    let mut cfg = cfg.clone();
    if let Some(n) = cfg.n_samples {
        cfg.trials.get_or_insert(n as usize);
    }
    Ok(run_suites(&cfg, &[1, 2, 3, 11]))
}

pub fn reduce_orbit(cfg: &RunConfig) -> Result<Report, String> {
    let mut sc = suite_config(cfg);
    if let Some(n) = cfg.n_samples {
        sc.samples = n as usize;
    }
    Ok(suite_report(vec![suites::orbit_reduction(&sc)]))
}

pub fn stabilizer_check(cfg: &RunConfig) -> Result<Report, String> {
    let mut sc = suite_config(cfg);
    if let Some(n) = cfg.n_samples {
        sc.samples = n as usize;
    }
    let rows = suites::stabilizer_rows(&sc).map_err(|e| e.to_string())?;
    let mut table = Table::new(&[
        "p2",
        "p4",
        "q4",
        "p6",
        "stabilizer",
        "splitting_degree",
        "group_two_torsion",
        "division_two_torsion",
        "group_order",
    ]);
    let mut failures = Vec::new();
    for r in &rows {
        let mut row: Vec<String> = r.b.iter().map(|c| c.to_string()).collect();
        row.extend(
            [
                r.stabilizer,
                r.splitting_degree as usize,
                r.group_two_torsion,
                r.division_two_torsion,
                r.group_order,
            ]
            .map(|x| x.to_string()),
        );
        table.rows.push(row);
        if r.stabilizer != r.group_two_torsion || r.group_two_torsion != r.division_two_torsion {
            failures.push(format!(
                "b = {:?}: stabilizer {} vs 2-torsion {} / {}",
                r.b, r.stabilizer, r.group_two_torsion, r.division_two_torsion
            ));
        }
    }
    Ok(Report {
        result: to_value(&rows),
        table: Some(table),
        failures,
    })
}

#[derive(Serialize)]
struct CurveRow {
    index: u64,
    b: [String; 4],
    in_xd: bool,
    degree_bounds_ok: bool,
    disc_degree: Option<usize>,
    /// `place:ord` for every place where the discriminant vanishes.
    disc_divisor: Vec<String>,
    /// `place:type` at the places of bad reduction.
    bad_places: Vec<String>,
    /// `deg L` of the minimal model.
    l_degree: Option<i64>,
    /// `#E(K)[2]` over `F_q(t)`.
    two_torsion: Option<usize>,
    /// Fibre at `t = 0`: point count and 2-torsion when smooth.
    fibre_points: Option<u64>,
    fibre_two_torsion: Option<usize>,
}

/// Random sections of `B_D`: membership in `X_D`, discriminant divisor,
/// reduction types, minimal model, 2-torsion over `F_q(t)`, and the group
/// of the fibre at `t = 0`.
pub fn curves(cfg: &RunConfig) -> Result<Report, String> {
    let p = cfg.p.unwrap_or(5);
    let m = cfg.m.unwrap_or(1);
    let d = cfg.d.unwrap_or(1);
    let n = cfg.n_samples.unwrap_or(20);
    let max_q = cfg.max_q.unwrap_or(DEFAULT_MAX_Q);
    let k = Gf::new(p, m).map_err(|e| e.to_string())?;
    if k.characteristic() < 5 {
        return Err(format!("characteristic {} is below 5", k.characteristic()));
    }
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for i in 0..n {
        let b = random_section(&k, d, &mut stream(cfg.seed(), job::CURVES, i));
        let mem = xd_membership(&k, &b, d);
        let nonsingular = mem.disc_degree.is_some();
        let md = if nonsingular {
            minimal_data(&k, &b.map(|c| RatFunc::from_poly(&k, c.clone()))).ok()
        } else {
            None
        };
        let two_torsion = if nonsingular {
            Some(two_torsion_over_function_field(&k, &b).map_err(|e| e.to_string())?)
        } else {
            None
        };
        let fibre = b.map(|c| c.first().copied().unwrap_or(0));
        let (fibre_points, fibre_two_torsion) = if k.order() <= max_q && !k.is_zero(&quartic_disc(&k, &fibre)) {
            let g = curve_group(&k, &fibre, max_q).map_err(|e| e.to_string())?;
            if cfg.oracle {
                let w = to_weierstrass(&k, &fibre).map_err(|e| e.to_string())?;
                if w.two_torsion_count(&k) != g.two_torsion {
                    failures.push(format!("sample {i}: 2-torsion of the fibre disagrees between models"));
                }
                let short_points = w.points(&k).len() as u64;
                if short_points != g.n_points {
                    failures.push(format!("sample {i}: point counts disagree between models"));
                }
            }
            (Some(g.n_points), Some(g.two_torsion))
        } else {
            (None, None)
        };
        if cfg.oracle && mem.in_xd {
            let total: i64 = mem.disc_divisor.iter().map(|(v, e)| e * v.degree() as i64).sum();
            if total != 24 * d as i64 {
                failures.push(format!("sample {i}: discriminant divisor has degree {total}"));
            }
        }
        let comps = b.to_array();
        rows.push(CurveRow {
            index: i,
            b: [0, 1, 2, 3].map(|j| format_poly(&comps[j], "t")),
            in_xd: mem.in_xd,
            degree_bounds_ok: mem.degree_bounds_ok,
            disc_degree: mem.disc_degree,
            disc_divisor: mem
                .disc_divisor
                .iter()
                .map(|(v, e)| format!("{}:{e}", format_place(v)))
                .collect(),
            bad_places: mem
                .kodaira
                .iter()
                .map(|(v, t)| format!("{}:{t:?}", format_place(v)))
                .collect(),
            l_degree: md.map(|m| m.l_degree),
            two_torsion,
            fibre_points,
            fibre_two_torsion,
        });
    }
    let mut table = Table::new(&[
        "index",
        "p2",
        "p4",
        "q4",
        "p6",
        "in_xd",
        "disc_degree",
        "disc_divisor",
        "bad_places",
        "l_degree",
        "two_torsion",
        "fibre_points",
        "fibre_two_torsion",
    ]);
    let opt = |x: Option<String>| x.unwrap_or_default();
    for r in &rows {
        let mut row = vec![r.index.to_string()];
        row.extend(r.b.iter().cloned());
        row.extend([
            r.in_xd.to_string(),
            opt(r.disc_degree.map(|x| x.to_string())),
            r.disc_divisor.join(" "),
            r.bad_places.join(" "),
            opt(r.l_degree.map(|x| x.to_string())),
            opt(r.two_torsion.map(|x| x.to_string())),
            opt(r.fibre_points.map(|x| x.to_string())),
            opt(r.fibre_two_torsion.map(|x| x.to_string())),
        ]);
        table.rows.push(row);
    }
    let accepted = rows.iter().filter(|r| r.in_xd).count();
    Ok(Report {
        result: json!({ "q": k.order(), "d": d, "in_xd": accepted, "samples": n, "rows": to_value(&rows) }),
        table: Some(table),
        failures,
    })
}

/// The boundary table with tail bounds at `(q, d)`.
pub fn cusp_table(cfg: &RunConfig) -> Result<Report, String> {
    let q = cfg.q.or(cfg.p).unwrap_or(23);
    let d = cfg.d.unwrap_or(1) as i64;
    let truncation = cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let rows = verify_cusp_table()?;
    let check = suites::cusp_table(&suite_config(cfg));
    let mut header = CuspRow::csv_header();
    header.extend(["tail_bound", "tail_bound_limit"]);
    let mut table = Table::new(&header);
    let mut bounds = Vec::new();
    for row in &rows {
        let b = boundary_tail_bound(row, q, d, truncation)?;
        let mut rec = row.csv_record();
        rec.push(format!("{:e}", b.bound));
        rec.push(format!("{:e}", b.leading_factor * b.lattice_sum_limit));
        table.rows.push(rec);
        bounds.push(b);
    }
    Ok(Report {
        result: json!({ "q": q, "d": d, "truncation": truncation, "rows": to_value(&rows), "tail_bounds": to_value(&bounds), "check": to_value(&check) }),
        table: Some(table),
        failures: check.failures,
    })
}

/// Trivial-class slopes for all `w` in `W_0` and `deg D = 1..=d`.
pub fn geography(cfg: &RunConfig) -> Result<Report, String> {
    let dmax = cfg.d.unwrap_or(3) as i64;
    if dmax < 1 {
        return Err("--d must be positive".into());
    }
    let mut table = Table::new(&[
        "w",
        "d",
        "sigma",
        "hn_slopes",
        "positive",
        "lowest",
        "lowest_per_deg_d",
        "char_bound",
    ]);
    let mut all = Vec::new();
    let mut failures = Vec::new();
    for w in W0::ALL {
        for d in 1..=dmax {
            let s = trivial_inv_slopes(w, d)?;
            if !s.positivity || s.lowest >= num_rational::Rational64::from_integer(0) {
                failures.push(format!(
                    "{} d={d}: positivity {} lowest {}",
                    s.w, s.positivity, s.lowest
                ));
            }
            table.rows.push(vec![
                s.w.to_string(),
                d.to_string(),
                s.sigma.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                s.hn.iter()
                    .map(|(sl, m)| format!("{sl}^{m}"))
                    .collect::<Vec<_>>()
                    .join(" "),
                s.positivity.to_string(),
                s.lowest.to_string(),
                s.lowest_constant.to_string(),
                s.char_bound.to_string(),
            ]);
            all.push(s);
        }
    }
    Ok(Report {
        result: json!({ "slopes": to_value(&all), "stated_lowest_per_deg_d": "-2" }),
        table: Some(table),
        failures,
    })
}

/// Local densities at `q`, the truncated global product and, on request,
/// the Monte Carlo estimates and brute-force oracles.
pub fn densities(cfg: &RunConfig) -> Result<Report, String> {
    let q = cfg.q.or(cfg.p).unwrap_or(5);
    let truncation = cfg.truncation.unwrap_or(6);
    let seed = cfg.seed();
    let report = densities::density_report(q, cfg.n_samples.map(|n| (n, seed))).map_err(|e| e.to_string())?;
    let mut failures = Vec::new();
    if report.identity_residual != "0/1" {
        failures.push(format!("identity residual {}", report.identity_residual));
    }
    if report.mc_within_tolerance == Some(false) {
        failures.push("beta Monte Carlo outside 4 standard errors".into());
    }
    let k = densities::field_of_order(q).map_err(|e| e.to_string())?;
    let product = if k.degree() == 1 {
        Some(densities::delta_b_truncated(q, truncation).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let delta_mc = match (cfg.d, cfg.n_samples, &product) {
        (Some(d), Some(n), Some(prod)) => {
            let mc = densities::delta_b_monte_carlo(&k, d, n, seed).map_err(|e| e.to_string())?;
            if !mc.agrees(prod.value, densities::MC_SIGMAS, prod.tail_bound) {
                failures.push(format!(
                    "X_D fraction {} +- {} vs product {}",
                    mc.mean, mc.stderr, prod.value
                ));
            }
            Some(mc)
        }
        _ => None,
    };
    let mut oracle = serde_json::Map::new();
    if cfg.oracle {
        if q <= 7 {
            let lift = densities::alpha_lift(&k).map_err(|e| e.to_string())?;
            let brute = densities::alpha_exhaustive(&k).map_err(|e| e.to_string())?;
            oracle.insert(
                "alpha_exhaustive".into(),
                json!(densities::ratio_string(&brute.alpha())),
            );
            if lift != brute {
                failures.push("alpha: lift strategy differs from exhaustive enumeration".into());
            }
            let so4 = densities::so4_order_exhaustive(&k);
            oracle.insert("so4_exhaustive".into(), json!(so4.to_string()));
            if so4 != densities::so4_order_formula(q) {
                failures.push("#SO4 enumeration differs from the formula".into());
            }
        }
        let closed = densities::alpha_closed_form(q);
        oracle.insert("alpha_closed_form".into(), json!(densities::ratio_string(&closed)));
        if densities::ratio_string(&closed) != report.alpha {
            failures.push("alpha differs from the closed form".into());
        }
    }
    let mut table = Table::new(&["quantity", "exact", "value"]);
    table
        .rows
        .push(vec!["alpha".into(), report.alpha.clone(), report.alpha_f64.to_string()]);
    table
        .rows
        .push(vec!["vol_G".into(), report.vol_g.clone(), report.vol_g_f64.to_string()]);
    table
        .rows
        .push(vec!["beta".into(), report.beta.clone(), report.beta_f64.to_string()]);
    table.rows.push(vec![
        "identity_residual".into(),
        report.identity_residual.clone(),
        String::new(),
    ]);
    if let Some(mc) = &report.mc_estimate {
        table.rows.push(vec![
            "beta_mc".into(),
            format!("{}/{}", mc.hits, mc.n),
            format!("{} +- {}", mc.mean, mc.stderr),
        ]);
    }
    if let Some(p) = &product {
        table.rows.push(vec![
            format!("delta_B_truncated_{}", p.truncation),
            String::new(),
            p.value.to_string(),
        ]);
        table.rows.push(vec![
            "delta_B_tail_bound".into(),
            String::new(),
            p.tail_bound.to_string(),
        ]);
    }
    if let Some(mc) = &delta_mc {
        table.rows.push(vec![
            "delta_B_mc".into(),
            format!("{}/{}", mc.hits, mc.n),
            format!("{} +- {}", mc.mean, mc.stderr),
        ]);
    }
    for (key, v) in &oracle {
        table.rows.push(vec![
            format!("oracle_{key}"),
            v.as_str().unwrap_or_default().to_string(),
            String::new(),
        ]);
    }
    Ok(Report {
        result: json!({
            "report": to_value(&report),
            "delta_b_truncated": to_value(&product),
            "delta_b_mc": to_value(&delta_mc),
            "oracle": Value::Object(oracle),
        }),
        table: Some(table),
        failures,
    })
}

/// The full acceptance suite; `--n-samples` replaces the Monte Carlo sizes
/// and `--d` the degree of the `X_D` Monte Carlo.
pub fn all(cfg: &RunConfig) -> Result<Report, String> {
    let mut sc = suite_config(cfg);
    if let Some(n) = cfg.n_samples {
        sc.n_beta = n;
        sc.n_delta = n;
    }
    if let Some(d) = cfg.d {
        sc.delta_d = d;
    }
    let outcomes = suites::all_suites().into_iter().map(|(_, f)| f(&sc)).collect();
    Ok(suite_report(outcomes))
}
