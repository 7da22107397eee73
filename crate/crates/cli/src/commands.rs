//! Subcommand implementations; each returns the JSON object to emit.

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use periodlab_core::gauss_manin::{circle_loop, monodromy_with_deviation, transport, MonodromyMatrix, LOOP_SIDES};
use periodlab_core::griffiths::{base_point, domain_dims, kodaira_spencer_count, DomainReport, HermitianCase};
use periodlab_core::hodge::{
    decomposition_from_filtration, elliptic_hs, real_structure, verify_polarization, weil_operator, HodgeFiltration,
    HodgeType,
};
use periodlab_core::modular::qseries::zeta;
use periodlab_core::modular::{
    eisenstein_lattice, eisenstein_q, full_modular_weight_check, j_classical, j_normalized, j_q_expansion, Lattice,
};
use periodlab_core::numerics::linalg::CMatrix;
use periodlab_core::numerics::{c, two_pi_i, ParamPath};
use periodlab_core::periods::{
    discriminant_of, khodaya_period_matrix, period_matrix, reduce_khodaya, KhodayaPoint, PeriodMatrix2,
    WeierstrassPoint, SIGMA,
};
use periodlab_core::poincare::{period_poincare, poincare_series_uhp, PartialSumsReport, Stabilizer};
use periodlab_core::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::parse;

pub fn cj(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn pm_json(p: &PeriodMatrix2) -> Value {
    json!([[cj(p.entries[0][0]), cj(p.entries[0][1])], [cj(p.entries[1][0]), cj(p.entries[1][1])]])
}

fn point_json(t: &WeierstrassPoint) -> Value {
    json!({ "t2": cj(t.t2), "t3": cj(t.t3) })
}

fn sigma_target() -> Complex {
    two_pi_i() * SIGMA
}

fn periods_object(t: &WeierstrassPoint, tol: f64) -> Result<Value> {
    let p = period_matrix(t, tol)?;
    Ok(json!({
        "command": "periods",
        "inputs": { "t2": cj(t.t2), "t3": cj(t.t3), "tol": tol },
        "period_matrix": pm_json(&p),
        "det": cj(p.det()),
        "tau": cj(p.tau()),
        "diagnostics": {
            "sigma": SIGMA,
            "det_error": (p.det() - sigma_target()).norm(),
            "discriminant": cj(t.discriminant()),
        },
    }))
}

pub fn periods(t: &WeierstrassPoint, tol: f64) -> Result<Value> {
    periods_object(t, tol)
}

pub fn tau(t: &WeierstrassPoint, tol: f64) -> Result<Value> {
    let p = period_matrix(t, tol)?;
    let tau = p.tau();
    let j = j_normalized(tau, tol)?;
    let t2c = t.t2 * t.t2 * t.t2;
    let expected = t2c / (t2c - t.t3 * t.t3 * 27.0);
    Ok(json!({
        "command": "tau",
        "inputs": { "t2": cj(t.t2), "t3": cj(t.t3), "tol": tol },
        "tau": cj(tau),
        "j": cj(j),
        "diagnostics": { "j_from_parameters": cj(expected), "j_deviation": (j - expected).norm() },
    }))
}

/// Grid rows in deterministic order, computed in parallel.
pub fn sweep<F>(t2s: &[Complex], t3s: &[Complex], header: &[&str], row: F) -> (Vec<String>, Vec<Value>)
where
    F: Fn(&WeierstrassPoint) -> Result<Vec<f64>> + Sync,
{
    let grid: Vec<WeierstrassPoint> =
        t2s.iter().flat_map(|&a| t3s.iter().map(move |&b| WeierstrassPoint::new(a, b))).collect();
    let results: Vec<(WeierstrassPoint, std::result::Result<Vec<f64>, String>)> =
        grid.par_iter().map(|t| (*t, row(t).map_err(|e| e.to_string()))).collect();
    let mut lines = vec![format!("t2_re,t2_im,t3_re,t3_im,{},status", header.join(","))];
    let mut objects = Vec::with_capacity(results.len());
    for (t, r) in results {
        let (values, status) = match r {
            Ok(v) => (v, "ok".to_string()),
            Err(e) => (vec![f64::NAN; header.len()], e.replace([',', '\n'], ";")),
        };
        let cells: Vec<String> = [t.t2.re, t.t2.im, t.t3.re, t.t3.im].iter().chain(values.iter()).map(|v| format!("{v:?}")).collect();
        lines.push(format!("{},{}", cells.join(","), status));
        let named: serde_json::Map<String, Value> =
            header.iter().zip(values.iter()).map(|(h, v)| (h.to_string(), json!(v))).collect();
        objects.push(json!({ "t2": cj(t.t2), "t3": cj(t.t3), "values": named, "status": status }));
    }
    (lines, objects)
}

pub const PERIOD_COLUMNS: [&str; 10] =
    ["p11_re", "p11_im", "p12_re", "p12_im", "p21_re", "p21_im", "p22_re", "p22_im", "det_re", "det_im"];

pub fn period_row(t: &WeierstrassPoint, tol: f64) -> Result<Vec<f64>> {
    let p = period_matrix(t, tol)?;
    let e = p.entries;
    let d = p.det();
    Ok(vec![e[0][0].re, e[0][0].im, e[0][1].re, e[0][1].im, e[1][0].re, e[1][0].im, e[1][1].re, e[1][1].im, d.re, d.im])
}

pub const TAU_COLUMNS: [&str; 4] = ["tau_re", "tau_im", "j_re", "j_im"];

pub fn tau_row(t: &WeierstrassPoint, tol: f64) -> Result<Vec<f64>> {
    let tau = period_matrix(t, tol)?.tau();
    let j = j_normalized(tau, tol)?;
    Ok(vec![tau.re, tau.im, j.re, j.im])
}

fn clearance_for(points: &[Vec<Complex>]) -> f64 {
    let scale = points.iter().map(|p| WeierstrassPoint::from_slice(p).scale()).fold(0.0, f64::max);
    1e-9 * scale.max(1.0)
}

fn monodromy_json(m: &MonodromyMatrix) -> Value {
    json!(m.entries)
}

/// A JSON array of `[t2, t3]` waypoints, or
/// `{"loop": {"center": [t2, t3], "radius": r, "turns": k}}`.
pub fn load_path(file: &Path) -> Result<ParamPath> {
    let v = parse::read_json(file)?;
    if let Some(lp) = v.get("loop") {
        let center = lp.get("center").and_then(Value::as_array).ok_or_else(|| anyhow!("loop needs a center"))?;
        if center.len() != 2 {
            bail!("loop center must be [t2, t3]");
        }
        let t = WeierstrassPoint::new(parse::complex_value(&center[0])?, parse::complex_value(&center[1])?);
        let radius = lp.get("radius").and_then(Value::as_f64).ok_or_else(|| anyhow!("loop needs a radius"))?;
        let turns = lp.get("turns").and_then(Value::as_i64).unwrap_or(1);
        let turns = i32::try_from(turns).map_err(|_| anyhow!("turns out of range"))?;
        return Ok(circle_loop(&t, radius, turns)?);
    }
    let list = v.get("waypoints").unwrap_or(&v).as_array().ok_or_else(|| anyhow!("path file must hold an array of waypoints"))?;
    let mut points = Vec::with_capacity(list.len());
    for w in list {
        let pair = w.as_array().filter(|a| a.len() == 2).ok_or_else(|| anyhow!("waypoint must be [t2, t3], got {w}"))?;
        points.push(vec![parse::complex_value(&pair[0])?, parse::complex_value(&pair[1])?]);
    }
    let clearance = clearance_for(&points);
    Ok(ParamPath::new(points, clearance, discriminant_of)?)
}

pub fn pf_transport(path: &ParamPath, tol: f64) -> Result<Value> {
    let start = WeierstrassPoint::from_slice(path.start());
    let end = WeierstrassPoint::from_slice(path.end());
    let p0 = period_matrix(&start, tol)?;
    let p1 = transport(path, &p0, tol)?;
    let mut out = json!({
        "command": "pf-transport",
        "inputs": { "start": point_json(&start), "end": point_json(&end), "segments": path.num_segments(), "tol": tol },
        "start_matrix": pm_json(&p0),
        "end_matrix": pm_json(&p1),
        "det": cj(p1.det()),
        "diagnostics": { "det_drift": (p1.det() - p0.det()).norm(), "path_length": path.length(), "clearance": path.clearance() },
    });
    let scale = 1.0 + path.start().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if path.is_closed(1e-12 * scale) {
        let (m, deviation) = monodromy_with_deviation(path, &p0, tol)?;
        out["monodromy"] = monodromy_json(&m);
        out["diagnostics"]["integrality_deviation"] = json!(deviation);
    } else {
        let q = period_matrix(&end, tol)?;
        out["diagnostics"]["difference_to_default_continuation"] = json!(p1.max_abs_diff(&q));
    }
    Ok(out)
}

pub fn monodromy(center: &WeierstrassPoint, radius: f64, turns: i32, tol: f64) -> Result<Value> {
    let lp = circle_loop(center, radius, turns)?;
    let start = WeierstrassPoint::from_slice(lp.start());
    let p0 = period_matrix(&start, tol)?;
    let (m, deviation) = monodromy_with_deviation(&lp, &p0, tol)?;
    Ok(json!({
        "command": "monodromy",
        "inputs": { "center": point_json(center), "radius": radius, "turns": turns, "tol": tol },
        "matrix": monodromy_json(&m),
        "det": m.det(),
        "trace": m.trace(),
        "unipotent": m.is_unipotent(),
        "diagnostics": { "integrality_deviation": deviation, "base_point": point_json(&start), "polygon_sides": LOOP_SIDES * turns.unsigned_abs() as usize },
    }))
}

pub fn eisenstein(k: u32, lattice: &Lattice, weight_check: Option<(usize, u64)>, tol: f64) -> Result<Value> {
    let value = eisenstein_lattice(k, lattice, tol)?;
    let tau = lattice.tau();
    let mut out = json!({
        "command": "eisenstein",
        "inputs": { "k": k, "omega1": cj(lattice.omega1), "omega2": cj(lattice.omega2), "tol": tol },
        "value": cj(value),
        "diagnostics": {},
    });
    if k == 4 || k == 6 {
        // E_k(Z w1 + Z w2) = w2^{-k} E_k(Z tau + Z)
        let q = eisenstein_q(k, tau, 0)? * lattice.omega2.powi(-(k as i32));
        out["diagnostics"]["q_series_value"] = cj(q);
        out["diagnostics"]["q_series_difference"] = json!((q - value).norm());
    }
    if let Some((samples, seed)) = weight_check {
        let r = full_modular_weight_check(|l| eisenstein_lattice(k, l, tol), k as i32, samples, seed, 1e-8)?;
        out["diagnostics"]["weight_check"] =
            json!({ "samples": r.samples, "seed": seed, "max_deviation": r.max_deviation, "tol": r.tol, "pass": r.pass });
    }
    Ok(out)
}

pub fn j(tau: Complex, tol: f64) -> Result<Value> {
    let jp = j_normalized(tau, tol)?;
    let jc = j_classical(tau)?;
    Ok(json!({
        "command": "j",
        "inputs": { "tau": cj(tau), "tol": tol },
        "j_normalized": cj(jp),
        "j_classical": cj(jc),
        "diagnostics": { "ratio_deviation": (jp * 1728.0 - jc).norm() / jc.norm().max(1.0) },
    }))
}

pub fn j_qexp(terms: usize) -> Result<Value> {
    let s = j_q_expansion(terms)?;
    let coeffs: Vec<Value> = s.terms().into_iter().map(|(e, a)| json!([e, a])).collect();
    Ok(json!({
        "command": "j-qexp",
        "inputs": { "terms": terms },
        "valuation": s.valuation(),
        "precision": s.precision(),
        "coefficients": coeffs,
    }))
}

fn matrix_i64(v: &Value) -> Result<nalgebra::DMatrix<i64>> {
    let rows = v.as_array().ok_or_else(|| anyhow!("psi must be an array of rows"))?;
    let n = rows.len();
    let mut out = nalgebra::DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == n).ok_or_else(|| anyhow!("psi must be square"))?;
        for (j, x) in r.iter().enumerate() {
            out[(i, j)] = x.as_i64().ok_or_else(|| anyhow!("psi entries must be integers"))?;
        }
    }
    Ok(out)
}

/// `{"tau": z}` for an elliptic point, or
/// `{"weight": m, "hodge_numbers": [...], "psi": [[...]], "filtration": [F^m, ..., F^1]}`
/// with each level a list of column vectors of complex entries.
pub fn load_point(file: &Path) -> Result<(HodgeType, HodgeFiltration)> {
    let v = parse::read_json(file)?;
    if let Some(t) = v.get("tau") {
        return Ok(elliptic_hs(parse::complex_value(t)?)?);
    }
    let m = v.get("weight").and_then(Value::as_u64).ok_or_else(|| anyhow!("point file needs a weight"))?;
    let h: Vec<usize> = v
        .get("hodge_numbers")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("point file needs hodge_numbers"))?
        .iter()
        .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| anyhow!("Hodge numbers must be non-negative integers")))
        .collect::<Result<_>>()?;
    let psi = matrix_i64(v.get("psi").ok_or_else(|| anyhow!("point file needs psi"))?)?;
    let m = u32::try_from(m).map_err(|_| anyhow!("weight out of range"))?;
    let phi = HodgeType::new(m, h, psi)?;
    let levels = v.get("filtration").and_then(Value::as_array).ok_or_else(|| anyhow!("point file needs filtration"))?;
    let mu = phi.mu();
    let mut top_down = Vec::with_capacity(levels.len());
    for level in levels {
        let cols = level.as_array().ok_or_else(|| anyhow!("each level is a list of vectors"))?;
        let mut mat = CMatrix::zeros(mu, cols.len());
        for (j, col) in cols.iter().enumerate() {
            let col = col.as_array().filter(|c| c.len() == mu).ok_or_else(|| anyhow!("vectors must have {mu} entries"))?;
            for (i, z) in col.iter().enumerate() {
                mat[(i, j)] = parse::complex_value(z)?;
            }
        }
        top_down.push(mat);
    }
    let f = HodgeFiltration::from_top(top_down, &phi)?;
    Ok((phi, f))
}

fn case_name(c: HermitianCase) -> &'static str {
    match c {
        HermitianCase::Case1 => "Case1",
        HermitianCase::Case2 => "Case2",
        HermitianCase::No => "No",
    }
}

fn domain_json(r: &DomainReport) -> Value {
    json!({
        "dim_compact_dual": r.dim_compact_dual,
        "dim_D": r.dim_d,
        "dim_F0_lie": r.dim_f0_lie,
        "dim_horizontal": r.dim_horizontal,
        "hermitian_case": case_name(r.hermitian_case),
        "lie_filtration_dims": r.lie_dims,
    })
}

pub fn hodge_check(phi: &HodgeType, f: &HodgeFiltration) -> Result<Value> {
    let dec = decomposition_from_filtration(f, phi)?;
    let pol = verify_polarization(&dec, phi);
    let rs = real_structure(&dec, phi)?;
    let cm = weil_operator(&dec, phi)?;
    let weil: Vec<Vec<f64>> = (0..cm.nrows()).map(|i| (0..cm.ncols()).map(|j| cm[(i, j)]).collect()).collect();
    let dims = domain_dims(phi, f)?;
    Ok(json!({
        "command": "hodge-check",
        "inputs": { "weight": phi.weight(), "hodge_numbers": phi.hodge_numbers() },
        "polarized": pol.passed(),
        "first_relation": pol.first,
        "second_relation": pol.second,
        "riemann_relations": {
            "orthogonal": rs.relations.orthogonal,
            "j_invariant": rs.relations.j_invariant,
            "odd_positive": rs.relations.odd_positive,
            "even_positive": rs.relations.even_positive,
        },
        "weil_operator": weil,
        "domain": domain_json(&dims),
        "diagnostics": { "max_cross": pol.max_cross, "min_eigenvalue": pol.min_eigenvalue, "details": pol.details },
    }))
}

/// Standard Hodge type for the built-in base points.
pub fn standard_type(weight: u32, h: &[usize]) -> Result<HodgeType> {
    let phi = match (weight, h) {
        (1, [a, b]) if a == b => HodgeType::weight_one(*a)?,
        (2, [a, b, c]) if a == c => HodgeType::weight_two(*a, *b)?,
        (3, [1, 1, 1, 1]) => HodgeType::weight_three_cy()?,
        _ => return Err(periodlab_core::Error::UnsupportedType(format!("weight {weight}, h = {h:?}")).into()),
    };
    Ok(phi)
}

pub fn domain(phi: &HodgeType, point: Option<&HodgeFiltration>) -> Result<Value> {
    let owned;
    let f = match point {
        Some(f) => f,
        None => {
            owned = base_point(phi)?;
            &owned
        }
    };
    let r = domain_dims(phi, f)?;
    let mut out = domain_json(&r);
    out["command"] = json!("domain-dims");
    out["inputs"] = json!({ "weight": phi.weight(), "hodge_numbers": phi.hodge_numbers() });
    Ok(out)
}

pub fn ks_count(n: u64, d: u64) -> Result<Value> {
    let m = kodaira_spencer_count(n, d)?;
    Ok(json!({ "command": "ks-count", "inputs": { "n": n, "d": d }, "m": m }))
}

pub fn sums_json(r: &PartialSumsReport) -> Value {
    json!({
        "heights": r.heights,
        "partial_sums": r.partial_sums.iter().map(|z| cj(*z)).collect::<Vec<_>>(),
        "shell_mass": r.shell_mass,
        "value": cj(r.value()),
        "extrapolated": cj(r.extrapolated),
        "tail_estimate": r.tail_estimate,
        "tolerance": r.tolerance,
        "converged": r.converged,
        "decay": r.decay,
        "terms": r.terms,
    })
}

/// `det`, `x11^k` or `x21^k`, with the stabilizer each is invariant under.
pub enum Functional {
    Det,
    X11(i32),
    X21(i32),
}

impl Functional {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "det" {
            return Ok(Functional::Det);
        }
        let (name, power) = s.split_once('^').ok_or_else(|| anyhow!("unknown functional {s}"))?;
        let k: i32 = power.parse().map_err(|_| anyhow!("bad exponent in {s}"))?;
        match name {
            "x11" => Ok(Functional::X11(k)),
            "x21" => Ok(Functional::X21(k)),
            _ => bail!("unknown functional {s}; use det, x11^k or x21^k"),
        }
    }

    fn stabilizer(&self) -> Stabilizer {
        match self {
            Functional::Det => Stabilizer::Whole,
            Functional::X11(_) => Stabilizer::LowerTriangular,
            Functional::X21(_) => Stabilizer::UpperTriangular,
        }
    }

    fn eval(&self, x: &CMatrix) -> Complex {
        match self {
            Functional::Det => x.determinant(),
            Functional::X11(k) => x[(0, 0)].powi(*k),
            Functional::X21(k) => x[(1, 0)].powi(*k),
        }
    }

    fn decay(&self) -> Option<f64> {
        match self {
            Functional::Det => None,
            Functional::X11(k) | Functional::X21(k) => Some((-k - 2) as f64),
        }
    }
}

pub fn poincare_periods(functional: &str, t: &WeierstrassPoint, height: u32, tol: f64) -> Result<Value> {
    let fun = Functional::parse(functional)?;
    let pm = period_matrix(t, tol)?;
    let r = period_poincare(|x| fun.eval(x), &pm, fun.stabilizer(), height, fun.decay(), 1e-4)?;
    let mut out = json!({
        "command": "poincare",
        "inputs": { "functional": functional, "t2": cj(t.t2), "t3": cj(t.t3), "height": height, "tol": tol },
        "stabilizer": fun.stabilizer().name(),
        "series": sums_json(&r),
        "diagnostics": {},
    });
    if let Functional::X11(k) = fun {
        if k <= -4 && k % 2 == 0 {
            let e = eisenstein_lattice((-k) as u32, &Lattice::from_periods(&pm)?, tol)?;
            out["diagnostics"]["eisenstein"] = cj(e);
            out["diagnostics"]["ratio"] = cj(r.value() / e);
            out["diagnostics"]["expected_ratio"] = json!(1.0 / (2.0 * zeta((-k) as u32)));
        }
    }
    if let Functional::Det = fun {
        out["diagnostics"]["det_error"] = json!((r.value() - sigma_target()).norm());
    }
    Ok(out)
}

pub fn poincare_uhp(weight: i32, tau: Complex, height: u32, tol: f64) -> Result<Value> {
    let r = poincare_series_uhp(|_| c(1.0, 0.0), weight, tau, height, 1e-4)?;
    let mut out = json!({
        "command": "poincare",
        "inputs": { "functional": "one", "weight": weight, "tau": cj(tau), "height": height, "tol": tol },
        "stabilizer": Stabilizer::UpperTriangular.name(),
        "series": sums_json(&r),
        "diagnostics": {},
    });
    if weight >= 4 && weight % 2 == 0 {
        let e = eisenstein_lattice(weight as u32, &Lattice::from_tau(tau)?, tol)?;
        out["diagnostics"]["eisenstein"] = cj(e);
        out["diagnostics"]["scaled_value"] = cj(r.value() * (2.0 * zeta(weight as u32)));
    }
    Ok(out)
}

pub fn khodaya(k: &KhodayaPoint, tol: f64) -> Result<Value> {
    let (red, s) = reduce_khodaya(k)?;
    let p = khodaya_period_matrix(k, tol)?;
    let expected = sigma_target() / k.t0;
    Ok(json!({
        "command": "khodaya",
        "inputs": { "t0": cj(k.t0), "t1": cj(k.t1), "t2": cj(k.t2), "t3": cj(k.t3), "tol": tol },
        "reduced": point_json(&red),
        "scale": cj(s),
        "period_matrix": pm_json(&p),
        "det": cj(p.det()),
        "diagnostics": { "expected_det": cj(expected), "det_error": (p.det() - expected).norm() },
    }))
}
