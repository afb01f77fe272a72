//! WebAssembly bindings for the browser demo. Every export takes plain
//! strings and numbers and returns a JSON string; errors surface as a thrown
//! string on the JavaScript side.

// Negated comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use wasm_bindgen::prelude::*;
use wcs_core::dro::{frontier, gen_mixture_demand, Decision, FrontierProblem, NewsvendorParams};
use wcs_core::{riskstats, sensitivity, worstcase, Phi, Scenario, UncertaintyFamily};

/// Families shown in the demo, keyed by the names the page uses.
pub const FAMILIES: [&str; 6] = ["chi2", "kl", "tv", "budgeted", "combo", "box"];

const COMBO_ALPHA: f64 = 0.9;

pub fn family(name: &str) -> Result<UncertaintyFamily, String> {
    Ok(match name {
        "chi2" => UncertaintyFamily::SmoothPhi { phi: Phi::ModifiedChi2 },
        "kl" => UncertaintyFamily::SmoothPhi { phi: Phi::Kl },
        "tv" => UncertaintyFamily::TotalVariation,
        "budgeted" => UncertaintyFamily::Budgeted,
        "combo" => UncertaintyFamily::Combination { alpha: COMBO_ALPHA },
        "box" => UncertaintyFamily::SymmetricBox,
        other => return Err(format!("unknown family '{other}'")),
    })
}

/// Parses `"1, 5, 3"` or one value per line.
pub fn parse_numbers(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("cannot parse '{t}'")))
        .collect()
}

fn scenario(costs: &str, probs: &str) -> Result<Scenario, String> {
    let costs = parse_numbers(costs)?;
    let probs = parse_numbers(probs)?;
    let probs = if probs.is_empty() { None } else { Some(probs) };
    Scenario::new(costs, probs).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    eps: f64,
    value: f64,
    /// First-order approximation `E + S g(eps)`.
    linear: f64,
}

#[derive(Serialize)]
struct Curve {
    mean: f64,
    sensitivity: f64,
    growth: &'static str,
    points: Vec<CurvePoint>,
}

/// `V(eps)` on `points` evenly spaced radii in `[0, eps_max]` next to its
/// first-order approximation.
pub fn value_curve(costs: &str, probs: &str, family_name: &str, eps_max: f64, points: usize) -> Result<String, String> {
    let s = scenario(costs, probs)?;
    let fam = family(family_name)?;
    if !(eps_max > 0.0) || !eps_max.is_finite() || points < 2 {
        return Err("need eps_max > 0 and at least two points".into());
    }
    let sens = sensitivity::sensitivity(&s, fam).map_err(|e| e.to_string())?;
    let mean = riskstats::mean(&s);
    let points = (0..points)
        .map(|i| {
            let eps = eps_max * i as f64 / (points - 1) as f64;
            let wc = worstcase::worst_case(&s, fam, eps).map_err(|e| e.to_string())?;
            Ok(CurvePoint { eps, value: wc.value, linear: mean + sens.value * sens.growth.apply(eps) })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&Curve { mean, sensitivity: sens.value, growth: sens.growth.label(), points })
}

#[derive(Serialize)]
struct Row {
    family: &'static str,
    growth: &'static str,
    sensitivity: f64,
}

/// Sensitivity of every demo family for one scenario.
pub fn sensitivity_table(costs: &str, probs: &str) -> Result<String, String> {
    let s = scenario(costs, probs)?;
    let rows = FAMILIES
        .iter()
        .map(|&name| {
            let r = sensitivity::sensitivity(&s, family(name)?).map_err(|e| e.to_string())?;
            Ok(Row { family: name, growth: r.growth.label(), sensitivity: r.value })
        })
        .collect::<Result<Vec<_>, String>>()?;
    to_json(&rows)
}

#[derive(Serialize)]
struct NewsvendorPoint {
    eps: f64,
    order: f64,
    nominal_mean: f64,
    sensitivity: f64,
}

/// Robust newsvendor orders for `points` radii in `[0, eps_max]` on a
/// generated bimodal demand sample, scored by nominal mean cost and by the
/// sensitivity of the same family.
pub fn newsvendor_frontier(n: usize, seed: u64, family_name: &str, eps_max: f64, points: usize) -> Result<String, String> {
    let fam = family(family_name)?;
    if !(eps_max > 0.0) || !eps_max.is_finite() || points < 2 {
        return Err("need eps_max > 0 and at least two points".into());
    }
    let params = NewsvendorParams::new(10.0, 2.0, 0.0, 4.0).map_err(|e| e.to_string())?;
    let demand = gen_mixture_demand(n, 10.0, 100.0, 0.9, seed).map_err(|e| e.to_string())?;
    let demand = Scenario::uniform(demand).map_err(|e| e.to_string())?;
    let eps: Vec<f64> = (0..points).map(|i| eps_max * i as f64 / (points - 1) as f64).collect();
    let front = frontier(FrontierProblem::Newsvendor { params: &params, demand: &demand }, fam, &eps, fam)
        .map_err(|e| e.to_string())?;
    let rows: Vec<NewsvendorPoint> = front
        .into_iter()
        .map(|p| NewsvendorPoint {
            eps: p.eps,
            order: match p.decision {
                Decision::Order(x) => x,
                Decision::Weights(_) => f64::NAN,
            },
            nominal_mean: p.nominal_mean,
            sensitivity: p.sensitivity,
        })
        .collect();
    to_json(&rows)
}

#[wasm_bindgen(js_name = valueCurve)]
pub fn value_curve_js(costs: &str, probs: &str, family: &str, eps_max: f64, points: usize) -> Result<String, JsValue> {
    value_curve(costs, probs, family, eps_max, points).map_err(JsValue::from)
}

#[wasm_bindgen(js_name = sensitivityTable)]
pub fn sensitivity_table_js(costs: &str, probs: &str) -> Result<String, JsValue> {
    sensitivity_table(costs, probs).map_err(JsValue::from)
}

#[wasm_bindgen(js_name = newsvendorFrontier)]
pub fn newsvendor_frontier_js(n: usize, seed: u32, family: &str, eps_max: f64, points: usize) -> Result<String, JsValue> {
    newsvendor_frontier(n, u64::from(seed), family, eps_max, points).map_err(JsValue::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn parses_commas_and_lines() {
        assert_eq!(parse_numbers("1, 5\n-3").unwrap(), vec![1.0, 5.0, -3.0]);
        assert!(parse_numbers("1,x").is_err());
    }

    #[test]
    fn curve_starts_at_mean_and_rises() {
        let v: Value = serde_json::from_str(&value_curve("1,5,3", "", "tv", 1.0, 11).unwrap()).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 11);
        assert!((pts[0]["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
        assert!((pts[5]["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
        assert!((pts[10]["value"].as_f64().unwrap() - 14.0 / 3.0).abs() < 1e-12);
        assert_eq!(v["sensitivity"], 2.0);
    }

    #[test]
    fn table_covers_families() {
        let v: Value = serde_json::from_str(&sensitivity_table("0,10", "0.5,0.5").unwrap()).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), FAMILIES.len());
        let budgeted = rows.iter().find(|r| r["family"] == "budgeted").unwrap();
        assert_eq!(budgeted["sensitivity"], 5.0);
        let chi2 = rows.iter().find(|r| r["family"] == "chi2").unwrap();
        assert!((chi2["sensitivity"].as_f64().unwrap() - 50f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn newsvendor_frontier_trades_mean_for_sensitivity() {
        let v: Value = serde_json::from_str(&newsvendor_frontier(60, 42, "budgeted", 0.5, 6).unwrap()).unwrap();
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 6);
        let sens: Vec<f64> = pts.iter().map(|p| p["sensitivity"].as_f64().unwrap()).collect();
        let mean: Vec<f64> = pts.iter().map(|p| p["nominal_mean"].as_f64().unwrap()).collect();
        assert!(sens.last().unwrap() <= &sens[0]);
        assert!(mean.iter().all(|m| *m >= mean[0] - 1e-9));
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(value_curve("1,2", "0.2,0.2", "tv", 1.0, 5).is_err());
        assert!(value_curve("1,2", "", "hellinger", 1.0, 5).is_err());
        assert!(newsvendor_frontier(10, 1, "tv", 0.0, 5).is_err());
    }
}
