//! Browser bindings. Each export is a thin wrapper over a plain function that
//! returns a JSON string, so the logic is testable natively.

use kleinprym::cli::parse_configuration;
use kleinprym::elliptic::{modular_lambda, tau_from_lambda};
use kleinprym::projective::{equivalent, normalize};
use kleinprym::prym::{prym_forward, prym_inverse_as, verify_prym};
use kleinprym::torsion::{classify_subgroup, enumerate_klein_subgroups};
use kleinprym::{Complex64, DEFAULT_TOLERANCE};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Prym period matrix of a configuration given as CLI-style JSON, with the
/// verification report and the round-trip verdict.
pub fn prym_report(input: &str) -> Result<String, String> {
    let value: Value = serde_json::from_str(input).map_err(|e| e.to_string())?;
    let cfg = parse_configuration(&value, None).map_err(|e| e.to_string())?;
    let normal = normalize(&cfg).map_err(|e| e.to_string())?;
    let result = prym_forward(&normal).map_err(|e| e.to_string())?;
    let report = verify_prym(&result.period_matrix, result.case, Some(&result.z), DEFAULT_TOLERANCE);
    let inverse = prym_inverse_as(&result.period_matrix, result.case, DEFAULT_TOLERANCE)
        .map_err(|e| e.to_string())?
        .to_marked();
    let roundtrip = equivalent(&inverse, &cfg).map_err(|e| e.to_string())?;
    let out = json!({
        "normalized": normal.to_marked(),
        "result": result,
        "checks": report,
        "all_checks_pass": report.passed(),
        "inverse": inverse,
        "roundtrip_equivalent": roundtrip,
    });
    Ok(out.to_string())
}

/// The Klein four-subgroups of the 2-torsion, each with its label.
pub fn subgroup_census() -> String {
    let rows: Vec<Value> = enumerate_klein_subgroups()
        .into_iter()
        .map(|g| json!({ "subgroup": g, "label": classify_subgroup(&g) }))
        .collect();
    let isotropic = rows.iter().filter(|r| r["subgroup"]["isotropic"] == true).count();
    json!({ "isotropic": isotropic, "non_isotropic": rows.len() - isotropic, "subgroups": rows }).to_string()
}

/// τ for the Legendre parameter `m`, and λ(τ) recomputed from theta series.
pub fn modular_pair(m_re: f64, m_im: f64) -> Result<String, String> {
    let m = Complex64::new(m_re, m_im);
    let tau = tau_from_lambda(m).map_err(|e| e.to_string())?.tau();
    let back = modular_lambda(tau).map_err(|e| e.to_string())?;
    Ok(json!({ "m": pair(m), "tau": pair(tau), "lambda": pair(back), "residual": (back - m).norm() }).to_string())
}

#[wasm_bindgen]
pub fn prym(input: &str) -> Result<String, JsValue> {
    prym_report(input).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn census() -> String {
    subgroup_census()
}

#[wasm_bindgen]
pub fn modular(m_re: f64, m_im: f64) -> Result<String, JsValue> {
    modular_pair(m_re, m_im).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prym_for_both_kinds() {
        for (input, d) in [
            (r#"{"b":[[2,0.5],[-1,1],[0.5,-2]],"kind":"triple"}"#, json!([1, 1, 4])),
            (r#"{"b":[[2,0.5],[-1,1],[0.5,-2]],"kind":"pair_partition"}"#, json!([1, 2, 2])),
        ] {
            let v: Value = serde_json::from_str(&prym_report(input).unwrap()).unwrap();
            assert_eq!(v["result"]["D"], d);
            assert_eq!(v["all_checks_pass"], true);
            assert_eq!(v["roundtrip_equivalent"], true);
        }
    }

    #[test]
    fn prym_rejects_bad_input() {
        assert!(prym_report("{").is_err());
        assert!(prym_report(r#"{"b":[[0,0],[2,0],[3,0]],"kind":"triple"}"#).is_err());
    }

    #[test]
    fn census_counts() {
        let v: Value = serde_json::from_str(&subgroup_census()).unwrap();
        assert_eq!(v["isotropic"], 15);
        assert_eq!(v["non_isotropic"], 20);
    }

    #[test]
    fn modular_round_trip() {
        let v: Value = serde_json::from_str(&modular_pair(0.5, 0.0).unwrap()).unwrap();
        assert!((v["tau"][1].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(v["residual"].as_f64().unwrap() < 1e-10);
        assert!(modular_pair(1.0, 0.0).is_err());
    }
}
