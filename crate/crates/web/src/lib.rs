//! wasm-bindgen bindings for the static demo page in `www/`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use weyl_deform::dmod::{ModuleSpec, DEFAULT_MAX_DEGREE};
use weyl_deform::parse::{parse_weyl, print_weyl};
use weyl_deform::rep::family_by_label;
use weyl_deform::scalar::parse_scalar;
use weyl_deform::versal::{commutative_specialize, identify_specialization, specialize, CommutativePoint};

/// Product, sum and commutator of two Weyl algebra elements.
pub fn weyl_calc(a: &str, b: &str) -> Result<String, String> {
    let p = parse_weyl(a).map_err(|e| e.to_string())?;
    let q = parse_weyl(b).map_err(|e| e.to_string())?;
    let value = json!({
        "a": print_weyl(&p),
        "b": print_weyl(&q),
        "product": print_weyl(&(&p * &q)),
        "reversed": print_weyl(&(&q * &p)),
        "sum": print_weyl(&(&p + &q)),
        "commutator": print_weyl(&(&(&p * &q) - &(&q * &p))),
    });
    Ok(value.to_string())
}

/// Presentation and identification of the specialization at `T_{2,6,a}`.
pub fn t26_specialization(a: &str) -> Result<String, String> {
    let a = parse_scalar(a.trim()).map_err(|e| e.to_string())?;
    let t = family_by_label("T_2_6")
        .and_then(|f| f.instantiate(&[a]))
        .map_err(|e| e.to_string())?;
    let report = identify_specialization(&t, DEFAULT_MAX_DEGREE);
    let value = json!({
        "presentation": ModuleSpec::from_module(&specialize(&t)),
        "report": report,
    });
    Ok(value.to_string())
}

/// Identification of the commutative family at `(alpha, beta)`.
pub fn commutative_point(alpha: &str, beta: &str) -> Result<String, String> {
    let alpha = parse_scalar(alpha.trim()).map_err(|e| e.to_string())?;
    let beta = parse_scalar(beta.trim()).map_err(|e| e.to_string())?;
    let (module, report) = commutative_specialize(&CommutativePoint::new(alpha, beta), DEFAULT_MAX_DEGREE);
    let value = json!({
        "presentation": ModuleSpec::from_module(&module),
        "report": report,
    });
    Ok(value.to_string())
}

#[wasm_bindgen]
pub fn calc(a: &str, b: &str) -> Result<String, JsValue> {
    weyl_calc(a, b).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn specialize_t26(a: &str) -> Result<String, JsValue> {
    t26_specialization(a).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn commutative(alpha: &str, beta: &str) -> Result<String, JsValue> {
    commutative_point(alpha, beta).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn commutator_of_generators() {
        let v = parse(weyl_calc("d", "t").unwrap());
        assert_eq!(v["commutator"], "1");
        assert_eq!(v["product"], "t*d + 1");
    }

    #[test]
    fn calc_reports_syntax_errors() {
        assert!(weyl_calc("d +", "t").unwrap_err().contains("syntax"));
    }

    #[test]
    fn specialization_at_half() {
        let v = parse(t26_specialization("1/2").unwrap());
        assert_eq!(v["report"]["match"]["candidate"], "D/D(t*d - 1/2)");
        assert!(t26_specialization("0").is_err());
    }

    #[test]
    fn commutative_origin_splits() {
        let v = parse(commutative_point("0", "0").unwrap());
        assert_eq!(v["report"]["match"]["candidate"], "M1 + M2");
    }
}
