//! JSON reading and writing of morphisms.
//!
//! A file holds `{"domain": "+-", "terms": [...]}` where each term is either
//! an explicit diagram `{"coeff": "2/3", "slices": [{"pos": 0, "gen": "dot"}, ...]}`
//! or a macro `{"coeff": 1, "macro": "t", "params": {...}, "left": "+", "right": ""}`.
//! A bare `{"domain", "slices"}` object is read as a single diagram.
//! Generators are written as strings (`"dot"`, `"s"`, `"cup"`, `"cap"`,
//! `"lcup"`, `"lcap"`, `"ddot"`, `"ds"`, `"t"`, `"t'"`) or as objects
//! `{"token": {"z": "1"}}`, `{"dtoken": {...}}`, `{"dlcap": {"r": 0, "token": {...}}}`,
//! `{"dlcup": {...}}`.

use crate::diagram::{parse_word, word_str, Diagram, DiagramError, Gen, Morphism, Slice};
use crate::frobenius::{Element, FrobeniusAlgebra};
use crate::macros::{Deco, Heis, Orient};
use crate::scalar::Scalar;
use serde_json::{json, Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

fn fmt_err<T>(msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Format(msg.into()))
}

fn scalar(v: &Value) -> Result<Scalar, IoError> {
    Ok(serde_json::from_value(v.clone())?)
}

fn element(alg: &FrobeniusAlgebra, v: &Value) -> Result<Element, IoError> {
    let Some(obj) = v.as_object() else {
        return fmt_err("token labels are objects {symbol: coefficient}");
    };
    let mut e = alg.zero();
    for (sym, c) in obj {
        let Some(i) = alg.index_of(sym) else {
            return fmt_err(format!("unknown basis symbol {sym}"));
        };
        e[i] += &scalar(c)?;
    }
    Ok(e)
}

fn element_json(alg: &FrobeniusAlgebra, f: &[Scalar]) -> Value {
    let mut m = Map::new();
    for (i, c) in f.iter().enumerate() {
        if !c.is_zero() {
            m.insert(alg.basis[i].symbol.clone(), json!(c));
        }
    }
    Value::Object(m)
}

fn gen_from_json(alg: &FrobeniusAlgebra, v: &Value) -> Result<Gen, IoError> {
    if let Some(s) = v.as_str() {
        return Ok(match s {
            "dot" => Gen::Dot,
            "s" => Gen::Crossing,
            "cup" => Gen::Cup,
            "cap" => Gen::Cap,
            "lcup" => Gen::LeftCup,
            "lcap" => Gen::LeftCap,
            "ddot" => Gen::DownDot,
            "ds" => Gen::DownCrossing,
            "t" => Gen::TCross,
            "t'" => Gen::TCrossPrime,
            other => return fmt_err(format!("unknown generator {other}")),
        });
    }
    let Some((key, body)) = v.as_object().and_then(|o| o.iter().next()) else {
        return fmt_err("generator must be a string or a one-key object");
    };
    match key.as_str() {
        "token" => Ok(Gen::Token(element(alg, body)?)),
        "dtoken" => Ok(Gen::DownToken(element(alg, body)?)),
        "dlcap" | "dlcup" => {
            let r = body.get("r").and_then(Value::as_u64).unwrap_or(0) as u32;
            let f = match body.get("token") {
                Some(t) => element(alg, t)?,
                None => alg.unit().clone(),
            };
            Ok(if key == "dlcap" { Gen::DecLeftCap(r, f) } else { Gen::DecLeftCup(r, f) })
        }
        other => fmt_err(format!("unknown generator {other}")),
    }
}

fn gen_to_json(alg: &FrobeniusAlgebra, g: &Gen) -> Value {
    match g {
        Gen::Token(f) => json!({ "token": element_json(alg, f) }),
        Gen::DownToken(f) => json!({ "dtoken": element_json(alg, f) }),
        Gen::DecLeftCap(r, f) => json!({ "dlcap": { "r": r, "token": element_json(alg, f) } }),
        Gen::DecLeftCup(r, f) => json!({ "dlcup": { "r": r, "token": element_json(alg, f) } }),
        other => json!(other.name()),
    }
}

fn slices_from_json(alg: &FrobeniusAlgebra, domain: &str, v: &Value) -> Result<Diagram, IoError> {
    let Some(arr) = v.as_array() else {
        return fmt_err("slices must be an array");
    };
    let mut slices = Vec::with_capacity(arr.len());
    for s in arr {
        let Some(pos) = s.get("pos").and_then(Value::as_u64) else {
            return fmt_err("slice without integer pos");
        };
        let Some(g) = s.get("gen") else {
            return fmt_err("slice without gen");
        };
        slices.push(Slice { pos: pos as usize, gen: gen_from_json(alg, g)? });
    }
    let d = Diagram { domain: parse_word(domain)?, slices };
    d.check()?;
    Ok(d)
}

fn param_i64(p: &Value, key: &str, default: i64) -> Result<i64, IoError> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => v.as_i64().ok_or_else(|| IoError::Format(format!("parameter {key} must be an integer"))),
    }
}

fn param_elem(h: &Heis, p: &Value, key: &str) -> Result<Element, IoError> {
    match p.get(key) {
        None => Ok(h.one()),
        Some(v) => element(&h.alg, v),
    }
}

fn decos(h: &Heis, v: Option<&Value>) -> Result<Vec<Deco>, IoError> {
    let Some(v) = v else { return Ok(vec![]) };
    let Some(arr) = v.as_array() else {
        return fmt_err("bubble legs are arrays of decorations");
    };
    arr.iter()
        .map(|x| {
            if let Some(n) = x.get("dots").and_then(Value::as_u64) {
                Ok(Deco::Dots(n as u32))
            } else if let Some(t) = x.get("token") {
                Ok(Deco::Token(element(&h.alg, t)?))
            } else {
                fmt_err("decoration must be {dots: n} or {token: {...}}")
            }
        })
        .collect()
}

/// Names accepted by [`macro_morphism`].
pub const MACROS: &[&str] = &[
    "t",
    "t'",
    "t-def",
    "t'-alt",
    "ddot",
    "dtoken",
    "ds",
    "lcup-def",
    "lcap-def",
    "cbubble",
    "ccbubble",
    "neg-cbubble",
    "neg-ccbubble",
    "bubble",
    "central-bubble",
    "right-curl",
    "left-curl",
    "zigzag-right-up",
    "zigzag-right-down",
    "zigzag-left-up",
    "zigzag-left-down",
];

/// Expands a named macro. Bubble macros take `dots` and `token`; curls take
/// `r`; `bubble` takes `orient` ("cw"/"ccw") and `left`/`right` decoration lists.
pub fn macro_morphism(h: &Heis, name: &str, p: &Value) -> Result<Morphism, IoError> {
    let dots = param_i64(p, "dots", 0)?;
    let r = param_i64(p, "r", 0)?;
    let nonneg = |x: i64| -> Result<u32, IoError> {
        u32::try_from(x).map_err(|_| IoError::Diagram(DiagramError::ParamOutOfRange(format!("{x} < 0"))))
    };
    Ok(match name {
        "t" => h.t(),
        "t'" => h.tp(),
        "t-def" => h.t_def(),
        "t'-alt" => h.tp_alt(),
        "ddot" => h.ddot_def(),
        "dtoken" => h.dtoken_def(&param_elem(h, p, "token")?),
        "ds" => h.ds_def(),
        "lcup-def" => h.lcup_def(),
        "lcap-def" => h.lcap_def(),
        "cbubble" => h.cw(nonneg(dots)? as i64, &param_elem(h, p, "token")?),
        "ccbubble" => h.ccw(nonneg(dots)? as i64, &param_elem(h, p, "token")?),
        "neg-cbubble" => h.cw(dots, &param_elem(h, p, "token")?),
        "neg-ccbubble" => h.ccw(dots, &param_elem(h, p, "token")?),
        "bubble" => {
            let o = match p.get("orient").and_then(Value::as_str) {
                Some("cw") | None => Orient::Cw,
                Some("ccw") => Orient::Ccw,
                Some(o) => return fmt_err(format!("unknown orientation {o}")),
            };
            h.bubble(o, &decos(h, p.get("left"))?, &decos(h, p.get("right"))?)
        }
        "central-bubble" => h.central_bubble(&param_elem(h, p, "token")?),
        "right-curl" => h.right_curl(nonneg(r)?),
        "left-curl" => h.left_curl(nonneg(r)?),
        "zigzag-right-up" => h.zigzag_right_up(),
        "zigzag-right-down" => h.zigzag_right_down(),
        "zigzag-left-up" => h.zigzag_left_up(),
        "zigzag-left-down" => h.zigzag_left_down(),
        other => return fmt_err(format!("unknown macro {other}")),
    })
}

fn term_from_json(h: &Heis, domain: &str, t: &Value) -> Result<Morphism, IoError> {
    let coeff = match t.get("coeff") {
        Some(c) => scalar(c)?,
        None => Scalar::one(),
    };
    let m = if let Some(name) = t.get("macro").and_then(Value::as_str) {
        let left = parse_word(t.get("left").and_then(Value::as_str).unwrap_or(""))?;
        let right = parse_word(t.get("right").and_then(Value::as_str).unwrap_or(""))?;
        macro_morphism(h, name, t.get("params").unwrap_or(&Value::Null))?.whisker(&left, &right)
    } else if let Some(s) = t.get("slices") {
        let d = match t.get("domain").and_then(Value::as_str) {
            Some(own) => slices_from_json(&h.alg, own, s)?,
            None => slices_from_json(&h.alg, domain, s)?,
        };
        Morphism::from_diagram(d)
    } else {
        return fmt_err("term needs slices or macro");
    };
    if word_str(&m.domain) != domain {
        return Err(DiagramError::BoundaryMismatch { expected: domain.to_string(), found: word_str(&m.domain) }.into());
    }
    Ok(m.scaled(&coeff))
}

/// Reads a morphism from its JSON value.
pub fn morphism_from_value(h: &Heis, v: &Value) -> Result<Morphism, IoError> {
    if v.get("macro").is_some() {
        let dom = macro_morphism(h, v["macro"].as_str().unwrap_or(""), v.get("params").unwrap_or(&Value::Null))?;
        let left = v.get("left").and_then(Value::as_str).unwrap_or("");
        let right = v.get("right").and_then(Value::as_str).unwrap_or("");
        let domain = format!("{left}{}{right}", word_str(&dom.domain));
        return term_from_json(h, &domain, v);
    }
    let domain = v.get("domain").and_then(Value::as_str).unwrap_or("");
    parse_word(domain)?;
    if let Some(terms) = v.get("terms") {
        let Some(arr) = terms.as_array() else {
            return fmt_err("terms must be an array");
        };
        let mut out: Option<Morphism> = None;
        for t in arr {
            let m = term_from_json(h, domain, t)?;
            out = Some(match out {
                None => m,
                Some(acc) => {
                    if acc.codomain != m.codomain {
                        return Err(DiagramError::BoundaryMismatch {
                            expected: word_str(&acc.codomain),
                            found: word_str(&m.codomain),
                        }
                        .into());
                    }
                    acc.plus(&m)
                }
            });
        }
        return match out {
            Some(m) => Ok(m),
            None => {
                let cod = v.get("codomain").and_then(Value::as_str).unwrap_or(domain);
                Ok(Morphism::zero(parse_word(domain)?, parse_word(cod)?))
            }
        };
    }
    term_from_json(h, domain, v)
}

pub fn parse_morphism(h: &Heis, text: &str) -> Result<Morphism, IoError> {
    morphism_from_value(h, &serde_json::from_str(text)?)
}

/// Canonical JSON: explicit diagrams only, terms in the morphism's order.
pub fn morphism_to_value(alg: &FrobeniusAlgebra, m: &Morphism) -> Value {
    let terms: Vec<Value> = m
        .terms
        .iter()
        .map(|(d, c)| {
            let slices: Vec<Value> =
                d.slices.iter().map(|s| json!({ "pos": s.pos, "gen": gen_to_json(alg, &s.gen) })).collect();
            json!({ "coeff": c, "slices": slices })
        })
        .collect();
    json!({
        "domain": word_str(&m.domain),
        "codomain": word_str(&m.codomain),
        "terms": terms,
    })
}

pub fn morphism_to_string(alg: &FrobeniusAlgebra, m: &Morphism) -> String {
    serde_json::to_string_pretty(&morphism_to_value(alg, m)).expect("JSON values serialize")
}
