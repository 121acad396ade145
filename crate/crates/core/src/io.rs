//! JSON encodings for generating sets, functions and boundary data.
//!
//! - generating set: `[{"free": [1, 0], "torsion": [1]}, ...]`
//! - function: `[{"alpha": [2, 0], "torsion": [], "num": "3", "den": "2"}, ...]`
//! - boundary values: `{"2,-1;1": "3/4", "0,3": 1.5, ...}` keyed by element encoding

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, GeneratingSet, GroupElement};
use crate::poly::{Monomial, PolyTorsionFunction, Shape};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ElementRecord {
    free: Vec<i64>,
    #[serde(default)]
    torsion: Vec<i64>,
}

fn bad(index: usize, reason: impl Into<String>) -> Error {
    Error::BadElement {
        index,
        reason: reason.into(),
    }
}

fn parse_array(text: &str) -> Result<Vec<Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Array(items)) => Ok(items),
        Ok(_) => Err(Error::Parse("expected a JSON array".into())),
        Err(e) => Err(Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))),
    }
}

/// Reads generating-set elements, reporting the index of the first bad entry.
pub fn parse_elements(g: &AbelianGroup, text: &str) -> Result<Vec<GroupElement>> {
    parse_array(text)?
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let rec: ElementRecord = serde_json::from_value(v).map_err(|e| bad(i, e.to_string()))?;
            if rec.free.len() != g.free_rank() {
                return Err(bad(i, format!("expected {} free coordinates, got {}", g.free_rank(), rec.free.len())));
            }
            if rec.torsion.len() != g.torsion_orders().len() {
                return Err(bad(
                    i,
                    format!(
                        "expected {} torsion coordinates, got {}",
                        g.torsion_orders().len(),
                        rec.torsion.len()
                    ),
                ));
            }
            g.element(rec.free, rec.torsion).map_err(|e| bad(i, e.to_string()))
        })
        .collect()
}

/// Parses a generating set. With `symmetrize`, the entries are taken as
/// `s_1..s_l` and their negatives are appended; otherwise the entries must
/// already form a symmetric multiset.
pub fn parse_generating_set(g: &AbelianGroup, text: &str, symmetrize: bool) -> Result<GeneratingSet> {
    let elements = parse_elements(g, text)?;
    if elements.is_empty() {
        return Err(Error::EmptyGeneratingSet);
    }
    if symmetrize {
        Ok(GeneratingSet::symmetrize(g, elements))
    } else {
        GeneratingSet::from_multiset(g, elements)
    }
}

pub fn generating_set_to_json(s: &GeneratingSet) -> String {
    let records: Vec<ElementRecord> = s
        .elements()
        .iter()
        .map(|e| ElementRecord {
            free: e.free.clone(),
            torsion: e.torsion.iter().map(|&t| t as i64).collect(),
        })
        .collect();
    serde_json::to_string(&records).expect("element records serialize")
}

/// Decodes `2,-1;1` style element encodings.
pub fn decode_element(g: &AbelianGroup, text: &str) -> Result<GroupElement> {
    let (free, torsion) = match text.split_once(';') {
        Some((f, t)) => (f, t),
        None => (text, ""),
    };
    let ints = |s: &str| -> Result<Vec<i64>> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate `{p}` in `{text}`")))
            })
            .collect()
    };
    let (free, torsion) = (ints(free)?, ints(torsion)?);
    if free.len() != g.free_rank() || torsion.len() != g.torsion_orders().len() {
        return Err(Error::Parse(format!("`{text}` does not match the shape of {g}")));
    }
    g.element(free, torsion)
}

/// Exact value of a decimal literal such as `-1.25e3`, or a fraction `p/q`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("`{text}` is not a rational number"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| err())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u32);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * ten.pow(shift as u32))
    } else {
        BigRational::new(n, ten.pow((-shift) as u32))
    })
}

fn value_to_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

/// Boundary values keyed by element encoding.
pub fn parse_boundary(g: &AbelianGroup, text: &str) -> Result<HashMap<GroupElement, BigRational>> {
    let map: serde_json::Map<String, Value> = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("boundary map: {e}")))?;
    map.iter()
        .map(|(k, v)| Ok((decode_element(g, k)?, value_to_rational(v)?)))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermRecord {
    alpha: Vec<u32>,
    #[serde(default)]
    torsion: Vec<u64>,
    num: Value,
    #[serde(default = "one")]
    den: Value,
}

fn one() -> Value {
    Value::from(1)
}

/// Reads a function from its term list. Repeated terms are summed.
pub fn parse_function(shape: &Shape, text: &str) -> Result<PolyTorsionFunction> {
    let mut f = PolyTorsionFunction::zero(shape);
    for (i, v) in parse_array(text)?.into_iter().enumerate() {
        let rec: TermRecord = serde_json::from_value(v).map_err(|e| bad(i, e.to_string()))?;
        if rec.alpha.len() != shape.free_rank || rec.torsion.len() != shape.torsion_orders.len() {
            return Err(bad(i, "term shape does not match the group"));
        }
        if rec.torsion.iter().zip(&shape.torsion_orders).any(|(t, q)| t >= q) {
            return Err(bad(i, "torsion coordinate out of range"));
        }
        let num = value_to_rational(&rec.num).map_err(|e| bad(i, e.to_string()))?;
        let den = value_to_rational(&rec.den).map_err(|e| bad(i, e.to_string()))?;
        if den.is_zero() {
            return Err(bad(i, "zero denominator"));
        }
        f.add_term(
            Monomial {
                alpha: rec.alpha,
                torsion: rec.torsion,
            },
            num / den,
        );
    }
    Ok(f)
}

/// Term list in basis order with `num` and `den` as decimal strings.
pub fn function_to_json(f: &PolyTorsionFunction) -> Value {
    Value::Array(
        f.terms()
            .iter()
            .map(|(m, c)| {
                serde_json::json!({
                    "alpha": m.alpha,
                    "torsion": m.torsion,
                    "num": c.numer().to_string(),
                    "den": c.denom().to_string(),
                })
            })
            .collect(),
    )
}

/// `p/q`, or `p` for integers.
pub fn format_rational(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn generating_set_round_trip() {
        let g = AbelianGroup::new(1, vec![2]).unwrap();
        let s = parse_generating_set(&g, r#"[{"free":[1],"torsion":[1]},{"free":[1],"torsion":[0]}]"#, true).unwrap();
        assert_eq!(s.len(), 4);
        let back = parse_generating_set(&g, &generating_set_to_json(&s), false).unwrap();
        assert_eq!(back.elements(), s.elements());
    }

    #[test]
    fn bad_entry_is_located() {
        let g = AbelianGroup::free(2).unwrap();
        let err = parse_elements(&g, r#"[{"free":[1,0]},{"free":[1]}]"#).unwrap_err();
        assert!(matches!(err, Error::BadElement { index: 1, .. }));
        let err = parse_elements(&g, r#"[{"free":[1,0]},{"free":"x"}]"#).unwrap_err();
        assert!(matches!(err, Error::BadElement { index: 1, .. }));
        assert!(matches!(parse_elements(&g, "{"), Err(Error::Parse(_))));
        let err = parse_generating_set(&g, r#"[{"free":[1,0]}]"#, false).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric(_)));
    }

    #[test]
    fn element_codes() {
        let g = AbelianGroup::new(2, vec![3]).unwrap();
        let x = g.element(vec![2, -1], vec![4]).unwrap();
        assert_eq!(decode_element(&g, &x.encode()).unwrap(), x);
        let t = AbelianGroup::new(0, vec![5]).unwrap();
        let y = t.element(vec![], vec![3]).unwrap();
        assert_eq!(decode_element(&t, &y.encode()).unwrap(), y);
        assert!(decode_element(&g, "1;0").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("2e-2").unwrap(), q(1, 50));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        for bad in ["", "1/0", "x", "1.2.3", "-", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(format_rational(&q(-3, 4)), "-3/4");
        assert_eq!(format_rational(&q(4, 2)), "2");
    }

    #[test]
    fn boundary_map() {
        let g = AbelianGroup::free(1).unwrap();
        let m = parse_boundary(&g, r#"{"-2": 0, "2": "4", "3": 0.1}"#).unwrap();
        assert_eq!(m[&g.element(vec![2], vec![]).unwrap()], q(4, 1));
        assert_eq!(m[&g.element(vec![3], vec![]).unwrap()], q(1, 10));
    }

    #[test]
    fn function_round_trip() {
        let shape = Shape::new(2, vec![2]);
        let text = r#"[{"alpha":[2,0],"torsion":[1],"num":"3","den":"2"},{"alpha":[0,0],"torsion":[0],"num":-1}]"#;
        let f = parse_function(&shape, text).unwrap();
        assert_eq!(f.terms().len(), 2);
        let back = parse_function(&shape, &function_to_json(&f).to_string()).unwrap();
        assert_eq!(back, f);
        assert!(parse_function(&shape, r#"[{"alpha":[1],"torsion":[0],"num":1}]"#).is_err());
        assert!(parse_function(&shape, r#"[{"alpha":[1,0],"torsion":[2],"num":1}]"#).is_err());
    }
}
