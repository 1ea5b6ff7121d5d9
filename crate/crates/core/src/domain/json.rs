//! JSON encoding of domains.
//!
//! Numbers are accepted as plain JSON numbers, decimal strings ("-1.25"),
//! or exact [numerator, denominator] pairs; pair entries may themselves be
//! integers or strings for values beyond i64.

use crate::affine::AffineMap;
use crate::error::{GeometryError, Result};
use crate::rat::{rat_from_f64, rat_to_f64, Rat, RatMat};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

pub fn parse_domain(text: &str) -> Result<super::ConvexDomain> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| GeometryError::Invalid(format!("malformed JSON: {e}")))?;
    domain_from_json(&v)
}

pub fn domain_from_json(v: &Value) -> Result<super::ConvexDomain> {
    let obj = v
        .as_object()
        .ok_or_else(|| GeometryError::Invalid("domain must be a JSON object".into()))?;
    let ty = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| GeometryError::Invalid("domain object needs a \"type\" string".into()))?;
    match ty {
        "hpoly" => {
            let a = rat_matrix(field(obj, "A")?)?;
            let b = rat_vector(field(obj, "b")?)?;
            if b.len() != a.len() {
                return Err(GeometryError::Invalid(
                    "hpoly: A and b have different row counts".into(),
                ));
            }
            let ncols = a.first().map(|r| r.len()).unwrap_or(0);
            if a.iter().any(|r| r.len() != ncols) {
                return Err(GeometryError::Invalid("hpoly: ragged matrix A".into()));
            }
            super::ConvexDomain::hpoly(RatMat::new(a, ncols), b)
        }
        "paraboloid" => super::ConvexDomain::paraboloid(dim_field(obj)?),
        "ball" => super::ConvexDomain::ball(dim_field(obj)?),
        "lorentz" => super::ConvexDomain::lorentz(dim_field(obj)?),
        "hyperbola" => Ok(super::ConvexDomain::hyperbola()),
        "halfspace" => Ok(super::ConvexDomain::halfspace(dim_field(obj)?)),
        "space" => Ok(super::ConvexDomain::space(dim_field(obj)?)),
        "product" => {
            let factors = field(obj, "factors")?
                .as_array()
                .ok_or_else(|| GeometryError::Invalid("product: factors must be an array".into()))?
                .iter()
                .map(domain_from_json)
                .collect::<Result<Vec<_>>>()?;
            super::ConvexDomain::product(factors)
        }
        "affine_image" => {
            let rows = f64_matrix(field(obj, "linear")?)?;
            let t = f64_vector(field(obj, "translation")?)?;
            let n = t.len();
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(GeometryError::Invalid(
                    "affine_image: linear must be square and match translation".into(),
                ));
            }
            let linear = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            let base = domain_from_json(field(obj, "base")?)?;
            let map = AffineMap::new(linear, DVector::from_vec(t))?;
            super::ConvexDomain::affine_image(map, base)
        }
        "homogenized" => {
            let base = domain_from_json(field(obj, "base")?)?;
            Ok(base.homogenize())
        }
        other => Err(GeometryError::Invalid(format!("unknown domain type \"{other}\""))),
    }
}

pub fn domain_to_json(d: &super::ConvexDomain) -> Result<Value> {
    use super::ConvexDomain::*;
    Ok(match d {
        HPoly(h) => {
            if h.m() == 0 {
                json!({"type": "space", "n": h.n()})
            } else {
                json!({
                    "type": "hpoly",
                    "A": h.a().rows.iter()
                        .map(|r| Value::Array(r.iter().map(rat_json).collect()))
                        .collect::<Vec<_>>(),
                    "b": h.b().iter().map(rat_json).collect::<Vec<_>>(),
                })
            }
        }
        Paraboloid { n } => json!({"type": "paraboloid", "n": n}),
        Ball { n } => json!({"type": "ball", "n": n}),
        Lorentz { n } => json!({"type": "lorentz", "n": n}),
        Hyperbola => json!({"type": "hyperbola"}),
        Product { factors } => json!({
            "type": "product",
            "factors": factors.iter().map(domain_to_json).collect::<Result<Vec<_>>>()?,
        }),
        AffineImage { map, base, .. } => json!({
            "type": "affine_image",
            "linear": (0..map.linear.nrows())
                .map(|i| map.linear.row(i).iter().copied().collect::<Vec<f64>>())
                .collect::<Vec<_>>(),
            "translation": map.translation.iter().copied().collect::<Vec<f64>>(),
            "base": domain_to_json(base)?,
        }),
        Homogenized { base } => json!({
            "type": "homogenized",
            "base": domain_to_json(base)?,
        }),
        Join(_) => {
            return Err(GeometryError::Unsupported("JSON encoding of joins".into()));
        }
    })
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| GeometryError::Invalid(format!("missing field \"{name}\"")))
}

fn dim_field(obj: &Map<String, Value>) -> Result<usize> {
    field(obj, "n")?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| GeometryError::Invalid("field \"n\" must be a nonnegative integer".into()))
}

fn rat_matrix(v: &Value) -> Result<Vec<Vec<Rat>>> {
    v.as_array()
        .ok_or_else(|| GeometryError::Invalid("expected an array of rows".into()))?
        .iter()
        .map(rat_vector)
        .collect()
}

fn rat_vector(v: &Value) -> Result<Vec<Rat>> {
    v.as_array()
        .ok_or_else(|| GeometryError::Invalid("expected a numeric array".into()))?
        .iter()
        .map(parse_rat)
        .collect()
}

fn f64_matrix(v: &Value) -> Result<Vec<Vec<f64>>> {
    v.as_array()
        .ok_or_else(|| GeometryError::Invalid("expected an array of rows".into()))?
        .iter()
        .map(f64_vector)
        .collect()
}

fn f64_vector(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| GeometryError::Invalid("expected a numeric array".into()))?
        .iter()
        .map(|x| parse_rat(x).map(|r| rat_to_f64(&r)))
        .collect()
}

/// A number literal in any of the accepted spellings.
pub fn parse_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from(BigInt::from(i)))
            } else {
                n.as_f64()
                    .and_then(rat_from_f64)
                    .ok_or_else(|| GeometryError::Invalid(format!("bad number {n}")))
            }
        }
        Value::String(s) => parse_decimal(s),
        Value::Array(parts) if parts.len() == 2 => {
            let num = parse_int(&parts[0])?;
            let den = parse_int(&parts[1])?;
            if den.is_zero() {
                return Err(GeometryError::Invalid("zero denominator".into()));
            }
            Ok(Rat::new(num, den))
        }
        other => Err(GeometryError::Invalid(format!("expected a number, got {other}"))),
    }
}

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| GeometryError::Invalid(format!("expected an integer, got {n}"))),
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| GeometryError::Invalid(format!("expected an integer, got \"{s}\""))),
        other => Err(GeometryError::Invalid(format!("expected an integer, got {other}"))),
    }
}

/// Exact decimal (or "p/q") string to rational.
fn parse_decimal(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| GeometryError::Invalid(format!("bad rational \"{s}\"")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| GeometryError::Invalid(format!("bad rational \"{s}\"")))?;
        if den.is_zero() {
            return Err(GeometryError::Invalid("zero denominator".into()));
        }
        return Ok(Rat::new(num, den));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i32 = e
                .parse()
                .map_err(|_| GeometryError::Invalid(format!("bad number \"{s}\"")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(GeometryError::Invalid(format!("bad number \"{s}\"")));
    }
    let num: BigInt = digits
        .parse()
        .map_err(|_| GeometryError::Invalid(format!("bad number \"{s}\"")))?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rat::from(num * ten.pow(shift as u32))
    } else {
        Rat::new(num, ten.pow((-shift) as u32))
    })
}

fn rat_json(r: &Rat) -> Value {
    if r.denom().is_one() {
        if let Some(i) = r.numer().to_i64() {
            return json!(i);
        }
        return json!([r.numer().to_string(), "1"]);
    }
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => json!([n, d]),
        _ => json!([r.numer().to_string(), r.denom().to_string()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn number_spellings_agree() {
        for spelling in ["-1.25", "\"-1.25\"", "[-5, 4]", "[\"-5\", \"4\"]", "\"-5/4\""] {
            let v: Value = serde_json::from_str(spelling).unwrap();
            assert_eq!(parse_rat(&v).unwrap(), rat(-5, 4), "{spelling}");
        }
        let v: Value = serde_json::from_str("\"2.5e-1\"").unwrap();
        assert_eq!(parse_rat(&v).unwrap(), rat(1, 4));
    }

    #[test]
    fn hpoly_roundtrip_exact() {
        let d = super::super::ConvexDomain::hpoly_f64(
            &[vec![1.0, 0.5], vec![-1.0, 0.0], vec![0.0, -1.0]],
            &[1.0, 0.0, 0.0],
        )
        .unwrap();
        let v = domain_to_json(&d).unwrap();
        let back = domain_from_json(&v).unwrap();
        match (&d, &back) {
            (super::super::ConvexDomain::HPoly(a), super::super::ConvexDomain::HPoly(b)) => {
                assert_eq!(a.a(), b.a());
                assert_eq!(a.b(), b.b());
            }
            _ => panic!("variant changed in roundtrip"),
        }
    }

    #[test]
    fn nested_product_roundtrip() {
        let d = super::super::ConvexDomain::product(vec![
            super::super::ConvexDomain::paraboloid(2).unwrap(),
            super::super::ConvexDomain::ball(2).unwrap(),
        ])
        .unwrap();
        let v = domain_to_json(&d).unwrap();
        let back = domain_from_json(&v).unwrap();
        assert_eq!(back.ambient_dim(), 4);
        assert_eq!(domain_to_json(&back).unwrap(), v);
    }

    #[test]
    fn affine_image_parses() {
        let text = r#"{
            "type": "affine_image",
            "linear": [[2, 0], [0, 1]],
            "translation": [1, 0],
            "base": {"type": "ball", "n": 2}
        }"#;
        let d = parse_domain(text).unwrap();
        assert_eq!(d.ambient_dim(), 2);
        assert_eq!(d.contains(&[1.0, 0.0]).unwrap(), super::super::Membership::Interior);
        assert_eq!(d.contains(&[3.0, 0.0]).unwrap(), super::super::Membership::Boundary);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(parse_domain("{").is_err());
        assert!(parse_domain(r#"{"type": "mystery"}"#).is_err());
        assert!(parse_domain(r#"{"type": "hpoly", "A": [[1, 0]], "b": []}"#).is_err());
        assert!(parse_domain(r#"{"type": "ball"}"#).is_err());
    }

    #[test]
    fn halfspace_and_space_parse() {
        let h = parse_domain(r#"{"type": "halfspace", "n": 3}"#).unwrap();
        assert_eq!(h.ambient_dim(), 3);
        assert_eq!(h.contains(&[0.0, 0.0, 1.0]).unwrap(), super::super::Membership::Interior);
        let s = parse_domain(r#"{"type": "space", "n": 2}"#).unwrap();
        assert_eq!(domain_to_json(&s).unwrap(), serde_json::json!({"type": "space", "n": 2}));
    }
}
