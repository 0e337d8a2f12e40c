//! JSON serialization of ring descriptors, ring elements, Witt/ghost
//! vectors, truncated series and semigroup-algebra elements.

use num::{BigInt, BigRational, One};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::poly::ZPoly;
use crate::rings::{poly_quot_element, Payload, Ring, RingElement, RingKind};
use crate::semigroup::SemigroupElement;
use crate::series::TruncatedSeries;
use crate::truncation::TruncationSet;
use crate::witt::{GhostVector, WittVector};

fn bigint_to_json(v: &BigInt) -> Value {
    match i64::try_from(v.clone()) {
        Ok(n) => json!(n),
        Err(_) => json!(v.to_string()),
    }
}

fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else {
                Err(Error::Serde(format!("non-integer number {}", n)))
            }
        }
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| Error::Serde(format!("bad integer {:?}: {}", s, e))),
        _ => Err(Error::Serde(format!("expected integer, got {}", v))),
    }
}

fn int_array(v: &Value) -> Result<Vec<BigInt>> {
    v.as_array()
        .ok_or_else(|| Error::Serde(format!("expected array, got {}", v)))?
        .iter()
        .map(bigint_from_json)
        .collect()
}

pub fn ring_to_json(ring: &Ring) -> Value {
    match ring.kind() {
        RingKind::Integers => json!({"kind": "Integers"}),
        RingKind::IntegersMod { m } => json!({"kind": "IntegersMod", "m": bigint_to_json(m)}),
        RingKind::PrimeField { p } => json!({"kind": "PrimeField", "p": p}),
        RingKind::FiniteField { p, k, modulus } => json!({
            "kind": "FiniteField", "p": p, "k": k,
            "modulus": modulus.iter().map(bigint_to_json).collect::<Vec<_>>(),
        }),
        RingKind::GaloisRing { p, n, k, modulus } => json!({
            "kind": "GaloisRing", "p": p, "N": n, "k": k,
            "modulus": modulus.iter().map(bigint_to_json).collect::<Vec<_>>(),
        }),
        RingKind::FpQuotient { p, modulus } => json!({
            "kind": "FpQuotient", "p": p,
            "modulus": modulus.iter().map(bigint_to_json).collect::<Vec<_>>(),
        }),
        RingKind::Polynomial { base, vars } => json!({
            "kind": "Polynomial", "base": ring_to_json(base), "variables": vars,
        }),
        RingKind::IntegersLocalized { inverted } => json!({
            "kind": "IntegersLocalized",
            "inverted": inverted.iter().collect::<Vec<_>>(),
        }),
    }
}

fn field_u64(obj: &Map<String, Value>, key: &str) -> Result<u64> {
    obj.get(key)
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Serde(format!("missing or invalid field {:?}", key)))
}

pub fn ring_from_json(v: &Value) -> Result<Ring> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Serde("ring descriptor must be an object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Serde("missing ring kind".into()))?;
    match kind {
        "Integers" => Ok(Ring::integers()),
        "IntegersMod" => {
            let m = bigint_from_json(
                obj.get("m")
                    .ok_or_else(|| Error::Serde("missing modulus m".into()))?,
            )?;
            Ring::integers_mod(m)
        }
        "PrimeField" => Ring::prime_field(field_u64(obj, "p")?),
        "FiniteField" => {
            let modulus = int_array(
                obj.get("modulus")
                    .ok_or_else(|| Error::Serde("missing modulus".into()))?,
            )?;
            Ring::finite_field(field_u64(obj, "p")?, field_u64(obj, "k")? as u32, modulus)
        }
        "GaloisRing" => {
            let modulus = int_array(
                obj.get("modulus")
                    .ok_or_else(|| Error::Serde("missing modulus".into()))?,
            )?;
            Ring::galois_ring(
                field_u64(obj, "p")?,
                field_u64(obj, "N")? as u32,
                field_u64(obj, "k")? as u32,
                modulus,
            )
        }
        "FpQuotient" => {
            let modulus = int_array(
                obj.get("modulus")
                    .ok_or_else(|| Error::Serde("missing modulus".into()))?,
            )?;
            Ring::fp_quotient(field_u64(obj, "p")?, modulus)
        }
        "Polynomial" => {
            let base = ring_from_json(
                obj.get("base")
                    .ok_or_else(|| Error::Serde("missing base ring".into()))?,
            )?;
            let vars: Vec<String> = obj
                .get("variables")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Serde("missing variables".into()))?
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(String::from)
                        .ok_or_else(|| Error::Serde("variable names must be strings".into()))
                })
                .collect::<Result<_>>()?;
            Ring::new(RingKind::Polynomial { base, vars })
        }
        "IntegersLocalized" => {
            let inv: Vec<u64> = obj
                .get("inverted")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Serde("missing inverted primes".into()))?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| Error::Serde("bad prime".into())))
                .collect::<Result<_>>()?;
            Ring::localized(inv)
        }
        other => Err(Error::Serde(format!("unknown ring kind {:?}", other))),
    }
}

pub fn element_to_json(e: &RingElement) -> Value {
    match &e.payload {
        Payload::Int(v) | Payload::Residue(v) => bigint_to_json(v),
        Payload::PolyQuot(v) => Value::Array(v.iter().map(bigint_to_json).collect()),
        Payload::Poly(p) => Value::Array(
            p.terms()
                .map(|(m, c)| json!({"exps": m, "coeff": bigint_to_json(c)}))
                .collect(),
        ),
        Payload::Rational(r) => {
            if r.denom().is_one() {
                bigint_to_json(r.numer())
            } else {
                json!(format!("{}/{}", r.numer(), r.denom()))
            }
        }
    }
}

pub fn element_from_json(ring: &Ring, v: &Value) -> Result<RingElement> {
    match ring.kind() {
        RingKind::Integers | RingKind::IntegersMod { .. } | RingKind::PrimeField { .. } => {
            Ok(ring.from_int(&bigint_from_json(v)?))
        }
        RingKind::FiniteField { .. } | RingKind::GaloisRing { .. } | RingKind::FpQuotient { .. } => {
            match v {
                Value::Array(_) => Ok(poly_quot_element(ring, int_array(v)?)),
                _ => Ok(ring.from_int(&bigint_from_json(v)?)),
            }
        }
        RingKind::Polynomial { vars, .. } => {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Serde("polynomial element must be a term array".into()))?;
            let mut terms = vec![];
            for t in arr {
                let obj = t
                    .as_object()
                    .ok_or_else(|| Error::Serde("term must be an object".into()))?;
                let exps: Vec<u32> = obj
                    .get("exps")
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| Error::Serde("missing exps".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|n| n as u32)
                            .ok_or_else(|| Error::Serde("bad exponent".into()))
                    })
                    .collect::<Result<_>>()?;
                if exps.len() != vars.len() {
                    return Err(Error::Serde("exponent arity mismatch".into()));
                }
                let coeff = bigint_from_json(
                    obj.get("coeff")
                        .ok_or_else(|| Error::Serde("missing coeff".into()))?,
                )?;
                terms.push((exps, coeff));
            }
            let p = ZPoly::from_terms(vars.len(), terms);
            // canonicalize through ring addition with zero
            let e = RingElement {
                ring: ring.clone(),
                payload: Payload::Poly(p),
            };
            Ok(ring.add(&e, &ring.zero()))
        }
        RingKind::IntegersLocalized { .. } => {
            let r = match v {
                Value::String(s) if s.contains('/') => {
                    let (num, den) = s.split_once('/').unwrap();
                    let n = num
                        .parse::<BigInt>()
                        .map_err(|e| Error::Serde(e.to_string()))?;
                    let d = den
                        .parse::<BigInt>()
                        .map_err(|e| Error::Serde(e.to_string()))?;
                    BigRational::new(n, d)
                }
                _ => BigRational::from(bigint_from_json(v)?),
            };
            let e = RingElement {
                ring: ring.clone(),
                payload: Payload::Rational(r),
            };
            ring.validate(&e)?;
            Ok(e)
        }
    }
}

fn vector_to_json(set: &TruncationSet, ring: &Ring, comps: &[RingElement]) -> Value {
    json!({
        "S": set.members().collect::<Vec<_>>(),
        "ring": ring_to_json(ring),
        "components": comps.iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn witt_to_json(w: &WittVector) -> Value {
    vector_to_json(&w.set, &w.ring, w.components())
}

pub fn ghost_to_json(g: &GhostVector) -> Value {
    vector_to_json(&g.set, &g.ring, g.components())
}

fn vector_from_json(v: &Value) -> Result<(TruncationSet, Ring, Vec<RingElement>)> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Serde("vector must be an object".into()))?;
    let s: Vec<u64> = obj
        .get("S")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Serde("missing S".into()))?
        .iter()
        .map(|x| x.as_u64().ok_or_else(|| Error::Serde("bad member".into())))
        .collect::<Result<_>>()?;
    let set = TruncationSet::new(s)?;
    let ring = ring_from_json(
        obj.get("ring")
            .ok_or_else(|| Error::Serde("missing ring".into()))?,
    )?;
    let comps: Vec<RingElement> = obj
        .get("components")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Serde("missing components".into()))?
        .iter()
        .map(|x| element_from_json(&ring, x))
        .collect::<Result<_>>()?;
    Ok((set, ring, comps))
}

pub fn witt_from_json(v: &Value) -> Result<WittVector> {
    let (set, ring, comps) = vector_from_json(v)?;
    WittVector::new(set, ring, comps)
}

pub fn ghost_from_json(v: &Value) -> Result<GhostVector> {
    let (set, ring, comps) = vector_from_json(v)?;
    GhostVector::new(set, ring, comps)
}

pub fn series_to_json(s: &TruncatedSeries) -> Value {
    json!({
        "ring": ring_to_json(&s.ring),
        "coefficients": s.coeffs().iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn series_from_json(v: &Value) -> Result<TruncatedSeries> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Serde("series must be an object".into()))?;
    let ring = ring_from_json(
        obj.get("ring")
            .ok_or_else(|| Error::Serde("missing ring".into()))?,
    )?;
    let coeffs: Vec<RingElement> = obj
        .get("coefficients")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Serde("missing coefficients".into()))?
        .iter()
        .map(|x| element_from_json(&ring, x))
        .collect::<Result<_>>()?;
    TruncatedSeries::new(ring, coeffs)
}

pub fn semigroup_to_json(x: &SemigroupElement) -> Value {
    Value::Array(
        x.terms()
            .map(|(r, c)| json!({"element": element_to_json(r), "coeff": bigint_to_json(c)}))
            .collect(),
    )
}

pub fn semigroup_from_json(ring: &Ring, v: &Value) -> Result<SemigroupElement> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Serde("semigroup element must be an array".into()))?;
    let mut terms = vec![];
    for t in arr {
        let obj = t
            .as_object()
            .ok_or_else(|| Error::Serde("term must be an object".into()))?;
        let elem = element_from_json(
            ring,
            obj.get("element")
                .ok_or_else(|| Error::Serde("missing element".into()))?,
        )?;
        let coeff = bigint_from_json(
            obj.get("coeff")
                .ok_or_else(|| Error::Serde("missing coeff".into()))?,
        )?;
        terms.push((elem, coeff));
    }
    Ok(SemigroupElement::from_terms(ring.clone(), terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_descriptor_round_trip() {
        let rings = vec![
            Ring::integers(),
            Ring::integers_mod(100).unwrap(),
            Ring::prime_field(7).unwrap(),
            Ring::finite_field(2, 2, vec![BigInt::one(), BigInt::one(), BigInt::one()]).unwrap(),
            Ring::galois_ring_default(2, 3, 2).unwrap(),
            Ring::fp_quotient(2, vec![BigInt::from(0), BigInt::from(1), BigInt::from(0), BigInt::from(1)]).unwrap(),
            Ring::polynomial(Ring::integers(), vec!["x", "y"]).unwrap(),
            Ring::localized([2, 3]).unwrap(),
        ];
        for r in rings {
            let back = ring_from_json(&ring_to_json(&r)).unwrap();
            assert_eq!(back, r);
        }
        // the documented FiniteField example
        let v: Value =
            serde_json::from_str(r#"{"kind":"FiniteField","p":2,"k":2,"modulus":[1,1,1]}"#)
                .unwrap();
        assert!(ring_from_json(&v).is_ok());
    }

    #[test]
    fn witt_vector_round_trip() {
        let z = Ring::integers();
        let s = TruncationSet::new([1, 2, 4]).unwrap();
        let w = WittVector::new(
            s,
            z.clone(),
            vec![z.from_i64(3), z.from_i64(1), z.from_i64(2)],
        )
        .unwrap();
        let back = witt_from_json(&witt_to_json(&w)).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn localized_elements_parse_fractions() {
        let r = Ring::localized([2]).unwrap();
        let e = element_from_json(&r, &json!("-3/4")).unwrap();
        let half = r.div_exact_int(&r.from_i64(-3), &BigInt::from(4)).unwrap();
        assert_eq!(e, half);
        // denominator with a non-inverted prime is rejected
        assert!(element_from_json(&r, &json!("1/3")).is_err());
    }
}
