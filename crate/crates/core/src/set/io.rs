//! JSON set files.
//!
//! ```json
//! {"field": "fp", "p": 101, "elements": [3, 5, 9]}
//! {"field": "q", "elements": ["2", "-3/2"]}
//! ```
//!
//! Elements are deduplicated and sorted on load. Residues outside `[0, p)`
//! are rejected rather than reduced. Moduli and residues too large for a JSON
//! number may be given as decimal strings.

use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};

use super::FSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<Value>,
    elements: Vec<Value>,
}

fn scalar_text(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        other => Err(Error::Malformed(format!("expected number or string, got {other}"))),
    }
}

impl FSet {
    pub fn from_json_value(v: &Value) -> Result<FSet> {
        let file: SetFile = serde_json::from_value(v.clone()).map_err(|e| Error::Malformed(e.to_string()))?;
        let ctx = match file.field.as_str() {
            "fp" => {
                let p = file.p.as_ref().ok_or(Error::MissingModulus)?;
                let p: BigUint = scalar_text(p)?.parse().map_err(|_| Error::Malformed(format!("bad modulus {p}")))?;
                FieldCtx::prime_big(p)?
            }
            "q" => {
                if file.p.is_some() {
                    return Err(Error::UnexpectedModulus);
                }
                FieldCtx::rational()
            }
            other => return Err(Error::Malformed(format!("unknown field {other:?}"))),
        };
        let mut elems = Vec::with_capacity(file.elements.len());
        for v in &file.elements {
            elems.push(ctx.parse(&scalar_text(v)?)?);
        }
        FSet::new(ctx, elems)
    }

    pub fn from_json_str(s: &str) -> Result<FSet> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<FSet> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_value(&self) -> Value {
        let elements: Vec<Value> = self
            .elements()
            .iter()
            .map(|e| match e {
                Elem::Residue(r) => match u64::try_from(r) {
                    Ok(small) => Value::from(small),
                    Err(_) => Value::from(r.to_string()),
                },
                Elem::Rational(_) => Value::from(e.to_string()),
            })
            .collect();
        let (field, p) = match self.ctx() {
            FieldCtx::Prime(p) => (
                "fp",
                Some(match u64::try_from(&**p) {
                    Ok(small) => Value::from(small),
                    Err(_) => Value::from(p.to_string()),
                }),
            ),
            FieldCtx::Rational => ("q", None),
        };
        serde_json::to_value(SetFile { field: field.to_string(), p, elements }).expect("set file serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("set file serializes")
    }
}

impl Serialize for FSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for super::PairGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let edges: Vec<[String; 2]> = self.edge_elems().map(|(a, b)| [a.to_string(), b.to_string()]).collect();
        let mut st = s.serialize_struct("PairGraph", 3)?;
        st.serialize_field("left", &self.left())?;
        st.serialize_field("right", &self.right())?;
        st.serialize_field("edges", &edges)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_prime_field_file() {
        let s = FSet::from_json_str(r#"{"field": "fp", "p": 101, "elements": [9, 3, 5, 3]}"#).unwrap();
        assert_eq!(s.rendered(), vec!["3", "5", "9"]);
        assert_eq!(s.ctx().modulus_u64(), Some(101));
    }

    #[test]
    fn loads_rational_file() {
        let s = FSet::from_json_str(r#"{"field": "q", "elements": ["2", "-3/2", "4/2", 7]}"#).unwrap();
        assert_eq!(s.rendered(), vec!["-3/2", "2", "7"]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            FSet::from_json_str(r#"{"field": "fp", "p": 7, "elements": [7]}"#),
            Err(Error::ResidueOutOfRange { .. })
        ));
        assert!(matches!(
            FSet::from_json_str(r#"{"field": "fp", "p": 8, "elements": [1]}"#),
            Err(Error::NonPrimeModulus(_))
        ));
        assert_eq!(FSet::from_json_str(r#"{"field": "fp", "elements": [1]}"#), Err(Error::MissingModulus));
        assert!(matches!(FSet::from_json_str(r#"{"field": "z", "elements": []}"#), Err(Error::Malformed(_))));
        assert!(matches!(FSet::from_json_str("not json"), Err(Error::Malformed(_))));
    }

    #[test]
    fn big_modulus_as_string() {
        let text = r#"{"field":"fp","p":"170141183460469231731687303715884105727","elements":["170141183460469231731687303715884105726",1]}"#;
        let s = FSet::from_json_str(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(FSet::from_json_str(&s.to_json_string()).unwrap(), s);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn json_round_trip_fp(v in proptest::collection::vec(0i64..1009, 0..30)) {
                let s = FSet::from_i64s(&FieldCtx::prime(1009).unwrap(), &v);
                prop_assert_eq!(FSet::from_json_str(&s.to_json_string()).unwrap(), s);
            }

            #[test]
            fn json_round_trip_q(v in proptest::collection::vec((-50i64..50, 1i64..9), 0..20)) {
                let s = FSet::from_fractions(&v).unwrap();
                prop_assert_eq!(FSet::from_json_str(&s.to_json_string()).unwrap(), s);
            }
        }
    }
}
