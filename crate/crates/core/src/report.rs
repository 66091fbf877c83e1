//! Inequality reports: the common output of every check.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::certified::Interval;
use crate::field::render_rational;
use crate::set::FSet;

/// An exact rational or a certified enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    Exact(BigRational),
    Enclosed(Interval),
}

impl Quantity {
    pub fn int(n: impl Into<num_bigint::BigInt>) -> Self {
        Quantity::Exact(BigRational::from_integer(n.into()))
    }

    pub fn as_interval(&self) -> Interval {
        match self {
            Quantity::Exact(q) => Interval::point(q.clone()),
            Quantity::Enclosed(i) => i.clone(),
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Quantity::Exact(q) => Some(q),
            Quantity::Enclosed(_) => None,
        }
    }

    /// `self / other`, or `None` if the divisor may vanish or either side may
    /// be negative.
    pub fn ratio(&self, other: &Quantity) -> Option<Quantity> {
        match (self, other) {
            (Quantity::Exact(a), Quantity::Exact(b)) => (!b.is_zero()).then(|| Quantity::Exact(a / b)),
            _ => {
                let (a, b) = (self.as_interval(), other.as_interval());
                (b.lo().is_positive() && !a.lo().is_negative()).then(|| Quantity::Enclosed(a.div_positive(&b)))
            }
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Exact(q) => f.write_str(&render_rational(q)),
            Quantity::Enclosed(i) => i.fmt(f),
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quantity::Exact(q) => s.serialize_str(&render_rational(q)),
            Quantity::Enclosed(i) => i.serialize(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    Holds,
    SlackOnly,
    Inconclusive,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "Holds",
            Verdict::SlackOnly => "SlackOnly",
            Verdict::Inconclusive => "Inconclusive",
            Verdict::Fails => "Fails",
        })
    }
}

/// One checked relation `lhs ≤ rhs` (or `lhs = rhs`) on one instance.
///
/// `slack` is `lhs / rhs`. Relations whose true form hides an absolute
/// constant carry [`Verdict::SlackOnly`] and are never judged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: Quantity,
    pub rhs: Quantity,
    pub slack: Option<Quantity>,
    pub verdict: Verdict,
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inputs_path: Option<String>,
}

impl InequalityReport {
    fn build(name: &str, relation: Relation, lhs: Quantity, rhs: Quantity, verdict: Verdict, digest: &str) -> Self {
        let slack = lhs.ratio(&rhs);
        InequalityReport {
            name: name.to_string(),
            relation,
            lhs,
            rhs,
            slack,
            verdict,
            instance_digest: digest.to_string(),
            notes: Vec::new(),
            counterexample: None,
            inputs_path: None,
        }
    }

    /// A constant-free relation between exact values.
    pub fn exact(name: &str, relation: Relation, lhs: BigRational, rhs: BigRational, digest: &str) -> Self {
        let holds = match relation {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
        };
        let verdict = if holds { Verdict::Holds } else { Verdict::Fails };
        Self::build(name, relation, Quantity::Exact(lhs), Quantity::Exact(rhs), verdict, digest)
    }

    /// A constant-free `≤` between enclosures: decided when the intervals
    /// separate, otherwise [`Verdict::Inconclusive`].
    pub fn certified(name: &str, lhs: Quantity, rhs: Quantity, digest: &str) -> Self {
        let (l, r) = (lhs.as_interval(), rhs.as_interval());
        let verdict = if l.hi() <= r.lo() {
            Verdict::Holds
        } else if l.lo() > r.hi() {
            Verdict::Fails
        } else {
            Verdict::Inconclusive
        };
        Self::build(name, Relation::Le, lhs, rhs, verdict, digest)
    }

    /// A constant-free `≤` whose verdict was decided exactly elsewhere (for
    /// example by squaring out a square root); the sides are for display.
    pub fn decided(name: &str, lhs: Quantity, rhs: Quantity, holds: bool, digest: &str) -> Self {
        let verdict = if holds { Verdict::Holds } else { Verdict::Fails };
        Self::build(name, Relation::Le, lhs, rhs, verdict, digest)
    }

    /// A relation with a hidden constant: only the ratio is reported.
    pub fn slack_only(name: &str, lhs: Quantity, rhs: Quantity, digest: &str) -> Self {
        Self::build(name, Relation::Le, lhs, rhs, Verdict::SlackOnly, digest)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_counterexample(mut self, v: Value) -> Self {
        if self.verdict == Verdict::Fails {
            self.counterexample = Some(v);
        }
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// SHA-256 over a canonical rendering of the inputs.
///
/// Each set contributes its field label and sorted canonical elements; `extra`
/// carries non-set parameters such as `ε` or `t`.
pub fn instance_digest(sets: &[&FSet], extra: &str) -> String {
    let mut h = Sha256::new();
    for s in sets {
        h.update(s.ctx().label().as_bytes());
        h.update(b":");
        h.update(s.rendered().join(",").as_bytes());
        h.update(b";");
    }
    h.update(extra.as_bytes());
    hex::encode(h.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_verdicts() {
        let r = InequalityReport::exact("t", Relation::Le, q(3, 1), q(9, 2), "d");
        assert!(r.holds());
        assert_eq!(r.slack, Some(Quantity::Exact(q(2, 3))));
        let r = InequalityReport::exact("t", Relation::Le, q(5, 1), q(4, 1), "d");
        assert!(r.fails());
        let r = InequalityReport::exact("t", Relation::Eq, q(4, 1), q(4, 1), "d");
        assert_eq!(r.slack, Some(Quantity::int(1)));
        assert!(InequalityReport::exact("t", Relation::Eq, q(3, 1), q(4, 1), "d").fails());
    }

    #[test]
    fn certified_verdicts() {
        let iv = |a: i64, b: i64| Quantity::Enclosed(Interval::new(q(a, 1), q(b, 1)));
        assert_eq!(InequalityReport::certified("t", iv(1, 2), iv(2, 3), "d").verdict, Verdict::Holds);
        assert_eq!(InequalityReport::certified("t", iv(4, 5), iv(2, 3), "d").verdict, Verdict::Fails);
        assert_eq!(InequalityReport::certified("t", iv(1, 3), iv(2, 4), "d").verdict, Verdict::Inconclusive);
    }

    #[test]
    fn slack_only_never_judges() {
        let r = InequalityReport::slack_only("t", Quantity::int(100), Quantity::int(1), "d");
        assert_eq!(r.verdict, Verdict::SlackOnly);
        assert_eq!(r.slack, Some(Quantity::int(100)));
        let z = InequalityReport::slack_only("t", Quantity::int(1), Quantity::int(0), "d");
        assert_eq!(z.slack, None);
    }

    #[test]
    fn json_shape() {
        let r = InequalityReport::exact("R1", Relation::Le, q(3, 1), q(9, 2), "abc").with_note("n");
        let v = r.to_json();
        assert_eq!(v["lhs"], "3");
        assert_eq!(v["rhs"], "9/2");
        assert_eq!(v["slack"], "2/3");
        assert_eq!(v["verdict"], "Holds");
        assert_eq!(v["relation"], "<=");
        assert!(v.get("counterexample").is_none());
    }

    #[test]
    fn digest_depends_on_field_and_elements() {
        let f7 = FieldCtx::prime(7).unwrap();
        let f11 = FieldCtx::prime(11).unwrap();
        let a = FSet::from_i64s(&f7, &[1, 2]);
        let b = FSet::from_i64s(&f11, &[1, 2]);
        assert_ne!(instance_digest(&[&a], ""), instance_digest(&[&b], ""));
        assert_eq!(instance_digest(&[&a], "x"), instance_digest(&[&a.clone()], "x"));
        assert_ne!(instance_digest(&[&a], "x"), instance_digest(&[&a], "y"));
        assert_eq!(instance_digest(&[&a], "").len(), 64);
    }
}
