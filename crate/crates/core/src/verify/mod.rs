//! The relation registry and the two end-to-end pipelines.
//!
//! Registry keys:
//!
//! | key | relation | class |
//! |-----|----------|-------|
//! | R1  | `|A−B||C| ≤ |A−C||B−C|` | exact |
//! | R2  | `|A/A||A| ≤ |A(A+1)|²` | exact |
//! | R3  | `|A|⁴ ≤ |A(A+1)|·E₂(A, A+1)` | exact |
//! | R4  | `E₂(A, A+1)² ≤ E₂(A)·E₂(A+1)` | exact |
//! | R5  | `E_{3/2}(A)⁶|B|⁶ ≤ E₂(A, AB)³E₃(A)²E₃(B)` | certified |
//! | R6  | `Σ_{x∈A/B} |A ∩ xB| = |A||B|` | exact |
//! | R7  | `|S_t(A, B)||A| ≤ |P_t|` | exact |
//! | R8  | `|A −_G B|` vs `|A(B+1)||B(A+1)||A/B|/(|A||B|)` | slack |
//! | R9  | `|S_t(A, B)|` vs `|A(A+1)|²|B|²/(|A|t³)` | slack |
//! | R10 | `max(E₃(A), E₃(A+1))` vs `|A(A+1)|²|A|` | slack |
//! | R11 | `max(E₂(A, A(A+1)), E₂(A+1, A(A+1)))` vs `|A(A+1)|^{5/2}` | slack |
//! | R12 | `|A|¹¹/|A(A+1)|⁵` vs `E_{3/2}(A)E_{3/2}(A+1)` | slack |
//! | R13 | `|A|²⁴` vs `|A(A+1)|¹⁹` | slack |
//! | R14 | `|A|⁵⁷` vs `|A(A+1)|⁵⁶` | slack |
//!
//! `E_{3/2}` and `E₃` in R5 use ratio multiplicities `|A ∩ xA|`; R10 and
//! R12 use product multiplicities `|A ∩ xA⁻¹|`, the spectrum the rich-product
//! sets control.

mod finite;
mod real;

pub use finite::{dyadic_selection, finite_field_pipeline, Branch, DyadicSelection, FiniteSelection};
pub use real::{real_pipeline, real_pipeline_with_cap};

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Pow;
use serde::Serialize;

use crate::certified::{root_interval, Interval, DEFAULT_PRECISION, DEFAULT_PRECISION_CAP};
use crate::constructions::popular_ratio_graph;
use crate::energy::{energy, histogram, HistogramKind, MultiplicityHistogram};
use crate::error::{Error, Result};
use crate::field::render_rational;
use crate::incidence::{st_lower_bound_check, st_upper_shape_report};
use crate::report::{instance_digest, InequalityReport, Quantity, Relation, Verdict};
use crate::set::{FSet, SetOp};

type Q = BigRational;

pub(crate) fn q(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

pub(crate) fn qu(n: BigUint) -> Q {
    Q::from_integer(n.into())
}

/// Default `ε` for constructions driven from the registry and pipelines.
pub fn default_epsilon() -> Q {
    Q::new(1.into(), 64.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RelationKey {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
}

impl RelationKey {
    pub const ALL: [RelationKey; 14] = [
        RelationKey::R1,
        RelationKey::R2,
        RelationKey::R3,
        RelationKey::R4,
        RelationKey::R5,
        RelationKey::R6,
        RelationKey::R7,
        RelationKey::R8,
        RelationKey::R9,
        RelationKey::R10,
        RelationKey::R11,
        RelationKey::R12,
        RelationKey::R13,
        RelationKey::R14,
    ];

    /// Relations without a hidden constant, judged Holds or Fails.
    pub fn is_constant_free(self) -> bool {
        self <= RelationKey::R7
    }

    /// Relations from the real-line argument, which assume `−1, 0, 1 ∉ A`.
    fn needs_real_side_conditions(self) -> bool {
        use RelationKey::*;
        matches!(self, R3 | R4 | R5 | R7 | R9 | R10 | R11 | R12 | R13)
    }

    pub fn as_str(self) -> &'static str {
        use RelationKey::*;
        match self {
            R1 => "R1",
            R2 => "R2",
            R3 => "R3",
            R4 => "R4",
            R5 => "R5",
            R6 => "R6",
            R7 => "R7",
            R8 => "R8",
            R9 => "R9",
            R10 => "R10",
            R11 => "R11",
            R12 => "R12",
            R13 => "R13",
            R14 => "R14",
        }
    }
}

impl fmt::Display for RelationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationKey::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownRelation(s.to_string()))
    }
}

/// Inputs to a registry check.
///
/// `sets` holds `A, B, C` in order; missing trailing sets repeat the last
/// one given, so a single set means `A = B = C`.
#[derive(Debug, Clone)]
pub struct CheckInputs {
    pub sets: Vec<FSet>,
    /// Richness threshold for R7 and R9; defaults to `⌈min(|A|, |B|)/2⌉`.
    pub t: Option<u64>,
    /// `ε` for R8; defaults to 1/64.
    pub epsilon: Option<Q>,
    pub precision_cap: u32,
}

impl CheckInputs {
    pub fn new(sets: Vec<FSet>) -> Self {
        CheckInputs { sets, t: None, epsilon: None, precision_cap: DEFAULT_PRECISION_CAP }
    }

    pub fn with_t(mut self, t: u64) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_epsilon(mut self, e: Q) -> Self {
        self.epsilon = Some(e);
        self
    }

    pub fn with_precision_cap(mut self, cap: u32) -> Self {
        self.precision_cap = cap;
        self
    }

    fn set(&self, i: usize) -> Result<&FSet> {
        self.sets
            .get(i)
            .or_else(|| self.sets.last())
            .ok_or_else(|| Error::InvalidArgument("at least one set is required".into()))
    }

    fn abc(&self) -> Result<(&FSet, &FSet, &FSet)> {
        let (a, b, c) = (self.set(0)?, self.set(1)?, self.set(2)?);
        a.same_ctx(b)?;
        a.same_ctx(c)?;
        Ok((a, b, c))
    }

    fn t_for(&self, a: &FSet, b: &FSet) -> u64 {
        self.t.unwrap_or_else(|| (a.len().min(b.len()) as u64).div_ceil(2).max(1))
    }
}

fn violated(what: &str) -> Error {
    Error::SideConditionViolated(what.to_string())
}

fn require_nonempty(sets: &[&FSet]) -> Result<()> {
    if sets.iter().any(|s| s.is_empty()) {
        Err(Error::SetTooSmall("sets must be nonempty".into()))
    } else {
        Ok(())
    }
}

pub(crate) fn require_real_conditions(a: &FSet) -> Result<()> {
    if a.contains_zero() {
        return Err(violated("0 ∈ A"));
    }
    if a.contains_one() {
        return Err(violated("1 ∈ A"));
    }
    if a.contains_minus_one() {
        return Err(violated("-1 ∈ A"));
    }
    Ok(())
}

/// Evaluates one registry relation on one instance.
pub fn check(key: RelationKey, inputs: &CheckInputs) -> Result<InequalityReport> {
    let (a, b, c) = inputs.abc()?;
    require_nonempty(&[a, b, c])?;
    if key.needs_real_side_conditions() {
        require_real_conditions(a)?;
    }
    let report = match key {
        RelationKey::R1 => r1(a, b, c)?,
        RelationKey::R2 => r2(a)?,
        RelationKey::R3 => r3(a)?,
        RelationKey::R4 => r4(a)?,
        RelationKey::R5 => r5(a, b, inputs.precision_cap)?,
        RelationKey::R6 => r6(a, b)?,
        RelationKey::R7 => st_lower_bound_check(a, b, inputs.t_for(a, b))?.report,
        RelationKey::R8 => {
            if a.contains_zero() || b.contains_zero() {
                return Err(violated("0 ∈ A or 0 ∈ B"));
            }
            let eps = inputs.epsilon.clone().unwrap_or_else(default_epsilon);
            popular_ratio_graph(a, b, &eps)?.report()
        }
        RelationKey::R9 => st_upper_shape_report(a, b, inputs.t_for(a, b))?,
        RelationKey::R10 => r10(a)?,
        RelationKey::R11 => r11(a)?,
        RelationKey::R12 => r12(a)?,
        RelationKey::R13 => r13(a)?,
        RelationKey::R14 => r14(a)?,
    };
    debug_assert!(key.is_constant_free() != (report.verdict == Verdict::SlackOnly));
    Ok(report)
}

/// Reports from a batch of checks; stops at the first `Fails`.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub reports: Vec<InequalityReport>,
    pub aborted: bool,
}

impl SuiteOutcome {
    pub fn worst(&self) -> Option<Verdict> {
        self.reports.iter().map(|r| r.verdict).max()
    }
}

/// Runs `keys` in order on every instance, aborting on the first `Fails`.
pub fn run_suite(keys: &[RelationKey], instances: &[CheckInputs]) -> Result<SuiteOutcome> {
    run_suite_with(keys, instances, check)
}

fn run_suite_with(
    keys: &[RelationKey],
    instances: &[CheckInputs],
    check: impl Fn(RelationKey, &CheckInputs) -> Result<InequalityReport>,
) -> Result<SuiteOutcome> {
    let mut reports = Vec::new();
    for inputs in instances {
        for &key in keys {
            let r = check(key, inputs)?;
            let failed = r.fails();
            reports.push(r);
            if failed {
                return Ok(SuiteOutcome { reports, aborted: true });
            }
        }
    }
    Ok(SuiteOutcome { reports, aborted: false })
}

fn counterexample(sets: &[&FSet]) -> serde_json::Value {
    serde_json::Value::Array(sets.iter().map(|s| s.to_json_value()).collect())
}

fn r1(a: &FSet, b: &FSet, c: &FSet) -> Result<InequalityReport> {
    let ab = a.combine(b, SetOp::Diff)?.len();
    let ac = a.combine(c, SetOp::Diff)?.len();
    let bc = b.combine(c, SetOp::Diff)?.len();
    Ok(InequalityReport::exact("R1", Relation::Le, q(ab * c.len()), q(ac * bc), &instance_digest(&[a, b, c], ""))
        .with_counterexample(counterexample(&[a, b, c])))
}

fn r2(a: &FSet) -> Result<InequalityReport> {
    if a.contains_zero() || a.contains_minus_one() {
        return Err(violated("R2 requires 0, -1 ∉ A"));
    }
    let ratios = a.combine(a, SetOp::Ratio)?.len();
    let e = a.expander_set(a)?.len();
    Ok(InequalityReport::exact("R2", Relation::Le, q(ratios * a.len()), q(e * e), &instance_digest(&[a], ""))
        .with_counterexample(counterexample(&[a])))
}

/// Second moment of the product spectrum of `(A, B)`.
pub(crate) fn e2(a: &FSet, b: &FSet) -> Result<BigUint> {
    Ok(histogram(a, b, HistogramKind::Product)?.moment(2))
}

fn r3(a: &FSet) -> Result<InequalityReport> {
    let a1 = a.shift_one();
    let e = a.expander_set(a)?.len();
    let lhs = q(a.len()).pow(4u32);
    let rhs = q(e) * qu(e2(a, &a1)?);
    Ok(InequalityReport::exact("R3", Relation::Le, lhs, rhs, &instance_digest(&[a], ""))
        .with_counterexample(counterexample(&[a])))
}

fn r4(a: &FSet) -> Result<InequalityReport> {
    let a1 = a.shift_one();
    let mixed = qu(e2(a, &a1)?);
    Ok(InequalityReport::exact(
        "R4",
        Relation::Le,
        &mixed * &mixed,
        qu(e2(a, a)? * e2(&a1, &a1)?),
        &instance_digest(&[a], ""),
    )
    .with_counterexample(counterexample(&[a])))
}

fn r6(a: &FSet, b: &FSet) -> Result<InequalityReport> {
    if a.contains_zero() || b.contains_zero() {
        return Err(violated("R6 requires 0 ∉ A, B"));
    }
    let mut total = 0usize;
    for x in &a.combine(b, SetOp::Ratio)? {
        total += a.dilate_intersection_size(b, x)?;
    }
    Ok(InequalityReport::exact("R6", Relation::Eq, q(total), q(a.len() * b.len()), &instance_digest(&[a, b], ""))
        .with_counterexample(counterexample(&[a, b])))
}

/// `E_{3/2}` enclosure at a fixed precision, exact when the spectrum allows.
fn three_halves_at(hist: &MultiplicityHistogram, bits: u32) -> Interval {
    hist.energy_at_precision(&Q::new(3.into(), 2.into()), bits)
}

/// Li's inequality in cube form, refined until decided or the cap is hit.
/// Requires only `0 ∉ A, B`.
pub(crate) fn li_inequality(name: &str, a: &FSet, b: &FSet, cap: u32) -> Result<InequalityReport> {
    if a.contains_zero() || b.contains_zero() {
        return Err(violated("0 ∈ A or 0 ∈ B"));
    }
    let ratio_a = histogram(a, a, HistogramKind::Ratio)?;
    let ratio_b = histogram(b, b, HistogramKind::Ratio)?;
    let ab = a.combine(b, SetOp::Prod)?;
    let e2_mixed = qu(e2(a, &ab)?);
    let e3a = qu(ratio_a.moment(3));
    let e3b = qu(ratio_b.moment(3));
    let rhs = e2_mixed.clone().pow(3u32) * &e3a * &e3a * &e3b;
    let b6 = q(b.len()).pow(6u32);
    let digest = instance_digest(&[a, b], name);

    if let Some(sq) = ratio_a.three_halves_squared_exact() {
        let lhs = qu(sq).pow(3u32) * &b6;
        return Ok(InequalityReport::exact(name, Relation::Le, lhs, rhs, &digest)
            .with_note("E_{3/2}(A)^2 is rational on this instance")
            .with_counterexample(counterexample(&[a, b])));
    }
    let mut bits = DEFAULT_PRECISION.min(cap);
    loop {
        let lhs = three_halves_at(&ratio_a, bits).pow_nonneg(6).scale(&b6);
        let report = InequalityReport::certified(name, Quantity::Enclosed(lhs), Quantity::Exact(rhs.clone()), &digest);
        if report.verdict != Verdict::Inconclusive || bits >= cap {
            return Ok(report.with_note(format!("precision {bits} bits")).with_counterexample(counterexample(&[a, b])));
        }
        bits = (bits * 2).min(cap);
    }
}

fn r5(a: &FSet, b: &FSet, cap: u32) -> Result<InequalityReport> {
    if b.contains_zero() {
        return Err(violated("R5 requires 0 ∉ B"));
    }
    li_inequality("R5", a, b, cap)
}

fn product_e3(a: &FSet) -> Result<BigUint> {
    Ok(histogram(a, a, HistogramKind::Product)?.moment(3))
}

fn r10(a: &FSet) -> Result<InequalityReport> {
    let a1 = a.shift_one();
    let lhs = product_e3(a)?.max(product_e3(&a1)?);
    let e = q(a.expander_set(a)?.len());
    Ok(InequalityReport::slack_only(
        "R10",
        Quantity::Exact(qu(lhs)),
        Quantity::Exact(&e * &e * q(a.len())),
        &instance_digest(&[a], ""),
    ))
}

/// `x^{5/2}` as an exact value or enclosure.
pub(crate) fn five_halves(x: usize) -> Quantity {
    let x5 = q(x).pow(5u32);
    let root = root_interval(&x5, 2, DEFAULT_PRECISION);
    if root.is_point() {
        Quantity::Exact(root.lo().clone())
    } else {
        Quantity::Enclosed(root)
    }
}

fn r11(a: &FSet) -> Result<InequalityReport> {
    let a1 = a.shift_one();
    let aa1 = a.expander_set(a)?;
    let (x, y) = (e2(a, &aa1)?, e2(&a1, &aa1)?);
    let note = format!("E2(A, A(A+1)) = {x}, E2(A+1, A(A+1)) = {y}");
    Ok(InequalityReport::slack_only(
        "R11",
        Quantity::Exact(qu(x.max(y))),
        five_halves(aa1.len()),
        &instance_digest(&[a], ""),
    )
    .with_note(note))
}

/// `E_{3/2}` of a product spectrum to the default relative width.
pub(crate) fn product_three_halves(a: &FSet) -> Result<Interval> {
    let hist = histogram(a, a, HistogramKind::Product)?;
    Ok(energy(&hist, &Q::new(3.into(), 2.into()))?.value)
}

fn r12(a: &FSet) -> Result<InequalityReport> {
    let e = q(a.expander_set(a)?.len());
    let lhs = q(a.len()).pow(11u32) / e.pow(5u32);
    let rhs = product_three_halves(a)?.mul_nonneg(&product_three_halves(&a.shift_one())?);
    Ok(InequalityReport::slack_only("R12", Quantity::Exact(lhs), Quantity::Enclosed(rhs), &instance_digest(&[a], "")))
}

fn power_report(name: &str, a: &FSet, a_exp: u32, e_exp: u32) -> Result<InequalityReport> {
    let e = q(a.expander_set(a)?.len());
    Ok(InequalityReport::slack_only(
        name,
        Quantity::Exact(q(a.len()).pow(a_exp)),
        Quantity::Exact(e.pow(e_exp)),
        &instance_digest(&[a], ""),
    ))
}

fn r13(a: &FSet) -> Result<InequalityReport> {
    power_report("R13", a, 24, 19)
}

fn r14(a: &FSet) -> Result<InequalityReport> {
    power_report("R14", a, 57, 56)
}

/// One step of a pipeline trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub description: String,
    pub report: InequalityReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    FiniteField,
    Real,
}

/// Ordered record of every step a pipeline evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineTrace {
    pub mode: PipelineMode,
    pub input: FSet,
    #[serde(serialize_with = "ser_q")]
    pub epsilon: Q,
    pub steps: Vec<TraceStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected: Option<FiniteSelection>,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&render_rational(v))
}

impl PipelineTrace {
    pub(crate) fn new(mode: PipelineMode, input: &FSet, epsilon: Q) -> Self {
        PipelineTrace { mode, input: input.clone(), epsilon, steps: Vec::new(), selected: None }
    }

    pub(crate) fn push(&mut self, description: impl Into<String>, report: InequalityReport) {
        self.steps.push(TraceStep { description: description.into(), report });
    }

    pub fn worst(&self) -> Option<Verdict> {
        self.steps.iter().map(|s| s.report.verdict).max()
    }

    pub fn step(&self, name: &str) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.report.name == name)
    }

    /// Canonical JSON, stable across runs.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn fp(p: u64, v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::prime(p).unwrap(), v)
    }

    fn qs(v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::rational(), v)
    }

    #[test]
    fn keys_parse() {
        assert_eq!("r6".parse::<RelationKey>().unwrap(), RelationKey::R6);
        assert_eq!("R14".parse::<RelationKey>().unwrap(), RelationKey::R14);
        assert!(matches!("R99".parse::<RelationKey>(), Err(Error::UnknownRelation(_))));
        assert!(RelationKey::R7.is_constant_free());
        assert!(!RelationKey::R8.is_constant_free());
    }

    #[test]
    fn r1_example() {
        let a = fp(7, &[0, 1]);
        let r = check(RelationKey::R1, &CheckInputs::new(vec![a])).unwrap();
        assert!(r.holds());
        assert_eq!(r.slack, Some(Quantity::Exact(Q::new(2.into(), 3.into()))));
    }

    #[test]
    fn r6_identity() {
        let r = check(RelationKey::R6, &CheckInputs::new(vec![fp(101, &[3, 7, 9]), fp(101, &[2, 5])])).unwrap();
        assert!(r.holds());
        assert_eq!(r.slack, Some(Quantity::int(1)));
        assert!(matches!(
            check(RelationKey::R6, &CheckInputs::new(vec![fp(7, &[0, 1])])),
            Err(Error::SideConditionViolated(_))
        ));
    }

    #[test]
    fn r5_example() {
        let a = qs(&[2, 3]);
        let r = check(RelationKey::R5, &CheckInputs::new(vec![a])).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn r5_irrational_instance_is_certified() {
        // Ratio multiplicities {3: 1, 1: 6}: E_{3/2} = 6 + 3√3.
        let a = qs(&[2, 4, 8]);
        let b = qs(&[3, 5]);
        let r = check(RelationKey::R5, &CheckInputs::new(vec![a, b])).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(matches!(r.lhs, Quantity::Enclosed(_)));
    }

    #[test]
    fn real_side_conditions() {
        for bad in [&[1, 2][..], &[-1, 2], &[0, 2]] {
            for key in [RelationKey::R3, RelationKey::R4, RelationKey::R5, RelationKey::R7, RelationKey::R13] {
                assert!(matches!(check(key, &CheckInputs::new(vec![qs(bad)])), Err(Error::SideConditionViolated(_))));
            }
        }
    }

    #[test]
    fn every_key_runs() {
        let a = qs(&[2, 3, 5]);
        for key in RelationKey::ALL {
            let r = check(key, &CheckInputs::new(vec![a.clone()])).unwrap();
            if key.is_constant_free() {
                assert!(r.holds(), "{key}: {:?}", r.verdict);
            } else {
                assert_eq!(r.verdict, Verdict::SlackOnly);
                assert!(r.slack.is_some(), "{key}");
            }
        }
    }

    #[test]
    fn suite_runs_and_aborts() {
        let instances = [CheckInputs::new(vec![fp(7, &[1, 2])]), CheckInputs::new(vec![fp(7, &[3, 4])])];
        let out = run_suite(&[RelationKey::R1, RelationKey::R6], &instances).unwrap();
        assert!(!out.aborted);
        assert_eq!(out.reports.len(), 4);
        assert_eq!(out.worst(), Some(Verdict::Holds));

        let failing = |key: RelationKey, _: &CheckInputs| {
            Ok(InequalityReport::exact(key.as_str(), Relation::Le, q(2), q(1), "d"))
        };
        let out = run_suite_with(&[RelationKey::R1, RelationKey::R6], &instances, failing).unwrap();
        assert!(out.aborted);
        assert_eq!(out.reports.len(), 1);
    }

    #[test]
    fn five_halves_exact_on_squares() {
        assert_eq!(five_halves(4), Quantity::int(32));
        assert!(matches!(five_halves(2), Quantity::Enclosed(_)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn nonzero(p: u64, max: usize) -> impl Strategy<Value = FSet> {
            proptest::collection::vec(1..p as i64 - 1, 1..=max).prop_map(move |v| fp(p, &v))
        }

        proptest! {
            #[test]
            fn constant_free_hold_mod_p(a in nonzero(101, 9), b in nonzero(101, 9), c in nonzero(101, 9)) {
                let inputs = CheckInputs::new(vec![a.clone(), b, c]);
                prop_assert!(check(RelationKey::R1, &inputs).unwrap().holds());
                prop_assert!(check(RelationKey::R6, &inputs).unwrap().holds());
                let single = CheckInputs::new(vec![a.clone()]);
                prop_assert!(check(RelationKey::R2, &single).unwrap().holds());
                if !a.contains_one() {
                    prop_assert!(check(RelationKey::R3, &single).unwrap().holds());
                    prop_assert!(check(RelationKey::R4, &single).unwrap().holds());
                }
            }
        }
    }
}
