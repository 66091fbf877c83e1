//! The real-case chain: incidence bounds on `S_t`, the energy corollaries,
//! two instances of Li's inequality, and the final exponent comparison.

use num_rational::BigRational;
use num_traits::Pow;

use crate::certified::{Interval, DEFAULT_PRECISION_CAP};
use crate::energy::{energy_with_cap, histogram, HistogramKind, MultiplicityHistogram};
use crate::error::{Error, Result};
use crate::field::render_rational;
use crate::report::{instance_digest, InequalityReport, Quantity};
use crate::set::FSet;

use super::{
    check, default_epsilon, e2, li_inequality, product_three_halves, q, qu, require_real_conditions, CheckInputs,
    PipelineMode, PipelineTrace, RelationKey,
};

type Q = BigRational;

/// `E_{3/2}(X)²` of a spectrum: exact when rational, else an enclosure.
fn three_halves_squared(hist: &MultiplicityHistogram, cap: u32) -> Result<Interval> {
    if let Some(sq) = hist.three_halves_squared_exact() {
        return Ok(Interval::point(qu(sq)));
    }
    let v = energy_with_cap(hist, &Q::new(3.into(), 2.into()), cap)?.value;
    Ok(v.pow_nonneg(2))
}

/// Runs the real-case argument on `A ⊂ Q` and records every step.
pub fn real_pipeline(a: &FSet) -> Result<PipelineTrace> {
    real_pipeline_with_cap(a, DEFAULT_PRECISION_CAP)
}

/// [`real_pipeline`] with an explicit interval precision cap.
pub fn real_pipeline_with_cap(a: &FSet, cap: u32) -> Result<PipelineTrace> {
    if !a.ctx().is_rational() {
        return Err(Error::FieldMismatch("rational"));
    }
    if a.is_empty() {
        return Err(Error::SetTooSmall("A is empty".into()));
    }
    require_real_conditions(a)?;
    let mut trace = PipelineTrace::new(PipelineMode::Real, a, default_epsilon());
    let single = CheckInputs::new(vec![a.clone()]).with_precision_cap(cap);
    let a1 = a.shift_one();
    let aa1 = a.expander_set(a)?;
    let e = q(aa1.len());
    let na = q(a.len());
    let digest = |step: &str| instance_digest(&[a], step);

    trace.push("Cauchy-Schwarz: |A|^4 <= |A(A+1)| E2(A, A+1)", check(RelationKey::R3, &single)?);
    trace.push("Cauchy-Schwarz: E2(A, A+1)^2 <= E2(A) E2(A+1)", check(RelationKey::R4, &single)?);

    let mut t = 1u64;
    while t <= a.len() as u64 {
        let inputs = single.clone().with_t(t);
        trace.push(format!("t = {t}: |S_t| against the incidence bound"), check(RelationKey::R9, &inputs)?);
        trace.push(format!("t = {t}: every point of S_t x A is t-rich"), check(RelationKey::R7, &inputs)?);
        t *= 2;
    }

    for (name, set) in [("eq1", a), ("eq2", &a1)] {
        let lhs = qu(e2(set, set)?).pow(3u32);
        let e15 = product_three_halves(set)?;
        let rhs = e15.pow_nonneg(2).scale(&(&e * &e * &na));
        trace.push(
            format!("{name}: E2^3 against |A(A+1)|^2 |A| E_1.5^2"),
            InequalityReport::slack_only(name, Quantity::Exact(lhs), Quantity::Enclosed(rhs), &digest(name)),
        );
    }
    trace.push("product of the two energy corollaries", check(RelationKey::R12, &single)?);
    trace.push("Li's inequality for (A, A+1)", li_inequality("li_A", a, &a1, cap)?);
    trace.push("Li's inequality for (A+1, A)", li_inequality("li_A1", &a1, a, cap)?);

    let ratio_a = histogram(a, a, HistogramKind::Ratio)?;
    let ratio_a1 = histogram(&a1, &a1, HistogramKind::Ratio)?;
    let lhs = three_halves_squared(&ratio_a, cap)?
        .mul_nonneg(&three_halves_squared(&ratio_a1, cap)?)
        .scale(&na.clone().pow(4u32));
    let rhs = qu(e2(a, &aa1)?) * qu(e2(&a1, &aa1)?) * qu(ratio_a.moment(3)) * qu(ratio_a1.moment(3));
    let lhs_q = if lhs.is_point() { Quantity::Exact(lhs.lo().clone()) } else { Quantity::Enclosed(lhs) };
    trace.push(
        "product of both Li instances: E_1.5(A)^2 E_1.5(A+1)^2 |A|^4 <= E2(A,A(A+1)) E2(A+1,A(A+1)) E3(A) E3(A+1)",
        InequalityReport::certified("li_combined", lhs_q, Quantity::Exact(rhs), &digest("li_combined"))
            .with_note(format!("|A(A+1)| = {}", render_rational(&e))),
    );
    trace.push("third-energy corollary", check(RelationKey::R10, &single)?);
    trace.push("second-energy corollary", check(RelationKey::R11, &single)?);
    trace.push("final exponent comparison", check(RelationKey::R13, &single)?);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;
    use crate::report::Verdict;

    fn rat(v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::rational(), v)
    }

    #[test]
    fn guards() {
        assert!(matches!(real_pipeline(&rat(&[1, 2, 3])), Err(Error::SideConditionViolated(_))));
        assert!(matches!(real_pipeline(&rat(&[-1, 2])), Err(Error::SideConditionViolated(_))));
        let fp = FSet::from_i64s(&FieldCtx::prime(101).unwrap(), &[2, 3]);
        assert!(matches!(real_pipeline(&fp), Err(Error::FieldMismatch(_))));
    }

    #[test]
    fn chain_on_small_sets() {
        for v in [&[2i64, 3][..], &[2, 4, 8, 16], &[2, 3, 5, 7, 11]] {
            let t = real_pipeline(&rat(v)).unwrap();
            for s in &t.steps {
                assert_ne!(s.report.verdict, Verdict::Fails, "{} on {v:?}", s.report.name);
                assert_ne!(s.report.verdict, Verdict::Inconclusive, "{} on {v:?}", s.report.name);
            }
            assert_eq!(t.steps.last().unwrap().report.name, "R13");
            assert!(t.step("li_combined").unwrap().report.holds());
            assert_eq!(t.to_json_string(), real_pipeline(&rat(v)).unwrap().to_json_string());
        }
    }
}
