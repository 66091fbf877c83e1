//! The prime-field pipeline: pigeonholed selection of `b₀, A₁, N`, the
//! quotient set `R(A₁)`, and the two branches on whether `R(A₁) = F_p`.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::Pow;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{
    greedy_cover, injection_witness, plunnecke_witness, popular_ratio_graph, CoverSign, PLUNNECKE_BUDGET,
};
use crate::energy::twisted_energy;
use crate::error::{Error, Result};
use crate::field::{render_rational, Elem, FieldCtx, SmallPrime};
use crate::report::{instance_digest, InequalityReport, Quantity, Relation};
use crate::set::{FSet, SetOp};

use super::{check, q, CheckInputs, PipelineMode, PipelineTrace, RelationKey};

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    RneqFp,
    ReqFp,
    /// `|A₁| < 2`, so `R(A₁)` has no admissible quotient.
    Degenerate,
}

/// The pigeonholing stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicSelection {
    pub b0: Elem,
    /// `Σ_a |a(A+1) ∩ b₀(A+1)|`.
    pub b0_mass: u64,
    /// `(a, |a(A+1) ∩ b₀(A+1)|)` for every `a ∈ A`.
    pub counts: Vec<(Elem, u64)>,
    pub a1: FSet,
    pub n: u64,
    /// `(N, |class|)` for each dyadic class `[N, 2N)`.
    pub classes: Vec<(u64, usize)>,
    /// `2 × (number of classes)`, the loss factor in `N|A₁| ≥ |A|³/(|A(A+1)|·D)`.
    pub loss: u64,
}

/// Everything the pipeline selected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteSelection {
    pub b0: Elem,
    pub a1: FSet,
    pub n: u64,
    pub r_a1_size: usize,
    pub r_a1_full: bool,
    pub xi: Option<Elem>,
    /// `(α, β, γ, δ)` with `ξ = (α − β)/(γ − δ)`.
    pub quadruple: Option<[Elem; 4]>,
    pub branch: Branch,
}

/// Chooses `b₀` maximising `Σ_a |a(A+1) ∩ b(A+1)|` (ties to the smallest)
/// and the dyadic class `A₁ = {a : N ≤ |a(A+1) ∩ b₀(A+1)| < 2N}` maximising
/// `N·|A₁|` (ties to the smaller `N`).
pub fn dyadic_selection(a: &FSet) -> Result<DyadicSelection> {
    if a.is_empty() {
        return Err(Error::SetTooSmall("A is empty".into()));
    }
    let a_plus = a.shift_one();
    let dilates: Vec<FSet> = a
        .iter()
        .map(|x| a_plus.dilate(x).or_else(|_| FSet::new(a.ctx().clone(), [a.ctx().zero()])))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<u64>> = dilates
        .par_iter()
        .map(|db| dilates.iter().map(|da| da.intersection_size(db).map(|n| n as u64)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let masses: Vec<u64> = rows.iter().map(|r| r.iter().sum()).collect();
    let best = *masses.iter().max().expect("nonempty");
    let b_idx = masses.iter().position(|&m| m == best).expect("max attained");
    let b0 = a.elements()[b_idx].clone();
    let counts: Vec<(Elem, u64)> = a.iter().cloned().zip(rows[b_idx].iter().copied()).collect();

    let mut classes = Vec::new();
    let mut n = 1u64;
    while n <= a.len() as u64 {
        let size = counts.iter().filter(|(_, c)| *c >= n && *c < 2 * n).count();
        classes.push((n, size));
        n *= 2;
    }
    let (n, _) = classes
        .iter()
        .copied()
        .max_by(|x, y| (x.0 * x.1 as u64).cmp(&(y.0 * y.1 as u64)).then(y.0.cmp(&x.0)))
        .expect("at least one class");
    let a1 = FSet::new(a.ctx().clone(), counts.iter().filter(|(_, c)| *c >= n && *c < 2 * n).map(|(e, _)| e.clone()))?;
    let loss = 2 * classes.len() as u64;
    Ok(DyadicSelection { b0, b0_mass: best, counts, a1, n, classes, loss })
}

/// `R(A₁) = {(α − β)/(γ − δ) : γ ≠ δ}` as sorted residues.
fn quotient_set(a1: &FSet) -> Result<Vec<Elem>> {
    let ctx = a1.ctx();
    let diffs = a1.combine(a1, SetOp::Diff)?;
    let nonzero: Vec<Elem> = diffs.iter().filter(|d| !ctx.is_zero(d)).cloned().collect();
    if let Some(sp) = SmallPrime::for_ctx(ctx) {
        let p = ctx.modulus_u64().expect("small prime");
        let num: Vec<u64> = diffs.iter().map(|d| d.residue_u64().expect("residue")).collect();
        let inv: Vec<u64> = nonzero.iter().map(|d| sp.inv(d.residue_u64().expect("residue"))).collect();
        let mut seen = vec![false; p as usize];
        for &x in &num {
            for &y in &inv {
                seen[sp.mul(x, y) as usize] = true;
            }
        }
        return Ok(seen
            .iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(r, _)| Elem::Residue((r as u64).into()))
            .collect());
    }
    let mut out = HashSet::new();
    for x in &diffs {
        for y in &nonzero {
            out.insert(ctx.div_unchecked(x, y)?);
        }
    }
    let mut v: Vec<Elem> = out.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Lexicographically smallest `(α, β, γ, δ) ∈ A₁⁴` with `α − β = ξ(γ − δ)`,
/// `γ ≠ δ`.
fn quadruple_for(a1: &FSet, xi: &Elem) -> Option<[Elem; 4]> {
    let ctx = a1.ctx();
    for al in a1 {
        for be in a1 {
            let lhs = ctx.sub_unchecked(al, be);
            for ga in a1 {
                for de in a1 {
                    if ga != de && lhs == ctx.mul_unchecked(xi, &ctx.sub_unchecked(ga, de)) {
                        return Some([al.clone(), be.clone(), ga.clone(), de.clone()]);
                    }
                }
            }
        }
    }
    None
}

fn ser_pipeline_digest(a: &FSet, eps: &Q, step: &str) -> String {
    instance_digest(&[a], &format!("eps={};{step}", render_rational(eps)))
}

/// Runs the prime-field argument on `A` and records every step.
pub fn finite_field_pipeline(a: &FSet, epsilon: &Q) -> Result<PipelineTrace> {
    let ctx = a.ctx().clone();
    let p = match &ctx {
        FieldCtx::Prime(p) => (**p).clone(),
        FieldCtx::Rational => return Err(Error::FieldMismatch("prime field")),
    };
    if num_bigint::BigUint::from(a.len() * a.len()) >= p {
        return Err(Error::DensityViolated { size: a.len(), modulus: p.to_string() });
    }
    if a.len() < 4 {
        return Err(Error::SetTooSmall(format!("|A| = {} < 4", a.len())));
    }
    if a.contains_zero() || a.contains_minus_one() {
        return Err(Error::SideConditionViolated("0, -1 ∉ A required".into()));
    }
    let sixteenth = Q::new(1.into(), 16.into());
    if epsilon <= &Q::from_integer(0.into()) || epsilon >= &sixteenth {
        return Err(Error::EpsilonOutOfRange(format!("{} not in (0, 1/16)", render_rational(epsilon))));
    }

    let mut trace = PipelineTrace::new(PipelineMode::FiniteField, a, epsilon.clone());
    let dg = |step: &str| ser_pipeline_digest(a, epsilon, step);
    let aa1 = a.expander_set(a)?;
    let e = q(aa1.len());
    let na = q(a.len());
    let diff = a.combine(a, SetOp::Diff)?;
    let four_fold = a.kfold_sum(&[1, -1, 1, -1])?;

    trace.push(
        "difference set against the eighth-power bound, A' = A",
        InequalityReport::slack_only(
            "finite1",
            Quantity::int(diff.len()),
            Quantity::Exact(e.clone().pow(8u32) / na.clone().pow(7u32)),
            &dg("finite1"),
        ),
    );
    trace.push(
        "ratio set via the multiplicative triangle inequality",
        check(RelationKey::R2, &CheckInputs::new(vec![a.clone()]))?,
    );
    trace.push(
        "four-fold difference set against |A-A|^3/|A|^2, A' = A",
        InequalityReport::slack_only(
            "finite2",
            Quantity::int(four_fold.len()),
            Quantity::Exact(q(diff.len()).pow(3u32) / na.clone().pow(2u32)),
            &dg("finite2"),
        ),
    );
    let popular = popular_ratio_graph(a, a, epsilon)?;
    trace.push("partial difference set of the popular-ratio graph", popular.report());
    trace.push("injection S -> A(A+1) x A(A+1)", injection_witness(&popular.graph)?.report);

    let sel = dyadic_selection(a)?;
    let pair_mass: u64 = {
        let a_plus = a.shift_one();
        let dil: Vec<FSet> = a.iter().map(|x| a_plus.dilate(x)).collect::<Result<_>>()?;
        let mut s = 0u64;
        for x in &dil {
            for y in &dil {
                s += x.intersection_size(y)? as u64;
            }
        }
        s
    };
    trace.push(
        "Cauchy-Schwarz over pairs: sum |a(A+1) ∩ b(A+1)| >= |A|^4/|A(A+1)|",
        InequalityReport::exact("cs_pairs", Relation::Le, na.clone().pow(4u32) / &e, q(pair_mass), &dg("cs_pairs")),
    );
    trace.push(
        format!("b0 = {} carries at least the average mass", sel.b0),
        InequalityReport::exact("b0_mass", Relation::Le, na.clone().pow(3u32) / &e, q(sel.b0_mass), &dg("b0_mass")),
    );
    let members_ok = sel.counts.iter().filter(|(x, _)| sel.a1.contains(x)).all(|(_, c)| *c >= sel.n && *c < 2 * sel.n);
    let covered: usize = sel.classes.iter().map(|(_, s)| s).sum();
    let positive = sel.counts.iter().filter(|(_, c)| *c > 0).count();
    trace.push(
        format!("dyadic class N = {}, |A1| = {}, loss D = {}", sel.n, sel.a1.len(), sel.loss),
        InequalityReport::exact(
            "dyadic",
            Relation::Le,
            na.clone().pow(3u32) / (&e * q(sel.loss)),
            q(sel.n * sel.a1.len() as u64),
            &dg("dyadic"),
        )
        .with_note(format!(
            "class membership in [N, 2N): {members_ok}; classes cover {covered} of {positive} positive counts"
        )),
    );
    if !members_ok || covered != positive {
        return Err(Error::WitnessFailure("dyadic classes do not partition the positive counts".into()));
    }
    trace.push(
        "N against |A|^2/|A(A+1)|",
        InequalityReport::slack_only(
            "finite4",
            Quantity::Exact(na.clone().pow(2u32) / &e),
            Quantity::int(sel.n),
            &dg("finite4"),
        ),
    );

    let a1 = sel.a1.clone();
    let mut selection = FiniteSelection {
        b0: sel.b0.clone(),
        a1: a1.clone(),
        n: sel.n,
        r_a1_size: 0,
        r_a1_full: false,
        xi: None,
        quadruple: None,
        branch: Branch::Degenerate,
    };
    if a1.len() < 2 {
        trace.push(
            "final exponent comparison",
            check(RelationKey::R14, &CheckInputs::new(vec![a.clone()]))?
                .with_note("|A1| < 2: no quotient set, branch skipped"),
        );
        trace.selected = Some(selection);
        return Ok(trace);
    }

    let r = quotient_set(&a1)?;
    let full = num_bigint::BigUint::from(r.len()) == p;
    selection.r_a1_size = r.len();
    selection.r_a1_full = full;

    if !full {
        let r_set: HashSet<&Elem> = r.iter().collect();
        let one = ctx.one();
        let xi = r
            .iter()
            .find(|x| !r_set.contains(&ctx.sub_unchecked(x, &one)))
            .expect("a proper nonempty subset of F_p has such an element")
            .clone();
        let quad = quadruple_for(&a1, &xi).expect("xi lies in R(A1)");
        selection.branch = Branch::RneqFp;
        selection.xi = Some(xi.clone());
        selection.quadruple = Some(quad.clone());
        rneq_branch(&mut trace, a, &sel, &xi, &quad, epsilon, &dg)?;
    } else {
        let (xi, e_min, e_sum) = twisted_minimum(&a1)?;
        let quad = quadruple_for(&a1, &xi).expect("R(A1) = F_p");
        selection.branch = Branch::ReqFp;
        selection.xi = Some(xi.clone());
        selection.quadruple = Some(quad.clone());
        req_branch(&mut trace, &a1, &p, &xi, &quad, e_min, e_sum, &dg)?;
    }
    trace.push("final exponent comparison", check(RelationKey::R14, &CheckInputs::new(vec![a.clone()]))?);
    trace.selected = Some(selection);
    Ok(trace)
}

/// `α A − β A − γ A + δ A` for the quadruple.
fn signed_combination(s: &FSet, quad: &[Elem; 4]) -> Result<FSet> {
    let [al, be, ga, de] = quad;
    s.dilate(al)?
        .combine(&s.dilate(be)?, SetOp::Diff)?
        .combine(&s.dilate(ga)?, SetOp::Diff)?
        .combine(&s.dilate(de)?, SetOp::Sum)
}

fn rneq_branch(
    trace: &mut PipelineTrace,
    a: &FSet,
    sel: &DyadicSelection,
    xi: &Elem,
    quad: &[Elem; 4],
    epsilon: &Q,
    dg: &dyn Fn(&str) -> String,
) -> Result<()> {
    let ctx = a.ctx();
    let a1 = &sel.a1;
    let xi_minus_one = ctx.sub_unchecked(xi, &ctx.one());
    let n1 = q(a1.len());
    trace.push(
        format!("xi = {xi}, xi - 1 ∉ R(A1): A1 + (xi-1)A1 has no repetitions"),
        InequalityReport::exact(
            "no_repetition",
            Relation::Eq,
            q(a1.combine(&a1.dilate(&xi_minus_one)?, SetOp::Sum)?.len()),
            &n1 * &n1,
            &dg("no_repetition"),
        ),
    );

    let aa1 = a.expander_set(a)?;
    let ratio_size = q(a.combine(a, SetOp::Ratio)?.len());
    let a_plus = a.shift_one();
    let b0_plus = a_plus.dilate(&sel.b0)?;
    let eps_cover = epsilon * epsilon / q(4);
    let names = ["alpha", "beta", "gamma", "delta"];
    let mut parts = Vec::new();
    let mut translate_product = q(1);
    for (k, x) in quad.iter().enumerate() {
        let sign = if k == 3 { CoverSign::Minus } else { CoverSign::Plus };
        let y = a_plus.dilate(x)?.intersection(&b0_plus)?;
        // (Y − x)/x ⊆ A; the covered set lives on the normalised side.
        let x_inv = ctx.inv(x)?;
        let y_norm = y.translate(&ctx.neg(x)?)?.dilate(&x_inv)?;
        let graph = popular_ratio_graph(a1, &y_norm, &eps_cover)?.graph;
        let cover = greedy_cover(&graph, &eps_cover, sign)?;
        let t = cover.translates.len();
        translate_product *= q(t);
        let ny = q(y.len());
        let shape = q(aa1.len()).pow(2u32) * &ratio_size / (&n1 * &ny * &ny);
        trace.push(
            format!("cover {} (A1 + 1) by {t} translates of {}b0(A+1) slice", names[k], if k == 3 { "-" } else { "" }),
            InequalityReport::slack_only(
                &format!("cover_{}", names[k]),
                Quantity::int(t),
                Quantity::Exact(shape),
                &dg(names[k]),
            ),
        );
        trace.push(
            format!("|A_{}| >= (1 - eps)|A1|", names[k]),
            InequalityReport::exact(
                &format!("cover_{}_size", names[k]),
                Relation::Le,
                (q(1) - epsilon) * &n1,
                q(cover.covered.len()),
                &dg(names[k]),
            ),
        );
        parts.push(cover.covered);
    }
    let mut a2 = parts[0].clone();
    for part in &parts[1..] {
        a2 = a2.intersection(part)?;
    }
    trace.push(
        "A2 = intersection of the four covered sets",
        InequalityReport::exact("A2_size", Relation::Le, (q(1) - q(4) * epsilon) * &n1, q(a2.len()), &dg("A2")),
    );
    let span = signed_combination(&a2, quad)?;
    let four_fold = a.kfold_sum(&[1, -1, -1, -1])?;
    trace.push(
        "alpha A2 - beta A2 - gamma A2 + delta A2 inside translates of b0(A - A - A - A)",
        InequalityReport::exact(
            "cover_product",
            Relation::Le,
            q(span.len()),
            translate_product * q(four_fold.len()),
            &dg("cover_product"),
        ),
    );

    let [al, be, ga, de] = quad;
    let g_minus_d = ctx.sub_unchecked(ga, de);
    let a_minus_b = ctx.sub_unchecked(al, be);
    let base = a2.dilate(&g_minus_d)?;
    let x1 = base.negate();
    let x2 = a2.dilate(&a_minus_b)?;
    let a3 = if a2.len() <= PLUNNECKE_BUDGET && !a2.is_empty() {
        let w = plunnecke_witness(&base, &[x1.clone(), x2.clone()], PLUNNECKE_BUDGET)?;
        trace.push("Plünnecke subset of (gamma - delta)A2", w.report.clone());
        w.subset.dilate(&ctx.inv(&g_minus_d)?)?
    } else {
        let lhs = base.combine(&x1, SetOp::Sum)?.combine(&x2, SetOp::Sum)?.len();
        let rhs = q(base.combine(&x1, SetOp::Sum)?.len() * base.combine(&x2, SetOp::Sum)?.len()) / q(base.len().max(1));
        trace.push(
            "Plünnecke bound with A3 = A2 (subset search above budget)",
            InequalityReport::slack_only("plunnecke", Quantity::int(lhs), Quantity::Exact(rhs), &dg("plunnecke")),
        );
        a2.clone()
    };
    let n3 = q(a3.len());
    let twisted = a3.combine(&a3.dilate(&xi_minus_one)?, SetOp::Sum)?;
    trace.push(
        "|A3 + (xi-1)A3| = |A3|^2",
        InequalityReport::exact("finite7_identity", Relation::Eq, q(twisted.len()), &n3 * &n3, &dg("finite7_identity")),
    );
    let wide = a3
        .dilate(&g_minus_d)?
        .combine(&a3.dilate(&a_minus_b)?, SetOp::Sum)?
        .combine(&a3.dilate(&g_minus_d)?, SetOp::Diff)?;
    trace.push(
        "|A3 + (xi-1)A3| <= |(gamma-delta)A3 + (alpha-beta)A3 - (gamma-delta)A3|",
        InequalityReport::exact("finite7", Relation::Le, q(twisted.len()), q(wide.len()), &dg("finite7")),
    );
    Ok(())
}

/// `ξ ∈ F_p^*` minimising `E(A₁, ξA₁)` (ties to the smallest), its energy,
/// and `Σ_{ξ ∈ F_p} E(A₁, ξA₁)`.
fn twisted_minimum(a1: &FSet) -> Result<(Elem, u128, u128)> {
    let ctx = a1.ctx();
    let n = a1.len() as u128;
    if let Some(p) = ctx.modulus_u64().filter(|_| SmallPrime::for_ctx(ctx).is_some()) {
        let energies: Vec<u128> =
            (1..p).into_par_iter().map(|x| twisted_energy(a1, &Elem::Residue(x.into()))).collect::<Result<_>>()?;
        let min = *energies.iter().min().expect("p >= 2");
        let idx = energies.iter().position(|&e| e == min).expect("min attained");
        let total = energies.iter().sum::<u128>() + n * n * n;
        return Ok((Elem::Residue(((idx + 1) as u64).into()), min, total));
    }
    Err(Error::InvalidArgument("the R(A1) = F_p branch needs a word-sized modulus".into()))
}

#[allow(clippy::too_many_arguments)]
fn req_branch(
    trace: &mut PipelineTrace,
    a1: &FSet,
    p: &num_bigint::BigUint,
    xi: &Elem,
    quad: &[Elem; 4],
    e_min: u128,
    e_sum: u128,
    dg: &dyn Fn(&str) -> String,
) -> Result<()> {
    let n1 = q(a1.len());
    let pq = Q::from_integer(p.clone().into());
    trace.push(
        "sum over xi of E(A1, xi A1) <= |A1|^4 + p|A1|^2",
        InequalityReport::exact(
            "energy_sum",
            Relation::Le,
            q(e_sum),
            n1.clone().pow(4u32) + &pq * &n1 * &n1,
            &dg("energy_sum"),
        ),
    );
    trace.push(
        format!("xi = {xi} minimises E(A1, xi A1)"),
        InequalityReport::slack_only(
            "twisted_min",
            Quantity::int(e_min),
            Quantity::Exact(&n1 * &n1),
            &dg("twisted_min"),
        ),
    );
    let spread = a1.combine(&a1.dilate(xi)?, SetOp::Diff)?;
    trace.push(
        "Cauchy-Schwarz: |A1|^4 <= E(A1, xi A1)|A1 - xi A1|",
        InequalityReport::exact(
            "twisted_cs",
            Relation::Le,
            n1.clone().pow(4u32),
            q(e_min) * q(spread.len()),
            &dg("twisted_cs"),
        ),
    );
    trace.push(
        "|A1 - xi A1| <= |alpha A1 - beta A1 - gamma A1 + delta A1|",
        InequalityReport::exact(
            "twisted_span",
            Relation::Le,
            q(spread.len()),
            q(signed_combination(a1, quad)?.len()),
            &dg("twisted_span"),
        ),
    );
    Ok(())
}
