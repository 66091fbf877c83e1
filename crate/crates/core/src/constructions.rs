//! Executable versions of the combinatorial constructions behind the partial
//! sumset bound: popular-ratio graphs, the injection into
//! `A(B+1) × B(A+1)`, dense-degree subsets, greedy covering by translates,
//! the partial Ruzsa triangle inequality and a Plünnecke subset search.
//!
//! Every threshold involving `√ε` is decided exactly by isolating the root
//! and squaring; no verdict depends on floating point.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::certified::{root_interval, Interval, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::field::{render_rational, Elem};
use crate::report::{instance_digest, InequalityReport, Quantity};
use crate::set::{FSet, PairGraph, SetOp};

type Q = BigRational;

fn q(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

fn check_epsilon(eps: &Q, allow_zero: bool, upper: &Q) -> Result<()> {
    let low_ok = if allow_zero { !eps.is_negative() } else { eps.is_positive() };
    if low_ok && eps < upper {
        Ok(())
    } else {
        let lo = if allow_zero { "[0" } else { "(0" };
        Err(Error::EpsilonOutOfRange(format!("{} not in {lo}, {})", render_rational(eps), render_rational(upper))))
    }
}

/// `value ≥ (1 − c√ε)·base` for `base ≥ 0`, decided exactly.
pub(crate) fn at_least_one_minus_c_sqrt(value: &Q, base: &Q, c: u32, eps: &Q) -> bool {
    let d = base - value;
    if !d.is_positive() {
        return true;
    }
    let c = q(c);
    &d * &d <= &c * &c * eps * base * base
}

/// `√r + √ε ≥ 1` for `r, ε ≥ 0`, decided exactly.
pub(crate) fn sqrt_sum_at_least_one(r: &Q, eps: &Q) -> bool {
    if r >= &Q::one() || eps >= &Q::one() {
        return true;
    }
    let d = Q::one() - r - eps;
    if !d.is_positive() {
        return true;
    }
    q(4) * r * eps >= &d * &d
}

/// Enclosure of `(1 − c√ε)·base` for display next to exact verdicts.
pub(crate) fn one_minus_c_sqrt_enclosure(base: &Q, c: u32, eps: &Q) -> Quantity {
    let root = root_interval(eps, 2, DEFAULT_PRECISION);
    if root.is_point() {
        return Quantity::Exact(base * (Q::one() - q(c) * root.lo()));
    }
    let lo = base * (Q::one() - q(c) * root.hi());
    let hi = base * (Q::one() - q(c) * root.lo());
    Quantity::Enclosed(Interval::new(lo, hi))
}

/// `|G| ≥ (1 − ε)|A||B|`.
fn dense_enough(g: &PairGraph, eps: &Q) -> bool {
    let full = q(g.left().len() * g.right().len());
    q(g.edge_count()) >= (Q::one() - eps) * full
}

fn require_dense(g: &PairGraph, eps: &Q) -> Result<()> {
    if dense_enough(g, eps) {
        Ok(())
    } else {
        Err(Error::GraphTooSparse {
            edges: g.edge_count(),
            required: format!("(1 - {})·{}·{}", render_rational(eps), g.left().len(), g.right().len()),
        })
    }
}

fn nonzero(sets: &[&FSet]) -> Result<()> {
    if sets.iter().any(|s| s.contains_zero()) {
        Err(Error::ZeroElementPresent)
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PopularRatioResult {
    /// Popular ratios `x ∈ A/B` with `|A ∩ xB| ≥ ε|A||B|/|A/B|`.
    pub popular: FSet,
    pub graph: PairGraph,
    #[serde(serialize_with = "ser_q")]
    pub epsilon: Q,
    /// `A −_G B`.
    pub partial_diff: FSet,
    /// `|A/B|`.
    pub ratio_set_size: usize,
    /// `|A(B+1)|·|B(A+1)|·|A/B| / (|A||B|)`.
    #[serde(serialize_with = "ser_q")]
    pub bound_rhs_shape: Q,
    /// `|A −_G B| / bound_rhs_shape`.
    #[serde(serialize_with = "ser_q")]
    pub slack: Q,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&render_rational(v))
}

impl PopularRatioResult {
    /// The bound as a report; its constant depends on `ε`, so only slack.
    pub fn report(&self) -> InequalityReport {
        let g = &self.graph;
        InequalityReport::slack_only(
            "R8",
            Quantity::int(self.partial_diff.len()),
            Quantity::Exact(self.bound_rhs_shape.clone()),
            &instance_digest(&[g.left(), g.right()], &render_rational(&self.epsilon)),
        )
    }
}

/// The graph of pairs whose ratio is popular.
pub fn popular_ratio_graph(a: &FSet, b: &FSet, epsilon: &Q) -> Result<PopularRatioResult> {
    a.same_ctx(b)?;
    nonzero(&[a, b])?;
    check_epsilon(epsilon, false, &Q::one())?;
    let counts = a.representation_counts(b, SetOp::Ratio)?;
    let ratio_set_size = counts.len();
    let (na, nb) = (a.len(), b.len());
    let threshold = epsilon * q(na * nb);
    let popular_counts: Vec<&(Elem, u64)> =
        counts.iter().filter(|(_, m)| q(*m * ratio_set_size as u64) >= threshold).collect();
    let popular = FSet::new(a.ctx().clone(), popular_counts.iter().map(|(x, _)| x.clone()))?;

    let ctx = a.ctx();
    let mut edges = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if popular.contains(&ctx.div_unchecked(x, y)?) {
                edges.push((i, j));
            }
        }
    }
    let graph = PairGraph::new(a.clone(), b.clone(), edges)?;

    let mass: u64 = popular_counts.iter().map(|(_, m)| *m).sum();
    if mass != graph.edge_count() as u64 {
        return Err(Error::WitnessFailure(format!("popular mass {mass} differs from |G| = {}", graph.edge_count())));
    }
    if !dense_enough(&graph, epsilon) {
        return Err(Error::WitnessFailure(format!("|G| = {} below (1 - ε)|A||B|", graph.edge_count())));
    }

    let partial_diff = graph.partial_combine(SetOp::Diff)?;
    let shape = q(a.expander_set(b)?.len() * b.expander_set(a)?.len() * ratio_set_size) / q(na * nb);
    let slack = q(partial_diff.len()) / &shape;
    Ok(PopularRatioResult {
        popular,
        graph,
        epsilon: epsilon.clone(),
        partial_diff,
        ratio_set_size,
        bound_rhs_shape: shape,
        slack,
    })
}

/// Outcome of the exhaustive injectivity check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InjectionCertificate {
    /// `|S|`.
    pub s_size: u64,
    /// `|A −_G B|`, the number of abscissae.
    pub abscissae: u64,
    /// Fewest ordinates attached to one abscissa.
    pub min_fibre: u64,
    /// `|A(B+1)|·|B(A+1)|`.
    pub bound: u64,
    pub report: InequalityReport,
}

impl InjectionCertificate {
    /// `|S| ≥ (ε|A||B|/|A/B|)·|A −_G B|`, the ordinate count with its
    /// explicit constant.
    pub fn ordinate_bound_holds(&self, epsilon: &Q, a_len: usize, b_len: usize, ratio_set_size: usize) -> bool {
        q(self.s_size) * q(ratio_set_size) >= epsilon * q(a_len * b_len) * q(self.abscissae)
    }
}

/// Enumerates `S` and checks that
/// `f(ξ, (c, d)) = (a(ξ) + a(ξ)d, b(ξ) + b(ξ)c)` is injective.
///
/// `a(ξ), b(ξ)` is the lexicographically smallest edge with `a − b = ξ`.
pub fn injection_witness(g: &PairGraph) -> Result<InjectionCertificate> {
    let (a, b) = (g.left(), g.right());
    nonzero(&[a, b])?;
    let ctx = a.ctx();
    let mut reps: BTreeMap<Elem, (&Elem, &Elem)> = BTreeMap::new();
    for (x, y) in g.edge_elems() {
        reps.entry(ctx.sub_unchecked(x, y)).or_insert((x, y));
    }
    let mut images: HashMap<(Elem, Elem), (Elem, Elem, Elem)> = HashMap::new();
    let mut min_fibre = u64::MAX;
    for (xi, &(ax, bx)) in &reps {
        let ratio = ctx.div_unchecked(ax, bx)?;
        let mut fibre = 0;
        for d in b {
            let c = ctx.mul_unchecked(&ratio, d);
            if !a.contains(&c) {
                continue;
            }
            fibre += 1;
            let image =
                (ctx.add_unchecked(ax, &ctx.mul_unchecked(ax, d)), ctx.add_unchecked(bx, &ctx.mul_unchecked(bx, &c)));
            if let Some(prev) = images.insert(image.clone(), (xi.clone(), c.clone(), d.clone())) {
                return Err(Error::CollisionFound(format!(
                    "({}, ({}, {})) and ({xi}, ({c}, {d})) both map to ({}, {})",
                    prev.0, prev.1, prev.2, image.0, image.1
                )));
            }
        }
        min_fibre = min_fibre.min(fibre);
    }
    if reps.is_empty() {
        min_fibre = 0;
    }
    let s_size = images.len() as u64;
    let bound = (a.expander_set(b)?.len() * b.expander_set(a)?.len()) as u64;
    let report = InequalityReport::exact(
        "injection",
        crate::report::Relation::Le,
        q(s_size),
        q(bound),
        &instance_digest(&[a, b], &format!("edges={:?}", g.edges())),
    );
    Ok(InjectionCertificate { s_size, abscissae: reps.len() as u64, min_fibre, bound, report })
}

/// Left vertices of degree at least `(1 − √ε)|B|`, without the density
/// precondition.
pub(crate) fn high_degree_left(g: &PairGraph, epsilon: &Q) -> FSet {
    let nb = q(g.right().len());
    let keep: Vec<usize> = g
        .degrees_left()
        .into_iter()
        .enumerate()
        .filter(|&(_, d)| at_least_one_minus_c_sqrt(&q(d), &nb, 1, epsilon))
        .map(|(i, _)| i)
        .collect();
    g.left().select(keep)
}

/// `A' = {a : deg_G(a) ≥ (1 − √ε)|B|}`, with `|A'| ≥ (1 − √ε)|A|` checked.
pub fn dense_degree_subset(g: &PairGraph, epsilon: &Q) -> Result<FSet> {
    check_epsilon(epsilon, true, &Q::one())?;
    require_dense(g, epsilon)?;
    let out = high_degree_left(g, epsilon);
    if !at_least_one_minus_c_sqrt(&q(out.len()), &q(g.left().len()), 1, epsilon) {
        return Err(Error::WitnessFailure(format!("dense subset has {} of {} vertices", out.len(), g.left().len())));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CoverSign {
    /// Translates `t + B`.
    #[serde(rename = "+B")]
    Plus,
    /// Translates `t − B`.
    #[serde(rename = "-B")]
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverResult {
    pub covered: FSet,
    pub translates: Vec<Elem>,
    pub sign: CoverSign,
    pub iterations: usize,
    /// The dense-degree subset the loop starts from.
    pub start: FSet,
}

impl CoverResult {
    /// `⋃ (t ± B)` over the chosen translates.
    pub fn union_of_translates(&self, b: &FSet) -> Result<FSet> {
        let mut acc = FSet::empty(b.ctx().clone());
        let base = match self.sign {
            CoverSign::Plus => b.clone(),
            CoverSign::Minus => b.negate(),
        };
        for t in &self.translates {
            acc = acc.union(&base.translate(t)?)?;
        }
        Ok(acc)
    }
}

/// Greedy covering of most of `A` by translates of `±B`.
///
/// Starting from the dense-degree subset `A₁`, each step picks the shift
/// covering the most remaining elements (ties to the smallest shift) and
/// stops once at most `√ε|A₁|` elements remain. Every step is checked to
/// discard at least `|A*|(1 − √ε)²|B| / |A −_G B|` elements.
pub fn greedy_cover(g: &PairGraph, epsilon: &Q, sign: CoverSign) -> Result<CoverResult> {
    check_epsilon(epsilon, true, &Q::new(1.into(), 4.into()))?;
    require_dense(g, epsilon)?;
    let b = g.right();
    let start = high_degree_left(g, epsilon);
    let partial = q(g.partial_combine(SetOp::Diff)?.len());
    let a1 = q(start.len());
    let stop = epsilon * &a1 * &a1;
    let op = match sign {
        CoverSign::Plus => SetOp::Diff,
        CoverSign::Minus => SetOp::Sum,
    };
    let shifted = match sign {
        CoverSign::Plus => b.clone(),
        CoverSign::Minus => b.negate(),
    };

    let mut remaining = start.clone();
    let mut translates = Vec::new();
    while !remaining.is_empty() && q(remaining.len() * remaining.len()) > stop {
        let counts = remaining.representation_counts(b, op)?;
        let best = counts.iter().map(|(_, m)| *m).max().expect("nonempty");
        let t = counts.into_iter().find(|(_, m)| *m == best).expect("max attained").0;
        let hit = remaining.intersection(&shifted.translate(&t)?)?;
        debug_assert_eq!(hit.len() as u64, best);
        let r = q(hit.len()) * &partial / q(remaining.len() * b.len());
        if !sqrt_sum_at_least_one(&r, epsilon) {
            return Err(Error::WitnessFailure(format!(
                "step {} discards {} of {}, below the energy bound",
                translates.len() + 1,
                hit.len(),
                remaining.len()
            )));
        }
        remaining = remaining.difference(&hit)?;
        translates.push(t);
    }
    let covered = start.difference(&remaining)?;
    let result = CoverResult { covered, iterations: translates.len(), translates, sign, start };
    if !result.covered.is_subset(&result.union_of_translates(b)?) {
        return Err(Error::WitnessFailure("covered set escapes the translates".into()));
    }
    if !at_least_one_minus_c_sqrt(&q(result.covered.len()), &q(g.left().len()), 2, epsilon) {
        return Err(Error::WitnessFailure(format!(
            "covered {} of {}, below (1 - 2√ε)|A|",
            result.covered.len(),
            g.left().len()
        )));
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialRuzsaResult {
    pub a_prime: FSet,
    pub c_prime: FSet,
    /// `|Y|` for the injected set of `(x, b)` pairs.
    pub y_size: u64,
    /// `|A' − C'||B| / (|A −_G B||B −_H C|)`.
    #[serde(serialize_with = "ser_q")]
    pub slack: Q,
    pub report: InequalityReport,
}

/// Partial Ruzsa triangle inequality for dense graphs `G ⊆ A × B`,
/// `H ⊆ B × C`: certifies `(1 − 2√ε)|B||A' − C'| ≤ |A −_G B||B −_H C|`.
pub fn partial_ruzsa(g: &PairGraph, h: &PairGraph, epsilon: &Q) -> Result<PartialRuzsaResult> {
    check_epsilon(epsilon, true, &Q::new(1.into(), 4.into()))?;
    if g.right() != h.left() {
        return Err(Error::InvalidArgument("G and H must share the middle set B".into()));
    }
    require_dense(g, epsilon)?;
    require_dense(h, epsilon)?;
    let b = g.right();
    let ctx = b.ctx();
    let a_prime = dense_degree_subset(g, epsilon)?;
    let ht = h.transpose();
    let c_prime = dense_degree_subset(&ht, epsilon)?;

    let nbrs = |graph: &PairGraph, v: &Elem| -> HashSet<usize> {
        let i = graph.left().index_of(v).expect("vertex of graph");
        graph.left_neighbors(i).iter().map(|&(_, j)| j).collect()
    };
    let b_a: Vec<HashSet<usize>> = a_prime.iter().map(|v| nbrs(g, v)).collect();
    let b_c: Vec<HashSet<usize>> = c_prime.iter().map(|v| nbrs(&ht, v)).collect();
    let nb = q(b.len());
    for (i, ba) in b_a.iter().enumerate() {
        for (k, bc) in b_c.iter().enumerate() {
            let common = ba.intersection(bc).count();
            if !at_least_one_minus_c_sqrt(&q(common), &nb, 2, epsilon) {
                return Err(Error::WitnessFailure(format!(
                    "|B_a ∩ B_c| = {common} for a = {}, c = {}",
                    a_prime.elements()[i],
                    c_prime.elements()[k]
                )));
            }
        }
    }

    let mut reps: BTreeMap<Elem, (usize, usize)> = BTreeMap::new();
    for (i, x) in a_prime.iter().enumerate() {
        for (k, z) in c_prime.iter().enumerate() {
            reps.entry(ctx.sub_unchecked(x, z)).or_insert((i, k));
        }
    }
    let g_diff = g.partial_combine(SetOp::Diff)?;
    let h_diff = h.partial_combine(SetOp::Diff)?;
    let mut images = HashSet::new();
    for &(i, k) in reps.values() {
        let (x, z) = (&a_prime.elements()[i], &c_prime.elements()[k]);
        for &j in b_a[i].intersection(&b_c[k]) {
            let y = &b.elements()[j];
            let image = (ctx.sub_unchecked(x, y), ctx.sub_unchecked(y, z));
            if !g_diff.contains(&image.0) || !h_diff.contains(&image.1) {
                return Err(Error::WitnessFailure(format!(
                    "image ({}, {}) outside the partial differences",
                    image.0, image.1
                )));
            }
            if !images.insert(image) {
                return Err(Error::CollisionFound(format!("Y-map collision at x = {}", ctx.sub_unchecked(x, z))));
            }
        }
    }
    let y_size = images.len() as u64;
    let product = q(g_diff.len() * h_diff.len());
    let k = &nb * q(reps.len());
    // (1 − 2√ε)K ≤ M  ⇔  K − M ≤ 2√ε K.
    let holds = {
        let d = &k - &product;
        !d.is_positive() || &d * &d <= q(4) * epsilon * &k * &k
    };
    let digest = instance_digest(&[g.left(), b, h.right()], &render_rational(epsilon));
    let report = InequalityReport::decided(
        "partial_ruzsa",
        one_minus_c_sqrt_enclosure(&k, 2, epsilon),
        Quantity::Exact(product.clone()),
        holds,
        &digest,
    )
    .with_note(format!("|Y| = {y_size}"));
    let slack = if product.is_zero() { Q::zero() } else { &k / &product };
    Ok(PartialRuzsaResult { a_prime, c_prime, y_size, slack, report })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlunneckeResult {
    /// Subset minimising the slack.
    pub subset: FSet,
    /// Slack with `A' = A`.
    #[serde(serialize_with = "ser_q")]
    pub full_slack: Q,
    /// Minimised slack.
    #[serde(serialize_with = "ser_q")]
    pub slack: Q,
    pub report: InequalityReport,
}

/// Default cap on `|A|` for the exhaustive subset search.
pub const PLUNNECKE_BUDGET: usize = 10;

/// Searches subsets `A' ⊆ A` with `|A'| ≥ ⌈|A|/2⌉` minimising
/// `|A' + X₁ + … + X_k|·|A|^{k−1} / Π|A + X_j|`.
pub fn plunnecke_witness(a: &FSet, xs: &[FSet], budget: usize) -> Result<PlunneckeResult> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("at least one summand X_j is required".into()));
    }
    if a.is_empty() {
        return Err(Error::SetTooSmall("A is empty".into()));
    }
    if a.len() > budget {
        return Err(Error::BudgetExceeded { needed: format!("|A| = {}", a.len()), budget: budget as u64 });
    }
    let mut tail = xs[0].clone();
    let mut denom = q(1);
    for x in xs {
        a.same_ctx(x)?;
        denom *= q(a.combine(x, SetOp::Sum)?.len());
    }
    for x in &xs[1..] {
        tail = tail.combine(x, SetOp::Sum)?;
    }
    let k = xs.len() as i32;
    let scale = Q::from_integer(BigInt::from(a.len()).pow((k - 1) as u32)) / &denom;
    let n = a.len();
    let min_size = n.div_ceil(2);
    let evaluate = |mask: u32| -> Result<(Q, FSet)> {
        let sub = a.select((0..n).filter(|i| mask >> i & 1 == 1));
        let size = sub.combine(&tail, SetOp::Sum)?.len();
        Ok((q(size) * &scale, sub))
    };
    let candidates: Vec<u32> = (1u32..(1 << n)).filter(|m| m.count_ones() as usize >= min_size).collect();
    let scored: Vec<(Q, FSet)> = candidates.into_par_iter().map(evaluate).collect::<Result<_>>()?;
    let (slack, subset) = scored
        .into_iter()
        .min_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.elements().cmp(y.1.elements())))
        .expect("A itself is a candidate");
    let full_slack = evaluate((1u32 << n) - 1)?.0;
    let mut digest_sets = vec![a];
    digest_sets.extend(xs.iter());
    let report = InequalityReport::slack_only(
        "plunnecke",
        Quantity::int(subset.combine(&tail, SetOp::Sum)?.len()),
        Quantity::Exact(&denom / Q::from_integer(BigInt::from(n).pow((k - 1) as u32))),
        &instance_digest(&digest_sets, ""),
    )
    .with_note(format!("|A'|/|A| = {}/{}", subset.len(), n));
    Ok(PlunneckeResult { subset, full_slack, slack, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn fp(p: u64, v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::prime(p).unwrap(), v)
    }

    fn rat(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_comparisons() {
        // ε = 1/4: 1 − √ε = 1/2.
        let e = rat(1, 4);
        assert!(at_least_one_minus_c_sqrt(&q(2), &q(4), 1, &e));
        assert!(!at_least_one_minus_c_sqrt(&rat(19, 10), &q(4), 1, &e));
        assert!(at_least_one_minus_c_sqrt(&q(0), &q(4), 2, &e));
        // √r + √ε ≥ 1 with r = 1/4, ε = 1/4 is exactly 1.
        assert!(sqrt_sum_at_least_one(&rat(1, 4), &rat(1, 4)));
        assert!(!sqrt_sum_at_least_one(&rat(1, 5), &rat(1, 4)));
        assert!(sqrt_sum_at_least_one(&q(1), &q(0)));
        assert!(!sqrt_sum_at_least_one(&rat(99, 100), &q(0)));
        assert_eq!(one_minus_c_sqrt_enclosure(&q(8), 2, &rat(1, 64)), Quantity::Exact(q(6)));
    }

    #[test]
    fn popular_ratio_subgroup() {
        let h = fp(7, &[1, 2, 4]);
        let r = popular_ratio_graph(&h, &h, &rat(1, 2)).unwrap();
        assert_eq!(r.popular, h);
        assert_eq!(r.graph.edge_count(), 9);
        assert_eq!(r.ratio_set_size, 3);
        assert_eq!(r.partial_diff, h.combine(&h, SetOp::Diff).unwrap());
    }

    #[test]
    fn popular_ratio_tiny_epsilon_is_complete() {
        let a = fp(101, &[3, 5, 7, 11]);
        let b = fp(101, &[2, 9, 10]);
        let eps = Q::new(1.into(), (a.len() * b.len() + 1).into());
        let r = popular_ratio_graph(&a, &b, &eps).unwrap();
        assert_eq!(r.graph.edge_count(), 12);
        assert_eq!(r.popular, a.combine(&b, SetOp::Ratio).unwrap());
    }

    #[test]
    fn popular_ratio_errors() {
        let a = fp(7, &[0, 1]);
        let b = fp(7, &[1]);
        assert_eq!(popular_ratio_graph(&a, &b, &rat(1, 2)).unwrap_err(), Error::ZeroElementPresent);
        assert!(matches!(popular_ratio_graph(&b, &b, &q(0)), Err(Error::EpsilonOutOfRange(_))));
        assert!(matches!(popular_ratio_graph(&b, &b, &q(1)), Err(Error::EpsilonOutOfRange(_))));
    }

    #[test]
    fn injection_examples() {
        let h = fp(7, &[1, 2, 4]);
        let empty = PairGraph::empty(h.clone(), h.clone()).unwrap();
        let cert = injection_witness(&empty).unwrap();
        assert_eq!((cert.s_size, cert.abscissae, cert.min_fibre), (0, 0, 0));

        let full = PairGraph::complete(h.clone(), h.clone()).unwrap();
        let cert = injection_witness(&full).unwrap();
        // Every ratio in a subgroup has 3 representations; A − A has 7 elements.
        let diffs = h.combine(&h, SetOp::Diff).unwrap().len() as u64;
        assert_eq!(cert.abscissae, diffs);
        assert_eq!(cert.s_size, 3 * diffs);
        assert!(cert.report.holds());
    }

    #[test]
    fn dense_subset_examples() {
        let a = fp(101, &[1, 2, 3, 4]);
        let full = PairGraph::complete(a.clone(), a.clone()).unwrap();
        assert_eq!(dense_degree_subset(&full, &rat(1, 16)).unwrap(), a);
        let missing = PairGraph::new(
            a.clone(),
            a.clone(),
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&e| e != (0, 0)),
        )
        .unwrap();
        assert_eq!(dense_degree_subset(&missing, &rat(1, 16)).unwrap(), a);
        let sparse = PairGraph::new(a.clone(), a.clone(), [(0, 0)]).unwrap();
        assert!(matches!(dense_degree_subset(&sparse, &rat(1, 16)), Err(Error::GraphTooSparse { .. })));
    }

    #[test]
    fn cover_examples() {
        let b = fp(101, &[1, 5, 9, 20]);
        let t = FieldCtx::prime(101).unwrap().from_i64(30);
        let a = b.translate(&t).unwrap();
        let g = PairGraph::complete(a.clone(), b.clone()).unwrap();
        let c = greedy_cover(&g, &rat(1, 64), CoverSign::Plus).unwrap();
        assert_eq!(c.translates, vec![t]);
        assert_eq!(c.covered, a);

        let g = PairGraph::complete(b.clone(), b.clone()).unwrap();
        let c = greedy_cover(&g, &rat(1, 64), CoverSign::Plus).unwrap();
        assert_eq!(c.translates, vec![FieldCtx::prime(101).unwrap().zero()]);
        let c = greedy_cover(&g, &q(0), CoverSign::Minus).unwrap();
        assert_eq!(c.covered, b);
        assert!(matches!(greedy_cover(&g, &rat(1, 4), CoverSign::Plus), Err(Error::EpsilonOutOfRange(_))));
    }

    #[test]
    fn ruzsa_complete_graphs() {
        let a = fp(101, &[1, 2, 3, 5, 8]);
        let g = PairGraph::complete(a.clone(), a.clone()).unwrap();
        let r = partial_ruzsa(&g, &g, &q(0)).unwrap();
        assert_eq!(r.a_prime, a);
        assert_eq!(r.c_prime, a);
        assert!(r.report.holds());
        let d = a.combine(&a, SetOp::Diff).unwrap().len();
        assert_eq!(r.slack, q(d * a.len()) / q(d * d));
        let r = partial_ruzsa(&g, &g, &rat(1, 64)).unwrap();
        assert!(r.report.holds());
        assert!(r.slack <= Q::one() / (Q::one() - rat(2, 8)));
    }

    #[test]
    fn plunnecke_examples() {
        let ap = FSet::from_i64s(&FieldCtx::rational(), &[0, 1, 2, 3, 4]);
        let r = plunnecke_witness(&ap, &[ap.clone(), ap.clone()], PLUNNECKE_BUDGET).unwrap();
        assert_eq!(r.full_slack, rat(13 * 5, 81));
        assert_eq!(r.slack, rat(11 * 5, 81));
        assert_eq!(r.subset.len(), 3);
        let r = plunnecke_witness(&ap, std::slice::from_ref(&ap), PLUNNECKE_BUDGET).unwrap();
        assert_eq!(r.full_slack, q(1));
        assert!(r.slack <= q(1));
        let big = FSet::from_i64s(&FieldCtx::rational(), &(0..11).collect::<Vec<_>>());
        assert!(matches!(plunnecke_witness(&big, &[ap], PLUNNECKE_BUDGET), Err(Error::BudgetExceeded { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn nonzero_set(p: u64, lo: usize, hi: usize) -> impl Strategy<Value = FSet> {
            proptest::collection::vec(1..p as i64, lo..=hi).prop_map(move |v| fp(p, &v))
        }

        fn dense_graph(a: &FSet, b: &FSet, drop: &[(usize, usize)]) -> PairGraph {
            let (n, m) = (a.len(), b.len());
            let dropped: HashSet<(usize, usize)> = drop.iter().map(|&(i, j)| (i % n, j % m)).collect();
            PairGraph::new(
                a.clone(),
                b.clone(),
                (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|e| !dropped.contains(e)),
            )
            .unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn popular_graph_invariants(a in nonzero_set(101, 10, 10), b in nonzero_set(101, 10, 10)) {
                let eps = rat(1, 4);
                let r = popular_ratio_graph(&a, &b, &eps).unwrap();
                prop_assert!(q(r.graph.edge_count()) >= rat(3, 4) * q(a.len() * b.len()));
                let ctx = a.ctx();
                for (x, y) in r.graph.edge_elems() {
                    let ratio = ctx.div(x, y).unwrap();
                    prop_assert!(r.popular.contains(&ratio));
                    let m = a.dilate_intersection_size(&b, &ratio).unwrap();
                    prop_assert!(q(m * r.ratio_set_size) >= &eps * q(a.len() * b.len()));
                }
                let cert = injection_witness(&r.graph).unwrap();
                prop_assert!(cert.report.holds());
                prop_assert!(cert.ordinate_bound_holds(&eps, a.len(), b.len(), r.ratio_set_size));
            }

            #[test]
            fn injection_on_random_graphs(
                a in nonzero_set(101, 1, 10),
                b in nonzero_set(101, 1, 10),
                edges in proptest::collection::vec((0usize..10, 0usize..10), 0..60),
            ) {
                let (n, m) = (a.len(), b.len());
                let g = PairGraph::new(a, b, edges.into_iter().map(|(i, j)| (i % n, j % m))).unwrap();
                let cert = injection_witness(&g).unwrap();
                prop_assert!(cert.s_size <= cert.bound);
                prop_assert!(cert.s_size >= cert.abscissae);
            }

            #[test]
            fn dense_subset_contract(
                a in nonzero_set(101, 2, 9),
                b in nonzero_set(101, 2, 9),
                drop in proptest::collection::vec((0usize..9, 0usize..9), 0..6),
            ) {
                let g = dense_graph(&a, &b, &drop);
                let eps = rat(1, 4);
                if dense_enough(&g, &eps) {
                    let sub = dense_degree_subset(&g, &eps).unwrap();
                    prop_assert!(at_least_one_minus_c_sqrt(&q(sub.len()), &q(a.len()), 1, &eps));
                    let again = high_degree_left(&g.restrict_left(&sub).unwrap(), &eps);
                    prop_assert_eq!(again, sub);
                }
            }

            #[test]
            fn cover_contract(
                a in nonzero_set(101, 4, 12),
                b in nonzero_set(101, 2, 8),
                drop in proptest::collection::vec((0usize..12, 0usize..8), 0..3),
                minus in any::<bool>(),
            ) {
                let g = dense_graph(&a, &b, &drop);
                let eps = rat(1, 16);
                let sign = if minus { CoverSign::Minus } else { CoverSign::Plus };
                match greedy_cover(&g, &eps, sign) {
                    Ok(c) => {
                        prop_assert!(c.covered.is_subset(&c.union_of_translates(&b).unwrap()));
                        prop_assert!(at_least_one_minus_c_sqrt(&q(c.covered.len()), &q(a.len()), 2, &eps));
                    }
                    Err(Error::GraphTooSparse { .. }) => prop_assert!(!dense_enough(&g, &eps)),
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }

            #[test]
            fn ruzsa_certificate(
                a in nonzero_set(101, 2, 7),
                b in nonzero_set(101, 2, 7),
                c in nonzero_set(101, 2, 7),
                drop_g in proptest::collection::vec((0usize..7, 0usize..7), 0..2),
                drop_h in proptest::collection::vec((0usize..7, 0usize..7), 0..2),
            ) {
                let g = dense_graph(&a, &b, &drop_g);
                let h = dense_graph(&b, &c, &drop_h);
                let eps = rat(1, 5);
                if dense_enough(&g, &eps) && dense_enough(&h, &eps) {
                    let r = partial_ruzsa(&g, &h, &eps).unwrap();
                    prop_assert!(r.report.holds());
                }
            }
        }
    }
}
