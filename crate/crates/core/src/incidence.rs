//! Exact point–line incidences over ℚ and the line family
//! `l_{αb} : y = (αx − 1)b` used to bound rich products from below.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::certified::{root_interval, DEFAULT_PRECISION};
use crate::energy::rich_products;
use crate::error::{Error, Result};
use crate::field::{render_rational, Elem};
use crate::report::{instance_digest, InequalityReport, Quantity, Relation};
use crate::set::FSet;

type Q = BigRational;

fn q(n: impl Into<BigInt>) -> Q {
    Q::from_integer(n.into())
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&render_rational(v))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Point {
    #[serde(serialize_with = "ser_q")]
    pub x: Q,
    #[serde(serialize_with = "ser_q")]
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Point { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        Point { x: q(x), y: q(y) }
    }
}

/// A line in canonical form. Rationals are always reduced, so equal lines
/// compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Line {
    /// `y = m·x + c`.
    Sloped {
        #[serde(serialize_with = "ser_q")]
        m: Q,
        #[serde(serialize_with = "ser_q")]
        c: Q,
    },
    /// `x = x₀`.
    Vertical {
        #[serde(serialize_with = "ser_q")]
        x: Q,
    },
}

impl Line {
    pub fn sloped(m: Q, c: Q) -> Self {
        Line::Sloped { m, c }
    }

    pub fn vertical(x: Q) -> Self {
        Line::Vertical { x }
    }

    pub fn horizontal(y: Q) -> Self {
        Line::Sloped { m: Q::zero(), c: y }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Line::Sloped { m, c } => p.y == m * &p.x + c,
            Line::Vertical { x } => &p.x == x,
        }
    }

    /// The unique common point, if the lines cross.
    pub fn intersection(&self, other: &Line) -> Option<Point> {
        match (self, other) {
            (Line::Sloped { m: m1, c: c1 }, Line::Sloped { m: m2, c: c2 }) => {
                if m1 == m2 {
                    return None;
                }
                let x = (c2 - c1) / (m1 - m2);
                let y = m1 * &x + c1;
                Some(Point { x, y })
            }
            (Line::Sloped { m, c }, Line::Vertical { x }) | (Line::Vertical { x }, Line::Sloped { m, c }) => {
                Some(Point { x: x.clone(), y: m * x + c })
            }
            (Line::Vertical { .. }, Line::Vertical { .. }) => None,
        }
    }
}

fn reject_duplicates<T: std::hash::Hash + Eq + std::fmt::Debug>(items: &[T], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(items.len());
    for it in items {
        if !seen.insert(it) {
            return Err(Error::DuplicateInput(format!("{what} {it:?}")));
        }
    }
    Ok(())
}

/// Lines grouped by slope for per-point lookup.
struct LineIndex {
    by_slope: BTreeMap<Q, HashSet<Q>>,
    vertical: HashSet<Q>,
}

impl LineIndex {
    fn new(lines: &[Line]) -> Self {
        let mut by_slope: BTreeMap<Q, HashSet<Q>> = BTreeMap::new();
        let mut vertical = HashSet::new();
        for l in lines {
            match l {
                Line::Sloped { m, c } => {
                    by_slope.entry(m.clone()).or_default().insert(c.clone());
                }
                Line::Vertical { x } => {
                    vertical.insert(x.clone());
                }
            }
        }
        LineIndex { by_slope, vertical }
    }

    /// Number of indexed lines through `p`.
    fn degree(&self, p: &Point) -> u64 {
        let sloped = self.by_slope.iter().filter(|(m, cs)| cs.contains(&(&p.y - *m * &p.x))).count() as u64;
        sloped + u64::from(self.vertical.contains(&p.x))
    }
}

/// Degrees of every point on the vertical line `x = x₀`, from one pass over
/// the lines.
struct Column {
    heights: HashMap<Q, u64>,
    vertical: u64,
}

impl Column {
    fn new(lines: &[Line], x0: &Q) -> Self {
        let mut heights: HashMap<Q, u64> = HashMap::new();
        let mut vertical = 0;
        for l in lines {
            match l {
                Line::Sloped { m, c } => *heights.entry(m * x0 + c).or_default() += 1,
                Line::Vertical { x } => vertical += u64::from(x == x0),
            }
        }
        Column { heights, vertical }
    }

    fn degree(&self, y: &Q) -> u64 {
        self.heights.get(y).copied().unwrap_or(0) + self.vertical
    }
}

fn incidences_per_point(points: &[Point], index: &LineIndex) -> u64 {
    points.par_iter().map(|p| index.degree(p)).sum()
}

fn incidences_per_line(points: &[Point], lines: &[Line]) -> u64 {
    lines.par_iter().map(|l| points.iter().filter(|p| l.contains(p)).count() as u64).sum()
}

/// `I(P, L)`, computed per point (slope hashing) and per line (direct
/// membership) and cross-checked.
pub fn count_incidences(points: &[Point], lines: &[Line]) -> Result<u64> {
    reject_duplicates(points, "point")?;
    reject_duplicates(lines, "line")?;
    let by_point = incidences_per_point(points, &LineIndex::new(lines));
    let by_line = incidences_per_line(points, lines);
    if by_point != by_line {
        return Err(Error::WitnessFailure(format!(
            "incidence counts disagree: {by_point} per point, {by_line} per line"
        )));
    }
    Ok(by_point)
}

/// Points where at least two lines meet, each with its line count.
pub fn intersection_degrees(lines: &[Line]) -> BTreeMap<Point, u64> {
    let mut through: HashMap<Point, HashSet<usize>> = HashMap::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].intersection(&lines[j]) {
                let s = through.entry(p).or_default();
                s.insert(i);
                s.insert(j);
            }
        }
    }
    through.into_iter().map(|(p, s)| (p, s.len() as u64)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RichPoints {
    pub k: u64,
    pub points: Vec<Point>,
    /// `|L|²/k³ + |L|/k`.
    #[serde(serialize_with = "ser_q")]
    pub shape: Q,
    /// `|P_k| / shape`.
    #[serde(serialize_with = "ser_q")]
    pub slack: Q,
}

/// Points incident to at least `k` lines. With `points = None` the
/// candidates are all pairwise intersections of `lines`, which requires
/// `k ≥ 2` (every point of a line is 1-rich).
pub fn rich_points(points: Option<&[Point]>, lines: &[Line], k: u64) -> Result<RichPoints> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    reject_duplicates(lines, "line")?;
    let mut rich: Vec<Point> = match points {
        Some(ps) => {
            reject_duplicates(ps, "point")?;
            let index = LineIndex::new(lines);
            ps.iter().filter(|p| index.degree(p) >= k).cloned().collect()
        }
        None => {
            if k < 2 {
                return Err(Error::InvalidArgument(
                    "k = 1 over all points of the plane is infinite; pass a point set".into(),
                ));
            }
            intersection_degrees(lines).into_iter().filter(|(_, d)| *d >= k).map(|(p, _)| p).collect()
        }
    };
    rich.sort();
    let n = q(lines.len());
    let shape = &n * &n / q(k.pow(3)) + &n / q(k);
    let slack = if shape.is_zero() { Q::zero() } else { q(rich.len()) / &shape };
    Ok(RichPoints { k, points: rich, shape, slack })
}

/// `I(P, L)` against `|P|^{2/3}|L|^{2/3} + |P| + |L|`, slack only.
pub fn incidence_bound_report(points: &[Point], lines: &[Line]) -> Result<InequalityReport> {
    let i = count_incidences(points, lines)?;
    let (np, nl) = (q(points.len()), q(lines.len()));
    let pl = &np * &nl;
    let cross = root_interval(&(&pl * &pl), 3, DEFAULT_PRECISION);
    let linear = &np + &nl;
    let rhs = if cross.is_point() {
        Quantity::Exact(cross.lo() + &linear)
    } else {
        Quantity::Enclosed(crate::certified::Interval::new(cross.lo() + &linear, cross.hi() + &linear))
    };
    Ok(InequalityReport::slack_only(
        "incidence_bound",
        Quantity::int(i),
        rhs,
        &format!("P={};L={}", points.len(), lines.len()),
    ))
}

/// A member of the family, with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyLine {
    pub line: Line,
    pub alpha: Elem,
    pub b: Elem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineFamily {
    pub lines: Vec<FamilyLine>,
    /// Pairs `(α, b)` whose line repeated an earlier one.
    pub duplicates: Vec<(Elem, Elem)>,
}

impl LineFamily {
    pub fn geometric(&self) -> Vec<Line> {
        self.lines.iter().map(|f| f.line.clone()).collect()
    }
}

fn rational_only(sets: &[&FSet]) -> Result<()> {
    if sets.iter().all(|s| s.ctx().is_rational()) {
        Ok(())
    } else {
        Err(Error::FieldMismatch("incidence geometry runs over the rationals only"))
    }
}

/// `l_{αb} : y = αb·x − b` for `α ∈ A(A+1)`, `b ∈ B`.
pub fn expander_line_family(a: &FSet, b: &FSet) -> Result<LineFamily> {
    rational_only(&[a, b])?;
    if b.contains_zero() {
        return Err(Error::ZeroElementPresent);
    }
    let alphas = a.expander_set(a)?;
    let mut seen = HashSet::new();
    let mut lines = Vec::with_capacity(alphas.len() * b.len());
    let mut duplicates = Vec::new();
    for alpha in &alphas {
        for bb in b {
            let (al, bq) = (alpha.to_rational(), bb.to_rational());
            let line = Line::sloped(&al * &bq, -bq);
            if seen.insert(line.clone()) {
                lines.push(FamilyLine { line, alpha: alpha.clone(), b: bb.clone() });
            } else {
                duplicates.push((alpha.clone(), bb.clone()));
            }
        }
    }
    Ok(LineFamily { lines, duplicates })
}

/// Largest family for which `|P_t|` is computed from all pairwise
/// intersections.
pub const EXACT_RICH_LIMIT: usize = 160;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StLowerBound {
    pub t: u64,
    pub s_t: FSet,
    /// `|S_t||A|` witness points checked.
    pub witnesses: u64,
    /// Exact `|P_t|` when the family is small enough and `t ≥ 2`.
    pub p_t: Option<u64>,
    pub report: InequalityReport,
}

/// Checks that every `(1/a, s)` with `s ∈ S_t(A, B)`, `a ∈ A` lies on at
/// least `t` distinct lines `l_{a(aᵢ+1), bᵢ}`, hence `|P_t| ≥ |S_t||A|`.
pub fn st_lower_bound_check(a: &FSet, b: &FSet, t: u64) -> Result<StLowerBound> {
    rational_only(&[a, b])?;
    if a.contains_zero() || b.contains_zero() {
        return Err(Error::ZeroElementPresent);
    }
    let s_t = rich_products(a, b, t)?;
    let family = expander_line_family(a, b)?;
    let lines = family.geometric();
    let family_set: HashSet<&Line> = lines.iter().collect();

    let reps: Vec<(Q, Vec<(Q, Q)>)> = s_t
        .iter()
        .map(|s| {
            let s = s.to_rational();
            let pairs = a
                .iter()
                .filter_map(|ai| {
                    let ai = ai.to_rational();
                    let bi = &s / &ai;
                    b.contains(&Elem::Rational(bi.clone())).then_some((ai, bi))
                })
                .collect();
            (s, pairs)
        })
        .collect();

    let columns: Vec<Column> =
        a.elements().par_iter().map(|a0| Column::new(&lines, &(Q::one() / a0.to_rational()))).collect();
    let mut witnesses = 0u64;
    for (s, pairs) in &reps {
        for (a0, column) in a.iter().zip(&columns) {
            let a0 = a0.to_rational();
            let p = Point::new(Q::one() / &a0, s.clone());
            let mut through = HashSet::new();
            for (ai, bi) in pairs {
                let alpha = &a0 * (ai + Q::one());
                let line = Line::sloped(&alpha * bi, -bi.clone());
                if !line.contains(&p) || !family_set.contains(&line) {
                    return Err(Error::WitnessFailure(format!(
                        "({}, {}) not on l_{{{}, {}}}",
                        render_rational(&p.x),
                        render_rational(&p.y),
                        render_rational(&alpha),
                        render_rational(bi)
                    )));
                }
                through.insert(line);
            }
            let degree = column.degree(&p.y);
            if (through.len() as u64) < t || degree < t {
                return Err(Error::WitnessFailure(format!(
                    "({}, {}) lies on {} distinct family lines, fewer than t = {t}",
                    render_rational(&p.x),
                    render_rational(&p.y),
                    through.len()
                )));
            }
            witnesses += 1;
        }
    }

    let p_t = (t >= 2 && lines.len() <= EXACT_RICH_LIMIT)
        .then(|| intersection_degrees(&lines).values().filter(|&&d| d >= t).count() as u64);
    let lhs = witnesses;
    debug_assert_eq!(lhs, (s_t.len() * a.len()) as u64);
    let rhs = p_t.unwrap_or(witnesses);
    let digest = instance_digest(&[a, b], &format!("t={t}"));
    let mut report = InequalityReport::exact("R7", Relation::Le, q(s_t.len() * a.len()), q(rhs), &digest);
    report = report.with_note(match p_t {
        Some(_) => "rhs is the exact |P_t| over all intersections of the family".to_string(),
        None => "rhs counts verified witness points of P_t".to_string(),
    });
    Ok(StLowerBound { t, s_t, witnesses, p_t, report })
}

/// `|S_t(A, B)|` against `|A(A+1)|²|B|²/(|A|t³)`, slack only.
pub fn st_upper_shape_report(a: &FSet, b: &FSet, t: u64) -> Result<InequalityReport> {
    let s_t = rich_products(a, b, t)?;
    let e = q(a.expander_set(a)?.len());
    let nb = q(b.len());
    let rhs = &e * &e * &nb * &nb / (q(a.len()) * q(t.pow(3)));
    Ok(InequalityReport::slack_only(
        "R9",
        Quantity::int(s_t.len()),
        Quantity::Exact(rhs),
        &instance_digest(&[a, b], &format!("t={t}")),
    ))
}

/// `A ⊗ B` as points, for grid examples.
pub fn grid(xs: &FSet, ys: &FSet) -> Vec<Point> {
    xs.iter().flat_map(|x| ys.iter().map(move |y| Point::new(x.to_rational(), y.to_rational()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn qs(v: &[i64]) -> FSet {
        FSet::from_i64s(&FieldCtx::rational(), v)
    }

    fn grid3() -> Vec<Point> {
        grid(&qs(&[0, 1, 2]), &qs(&[0, 1, 2]))
    }

    #[test]
    fn grid_incidences() {
        let horiz: Vec<Line> = (0..3).map(|y| Line::horizontal(q(y))).collect();
        assert_eq!(count_incidences(&grid3(), &horiz).unwrap(), 9);
        assert_eq!(count_incidences(&grid3(), &[]).unwrap(), 0);
        let mut axis = horiz.clone();
        axis.extend((0..3).map(|x| Line::vertical(q(x))));
        assert_eq!(count_incidences(&grid3(), &axis).unwrap(), 18);
        let dup = vec![Line::horizontal(q(0)), Line::horizontal(q(0))];
        assert!(matches!(count_incidences(&grid3(), &dup), Err(Error::DuplicateInput(_))));
    }

    #[test]
    fn rich_point_examples() {
        let horiz: Vec<Line> = (0..3).map(|y| Line::horizontal(q(y))).collect();
        let p = grid3();
        assert_eq!(rich_points(Some(&p), &horiz, 1).unwrap().points.len(), 9);
        assert!(rich_points(Some(&p), &horiz, 3).unwrap().points.is_empty());
        let pencil: Vec<Line> = (1..=5).map(|m| Line::sloped(q(m), q(0))).collect();
        let r = rich_points(None, &pencil, 5).unwrap();
        assert_eq!(r.points, vec![Point::ints(0, 0)]);
        assert_eq!(r.shape, q(25) / q(125) + q(1));
        assert!(rich_points(None, &pencil, 1).is_err());
    }

    #[test]
    fn intersections() {
        let l1 = Line::sloped(q(1), q(0));
        let l2 = Line::sloped(q(-1), q(2));
        assert_eq!(l1.intersection(&l2), Some(Point::ints(1, 1)));
        assert_eq!(l1.intersection(&Line::vertical(q(3))), Some(Point::ints(3, 3)));
        assert_eq!(l1.intersection(&Line::sloped(q(1), q(5))), None);
    }

    #[test]
    fn family_examples() {
        let f = expander_line_family(&qs(&[1]), &qs(&[1])).unwrap();
        assert_eq!(f.lines.len(), 1);
        assert_eq!(f.lines[0].line, Line::sloped(q(2), q(-1)));
        let a = qs(&[2, 3]);
        assert_eq!(a.expander_set(&a).unwrap(), qs(&[6, 8, 9, 12]));
        let f = expander_line_family(&a, &a).unwrap();
        assert_eq!(f.lines.len(), 8);
        assert!(f.duplicates.is_empty());
        assert_eq!(expander_line_family(&a, &qs(&[0, 1])).unwrap_err(), Error::ZeroElementPresent);
        let fp = FSet::from_i64s(&FieldCtx::prime(7).unwrap(), &[1, 2]);
        assert!(matches!(expander_line_family(&fp, &fp), Err(Error::FieldMismatch(_))));
    }

    #[test]
    fn st_lower_examples() {
        let a = qs(&[2, 3]);
        let r = st_lower_bound_check(&a, &a, 1).unwrap();
        assert_eq!(r.s_t, qs(&[4, 6, 9]));
        assert_eq!(r.witnesses, 6);
        assert!(r.report.holds());
        let r = st_lower_bound_check(&qs(&[5]), &qs(&[7]), 1).unwrap();
        assert_eq!(r.witnesses, 1);
        let r = st_lower_bound_check(&qs(&[2, 4, 8, 16]), &qs(&[2, 4, 8, 16]), 3).unwrap();
        assert!(r.p_t.is_some());
        assert!(r.report.holds());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rset(max: usize) -> impl Strategy<Value = FSet> {
            proptest::collection::vec((1i64..12, 1i64..5, any::<bool>()), 1..=max).prop_map(|v| {
                let fr: Vec<(i64, i64)> = v.into_iter().map(|(n, d, neg)| (if neg { -n } else { n }, d)).collect();
                FSet::from_fractions(&fr).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn methods_agree(
                pts in proptest::collection::btree_set((-4i64..5, -4i64..5), 0..30),
                lns in proptest::collection::btree_set((-3i64..4, -3i64..4, any::<bool>()), 0..12),
            ) {
                let points: Vec<Point> = pts.into_iter().map(|(x, y)| Point::ints(x, y)).collect();
                let lines: Vec<Line> = lns
                    .into_iter()
                    .map(|(m, c, v)| if v { Line::vertical(q(m)) } else { Line::sloped(q(m), q(c)) })
                    .collect::<HashSet<_>>()
                    .into_iter()
                    .collect();
                let i = count_incidences(&points, &lines).unwrap();
                let rich: Vec<usize> = (1..5).map(|k| rich_points(Some(&points), &lines, k).unwrap().points.len()).collect();
                prop_assert!(rich.windows(2).all(|w| w[1] <= w[0]));
                prop_assert!(i >= rich[0] as u64);
            }

            #[test]
            fn st_lower_never_fails(a in rset(8), b in rset(8), t in 1u64..4) {
                let t = t.min(a.len().min(b.len()) as u64);
                let r = st_lower_bound_check(&a, &b, t).unwrap();
                prop_assert!(r.report.holds());
            }
        }
    }
}
