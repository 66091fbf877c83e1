//! Extremal search for small `|A(A+1)|`: exhaustive minima at tiny scale,
//! seeded hill climbing and annealing beyond it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certified::{log_ratio_interval, Interval, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::field::{Elem, FieldCtx};
use crate::set::FSet;

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_ITERATIONS: u64 = 2_000;
pub const DEFAULT_RESTARTS: u32 = 20;
pub const DEFAULT_COOLING: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Hillclimb,
    Anneal,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Exhaustive => "exhaustive",
            SearchMode::Hillclimb => "hillclimb",
            SearchMode::Anneal => "anneal",
        })
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "hillclimb" => Ok(SearchMode::Hillclimb),
            "anneal" => Ok(SearchMode::Anneal),
            _ => Err(Error::InvalidArgument(format!("unknown search mode {s:?}"))),
        }
    }
}

/// Search parameters. Over `Q` the universe is the integer range
/// `rational_range`.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub ctx: FieldCtx,
    pub rational_range: Option<(i64, i64)>,
    pub set_size: usize,
    pub mode: SearchMode,
    pub seed: u64,
    /// Moves per restart in the stochastic modes.
    pub iteration_cap: u64,
    /// Enforce `|A|² < p` over a prime field.
    pub density_guard: bool,
    /// Admit `0` and `-1` into candidate sets.
    pub admit_degenerate: bool,
    /// Largest number of candidates the exhaustive mode may enumerate.
    pub budget: u64,
    pub restarts: u32,
    pub cooling: f64,
}

impl SearchConfig {
    pub fn new(ctx: FieldCtx, set_size: usize, mode: SearchMode) -> Self {
        SearchConfig {
            ctx,
            rational_range: None,
            set_size,
            mode,
            seed: 0,
            iteration_cap: DEFAULT_ITERATIONS,
            density_guard: true,
            admit_degenerate: false,
            budget: DEFAULT_BUDGET,
            restarts: DEFAULT_RESTARTS,
            cooling: DEFAULT_COOLING,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_range(mut self, lo: i64, hi: i64) -> Self {
        self.rational_range = Some((lo, hi));
        self
    }

    /// Admissible elements in canonical order.
    pub fn universe(&self) -> Result<Vec<Elem>> {
        let keep = |e: &Elem| self.admit_degenerate || !(self.ctx.is_zero(e) || self.ctx.is_minus_one(e));
        let elems: Vec<Elem> = match (&self.ctx, self.rational_range) {
            (FieldCtx::Rational, Some((lo, hi))) if lo <= hi => (lo..=hi).map(|v| self.ctx.from_i64(v)).collect(),
            (FieldCtx::Rational, _) => {
                return Err(Error::InvalidArgument("rational search needs a nonempty integer range".into()))
            }
            (FieldCtx::Prime(_), _) => {
                let p = self
                    .ctx
                    .modulus_u64()
                    .ok_or_else(|| Error::InvalidArgument("search needs a word-sized modulus".into()))?;
                (0..p).map(|v| Elem::Residue(v.into())).collect()
            }
        };
        let mut out: Vec<Elem> = elems.into_iter().filter(keep).collect();
        out.sort();
        Ok(out)
    }

    fn validate(&self) -> Result<Vec<Elem>> {
        if self.set_size == 0 {
            return Err(Error::InvalidArgument("set size must be positive".into()));
        }
        if let (true, Some(p)) = (self.density_guard, self.ctx.modulus()) {
            if BigUint::from(self.set_size * self.set_size) >= *p {
                return Err(Error::DensityViolated { size: self.set_size, modulus: p.to_string() });
            }
        }
        let universe = self.universe()?;
        if universe.len() < self.set_size {
            return Err(Error::SetTooSmall(format!(
                "universe has {} admissible elements, fewer than n = {}",
                universe.len(),
                self.set_size
            )));
        }
        Ok(universe)
    }
}

/// The best set found, with `log|A(A+1)| / log|A|` enclosed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalRecord {
    /// Field label: the modulus, or `Q`.
    pub field: String,
    pub n: usize,
    pub witness: FSet,
    pub value: u64,
    /// `None` when `n = 1`.
    pub exponent: Option<Interval>,
    pub certified_min: bool,
    pub mode: SearchMode,
    pub seed: Option<u64>,
}

impl ExtremalRecord {
    fn build(witness: FSet, value: u64, mode: SearchMode, seed: Option<u64>) -> Self {
        let n = witness.len();
        let exponent = log_ratio_interval(&BigUint::from(value), &BigUint::from(n), DEFAULT_PRECISION);
        let field = match witness.ctx().modulus() {
            Some(p) => p.to_string(),
            None => "Q".to_string(),
        };
        ExtremalRecord { field, n, witness, value, exponent, certified_min: mode == SearchMode::Exhaustive, mode, seed }
    }

    /// Recomputes `|A(A+1)|` from the witness.
    pub fn recheck(&self) -> Result<bool> {
        Ok(self.witness.expander_set(&self.witness)?.len() as u64 == self.value && self.witness.len() == self.n)
    }
}

/// Ordering key: `|A(A+1)|`, then the representative sum, then colex.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Key {
    value: u64,
    sum: BigRational,
    desc: Vec<Elem>,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then_with(|| self.sum.cmp(&other.sum)).then_with(|| self.desc.cmp(&other.desc))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn evaluate(ctx: &FieldCtx, universe: &[Elem], idx: &[usize]) -> (Key, FSet) {
    let set = FSet::new(ctx.clone(), idx.iter().map(|&i| universe[i].clone())).expect("universe elements are valid");
    let value = set.expander_set(&set).expect("same context").len() as u64;
    let mut desc = set.elements().to_vec();
    desc.reverse();
    (Key { value, sum: set.representative_sum(), desc }, set)
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Advances `idx` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Global minimum of `|A(A+1)|` over admissible `n`-sets.
pub fn exhaustive_min(cfg: &SearchConfig) -> Result<ExtremalRecord> {
    let universe = cfg.validate()?;
    let (u, k) = (universe.len(), cfg.set_size);
    let needed = binomial(u, k);
    if needed > BigUint::from(cfg.budget) {
        return Err(Error::BudgetExceeded { needed: needed.to_string(), budget: cfg.budget });
    }
    let best = (0..=u - k)
        .into_par_iter()
        .filter_map(|first| {
            let rest = u - first - 1;
            let mut tail: Vec<usize> = (0..k - 1).collect();
            let mut best: Option<(Key, FSet)> = None;
            loop {
                let idx: Vec<usize> = std::iter::once(first).chain(tail.iter().map(|t| first + 1 + t)).collect();
                let cand = evaluate(&cfg.ctx, &universe, &idx);
                if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                    best = Some(cand);
                }
                if k == 1 || !next_combination(&mut tail, rest) {
                    break;
                }
            }
            best
        })
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("at least one candidate");
    Ok(ExtremalRecord::build(best.1, best.0.value, SearchMode::Exhaustive, None))
}

fn restart(cfg: &SearchConfig, universe: &[Elem], stream: u64) -> (Key, FSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let (u, k) = (universe.len(), cfg.set_size);
    let mut members = sample(&mut rng, u, k).into_vec();
    members.sort_unstable();
    let mut current = evaluate(&cfg.ctx, universe, &members);
    let mut best = current.clone();
    let mut temperature = k as f64;
    if u == k {
        return best;
    }
    for _ in 0..cfg.iteration_cap {
        let out = rng.gen_range(0..k);
        let mut incoming = rng.gen_range(0..u - k);
        for &m in &members {
            if m <= incoming {
                incoming += 1;
            }
        }
        // `members` is sorted, so the skip above lands on a non-member.
        let mut trial = members.clone();
        trial[out] = incoming;
        trial.sort_unstable();
        let cand = evaluate(&cfg.ctx, universe, &trial);
        let accept = match cfg.mode {
            SearchMode::Anneal => {
                cand.0 <= current.0 || {
                    let delta = cand.0.value as f64 - current.0.value as f64;
                    let draw: f64 = rng.gen();
                    draw < (-delta.max(0.0) / temperature.max(f64::MIN_POSITIVE)).exp()
                }
            }
            _ => cand.0 <= current.0,
        };
        if accept {
            members = trial;
            current = cand;
            if current.0 < best.0 {
                best = current.clone();
            }
        }
        temperature *= cfg.cooling;
    }
    best
}

/// Seeded hill climbing or annealing over single-element swaps. Restart `r`
/// draws from ChaCha8 stream `r` of the configured seed.
pub fn stochastic_search(cfg: &SearchConfig) -> Result<ExtremalRecord> {
    if cfg.mode == SearchMode::Exhaustive {
        return Err(Error::InvalidArgument("stochastic search needs hillclimb or anneal".into()));
    }
    let universe = cfg.validate()?;
    let best = (0..cfg.restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| restart(cfg, &universe, r))
        .min_by(|a, b| a.0.cmp(&b.0))
        .expect("at least one restart");
    Ok(ExtremalRecord::build(best.1, best.0.value, cfg.mode, Some(cfg.seed)))
}

/// Runs the configured mode.
pub fn run(cfg: &SearchConfig) -> Result<ExtremalRecord> {
    match cfg.mode {
        SearchMode::Exhaustive => exhaustive_min(cfg),
        _ => stochastic_search(cfg),
    }
}

pub const TABLE_HEADER: &str = "p,n,value,exponent_lo,exponent_hi,certified,witness,seed";

fn field_order(label: &str) -> (u8, BigUint) {
    match label.parse::<BigUint>() {
        Ok(p) => (0, p),
        Err(_) => (1, BigUint::default()),
    }
}

/// The smallest record per `(field, n)`, sorted by modulus then `n` with `Q`
/// last, as CSV rows.
pub fn exponent_table(records: &[ExtremalRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("exponent table needs at least one record".into()));
    }
    let mut sorted: Vec<&ExtremalRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        field_order(&a.field)
            .cmp(&field_order(&b.field))
            .then(a.n.cmp(&b.n))
            .then(a.value.cmp(&b.value))
            .then(b.certified_min.cmp(&a.certified_min))
    });
    sorted.dedup_by(|later, earlier| later.field == earlier.field && later.n == earlier.n);
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in sorted {
        let (lo, hi) = match &r.exponent {
            Some(i) => (i.lo_decimal(), i.hi_decimal()),
            None => (String::new(), String::new()),
        };
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{lo},{hi},{},{},{seed}\n",
            r.field,
            r.n,
            r.value,
            r.certified_min,
            r.witness.rendered().join(" ")
        ));
    }
    Ok(out)
}
