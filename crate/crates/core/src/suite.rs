//! Verification batteries: exhaustive and seeded property checks over the
//! whole library, with per-check verdicts.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::CartanMatrix;
use crate::doubleflag::{
    extend_cartan, link_boundary_complex, q_el_label, q_interval_hat, z_sample, z_sample_key,
    TripleIndex,
};
use crate::error::{Error, Result};
use crate::homology::{is_sphere_signature, reduced_homology};
use crate::poset::label::{el_label_twisted_interval, verify_el, ChainReading, ReflectionOrder};
use crate::poset::{order_complex, ComplexMode};
use crate::rational::Rational;
use crate::sl::{
    random_positive, tnn_test, GeneratorKind, MrKind, ParamSign, PinnedGroup, RatMatrix,
};
use crate::twisted::{demazure_max_inverse, demazure_min, ParabolicContext};
use crate::weyl::{Budget, WeylElement, WeylGroup};

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Some cases hit an enumeration budget and none failed.
    Inconclusive,
}

/// Result of one battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Verdict,
    pub cases: usize,
    pub failures: usize,
    pub inconclusive: usize,
    /// First failure (or budget event), for reproduction.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

/// Which batteries to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteKind {
    Flags,
    Twisted,
    Doubleflag,
    All,
}

/// Report of a suite run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub seed: u64,
    pub verdict: Verdict,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn new(suite: SuiteKind, seed: u64, checks: Vec<CheckReport>) -> Self {
        let verdict = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if checks.iter().any(|c| c.verdict == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        SuiteReport {
            suite,
            seed,
            verdict,
            checks,
        }
    }

    /// Clears timings so that reports are reproducible byte for byte.
    pub fn without_timing(mut self) -> Self {
        for c in &mut self.checks {
            c.elapsed_ms = None;
        }
        self
    }
}

/// Sizes of the batteries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Finite Cartan types for the order and shellability batteries.
    pub weyl_types: Vec<String>,
    /// Largest `l^J`-difference of the shellability battery.
    pub max_shell_gap: i64,
    /// Infinite rank-two types for the sampled shellability intervals.
    pub infinite_types: Vec<String>,
    pub infinite_intervals: usize,
    /// Finite Cartan types for the Demazure oracle battery.
    pub demazure_types: Vec<String>,
    /// `n` for the `SL_n` batteries on twisted cells.
    pub sl_sizes: Vec<usize>,
    /// Largest `l^J`-difference of the twisted-cell batteries.
    pub max_cell_gap: i64,
    pub samples: usize,
    /// Distinct parameter vectors per cell of dimension at least 2 in the
    /// injectivity check.
    pub injectivity_vectors: usize,
    /// Base ranks (type A) for the thickening and `Q̂` batteries.
    pub double_ranks: Vec<usize>,
    pub max_q_rank: i64,
    pub max_link_length: usize,
    /// `n` for the `Z` sampling battery.
    pub z_sizes: Vec<usize>,
    pub max_z_dimension: i64,
    /// `n` for the total nonnegativity battery.
    pub tnn_sizes: Vec<usize>,
    pub tnn_products: usize,
    pub tnn_negatives: usize,
    pub budget: Budget,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            weyl_types: ["A2", "A3", "B2", "G2"].map(String::from).to_vec(),
            max_shell_gap: 4,
            infinite_types: ["A1~", "H3,3"].map(String::from).to_vec(),
            infinite_intervals: 50,
            demazure_types: ["A2", "A3", "B2"].map(String::from).to_vec(),
            sl_sizes: vec![3, 4],
            max_cell_gap: 3,
            samples: 100,
            injectivity_vectors: 1000,
            double_ranks: vec![1, 2],
            max_q_rank: 4,
            max_link_length: 5,
            z_sizes: vec![2, 3],
            max_z_dimension: 3,
            tnn_sizes: vec![3, 4],
            tnn_products: 500,
            tnn_negatives: 100,
            budget: Budget::default(),
        }
    }
}

impl SuiteConfig {
    /// A reduced configuration for smoke runs: small groups, few samples.
    pub fn quick(seed: u64) -> Self {
        SuiteConfig {
            seed,
            weyl_types: ["A2", "B2"].map(String::from).to_vec(),
            max_shell_gap: 3,
            infinite_intervals: 10,
            demazure_types: vec!["A2".into()],
            sl_sizes: vec![3],
            max_cell_gap: 2,
            samples: 5,
            injectivity_vectors: 20,
            double_ranks: vec![1],
            max_q_rank: 3,
            max_link_length: 3,
            z_sizes: vec![2],
            max_z_dimension: 2,
            tnn_sizes: vec![3],
            tnn_products: 20,
            tnn_negatives: 10,
            ..Self::default()
        }
    }

    fn group(&self, name: &str) -> Result<WeylGroup> {
        Ok(WeylGroup::with_budget(
            CartanMatrix::from_name(name)?,
            self.budget,
        ))
    }

    /// A generator seeded from the suite seed and a per-task tag, so that
    /// every task is reproducible on its own.
    fn rng(&self, tag: &str) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

/// Accumulates case outcomes of a battery.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    inconclusive: usize,
    detail: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.detail.is_none() {
                self.detail = Some(what());
            }
        }
    }

    /// Records a fallible case: budget errors are inconclusive, other errors
    /// are failures.
    fn check_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(Error::BudgetExceeded { what: w, limit }) => {
                self.cases += 1;
                self.inconclusive += 1;
                if self.detail.is_none() {
                    self.detail = Some(format!("{}: {w} budget of {limit} exceeded", what()));
                }
            }
            Err(e) => self.check(false, || format!("{}: {e}", what())),
        }
    }

    fn finish(self, name: &str, seed: Option<u64>, start: Instant) -> CheckReport {
        let verdict = if self.failures > 0 {
            Verdict::Fail
        } else if self.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        CheckReport {
            name: name.to_string(),
            verdict,
            cases: self.cases,
            failures: self.failures,
            inconclusive: self.inconclusive,
            detail: self.detail,
            seed,
            elapsed_ms: Some(start.elapsed().as_millis() as u64),
        }
    }
}

/// An ordered pair `(v, w)` of group elements.
type Pair = (WeylElement, WeylElement);

fn all_pairs(elems: &[WeylElement]) -> impl Iterator<Item = (&WeylElement, &WeylElement)> {
    elems
        .iter()
        .flat_map(move |v| elems.iter().map(move |w| (v, w)))
}

/// `<=^∅` is Bruhat order, `<=^I` reversed Bruhat order, every `<=^J` is a
/// partial order and agrees with `v w_{J,0} <= w w_{J,0}`.
pub fn order_sanity(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for name in &cfg.weyl_types {
        let r = (|| -> Result<()> {
            let g = cfg.group(name)?;
            let elems = g.elements()?;
            let n = elems.len();
            let bruhat: Vec<Vec<bool>> = elems
                .iter()
                .map(|v| elems.iter().map(|w| v.bruhat_leq(w)).collect())
                .collect();
            for ctx in ParabolicContext::all_subsets(&g) {
                let tag = || format!("{name} J={:?}", ctx.members());
                let mut leq = vec![vec![false; n]; n];
                for (a, v) in elems.iter().enumerate() {
                    for (b, w) in elems.iter().enumerate() {
                        leq[a][b] = ctx.j_leq(v, w)?;
                    }
                }
                let w0 = ctx.longest_element().expect("finite type");
                let full = ctx.members().len() == g.rank();
                for a in 0..n {
                    t.check(leq[a][a], || format!("{}: not reflexive", tag()));
                    for b in 0..n {
                        if ctx.members().is_empty() {
                            t.check(leq[a][b] == bruhat[a][b], || {
                                format!("{}: differs from Bruhat", tag())
                            });
                        }
                        if full {
                            t.check(leq[a][b] == bruhat[b][a], || {
                                format!("{}: differs from reversed Bruhat", tag())
                            });
                        }
                        if a != b && leq[a][b] {
                            t.check(!leq[b][a], || format!("{}: not antisymmetric", tag()));
                        }
                        let translated = (&elems[a] * &w0).bruhat_leq(&(&elems[b] * &w0));
                        t.check(leq[a][b] == translated, || {
                            format!(
                                "{}: translation criterion fails at ({:?}, {:?})",
                                tag(),
                                elems[a],
                                elems[b]
                            )
                        });
                    }
                }
                for a in 0..n {
                    for b in (0..n).filter(|&b| leq[a][b]) {
                        let ok = (0..n).all(|c| !leq[b][c] || leq[a][c]);
                        t.check(ok, || format!("{}: not transitive", tag()));
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || name.clone());
        }
    }
    t.finish("order-sanity", None, start)
}

/// Checks one interval `[v, w]` of `(W, <=^J)`: pure, thin, EL and sphere
/// homology of the open interval.
fn check_weyl_interval(
    ctx: &ParabolicContext,
    order: &ReflectionOrder,
    v: &WeylElement,
    w: &WeylElement,
) -> Result<bool> {
    let iv = ctx.interval(v, w)?;
    let p = iv.to_poset();
    if !p.check_pure().pure || !p.check_thin()?.thin {
        return Ok(false);
    }
    if !verify_el(
        &el_label_twisted_interval(&iv, order)?,
        ChainReading::BottomUp,
    )
    .ok
    {
        return Ok(false);
    }
    let gap = ctx.j_length(w) - ctx.j_length(v);
    let h = reduced_homology(&order_complex(&p, ComplexMode::OpenInterval)?)?;
    Ok(is_sphere_signature(&h, gap - 2))
}

/// Every interval with `l^J`-difference in `1..=max_shell_gap` of the finite
/// groups, and seeded intervals of the infinite rank-two groups, is pure,
/// thin, EL-labeled by `w2 w1^{-1}` and has an open-interval order complex
/// with the homology of a sphere of dimension `gap - 2`.
pub fn weyl_shellable(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for name in &cfg.weyl_types {
        let r = (|| -> Result<()> {
            let g = cfg.group(name)?;
            let elems = g.elements()?;
            let w0 = g
                .longest_element(&(0..g.rank()).collect::<Vec<_>>())
                .expect("finite type");
            let order = ReflectionOrder::from_word(&g, w0.canonical_word())?;
            for ctx in ParabolicContext::all_subsets(&g) {
                for (v, w) in all_pairs(&elems) {
                    let gap = ctx.j_length(w) - ctx.j_length(v);
                    if gap < 1 || gap > cfg.max_shell_gap || !ctx.j_leq(v, w)? {
                        continue;
                    }
                    t.check_result(check_weyl_interval(&ctx, &order, v, w), || {
                        format!("{name} J={:?} [{v:?}, {w:?}]", ctx.members())
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || name.clone());
        }
    }
    for name in &cfg.infinite_types {
        let mut rng = cfg.rng(&format!("shellable/{name}"));
        let r = (|| -> Result<()> {
            let g = cfg.group(name)?;
            let order = ReflectionOrder::root_functional(&g, &(0..g.rank()).collect::<Vec<_>>())?;
            let ball = g.enumerate_ball(Some(8), None)?;
            let contexts = ParabolicContext::all_subsets(&g);
            let mut done = 0;
            let mut attempts = 0;
            while done < cfg.infinite_intervals {
                attempts += 1;
                if attempts > 100 * cfg.infinite_intervals.max(1) {
                    return Err(Error::Postcondition(
                        "could not sample enough intervals".into(),
                    ));
                }
                let ctx = contexts.choose(&mut rng).expect("nonempty");
                let v = ball.choose(&mut rng).expect("nonempty");
                if v.length() > 4 {
                    continue;
                }
                let mut cands = Vec::new();
                for w in &ball {
                    let gap = ctx.j_length(w) - ctx.j_length(v);
                    if (1..=cfg.max_shell_gap).contains(&gap) && ctx.j_leq(v, w)? {
                        cands.push(w);
                    }
                }
                let Some(w) = cands.choose(&mut rng) else {
                    continue;
                };
                done += 1;
                t.check_result(check_weyl_interval(ctx, &order, v, w), || {
                    format!("{name} J={:?} [{v:?}, {w:?}]", ctx.members())
                });
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || name.clone());
        }
    }
    t.finish("weyl-shellable", Some(cfg.seed), start)
}

/// Random positive parameter vectors of length `d`; pairwise distinct when
/// `distinct` is set and `d >= 2` (with values `p/q`, `1 <= p, q <= 10`,
/// there are only 63 distinct values, so one-parameter vectors may repeat).
fn parameter_vectors(
    rng: &mut ChaCha8Rng,
    d: usize,
    count: usize,
    distinct: bool,
) -> Vec<Vec<Rational>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let v: Vec<Rational> = (0..d).map(|_| random_positive(rng)).collect();
        if seen.insert(v.clone()) || !distinct || d < 2 {
            out.push(v);
        }
    }
    out
}

/// Detects two distinct parameter vectors with the same image.
struct InjectivityCheck<K> {
    images: HashMap<K, Vec<Rational>>,
}

impl<K: Hash + Eq> InjectivityCheck<K> {
    fn new() -> Self {
        InjectivityCheck {
            images: HashMap::new(),
        }
    }

    /// False when `key` was already produced by different parameters.
    fn insert(&mut self, key: K, params: &[Rational]) -> bool {
        match self.images.get(&key) {
            Some(prev) => prev == params,
            None => {
                self.images.insert(key, params.to_vec());
                true
            }
        }
    }
}

/// A parabolic context, its comparable pairs within the gap, and its
/// incomparable pairs.
type CellTask = (ParabolicContext, Vec<Pair>, Vec<Pair>);

/// Pairs `(v, w)` of `SL_n`'s Weyl group with `v <=^J w` and gap at most
/// `max_gap`, for every `J`.
fn cell_tasks(g: &PinnedGroup, max_gap: i64) -> Result<Vec<CellTask>> {
    let elems = g.weyl().elements()?;
    let mut out = Vec::new();
    for ctx in ParabolicContext::all_subsets(g.weyl()) {
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for (v, w) in all_pairs(&elems) {
            if ctx.j_leq(v, w)? {
                if ctx.j_length(w) - ctx.j_length(v) <= max_gap {
                    inside.push((v.clone(), w.clone()));
                }
            } else {
                outside.push((v.clone(), w.clone()));
            }
        }
        out.push((ctx, inside, outside));
    }
    Ok(out)
}

/// Twisted cells of `SL_n`: the sampler succeeds exactly on comparable pairs,
/// uses `l^J(w) - l^J(v)` parameters, lands in the right stratum (also for a
/// second choice of reduced words), and is injective on distinct parameter
/// vectors.
pub fn twisted_parametrization(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &n in &cfg.sl_sizes {
        let r = (|| -> Result<()> {
            let g = PinnedGroup::new(n)?;
            for (ctx, inside, outside) in cell_tasks(&g, cfg.max_cell_gap)? {
                let jt = format!("SL{n} J={:?}", ctx.members());
                for (v, w) in &outside {
                    let r = g.sample_twisted_cell(v, w, &ctx, &[], ParamSign::Positive);
                    t.check(matches!(r, Err(Error::NotComparable)), || {
                        format!("{jt}: sampler accepts incomparable ({v:?}, {w:?})")
                    });
                }
                for (v, w) in &inside {
                    let tag = || format!("{jt} ({v:?}, {w:?})");
                    let mut rng = cfg.rng(&format!("twisted/{}", tag()));
                    let d = (ctx.j_length(w) - ctx.j_length(v)) as usize;
                    let count = if d >= 2 {
                        cfg.injectivity_vectors.max(cfg.samples)
                    } else {
                        cfg.samples
                    };
                    let vectors = parameter_vectors(&mut rng, d, count, true);
                    let mut keys = InjectivityCheck::new();
                    for params in &vectors {
                        let r = g
                            .sample_twisted_cell(v, w, &ctx, params, ParamSign::Positive)
                            .and_then(|s| {
                                let (sv, sw) = g.twisted_stratum(&s.matrix, &ctx)?;
                                let fresh = keys.insert(g.flag_key(&s.matrix, &ctx), params);
                                Ok(sv == *v && sw == *w && s.parameters.len() == d && fresh)
                            });
                        t.check_result(r, || format!("{}: sample {params:?}", tag()));
                    }
                    // A second choice of reduced words for `w^J` and `v_J`,
                    // when one exists.
                    let (w_rep, v_part) = (ctx.decompose(w).0, ctx.decompose(v).1);
                    let last = |x: &WeylElement| {
                        x.reduced_words(usize::MAX)
                            .pop()
                            .expect("every element has a reduced word")
                    };
                    let (alt_w, alt_v) = (last(&w_rep), last(&v_part));
                    if alt_w != *w_rep.canonical_word() || alt_v != *v_part.canonical_word() {
                        for params in vectors.iter().take(cfg.samples) {
                            let r = g
                                .sample_twisted_cell_with_words(
                                    v,
                                    w,
                                    &ctx,
                                    params,
                                    ParamSign::Positive,
                                    &alt_w,
                                    &alt_v,
                                )
                                .and_then(|s| {
                                    Ok(g.twisted_stratum(&s.matrix, &ctx)?
                                        == (v.clone(), w.clone()))
                                });
                            t.check_result(r, || {
                                format!(
                                    "{}: sample {params:?} on words {alt_w:?}, {alt_v:?}",
                                    tag()
                                )
                            });
                        }
                    }
                    let extra: Vec<Rational> = (0..=d).map(|_| Rational::one()).collect();
                    let r = g.sample_twisted_cell(v, w, &ctx, &extra, ParamSign::Positive);
                    t.check(matches!(r, Err(Error::ParameterCount { .. })), || {
                        format!("{}: accepts {} parameters", tag(), d + 1)
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("SL{n}"));
        }
    }
    t.finish("twisted-parametrization", Some(cfg.seed), start)
}

/// For every sample of a twisted cell `(v, w)` and every `v <=^J r <=^J w`:
/// the flag lies in the translated big cell of `r`, and `σ^J_r` splits its
/// chart into factors in the cells `(v, r)` and `(r, w)` that recompose to
/// the same flag.
pub fn inclusion_product(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &n in &cfg.sl_sizes {
        let r = (|| -> Result<()> {
            let g = PinnedGroup::new(n)?;
            for (ctx, inside, _) in cell_tasks(&g, cfg.max_cell_gap)? {
                for (v, w) in &inside {
                    let tag = || format!("SL{n} J={:?} ({v:?}, {w:?})", ctx.members());
                    let mut rng = cfg.rng(&format!("sigma/{}", tag()));
                    let d = (ctx.j_length(w) - ctx.j_length(v)) as usize;
                    let between = ctx.interval(v, w)?.elements;
                    for _ in 0..cfg.samples {
                        let params: Vec<Rational> =
                            (0..d).map(|_| random_positive(&mut rng)).collect();
                        let sample =
                            match g.sample_twisted_cell(v, w, &ctx, &params, ParamSign::Positive) {
                                Ok(s) => s,
                                Err(e) => {
                                    t.check_result(Err(e), || format!("{}: sampling", tag()));
                                    continue;
                                }
                            };
                        for r in &between {
                            let res = (|| -> Result<bool> {
                                if !g.big_cell_test(&sample.matrix, r, &ctx)? {
                                    return Ok(false);
                                }
                                let k = g.chart(&sample.matrix, r, &ctx)?;
                                let (g2, h2) = g.sigma_factorize(&k, r, &ctx)?;
                                let rd = g.lift(r);
                                let left = g.twisted_stratum(&(&g2 * &rd), &ctx)?;
                                let right = g.twisted_stratum(&(&h2 * &rd), &ctx)?;
                                let back = g.sigma_recompose(&g2, &h2)?;
                                Ok(left == (v.clone(), r.clone())
                                    && right == (r.clone(), w.clone())
                                    && g.same_flag(&(&back * &rd), &sample.matrix, &ctx)?)
                            })();
                            t.check_result(res, || format!("{}: r={r:?} params {params:?}", tag()));
                        }
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("SL{n}"));
        }
    }
    t.finish("inclusion-product", Some(cfg.seed), start)
}

/// `w ∘_l v` and the maximum of `{w'^{-1} u'}` agree with brute force.
pub fn demazure_oracles(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for name in &cfg.demazure_types {
        let r = (|| -> Result<()> {
            let g = cfg.group(name)?;
            let elems: Vec<WeylElement> = g.enumerate_ball(Some(4), None)?;
            let lower: Vec<Vec<WeylElement>> =
                elems.iter().map(WeylElement::lower_interval).collect();
            for (a, w) in elems.iter().enumerate() {
                for (b, v) in elems.iter().enumerate() {
                    let products: HashSet<WeylElement> = lower[a].iter().map(|x| x * v).collect();
                    let min = products
                        .iter()
                        .find(|m| products.iter().all(|x| m.bruhat_leq(x)));
                    t.check(min == Some(&demazure_min(w, v)), || {
                        format!("{name}: {w:?} o_l {v:?}")
                    });
                    let products: HashSet<WeylElement> = lower[a]
                        .iter()
                        .flat_map(|x| lower[b].iter().map(move |y| &x.inverse() * y))
                        .collect();
                    let max = products
                        .iter()
                        .find(|m| products.iter().all(|x| x.bruhat_leq(m)));
                    t.check(max == Some(&demazure_max_inverse(w, v)), || {
                        format!("{name}: max of w'^-1 u' for ({w:?}, {v:?})")
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || name.clone());
        }
    }
    t.finish("demazure-oracles", None, start)
}

/// `(w1 <= w2 and v1 >= v2)` iff `th(w1, v1) <=^I th(w2, v2)` in the
/// thickened group.
pub fn thickening_embedding(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &rank in &cfg.double_ranks {
        let r = (|| -> Result<()> {
            let tc = extend_cartan(&CartanMatrix::type_a(rank))?;
            let elems = tc.base().enumerate_ball(Some(3), None)?;
            let mut th = Vec::new();
            for w in &elems {
                for v in &elems {
                    th.push((w, v, tc.th(w, v)?));
                }
            }
            let ctx = tc.parabolic();
            for (w1, v1, x) in &th {
                for (w2, v2, y) in &th {
                    let expected = w1.bruhat_leq(w2) && v2.bruhat_leq(v1);
                    t.check_result(ctx.j_leq(x, y).map(|got| got == expected), || {
                        format!("A{rank}: th({w1:?},{v1:?}) vs th({w2:?},{v2:?})")
                    });
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("A{rank}"));
        }
    }
    t.finish("thickening-embedding", None, start)
}

/// Member triples `(w, v, u)` of the type-A group of rank `rank` with
/// dimension at most `max_dim`.
fn member_triples(group: &WeylGroup, max_dim: i64) -> Result<Vec<TripleIndex>> {
    let elems = group.elements()?;
    let mut out = Vec::new();
    for w in &elems {
        for v in &elems {
            for u in &elems {
                let t = TripleIndex::new(w.clone(), v.clone(), u.clone())?;
                if t.is_member() && t.dimension() <= max_dim {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

/// Every `[0̂, q]` of `Q̂` with `rank(q) - 1 <= max_q_rank` is pure, thin and
/// EL (labels read from the top); boundaries of link face posets have sphere
/// homology of dimension `l(w) + l(u) - 2`.
pub fn q_battery(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &rank in &cfg.double_ranks {
        let r = (|| -> Result<()> {
            let tc = extend_cartan(&CartanMatrix::type_a(rank))?;
            let order = tc.reflection_order()?;
            for q in member_triples(tc.base(), cfg.max_q_rank)? {
                let res = (|| -> Result<bool> {
                    let iv = q_interval_hat(&q)?;
                    if !iv.poset.check_pure().pure || !iv.poset.check_thin()?.thin {
                        return Ok(false);
                    }
                    Ok(verify_el(&q_el_label(&iv, &tc, &order)?, ChainReading::TopDown).ok)
                })();
                t.check_result(res, || format!("A{rank}: [0^, {}]", q.key()));
            }
            let elems = tc.base().elements()?;
            for (w, u) in all_pairs(&elems) {
                let len = w.length() + u.length();
                if len == 0 || len > cfg.max_link_length {
                    continue;
                }
                let res = link_boundary_complex(w, u)
                    .and_then(|c| reduced_homology(&c))
                    .map(|h| is_sphere_signature(&h, len as i64 - 2));
                t.check_result(res, || format!("A{rank}: link of ({w:?}, {u:?})"));
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("A{rank}"));
        }
    }
    t.finish("q-hat", None, start)
}

/// Seeded samples of `Z^u_{w,v,>0}` pass the three stratum checks, and
/// distinct parameters give distinct pairs.
pub fn z_battery(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &n in &cfg.z_sizes {
        let r = (|| -> Result<()> {
            let g = PinnedGroup::new(n)?;
            for q in member_triples(g.weyl(), cfg.max_z_dimension)? {
                let tag = || format!("SL{n} {}", q.key());
                let mut rng = cfg.rng(&format!("z/{}", tag()));
                let d = q.dimension() as usize;
                let mut keys = InjectivityCheck::new();
                for params in parameter_vectors(&mut rng, d, cfg.samples, false) {
                    let res = z_sample(&q, &params, &g, ParamSign::Positive)
                        .map(|s| keys.insert(z_sample_key(&s), &params));
                    t.check_result(res, || format!("{}: params {params:?}", tag()));
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("SL{n}"));
        }
    }
    t.finish("z-parametrization", Some(cfg.seed), start)
}

/// Marsh–Rietsch samples of both kinds land in their cells.
pub fn marsh_rietsch(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &n in &cfg.sl_sizes {
        let r = (|| -> Result<()> {
            let g = PinnedGroup::new(n)?;
            let elems = g.weyl().elements()?;
            for (v, w) in all_pairs(&elems).filter(|(v, w)| v.bruhat_leq(w)) {
                let tag = || format!("SL{n} ({v:?}, {w:?})");
                let mut rng = cfg.rng(&format!("mr/{}", tag()));
                let d = w.length() - v.length();
                for _ in 0..cfg.samples {
                    let params: Vec<Rational> = (0..d).map(|_| random_positive(&mut rng)).collect();
                    for kind in [MrKind::Negative, MrKind::Positive] {
                        let res = g
                            .sample_mr(kind, v, w.canonical_word(), &params, ParamSign::Positive)
                            .map(|_| true);
                        t.check_result(res, || format!("{}: {kind:?} {params:?}", tag()));
                    }
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("SL{n}"));
        }
    }
    t.finish("marsh-rietsch", Some(cfg.seed), start)
}

/// Products along a reduced word of `x_i(a)` (`upper`) or `y_i(a)`.
fn unipotent_product(
    g: &PinnedGroup,
    w: &WeylElement,
    params: &[Rational],
    upper: bool,
) -> Result<RatMatrix> {
    let mut m = RatMatrix::identity(g.size());
    for (&i, a) in w.canonical_word().letters().iter().zip(params) {
        let f = if upper { g.x(i, a)? } else { g.y(i, a)? };
        m = &m * &f;
    }
    Ok(m)
}

/// Random products of `x_i(a)`, `y_i(a)` and positive torus elements are
/// totally nonnegative; the Gauss factorization `L D U` with one negated
/// parameter in the reduced-word parametrization of `L` or `U` is not.
pub fn tnn_monoid(cfg: &SuiteConfig) -> CheckReport {
    let start = Instant::now();
    let mut t = Tally::default();
    for &n in &cfg.tnn_sizes {
        let mut rng = cfg.rng(&format!("tnn/{n}"));
        let r = (|| -> Result<()> {
            let g = PinnedGroup::new(n)?;
            let kinds = [GeneratorKind::X, GeneratorKind::Y, GeneratorKind::Cochar];
            for k in 0..cfg.tnn_products {
                let mut m = RatMatrix::identity(n);
                for _ in 0..rng.gen_range(1..=8) {
                    let kind = *kinds.choose(&mut rng).expect("nonempty");
                    let i = rng.gen_range(0..n - 1);
                    m = &m * &g.generator(kind, i, &random_positive(&mut rng))?;
                }
                t.check_result(tnn_test(&m), || format!("SL{n}: product #{k}"));
            }
            let elems: Vec<WeylElement> = g.weyl().elements()?;
            for k in 0..cfg.tnn_negatives {
                let u = elems.choose(&mut rng).expect("nonempty");
                let w = elems
                    .iter()
                    .filter(|w| !w.is_identity())
                    .collect::<Vec<_>>();
                let w = *w.choose(&mut rng).expect("n >= 2");
                let mut pu: Vec<Rational> =
                    (0..u.length()).map(|_| random_positive(&mut rng)).collect();
                let mut pw: Vec<Rational> =
                    (0..w.length()).map(|_| random_positive(&mut rng)).collect();
                let slot = rng.gen_range(0..pu.len() + pw.len());
                if slot < pu.len() {
                    pu[slot] = -&pu[slot];
                } else {
                    pw[slot - pu.len()] = -&pw[slot - pu.len()];
                }
                let mut d = RatMatrix::identity(n);
                for i in 0..n - 1 {
                    d = &d * &g.cochar(i, &random_positive(&mut rng))?;
                }
                let m = &(&unipotent_product(&g, u, &pu, false)? * &d)
                    * &unipotent_product(&g, w, &pw, true)?;
                t.check_result(tnn_test(&m).map(|ok| !ok), || {
                    format!("SL{n}: negative #{k}")
                });
            }
            Ok(())
        })();
        if let Err(e) = r {
            t.check_result(Err(e), || format!("SL{n}"));
        }
    }
    t.finish("tnn-monoid", Some(cfg.seed), start)
}

/// Runs the batteries of a suite, in a fixed order.
pub fn run_suite(kind: SuiteKind, cfg: &SuiteConfig) -> SuiteReport {
    type Battery = fn(&SuiteConfig) -> CheckReport;
    let flags: &[Battery] = &[marsh_rietsch, tnn_monoid];
    let twisted: &[Battery] = &[
        order_sanity,
        weyl_shellable,
        demazure_oracles,
        twisted_parametrization,
        inclusion_product,
    ];
    let double: &[Battery] = &[thickening_embedding, q_battery, z_battery];
    let batteries: Vec<Battery> = match kind {
        SuiteKind::Flags => flags.to_vec(),
        SuiteKind::Twisted => twisted.to_vec(),
        SuiteKind::Doubleflag => double.to_vec(),
        SuiteKind::All => flags.iter().chain(twisted).chain(double).copied().collect(),
    };
    SuiteReport::new(kind, cfg.seed, batteries.iter().map(|b| b(cfg)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suites_pass_and_are_reproducible() {
        let cfg = SuiteConfig::quick(5);
        for kind in [SuiteKind::Flags, SuiteKind::Doubleflag] {
            let a = run_suite(kind, &cfg).without_timing();
            for c in &a.checks {
                assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
                assert!(c.cases > 0, "{c:?}");
            }
            let b = run_suite(kind, &cfg).without_timing();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap()
            );
        }
    }

    #[test]
    fn tally_verdicts() {
        let mut t = Tally::default();
        t.check_result(
            Err(Error::BudgetExceeded {
                what: "element",
                limit: 1,
            }),
            || "x".into(),
        );
        assert_eq!(
            t.finish("t", None, Instant::now()).verdict,
            Verdict::Inconclusive
        );
        let mut t = Tally::default();
        t.check(false, || "boom".into());
        let r = t.finish("t", None, Instant::now());
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.detail.as_deref(), Some("boom"));
    }
}
