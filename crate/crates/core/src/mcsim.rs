//! Monte Carlo validation of the hierarchical covering step.
//!
//! One trial mirrors the level-descending construction the covering bound is
//! proved for: draw the single top-level sequence, then for each level `l`
//! from `K-1` down to `1` generate every level-`l` subcodebook conditionally
//! on the already-chosen higher-level sequences and scan the product index
//! space for a tuple that is jointly typical with them at slack `eps_l`. A
//! trial fails at the first level where no tuple passes. Estimating the
//! failure probability over many independent trials probes how much index
//! excess `r_S` the covering bounds really demand at finite blocklength.
//!
//! Typicality is robust (strong): every joint symbol tuple's empirical
//! frequency must lie within `eps * p(a)` of its probability. This is the
//! single typicality definition used across the workspace.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::{JointDistribution, Var};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::setfam::{aux_family_of, level_family};
use crate::subset::Subset;

/// Default cap on the per-level product index space of one search.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 24;

/// Configuration of one covering experiment.
#[derive(Debug, Clone)]
pub struct CoverTrialConfig {
    /// Blocklength in symbols.
    pub n: usize,
    /// Index excess `r_S` in bits/symbol per subset with `|S| <= K-1`;
    /// missing subsets default to zero (a single candidate sequence).
    pub rates: Vec<(Subset, f64)>,
    /// Typicality slack per level, `eps[l-1]` for level `l`; must be
    /// strictly decreasing in `l` and inside `(0, 1)`.
    pub eps: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Cap on the product index space per level.
    pub search_cap: u64,
}

impl CoverTrialConfig {
    pub fn new(
        n: usize,
        rates: Vec<(Subset, f64)>,
        eps: Vec<f64>,
        trials: usize,
        seed: u64,
    ) -> Self {
        CoverTrialConfig {
            n,
            rates,
            eps,
            trials,
            seed,
            search_cap: DEFAULT_SEARCH_CAP,
        }
    }

    pub fn validate(&self, k_total: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Validation(String::from("blocklength must be >= 1")));
        }
        if self.eps.len() != k_total {
            return Err(Error::Validation(format!(
                "eps schedule has {} entries, expected {k_total}",
                self.eps.len()
            )));
        }
        for (i, &e) in self.eps.iter().enumerate() {
            if !(0.0..1.0).contains(&e) || e == 0.0 {
                return Err(Error::Validation(format!(
                    "eps for level {} must lie in (0, 1), got {e}",
                    i + 1
                )));
            }
            if i > 0 && self.eps[i - 1] <= e {
                return Err(Error::Validation(String::from(
                    "eps schedule must be strictly decreasing with level",
                )));
            }
        }
        for (s, r) in &self.rates {
            if s.card() >= k_total {
                return Err(Error::Validation(format!(
                    "rate given for {s:?}, which has no index excess",
                )));
            }
            if !r.is_finite() || *r < 0.0 {
                return Err(Error::Validation(format!(
                    "rate for {s:?} must be finite and >= 0, got {r}"
                )));
            }
        }
        Ok(())
    }

    fn rate_of(&self, s: Subset) -> f64 {
        self.rates
            .iter()
            .find(|(t, _)| *t == s)
            .map_or(0.0, |(_, r)| *r)
    }

    /// Index count `ceil(2^(n * r_S))` for one subcodebook.
    pub fn index_count(&self, s: Subset) -> u64 {
        let raw = libm::exp2(self.n as f64 * self.rate_of(s));
        let c = libm::ceil(raw);
        if c < 1.0 {
            1
        } else {
            c as u64
        }
    }
}

/// Generated subcodebooks of one level.
#[derive(Debug, Clone)]
pub struct LevelCodebook {
    /// Per subset (canonical order): the list of length-`n` sequences.
    pub entries: Vec<(Subset, Vec<Vec<u8>>)>,
}

/// Outcome of one covering trial.
#[derive(Debug, Clone)]
pub struct CoverOutcome {
    pub success: bool,
    /// Chosen index per subset, levels `K-1` down to the last level reached.
    pub chosen: Vec<(Subset, usize)>,
    /// The selected sequences (top level included), as far as the search
    /// got; on success this tuple passes the level-1 typicality test.
    pub sequences: Vec<(Subset, Vec<u8>)>,
    /// Level at which the search failed (`K` means the top-level draw itself
    /// was atypical).
    pub failure_level: Option<usize>,
}

/// Reference robust-typicality test: every joint symbol tuple `a` must have
/// `|freq(a) - p(a)| <= eps * p(a)` under the marginal of `d` restricted to
/// the given variables.
pub fn typical(d: &JointDistribution, seqs: &[(Var, &[u8])], eps: f64) -> Result<bool> {
    if seqs.is_empty() {
        return Err(Error::Argument(String::from("no sequences given")));
    }
    let n = seqs[0].1.len();
    if n == 0 {
        return Err(Error::Argument(String::from("sequences must be nonempty")));
    }
    if seqs.iter().any(|(_, s)| s.len() != n) {
        return Err(Error::Argument(String::from("sequence lengths differ")));
    }
    // Order the variables as the marginal lays them out (by index in d).
    let mut order: Vec<usize> = (0..seqs.len()).collect();
    let idx: Vec<usize> = seqs
        .iter()
        .map(|(v, _)| d.var_index(*v))
        .collect::<Result<_>>()?;
    order.sort_by_key(|&i| idx[i]);
    let mut keep = crate::dist::VarSet::EMPTY;
    for &i in &idx {
        keep = keep.with(i);
    }
    let marg = d.marginal(keep);

    let mut strides = vec![0usize; seqs.len()];
    let mut size = 1usize;
    for &i in order.iter().rev() {
        strides[i] = size;
        size *= d.vars()[idx[i]].1;
    }
    debug_assert_eq!(size, marg.len());

    let mut counts = vec![0u32; marg.len()];
    for pos in 0..n {
        let mut cell = 0usize;
        for (i, (v, s)) in seqs.iter().enumerate() {
            let sym = s[pos] as usize;
            if sym >= d.vars()[idx[i]].1 {
                return Err(Error::Argument(format!(
                    "symbol {sym} out of alphabet for {v:?}"
                )));
            }
            cell += sym * strides[i];
        }
        counts[cell] += 1;
    }
    let nf = n as f64;
    Ok(counts
        .iter()
        .zip(&marg)
        .all(|(&c, &p)| (c as f64 / nf - p).abs() <= eps * p))
}

/// Conditional sampler for one subset: distribution of `U_S` given its
/// generation parents (all strict supersets of `S`).
struct CondTable {
    subset: Subset,
    alphabet: usize,
    /// Parent subsets in canonical order (marginal layout order).
    parents: Vec<Subset>,
    parent_strides: Vec<usize>,
    /// `cond[combo * alphabet + sym]`; rows of zero-mass combos hold zeros.
    cond: Vec<f64>,
    /// Parent-combo marginal, to detect zero-probability configurations.
    parent_mass: Vec<f64>,
}

impl CondTable {
    fn new(d: &JointDistribution, s: Subset) -> Result<CondTable> {
        let k = d.k_total();
        let alphabet = d.vars()[d.var_index(Var::Aux(s))?].1;
        let parents: Vec<Subset> = aux_family_of(s, k)?
            .iter()
            .copied()
            .filter(|m| *m != s)
            .collect();
        let mut keep = crate::dist::VarSet::EMPTY.with(d.var_index(Var::Aux(s))?);
        for p in &parents {
            keep = keep.with(d.var_index(Var::Aux(*p))?);
        }
        // In the marginal layout S is the slowest dimension: its variable
        // index precedes every strict superset's in canonical order.
        let joint = d.marginal(keep);
        let combos = joint.len() / alphabet;
        let mut parent_mass = vec![0.0f64; combos];
        for sym in 0..alphabet {
            for combo in 0..combos {
                parent_mass[combo] += joint[sym * combos + combo];
            }
        }
        let mut cond = vec![0.0f64; combos * alphabet];
        for combo in 0..combos {
            if parent_mass[combo] > 0.0 {
                for sym in 0..alphabet {
                    cond[combo * alphabet + sym] = joint[sym * combos + combo] / parent_mass[combo];
                }
            }
        }
        let mut parent_strides = vec![0usize; parents.len()];
        let mut size = 1usize;
        for (i, p) in parents.iter().enumerate().rev() {
            parent_strides[i] = size;
            size *= d.vars()[d.var_index(Var::Aux(*p))?].1;
        }
        Ok(CondTable {
            subset: s,
            alphabet,
            parents,
            parent_strides,
            cond,
            parent_mass,
        })
    }

    fn combo_at(&self, chosen: &[(Subset, Vec<u8>)], pos: usize) -> Result<usize> {
        let mut combo = 0usize;
        for (p, stride) in self.parents.iter().zip(&self.parent_strides) {
            let seq = chosen
                .iter()
                .find(|(s, _)| s == p)
                .map(|(_, seq)| seq)
                .ok_or_else(|| Error::Argument(format!("missing parent sequence for {p:?}")))?;
            combo += (seq[pos] as usize) * stride;
        }
        Ok(combo)
    }

    fn sample(&self, chosen: &[(Subset, Vec<u8>)], pos: usize, rng: &mut Rng) -> Result<u8> {
        let combo = self.combo_at(chosen, pos)?;
        if self.parent_mass[combo] <= 0.0 {
            return Err(Error::Generation(format!(
                "zero-probability parent configuration for {:?} at position {pos}",
                self.subset
            )));
        }
        let row = &self.cond[combo * self.alphabet..(combo + 1) * self.alphabet];
        Ok(rng.discrete(row) as u8)
    }
}

/// Generates the level-`l` subcodebooks: for each subset of cardinality `l`,
/// `counts` sequences of length `n`, symbol `i` drawn from the conditional
/// law of that auxiliary given the chosen higher-level sequences at `i`.
pub fn gen_level(
    d: &JointDistribution,
    l: usize,
    chosen: &[(Subset, Vec<u8>)],
    counts: &[(Subset, u64)],
    n: usize,
    rng: &mut Rng,
) -> Result<LevelCodebook> {
    let k = d.k_total();
    if l < 1 || l > k {
        return Err(Error::Argument(format!("level {l} out of range 1..={k}")));
    }
    let mut entries = Vec::new();
    for s in level_family(l, k)?.iter() {
        let table = CondTable::new(d, *s)?;
        let count = counts
            .iter()
            .find(|(t, _)| t == s)
            .map_or(1, |(_, c)| (*c).max(1));
        let mut seqs = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let mut seq = Vec::with_capacity(n);
            for pos in 0..n {
                seq.push(table.sample(chosen, pos, rng)?);
            }
            seqs.push(seq);
        }
        entries.push((*s, seqs));
    }
    Ok(LevelCodebook { entries })
}

/// Precomputed per-cell integer windows equivalent to the reference
/// typicality test for a fixed blocklength.
struct Windows {
    lo: Vec<u32>,
    hi: Vec<u32>,
    /// Number of cells with `lo > 0` (must be hit at least `lo` times).
    required: usize,
}

impl Windows {
    fn new(marg: &[f64], n: usize, eps: f64) -> Windows {
        let nf = n as f64;
        let mut lo = Vec::with_capacity(marg.len());
        let mut hi = Vec::with_capacity(marg.len());
        let mut required = 0usize;
        for &p in marg {
            // Exact integer window of the reference test |c/n - p| <= eps*p.
            let mut l = n as u32 + 1;
            let mut h = 0u32;
            let from = libm::floor(nf * p * (1.0 - eps)).max(0.0) as u32;
            let to = (libm::ceil(nf * p * (1.0 + eps)) as u32).min(n as u32);
            for c in from..=to {
                if (c as f64 / nf - p).abs() <= eps * p {
                    if c < l {
                        l = c;
                    }
                    if c > h {
                        h = c;
                    }
                }
            }
            if l > h {
                // No admissible count: encode as an impossible window.
                lo.push(n as u32 + 1);
                hi.push(0);
                required += 1;
            } else {
                if l > 0 {
                    required += 1;
                }
                lo.push(l);
                hi.push(h);
            }
        }
        Windows { lo, hi, required }
    }
}

struct LevelSearch {
    /// Subsets of this level in canonical order with their index counts.
    subsets: Vec<(Subset, u64)>,
    /// Stride of each level subset in the test-marginal cell index.
    strides: Vec<usize>,
    /// Per-position base cell index contributed by the chosen sequences.
    base: Vec<usize>,
    windows: Windows,
    cells: usize,
}

impl LevelSearch {
    /// Scans the product index space in odometer order (last subset fastest)
    /// and returns the first typical tuple.
    fn run(&self, books: &LevelCodebook, n: usize) -> Option<Vec<usize>> {
        let m = self.subsets.len();
        let mut idx = vec![0usize; m];
        let mut counts = vec![0u32; self.cells];
        loop {
            // Evaluate this candidate tuple: build the per-cell counts and
            // track how many required cells are still under their window.
            counts.iter_mut().for_each(|c| *c = 0);
            let mut missing = self.windows.required;
            let mut overflow = false;
            for pos in 0..n {
                let mut cell = self.base[pos];
                for (j, (_, seqs)) in books.entries.iter().enumerate() {
                    cell += (seqs[idx[j]][pos] as usize) * self.strides[j];
                }
                let c = &mut counts[cell];
                *c += 1;
                if *c == self.windows.lo[cell] {
                    missing -= 1;
                } else if *c == self.windows.hi[cell] + 1 {
                    overflow = true;
                    break;
                }
            }
            if !overflow && missing == 0 {
                return Some(idx);
            }
            // Odometer step.
            let mut j = m;
            loop {
                if j == 0 {
                    return None;
                }
                j -= 1;
                idx[j] += 1;
                if (idx[j] as u64) < self.subsets[j].1 {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
}

/// Runs one covering trial: draw the top-level sequence, then per level
/// generate subcodebooks and search for a jointly typical index tuple.
pub fn cover_search(
    d: &JointDistribution,
    cfg: &CoverTrialConfig,
    rng: &mut Rng,
) -> Result<CoverOutcome> {
    let k = d.k_total();
    cfg.validate(k)?;
    let n = cfg.n;
    let full = Subset::full(k)?;

    // Top level: a single sequence drawn i.i.d. from the marginal.
    let full_marg = d.marginal(crate::dist::VarSet::EMPTY.with(d.var_index(Var::Aux(full))?));
    let top: Vec<u8> = (0..n).map(|_| rng.discrete(&full_marg) as u8).collect();
    let mut chosen: Vec<(Subset, Vec<u8>)> = vec![(full, top)];
    let mut chosen_idx: Vec<(Subset, usize)> = Vec::new();

    if !typical(d, &[(Var::Aux(full), &chosen[0].1)], cfg.eps[k - 1])? {
        return Ok(CoverOutcome {
            success: false,
            chosen: chosen_idx,
            sequences: chosen,
            failure_level: Some(k),
        });
    }

    for l in (1..k).rev() {
        let level = level_family(l, k)?;
        let counts: Vec<(Subset, u64)> = level.iter().map(|s| (*s, cfg.index_count(*s))).collect();
        let mut space: u64 = 1;
        for (_, c) in &counts {
            space = space.saturating_mul(*c);
            if space > cfg.search_cap {
                return Err(Error::Capacity(format!(
                    "level {l} index space exceeds cap {}",
                    cfg.search_cap
                )));
            }
        }
        let books = gen_level(d, l, &chosen, &counts, n, rng)?;

        // Test variables: this level plus everything above, in canonical
        // (marginal layout) order.
        let mut test_subsets: Vec<Subset> = level.iter().copied().collect();
        for (s, _) in &chosen {
            test_subsets.push(*s);
        }
        test_subsets.sort_by(|a, b| a.canonical_cmp(*b));
        let mut keep = crate::dist::VarSet::EMPTY;
        for s in &test_subsets {
            keep = keep.with(d.var_index(Var::Aux(*s))?);
        }
        let marg = d.marginal(keep);
        let mut stride_of = Vec::with_capacity(test_subsets.len());
        let mut size = 1usize;
        for s in test_subsets.iter().rev() {
            stride_of.push((*s, size));
            size *= d.vars()[d.var_index(Var::Aux(*s))?].1;
        }
        let stride = |s: Subset| -> usize { stride_of.iter().find(|(t, _)| *t == s).unwrap().1 };
        let mut base = vec![0usize; n];
        for (s, seq) in &chosen {
            let st = stride(*s);
            for pos in 0..n {
                base[pos] += (seq[pos] as usize) * st;
            }
        }
        let search = LevelSearch {
            strides: books.entries.iter().map(|(s, _)| stride(*s)).collect(),
            subsets: counts.clone(),
            base,
            windows: Windows::new(&marg, n, cfg.eps[l - 1]),
            cells: marg.len(),
        };

        match search.run(&books, n) {
            Some(idx) => {
                for (j, (s, seqs)) in books.entries.into_iter().enumerate() {
                    chosen_idx.push((s, idx[j]));
                    chosen.push((s, seqs.into_iter().nth(idx[j]).unwrap()));
                }
            }
            None => {
                return Ok(CoverOutcome {
                    success: false,
                    chosen: chosen_idx,
                    sequences: chosen,
                    failure_level: Some(l),
                });
            }
        }
    }

    Ok(CoverOutcome {
        success: true,
        chosen: chosen_idx,
        sequences: chosen,
        failure_level: None,
    })
}

/// Failure-probability estimate with an exact binomial 95% interval.
#[derive(Debug, Clone)]
pub struct CoverEstimate {
    pub trials: usize,
    pub failures: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Failure counts by level (index `l - 1`).
    pub failures_by_level: Vec<usize>,
}

/// Runs `cfg.trials` independent trials, trial `t` using a generator seeded
/// with `seed XOR t`, and returns the failure fraction with its
/// Clopper-Pearson 95% interval.
pub fn estimate_cover_failure(
    d: &JointDistribution,
    cfg: &CoverTrialConfig,
) -> Result<CoverEstimate> {
    let k = d.k_total();
    cfg.validate(k)?;
    if cfg.trials == 0 {
        return Err(Error::Validation(String::from("trials must be >= 1")));
    }
    let mut failures = 0usize;
    let mut by_level = vec![0usize; k];
    for t in 0..cfg.trials {
        let mut rng = Rng::new(cfg.seed ^ t as u64);
        let out = cover_search(d, cfg, &mut rng)?;
        if !out.success {
            failures += 1;
            if let Some(l) = out.failure_level {
                by_level[l - 1] += 1;
            }
        }
    }
    let n = cfg.trials;
    let estimate = failures as f64 / n as f64;
    Ok(CoverEstimate {
        trials: n,
        failures,
        estimate,
        ci_low: clopper_pearson_low(failures, n, 0.05),
        ci_high: clopper_pearson_high(failures, n, 0.05),
        failures_by_level: by_level,
    })
}

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7.
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // Reflection.
        let pi = core::f64::consts::PI;
        return libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEFFS[0];
    let t = x + 7.5;
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * libm::log(2.0 * core::f64::consts::PI) + (x + 0.5) * libm::log(t) - t + libm::log(a)
}

/// Regularized incomplete beta `I_x(a, b)` via the Lentz continued fraction.
fn betainc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * libm::log(x) + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    let symmetric = x >= (a + 1.0) / (a + b + 2.0);
    let (a, b, x, front) = if symmetric {
        (b, a, 1.0 - x, front)
    } else {
        (a, b, x, front)
    };
    // Continued fraction for I_x(a,b) * (a B(a,b)) / x^a (1-x)^b.
    let tiny = 1e-300;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < tiny {
        d = tiny;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..200 {
        let m = m as f64;
        let num1 = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 + num1 * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + num1 / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        let num2 = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num2 * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = 1.0 + num2 / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-14 {
            break;
        }
    }
    let result = front * h / a;
    if symmetric {
        1.0 - result
    } else {
        result
    }
}

/// Quantile of the Beta(a, b) distribution by bisection.
fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if betainc(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lower Clopper-Pearson bound for `x` successes in `n` trials.
pub fn clopper_pearson_low(x: usize, n: usize, alpha: f64) -> f64 {
    if x == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, x as f64, (n - x) as f64 + 1.0)
    }
}

/// Upper Clopper-Pearson bound for `x` successes in `n` trials.
pub fn clopper_pearson_high(x: usize, n: usize, alpha: f64) -> f64 {
    if x == n {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, x as f64 + 1.0, (n - x) as f64)
    }
}
