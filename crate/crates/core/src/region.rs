//! Polytope analysis of generated rate systems.
//!
//! Support functions and membership run directly on a [`RegionSystem`]. The
//! split-rate projection solves the pre-elimination system — covering lower
//! bounds on the excesses `r_S` plus packing upper bounds on the oversized
//! rates `R~_S`, tied to per-receiver rates through `R~_S = sum_{k in S}
//! R_{k,S} + r_S` and `R_k = sum_{S : k in S} R_{k,S}` — and maximizing a
//! weighted rate sum over it projects the polytope one direction at a time.
//! Comparing that value against the closed-form support function is the
//! numerical check that the variable elimination behind the closed form is
//! lossless.
//!
//! `optimize_pmf` searches the free input pmf by random-restart coordinate
//! ascent; it returns the best support value found, a lower bound with no
//! global-optimality claim (the region is not convex in the pmf).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::{
    closed_form_system, covering_system, packing_system, RateVar, RegionSystem, Sense as IneqSense,
};
use crate::dist::{JointDistribution, ModelSpec};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::simplex::{maximize, LpOutcome, LpRow, LpStatus, Sense};
use crate::subset::Subset;

/// Tolerance for membership tests.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

fn lp_rows(sys: &RegionSystem) -> Result<Vec<LpRow>> {
    let n = sys.variables.len();
    let mut rows = Vec::with_capacity(sys.inequalities.len());
    for ineq in &sys.inequalities {
        let mut coeffs = vec![0.0; n];
        for (v, c) in &ineq.coeffs {
            let pos = sys
                .var_position(v)
                .ok_or_else(|| Error::Argument(format!("undeclared variable {v:?}")))?;
            coeffs[pos] += c;
        }
        rows.push(LpRow {
            coeffs,
            sense: match ineq.sense {
                IneqSense::Le => Sense::Le,
                IneqSense::Ge => Sense::Ge,
            },
            rhs: ineq.bound,
        });
    }
    // Canonical row order: by coefficient pattern, then bound. Makes the
    // solve independent of the order constraints were generated in.
    rows.sort_by(|a, b| {
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            if x != y {
                return x.partial_cmp(y).unwrap();
            }
        }
        a.rhs.partial_cmp(&b.rhs).unwrap()
    });
    Ok(rows)
}

/// Maximizes `w . R` over the system (plus `R >= 0`). The weight vector is
/// indexed by the system's variable order.
pub fn support(sys: &RegionSystem, w: &[f64]) -> Result<LpOutcome> {
    if w.len() != sys.variables.len() {
        return Err(Error::Argument(format!(
            "weight vector has {} entries, system has {} variables",
            w.len(),
            sys.variables.len()
        )));
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Argument(String::from("weights must be finite")));
    }
    maximize(w, &lp_rows(sys)?)
}

/// True when `point` satisfies every inequality and nonnegativity within
/// tolerance.
pub fn membership(sys: &RegionSystem, point: &[f64]) -> Result<bool> {
    if point.len() != sys.variables.len() {
        return Err(Error::Argument(format!(
            "point has {} entries, system has {} variables",
            point.len(),
            sys.variables.len()
        )));
    }
    if point.iter().any(|x| *x < -MEMBERSHIP_TOLERANCE) {
        return Ok(false);
    }
    for ineq in &sys.inequalities {
        let mut lhs = 0.0;
        for (v, c) in &ineq.coeffs {
            let pos = sys
                .var_position(v)
                .ok_or_else(|| Error::Argument(format!("undeclared variable {v:?}")))?;
            lhs += c * point[pos];
        }
        let ok = match ineq.sense {
            IneqSense::Le => lhs <= ineq.bound + MEMBERSHIP_TOLERANCE,
            IneqSense::Ge => lhs >= ineq.bound - MEMBERSHIP_TOLERANCE,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The split-rate system of a distribution: variables, LP rows, and the
/// per-receiver objective embedding.
pub struct SplitSystem {
    pub variables: Vec<RateVar>,
    pub rows: Vec<LpRow>,
    k_total: usize,
}

impl SplitSystem {
    pub fn new(d: &JointDistribution) -> Result<Self> {
        let k = d.k_total();
        let subsets = crate::subset::all_subsets(k);
        let full = Subset::full(k)?;

        // Variable order: per subset in canonical order, its split rates by
        // receiver, then all covering excesses (none for the full set, whose
        // top-level codebook carries no extra index).
        let mut variables = Vec::new();
        for s in &subsets {
            for r in s.elems() {
                variables.push(RateVar::SplitRate(r, *s));
            }
        }
        for s in &subsets {
            if *s != full {
                variables.push(RateVar::CoverExcess(*s));
            }
        }
        let pos_of = |v: &RateVar| -> usize {
            variables
                .iter()
                .position(|w| w == v)
                .expect("split variable enumerated above")
        };

        let mut rows = Vec::new();
        for ineq in covering_system(d)? {
            let mut coeffs = vec![0.0; variables.len()];
            for (v, c) in &ineq.coeffs {
                coeffs[pos_of(v)] += c;
            }
            rows.push(LpRow {
                coeffs,
                sense: Sense::Ge,
                rhs: ineq.bound,
            });
        }
        for ineq in packing_system(d)? {
            let mut coeffs = vec![0.0; variables.len()];
            for (v, _) in &ineq.coeffs {
                let RateVar::TildeSum(s) = v else {
                    return Err(Error::Internal(String::from(
                        "packing system emitted a non-tilde variable",
                    )));
                };
                // R~_S expands to the split rates of S plus its excess.
                for r in s.elems() {
                    coeffs[pos_of(&RateVar::SplitRate(r, *s))] += 1.0;
                }
                if *s != full {
                    coeffs[pos_of(&RateVar::CoverExcess(*s))] += 1.0;
                }
            }
            rows.push(LpRow {
                coeffs,
                sense: Sense::Le,
                rhs: ineq.bound,
            });
        }
        Ok(SplitSystem {
            variables,
            rows,
            k_total: k,
        })
    }

    /// Objective coefficients realizing `sum_k w_k R_k` over the split
    /// variables.
    pub fn objective(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.k_total {
            return Err(Error::Argument(format!(
                "weight vector has {} entries, expected {}",
                w.len(),
                self.k_total
            )));
        }
        let mut obj = vec![0.0; self.variables.len()];
        for (i, v) in self.variables.iter().enumerate() {
            if let RateVar::SplitRate(r, _) = v {
                obj[i] = w[*r as usize - 1];
            }
        }
        Ok(obj)
    }
}

/// Maximizes `w . R` over the pre-elimination split-rate system.
///
/// An infeasible outcome means the covering demands of this pmf exceed what
/// the packing budgets admit even at zero message rates; it is surfaced in
/// the result status rather than hidden.
pub fn projected_support(d: &JointDistribution, w: &[f64]) -> Result<LpOutcome> {
    let sys = SplitSystem::new(d)?;
    let obj = sys.objective(w)?;
    maximize(&obj, &sys.rows)
}

/// One sampled direction of a region comparison.
#[derive(Debug, Clone)]
pub struct DirectionGap {
    pub direction: Vec<f64>,
    pub value_a: f64,
    pub value_b: f64,
    /// `value_a - value_b`.
    pub gap: f64,
}

/// Support-function comparison of two systems over random nonnegative unit
/// directions.
#[derive(Debug, Clone)]
pub struct CompareReport {
    pub seed: u64,
    pub entries: Vec<DirectionGap>,
    pub min_gap: f64,
    pub max_gap: f64,
    pub mean_gap: f64,
    /// True when every gap is `>= -1e-8`, i.e. `b` fits inside `a`.
    pub contains: bool,
}

/// Compares `support(a)` against `support(b)` in `dirs` seeded random
/// directions (absolute Gaussian coordinates, L2-normalized).
pub fn compare_regions(
    a: &RegionSystem,
    b: &RegionSystem,
    dirs: usize,
    seed: u64,
) -> Result<CompareReport> {
    if a.variables.len() != b.variables.len() {
        return Err(Error::Argument(String::from(
            "systems have different dimensions",
        )));
    }
    let mut rng = Rng::new(seed);
    let mut entries = Vec::with_capacity(dirs);
    let (mut min_gap, mut max_gap, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for _ in 0..dirs {
        let w = rng.nonneg_direction(a.variables.len());
        let va = support(a, &w)?;
        let vb = support(b, &w)?;
        if va.status != LpStatus::Optimal || vb.status != LpStatus::Optimal {
            return Err(Error::Internal(format!(
                "support solve not optimal: {:?} / {:?}",
                va.status, vb.status
            )));
        }
        let gap = va.value - vb.value;
        min_gap = min_gap.min(gap);
        max_gap = max_gap.max(gap);
        sum += gap;
        entries.push(DirectionGap {
            direction: w,
            value_a: va.value,
            value_b: vb.value,
            gap,
        });
    }
    let mean_gap = if entries.is_empty() {
        0.0
    } else {
        sum / entries.len() as f64
    };
    Ok(CompareReport {
        seed,
        contains: entries.iter().all(|e| e.gap >= -1e-8),
        entries,
        min_gap: if dirs == 0 { 0.0 } else { min_gap },
        max_gap: if dirs == 0 { 0.0 } else { max_gap },
        mean_gap,
    })
}

/// Result of a pmf search.
#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub best_pmf: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
}

/// Support value of the closed-form system of `spec` in direction `w`.
fn eval_support(spec: &ModelSpec, w: &[f64]) -> Result<f64> {
    let d = spec.build_joint()?;
    let sys = closed_form_system(&d)?;
    let out = support(&sys, w)?;
    if out.status != LpStatus::Optimal {
        return Err(Error::Internal(format!(
            "closed-form support not optimal: {:?}",
            out.status
        )));
    }
    Ok(out.value)
}

/// Consecutive rejected proposals before the search restarts from a random
/// simplex point.
const RESTART_AFTER: usize = 240;

/// Random-restart coordinate ascent over the auxiliary pmf simplex.
///
/// One evaluation builds the joint for a candidate pmf and solves the
/// closed-form support LP in direction `w`; a proposal perturbs a single pmf
/// cell and renormalizes, and is kept only if the value improves. The best
/// pmf across all restarts is returned. Deterministic given the seed, and
/// the result value is non-decreasing in `budget` for a fixed seed.
pub fn optimize_pmf(
    template: &ModelSpec,
    w: &[f64],
    budget: usize,
    seed: u64,
) -> Result<OptimizeResult> {
    if budget == 0 {
        return Err(Error::Argument(String::from("budget must be >= 1")));
    }
    template.validate()?;
    let cells = template.aux_space();
    let mut rng = Rng::new(seed);

    let normalize = |pmf: &mut Vec<f64>| {
        let total: f64 = pmf.iter().sum();
        if total > 0.0 {
            for p in pmf.iter_mut() {
                *p /= total;
            }
        } else {
            *pmf = vec![1.0 / cells as f64; cells];
        }
    };

    let mut spec = template.clone();
    normalize(&mut spec.aux_pmf);

    let mut current = spec.aux_pmf.clone();
    let mut current_val = eval_support(&spec, w)?;
    let mut used = 1usize;
    let mut best = current.clone();
    let mut best_val = current_val;
    let mut step = 0.25f64;
    let mut rejected = 0usize;

    while used < budget {
        if rejected >= RESTART_AFTER {
            current = rng.simplex_point(cells);
            spec.aux_pmf = current.clone();
            current_val = eval_support(&spec, w)?;
            used += 1;
            rejected = 0;
            step = 0.25;
            if current_val > best_val {
                best_val = current_val;
                best = current.clone();
            }
            continue;
        }
        let idx = rng.below(cells);
        let delta = step * (2.0 * rng.f64() - 1.0);
        let mut cand = current.clone();
        cand[idx] = (cand[idx] + delta).max(0.0);
        normalize(&mut cand);
        spec.aux_pmf = cand.clone();
        let val = eval_support(&spec, w)?;
        used += 1;
        if val > current_val + 1e-12 {
            current = cand;
            current_val = val;
            rejected = 0;
            if val > best_val {
                best_val = val;
                best = current.clone();
            }
        } else {
            rejected += 1;
            if rejected % 60 == 0 {
                step *= 0.5;
                if step < 1e-3 {
                    step = 0.25;
                }
            }
        }
    }

    Ok(OptimizeResult {
        best_pmf: best,
        best_value: best_val,
        evaluations: used,
    })
}
