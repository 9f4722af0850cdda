//! Rate-constraint generators.
//!
//! Four families of numeric constraints fall out of the coding scheme:
//!
//! * covering lower bounds — per level `l` and per subfamily `J` of the
//!   level-`l` subsets, the total index excess `sum r_S` must pay for the
//!   dependence the scheme imposes among the level-`l` codewords;
//! * packing upper bounds — per receiver `i` and per support family, the
//!   total oversized subcodebook rates `sum R~_S` a receiver can tell apart
//!   through its channel output;
//! * the closed-form per-receiver system — one inequality on `sum_{k in T}
//!   R_k` for every nonempty receiver set `T` and every ordering of it,
//!   assembled from per-block packing terms minus per-level covering terms;
//! * the explicit three-receiver system — the nine folded inequalities with
//!   min terms over symmetric receiver pairs.
//!
//! Vanishing-slack terms are dropped (the region is a closure), strict
//! inequalities become non-strict, and negative closed-form bounds clamp to
//! zero (the all-zero rate tuple is always achievable); clamps are recorded
//! on the returned system.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::{JointDistribution, Var, VarSet};
use crate::error::{Error, Result};
use crate::setfam::{
    aux_family_of, decomp_block, level_family, packing_support, upper_level_family,
};
use crate::subset::{all_subsets, orderings, ReceiverOrder, Subset, SubsetFamily};

/// One rate variable of a generated system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RateVar {
    /// The private message rate `R_k` of receiver `k`.
    PerReceiver(u8),
    /// The split rate `R_{k,S}` of receiver `k`'s submessage for subset `S`
    /// (requires `k` in `S`).
    SplitRate(u8, Subset),
    /// The oversized subcodebook rate `R~_S` (message rates plus excess).
    TildeSum(Subset),
    /// The covering excess `r_S = R~_S - sum_k R_{k,S}`.
    CoverExcess(Subset),
}

impl RateVar {
    pub fn format(&self, k_total: usize) -> String {
        match self {
            RateVar::PerReceiver(k) => format!("R{k}"),
            RateVar::SplitRate(k, s) => format!("R{k},{}", s.format(k_total)),
            RateVar::TildeSum(s) => format!("Rt{}", s.format(k_total)),
            RateVar::CoverExcess(s) => format!("r{}", s.format(k_total)),
        }
    }
}

/// Where an inequality came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Closed-form bound for receiver set `t` under ordering `pi`.
    ClosedForm { t: Subset, pi: ReceiverOrder },
    /// Covering lower bound at `level` for subfamily `family`.
    Covering { level: usize, family: SubsetFamily },
    /// Packing upper bound of `receiver` over `support`.
    Packing { receiver: u8, support: SubsetFamily },
    /// One of the nine explicit three-receiver bounds, named by structure:
    /// `single_k`, `pair_ij`, or `sum_ij` (`ij` names the min-folded pair).
    ThreeReceiver { label: &'static str },
}

impl Provenance {
    pub fn format(&self, k_total: usize) -> String {
        match self {
            Provenance::ClosedForm { t, pi } => {
                format!("closed:t={}:pi={}", t.format(k_total), pi.format())
            }
            Provenance::Covering { level, family } => {
                format!("cover:l={level}:j={}", family.format(k_total))
            }
            Provenance::Packing { receiver, support } => {
                format!("pack:i={receiver}:s={}", support.format(k_total))
            }
            Provenance::ThreeReceiver { label } => format!("three:{label}"),
        }
    }
}

/// Direction of one inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `sum <= bound`.
    Le,
    /// `sum >= bound`.
    Ge,
}

/// One linear rate constraint; all generated coefficients are 1.
#[derive(Debug, Clone)]
pub struct RateInequality {
    pub coeffs: Vec<(RateVar, f64)>,
    pub sense: Sense,
    pub bound: f64,
    pub provenance: Provenance,
}

impl RateInequality {
    fn sum_le(vars: Vec<RateVar>, bound: f64, provenance: Provenance) -> Self {
        RateInequality {
            coeffs: vars.into_iter().map(|v| (v, 1.0)).collect(),
            sense: Sense::Le,
            bound,
            provenance,
        }
    }

    fn sum_ge(vars: Vec<RateVar>, bound: f64, provenance: Provenance) -> Self {
        RateInequality {
            coeffs: vars.into_iter().map(|v| (v, 1.0)).collect(),
            sense: Sense::Ge,
            bound,
            provenance,
        }
    }
}

/// A polytope in rate space: the listed inequalities plus `x >= 0` on every
/// declared variable.
#[derive(Debug, Clone)]
pub struct RegionSystem {
    pub k_total: usize,
    pub variables: Vec<RateVar>,
    pub inequalities: Vec<RateInequality>,
    /// Bounds that were negative before clamping to zero, with the raw value.
    pub clamped: Vec<(Provenance, f64)>,
}

impl RegionSystem {
    pub fn var_position(&self, v: &RateVar) -> Option<usize> {
        self.variables.iter().position(|w| w == v)
    }
}

/// Enumerates the nonempty subfamilies of `family` (by inclusion mask, so
/// `2^|family| - 1` of them), each in canonical order.
fn subfamilies(family: &SubsetFamily) -> Vec<SubsetFamily> {
    let members = family.members();
    let mut out = Vec::with_capacity((1usize << members.len()) - 1);
    for mask in 1u32..(1u32 << members.len()) {
        let picked: Vec<Subset> = members
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();
        out.push(SubsetFamily::from_vec(picked));
    }
    out
}

/// Conditioning set for one auxiliary: the variables of all strict supersets
/// of `s` (the codeword generation parents of `U_s`).
fn parents_of(d: &JointDistribution, s: Subset) -> Result<VarSet> {
    let k = d.k_total();
    let family = aux_family_of(s, k)?;
    let mut set = VarSet::EMPTY;
    for m in family.iter() {
        if *m != s {
            set = set.with(d.var_index(Var::Aux(*m))?);
        }
    }
    Ok(set)
}

/// Per-subset terms `H(U_S | U(parents of S))`, canonical order. These terms
/// recur in every covering, packing, and closed-form bound, so the system
/// generators compute them once up front.
struct CondEntropies {
    subsets: Vec<Subset>,
    values: Vec<f64>,
}

impl CondEntropies {
    fn new(d: &JointDistribution) -> Result<CondEntropies> {
        let subsets = all_subsets(d.k_total());
        let mut values = Vec::with_capacity(subsets.len());
        for s in &subsets {
            let a = VarSet::EMPTY.with(d.var_index(Var::Aux(*s))?);
            values.push(d.entropy(a, parents_of(d, *s)?)?);
        }
        Ok(CondEntropies { subsets, values })
    }

    fn sum_over(&self, family: &SubsetFamily) -> f64 {
        family
            .iter()
            .map(|s| {
                let pos = self
                    .subsets
                    .iter()
                    .position(|t| t == s)
                    .expect("subset within receiver range");
                self.values[pos]
            })
            .sum()
    }
}

fn covering_rhs_cached(
    d: &JointDistribution,
    l: usize,
    j: &SubsetFamily,
    cond: &CondEntropies,
) -> Result<f64> {
    let k = d.k_total();
    if l < 1 || l >= k {
        return Err(Error::Argument(format!(
            "covering level {l} out of range 1..{k}"
        )));
    }
    if j.is_empty() {
        return Err(Error::Argument(String::from("covering family is empty")));
    }
    if j.iter().any(|s| s.card() != l) {
        return Err(Error::Argument(format!(
            "covering family {j:?} mixes cardinalities (expected {l})"
        )));
    }
    let above = d.aux_set(&upper_level_family(l, k)?)?;
    let joint_h = d.entropy(d.aux_set(j)?, above)?;
    Ok(cond.sum_over(j) - joint_h)
}

/// Covering lower bound for a level-`l` subfamily `j`:
/// `sum_{S in j} H(U_S | U(parents)) - H(U(j) | U(levels above l))`,
/// with the vanishing slack dropped.
pub fn covering_rhs(d: &JointDistribution, l: usize, j: &SubsetFamily) -> Result<f64> {
    covering_rhs_cached(d, l, j, &CondEntropies::new(d)?)
}

/// Every covering inequality: one `sum_{S in J} r_S >= covering_rhs(l, J)`
/// per nonempty `J` within each level `l in 1..K`.
pub fn covering_system(d: &JointDistribution) -> Result<Vec<RateInequality>> {
    let k = d.k_total();
    let cond = CondEntropies::new(d)?;
    let mut out = Vec::new();
    for l in 1..k {
        let level = level_family(l, k)?;
        for j in subfamilies(&level) {
            let rhs = covering_rhs_cached(d, l, &j, &cond)?;
            let vars: Vec<RateVar> = j.iter().map(|s| RateVar::CoverExcess(*s)).collect();
            out.push(RateInequality::sum_ge(
                vars,
                rhs,
                Provenance::Covering {
                    level: l,
                    family: j,
                },
            ));
        }
    }
    Ok(out)
}

/// Packing upper bound of receiver `i` over the support generated by `j`:
/// with `S* = packing_support(i, j)`,
/// `sum_{S in S*} H(U_S | U(parents)) - H(U(S*) | Y_i, U(A(i) \ S*))`.
pub fn packing_rhs(d: &JointDistribution, i: u8, j: &SubsetFamily) -> Result<f64> {
    if j.is_empty() {
        return Err(Error::Argument(String::from("packing family is empty")));
    }
    let support = packing_support(i, j)?;
    packing_rhs_of_support(d, i, &support, &CondEntropies::new(d)?)
}

fn packing_rhs_of_support(
    d: &JointDistribution,
    i: u8,
    support: &SubsetFamily,
    cond_h: &CondEntropies,
) -> Result<f64> {
    let k = d.k_total();
    let a_i = aux_family_of(Subset::singleton(i)?, k)?;
    let cond = d.output_set(i)?.union(d.aux_set(&a_i.minus(support))?);
    let joint_h = d.entropy(d.aux_set(support)?, cond)?;
    Ok(cond_h.sum_over(support) - joint_h)
}

/// Every packing inequality: one `sum_{S in support} R~_S <= bound` per
/// receiver and per distinct support family (identical supports arising from
/// different generating subfamilies are emitted once; the bound depends only
/// on the support, which the generator asserts).
pub fn packing_system(d: &JointDistribution) -> Result<Vec<RateInequality>> {
    let k = d.k_total();
    let cond_h = CondEntropies::new(d)?;
    let mut out = Vec::new();
    for i in 1..=k as u8 {
        let a_i = aux_family_of(Subset::singleton(i)?, k)?;
        let mut seen: Vec<(SubsetFamily, f64)> = Vec::new();
        for j in subfamilies(&a_i) {
            let support = packing_support(i, &j)?;
            let rhs = packing_rhs_of_support(d, i, &support, &cond_h)?;
            match seen.iter_mut().find(|(s, _)| *s == support) {
                Some((_, prev)) => {
                    debug_assert!(
                        (*prev - rhs).abs() < 1e-9,
                        "same support must give the same bound"
                    );
                    if rhs < *prev {
                        *prev = rhs;
                    }
                }
                None => seen.push((support, rhs)),
            }
        }
        // Canonical emission order: by support size, then formatted form.
        seen.sort_by(|(a, _), (b, _)| {
            a.len()
                .cmp(&b.len())
                .then_with(|| a.format(k).cmp(&b.format(k)))
        });
        for (support, rhs) in seen {
            let vars: Vec<RateVar> = support.iter().map(|s| RateVar::TildeSum(*s)).collect();
            out.push(RateInequality::sum_le(
                vars,
                rhs,
                Provenance::Packing {
                    receiver: i,
                    support,
                },
            ));
        }
    }
    Ok(out)
}

fn closed_form_bound_cached(
    d: &JointDistribution,
    t: Subset,
    pi: &ReceiverOrder,
    cond_h: &CondEntropies,
) -> Result<f64> {
    let k = d.k_total();
    let mut total = 0.0;
    let mut block_union = SubsetFamily::empty();
    for i in 0..pi.len() {
        let block = decomp_block(t, pi, i, k)?;
        total += packing_rhs_of_support(d, pi.seq()[i], &block, cond_h)?;
        block_union = block_union.union(&block);
    }
    for l in 1..k {
        let slice = block_union.level_slice(l);
        if !slice.is_empty() {
            total -= covering_rhs_cached(d, l, &slice, cond_h)?;
        }
    }
    Ok(total)
}

/// Closed-form bound on `sum_{k in t} R_k` for one ordering `pi` of `t`:
/// per-block packing terms minus, per level, the covering lower bound of the
/// level slice of the block union (empty slices contribute zero).
pub fn closed_form_bound(d: &JointDistribution, t: Subset, pi: &ReceiverOrder) -> Result<f64> {
    closed_form_bound_cached(d, t, pi, &CondEntropies::new(d)?)
}

/// The closed-form region: one inequality `sum_{k in T} R_k <= bound(T, pi)`
/// for every nonempty `T` and every ordering `pi` of `T`, bounds clamped at
/// zero, over the per-receiver rate variables.
pub fn closed_form_system(d: &JointDistribution) -> Result<RegionSystem> {
    let k = d.k_total();
    let cond_h = CondEntropies::new(d)?;
    let variables: Vec<RateVar> = (1..=k as u8).map(RateVar::PerReceiver).collect();
    let mut inequalities = Vec::new();
    let mut clamped = Vec::new();
    for t in all_subsets(k) {
        for pi in orderings(t) {
            let raw = closed_form_bound_cached(d, t, &pi, &cond_h)?;
            let provenance = Provenance::ClosedForm { t, pi };
            let bound = if raw < 0.0 {
                clamped.push((provenance.clone(), raw));
                0.0
            } else {
                raw
            };
            let vars: Vec<RateVar> = t.elems().into_iter().map(RateVar::PerReceiver).collect();
            inequalities.push(RateInequality::sum_le(vars, bound, provenance));
        }
    }
    Ok(RegionSystem {
        k_total: k,
        variables,
        inequalities,
        clamped,
    })
}

/// Helper bundle for the explicit three-receiver system.
struct Three<'a> {
    d: &'a JointDistribution,
}

impl<'a> Three<'a> {
    fn aux(&self, elems: &[&[u8]]) -> VarSet {
        let mut set = VarSet::EMPTY;
        for e in elems {
            let s = Subset::from_elems(e).unwrap();
            set = set.with(self.d.var_index(Var::Aux(s)).unwrap());
        }
        set
    }

    fn y(&self, k: u8) -> VarSet {
        self.d.output_set(k).unwrap()
    }

    fn mi(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<f64> {
        self.d.mutual_info(a, b, c)
    }
}

/// The nine explicit inequalities of the three-receiver region, folded with
/// min terms over the symmetric receiver pairs. Printed forms of a few deep
/// terms are typographically ambiguous; the terms used here are the ones
/// that make the system coincide with [`closed_form_system`], which the
/// tests enforce by comparing support functions.
pub fn three_receiver_system(d: &JointDistribution) -> Result<RegionSystem> {
    if d.k_total() != 3 {
        return Err(Error::Argument(format!(
            "three-receiver system requires K = 3, got {}",
            d.k_total()
        )));
    }
    let h = Three { d };
    let (u1, u2, u3) = (h.aux(&[&[1]]), h.aux(&[&[2]]), h.aux(&[&[3]]));
    let (u12, u13, u23) = (h.aux(&[&[1, 2]]), h.aux(&[&[1, 3]]), h.aux(&[&[2, 3]]));
    let u123 = h.aux(&[&[1, 2, 3]]);
    let (y1, y2, y3) = (h.y(1), h.y(2), h.y(3));

    let min = |a: f64, b: f64| if a < b { a } else { b };

    // Folded min terms over the shared-pair auxiliary plus the full-set one.
    let i12 = min(
        h.mi(u12.union(u123), y1, VarSet::EMPTY)?,
        h.mi(u12.union(u123), y2, VarSet::EMPTY)?,
    );
    let i13 = min(
        h.mi(u13.union(u123), y1, VarSet::EMPTY)?,
        h.mi(u13.union(u123), y3, VarSet::EMPTY)?,
    );
    let i23 = min(
        h.mi(u23.union(u123), y2, VarSet::EMPTY)?,
        h.mi(u23.union(u123), y3, VarSet::EMPTY)?,
    );

    // Shared excess of the full sum-rate bounds. The split of the
    // three-way level-1 term along any receiver order gives the same value
    // by the chain rule.
    let pairs3 = u12.union(u13).union(u23).union(u123);
    let delta = h.mi(u2, u13, u12.union(u23).union(u123))?
        + h.mi(u3, u12, u13.union(u23).union(u123))?
        + h.mi(u1, u3, u2.union(pairs3))?
        + h.mi(u1, u23, u12.union(u13).union(u123))?
        + h.mi(u1, u2, pairs3)?
        + h.mi(u2, u3, pairs3)?;

    let single_1 = h.mi(u1.union(u12).union(u13).union(u123), y1, VarSet::EMPTY)?
        - h.mi(u1, u23, u12.union(u13).union(u123))?;
    let single_2 = h.mi(u2.union(u12).union(u23).union(u123), y2, VarSet::EMPTY)?
        - h.mi(u2, u13, u12.union(u23).union(u123))?;
    let single_3 = h.mi(u3.union(u13).union(u23).union(u123), y3, VarSet::EMPTY)?
        - h.mi(u3, u12, u13.union(u23).union(u123))?;

    // Pair bounds. The subtracted cross terms condition on the pair's own
    // shared auxiliary (u12 for the 1-2 bound), mirroring the per-receiver
    // covering terms.
    let pair_12 = i12
        + h.mi(u1.union(u13), y1, u12.union(u123))?
        + h.mi(u2.union(u23), y2, u12.union(u123))?
        - h.mi(u13, u23, u12.union(u123))?
        - h.mi(u1, u23, u12.union(u13).union(u123))?
        - h.mi(u2, u13, u12.union(u23).union(u123))?
        - h.mi(u1, u2, pairs3)?;
    let pair_13 = i13
        + h.mi(u1.union(u12), y1, u13.union(u123))?
        + h.mi(u3.union(u23), y3, u13.union(u123))?
        - h.mi(u12, u23, u13.union(u123))?
        - h.mi(u1, u23, u12.union(u13).union(u123))?
        - h.mi(u3, u12, u13.union(u23).union(u123))?
        - h.mi(u1, u3, pairs3)?;
    let pair_23 = i23
        + h.mi(u2.union(u12), y2, u23.union(u123))?
        + h.mi(u3.union(u13), y3, u23.union(u123))?
        - h.mi(u12, u13, u23.union(u123))?
        - h.mi(u2, u13, u12.union(u23).union(u123))?
        - h.mi(u3, u12, u13.union(u23).union(u123))?
        - h.mi(u2, u3, pairs3)?;

    let sum_12 = i12
        + h.mi(u1.union(u13), y1, u12.union(u123))?
        + h.mi(u2.union(u23), y2, u12.union(u123))?
        + h.mi(u3, y3, u13.union(u23).union(u123))?
        - h.mi(u13, u23, u12.union(u123))?
        - delta;
    let sum_13 = i13
        + h.mi(u1.union(u12), y1, u13.union(u123))?
        + h.mi(u3.union(u23), y3, u13.union(u123))?
        + h.mi(u2, y2, u12.union(u23).union(u123))?
        - h.mi(u12, u23, u13.union(u123))?
        - delta;
    let sum_23 = i23
        + h.mi(u2.union(u12), y2, u23.union(u123))?
        + h.mi(u3.union(u13), y3, u23.union(u123))?
        + h.mi(u1, y1, u12.union(u13).union(u123))?
        - h.mi(u12, u13, u23.union(u123))?
        - delta;

    let r = RateVar::PerReceiver;
    let bounds: [(&'static str, Vec<RateVar>, f64); 9] = [
        ("single_1", alloc::vec![r(1)], single_1),
        ("single_2", alloc::vec![r(2)], single_2),
        ("single_3", alloc::vec![r(3)], single_3),
        ("pair_12", alloc::vec![r(1), r(2)], pair_12),
        ("pair_13", alloc::vec![r(1), r(3)], pair_13),
        ("pair_23", alloc::vec![r(2), r(3)], pair_23),
        ("sum_12", alloc::vec![r(1), r(2), r(3)], sum_12),
        ("sum_13", alloc::vec![r(1), r(2), r(3)], sum_13),
        ("sum_23", alloc::vec![r(1), r(2), r(3)], sum_23),
    ];

    let mut inequalities = Vec::new();
    let mut clamped = Vec::new();
    for (label, vars, raw) in bounds {
        let provenance = Provenance::ThreeReceiver { label };
        let bound = if raw < 0.0 {
            clamped.push((provenance.clone(), raw));
            0.0
        } else {
            raw
        };
        inequalities.push(RateInequality::sum_le(vars, bound, provenance));
    }
    Ok(RegionSystem {
        k_total: 3,
        variables: alloc::vec![r(1), r(2), r(3)],
        inequalities,
        clamped,
    })
}

/// Result of checking that splitting a covering family cannot tighten the
/// combined bound: `covering_rhs(j) >= sum_i covering_rhs(parts_i)`.
#[derive(Debug, Clone)]
pub struct SplitBoundReport {
    pub whole: f64,
    pub parts_sum: f64,
    pub ok: bool,
}

/// Checks the split-bound inequality for one partition of a level-`l`
/// family.
pub fn split_bound_check(
    d: &JointDistribution,
    l: usize,
    j: &SubsetFamily,
    parts: &[SubsetFamily],
) -> Result<SplitBoundReport> {
    let mut seen = SubsetFamily::empty();
    let mut count = 0usize;
    for p in parts {
        if p.is_empty() {
            return Err(Error::Argument(String::from("partition part is empty")));
        }
        if seen.intersects(p) {
            return Err(Error::Argument(String::from(
                "partition parts are not disjoint",
            )));
        }
        seen = seen.union(p);
        count += p.len();
    }
    if &seen != j || count != j.len() {
        return Err(Error::Argument(String::from(
            "parts do not partition the family",
        )));
    }
    let cond = CondEntropies::new(d)?;
    let whole = covering_rhs_cached(d, l, j, &cond)?;
    let mut parts_sum = 0.0;
    for p in parts {
        parts_sum += covering_rhs_cached(d, l, p, &cond)?;
    }
    Ok(SplitBoundReport {
        whole,
        parts_sum,
        ok: whole >= parts_sum - 1e-10,
    })
}
