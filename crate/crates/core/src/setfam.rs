//! Families over the power set of receivers and their disjoint block
//! decompositions.
//!
//! Two building blocks index everything downstream:
//!
//! * the superset family of a base set — every subset that contains the base
//!   and whose cardinality lies in a level band, and
//! * the containing-subset family — every subset of a given set that
//!   contains a fixed receiver, again within a level band.
//!
//! Given an ordering `pi` of a receiver set `T`, the union of the singleton
//! superset families of `T`'s members splits into disjoint blocks: block `i`
//! holds the subsets that contain `pi(i+1)` and avoid `pi(1..=i)`. The same
//! identity holds per cardinality level. [`verify_decomposition`] checks all
//! of it exhaustively.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::subset::{all_subsets, ReceiverOrder, Subset, SubsetFamily, MAX_RECEIVERS};

fn check_k(k_total: usize) -> Result<()> {
    if k_total == 0 || k_total > MAX_RECEIVERS {
        return Err(Error::Argument(format!(
            "receiver count {k_total} out of range 1..={MAX_RECEIVERS}"
        )));
    }
    Ok(())
}

fn check_levels(lo: usize, hi: usize, max: usize) -> Result<()> {
    if lo < 1 || lo > hi || hi > max {
        return Err(Error::Argument(format!(
            "level range {lo}:{hi} invalid (must satisfy 1 <= {lo} <= {hi} <= {max})"
        )));
    }
    Ok(())
}

/// All supersets of `base` (all nonempty subsets when `base` is `None`) with
/// cardinality in `lo..=hi`, in canonical order.
pub fn superset_family(
    base: Option<Subset>,
    lo: usize,
    hi: usize,
    k_total: usize,
) -> Result<SubsetFamily> {
    check_k(k_total)?;
    check_levels(lo, hi, k_total)?;
    if let Some(b) = base {
        if !b.within(k_total) {
            return Err(Error::Argument(format!(
                "base {b:?} not within 1..={k_total}"
            )));
        }
    }
    Ok(all_subsets(k_total)
        .into_iter()
        .filter(|s| {
            let card_ok = (lo..=hi).contains(&s.card());
            let base_ok = base.map_or(true, |b| b.is_subset_of(*s));
            card_ok && base_ok
        })
        .collect())
}

/// All nonempty subsets of `{1..k_total}` that contain `base`.
pub fn aux_family_of(base: Subset, k_total: usize) -> Result<SubsetFamily> {
    superset_family(Some(base), 1, k_total, k_total)
}

/// All `2^k - 1` nonempty subsets.
pub fn aux_family(k_total: usize) -> Result<SubsetFamily> {
    superset_family(None, 1, k_total, k_total)
}

/// The cardinality-`l` layer of the power set.
pub fn level_family(l: usize, k_total: usize) -> Result<SubsetFamily> {
    superset_family(None, l, l, k_total)
}

/// All subsets with cardinality strictly above `l` (empty when `l = k_total`).
pub fn upper_level_family(l: usize, k_total: usize) -> Result<SubsetFamily> {
    if l >= k_total {
        return Ok(SubsetFamily::empty());
    }
    superset_family(None, l + 1, k_total, k_total)
}

/// All subsets of `s` that contain receiver `k`, with cardinality in
/// `lo..=hi`; empty when `k` is not in `s`.
pub fn subsets_containing(s: Subset, k: u8, lo: usize, hi: usize) -> Result<SubsetFamily> {
    check_levels(lo, hi, s.card())?;
    if !s.contains(k) {
        return Ok(SubsetFamily::empty());
    }
    // Enumerate subsets of s directly via submask iteration.
    let mask = s.mask();
    let mut out = Vec::new();
    let mut sub = mask;
    loop {
        if sub != 0 {
            let cand = Subset::from_mask(sub)?;
            if cand.contains(k) && (lo..=hi).contains(&cand.card()) {
                out.push(cand);
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    Ok(SubsetFamily::from_vec(out))
}

/// Full-band variant: all subsets of `s` containing `k`.
pub fn subsets_containing_all(s: Subset, k: u8) -> Result<SubsetFamily> {
    subsets_containing(s, k, 1, s.card())
}

fn prefix_removed(t: &ReceiverOrder, i: usize, k_total: usize) -> Result<Subset> {
    let mut mask = Subset::full(k_total)?.mask();
    for &k in &t.seq()[..i] {
        mask &= !(1 << (k - 1));
    }
    Subset::from_mask(mask)
}

fn check_block_args(t: Subset, pi: &ReceiverOrder, i: usize, k_total: usize) -> Result<()> {
    check_k(k_total)?;
    if !t.within(k_total) {
        return Err(Error::Argument(format!("t {t:?} not within 1..={k_total}")));
    }
    if !pi.orders(t) {
        return Err(Error::Argument(format!(
            "ordering {pi:?} does not arrange {t:?}"
        )));
    }
    if i >= pi.len() {
        return Err(Error::Argument(format!(
            "block index {i} out of range 0..{}",
            pi.len()
        )));
    }
    Ok(())
}

/// Block `i` of the decomposition induced by the ordering `pi` of `t`: the
/// subsets of `{1..k_total} \ {pi(1..=i)}` that contain `pi(i+1)`.
pub fn decomp_block(
    t: Subset,
    pi: &ReceiverOrder,
    i: usize,
    k_total: usize,
) -> Result<SubsetFamily> {
    check_block_args(t, pi, i, k_total)?;
    let rest = prefix_removed(pi, i, k_total)?;
    subsets_containing_all(rest, pi.seq()[i])
}

/// The cardinality-`l` slice of [`decomp_block`].
pub fn decomp_block_level(
    t: Subset,
    pi: &ReceiverOrder,
    i: usize,
    l: usize,
    k_total: usize,
) -> Result<SubsetFamily> {
    check_block_args(t, pi, i, k_total)?;
    check_levels(l, l, k_total)?;
    Ok(decomp_block(t, pi, i, k_total)?.level_slice(l))
}

/// Alternative form of a block: the superset family of `{pi(i+1)}` minus the
/// superset families of every pair `{pi(i+1), pi(m)}`, `m <= i`.
fn decomp_block_alt(
    t: Subset,
    pi: &ReceiverOrder,
    i: usize,
    k_total: usize,
) -> Result<SubsetFamily> {
    check_block_args(t, pi, i, k_total)?;
    let head = pi.seq()[i];
    let mut block = aux_family_of(Subset::singleton(head)?, k_total)?;
    for &prev in &pi.seq()[..i] {
        let pair = Subset::from_elems(&[head, prev])?;
        block = block.minus(&aux_family_of(pair, k_total)?);
    }
    Ok(block)
}

/// Result of checking the block decomposition for one `(t, pi)`.
#[derive(Debug, Clone)]
pub struct DecompReport {
    pub ok: bool,
    /// The blocks, index 0 first.
    pub blocks: Vec<SubsetFamily>,
    /// Human-readable descriptions of every violated identity.
    pub violations: Vec<String>,
}

/// Checks that the blocks of `(t, pi)` are pairwise disjoint, that their
/// union is exactly the family of subsets meeting `t`, that the same holds
/// on every cardinality level, and that the difference-of-superset-families
/// form agrees with the direct definition of each block.
pub fn verify_decomposition(t: Subset, pi: &ReceiverOrder, k_total: usize) -> Result<DecompReport> {
    check_block_args(t, pi, 0, k_total)?;
    let mut violations = Vec::new();

    let blocks: Vec<SubsetFamily> = (0..pi.len())
        .map(|i| decomp_block(t, pi, i, k_total))
        .collect::<Result<_>>()?;

    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if blocks[i].intersects(&blocks[j]) {
                for s in blocks[i].iter() {
                    if blocks[j].contains(*s) {
                        violations.push(format!("subset {s:?} appears in blocks {i} and {j}"));
                    }
                }
            }
        }
    }

    let mut union = SubsetFamily::empty();
    for b in &blocks {
        union = union.union(b);
    }
    let mut expected = SubsetFamily::empty();
    for &k in t.elems().iter() {
        expected = expected.union(&aux_family_of(Subset::singleton(k)?, k_total)?);
    }
    for s in expected.minus(&union).iter() {
        violations.push(format!("subset {s:?} missing from the block union"));
    }
    for s in union.minus(&expected).iter() {
        violations.push(format!("subset {s:?} extraneous in the block union"));
    }

    for l in 1..=k_total {
        let mut level_union = SubsetFamily::empty();
        for i in 0..pi.len() {
            level_union = level_union.union(&decomp_block_level(t, pi, i, l, k_total)?);
        }
        let level_expected = expected.level_slice(l);
        if level_union != level_expected {
            violations.push(format!(
                "level {l} slice mismatch: got {level_union:?}, expected {level_expected:?}"
            ));
        }
    }

    for (i, block) in blocks.iter().enumerate() {
        let alt = decomp_block_alt(t, pi, i, k_total)?;
        if &alt != block {
            violations.push(format!(
                "block {i} disagrees with its difference form: {block:?} vs {alt:?}"
            ));
        }
    }

    Ok(DecompReport {
        ok: violations.is_empty(),
        blocks,
        violations,
    })
}

/// Packing support of receiver `i` over a family `j` of subsets all
/// containing `i`: the union of the containing-subset families of `j`'s
/// members.
pub fn packing_support(i: u8, j: &SubsetFamily) -> Result<SubsetFamily> {
    let mut out = SubsetFamily::empty();
    for s in j.iter() {
        if !s.contains(i) {
            return Err(Error::Argument(format!(
                "family member {s:?} does not contain receiver {i}"
            )));
        }
        out = out.union(&subsets_containing_all(*s, i)?);
    }
    Ok(out)
}
