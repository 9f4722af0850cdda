//! Nonempty receiver subsets, ordered families of them, and receiver
//! orderings.
//!
//! A [`Subset`] indexes one auxiliary variable: bit `k - 1` of the mask is
//! set when receiver `k` belongs to the subset. Families are kept in
//! canonical order — ascending cardinality, then lexicographic on the sorted
//! element lists — and every table or file format in this workspace uses that
//! order.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering as CmpOrdering;
use core::fmt;

use crate::error::{Error, Result};

/// Structural cap on the receiver count; numeric modules document tighter
/// practical limits.
pub const MAX_RECEIVERS: usize = 16;

/// A nonempty subset of the receivers `{1, ..., K}` stored as a bitmask
/// (bit `k - 1` means receiver `k` is present).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset(u16);

impl Subset {
    pub fn from_mask(mask: u16) -> Result<Self> {
        if mask == 0 {
            return Err(Error::Argument(String::from(
                "subset mask must be nonempty",
            )));
        }
        Ok(Subset(mask))
    }

    /// Builds a subset from 1-based receiver indices.
    pub fn from_elems(elems: &[u8]) -> Result<Self> {
        let mut mask = 0u16;
        for &k in elems {
            if k == 0 || k as usize > MAX_RECEIVERS {
                return Err(Error::Argument(alloc::format!(
                    "receiver {k} out of range 1..={MAX_RECEIVERS}"
                )));
            }
            mask |= 1 << (k - 1);
        }
        Self::from_mask(mask)
    }

    /// The singleton `{k}`.
    pub fn singleton(k: u8) -> Result<Self> {
        Self::from_elems(&[k])
    }

    /// The full set `{1, ..., k_total}`.
    pub fn full(k_total: usize) -> Result<Self> {
        if k_total == 0 || k_total > MAX_RECEIVERS {
            return Err(Error::Argument(alloc::format!(
                "receiver count {k_total} out of range 1..={MAX_RECEIVERS}"
            )));
        }
        Ok(Subset(((1u32 << k_total) - 1) as u16))
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn card(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, k: u8) -> bool {
        k >= 1 && k as usize <= MAX_RECEIVERS && self.0 & (1 << (k - 1)) != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Receivers of the subset in ascending order.
    pub fn elems(self) -> Vec<u8> {
        (1..=MAX_RECEIVERS as u8)
            .filter(|&k| self.contains(k))
            .collect()
    }

    /// Set difference; `None` when the result would be empty.
    pub fn minus(self, other: Subset) -> Option<Subset> {
        let m = self.0 & !other.0;
        (m != 0).then_some(Subset(m))
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn within(self, k_total: usize) -> bool {
        k_total <= MAX_RECEIVERS && u32::from(self.0) < (1u32 << k_total)
    }

    /// Canonical order: ascending cardinality, then lexicographic on the
    /// sorted element lists (`{1,4}` sorts before `{2,3}`).
    pub fn canonical_cmp(self, other: Subset) -> CmpOrdering {
        self.card().cmp(&other.card()).then_with(|| {
            if self.0 == other.0 {
                return CmpOrdering::Equal;
            }
            // Within equal cardinality, the set owning the smallest
            // differing element comes first.
            let diff = self.0 ^ other.0;
            let low = diff & diff.wrapping_neg();
            if self.0 & low != 0 {
                CmpOrdering::Less
            } else {
                CmpOrdering::Greater
            }
        })
    }

    /// Serialized form: digit string of sorted elements for `k_total <= 9`
    /// (for example `"13"` is `{1,3}`), comma-separated otherwise.
    pub fn format(self, k_total: usize) -> String {
        let elems = self.elems();
        if k_total <= 9 {
            elems.iter().map(|k| char::from(b'0' + k)).collect()
        } else {
            let parts: Vec<String> = elems.iter().map(|k| alloc::format!("{k}")).collect();
            parts.join(",")
        }
    }

    /// Parses the serialized form produced by [`Subset::format`].
    pub fn parse(text: &str, k_total: usize) -> Result<Self> {
        let bad = |msg: &str| Error::Argument(alloc::format!("subset '{text}': {msg}"));
        let mut elems = Vec::new();
        if k_total <= 9 {
            for ch in text.chars() {
                let d = ch.to_digit(10).ok_or_else(|| bad("expected digits"))? as u8;
                elems.push(d);
            }
        } else {
            for part in text.split(',') {
                let d: u8 = part
                    .trim()
                    .parse()
                    .map_err(|_| bad("expected comma-separated receivers"))?;
                elems.push(d);
            }
        }
        if elems.is_empty() {
            return Err(bad("empty"));
        }
        for &k in &elems {
            if k == 0 || k as usize > k_total {
                return Err(bad("receiver out of range"));
            }
        }
        let s = Self::from_elems(&elems)?;
        if s.card() != elems.len() {
            return Err(bad("duplicate receiver"));
        }
        Ok(s)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.elems().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

/// All nonempty subsets of `{1, ..., k_total}` in canonical order.
pub fn all_subsets(k_total: usize) -> Vec<Subset> {
    let mut v: Vec<Subset> = (1..1u32 << k_total).map(|m| Subset(m as u16)).collect();
    v.sort_by(|a, b| a.canonical_cmp(*b));
    v
}

/// An ordered, duplicate-free family of subsets in canonical order.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SubsetFamily {
    members: Vec<Subset>,
}

impl SubsetFamily {
    pub fn empty() -> Self {
        SubsetFamily {
            members: Vec::new(),
        }
    }

    /// Sorts into canonical order and removes duplicates.
    pub fn from_vec(mut members: Vec<Subset>) -> Self {
        members.sort_by(|a, b| a.canonical_cmp(*b));
        members.dedup();
        SubsetFamily { members }
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.iter().any(|&m| m == s)
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Subset> {
        self.members.iter()
    }

    pub fn union(&self, other: &SubsetFamily) -> SubsetFamily {
        let mut v = self.members.clone();
        v.extend_from_slice(&other.members);
        SubsetFamily::from_vec(v)
    }

    /// Members missing from `other`.
    pub fn minus(&self, other: &SubsetFamily) -> SubsetFamily {
        SubsetFamily {
            members: self
                .members
                .iter()
                .copied()
                .filter(|s| !other.contains(*s))
                .collect(),
        }
    }

    /// Members of cardinality `l`.
    pub fn level_slice(&self, l: usize) -> SubsetFamily {
        SubsetFamily {
            members: self
                .members
                .iter()
                .copied()
                .filter(|s| s.card() == l)
                .collect(),
        }
    }

    pub fn intersects(&self, other: &SubsetFamily) -> bool {
        self.members.iter().any(|s| other.contains(*s))
    }

    pub fn format(&self, k_total: usize) -> String {
        let parts: Vec<String> = self.members.iter().map(|s| s.format(k_total)).collect();
        parts.join(";")
    }
}

impl fmt::Debug for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

impl FromIterator<Subset> for SubsetFamily {
    fn from_iter<I: IntoIterator<Item = Subset>>(iter: I) -> Self {
        SubsetFamily::from_vec(iter.into_iter().collect())
    }
}

/// An ordering of some subset of receivers (all elements distinct, 1-based).
#[derive(Clone, PartialEq, Eq)]
pub struct ReceiverOrder {
    seq: Vec<u8>,
}

impl ReceiverOrder {
    pub fn new(seq: Vec<u8>) -> Result<Self> {
        let mut seen = 0u32;
        for &k in &seq {
            if k == 0 || k as usize > MAX_RECEIVERS {
                return Err(Error::Argument(alloc::format!(
                    "receiver {k} out of range 1..={MAX_RECEIVERS}"
                )));
            }
            if seen & (1 << (k - 1)) != 0 {
                return Err(Error::Argument(alloc::format!(
                    "receiver {k} repeated in ordering"
                )));
            }
            seen |= 1 << (k - 1);
        }
        if seq.is_empty() {
            return Err(Error::Argument(String::from("ordering must be nonempty")));
        }
        Ok(ReceiverOrder { seq })
    }

    pub fn seq(&self) -> &[u8] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    /// Always false; the constructor rejects empty orderings.
    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// The set of receivers this ordering arranges.
    pub fn domain(&self) -> Subset {
        Subset::from_elems(&self.seq).expect("ordering is nonempty")
    }

    /// True when this ordering arranges exactly `t`.
    pub fn orders(&self, t: Subset) -> bool {
        self.domain() == t
    }

    pub fn format(&self) -> String {
        let parts: Vec<String> = self.seq.iter().map(|k| alloc::format!("{k}")).collect();
        parts.join(",")
    }
}

impl fmt::Debug for ReceiverOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.seq.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// All `|T|!` orderings of the receivers of `t`, in lexicographic order.
///
/// The permutation set of a subset is defined through bijections of the full
/// receiver set; distinct bijections that induce the same tuple on `t`
/// collapse to one ordering here.
pub fn orderings(t: Subset) -> Vec<ReceiverOrder> {
    let elems = t.elems();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(elems.len());
    let mut used = alloc::vec![false; elems.len()];
    fn rec(elems: &[u8], used: &mut [bool], current: &mut Vec<u8>, out: &mut Vec<ReceiverOrder>) {
        if current.len() == elems.len() {
            out.push(ReceiverOrder {
                seq: current.clone(),
            });
            return;
        }
        for i in 0..elems.len() {
            if !used[i] {
                used[i] = true;
                current.push(elems[i]);
                rec(elems, used, current, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(&elems, &mut used, &mut current, &mut out);
    out
}
