//! Joint distributions over the auxiliaries, the channel input, and the
//! channel outputs, plus entropy and mutual-information queries.
//!
//! A model fixes, for `K` receivers: one finite-alphabet auxiliary variable
//! per nonempty receiver subset, a joint pmf over all auxiliaries, a
//! deterministic map from the auxiliaries to the channel input `X`, and the
//! channel law `p(y_1..y_K | x)`. [`ModelSpec::build_joint`] multiplies the
//! three factors into one dense table over `(U_S : S), X, Y_1..Y_K`.
//!
//! Everything is dense and in bits (base-2 logs); practical sizes are
//! desk-scale (`K <= 4` with small alphabets). Tables index mixed-radix with
//! the last variable fastest.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::subset::{all_subsets, Subset, SubsetFamily};

/// Default cap on the number of cells in a built joint table.
pub const DEFAULT_CELL_CAP: usize = 1 << 26;

/// One variable of a joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// The auxiliary carrying the submessages of a receiver subset.
    Aux(Subset),
    /// The channel input X.
    Input,
    /// The channel output of receiver `k` (1-based).
    Output(u8),
}

/// A set of variables of one [`JointDistribution`], as a bitmask over its
/// variable indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarSet(pub u64);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn contains(self, idx: usize) -> bool {
        self.0 & (1 << idx) != 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersects(self, other: VarSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, idx: usize) -> VarSet {
        VarSet(self.0 | (1 << idx))
    }
}

/// Model of one broadcast channel use: auxiliary pmf, input map, channel law.
///
/// `aux_alphabets` and all flat tables follow the canonical subset order;
/// the last subset varies fastest in `aux_pmf` and `symbol_map`. `channel`
/// is indexed by `x * prod(|Y_k|) + mixed_radix(y_1..y_K)` with `y_K`
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub k_total: usize,
    pub aux_alphabets: Vec<usize>,
    pub aux_pmf: Vec<f64>,
    pub symbol_map: Vec<usize>,
    pub x_alphabet: usize,
    pub y_alphabets: Vec<usize>,
    pub channel: Vec<f64>,
}

/// Normalization slack accepted on ingested pmfs.
pub const PMF_TOLERANCE: f64 = 1e-9;

impl ModelSpec {
    /// The canonical subsets this model's `aux_*` tables are aligned to.
    pub fn subsets(&self) -> Vec<Subset> {
        all_subsets(self.k_total)
    }

    /// Number of joint auxiliary configurations.
    pub fn aux_space(&self) -> usize {
        self.aux_alphabets.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.k_total == 0 || self.k_total > crate::subset::MAX_RECEIVERS {
            return fail(format!("k_total {} out of range", self.k_total));
        }
        let n_subsets = (1usize << self.k_total) - 1;
        if self.aux_alphabets.len() != n_subsets {
            return fail(format!(
                "aux_alphabets has {} entries, expected {}",
                self.aux_alphabets.len(),
                n_subsets
            ));
        }
        if self.aux_alphabets.iter().any(|&a| a == 0) {
            return fail(String::from("auxiliary alphabet sizes must be >= 1"));
        }
        if self.x_alphabet == 0 {
            return fail(String::from("x_alphabet must be >= 1"));
        }
        if self.y_alphabets.len() != self.k_total {
            return fail(format!(
                "y_alphabets has {} entries, expected {}",
                self.y_alphabets.len(),
                self.k_total
            ));
        }
        if self.y_alphabets.iter().any(|&a| a == 0) {
            return fail(String::from("output alphabet sizes must be >= 1"));
        }
        let aux_space = self.aux_space();
        if self.aux_pmf.len() != aux_space {
            return fail(format!(
                "aux_pmf has {} entries, expected {}",
                self.aux_pmf.len(),
                aux_space
            ));
        }
        if self.symbol_map.len() != aux_space {
            return fail(format!(
                "symbol_map has {} entries, expected {}",
                self.symbol_map.len(),
                aux_space
            ));
        }
        if let Some(&x) = self.symbol_map.iter().find(|&&x| x >= self.x_alphabet) {
            return fail(format!(
                "symbol_map value {x} not below x_alphabet {}",
                self.x_alphabet
            ));
        }
        if self.aux_pmf.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return fail(String::from("aux_pmf entries must be finite and >= 0"));
        }
        let total: f64 = self.aux_pmf.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return fail(format!("aux_pmf sums to {total}, expected 1 within 1e-9"));
        }
        let y_space: usize = self.y_alphabets.iter().product();
        if self.channel.len() != self.x_alphabet * y_space {
            return fail(format!(
                "channel has {} entries, expected {}",
                self.channel.len(),
                self.x_alphabet * y_space
            ));
        }
        if self.channel.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return fail(String::from("channel entries must be finite and >= 0"));
        }
        for x in 0..self.x_alphabet {
            let row: f64 = self.channel[x * y_space..(x + 1) * y_space].iter().sum();
            if (row - 1.0).abs() > PMF_TOLERANCE {
                return fail(format!(
                    "channel row x={x} sums to {row}, expected 1 within 1e-9"
                ));
            }
        }
        Ok(())
    }

    pub fn build_joint(&self) -> Result<JointDistribution> {
        self.build_joint_with_cap(DEFAULT_CELL_CAP)
    }

    /// Builds the dense joint table `p(u(all subsets)) * 1{x = f(u)} *
    /// p(y_1..y_K | x)`, renormalized once to shed ingestion drift.
    pub fn build_joint_with_cap(&self, cell_cap: usize) -> Result<JointDistribution> {
        self.validate()?;
        let subsets = self.subsets();
        let mut vars: Vec<(Var, usize)> = Vec::new();
        for (s, &a) in subsets.iter().zip(&self.aux_alphabets) {
            vars.push((Var::Aux(*s), a));
        }
        vars.push((Var::Input, self.x_alphabet));
        for (k, &a) in self.y_alphabets.iter().enumerate() {
            vars.push((Var::Output(k as u8 + 1), a));
        }

        let mut cells: usize = 1;
        for &(_, a) in &vars {
            cells = cells
                .checked_mul(a)
                .ok_or_else(|| Error::Capacity(String::from("joint table size overflows usize")))?;
            if cells > cell_cap {
                return Err(Error::Capacity(format!(
                    "joint table needs more than {cell_cap} cells"
                )));
            }
        }

        let y_space: usize = self.y_alphabets.iter().product();
        let mut probs = vec![0.0f64; cells];
        // Cell index layout: (aux digits, x, y digits), last fastest, so a
        // full cell index is (u * x_alphabet + x) * y_space + y.
        for (u, &pu) in self.aux_pmf.iter().enumerate() {
            if pu == 0.0 {
                continue;
            }
            let x = self.symbol_map[u];
            let base = (u * self.x_alphabet + x) * y_space;
            let row = &self.channel[x * y_space..(x + 1) * y_space];
            for (y, &py) in row.iter().enumerate() {
                probs[base + y] = pu * py;
            }
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::Validation(String::from(
                "joint distribution has zero total mass",
            )));
        }
        for p in &mut probs {
            *p /= total;
        }
        Ok(JointDistribution {
            k_total: self.k_total,
            vars,
            probs,
        })
    }
}

/// A dense joint pmf over named variables (mixed-radix, last variable
/// fastest). Immutable after construction; queries are pure.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    k_total: usize,
    vars: Vec<(Var, usize)>,
    probs: Vec<f64>,
}

fn log2(x: f64) -> f64 {
    libm::log2(x)
}

impl JointDistribution {
    /// Builds a raw distribution from an explicit variable list and table.
    pub fn from_raw(k_total: usize, vars: Vec<(Var, usize)>, probs: Vec<f64>) -> Result<Self> {
        let cells: usize = vars.iter().map(|&(_, a)| a).product();
        if probs.len() != cells {
            return Err(Error::Validation(format!(
                "table has {} cells, expected {}",
                probs.len(),
                cells
            )));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Validation(String::from(
                "probabilities must be finite and >= 0",
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::Validation(format!(
                "table sums to {total}, expected 1 within 1e-9"
            )));
        }
        if vars.len() > 64 {
            return Err(Error::Validation(String::from("more than 64 variables")));
        }
        Ok(JointDistribution {
            k_total,
            vars,
            probs,
        })
    }

    pub fn k_total(&self) -> usize {
        self.k_total
    }

    pub fn vars(&self) -> &[(Var, usize)] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn var_index(&self, v: Var) -> Result<usize> {
        self.vars
            .iter()
            .position(|&(w, _)| w == v)
            .ok_or_else(|| Error::Argument(format!("variable {v:?} not in distribution")))
    }

    pub fn var_set(&self, list: &[Var]) -> Result<VarSet> {
        let mut set = VarSet::EMPTY;
        for &v in list {
            set = set.with(self.var_index(v)?);
        }
        Ok(set)
    }

    /// The variable set holding the auxiliaries of every member of `family`.
    pub fn aux_set(&self, family: &SubsetFamily) -> Result<VarSet> {
        let mut set = VarSet::EMPTY;
        for s in family.iter() {
            set = set.with(self.var_index(Var::Aux(*s))?);
        }
        Ok(set)
    }

    pub fn output_set(&self, k: u8) -> Result<VarSet> {
        Ok(VarSet::EMPTY.with(self.var_index(Var::Output(k))?))
    }

    /// Marginal table over `keep`, cell order following the distribution's
    /// variable order restricted to `keep`.
    pub fn marginal(&self, keep: VarSet) -> Vec<f64> {
        let mut size = 1usize;
        let mut strides = vec![0usize; self.vars.len()];
        // Strides for the kept variables, last kept variable fastest.
        for (i, &(_, a)) in self.vars.iter().enumerate().rev() {
            if keep.contains(i) {
                strides[i] = size;
                size *= a;
            }
        }
        let mut out = vec![0.0f64; size];
        let mut digits = vec![0usize; self.vars.len()];
        let mut idx = 0usize;
        for &p in &self.probs {
            out[idx] += p;
            // Odometer step, updating the packed marginal index in place.
            for i in (0..self.vars.len()).rev() {
                digits[i] += 1;
                idx += strides[i];
                if digits[i] < self.vars[i].1 {
                    break;
                }
                idx -= strides[i] * digits[i];
                digits[i] = 0;
            }
        }
        out
    }

    fn entropy_of_marginal(table: &[f64]) -> f64 {
        let mut h = 0.0;
        for &p in table {
            if p > 0.0 {
                h -= p * log2(p);
            }
        }
        h
    }

    /// Joint entropy `H(vars)` in bits.
    pub fn joint_entropy(&self, vars: VarSet) -> f64 {
        if vars.is_empty() {
            return 0.0;
        }
        Self::entropy_of_marginal(&self.marginal(vars))
    }

    /// Conditional entropy `H(A | B)` in bits; `A` empty gives 0.
    pub fn entropy(&self, a: VarSet, b: VarSet) -> Result<f64> {
        if a.intersects(b) {
            return Err(Error::Argument(String::from(
                "entropy arguments must be disjoint",
            )));
        }
        if a.is_empty() {
            return Ok(0.0);
        }
        Ok(self.joint_entropy(a.union(b)) - self.joint_entropy(b))
    }

    /// Conditional mutual information `I(A; B | C)` in bits.
    pub fn mutual_info(&self, a: VarSet, b: VarSet, c: VarSet) -> Result<f64> {
        if a.intersects(b) || a.intersects(c) || b.intersects(c) {
            return Err(Error::Argument(String::from(
                "mutual information arguments must be pairwise disjoint",
            )));
        }
        Ok(self.entropy(a, c)? - self.entropy(a, b.union(c))?)
    }
}
