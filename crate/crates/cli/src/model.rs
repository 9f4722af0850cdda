//! Model file schema and canonical serialization.
//!
//! A model is one JSON document:
//!
//! ```json
//! {
//!   "k": 2,
//!   "aux": {"1": 2, "2": 2, "12": 2},
//!   "pmf": [ ... ],
//!   "f": [ ... ],
//!   "x_alphabet": 2,
//!   "y_alphabets": [2, 2],
//!   "channel": [ ... ]
//! }
//! ```
//!
//! `aux` must name every nonempty receiver subset exactly once (digit
//! strings for `k <= 9`, comma-separated otherwise). `pmf` and `f` are flat
//! over the product of auxiliary alphabets in canonical subset order with
//! the last subset varying fastest. `channel` is flat with index
//! `x * prod|Y_k| + mixed_radix(y_1..y_K)`, `y_K` fastest. The `--normalize`
//! flag re-emits this exact layout with canonical key order, so normalized
//! files are byte-reproducible.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use bcregion_core::dist::ModelSpec;
use bcregion_core::subset::{all_subsets, Subset};
use bcregion_core::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub k: usize,
    pub aux: BTreeMap<String, usize>,
    pub pmf: Vec<f64>,
    pub f: Vec<usize>,
    pub x_alphabet: usize,
    pub y_alphabets: Vec<usize>,
    pub channel: Vec<f64>,
}

pub fn load_model(path: &str) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {path}: {e}")))?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let file: ModelFile = serde_json::from_str(text)
        .map_err(|e| Error::Validation(format!("model parse error: {e}")))?;
    let subsets = all_subsets(file.k);
    if file.aux.len() != subsets.len() {
        return Err(Error::Validation(format!(
            "aux names {} subsets, expected {}",
            file.aux.len(),
            subsets.len()
        )));
    }
    let mut aux_alphabets = Vec::with_capacity(subsets.len());
    for s in &subsets {
        let key = s.format(file.k);
        match file.aux.get(&key) {
            Some(&a) => aux_alphabets.push(a),
            None => {
                return Err(Error::Validation(format!(
                    "aux is missing subset \"{key}\""
                )))
            }
        }
    }
    for key in file.aux.keys() {
        // Also rejects malformed or out-of-range subset names.
        let s = Subset::parse(key, file.k)?;
        debug_assert!(subsets.contains(&s));
    }
    let spec = ModelSpec {
        k_total: file.k,
        aux_alphabets,
        aux_pmf: file.pmf,
        symbol_map: file.f,
        x_alphabet: file.x_alphabet,
        y_alphabets: file.y_alphabets,
        channel: file.channel,
    };
    spec.validate()?;
    Ok(spec)
}

fn push_float(out: &mut String, x: f64) {
    // Shortest form that parses back to the same f64.
    if x == x.trunc() && x.abs() < 1e15 {
        let _ = write!(out, "{:.1}", x);
    } else {
        let _ = write!(out, "{}", x);
    }
}

fn push_float_list(out: &mut String, xs: &[f64]) {
    out.push('[');
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_float(out, x);
    }
    out.push(']');
}

/// Canonical JSON form: fixed key order, auxiliary subsets in canonical
/// order, shortest round-trip floats.
pub fn normalize_model(spec: &ModelSpec) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = write!(out, "  \"k\": {},\n", spec.k_total);
    out.push_str("  \"aux\": {");
    for (i, (s, a)) in spec.subsets().iter().zip(&spec.aux_alphabets).enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "\"{}\": {}", s.format(spec.k_total), a);
    }
    out.push_str("},\n");
    out.push_str("  \"pmf\": ");
    push_float_list(&mut out, &spec.aux_pmf);
    out.push_str(",\n  \"f\": [");
    for (i, x) in spec.symbol_map.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{x}");
    }
    out.push_str("],\n");
    let _ = write!(out, "  \"x_alphabet\": {},\n", spec.x_alphabet);
    out.push_str("  \"y_alphabets\": [");
    for (i, y) in spec.y_alphabets.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{y}");
    }
    out.push_str("],\n  \"channel\": ");
    push_float_list(&mut out, &spec.channel);
    out.push_str("\n}\n");
    out
}
