//! Entropy engine against independent direct-summation oracles.
//!
//! The oracles below work straight off the raw probability table with
//! nested index arithmetic and never call the engine's marginalization
//! path, so agreement is evidence rather than tautology.

use bcregion_core::dist::{JointDistribution, Var, VarSet};
use bcregion_core::rng::Rng;

/// A random joint distribution over `dims` variables.
fn random_joint(dims: &[usize], rng: &mut Rng) -> JointDistribution {
    let cells: usize = dims.iter().product();
    let probs = rng.simplex_point(cells);
    let vars: Vec<(Var, usize)> = dims
        .iter()
        .enumerate()
        .map(|(i, &a)| (Var::Output(i as u8 + 1), a))
        .collect();
    JointDistribution::from_raw(dims.len(), vars, probs).unwrap()
}

/// Digits of `cell` in the mixed-radix system of `dims` (last fastest).
fn digits_of(mut cell: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; dims.len()];
    for i in (0..dims.len()).rev() {
        out[i] = cell % dims[i];
        cell /= dims[i];
    }
    out
}

/// Oracle: H(A | B) = -sum p(a,b) log2 p(a,b)/p(b), accumulated per cell
/// group through explicit digit matching.
fn oracle_cond_entropy(d: &JointDistribution, a: &[usize], b: &[usize]) -> f64 {
    let dims: Vec<usize> = d.vars().iter().map(|&(_, n)| n).collect();
    let probs = d.probs();
    let key = |cell: usize, vars: &[usize]| -> Vec<usize> {
        let dg = digits_of(cell, &dims);
        vars.iter().map(|&v| dg[v]).collect()
    };
    // p(a, b) and p(b) by brute-force accumulation into keyed maps.
    let mut p_ab: std::collections::HashMap<(Vec<usize>, Vec<usize>), f64> =
        std::collections::HashMap::new();
    let mut p_b: std::collections::HashMap<Vec<usize>, f64> = std::collections::HashMap::new();
    for (cell, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        *p_ab.entry((key(cell, a), key(cell, b))).or_insert(0.0) += p;
        *p_b.entry(key(cell, b)).or_insert(0.0) += p;
    }
    let mut h = 0.0;
    for ((_, kb), &pab) in &p_ab {
        if pab > 0.0 {
            h -= pab * (pab / p_b[kb]).log2();
        }
    }
    h
}

/// Oracle: I(A;B|C) = sum p(abc) log2( p(c) p(abc) / (p(ac) p(bc)) ).
fn oracle_cond_mi(d: &JointDistribution, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
    let dims: Vec<usize> = d.vars().iter().map(|&(_, n)| n).collect();
    let probs = d.probs();
    let key = |cell: usize, vars: &[usize]| -> Vec<usize> {
        let dg = digits_of(cell, &dims);
        vars.iter().map(|&v| dg[v]).collect()
    };
    use std::collections::HashMap;
    let mut p_abc: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut p_ac: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut p_bc: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut p_c: HashMap<Vec<usize>, f64> = HashMap::new();
    let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
    let ac: Vec<usize> = a.iter().chain(c).copied().collect();
    let bc: Vec<usize> = b.iter().chain(c).copied().collect();
    for (cell, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        *p_abc.entry(key(cell, &abc)).or_insert(0.0) += p;
        *p_ac.entry(key(cell, &ac)).or_insert(0.0) += p;
        *p_bc.entry(key(cell, &bc)).or_insert(0.0) += p;
        *p_c.entry(key(cell, c)).or_insert(0.0) += p;
    }
    let mut mi = 0.0;
    for (cell, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        // Sum over the joint, weighting each abc group once per cell share.
        let pabc = p_abc[&key(cell, &abc)];
        let pac = p_ac[&key(cell, &ac)];
        let pbc = p_bc[&key(cell, &bc)];
        let pc = if c.is_empty() {
            1.0
        } else {
            p_c[&key(cell, c)]
        };
        mi += p * (pc * pabc / (pac * pbc)).log2();
    }
    mi
}

fn varset(d: &JointDistribution, idxs: &[usize]) -> VarSet {
    let mut s = VarSet::EMPTY;
    for &i in idxs {
        s = s.with(i);
    }
    let _ = d;
    s
}

/// Random split of the variable indices into three disjoint groups (any may
/// be empty except the first).
fn random_split(n_vars: usize, rng: &mut Rng) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    loop {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut c = Vec::new();
        for v in 0..n_vars {
            match rng.below(4) {
                0 => a.push(v),
                1 => b.push(v),
                2 => c.push(v),
                _ => {}
            }
        }
        if !a.is_empty() && !b.is_empty() {
            return (a, b, c);
        }
    }
}

#[test]
fn conditional_entropy_matches_direct_summation() {
    let mut rng = Rng::new(0x5eed_0001);
    for round in 0..120 {
        let n_vars = 2 + rng.below(4); // up to 5 variables
        let dims: Vec<usize> = (0..n_vars).map(|_| 2 + rng.below(3)).collect(); // up to 4
        let d = random_joint(&dims, &mut rng);
        let (a, b, _) = random_split(n_vars, &mut rng);
        let got = d.entropy(varset(&d, &a), varset(&d, &b)).unwrap();
        let want = oracle_cond_entropy(&d, &a, &b);
        assert!(
            (got - want).abs() <= 1e-12,
            "round {round}: H={got} oracle={want}"
        );
    }
}

#[test]
fn conditional_mi_matches_direct_summation() {
    let mut rng = Rng::new(0x5eed_0002);
    for round in 0..120 {
        let n_vars = 2 + rng.below(4);
        let dims: Vec<usize> = (0..n_vars).map(|_| 2 + rng.below(3)).collect();
        let d = random_joint(&dims, &mut rng);
        let (a, b, c) = random_split(n_vars, &mut rng);
        let got = d
            .mutual_info(varset(&d, &a), varset(&d, &b), varset(&d, &c))
            .unwrap();
        let want = oracle_cond_mi(&d, &a, &b, &c);
        assert!(
            (got - want).abs() <= 1e-12,
            "round {round}: I={got} oracle={want}"
        );
    }
}

#[test]
fn chain_rule_and_conditioning_properties() {
    let mut rng = Rng::new(0x5eed_0003);
    for round in 0..100 {
        let n_vars = 3 + rng.below(3);
        let dims: Vec<usize> = (0..n_vars).map(|_| 2 + rng.below(3)).collect();
        let d = random_joint(&dims, &mut rng);
        let (a, b, c) = random_split(n_vars, &mut rng);
        let (sa, sb, sc) = (varset(&d, &a), varset(&d, &b), varset(&d, &c));
        // Chain rule: H(AB|C) = H(A|C) + H(B|AC).
        let lhs = d.entropy(sa.union(sb), sc).unwrap();
        let rhs = d.entropy(sa, sc).unwrap() + d.entropy(sb, sa.union(sc)).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10, "round {round}: chain rule");
        // Conditioning reduces entropy: H(A|BC) <= H(A|C).
        let more = d.entropy(sa, sb.union(sc)).unwrap();
        let less = d.entropy(sa, sc).unwrap();
        assert!(more <= less + 1e-12, "round {round}: conditioning");
        // Symmetry: I(A;B|C) = I(B;A|C).
        let iab = d.mutual_info(sa, sb, sc).unwrap();
        let iba = d.mutual_info(sb, sa, sc).unwrap();
        assert!((iab - iba).abs() <= 1e-12, "round {round}: symmetry");
        assert!(iab >= -1e-12, "round {round}: nonnegativity");
    }
}

/// Independent construction of the joint table by explicit triple loop over
/// auxiliary cells, input symbols, and output tuples.
#[test]
fn build_joint_matches_triple_loop_oracle() {
    use bcregion_core::dist::ModelSpec;
    let mut rng = Rng::new(0x5eed_0004);
    for _ in 0..20 {
        let k = 2;
        let aux_alphabets = vec![1 + rng.below(2), 2, 1 + rng.below(3)];
        let aux_space: usize = aux_alphabets.iter().product();
        let x_alphabet = 2 + rng.below(2);
        let y_alphabets = vec![2, 1 + rng.below(2)];
        let y_space: usize = y_alphabets.iter().product();
        let mut channel = Vec::new();
        for _ in 0..x_alphabet {
            channel.extend(rng.simplex_point(y_space));
        }
        let spec = ModelSpec {
            k_total: k,
            aux_alphabets: aux_alphabets.clone(),
            aux_pmf: rng.simplex_point(aux_space),
            symbol_map: (0..aux_space).map(|_| rng.below(x_alphabet)).collect(),
            x_alphabet,
            y_alphabets: y_alphabets.clone(),
            channel: channel.clone(),
        };
        let d = spec.build_joint().unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);

        // Oracle table, same layout by construction of the loops.
        let mut oracle = Vec::with_capacity(aux_space * x_alphabet * y_space);
        for u in 0..aux_space {
            for x in 0..x_alphabet {
                for y in 0..y_space {
                    let ind = if spec.symbol_map[u] == x { 1.0 } else { 0.0 };
                    oracle.push(spec.aux_pmf[u] * ind * channel[x * y_space + y]);
                }
            }
        }
        for (got, want) in d.probs().iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-14, "cell mismatch");
        }

        // Marginalizing X and the outputs back out reproduces aux_pmf.
        let n_aux = aux_alphabets.len();
        let aux_vars = varset(&d, &(0..n_aux).collect::<Vec<_>>());
        let marg = d.marginal(aux_vars);
        for (got, want) in marg.iter().zip(&spec.aux_pmf) {
            assert!((got - want).abs() <= 1e-14, "aux marginal drifted");
        }
    }
}
