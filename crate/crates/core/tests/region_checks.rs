//! Cross-checks of the constraint generators and LP machinery against
//! independent oracles: a literal term-by-term transcription of the
//! closed-form bound, brute-force vertex enumeration for support values,
//! the split-rate projection experiment, and the degeneracy to the classic
//! three-user scheme with a common cloud center.

use bcregion_core::constraints::{closed_form_bound, closed_form_system, three_receiver_system};
use bcregion_core::dist::{JointDistribution, ModelSpec, Var, VarSet};
use bcregion_core::region::{membership, projected_support, support};
use bcregion_core::rng::Rng;
use bcregion_core::setfam::{aux_family_of, decomp_block, decomp_block_level, upper_level_family};
use bcregion_core::simplex::LpStatus;
use bcregion_core::subset::{all_subsets, orderings, ReceiverOrder, Subset, SubsetFamily};

fn random_binary_model(k: usize, rng: &mut Rng) -> ModelSpec {
    let n_subsets = (1usize << k) - 1;
    let aux_space = 1usize << n_subsets;
    let y_space = 1usize << k;
    let mut channel = Vec::with_capacity(2 * y_space);
    for _ in 0..2 {
        channel.extend(rng.simplex_point(y_space));
    }
    ModelSpec {
        k_total: k,
        aux_alphabets: vec![2; n_subsets],
        aux_pmf: rng.simplex_point(aux_space),
        symbol_map: (0..aux_space).map(|_| rng.below(2)).collect(),
        x_alphabet: 2,
        y_alphabets: vec![2; k],
        channel,
    }
}

/// Random binary model biased toward operable pmfs: tempered auxiliary pmf
/// (halved conditional correlations) and channels mixed toward the clean
/// copy corner. Weak channels with strongly correlated auxiliaries make the
/// covering demands exceed the packing budgets, which empties the
/// split-rate system; these settings keep that corner rare.
fn operable_binary_model(k: usize, rng: &mut Rng, mix: f64) -> ModelSpec {
    let mut m = random_binary_model(k, rng);
    let u = 1.0 / m.aux_pmf.len() as f64;
    for p in &mut m.aux_pmf {
        *p = 0.5 * *p + 0.5 * u;
    }
    let y_space = 1usize << k;
    for x in 0..2usize {
        let clean = if x == 0 { 0 } else { y_space - 1 };
        for y in 0..y_space {
            let cell = &mut m.channel[x * y_space + y];
            *cell = mix * if y == clean { 1.0 } else { 0.0 } + (1.0 - mix) * *cell;
        }
    }
    m
}

fn aux_vars(d: &JointDistribution, fam: &SubsetFamily) -> VarSet {
    d.aux_set(fam).unwrap()
}

fn single(d: &JointDistribution, s: Subset) -> VarSet {
    VarSet::EMPTY.with(d.var_index(Var::Aux(s)).unwrap())
}

/// Literal transcription of the closed-form bound, assembled block by block
/// and level by level with no shared code path beyond the entropy engine:
/// for each block `i`, `sum_{S in block} H(U_S | U(supersets of S)) -
/// H(U(block) | Y_head, U(A(head) \ block))`; then for each level `l`,
/// `H(U(level slice of the block union) | U(levels above l)) - sum_{S in
/// slice} H(U_S | U(supersets of S))`.
fn closed_form_oracle(d: &JointDistribution, t: Subset, pi: &ReceiverOrder) -> f64 {
    let k = d.k_total();
    let mut total = 0.0;
    for i in 0..pi.len() {
        let head = pi.seq()[i];
        let block = decomp_block(t, pi, i, k).unwrap();
        let mut sum_h = 0.0;
        for s in block.iter() {
            let parents = aux_family_of(*s, k)
                .unwrap()
                .minus(&SubsetFamily::from_vec(vec![*s]));
            sum_h += d.entropy(single(d, *s), aux_vars(d, &parents)).unwrap();
        }
        let a_head = aux_family_of(Subset::singleton(head).unwrap(), k).unwrap();
        let cond = d
            .output_set(head)
            .unwrap()
            .union(aux_vars(d, &a_head.minus(&block)));
        total += sum_h - d.entropy(aux_vars(d, &block), cond).unwrap();
    }
    for l in 1..k {
        let mut slice = SubsetFamily::empty();
        for i in 0..pi.len() {
            slice = slice.union(&decomp_block_level(t, pi, i, l, k).unwrap());
        }
        if slice.is_empty() {
            continue;
        }
        let above = aux_vars(d, &upper_level_family(l, k).unwrap());
        let joint = d.entropy(aux_vars(d, &slice), above).unwrap();
        let mut sum_h = 0.0;
        for s in slice.iter() {
            let parents = aux_family_of(*s, k)
                .unwrap()
                .minus(&SubsetFamily::from_vec(vec![*s]));
            sum_h += d.entropy(single(d, *s), aux_vars(d, &parents)).unwrap();
        }
        total += joint - sum_h;
    }
    total
}

#[test]
fn closed_form_bound_matches_literal_transcription() {
    for seed in 0..12u64 {
        let mut rng = Rng::new(0xab0 + seed);
        let k = 2 + (seed % 2) as usize;
        let d = random_binary_model(k, &mut rng).build_joint().unwrap();
        for t in all_subsets(k) {
            for pi in orderings(t) {
                let got = closed_form_bound(&d, t, &pi).unwrap();
                let want = closed_form_oracle(&d, t, &pi);
                assert!(
                    (got - want).abs() < 1e-10,
                    "seed {seed} t={t:?} pi={pi:?}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn closed_form_matches_literal_transcription_on_four_receivers() {
    // Mixed alphabets keep the joint small while exercising the four-block
    // assembly (orderings up to length 4, levels up to 3).
    for seed in 0..4u64 {
        let mut rng = Rng::new(0xab4 + seed);
        let subsets = all_subsets(4);
        let live = [
            Subset::from_elems(&[1]).unwrap(),
            Subset::from_elems(&[1, 2]).unwrap(),
            Subset::from_elems(&[3, 4]).unwrap(),
            Subset::from_elems(&[1, 2, 3]).unwrap(),
            Subset::from_elems(&[1, 2, 3, 4]).unwrap(),
        ];
        let aux_alphabets: Vec<usize> = subsets
            .iter()
            .map(|s| if live.contains(s) { 2 } else { 1 })
            .collect();
        let aux_space: usize = aux_alphabets.iter().product();
        let y_space = 16;
        let mut channel = Vec::new();
        for x in 0..2usize {
            let noise = rng.simplex_point(y_space);
            let clean = if x == 0 { 0 } else { y_space - 1 };
            for (y, n) in noise.iter().enumerate() {
                channel.push(0.5 * if y == clean { 1.0 } else { 0.0 } + 0.5 * n);
            }
        }
        let d = ModelSpec {
            k_total: 4,
            aux_alphabets,
            aux_pmf: rng.simplex_point(aux_space),
            symbol_map: (0..aux_space).map(|_| rng.below(2)).collect(),
            x_alphabet: 2,
            y_alphabets: vec![2; 4],
            channel,
        }
        .build_joint()
        .unwrap();
        for t in all_subsets(4) {
            for pi in orderings(t) {
                let got = closed_form_bound(&d, t, &pi).unwrap();
                let want = closed_form_oracle(&d, t, &pi);
                assert!(
                    (got - want).abs() < 1e-10,
                    "seed {seed} t={t:?} pi={pi:?}: {got} vs {want}"
                );
            }
        }
    }
}

/// Brute-force support oracle: enumerate candidate vertices from all
/// combinations of `dim` active constraints (inequalities plus axes), solve
/// the square system by Gaussian elimination, keep feasible points, and
/// maximize the objective over them.
fn vertex_support_oracle(rows: &[(Vec<f64>, f64)], dim: usize, w: &[f64]) -> f64 {
    // All constraints as a.x = b candidates, including x_i = 0 axes.
    let mut all: Vec<(Vec<f64>, f64)> = rows.to_vec();
    for i in 0..dim {
        let mut a = vec![0.0; dim];
        a[i] = 1.0;
        all.push((a, 0.0));
    }
    let feasible = |x: &[f64]| -> bool {
        if x.iter().any(|&v| v < -1e-9) {
            return false;
        }
        rows.iter()
            .all(|(a, b)| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() <= b + 1e-9)
    };
    let mut best = f64::NEG_INFINITY;
    let n = all.len();
    let mut pick = vec![0usize; dim];
    fn combos(
        n: usize,
        k: usize,
        start: usize,
        pick: &mut Vec<usize>,
        depth: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == k {
            out.push(pick[..k].to_vec());
            return;
        }
        for i in start..n {
            pick[depth] = i;
            combos(n, k, i + 1, pick, depth + 1, out);
        }
    }
    let mut sets = Vec::new();
    combos(n, dim, 0, &mut pick, 0, &mut sets);
    for set in sets {
        // Solve the dim x dim system.
        let mut m: Vec<Vec<f64>> = set
            .iter()
            .map(|&i| {
                let mut row = all[i].0.clone();
                row.push(all[i].1);
                row
            })
            .collect();
        let mut ok = true;
        for col in 0..dim {
            let piv = (col..dim)
                .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
                .unwrap();
            if m[piv][col].abs() < 1e-10 {
                ok = false;
                break;
            }
            m.swap(col, piv);
            let div = m[col][col];
            for j in col..=dim {
                m[col][j] /= div;
            }
            for r in 0..dim {
                if r != col && m[r][col] != 0.0 {
                    let f = m[r][col];
                    for j in col..=dim {
                        m[r][j] -= f * m[col][j];
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let x: Vec<f64> = (0..dim).map(|i| m[i][dim]).collect();
        if feasible(&x) {
            let val = w.iter().zip(&x).map(|(wi, xi)| wi * xi).sum::<f64>();
            if val > best {
                best = val;
            }
        }
    }
    best
}

#[test]
fn support_matches_vertex_enumeration() {
    for seed in 0..6u64 {
        let mut rng = Rng::new(0xbee + seed);
        let d = random_binary_model(3, &mut rng).build_joint().unwrap();
        let sys = closed_form_system(&d).unwrap();
        let rows: Vec<(Vec<f64>, f64)> = sys
            .inequalities
            .iter()
            .map(|ineq| {
                let mut a = vec![0.0; 3];
                for (v, c) in &ineq.coeffs {
                    a[sys.var_position(v).unwrap()] += c;
                }
                (a, ineq.bound)
            })
            .collect();
        for wseed in 0..5u64 {
            let mut wr = Rng::new(1000 * seed + wseed);
            let w = wr.nonneg_direction(3);
            let got = support(&sys, &w).unwrap();
            assert_eq!(got.status, LpStatus::Optimal);
            let want = vertex_support_oracle(&rows, 3, &w);
            assert!(
                (got.value - want).abs() < 1e-8,
                "seed {seed}/{wseed}: lp {} vs vertices {}",
                got.value,
                want
            );
            assert!(membership(&sys, &got.witness).unwrap());
        }
    }
}

#[test]
fn projection_equals_closed_form_on_two_receivers() {
    // The elimination experiment at smoke scale: wherever the split-rate
    // system is feasible, its projection and the closed form must agree
    // direction by direction. Infeasible models (covering demand beyond the
    // packing budgets) are counted, not compared: there the closed form
    // clamps to the origin by convention while the scheme itself is
    // inoperable.
    let mut worst: f64 = 0.0;
    let mut feasible = 0usize;
    let mut degenerate = 0usize;
    for seed in 0..20u64 {
        let mut rng = Rng::new(0xe11 + seed);
        let d = operable_binary_model(2, &mut rng, 0.65)
            .build_joint()
            .unwrap();
        let sys = closed_form_system(&d).unwrap();
        let mut dir_rng = Rng::new(0xd1e + seed);
        let probe = projected_support(&d, &[1.0, 1.0]).unwrap();
        if probe.status == LpStatus::Infeasible {
            degenerate += 1;
            continue;
        }
        feasible += 1;
        for _ in 0..6 {
            let w = dir_rng.nonneg_direction(2);
            let cf = support(&sys, &w).unwrap();
            let pj = projected_support(&d, &w).unwrap();
            assert_eq!(cf.status, LpStatus::Optimal);
            assert_eq!(pj.status, LpStatus::Optimal);
            let gap = (pj.value - cf.value).abs();
            if gap > worst {
                worst = gap;
            }
            assert!(
                gap <= 1e-6,
                "seed {seed}: projection {} vs closed form {}",
                pj.value,
                cf.value
            );
        }
    }
    assert!(feasible >= 10, "generator produced too few operable models");
    println!(
        "two-receiver elimination: {feasible} feasible ({degenerate} degenerate), worst |gap| = {worst:.3e}"
    );
}

#[test]
fn projection_axis_directions_match_closed_form_support() {
    // Along an axis the projection equals the closed-form support, which is
    // the minimum of the single-receiver bound and every sum bound (the
    // other rates can sit at zero); the single-receiver bound alone is not
    // the right comparison when a sum bound is smaller.
    let mut checked = 0usize;
    for seed in 0..10u64 {
        let mut rng = Rng::new(0xe22 + seed);
        let d = operable_binary_model(2, &mut rng, 0.65)
            .build_joint()
            .unwrap();
        if projected_support(&d, &[1.0, 1.0]).unwrap().status == LpStatus::Infeasible {
            continue;
        }
        checked += 1;
        let sys = closed_form_system(&d).unwrap();
        for k in 1..=2u8 {
            let mut w = vec![0.0; 2];
            w[k as usize - 1] = 1.0;
            let pj = projected_support(&d, &w).unwrap();
            let cf = support(&sys, &w).unwrap();
            assert!(
                (pj.value - cf.value).abs() < 1e-7,
                "seed {seed} k={k}: {} vs {}",
                pj.value,
                cf.value
            );
            // When no sum bound undercuts it, the single-receiver bound is
            // that support value.
            let t = Subset::singleton(k).unwrap();
            let pi = ReceiverOrder::new(vec![k]).unwrap();
            let single = closed_form_bound(&d, t, &pi).unwrap().max(0.0);
            assert!(pj.value <= single + 1e-9);
        }
    }
    assert!(checked >= 5, "too few operable models");
}

/// Classic three-user region with one cloud center `U_0 = U_123` and three
/// satellites, coded directly from its standard statement.
fn classic_three_user_bounds(d: &JointDistribution) -> [f64; 9] {
    let u0 = single(d, Subset::from_elems(&[1, 2, 3]).unwrap());
    let u: Vec<VarSet> = (1..=3u8)
        .map(|k| single(d, Subset::singleton(k).unwrap()))
        .collect();
    let y: Vec<VarSet> = (1..=3u8).map(|k| d.output_set(k).unwrap()).collect();
    let mi = |a: VarSet, b: VarSet, c: VarSet| d.mutual_info(a, b, c).unwrap();
    let none = VarSet::EMPTY;
    let sat = |i: usize| mi(u[i], y[i], u0);
    let r1 = mi(u[0].union(u0), y[0], none);
    let r2 = mi(u[1].union(u0), y[1], none);
    let r3 = mi(u[2].union(u0), y[2], none);
    let cloud = |i: usize| mi(u0, y[i], none);
    let pair = |i: usize, j: usize| cloud(i).min(cloud(j)) + sat(i) + sat(j) - mi(u[i], u[j], u0);
    let excess3 = mi(u[0], u[1], u0) + mi(u[0].union(u[1]), u[2], u0);
    let sum = |i: usize, j: usize| cloud(i).min(cloud(j)) + sat(0) + sat(1) + sat(2) - excess3;
    [
        r1,
        r2,
        r3,
        pair(0, 1),
        pair(0, 2),
        pair(1, 2),
        sum(0, 1),
        sum(0, 2),
        sum(1, 2),
    ]
}

#[test]
fn degenerate_pairs_reduce_to_classic_three_user_region() {
    // Pair auxiliaries pinned to alphabet 1: each folded bound must equal
    // the classic expression with cloud center U_123.
    for seed in 0..10u64 {
        let mut rng = Rng::new(0xdeb + seed);
        // Random model over (U_1, U_2, U_3, U_123) with pairs constant.
        let aux_alphabets = vec![2, 2, 2, 1, 1, 1, 2];
        let aux_space: usize = aux_alphabets.iter().product();
        let y_space = 8;
        let mut channel = Vec::new();
        for _ in 0..2 {
            channel.extend(rng.simplex_point(y_space));
        }
        let spec = ModelSpec {
            k_total: 3,
            aux_alphabets,
            aux_pmf: rng.simplex_point(aux_space),
            symbol_map: (0..aux_space).map(|_| rng.below(2)).collect(),
            x_alphabet: 2,
            y_alphabets: vec![2, 2, 2],
            channel,
        };
        let d = spec.build_joint().unwrap();
        let sys = three_receiver_system(&d).unwrap();
        let classic = classic_three_user_bounds(&d);
        for (ineq, want) in sys.inequalities.iter().zip(&classic) {
            let want = want.max(0.0);
            assert!(
                (ineq.bound - want).abs() < 1e-10,
                "seed {seed} {:?}: {} vs classic {}",
                ineq.provenance,
                ineq.bound,
                want
            );
        }
    }
}

/// Three-receiver projection experiment. Whether the split-rate system
/// projects exactly onto the closed form is an open question at K = 3; this
/// test asserts only the provable direction (the projection never exceeds
/// the closed form) and prints any measured shortfall as findings. Observed
/// behavior: strict shortfalls up to a few millibits exist for some
/// operable pmfs, certified below by showing the closed-form witness is not
/// realizable by any split assignment.
#[test]
fn three_receiver_projection_experiment() {
    let mut findings = 0usize;
    let mut checked = 0usize;
    for seed in 0..25u64 {
        let mut rng = Rng::new(0x31e + seed);
        let spec = {
            let mut m = random_binary_model(3, &mut rng);
            // Informative channels and a tempered pmf keep most models
            // operable (the experiment needs a feasible split system).
            let u = 1.0 / m.aux_pmf.len() as f64;
            for p in &mut m.aux_pmf {
                *p = 0.5 * *p + 0.5 * u;
            }
            let y_space = 8;
            for x in 0..2usize {
                let clean = if x == 0 { 0 } else { y_space - 1 };
                for y in 0..y_space {
                    let cell = &mut m.channel[x * y_space + y];
                    *cell = 0.65 * if y == clean { 1.0 } else { 0.0 } + 0.35 * *cell;
                }
            }
            m
        };
        let d = spec.build_joint().unwrap();
        let sys = closed_form_system(&d).unwrap();
        let mut dir_rng = Rng::new(0x13e + seed);
        for _ in 0..6 {
            let w = dir_rng.nonneg_direction(3);
            let pj = projected_support(&d, &w).unwrap();
            if pj.status != LpStatus::Optimal {
                continue;
            }
            checked += 1;
            let cf = support(&sys, &w).unwrap();
            // Provable direction: every split point obeys the closed form.
            assert!(
                pj.value <= cf.value + 1e-9,
                "seed {seed}: projection {} above closed form {}",
                pj.value,
                cf.value
            );
            let shortfall = cf.value - pj.value;
            if shortfall > 1e-6 {
                findings += 1;
                // Certify: the closed-form witness has no split preimage.
                let split = bcregion_core::region::SplitSystem::new(&d).unwrap();
                let mut rows = split.rows.clone();
                for k in 1..=3u8 {
                    let mut coeffs = vec![0.0; split.variables.len()];
                    for (i, v) in split.variables.iter().enumerate() {
                        if let bcregion_core::constraints::RateVar::SplitRate(r, _) = v {
                            if *r == k {
                                coeffs[i] = 1.0;
                            }
                        }
                    }
                    rows.push(bcregion_core::simplex::LpRow {
                        coeffs,
                        sense: bcregion_core::simplex::Sense::Ge,
                        rhs: cf.witness[k as usize - 1] - 1e-7,
                    });
                }
                let fiber =
                    bcregion_core::simplex::maximize(&vec![0.0; split.variables.len()], &rows)
                        .unwrap();
                assert_eq!(
                    fiber.status,
                    LpStatus::Infeasible,
                    "seed {seed}: shortfall without certificate"
                );
                println!(
                    "finding: seed {seed} dir {:?}: closed form exceeds projection by {shortfall:.6} bits (certified)",
                    w
                );
            }
        }
    }
    println!(
        "three-receiver projection: {checked} directions checked, {findings} certified shortfalls"
    );
}

#[test]
fn three_receiver_support_matches_closed_form_smoke() {
    for seed in 0..5u64 {
        let mut rng = Rng::new(0xc0f + seed);
        let d = random_binary_model(3, &mut rng).build_joint().unwrap();
        let a = three_receiver_system(&d).unwrap();
        let b = closed_form_system(&d).unwrap();
        let mut dir_rng = Rng::new(0x0dd + seed);
        for _ in 0..10 {
            let w = dir_rng.nonneg_direction(3);
            let va = support(&a, &w).unwrap().value;
            let vb = support(&b, &w).unwrap().value;
            assert!(
                (va - vb).abs() <= 1e-9,
                "seed {seed}: folded {va} vs full {vb}"
            );
        }
    }
}
