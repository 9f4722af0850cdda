//! Command implementations.

use std::process::ExitCode;

use bcregion_core::constraints::{
    closed_form_system, three_receiver_system, RateInequality, RegionSystem, Sense,
};
use bcregion_core::dist::ModelSpec;
use bcregion_core::mcsim::{estimate_cover_failure, CoverTrialConfig};
use bcregion_core::region::{compare_regions, optimize_pmf, projected_support};
use bcregion_core::setfam::verify_decomposition;
use bcregion_core::simplex::{LpOutcome, LpStatus};
use bcregion_core::subset::{ReceiverOrder, Subset};
use bcregion_core::{Error, Result};

use crate::model::{load_model, normalize_model};
use crate::render;
use crate::Format;

fn parse_receiver_list(text: &str, what: &str) -> Result<Vec<u8>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u8>()
                .map_err(|_| Error::Argument(format!("{what}: bad receiver '{part}'")))
        })
        .collect()
}

fn parse_weights(text: &str, k: usize) -> Result<Vec<f64>> {
    let w: Vec<f64> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad weight '{part}'")))
        })
        .collect::<Result<_>>()?;
    if w.len() != k {
        return Err(Error::Argument(format!(
            "expected {k} weights, got {}",
            w.len()
        )));
    }
    Ok(w)
}

pub fn decompose(k: usize, t_text: &str, pi_text: &str) -> Result<ExitCode> {
    let t = Subset::from_elems(&parse_receiver_list(t_text, "--t")?)?;
    let pi = ReceiverOrder::new(parse_receiver_list(pi_text, "--pi")?)?;
    let report = verify_decomposition(t, &pi, k)?;
    for (i, block) in report.blocks.iter().enumerate() {
        println!("block {i}: {}", block.format(k));
    }
    for v in &report.violations {
        println!("violation: {v}");
    }
    println!("verified: {}", report.ok);
    Ok(if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

pub fn validate(path: &str, normalize: bool) -> Result<ExitCode> {
    let spec = load_model(path)?;
    if normalize {
        print!("{}", normalize_model(&spec));
    } else {
        println!(
            "ok: k={} aux_space={} x_alphabet={}",
            spec.k_total,
            spec.aux_space(),
            spec.x_alphabet
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn print_system(sys: &RegionSystem, format: Format) {
    for ineq in &sys.inequalities {
        print_inequality(sys, ineq, format);
    }
    if format == Format::Human {
        for (prov, raw) in &sys.clamped {
            println!(
                "note: bound {} clamped to zero (raw {})",
                prov.format(sys.k_total),
                render::bits(format, *raw)
            );
        }
    }
}

/// One record per inequality: provenance tag, dense coefficient list in the
/// system's canonical variable order, sense, bound.
fn print_inequality(sys: &RegionSystem, ineq: &RateInequality, format: Format) {
    let k = sys.k_total;
    let sense = match ineq.sense {
        Sense::Le => "<=",
        Sense::Ge => ">=",
    };
    match format {
        Format::Human => {
            let lhs = ineq
                .coeffs
                .iter()
                .map(|(v, _)| v.format(k))
                .collect::<Vec<_>>()
                .join(" + ");
            println!(
                "{lhs} {sense} {}  [{}]",
                render::bits(format, ineq.bound),
                ineq.provenance.format(k)
            );
        }
        Format::Machine => {
            let mut dense = vec![0.0f64; sys.variables.len()];
            for (v, c) in &ineq.coeffs {
                dense[sys.var_position(v).expect("declared variable")] += c;
            }
            let coeffs = dense
                .iter()
                .map(|c| format!("{}", *c as i64))
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "{}\t{coeffs}\t{sense}\t{}",
                ineq.provenance.format(k),
                render::bits(format, ineq.bound)
            );
        }
    }
}

pub fn region(path: &str, format: Format) -> Result<ExitCode> {
    let d = load_model(path)?.build_joint()?;
    let sys = closed_form_system(&d)?;
    print_system(&sys, format);
    Ok(ExitCode::SUCCESS)
}

pub fn corollary3(path: &str, format: Format) -> Result<ExitCode> {
    let d = load_model(path)?.build_joint()?;
    let sys = three_receiver_system(&d)?;
    print_system(&sys, format);
    Ok(ExitCode::SUCCESS)
}

fn print_lp_outcome(out: &LpOutcome, format: Format) -> ExitCode {
    match out.status {
        LpStatus::Optimal => {
            println!("status: optimal");
            println!("value: {}", render::bits(format, out.value));
            println!("witness: {}", render::vector(format, &out.witness));
            ExitCode::SUCCESS
        }
        LpStatus::Infeasible => {
            println!("status: infeasible");
            ExitCode::FAILURE
        }
        LpStatus::Unbounded => {
            println!("status: unbounded");
            ExitCode::FAILURE
        }
    }
}

pub fn support(path: &str, weights: &str, format: Format) -> Result<ExitCode> {
    let d = load_model(path)?.build_joint()?;
    let w = parse_weights(weights, d.k_total())?;
    let sys = closed_form_system(&d)?;
    let out = bcregion_core::region::support(&sys, &w)?;
    Ok(print_lp_outcome(&out, format))
}

pub fn project(path: &str, weights: &str, format: Format) -> Result<ExitCode> {
    let d = load_model(path)?.build_joint()?;
    let w = parse_weights(weights, d.k_total())?;
    let out = projected_support(&d, &w)?;
    Ok(print_lp_outcome(&out, format))
}

pub fn compare(
    path_a: &str,
    path_b: &str,
    dirs: usize,
    seed: u64,
    format: Format,
) -> Result<ExitCode> {
    let da = load_model(path_a)?.build_joint()?;
    let db = load_model(path_b)?.build_joint()?;
    if da.k_total() != db.k_total() {
        return Err(Error::Argument(
            "models have different receiver counts".into(),
        ));
    }
    let sys_a = closed_form_system(&da)?;
    let sys_b = closed_form_system(&db)?;
    let report = compare_regions(&sys_a, &sys_b, dirs, seed)?;
    println!("seed: {seed}");
    for e in &report.entries {
        println!(
            "dir {} a {} b {} gap {}",
            render::vector(format, &e.direction),
            render::bits(format, e.value_a),
            render::bits(format, e.value_b),
            render::bits(format, e.gap)
        );
    }
    println!(
        "gaps: min {} max {} mean {}",
        render::bits(format, report.min_gap),
        render::bits(format, report.max_gap),
        render::bits(format, report.mean_gap)
    );
    println!("contains: {}", report.contains);
    Ok(ExitCode::SUCCESS)
}

pub fn optimize(
    path: &str,
    weights: &str,
    budget: usize,
    seed: u64,
    format: Format,
) -> Result<ExitCode> {
    let spec = load_model(path)?;
    let w = parse_weights(weights, spec.k_total)?;
    let out = optimize_pmf(&spec, &w, budget, seed)?;
    println!("seed: {seed}");
    println!("evaluations: {}", out.evaluations);
    println!("value: {}", render::bits(format, out.best_value));
    println!("pmf: {}", render::vector(format, &out.best_pmf));
    Ok(ExitCode::SUCCESS)
}

fn parse_rates(text: &str, spec: &ModelSpec) -> Result<Vec<(Subset, f64)>> {
    let mut rates = Vec::new();
    if text.trim().is_empty() {
        return Ok(rates);
    }
    for part in text.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("bad rate entry '{part}' (want S=bits)")))?;
        let s = Subset::parse(name.trim(), spec.k_total)?;
        let r: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("bad rate value '{value}'")))?;
        rates.push((s, r));
    }
    Ok(rates)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_cover(
    path: &str,
    n: usize,
    rates_text: &str,
    eps_text: &str,
    trials: usize,
    seed: u64,
    format: Format,
) -> Result<ExitCode> {
    let spec = load_model(path)?;
    let rates = parse_rates(rates_text, &spec)?;
    let eps: Vec<f64> = eps_text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad eps value '{part}'")))
        })
        .collect::<Result<_>>()?;
    let d = spec.build_joint()?;
    let cfg = CoverTrialConfig::new(n, rates.clone(), eps, trials, seed);
    let est = estimate_cover_failure(&d, &cfg)?;
    let rates_str = if rates.is_empty() {
        "-".to_string()
    } else {
        rates
            .iter()
            .map(|(s, r)| format!("{}={}", s.format(spec.k_total), render::bits(format, *r)))
            .collect::<Vec<_>>()
            .join(",")
    };
    println!(
        "n {} rates {} trials {} failures {} estimate {} ci {} {}",
        n,
        rates_str,
        est.trials,
        est.failures,
        render::bits(format, est.estimate),
        render::bits(format, est.ci_low),
        render::bits(format, est.ci_high)
    );
    Ok(ExitCode::SUCCESS)
}
