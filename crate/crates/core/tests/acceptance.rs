//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Run with `cargo test -p statdistill --test acceptance`.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statdistill::fock::{
    apply_beam_splitter, derive_step_factors, outcome_split, FockVector, Mode, Occupation, Side,
    Spin, Statistics,
};
use statdistill::measures::{concurrence, concurrence_x_part, efficiency_grid_max, embed_pair_state};
use statdistill::protocol::{distill_step, make_total_state};
use statdistill::{cli, distill, final_state_closed_form, summarize, ProtocolConfig, SharedPairState};

use common::{c, joint_entry, pair_grid, pure_concurrence};

const SEED: u64 = 0x5eed_d157;
const RANDOM_PAIRS: usize = 20;

struct Outcome {
    passed: bool,
    detail: String,
}

fn within(worst: f64, tol: f64) -> Outcome {
    Outcome {
        passed: worst.is_finite() && worst <= tol,
        detail: format!("worst deviation {worst:.3e}, tol {tol:.0e}"),
    }
}

fn all(parts: Vec<(&str, Outcome)>) -> Outcome {
    let passed = parts.iter().all(|(_, o)| o.passed);
    let detail = parts
        .iter()
        .map(|(name, o)| format!("{name}: {}", o.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed, detail }
}

fn random_pairs(seed: u64) -> Vec<SharedPairState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..RANDOM_PAIRS).map(|_| cli::random_pair(&mut rng)).collect()
}

fn run(pair: SharedPairState, n: u32, statistics: Statistics) -> statdistill::ProtocolResult {
    distill(&ProtocolConfig::new(pair, n, statistics)).expect("admissible pair")
}

fn single_step_probability() -> Outcome {
    let half = common::pair(0.5, 1.0, 0.0);
    let step = distill_step(&make_total_state(&half), Statistics::Fermion).unwrap();
    let mut worst_random = 0.0f64;
    for p in random_pairs(SEED) {
        let step = distill_step(&make_total_state(&p), Statistics::Fermion).unwrap();
        worst_random = worst_random.max((step.step_prob - (0.5 + p.ab())).abs());
    }
    all(vec![
        ("a=b=1/2 gives 3/4", within((step.step_prob - 0.75).abs(), 1e-12)),
        ("random pairs give 1/2+ab", within(worst_random, 1e-12)),
    ])
}

fn cumulative_probability() -> Outcome {
    let mut worst = 0.0f64;
    for p in random_pairs(SEED + 1) {
        let result = run(p, 30, Statistics::Fermion);
        for (k, step) in result.per_step.iter().enumerate() {
            worst = worst.max((step.cumulative_prob - common::p_f(&p, k as u32 + 1)).abs());
        }
        worst = worst.max((result.p_f - common::p_f(&p, 30)).abs());
    }
    within(worst, 1e-12)
}

fn occ(modes: &[(Side, Spin)]) -> Occupation {
    let mut o = [0u8; 4];
    for &(side, spin) in modes {
        o[Mode::new(side, spin).index()] += 1;
    }
    Occupation(o)
}

fn splitter_reference_state() -> Outcome {
    use Side::{L, R};
    use Spin::{Down, Up};
    let input = FockVector::from_creators(&[Mode::new(L, Up), Mode::new(R, Down)], Statistics::Fermion);
    let out = apply_beam_splitter(&input).unwrap();
    let expected = [
        (occ(&[(L, Up), (L, Down)]), c(0.0, 0.5)),
        (occ(&[(R, Up), (R, Down)]), c(0.0, 0.5)),
        (occ(&[(L, Up), (R, Down)]), c(0.5, 0.0)),
        (occ(&[(L, Down), (R, Up)]), c(0.5, 0.0)),
    ];
    let mut worst = expected
        .iter()
        .map(|(o, amp)| (out.amplitude(o) - amp).norm())
        .fold(0.0, f64::max);
    let extra: f64 = out
        .terms()
        .filter(|(o, _)| expected.iter().all(|(e, _)| e != *o))
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max);
    worst = worst.max(extra);

    let mixed = outcome_split((Up, Down), Statistics::Fermion);
    let same = outcome_split((Up, Up), Statistics::Fermion);
    all(vec![
        ("amplitudes", within(worst, 1e-12)),
        ("opposite-spin antibunching 1/2", within((mixed.antibunch_prob - 0.5).abs(), 1e-12)),
        ("same-spin antibunching 1", within((same.antibunch_prob - 1.0).abs(), 1e-12)),
    ])
}

fn step_factors() -> Outcome {
    let expected = [FRAC_1_SQRT_2, 1.0, 1.0, FRAC_1_SQRT_2];
    let mut worst_factor = 0.0f64;
    for stats in Statistics::ALL {
        for (f, e) in derive_step_factors(stats).iter().zip(expected) {
            worst_factor = worst_factor.max((f - e).abs());
        }
    }
    let mut worst_output = 0.0f64;
    for p in random_pairs(SEED + 2) {
        let f = run(p, 30, Statistics::Fermion);
        let b = run(p, 30, Statistics::Boson);
        for (sf, sb) in f.per_step.iter().zip(&b.per_step) {
            worst_output = worst_output
                .max(sf.state.entries().max_abs_diff(sb.state.entries()))
                .max((sf.cumulative_prob - sb.cumulative_prob).abs());
        }
    }
    all(vec![
        ("factors, both statistics", within(worst_factor, 1e-12)),
        ("fermion vs boson outputs", within(worst_output, 1e-14)),
    ])
}

fn closed_form_vs_iteration() -> Outcome {
    let mut worst = 0.0f64;
    for p in pair_grid(9, 6) {
        let result = run(p, 30, Statistics::Fermion);
        for (k, step) in result.per_step.iter().enumerate() {
            let (closed, p_f) = final_state_closed_form(&p, k as u32 + 1);
            worst = worst
                .max(step.state.entries().max_abs_diff(closed.entries()))
                .max((step.cumulative_prob - p_f).abs());
        }
    }
    within(worst, 1e-12)
}

fn asymptotic_concurrence() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_pure = 0.0f64;
    for p in pair_grid(12, 7).into_iter().filter(|p| p.ab() >= 0.05) {
        let conc = run(p, 40, Statistics::Fermion).final_concurrence();
        worst = worst.max((conc - p.c().norm_sqr() / p.ab()).abs());
        if p.is_pure() {
            worst_pure = worst_pure.max(1.0 - conc);
        }
    }
    all(vec![
        ("n=40 vs |c|^2/ab", within(worst, 1e-9)),
        ("pure inputs reach 1", within(worst_pure, 1e-9)),
    ])
}

fn initial_concurrence() -> Outcome {
    let mut worst = 0.0f64;
    for p in pair_grid(12, 7) {
        let general = concurrence(&embed_pair_state(&p)).unwrap();
        worst = worst.max((general - 2.0 * p.c().norm()).abs());
    }
    // The embedded pure state has amplitudes (0, √a, e^{iφ}√b, 0).
    let p = common::pair(0.3, 1.0, 0.4);
    let psi = [c(0.0, 0.0), c(p.a().sqrt(), 0.0), Complex64::from_polar(p.b().sqrt(), -0.4), c(0.0, 0.0)];
    let oracle = (pure_concurrence(psi) - 2.0 * p.c().norm()).abs();
    all(vec![
        ("embedded state vs 2|c|", within(worst, 1e-12)),
        ("pure-state oracle", within(oracle, 1e-12)),
    ])
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn threshold() -> Outcome {
    let mut mismatches = 0usize;
    let mut points = 0usize;
    for i in 0..50 {
        let a = (i as f64 + 0.5) / 50.0;
        let b = 1.0 - a;
        for j in 0..50 {
            let c_abs = j as f64 / 49.0 * (a * b).sqrt();
            let Ok(p) = statdistill::make_pair_state(a, b, c(c_abs, 0.0)) else {
                continue;
            };
            points += 1;
            let s = summarize(&p);
            let gain = s.asymptotic_concurrence.unwrap() - s.initial_concurrence;
            let expected = sign(p.c().norm() - 2.0 * p.ab());
            // At |c| = 0 both concurrences vanish and the gain is exactly zero.
            let expected = if p.c().norm() == 0.0 { 0 } else { expected };
            if sign(gain) != expected || s.distillable != (expected > 0) {
                mismatches += 1;
            }
        }
    }
    Outcome {
        passed: mismatches == 0 && points == 2500,
        detail: format!("{mismatches} sign mismatches over {points} grid points"),
    }
}

fn efficiency_maximum() -> Outcome {
    let (value, a) = efficiency_grid_max(1000);
    all(vec![
        ("maximum 1/2", within((value - 0.5).abs(), 1e-12)),
        ("attained at a=1/2", within((a - 0.5).abs(), 1e-12)),
    ])
}

fn random_fock(rng: &mut impl Rng, particles: usize, statistics: Statistics) -> FockVector {
    let mut occupations = Vec::new();
    for i in 0..4 {
        if particles == 1 {
            let mut o = [0u8; 4];
            o[i] = 1;
            occupations.push(Occupation(o));
            continue;
        }
        for j in i..4 {
            if i == j && statistics == Statistics::Fermion {
                continue;
            }
            let mut o = [0u8; 4];
            o[i] += 1;
            o[j] += 1;
            occupations.push(Occupation(o));
        }
    }
    let terms = occupations
        .into_iter()
        .map(|o| (o, c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
    FockVector::from_terms(statistics, terms).normalized()
}

fn sweep_bytes(dir: &std::path::Path, name: &str) -> Vec<u8> {
    let path = dir.join(name);
    let args = [
        "statdistill", "sweep", "--a-range", "0.1:0.9:0.1", "--c-abs-range", "0:0.5:0.05",
        "--c-phase", "0.3", "--n", "7", "--out", path.to_str().unwrap(),
    ];
    let code = cli::run(args, &mut Vec::new(), &mut Vec::new());
    assert_eq!(code, cli::EXIT_OK);
    std::fs::read(path).unwrap()
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut validity = 0.0f64;
    let mut purity = 0.0f64;
    let mut x_vs_general = 0.0f64;
    let mut invalid_steps = 0usize;
    for _ in 0..40 {
        let p = cli::random_pair(&mut rng);
        let result = run(p, 30, Statistics::Fermion);
        for step in &result.per_step {
            if step.state.validate(1e-10).is_err() {
                invalid_steps += 1;
            }
            validity = validity.max((step.state.entries().trace().re - 1.0).abs());
            x_vs_general = x_vs_general.max((concurrence(&step.state).unwrap() - concurrence_x_part(&step.state)).abs());
        }
        let pure = common::pair(p.a(), 1.0, p.c().arg());
        for step in run(pure, 30, Statistics::Fermion).per_step {
            purity = purity.max((step.state.purity() - 1.0).abs());
        }
    }
    // spot-check the joint-state layout the suites build on
    let p = common::pair(0.35, 0.8, 1.1);
    let joint = make_total_state(&p);
    let layout = (0..16)
        .map(|k| (joint.entries()[(k / 4, k % 4)] - joint_entry(&p, k / 4, k % 4)).norm())
        .fold(0.0, f64::max);

    let mut unitarity = 0.0f64;
    for stats in Statistics::ALL {
        for particles in [1, 2] {
            for _ in 0..50 {
                let u = random_fock(&mut rng, particles, stats);
                let v = random_fock(&mut rng, particles, stats);
                let bu = apply_beam_splitter(&u).unwrap();
                let bv = apply_beam_splitter(&v).unwrap();
                unitarity = unitarity
                    .max((bu.norm_sqr() - 1.0).abs())
                    .max((bu.inner(&bv) - u.inner(&v)).norm());
            }
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let first = sweep_bytes(dir.path(), "first.csv");
    let second = sweep_bytes(dir.path(), "second.csv");
    let csv = Outcome {
        passed: first == second && !first.is_empty(),
        detail: format!("{} bytes, identical: {}", first.len(), first == second),
    };
    all(vec![
        (
            "validity",
            Outcome {
                passed: invalid_steps == 0 && validity <= 1e-10 && layout <= 1e-15,
                detail: format!("{invalid_steps} invalid steps, trace deviation {validity:.3e}"),
            },
        ),
        ("purity", within(purity, 1e-12)),
        ("splitter unitarity", within(unitarity, 1e-12)),
        ("X-part vs general concurrence", within(x_vs_general, 1e-10)),
        ("byte-stable CSV", csv),
    ])
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("single-step probability", single_step_probability),
        ("cumulative probability", cumulative_probability),
        ("splitter output and antibunching", splitter_reference_state),
        ("oracle step factors", step_factors),
        ("closed form vs iteration", closed_form_vs_iteration),
        ("asymptotic concurrence", asymptotic_concurrence),
        ("initial concurrence", initial_concurrence),
        ("distillability threshold", threshold),
        ("efficiency maximum", efficiency_maximum),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
