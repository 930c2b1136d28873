mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use proptest::prelude::*;
use statdistill::fock::{apply_beam_splitter, apply_mode_map, beam_splitter_matrix, outcome_split, FockVector, Mode, Occupation, Spin, Statistics};
use statdistill::linalg::{eig_nonneg4, tensor, Matrix, Matrix2, Matrix4};
use statdistill::measures::{concurrence, concurrence_x_part, spin_flipped, wootters_eigenvalues};
use statdistill::protocol::{make_pair_state, make_total_state};
use statdistill::{distill, final_state_closed_form, DensityMatrix4, ProtocolConfig, SharedPairState};

use common::{c, concurrence_n, p_f};

fn pair_strategy() -> impl Strategy<Value = SharedPairState> {
    (0.0..1.0f64, 0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(a, frac, phase)| common::pair(a, frac, phase))
}

fn interior_pair() -> impl Strategy<Value = SharedPairState> {
    (0.05..0.95f64, 0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(a, frac, phase)| common::pair(a, frac, phase))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

fn matrix2() -> impl Strategy<Value = Matrix2> {
    prop::array::uniform4(complex()).prop_map(|[a, b, c, d]| Matrix::<2>([[a, b], [c, d]]))
}

fn occupations(particles: usize, statistics: Statistics) -> Vec<Occupation> {
    let mut out = Vec::new();
    for i in 0..4 {
        if particles == 1 {
            let mut o = [0u8; 4];
            o[i] = 1;
            out.push(Occupation(o));
            continue;
        }
        for j in i..4 {
            if i == j && statistics == Statistics::Fermion {
                continue;
            }
            let mut o = [0u8; 4];
            o[i] += 1;
            o[j] += 1;
            out.push(Occupation(o));
        }
    }
    out
}

fn fock_state(particles: usize, statistics: Statistics) -> impl Strategy<Value = FockVector> {
    let occ = occupations(particles, statistics);
    prop::collection::vec(complex(), occ.len()).prop_filter_map("nonzero", move |amps| {
        let v = FockVector::from_terms(statistics, occ.iter().copied().zip(amps));
        (v.norm_sqr() > 1e-6).then(|| v.normalized())
    })
}

fn statistics() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Fermion), Just(Statistics::Boson)]
}

/// Two states with the same statistics and particle number.
fn fock_pair() -> impl Strategy<Value = (FockVector, FockVector)> {
    (statistics(), 1usize..=2).prop_flat_map(|(stats, n)| (fock_state(n, stats), fock_state(n, stats)))
}

fn run(pair: SharedPairState, n: u32, stats: Statistics) -> statdistill::ProtocolResult {
    distill(&ProtocolConfig::new(pair, n, stats)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative(a in matrix2(), b in matrix2(), c in matrix2()) {
        let left: Matrix<8> = tensor::<4, 2, 8>(&tensor::<2, 2, 4>(&a, &b), &c);
        let right: Matrix<8> = tensor::<2, 4, 8>(&a, &tensor::<2, 2, 4>(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn tensor_trace_is_multiplicative(a in matrix2(), b in matrix2()) {
        let t: Matrix4 = tensor::<2, 2, 4>(&a, &b);
        prop_assert!((t.trace() - a.trace() * b.trace()).norm() < 1e-14);
    }

    #[test]
    fn joint_state_matches_elementwise_product(p in pair_strategy()) {
        let joint = make_total_state(&p);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((joint.entries()[(i, j)] - common::joint_entry(&p, i, j)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn wootters_eigenvalues_sum_to_trace(p in pair_strategy(), n in 0u32..12) {
        let rho = final_state_closed_form(&p, n).0;
        let product = rho.entries() * &spin_flipped(rho.entries());
        let eig = eig_nonneg4(&product).unwrap();
        prop_assert!((eig.iter().sum::<f64>() - product.trace().re).abs() < 1e-10);
        prop_assert!(eig.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn wootters_routes_agree(p in pair_strategy(), n in 0u32..12) {
        // square roots of small eigenvalues lose half the digits, hence the looser bound
        let rho = final_state_closed_form(&p, n).0;
        let eig = wootters_eigenvalues(&rho).unwrap();
        let via_eig = (eig[0].sqrt() - eig[1].sqrt() - eig[2].sqrt() - eig[3].sqrt()).max(0.0);
        prop_assert!((via_eig - concurrence(&rho).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn splitter_preserves_inner_products((u, v) in fock_pair()) {
        let bu = apply_beam_splitter(&u).unwrap();
        let bv = apply_beam_splitter(&v).unwrap();
        prop_assert!((bu.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((bu.inner(&bv) - u.inner(&v)).norm() < 1e-12);
    }

    #[test]
    fn splitter_twice_equals_squared_mode_map((u, _) in fock_pair()) {
        let twice = apply_beam_splitter(&apply_beam_splitter(&u).unwrap()).unwrap();
        let bs = beam_splitter_matrix();
        let squared = apply_mode_map(&u, &(&bs * &bs)).unwrap();
        prop_assert!(twice.max_abs_diff(&squared) < 1e-12);
    }

    #[test]
    fn validity_at_every_step(p in pair_strategy(), stats in statistics()) {
        let result = run(p, 30, stats);
        for step in &result.per_step {
            prop_assert!(step.state.validate(1e-10).is_ok());
            prop_assert!(step.step_prob > 0.0 && step.step_prob <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn cumulative_probability_matches_formula(p in pair_strategy(), n in 1u32..=30) {
        let result = run(p, n, Statistics::Fermion);
        for (k, step) in result.per_step.iter().enumerate() {
            prop_assert!((step.cumulative_prob - p_f(&p, k as u32 + 1)).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulative_probability_strictly_decreases_for_mixed_diagonal(p in interior_pair(), n in 2u32..=30) {
        let result = run(p, n, Statistics::Fermion);
        for w in result.per_step.windows(2) {
            prop_assert!(w[1].cumulative_prob < w[0].cumulative_prob);
        }
    }

    #[test]
    fn purity_is_preserved(a in 0.0..1.0f64, phase in 0.0..std::f64::consts::TAU) {
        let p = common::pair(a, 1.0, phase);
        for step in run(p, 30, Statistics::Fermion).per_step {
            prop_assert!((step.state.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn statistics_do_not_change_outputs(p in pair_strategy(), n in 0u32..=30) {
        let f = run(p, n, Statistics::Fermion);
        let b = run(p, n, Statistics::Boson);
        prop_assert!(f.final_state.entries().max_abs_diff(b.final_state.entries()) < 1e-14);
        prop_assert!((f.p_f - b.p_f).abs() < 1e-14);
    }

    #[test]
    fn coherences_carry_half_power_factors(p in interior_pair(), n in 1u32..=30) {
        let result = run(p, n, Statistics::Fermion);
        let f = FRAC_1_SQRT_2.powi(n as i32);
        let m = result.final_state.entries();
        let unnormalized = |i, j| m[(i, j)] * result.p_f;
        prop_assert!((unnormalized(0, 1) - p.c() * (f * p.a())).norm() < 1e-12);
        prop_assert!((unnormalized(2, 3) - p.c() * (f * p.b())).norm() < 1e-12);
        prop_assert!((unnormalized(1, 2) - c(p.c().norm_sqr(), 0.0)).norm() < 1e-12);
        prop_assert!((unnormalized(0, 0).re - 0.5f64.powi(n as i32) * p.a() * p.a()).abs() < 1e-12);
    }

    #[test]
    fn x_part_matches_general_concurrence(p in pair_strategy(), n in 0u32..=30) {
        let rho = final_state_closed_form(&p, n).0;
        let general = concurrence(&rho).unwrap();
        prop_assert!((general - concurrence_x_part(&rho)).abs() < 1e-10);
        prop_assert!((general - concurrence_n(&p, n)).abs() < 1e-10);
    }

    #[test]
    fn concurrence_is_invariant_under_local_phases(p in pair_strategy(), n in 0u32..8, t1 in -3.0..3.0f64, t2 in -3.0..3.0f64) {
        let rho = final_state_closed_form(&p, n).0;
        let phase = |t: f64| [c(1.0, 0.0), Complex64::from_polar(1.0, t)];
        let u = tensor::<2, 2, 4>(&Matrix2::from_fn(|i, j| if i == j { phase(t1)[i] } else { c(0.0, 0.0) }),
            &Matrix2::from_fn(|i, j| if i == j { phase(t2)[i] } else { c(0.0, 0.0) }));
        let rotated = DensityMatrix4::computational(&(&u * rho.entries()) * &u.adjoint());
        prop_assert!((concurrence(&rotated).unwrap() - concurrence(&rho).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn concurrence_stays_in_envelope(p in interior_pair(), n in 10u32..=40) {
        let conc = run(p, n, Statistics::Fermion).final_concurrence();
        let limit = p.c().norm_sqr() / p.ab();
        prop_assert!((conc - limit).abs() < 2.0 * 0.5f64.powi(n as i32) / p.ab());
    }

    #[test]
    fn inadmissible_pairs_are_rejected(a in 0.01..0.99f64, excess in 1e-6..0.5f64) {
        let b = 1.0 - a;
        let c_abs = (a * b).sqrt() + excess;
        prop_assert!(make_pair_state(a, b, c(c_abs, 0.0)).is_err());
    }
}

#[test]
fn fermion_antibunching_is_boson_bunching() {
    for l in [Spin::Up, Spin::Down] {
        for r in [Spin::Up, Spin::Down] {
            let f = outcome_split((l, r), Statistics::Fermion);
            let b = outcome_split((l, r), Statistics::Boson);
            assert!((f.antibunch_prob - b.bunch_prob).abs() < 1e-12, "{l:?} {r:?}");
            assert!((f.kept_prob() - b.kept_prob()).abs() < 1e-12);
        }
    }
}

#[test]
fn fermion_antisymmetry_round_trip() {
    let m0 = Mode::ALL[0];
    let m1 = Mode::ALL[3];
    let forward = FockVector::from_creators(&[m0, m1], Statistics::Fermion);
    let backward = FockVector::from_creators(&[m1, m0], Statistics::Fermion);
    assert!(forward.max_abs_diff(&backward.scaled(c(-1.0, 0.0))) < 1e-15);
    let bosons = (
        FockVector::from_creators(&[m0, m1], Statistics::Boson),
        FockVector::from_creators(&[m1, m0], Statistics::Boson),
    );
    assert!(bosons.0.max_abs_diff(&bosons.1) < 1e-15);
}
