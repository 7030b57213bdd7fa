//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails on any FAIL outside the documented known set.

use std::time::Instant;

use avqc::capacity::{continuity_bound, erasure_capacity, maximin_ic, DEFAULT_RESTARTS};
use avqc::channels::{
    coherent_information, erasure_degrading_map, hausdorff_diamond, is_degradable, DensityOperator,
    QuantumChannel,
};
use avqc::coding_sim::{
    basis_message_code, derandomize, haar_twirl_fidelity, inner_product_sweep, letter_codes, lipschitz_median_checks,
    permutation_average, robustification_sweep, shift_noise_avqc, type_class_bound_margin,
};
use avqc::numerics::linalg::{dot, hermitian_coords};
use avqc::numerics::{ComplexMatrix, HermitianMatrix, SdpSettings, C64};
use avqc::symmetrizability::{
    all_sequences, is_l_symmetrizable, is_qc_symmetrizable, l_symmetrization_residual, qc_symmetry_residual,
    sequence_index, Avqc, Povm, DEFAULT_LP_TOL,
};
use avqc::zero_error::{confusability_space, lovasz_theta_tilde, separable_overlap_bound, OperatorSubspace};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose stated target is known to be unreachable; see README.
const KNOWN_FAILURES: &[usize] = &[7];

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn report(id: usize, pass: bool, detail: String) -> Outcome {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    Outcome { id, pass, detail }
}

fn erasure_capacity_check() -> Outcome {
    let start = Instant::now();
    let avqc = Avqc::erasure(&[0.1, 0.3], 2).unwrap();
    let r = maximin_ic(&avqc, 1, DEFAULT_RESTARTS, 0, 1e-6).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let closed = erasure_capacity(&[0.1, 0.3], 2).unwrap();
    let mut zero_ok = true;
    let mut zero_max: f64 = 0.0;
    for ps in [[0.5, 0.5], [0.1, 0.6], [0.7, 0.9]] {
        let v = maximin_ic(&Avqc::erasure(&ps, 2).unwrap(), 1, DEFAULT_RESTARTS, 0, 1e-6).unwrap().value;
        zero_max = zero_max.max(v);
        zero_ok &= v <= 1e-3;
    }
    let pass = (r.value - 0.4).abs() <= 1e-3 && (r.value - closed).abs() <= 1e-3 && secs < 60.0 && zero_ok;
    report(
        1,
        pass,
        format!("maximin {:.6} bits vs 0.4 in {secs:.2}s; largest zero-case value {zero_max:.2e}", r.value),
    )
}

fn erasure_structure_check() -> Outcome {
    let mut comp_worst: f64 = 0.0;
    for p in [0.0, 0.2, 0.5, 0.8] {
        let e = QuantumChannel::erasure(p, 2).unwrap();
        let c = e.complementary();
        let target = QuantumChannel::erasure(1.0 - p, 2).unwrap();
        comp_worst = comp_worst.max(c.choi_distance(&target).unwrap());
    }
    let e = QuantumChannel::erasure(0.3, 2).unwrap();
    let res = is_degradable(&e, &SdpSettings::default()).unwrap();
    let solver_ok = res.is_feasible() && res.residual <= 1e-6;
    let planted = erasure_degrading_map(0.3, 2).unwrap();
    let planted_res = e
        .then(&planted)
        .unwrap()
        .choi_distance(&QuantumChannel::erasure(0.7, 2).unwrap())
        .unwrap();
    let mu_ok = ((1.0 - 0.6) / 0.7 - 4.0 / 7.0f64).abs() < 1e-15;
    let pass = comp_worst <= 1e-9 && solver_ok && planted_res <= 1e-6 && mu_ok;
    report(
        2,
        pass,
        format!(
            "complement distance {comp_worst:.1e}; solver {:?} residual {:.1e}; planted μ=4/7 residual {planted_res:.1e}",
            res.kind(),
            res.residual
        ),
    )
}

/// Rotated additive adversary: complete dephasing in the basis `V`,
/// followed by `V X^s V†`.
fn rotated_additive(theta: f64, phi: f64) -> Avqc {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = C64::from_polar(1.0, phi);
    let v = ComplexMatrix::from_vec(2, 2, vec![C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)]).unwrap();
    let proj = |i: usize, j: usize| v.matmul(&ComplexMatrix::unit(2, 2, i, j)).matmul(&v.adjoint());
    Avqc::new(vec![
        QuantumChannel::from_kraus(2, 2, vec![proj(0, 0), proj(1, 1)]).unwrap(),
        QuantumChannel::from_kraus(2, 2, vec![proj(1, 0), proj(0, 1)]).unwrap(),
    ])
    .unwrap()
}

/// Smallest symmetry residual over two-outcome POVMs `E_0 = aI + b n·σ` on a
/// grid whose angles include every rotation used above.
fn grid_oracle(avqc: &Avqc) -> f64 {
    let steps = 12;
    let mut best = f64::INFINITY;
    for ia in 0..=steps {
        let a = ia as f64 / steps as f64;
        let bmax = a.min(1.0 - a);
        for ib in 0..=steps {
            let b = bmax * ib as f64 / steps as f64;
            for it in 0..=steps {
                let theta = std::f64::consts::PI * it as f64 / steps as f64;
                for ip in 0..(2 * steps) {
                    let phi = std::f64::consts::PI * ip as f64 / steps as f64;
                    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
                    let e0 = ComplexMatrix::from_vec(
                        2,
                        2,
                        vec![
                            C64::new(a + b * n[2], 0.0),
                            C64::new(b * n[0], -b * n[1]),
                            C64::new(b * n[0], b * n[1]),
                            C64::new(a - b * n[2], 0.0),
                        ],
                    )
                    .unwrap();
                    let e0 = HermitianMatrix::from_hermitian_part(&e0);
                    let e1 = HermitianMatrix::identity(2).sub(&e0);
                    if let Ok(p) = Povm::new(vec![e0, e1]) {
                        best = best.min(qc_symmetry_residual(avqc, 1, &p).unwrap());
                    }
                }
            }
        }
    }
    best
}

fn symmetrizability_check() -> Outcome {
    // erasure pair on basis states: infeasible, certificate checked by signs
    let avqc = Avqc::erasure(&[0.1, 0.3], 2).unwrap();
    let states = [DensityOperator::basis(2, 0), DensityOperator::basis(2, 1)];
    let res = is_l_symmetrizable(&avqc, &states, 1, DEFAULT_LP_TOL).unwrap();
    let sign_ok = match res.certificate() {
        Some(cert) => {
            // columns: block 0 holds N_s(ρ_1), block 1 holds −N_s(ρ_0)
            let col = |h: &DensityOperator| dot(&cert.y, &hermitian_coords(h.matrix()));
            let outs = |r: &DensityOperator| -> Vec<f64> {
                avqc.channels().iter().map(|c| col(&c.apply(r).unwrap())).collect()
            };
            let max0 = outs(&states[1]).into_iter().fold(f64::NEG_INFINITY, f64::max);
            let max1 = outs(&states[0]).into_iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max);
            -(max0 + max1) > 0.0
        }
        None => false,
    };
    // constant output: feasible with a verified witness
    let sigma = DensityOperator::random(2, 2, &mut ChaCha8Rng::seed_from_u64(3));
    let constant = Avqc::new(vec![
        QuantumChannel::constant(&sigma, 2),
        QuantumChannel::constant(&DensityOperator::basis(2, 1), 2),
    ])
    .unwrap();
    let cres = is_l_symmetrizable(&constant, &states, 1, DEFAULT_LP_TOL).unwrap();
    let const_ok = cres
        .witness()
        .map(|w| l_symmetrization_residual(&constant, &states, 1, w).unwrap() <= 1e-8)
        .unwrap_or(false);
    // qc verdicts against the grid on five seeded pairs
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    let mut kinds = Vec::new();
    for k in 0..5 {
        let avqc = if k % 2 == 0 {
            Avqc::new(vec![QuantumChannel::random(2, 2, 2, &mut rng), QuantumChannel::random(2, 2, 2, &mut rng)]).unwrap()
        } else {
            let step = std::f64::consts::PI / 12.0;
            rotated_additive(step * rng.random_range(0..=12) as f64, step * rng.random_range(0..24) as f64)
        };
        let verdict = is_qc_symmetrizable(&avqc, &SdpSettings::default()).unwrap();
        let grid = grid_oracle(&avqc);
        let matches = (verdict.is_feasible() && grid <= 1e-6) || (verdict.is_infeasible() && grid > 1e-2);
        agree += matches as usize;
        kinds.push(format!("{:?}/{grid:.1e}", verdict.kind()));
    }
    let pass = res.is_infeasible() && sign_ok && const_ok && agree == 5;
    report(
        3,
        pass,
        format!(
            "erasure pair {:?} (sign check {sign_ok}); constant output {:?}; qc vs grid {agree}/5 [{}]",
            res.kind(),
            cres.kind(),
            kinds.join(", ")
        ),
    )
}

fn coherent_information_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.2, 0.4, 0.6, 0.9] {
        for d in [2, 3, 2, 4] {
            let rho = DensityOperator::random(d, d, &mut rng);
            let ic = coherent_information(&rho, &QuantumChannel::erasure(p, d).unwrap()).unwrap();
            worst = worst.max((ic - (1.0 - 2.0 * p) * rho.entropy()).abs());
        }
    }
    let mut id_worst: f64 = 0.0;
    for d in 2..=6 {
        let ic = coherent_information(&DensityOperator::maximally_mixed(d), &QuantumChannel::identity(d)).unwrap();
        id_worst = id_worst.max((ic - (d as f64).log2()).abs());
    }
    report(
        4,
        worst <= 1e-9 && id_worst <= 1e-10,
        format!("erasure grid deviation {worst:.1e}; identity deviation {id_worst:.1e}"),
    )
}

fn robustification_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sweep = robustification_sweep(2, 6, 1000, &mut rng).unwrap();
    let mut perm_worst: f64 = 0.0;
    for l in 1..=5 {
        let f: Vec<f64> = (0..1usize << l).map(|_| rng.random()).collect();
        for seq in all_sequences(2, l, 64).unwrap() {
            let fact: usize = (1..=l).product();
            let direct = (0..l)
                .permutations(l)
                .map(|p| f[sequence_index(&p.iter().map(|&i| seq[i]).collect::<Vec<_>>(), 2)])
                .sum::<f64>()
                / fact as f64;
            perm_worst = perm_worst.max((permutation_average(&f, &seq, 2).unwrap() - direct).abs());
        }
    }
    let margin = type_class_bound_margin(8, 3);
    let pass = sweep.violations == 0 && sweep.hypothesis_not_met == 0 && perm_worst <= 1e-12 && margin >= 1.0;
    report(
        5,
        pass,
        format!(
            "{} tables, {} violations; permutation average deviation {perm_worst:.1e}; type-class margin {margin:.4}",
            sweep.tables, sweep.violations
        ),
    )
}

fn derandomization_check() -> Outcome {
    // shift probability chosen so that the message code errs with exactly 0.05
    let eta = 1.0 - 0.95f64.sqrt();
    let avqc = shift_noise_avqc(eta, 3, 2).unwrap();
    let code = derandomize(letter_codes(3, 3).unwrap(), basis_message_code(3, 2).unwrap(), &avqc, 3, 2).unwrap();
    let check = code.verify(&avqc).unwrap();
    let eps = check.eps_codes.max(check.eps_classical);
    let violations = inner_product_sweep(10_000, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
    let pass = (eps - 0.05).abs() < 1e-12
        && check.worst.value >= 0.9 - 1e-9
        && check.block_length == 5
        && violations == 0;
    report(
        6,
        pass,
        format!(
            "ε = {eps:.4}; worst F_e {:.6} over {} sequences (block 5); inner-product violations {violations}",
            check.worst.value,
            2usize.pow(5)
        ),
    )
}

fn concentration_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut channels = vec![
        ("identity".to_string(), QuantumChannel::identity(2)),
        ("erasure(0.3)".to_string(), QuantumChannel::erasure(0.3, 2).unwrap()),
    ];
    for k in 0..3 {
        channels.push((format!("random{k}"), QuantumChannel::random(2, 2, 2 + k, &mut rng)));
    }
    let mut twirl_ok = true;
    let mut parts = Vec::new();
    for (i, (name, ch)) in channels.iter().enumerate() {
        let t = haar_twirl_fidelity(ch, 100_000, 70 + i as u64).unwrap();
        twirl_ok &= t.agrees();
        parts.push(format!("{name} {:.4}±{:.1e} vs {:.4}", t.estimate, t.stderr, t.predicted));
    }
    let lam = QuantumChannel::random(4, 4, 4, &mut rng);
    let lip = lipschitz_median_checks(&lam, 10_000, 8).unwrap();
    let pass = twirl_ok && lip.violations == 0 && lip.gap_ok;
    report(
        7,
        pass,
        format!(
            "twirl [{}]; Lipschitz violations {} (max ratio {:.3}); median-mean gap {:.1e} ≤ {:.3}",
            parts.join("; "),
            lip.violations,
            lip.max_ratio,
            lip.gap,
            lip.gap_bound + lip.slack
        ),
    )
}

fn zero_error_check() -> Outcome {
    let d = 2;
    let id = QuantumChannel::identity(d);
    let path = |lambda: f64| {
        QuantumChannel::mix(&[id.clone(), QuantumChannel::depolarizing(1.0, d).unwrap()], &[1.0 - lambda, lambda]).unwrap()
    };
    let dim_id = confusability_space(&id).dimension();
    let dim_mix = confusability_space(&path(0.1)).dimension();
    let full = lovasz_theta_tilde(&OperatorSubspace::full(d), 1e-8).unwrap().value;
    let mut path_vals = Vec::new();
    for lambda in [0.01, 0.1, 0.5] {
        path_vals.push(lovasz_theta_tilde(&confusability_space(&path(lambda)), 1e-8).unwrap().value);
    }
    // span{I} on C^2; reference value 4 from an external SDP solver
    let at_zero = lovasz_theta_tilde(&confusability_space(&id), 1e-8).unwrap().value;
    let pass = dim_id == 1
        && dim_mix == d * d
        && (full - 1.0).abs() <= 1e-6
        && path_vals.iter().all(|v| (v - 1.0).abs() <= 1e-6)
        && (at_zero - 4.0).abs() <= 1e-6
        && at_zero > 1.0;
    report(
        8,
        pass,
        format!(
            "dims {dim_id}/{dim_mix}; θ̃(full) {full:.7}; path {:?}; θ̃ at λ=0 {at_zero:.6}",
            path_vals.iter().map(|v| format!("{v:.7}")).collect::<Vec<_>>()
        ),
    )
}

fn separable_overlap_check() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2, 3, 4] {
        let s = separable_overlap_bound(k, 100_000, 90 + k as u64).unwrap();
        ok &= s.max <= 1.0 / k as f64 + 1e-12;
        parts.push(format!("k={k} max {:.6} ≤ {:.6}", s.max, 1.0 / k as f64));
    }
    report(9, ok, parts.join("; "))
}

fn continuity_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let tau = 0.01;
    let mut worst_slack = f64::INFINITY;
    let mut ok = true;
    for _ in 0..5 {
        let ps: Vec<f64> = (0..2).map(|_| rng.random_range(0.05..0.45)).collect();
        let qs: Vec<f64> = ps.iter().map(|p| p + if rng.random::<bool>() { tau } else { -tau }).collect();
        let a = Avqc::erasure(&ps, 2).unwrap();
        let b = Avqc::erasure(&qs, 2).unwrap();
        let dist = hausdorff_diamond(a.channels(), b.channels(), 1e-8).unwrap();
        let va = maximin_ic(&a, 1, 5, 0, 1e-6).unwrap().value;
        let vb = maximin_ic(&b, 1, 5, 0, 1e-6).unwrap().value;
        let bound = continuity_bound((2.0 * dist).min(1.0), a.dim_out()).unwrap();
        let diff = (va - vb).abs();
        ok &= diff <= bound + 1e-3;
        worst_slack = worst_slack.min(bound - diff);
    }
    report(10, ok, format!("5 families; smallest bound minus change {worst_slack:.4}"))
}

#[test]
fn acceptance() {
    let outcomes = vec![
        erasure_capacity_check(),
        erasure_structure_check(),
        symmetrizability_check(),
        coherent_information_check(),
        robustification_check(),
        derandomization_check(),
        concentration_check(),
        zero_error_check(),
        separable_overlap_check(),
        continuity_check(),
    ];
    let unexpected: Vec<&Outcome> = outcomes
        .iter()
        .filter(|o| !o.pass && !KNOWN_FAILURES.contains(&o.id))
        .collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    assert!(unexpected.is_empty(), "unexpected failures: {:?}", unexpected.iter().map(|o| (&o.id, &o.detail)).collect::<Vec<_>>());
}

/// The erasure part of criterion 7 asks the twirl of `E_0.3` to match
/// `(2·0.7+1)/3 = 0.8`. The integrand `⟨φ|E_p(φφ†)|φ⟩` equals `1 − p` for
/// every `φ`, so the estimate is exactly 0.7. The identity behind 0.8 assumes
/// the channel keeps its output in the input space; with leakage the average
/// is `(d² F_e + Σ tr K̃†K̃)/(d(d+1))`, which gives 0.7. Pin that analysis so
/// the known failure cannot drift.
#[test]
fn erasure_twirl_known_failure_is_the_leakage_term() {
    let t = haar_twirl_fidelity(&QuantumChannel::erasure(0.3, 2).unwrap(), 100_000, 71).unwrap();
    assert!((t.estimate - 0.7).abs() < 1e-12);
    assert!((t.predicted - 0.8).abs() < 1e-12);
    assert!(!t.agrees());
    assert!(t.agrees_with_general());
}
