use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use witness_lab::analytic;
use witness_lab::ensemble::{
    self, DecayConfig, DenseCodingScanConfig, EnsembleConfig, EpsilonScaling, LambdaMinScanConfig,
    PtSpectrumConfig, WitnessSpec,
};
use witness_lab::linalg;
use witness_lab::qstate::{self, BipartiteDims, MixedState};
use witness_lab::stats::{self, EmpiricalDistribution, HistogramSpec};
use witness_lab::witness;

fn dims(n: usize) -> BipartiteDims {
    BipartiteDims::square(n).unwrap()
}

#[test]
fn rank2_ensemble_agrees_with_overlap_oracle() {
    let ens = ensemble::run_w_ensemble(&EnsembleConfig::new(
        dims(32),
        100_000,
        1,
        WitnessSpec::Rank2 { lambda: 0.3 },
        1,
    ))
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let oracle = analytic::rank2_density_convolution_oracle(0.3, 100_000, &mut rng).unwrap();
    let ks = stats::ks_two_sample(ens.values(), &oracle.values);
    assert!(ks < 0.02, "{ks}");
}

#[test]
fn tail_std_err_shrinks_with_samples() {
    let run = |s| {
        ensemble::run_w_ensemble(&EnsembleConfig::new(dims(4), s, 1, WitnessSpec::RandomFullRank, 3))
            .unwrap()
            .draws
            .distribution
            .neg_tail
    };
    let (a, b) = (run(20_000), run(40_000));
    let ratio = a.std_err / b.std_err;
    assert!((ratio - 2f64.sqrt()).abs() < 0.05, "{ratio}");
}

#[test]
fn pure_pt_spectrum_stays_in_support() {
    let out = ensemble::run_pt_spectrum(&PtSpectrumConfig::new(dims(32), 1, 3, 4)).unwrap();
    assert_eq!(out.excluded, 3 * 32);
    assert!(out.beyond_support <= 1e-3, "{}", out.beyond_support);
}

#[test]
fn separable_state_has_nonnegative_pt_spectrum() {
    let d = dims(3);
    let a = linalg::from_real_diagonal(&[0.5, 0.3, 0.2]);
    let b = linalg::from_real_diagonal(&[0.6, 0.4, 0.0]);
    let rho = MixedState::product(&a, &b).unwrap();
    assert_eq!(rho.dims(), d);
    assert!(ensemble::lambda_min(&rho).unwrap() >= -1e-12);
}

#[test]
fn lambda_min_scan_is_monotone_and_reproducible() {
    let cfg = LambdaMinScanConfig {
        n_list: vec![4, 6],
        m_list: vec![1, 4, 16, 64, 128],
        repetitions: Some(200),
        seed: 5,
        workers: 2,
    };
    let a = ensemble::run_lambda_min_scan(&cfg).unwrap();
    assert!(a.is_monotone(), "{:?}", a.monotonicity_violations);
    let b = ensemble::run_lambda_min_scan(&LambdaMinScanConfig { workers: 1, ..cfg }).unwrap();
    assert_eq!(a, b);
    assert!(a.crossing(4).is_some());
}

#[test]
fn lambda_min_scan_rejects_bad_input() {
    let bad = |n_list: Vec<usize>, m_list: Vec<usize>, reps| {
        ensemble::run_lambda_min_scan(&LambdaMinScanConfig {
            n_list,
            m_list,
            repetitions: reps,
            seed: 0,
            workers: 1,
        })
        .is_err()
    };
    assert!(bad(vec![4], vec![0], Some(10)));
    assert!(bad(vec![4], vec![1], Some(5)));
    assert!(bad(vec![], vec![1], Some(10)));
    assert!(bad(vec![1], vec![1], Some(10)));
}

#[test]
fn critical_m_limits() {
    let scan = ensemble::run_lambda_min_scan(&LambdaMinScanConfig {
        n_list: vec![4, 8],
        m_list: vec![1, 8, 16, 24, 32, 48, 64, 96, 128, 160, 192, 256, 320],
        repetitions: Some(300),
        seed: 6,
        workers: 0,
    })
    .unwrap();

    let loose = ensemble::critical_m(&scan, 1.0, EpsilonScaling::Const).unwrap();
    assert!(loose.rows.iter().all(|r| r.m_crit == 0.0));

    let exact = ensemble::critical_m(&scan, 0.0, EpsilonScaling::Const).unwrap();
    for r in &exact.rows {
        assert_eq!(Some(r.m_crit), scan.crossing(r.n));
    }

    let inv2 = ensemble::critical_m(&scan, 0.5, EpsilonScaling::InvN2).unwrap();
    assert!(inv2.rows.iter().all(|r| r.m_crit > 0.0 && !r.insufficient_range));
    let spread = inv2.n2_ratio_spread.unwrap();
    assert!(spread < 2.0, "{spread}");

    let inv1 = ensemble::critical_m(&scan, 0.5, EpsilonScaling::InvN).unwrap();
    assert!(inv1.rows.iter().all(|r| r.m_crit > 0.0));
}

#[test]
fn dense_coding_margin_of_pure_states() {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let margins: Vec<f64> = (0..20)
        .map(|_| {
            let rho = qstate::mix_random_states(dims(n), 1, &mut rng).unwrap();
            ensemble::dense_coding_usable(&rho).unwrap().margin
        })
        .collect();
    let target = (n as f64).log2() - 1.0 / 4f64.ln();
    assert!((stats::mean(&margins) - target).abs() < 0.05);
    let mixed = ensemble::dense_coding_usable(&MixedState::maximally_mixed(dims(n))).unwrap();
    assert!((mixed.margin + 4.0).abs() < 1e-9);
}

#[test]
fn dense_coding_crossing_near_n() {
    let n = 16;
    let scan = ensemble::run_dense_coding_scan(&DenseCodingScanConfig {
        dims: dims(n),
        m_list: vec![1, 2, 4, 8, 16, 32, 64],
        repetitions: 4,
        seed: 8,
        workers: 0,
    })
    .unwrap();
    let m = scan.crossing(n).expect("margin changes sign");
    assert!((n as f64 / 4.0..=4.0 * n as f64).contains(&m), "{m}");
}

#[test]
fn cumulants_of_full_rank_witness() {
    let ens = ensemble::run_w_ensemble(&EnsembleConfig::new(
        dims(32),
        200_000,
        1,
        WitnessSpec::RandomFullRank,
        9,
    ))
    .unwrap();
    let r = ensemble::cumulant_report(ens.distribution(), ens.witness.as_ref().unwrap(), 1).unwrap();
    let k2 = r.row(2).unwrap();
    assert!((k2.predicted - 1.0).abs() < 1e-9);
    assert!(k2.z.abs() <= 4.0, "{k2:?}");
}

#[test]
fn cumulants_of_rank2_half_witness() {
    let spec = WitnessSpec::Rank2 { lambda: 0.5 };
    let ens = ensemble::run_w_ensemble(&EnsembleConfig::new(dims(16), 200_000, 1, spec, 10)).unwrap();
    let w = ens.witness.as_ref().unwrap();
    let r = ensemble::cumulant_report(ens.distribution(), w, 1).unwrap();
    let k3 = r.row(3).unwrap();
    assert!((k3.predicted - 0.5).abs() < 1e-12);
    assert!(k3.empirical.within(0.5, 4.0), "{k3:?}");
}

#[test]
fn cumulants_of_product_witness() {
    let d = dims(8);
    let w = witness::witness_from_vector(qstate::PureState::basis(d, 1, 2).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| w.expectation(&qstate::sample_random_pure(d, &mut rng)).unwrap().w)
        .collect();
    let dist = EmpiricalDistribution::from_samples(&xs, HistogramSpec::W).unwrap();
    let r = ensemble::cumulant_report(&dist, &w, 1).unwrap();
    assert_eq!(r.row(2).unwrap().predicted, 1.0);
    // Exp(1) holds only as N grows; at 64 dimensions the variance is 63/65.
    assert!((dist.kappa2.value - 1.0).abs() < 0.05);
    assert!(dist.out_of_range > 0);
}

#[test]
fn mixture_cumulants_scale_with_m() {
    let m = 4;
    let ens = ensemble::run_w_ensemble(&EnsembleConfig::new(
        dims(16),
        100_000,
        m,
        WitnessSpec::RandomFullRank,
        12,
    ))
    .unwrap();
    let r = ensemble::cumulant_report(ens.distribution(), ens.witness.as_ref().unwrap(), m).unwrap();
    let k2 = r.row(2).unwrap();
    assert!((k2.predicted - 0.25).abs() < 1e-9);
    assert!(!k2.flagged, "{k2:?}");
}

#[test]
fn small_decay_scan_fits_exact_form() {
    let mut cfg = DecayConfig::new(dims(8), 4, 13);
    cfg.min_samples = 20_000;
    cfg.target_tail_count = 1000;
    let scan = ensemble::run_mixture_decay(&cfg).unwrap();
    assert_eq!(scan.rows.len(), 4);
    assert_eq!(scan.scan.rows.len(), 4);
    assert!(scan.rows.iter().all(|r| r.samples >= 20_000));
    let slope = scan.fit.unwrap().slope;
    assert!((-0.8..=-0.35).contains(&slope), "{slope}");
    assert!(ensemble::run_mixture_decay(&DecayConfig::new(dims(4), 0, 0)).is_err());
}

#[test]
fn ensemble_config_round_trips_through_json() {
    let cfg = EnsembleConfig::new(dims(4), 10, 2, "rank2:1/26".parse().unwrap(), 3);
    let json = serde_json::to_string(&cfg).unwrap();
    assert!(json.contains("\"rank2:"));
    let back: EnsembleConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn invalid_ensembles_are_rejected() {
    let d = dims(4);
    let zero_m = EnsembleConfig::new(d, 10, 0, WitnessSpec::RandomFullRank, 0);
    assert!(ensemble::run_w_ensemble(&zero_m).is_err());
    let zero_s = EnsembleConfig::new(d, 0, 1, WitnessSpec::RandomFullRank, 0);
    assert!(ensemble::run_w_ensemble(&zero_s).is_err());
    let too_big = EnsembleConfig::new(d, 10, 1, WitnessSpec::RankK { k: 17 }, 0);
    assert!(ensemble::run_w_ensemble(&too_big).is_err());
    assert!(ensemble::run_pt_spectrum(&PtSpectrumConfig::new(d, 0, 1, 0)).is_err());
}
