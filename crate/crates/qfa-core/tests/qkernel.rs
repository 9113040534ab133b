use nalgebra::DMatrix;
use proptest::prelude::*;
use qfa_core::qkernel::*;
use std::f64::consts::SQRT_2;

fn prob(outcomes: &[Outcome], label: &str) -> f64 {
    outcomes
        .iter()
        .find(|o| o.label == label)
        .unwrap()
        .probability
}

/// (u, x, y, z) counter update for one symbol with digit `d`.
fn counter_matrix(d: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 4.0, 0.0, 0.0, //
            d, 0.0, 4.0, 0.0, //
            0.0, d, 0.0, 1.0,
        ],
    )
}

#[test]
fn identity_channel_keeps_state() {
    let psi = QuantumState::from_real(&[0.6, 0.8]).unwrap();
    let out = apply_channel(&QuantumChannel::identity(2), &psi).unwrap();
    assert_eq!(out.len(), 1);
    assert!((out[0].probability - 1.0).abs() < 1e-15);
    assert_eq!(out[0].post.as_ref().unwrap(), &psi);
}

#[test]
fn born_rule() {
    let psi = QuantumState::from_real(&[0.6, 0.8]).unwrap();
    let out = apply_channel(&QuantumChannel::basis_measurement(2), &psi).unwrap();
    assert!((prob(&out, "0") - 9.0 / 25.0).abs() < 1e-12);
    assert!((prob(&out, "1") - 16.0 / 25.0).abs() < 1e-12);
}

#[test]
fn rotation_then_measure() {
    let theta = std::f64::consts::PI * SQRT_2;
    let rot = apply_channel(
        &QuantumChannel::rotation(2, theta),
        &QuantumState::basis(2, 0),
    )
    .unwrap();
    let psi = rot[0].post.clone().unwrap();
    let out = apply_channel(&QuantumChannel::basis_measurement(2), &psi).unwrap();
    assert!((prob(&out, "1") - 0.929_108_092_834).abs() < 1e-11);
    assert!((prob(&out, "1") - theta.sin().powi(2)).abs() < 1e-12);
}

#[test]
fn errors_on_mismatch_and_incomplete() {
    let psi = QuantumState::basis(3, 0);
    assert!(matches!(
        apply_channel(&QuantumChannel::identity(2), &psi),
        Err(QkError::DimensionMismatch { .. })
    ));
    let twice = QuantumChannel::new(
        2,
        vec![
            ("x".into(), CMat::identity(2, 2)),
            ("y".into(), CMat::identity(2, 2)),
        ],
    );
    let report = check_channel(&twice);
    assert!(!report.pass);
    assert!((report.residual - 1.0).abs() < 1e-12);
    assert!(matches!(
        apply_channel(&twice, &QuantumState::basis(2, 0)),
        Err(QkError::Incomplete(_))
    ));
    assert!(QuantumState::from_real(&[0.0, 0.0]).is_err());
}

#[test]
fn measurement_report_is_tight() {
    let r = check_channel(&QuantumChannel::basis_measurement(4));
    assert!(r.pass && r.residual < 1e-15);
    for ch in [
        QuantumChannel::reset(3),
        QuantumChannel::coin(4),
        QuantumChannel::coin(1),
    ] {
        assert!(check_channel(&ch).pass);
    }
}

#[test]
fn dilation_examples() {
    let ch = dilate_contraction(&DMatrix::identity(2, 2), 1.0).unwrap();
    assert_eq!(ch.branches[0].label, "go");
    assert!((&ch.branches[0].op - CMat::identity(2, 2)).norm() < 1e-12);
    assert!(ch.branches[1].op.norm() < 1e-7);

    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0]));
    let ch = dilate_contraction(&diag, 1.0).unwrap();
    let expected = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0), c(1.0)]));
    assert!((&ch.branches[1].op - expected).norm() < 1e-12);

    for d in [1.0, 2.0] {
        let ch = dilate_contraction(&counter_matrix(d), 8.0).unwrap();
        let r = check_channel(&ch);
        assert!(r.pass && r.residual < 1e-12, "residual {}", r.residual);
    }
    assert!(matches!(
        dilate_contraction(&counter_matrix(2.0), 4.0),
        Err(QkError::Contraction { .. })
    ));
}

#[test]
fn rank_one_decomposition() {
    let coin = QuantumChannel::coin(3);
    for b in &coin.branches {
        let (u, psi) = rank_one(&b.op, 1e-12).unwrap();
        assert!(((&u * psi.adjoint()) - &b.op).norm() < 1e-12);
    }
    assert!(rank_one(&CMat::identity(2, 2), 1e-9).is_none());
}

fn random_unitary(seed: &[f64]) -> CMat {
    let d = 3;
    let m = CMat::from_fn(d, d, |r, k| C64::new(seed[r * d + k], seed[9 + r * d + k]));
    m.qr().q()
}

proptest! {
    #[test]
    fn unitary_preserves_norm(seed in proptest::collection::vec(-1.0f64..1.0, 18),
                              v in proptest::collection::vec(-1.0f64..1.0, 3)) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let u = random_unitary(&seed);
        let ch = QuantumChannel::unitary("u", u);
        let psi = QuantumState::from_real(&v).unwrap();
        let out = apply_channel(&ch, &psi).unwrap();
        prop_assert!((out[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one(seed in proptest::collection::vec(-1.0f64..1.0, 18),
                                v in proptest::collection::vec(-1.0f64..1.0, 3)) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let u = random_unitary(&seed);
        let meas = QuantumChannel::basis_measurement(3);
        let rotated = QuantumChannel::new(
            3,
            meas.branches.iter().map(|b| (b.label.clone(), &b.op * &u)).collect(),
        );
        let psi = QuantumState::from_real(&v).unwrap();
        let out = apply_channel(&rotated, &psi).unwrap();
        let total: f64 = out.iter().map(|o| o.probability).sum();
        prop_assert!(out.iter().all(|o| o.probability >= 0.0));
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dilation_always_complete(entries in proptest::collection::vec(-3.0f64..3.0, 9)) {
        let m = DMatrix::from_row_slice(3, 3, &entries);
        let scale = 1.0 + m.clone().singular_values().max();
        let ch = dilate_contraction(&m, scale).unwrap();
        prop_assert!(check_channel(&ch).pass);
    }
}
