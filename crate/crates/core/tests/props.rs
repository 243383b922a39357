//! Property-based invariants: prox nonexpansiveness, step-size
//! monotonicity of the proximal gradient, loss convexity and smoothness,
//! and LibSVM round-trips.

use std::sync::Arc;

use proptest::prelude::*;

use proxopt::data::{parse_libsvm_str, to_libsvm_string};
use proxopt::losses::{LabeledDataset, LossKind};
use proxopt::oracle::DiagQuadratic;
use proxopt::problem::{CompositeProblem, ProxCounter, ProxOracle};
use proxopt::regularizers::RegularizerKind;
use proxopt::step::prox_gradient_norm;
use proxopt::vector::dist2;

fn small_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, d)
}

fn any_regularizer() -> impl Strategy<Value = RegularizerKind> {
    prop_oneof![
        (0.05f64..2.0).prop_map(|lambda| RegularizerKind::L1 { lambda }),
        (0.05f64..2.0).prop_map(|lambda| RegularizerKind::Linf { lambda }),
        ((0.05f64..2.0), (0.2f64..2.0))
            .prop_map(|(lambda, delta)| RegularizerKind::HuberNorm { lambda, delta }),
        (0.3f64..3.0).prop_map(|radius| RegularizerKind::L1Ball { radius }),
        (0.05f64..2.0).prop_map(|lambda| RegularizerKind::L1InfGroups {
            lambda,
            boundaries: vec![2, 4],
        }),
    ]
}

proptest! {
    #[test]
    fn prox_is_firmly_nonexpansive(
        g in any_regularizer(),
        u1 in small_vec(4),
        u2 in small_vec(4),
        eta in 0.05f64..3.0,
    ) {
        let p1 = g.prox(&u1, eta);
        let p2 = g.prox(&u2, eta);
        prop_assert!(dist2(&p1, &p2) <= dist2(&u1, &u2) + 1e-12);
    }

    #[test]
    fn prox_gradient_norm_decreases_in_eta(
        g in any_regularizer(),
        x in small_vec(4),
        q in prop::collection::vec(0.2f64..3.0, 4),
        eta1 in 0.05f64..1.0,
        scale in 1.05f64..4.0,
    ) {
        let eta2 = eta1 * scale;
        let problem = CompositeProblem::new(
            Arc::new(DiagQuadratic { diag: q }),
            Arc::new(g),
            4,
        );
        let mut counter = ProxCounter::new();
        let n1 = prox_gradient_norm(&problem, &x, eta1, &mut counter).unwrap();
        let n2 = prox_gradient_norm(&problem, &x, eta2, &mut counter).unwrap();
        prop_assert!(n1 >= n2 - 1e-9 * (1.0 + n2));
    }

    #[test]
    fn descent_inequality_for_small_steps(
        x in small_vec(3),
        q in prop::collection::vec(0.2f64..3.0, 3),
        lambda in 0.05f64..1.0,
        shrink in 0.1f64..1.0,
    ) {
        // F(x) - F(x+) >= (eta/2) ||G_eta(x)||^2 for eta <= 1/L.
        let l = q.iter().fold(0.0f64, |m, &v| m.max(v));
        let eta = shrink / l;
        let problem = CompositeProblem::new(
            Arc::new(DiagQuadratic { diag: q }),
            Arc::new(RegularizerKind::L1 { lambda }),
            3,
        );
        let mut counter = ProxCounter::new();
        let step = proxopt::step::prox_grad_map(&problem, &x, eta, &mut counter).unwrap();
        let drop = problem.objective(&x) - problem.objective(&step.x_plus);
        let needed = 0.5 * eta * step.prox_grad_norm().powi(2);
        prop_assert!(drop >= needed - 1e-10 * (1.0 + drop.abs()));
    }

    #[test]
    fn losses_are_convex_in_z(
        z1 in -8.0f64..8.0,
        z2 in -8.0f64..8.0,
        t in 0.0f64..1.0,
        b in -2.0f64..2.0,
        delta in 0.3f64..2.0,
        p in prop::sample::select(vec![2u32, 4, 6]),
    ) {
        let kinds = [
            LossKind::Square,
            LossKind::Huber { delta },
            LossKind::PowerP { p },
        ];
        for kind in kinds {
            let mid = kind.value(t * z1 + (1.0 - t) * z2, b);
            let chord = t * kind.value(z1, b) + (1.0 - t) * kind.value(z2, b);
            prop_assert!(mid <= chord + 1e-12 * (1.0 + chord.abs()));
        }
        // classification losses with labels in {-1, +1}
        let label = if b >= 0.0 { 1.0 } else { -1.0 };
        for kind in [LossKind::SquaredHinge, LossKind::Logistic] {
            let mid = kind.value(t * z1 + (1.0 - t) * z2, label);
            let chord = t * kind.value(z1, label) + (1.0 - t) * kind.value(z2, label);
            prop_assert!(mid <= chord + 1e-12 * (1.0 + chord.abs()));
        }
    }

    #[test]
    fn loss_derivatives_are_beta_lipschitz(
        z1 in -8.0f64..8.0,
        z2 in -8.0f64..8.0,
        b in -2.0f64..2.0,
        delta in 0.3f64..2.0,
    ) {
        let cases = [(LossKind::Square, b), (LossKind::Huber { delta }, b)];
        for (kind, b) in cases {
            let beta = kind.curvature_bound().unwrap();
            let lhs = (kind.derivative(z1, b) - kind.derivative(z2, b)).abs();
            prop_assert!(lhs <= beta * (z1 - z2).abs() + 1e-12);
        }
        let label = if b >= 0.0 { 1.0 } else { -1.0 };
        for kind in [LossKind::SquaredHinge, LossKind::Logistic] {
            let beta = kind.curvature_bound().unwrap();
            let lhs = (kind.derivative(z1, label) - kind.derivative(z2, label)).abs();
            prop_assert!(lhs <= beta * (z1 - z2).abs() + 1e-12);
        }
    }

    #[test]
    fn libsvm_round_trip(
        rows in prop::collection::vec(
            prop::collection::vec((0u32..6, -100.0f64..100.0), 0..5),
            0..8,
        ),
        labels in prop::collection::vec(-10.0f64..10.0, 8),
    ) {
        // normalize to valid strictly-increasing sparse rows
        let rows: Vec<Vec<(u32, f64)>> = rows
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|(i, _)| *i);
                r.dedup_by_key(|(i, _)| *i);
                r
            })
            .collect();
        let n = rows.len();
        let data = LabeledDataset::new(rows, labels[..n].to_vec(), 6).unwrap();
        let text = to_libsvm_string(&data);
        let parsed = parse_libsvm_str(&text).unwrap();
        // dimension shrinks to the max stored index; compare row contents
        prop_assert_eq!(parsed.n_rows(), data.n_rows());
        for i in 0..data.n_rows() {
            prop_assert_eq!(parsed.row(i), data.row(i));
            prop_assert_eq!(parsed.labels()[i].to_bits(), data.labels()[i].to_bits());
        }
        // a second round trip is exactly stable
        prop_assert_eq!(to_libsvm_string(&parsed), text);
    }

    #[test]
    fn moreau_decomposition_reconstructs_input(
        v in small_vec(4),
        t in 0.05f64..3.0,
    ) {
        let prox = proxopt::regularizers::prox_linf(&v, t);
        let scaled: Vec<f64> = v.iter().map(|x| x / t).collect();
        let proj = proxopt::regularizers::project_l1_ball(&scaled, 1.0);
        for i in 0..v.len() {
            // exact up to one rounding of the re-addition
            let back = prox[i] + t * proj[i];
            prop_assert!((back - v[i]).abs() <= 1e-15 * (1.0 + v[i].abs()));
        }
    }
}
