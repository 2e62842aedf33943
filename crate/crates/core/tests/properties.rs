use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use quiverflow::flow::{flow_f64, FlowOptions};
use quiverflow::handsaw::handsaw_adjoint;
use quiverflow::io::{rep_from_json, rep_to_json};
use quiverflow::linalg::{self, c, frob_all, CMat};
use quiverflow::oracles::{adjoint_pair, fd_gradient, fd_hessian_from_gradient, thin_hn_type};
use quiverflow::quiver::handsaw_to_quiver;
use quiverflow::rep::{energy, grad_energy, group_act, hessian_matrix, moment_real, tangent_inner};
use quiverflow::{fixtures, DimVector, GroupElement, Representation, StabilityParameter};
use std::sync::Arc;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights summing to zero against the dimension vector.
fn balanced_alpha(raw: &[f64], dims: &DimVector) -> Vec<f64> {
    let total: usize = dims.0.iter().sum();
    let shift = raw.iter().zip(&dims.0).map(|(a, &d)| a * d as f64).sum::<f64>() / total as f64;
    raw.iter().map(|a| a - shift).collect()
}

fn random_case(seed: u64, weights: &[f64]) -> (Representation, Vec<f64>) {
    let mut r = rng(seed);
    let n = 2 + (seed % 2) as usize;
    let x = fixtures::random_doubled(&mut r, n, 2);
    let alpha = balanced_alpha(&weights[..n], &x.dims);
    (x, alpha)
}

fn thin_a3(seed: u64, zero_mask: u8) -> Representation {
    let mut x = Representation::random(fixtures::a3_quiver(), DimVector(vec![1, 1, 1]), &mut rng(seed));
    for (i, m) in x.mats.iter_mut().enumerate() {
        if zero_mask & (1 << i) != 0 {
            m.fill(c(0.0, 0.0));
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), w in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (x, alpha) = random_case(seed, &w);
        let g = grad_energy(&x, &alpha);
        let fd = fd_gradient(&x, &alpha, 1e-5);
        let err: Vec<CMat> = g.iter().zip(&fd).map(|(a, b)| a - b).collect();
        prop_assert!(frob_all(&err) <= 1e-6 * (1.0 + frob_all(&g)), "gradient error {}", frob_all(&err));
    }

    #[test]
    fn hessian_is_symmetric_and_matches_gradient_differences(seed in any::<u64>(), w in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (x, alpha) = random_case(seed, &w);
        let h = hessian_matrix(&x, &alpha);
        let asym = (&h - h.transpose()).norm();
        prop_assert!(asym <= 1e-10 * (1.0 + h.norm()), "asymmetry {asym}");
        let fd = fd_hessian_from_gradient(&x, &alpha, 1e-6);
        prop_assert!((&h - fd).norm() <= 1e-5 * (1.0 + h.norm()));
    }

    #[test]
    fn energy_decreases_along_the_flow(seed in any::<u64>(), w in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (x, alpha) = random_case(seed, &w);
        let opts = FlowOptions { max_time: 5.0, ..FlowOptions::default() };
        let r = flow_f64(&x, &alpha, &opts).unwrap();
        for pair in r.trajectory.windows(2) {
            prop_assert!(pair[1].energy <= pair[0].energy * (1.0 + 1e-12) + 1e-14);
        }
        prop_assert!(r.final_energy <= energy(&x, &alpha) + 1e-14);
    }

    #[test]
    fn unitary_action_preserves_energy_and_conjugates_the_moment_map(seed in any::<u64>(), w in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (x, alpha) = random_case(seed, &w);
        let mut r = rng(seed ^ 0x5eed);
        let g = GroupElement { blocks: x.dims.0.iter().map(|&d| linalg::random_unitary(&mut r, d)).collect() };
        let y = group_act(&g, &x).unwrap();
        prop_assert!((energy(&y, &alpha) - energy(&x, &alpha)).abs() <= 1e-10 * (1.0 + energy(&x, &alpha)));
        let (mx, my) = (moment_real(&x), moment_real(&y));
        for ((gb, a), b) in g.blocks.iter().zip(&mx.blocks).zip(&my.blocks) {
            let conj = gb * a * gb.adjoint();
            prop_assert!(linalg::frob(&(conj - b)) <= 1e-10 * (1.0 + linalg::frob(a)));
        }
    }

    #[test]
    fn gradient_is_orthogonal_to_the_unitary_orbit(seed in any::<u64>(), w in prop::collection::vec(-2.0f64..2.0, 3)) {
        let (x, alpha) = random_case(seed, &w);
        let mut r = rng(seed ^ 0x0b17);
        // Tangent to the unitary orbit: ρ_x(u) for anti-Hermitian u.
        let u: Vec<CMat> = x.dims.0.iter().map(|&d| {
            let m = linalg::gaussian_cmat(&mut r, d, d);
            &m - m.adjoint()
        }).collect();
        let orbit = quiverflow::rep::inf_action(&x, &u);
        let g = grad_energy(&x, &alpha);
        prop_assert!(tangent_inner(&g, &orbit).abs() <= 1e-10 * (1.0 + frob_all(&g) * frob_all(&orbit)));
    }

    #[test]
    fn representation_json_round_trip(seed in any::<u64>()) {
        let x = fixtures::random_doubled(&mut rng(seed), 3, 3);
        prop_assert_eq!(rep_from_json(&rep_to_json(&x)).unwrap(), x);
    }

    #[test]
    fn handsaw_adjoint_is_an_involution(seed in any::<u64>(), n in 2usize..4) {
        let v: Vec<usize> = (1..n).map(|i| 1 + (seed as usize >> i) % 2).collect();
        let w: Vec<usize> = (0..n).map(|i| 1 + (seed as usize >> (i + 4)) % 2).collect();
        let (q, d) = handsaw_to_quiver(n, &v, &w).unwrap();
        let x = Representation::random(Arc::new(q), d, &mut rng(seed));
        let back = handsaw_adjoint(&handsaw_adjoint(&x).unwrap()).unwrap();
        prop_assert!(back.distance(&x) <= 1e-12 * (1.0 + x.norm()));
    }

    #[test]
    fn thin_hn_type_depends_only_on_the_support(seed in any::<u64>(), mask in 0u8..4, a in -3i64..4, b in -3i64..4) {
        let alpha = StabilityParameter::from_ints(&[a, b, -a - b]);
        let x = thin_a3(seed, mask);
        // Rescaling nonzero arrows is a torus action and must not change the type.
        let y = x.with_mats(x.mats.iter().map(|m| m * c(2.5, -1.0)).collect());
        let (hx, hy) = (thin_hn_type(&x, &alpha).unwrap(), thin_hn_type(&y, &alpha).unwrap());
        prop_assert_eq!(&hx.factors, &hy.factors);
        let total: Vec<usize> = (0..3).map(|i| hx.factors.iter().map(|d| d.0[i]).sum()).collect();
        prop_assert_eq!(total, vec![1, 1, 1]);
        for s in hx.slopes.windows(2) {
            prop_assert!(s[0] > s[1]);
        }
    }

    #[test]
    fn thin_hn_type_reverses_under_duality(seed in any::<u64>(), mask in 0u8..4, a in -3i64..4, b in -3i64..4) {
        let alpha = StabilityParameter::from_ints(&[a, b, -a - b]);
        let x = thin_a3(seed, mask);
        let (y, beta) = adjoint_pair(&x, &alpha);
        let hx = thin_hn_type(&x, &alpha).unwrap();
        let hy = thin_hn_type(&y, &beta).unwrap();
        let mut rev = hy.factors.clone();
        rev.reverse();
        prop_assert_eq!(hx.factors, rev);
    }
}
