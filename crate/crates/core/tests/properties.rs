use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;

use spfw::domains::{Domain, MEMBERSHIP_TOL};
use spfw::linalg::{dot, Matrix};
use spfw::objectives::{PointPair, QuadBilinearProblem, SaddleMode, SaddleObjective};
use spfw::rng::SeededRng;
use spfw::solver::{self, ActiveSet, Algorithm, SolverOptions, StepRule};

fn domain(kind: u8, d: usize) -> Domain {
    match kind % 4 {
        0 => Domain::unit_cube(d).unwrap(),
        1 => Domain::simplex(d).unwrap(),
        2 => Domain::l1_ball(vec![0.25; d], 1.5).unwrap(),
        _ => Domain::l2_ball(vec![-0.5; d], 2.0).unwrap(),
    }
}

fn direction() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linmin_beats_sampled_points(kind in 0u8..4, dir in direction(), seed in any::<u64>()) {
        let dom = domain(kind, dir.len());
        let s = dom.linmin(&dir).unwrap();
        prop_assert!(dom.contains(&s, MEMBERSHIP_TOL).unwrap());
        let mut rng = SeededRng::new(seed);
        for _ in 0..50 {
            let v = dom.sample(&mut rng);
            prop_assert!(dot(&dir, &s) <= dot(&dir, &v) + 1e-9);
        }
    }

    #[test]
    fn linmin_is_scale_invariant(kind in 0u8..4, dir in direction(), c in 0.01f64..100.0) {
        let dom = domain(kind, dir.len());
        let scaled: Vec<f64> = dir.iter().map(|v| v * c).collect();
        let a = dom.linmin(&dir).unwrap();
        let b = dom.linmin(&scaled).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert_relative_eq!(*u, *v, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn spectral_norm_matches_svd(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let m = Matrix::from_fn(rows, cols, |_, _| rng.uniform_in(-1.0, 1.0));
        let reference = DMatrix::from_fn(rows, cols, |i, j| m.get(i, j));
        let sv = reference.singular_values().max();
        assert_relative_eq!(m.spectral_norm(), sv, epsilon = 1e-12, max_relative = 1e-7);
        prop_assert!(m.spectral_norm_upper_bound() >= sv - 1e-12);
    }

    #[test]
    fn active_set_weights_stay_normalized(ops in prop::collection::vec((0usize..4, 0.0f64..1.0, any::<bool>()), 1..60)) {
        let verts: Vec<Vec<f64>> = (0..4).map(|i| {
            let mut v = vec![0.0; 4];
            v[i] = 1.0;
            v
        }).collect();
        let mut act = ActiveSet::singleton(verts[0].clone());
        for (i, gamma, away) in ops {
            let s = &verts[i];
            if away && act.weight_of(s) > 0.0 {
                let a = act.weight_of(s);
                let gmax = if a >= 1.0 { f64::INFINITY } else { a / (1.0 - a) };
                let g = (gamma * 2.0).min(gmax);
                act.away_update(s, g, g == gmax);
            } else {
                act.fw_update(s, gamma);
            }
            assert_relative_eq!(act.weight_sum(), 1.0, epsilon = 1e-10);
            prop_assert!(act.weights().iter().all(|&w| w > 0.0));
            let z = act.reconstruct();
            prop_assert!(z.iter().all(|&v| v >= -1e-12));
            assert_relative_eq!(z.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn quad_field_is_strongly_monotone(seed in any::<u64>(), mu in 0.1f64..10.0) {
        let mut rng = SeededRng::new(seed);
        let p = QuadBilinearProblem::generate(4, mu, 0.5, SaddleMode::Interior, &mut rng).unwrap();
        let pd = p.domain();
        for _ in 0..20 {
            let z = pd.sample(&mut rng);
            let w = pd.sample(&mut rng);
            let f = |z: &PointPair| {
                let gy: Vec<f64> = p.grad_y(z).iter().map(|v| -v).collect();
                PointPair::new(p.grad_x(z), gy)
            };
            let d = z.sub(&w);
            let lhs = f(&z).sub(&f(&w)).dot(&d);
            prop_assert!(lhs >= mu * d.dot(&d) - 1e-9);
        }
    }

    #[test]
    fn iterates_stay_feasible(seed in any::<u64>(), algo in 0u8..3) {
        let mut rng = SeededRng::new(seed);
        let p = QuadBilinearProblem::generate(3, 2.0, 0.5, SaddleMode::Vertex, &mut rng).unwrap();
        let algorithm = [Algorithm::SpFw, Algorithm::SpAfw, Algorithm::SpPfw][algo as usize];
        let opts = SolverOptions::new(0.0, 60).recording_iterates();
        let tr = solver::run(&p, p.domain(), StepRule::Universal, algorithm, &opts).unwrap();
        for r in &tr.records {
            let z = r.iterate.as_ref().unwrap();
            prop_assert!(p.domain().contains(z, 1e-9).unwrap());
            prop_assert!(r.gamma >= 0.0 && r.gamma <= r.gamma_max);
            let g = &r.gaps;
            prop_assert!(g.g_fw >= g.h.unwrap() - 1e-9);
            prop_assert!(g.h.unwrap() >= g.w.unwrap() - 1e-9);
        }
    }
}
