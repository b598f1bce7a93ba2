use std::collections::BTreeMap;

use nalgebra::DMatrix;
use spfw::config::RunConfig;
use spfw::constants::{curvature_bound, geometric_rate, nu_interior, nu_polytope};
use spfw::harness::{self, Problem};

fn header(csv: &str) -> BTreeMap<String, String> {
    csv.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l[1..].trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(h: &BTreeMap<String, String>, key: &str) -> f64 {
    h[key].parse().unwrap_or_else(|_| panic!("{key} = {}", h[key]))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn quad_header_matches_recomputation() {
    for (saddle, algorithm, mu) in [("interior", "spfw", 20.0), ("vertex", "spafw", 50.0)] {
        let text = format!(
            "problem = quad-bilinear\ndim = 6\nmu = {mu}\nsaddle = {saddle}\nalgorithm = {algorithm}\nrule = adaptive\nmax_iters = 20\nseed = 9\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let out = harness::execute(&cfg).unwrap();
        let h = header(&out.csv);

        let Problem::Quad(p) = Problem::build(&cfg).unwrap() else {
            panic!("expected a quadratic problem")
        };
        let m = p.matrix();
        let sigma = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
            .singular_values()
            .max();
        let d = (6.0f64).sqrt();
        assert!(close(num(&h, "L"), mu + sigma));
        assert!(close(num(&h, "D_X"), d) && close(num(&h, "D_Y"), d));
        let c = curvature_bound(mu + sigma, d, d).unwrap();
        assert!(close(num(&h, "C"), c));
        let (delta_mu, nu) = if saddle == "interior" {
            let dx = p.saddle().x.iter().map(|v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
            let dy = p.saddle().y.iter().map(|v| v.min(1.0 - v)).fold(f64::INFINITY, f64::min);
            assert!(close(num(&h, "delta_X"), dx));
            nu_interior(dx, dy, mu, mu, d, d, sigma, sigma).unwrap()
        } else {
            let w = 1.0 / d;
            assert!(close(num(&h, "delta_A"), w));
            nu_polytope(Some(w), Some(w), mu, mu, d, d, sigma, sigma).unwrap()
        };
        assert!(close(num(&h, "nu"), nu), "{saddle}: nu {} vs {nu}", h["nu"]);
        assert!(close(num(&h, "delta_mu"), delta_mu));
        assert!(close(num(&h, "rho"), geometric_rate(nu, delta_mu, c).unwrap()));
    }
}

#[test]
fn fp_on_pennies_emits_ten_rows() {
    let cfg = RunConfig::parse(
        "problem = matrix-game\nmatrix = 1,-1;-1,1\nalgorithm = fp\nmax_iters = 10\neps = 0\n",
    )
    .unwrap();
    let out = harness::execute(&cfg).unwrap();
    let ts: Vec<&str> = out
        .csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ts, (0..10).map(|t| t.to_string()).collect::<Vec<_>>());
    assert_eq!(out.exit_code(), harness::EXIT_BUDGET);
}

#[test]
fn decoupled_adaptive_fit_is_at_least_theoretical() {
    let cfg = RunConfig::parse(
        "problem = quad-bilinear\ndim = 10\nmu = 1\nmatrix_scale = 0\nrule = adaptive\nmax_iters = 500\neps = 0\nseed = 3\n",
    )
    .unwrap();
    let out = harness::execute(&cfg).unwrap();
    assert_eq!(header(&out.csv)["nu"].parse::<f64>().unwrap(), 1.0);
    let fit = harness::ratefit(&out.csv).unwrap();
    assert_eq!(fit.meets_theory(), Some(true), "{}", fit.report());
}
