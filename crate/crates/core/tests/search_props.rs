use hlawka_core::inequalities::{xi_quartic, InequalityId};
use hlawka_core::sampling::{sample_gram, SampleConfig, ScaleLaw, Strategy};
use hlawka_core::search::{find_equality_points, minimize_xi, xi_gradient, SearchConfig};
use hlawka_core::{psd_check, GramParams, DEFAULT_TOL};

fn central_difference(g: &GramParams, h: f64) -> [f64; 6] {
    let base = g.to_array();
    std::array::from_fn(|k| {
        let (mut up, mut down) = (base, base);
        up[k] += h;
        down[k] -= h;
        (xi_quartic(&GramParams::from_array(up)) - xi_quartic(&GramParams::from_array(down)))
            / (2.0 * h)
    })
}

#[test]
fn gradient_matches_finite_differences() {
    let cfg = SampleConfig::new(Strategy::AmbientVectors(3), 1000, 31)
        .with_scale_law(ScaleLaw::HeavyTail);
    for g in sample_gram(&cfg).unwrap() {
        let scale = g.scale();
        let analytic = xi_gradient(&g);
        let fd = central_difference(&g, 1e-6 * scale);
        let norm = analytic
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(scale.powi(3));
        for k in 0..6 {
            let rel = (analytic[k] - fd[k]).abs() / norm;
            assert!(
                rel <= 1e-5,
                "component {k}: {} vs {} ({rel:e})",
                analytic[k],
                fd[k]
            );
        }
    }
}

#[test]
fn descent_reaches_singular_zero() {
    let cfg = SearchConfig {
        restarts: 8,
        seed: 2,
        ..SearchConfig::default()
    };
    let r = minimize_xi(&cfg).unwrap();
    assert!(
        r.min_value >= -1e-9 && r.min_value <= 1e-6,
        "{}",
        r.min_value
    );
    assert!(r.det_at_argmin.abs() <= 1e-6);
    assert!(psd_check(&r.argmin_gram, DEFAULT_TOL).is_psd);
    for s in &r.restarts {
        if s.value <= 1e-8 {
            assert!(s.det.abs() <= 1e-6, "{s:?}");
        }
    }
}

#[test]
fn single_restart_is_deterministic() {
    let cfg = SearchConfig {
        restarts: 1,
        seed: 3,
        ..SearchConfig::default()
    };
    assert_eq!(minimize_xi(&cfg).unwrap(), minimize_xi(&cfg).unwrap());
}

#[test]
fn strong_equality_points_are_flat() {
    let cfg = SearchConfig {
        restarts: 8,
        seed: 4,
        max_iters: 5000,
        ..SearchConfig::default()
    };
    let pts = find_equality_points(InequalityId::StrongHlawka, &cfg).unwrap();
    assert!(!pts.is_empty());
    for p in &pts {
        assert!(!p.witnesses.is_empty());
        assert!(psd_check(&p.gram, DEFAULT_TOL).rank_estimate <= 2);
    }
}

#[test]
fn corollary_pos_recovers_rank_one_ray() {
    let cfg = SearchConfig {
        restarts: 8,
        seed: 5,
        max_iters: 5000,
        ..SearchConfig::default()
    };
    let pts = find_equality_points(InequalityId::CorollaryPos, &cfg).unwrap();
    assert!(!pts.is_empty());
    for p in &pts {
        assert_eq!(psd_check(&p.gram, 1e-6).rank_estimate, 1, "{p:?}");
    }
}

#[test]
fn corollary_neg_recovers_planar_family() {
    let cfg = SearchConfig {
        restarts: 8,
        seed: 6,
        max_iters: 5000,
        ..SearchConfig::default()
    };
    let pts = find_equality_points(InequalityId::CorollaryNeg, &cfg).unwrap();
    assert!(!pts.is_empty());
    for p in &pts {
        let g = p.gram;
        assert!(g.p * g.q * g.r < 0.0);
        // Equality means r·x + q·y + p·z = 0.
        let combo = hlawka_core::inequalities::gram_quadratic_q(
            &g,
            &hlawka_core::inequalities::WeightTriple::new(g.r, g.q, g.p),
        );
        assert!(combo.abs() <= 1e-9);
    }
}
