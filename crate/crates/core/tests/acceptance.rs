//! Exit criteria. Runs every criterion, prints one line each and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use hlawka_core::boundary::{
    classify_equality, endpoint_dominance_check, identity_residual, p_interval, solve_condition_mu,
    substitute_dependence, DependenceCase, DependenceTag, IntervalKind, PartialGram,
};
use hlawka_core::inequalities::{
    cauchy_schwarz_slack, classical_hlawka_slack, corollary_slack, cyclic_strong_decomposition,
    reduced_forms, strong_hlawka_slack, substituted_r, xi_quartic, InequalityId, WeightTriple,
};
use hlawka_core::sampling::{draw_triple, stream_rng, ScaleLaw, Strategy};
use hlawka_core::search::{minimize_xi, xi_gradient, SearchConfig};
use hlawka_core::{
    gram_from_vectors, psd_check, realize_vectors, GramParams, VectorTriple, DEFAULT_TOL,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const DIMS: [usize; 4] = [1, 2, 3, 5];

fn mixed_triple(seed: u64, i: u64) -> VectorTriple {
    let d = DIMS[(i % 4) as usize];
    let law = if (i / 4) % 2 == 0 {
        ScaleLaw::Normal
    } else {
        ScaleLaw::HeavyTail
    };
    draw_triple(Strategy::AmbientVectors(d), law, seed, i)
}

fn strong_suite() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut worst_strong = f64::INFINITY;
    let mut worst_cyclic = f64::INFINITY;
    let mut worst_classical = f64::INFINITY;
    for i in 0..1_000_000u64 {
        let t = mixed_triple(42, i);
        let scale = gram_from_vectors(&t).scale();
        let strong = strong_hlawka_slack(&t, DEFAULT_TOL);
        worst_strong = worst_strong.min(strong.scaled_slack(scale));
        let s2 = scale.powi(InequalityId::StrongHlawka.degree());
        for term in cyclic_strong_decomposition(&t) {
            worst_cyclic = worst_cyclic.min(term / s2);
        }
        worst_classical =
            worst_classical.min(classical_hlawka_slack(&t, DEFAULT_TOL).scaled_slack(scale));
    }
    let secs = start.elapsed().as_secs_f64();
    (
        outcome(
            worst_strong >= -1e-9 && secs < 60.0,
            format!("10^6 triples, min scaled slack {worst_strong:.3e}, {secs:.1}s"),
        ),
        outcome(
            worst_cyclic >= -1e-9 && worst_classical >= -1e-9,
            format!(
                "min cyclic term {worst_cyclic:.3e}, min classical slack {worst_classical:.3e}"
            ),
        ),
    )
}

fn xi_consistency() -> Outcome {
    let strategies = [
        Strategy::AmbientVectors(3),
        Strategy::AmbientVectors(5),
        Strategy::Factor3x3,
        Strategy::BoundaryRank2,
        Strategy::BoundaryRank1,
    ];
    let mut worst: f64 = 0.0;
    for i in 0..100_000u64 {
        let law = if i % 2 == 0 {
            ScaleLaw::Normal
        } else {
            ScaleLaw::HeavyTail
        };
        let t = draw_triple(strategies[(i % 5) as usize], law, 3, i);
        let g = gram_from_vectors(&t);
        // Reduced sides straight from the vectors.
        let s: Vec<f64> = (0..t.dim())
            .map(|k| t.x()[k] + t.y()[k] + t.z()[k])
            .collect();
        let (a, b, c) = g.norms();
        let l = a * b * c * s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = g.nsq_x * g.r + g.nsq_y * g.q - g.nsq_z * g.p + 2.0 * g.q * g.r;
        let err = (xi_quartic(&g) - (l * l - r * r)).abs() / g.scale().powi(4);
        worst = worst.max(err);
    }
    outcome(
        worst <= 1e-9,
        format!("10^5 samples, max |xi - (L^2 - R^2)|/scale^4 {worst:.3e}"),
    )
}

fn free_block(tag: DependenceTag, seed: u64, i: u64) -> PartialGram {
    let g = gram_from_vectors(&draw_triple(
        Strategy::AmbientVectors(2),
        ScaleLaw::Normal,
        seed,
        i,
    ));
    PartialGram::for_case(tag, g.nsq_x, g.nsq_y, g.p)
}

fn factorizations() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for tag in DependenceTag::ALL {
        let mut worst: f64 = 0.0;
        for i in 0..10_000u64 {
            let mut rng = stream_rng(500 + tag as u64, i);
            let case = DependenceCase::new(
                tag,
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            worst = worst.max(identity_residual(&case, &free_block(tag, 9, i)).unwrap());
        }
        pass &= worst <= 1e-10;
        parts.push(format!("{tag} {worst:.3e}"));
    }
    outcome(pass, format!("max relative residual: {}", parts.join(", ")))
}

fn sharpness_witnesses() -> Outcome {
    let e1 = vec![1.0, 0.0, 0.0];
    let ones = gram_from_vectors(&VectorTriple::new(e1.clone(), e1.clone(), e1.clone()).unwrap());
    let pos = corollary_slack(&ones, DEFAULT_TOL).unwrap();

    let h = 3f64.sqrt() / 2.0;
    let planar =
        gram_from_vectors(&VectorTriple::new(e1, vec![0.5, h, 0.0], vec![0.5, -h, 0.0]).unwrap());
    let neg = corollary_slack(&planar, DEFAULT_TOL).unwrap();
    let r = substituted_r(&planar, &WeightTriple::ONES);

    let pass = pos.inequality_id == InequalityId::CorollaryPos
        && (pos.lhs - 3.0).abs() <= 1e-12
        && (pos.rhs - 3.0).abs() <= 1e-12
        && pos.slack.abs() <= 1e-12
        && neg.inequality_id == InequalityId::CorollaryNeg
        && (neg.lhs - 0.75).abs() <= 1e-12
        && (neg.rhs - 0.75).abs() <= 1e-12
        && neg.slack.abs() <= 1e-12
        && r.abs() <= 1e-12
        && [planar.p, planar.q, planar.r]
            .iter()
            .zip([0.5, 0.5, -0.5])
            .all(|(v, w)| (v - w).abs() <= 1e-12);
    outcome(
        pass,
        format!(
            "ones lhs={} rhs={}; planar120 lhs={:.15} rhs={:.15}, R(1,1,1)={r:.1e}",
            pos.lhs, pos.rhs, neg.lhs, neg.rhs
        ),
    )
}

fn classifier() -> Outcome {
    let mut generated = 0;
    let mut matched = 0;
    let mut flat = 0;
    let mut strict_negative_branch = 0;
    let mut worst_slack: f64 = 0.0;
    let mut i = 0u64;
    while generated < 1_000 {
        let tag = DependenceTag::ALL[(i % 3) as usize];
        let mut rng = stream_rng(600, i);
        let lambda = rng.random_range(-3.0..3.0);
        let root = rng.random_range(0..2usize);
        let free = free_block(tag, 10, i);
        i += 1;
        let Some(mus) = solve_condition_mu(tag, lambda, &free).unwrap() else {
            continue;
        };
        generated += 1;
        let g = substitute_dependence(&DependenceCase::new(tag, lambda, mus[root]), &free).unwrap();
        let t = realize_vectors(&g, DEFAULT_TOL).unwrap();
        let scale = g.scale();
        let w = classify_equality(&t, DEFAULT_TOL);
        let s = strong_hlawka_slack(&t, DEFAULT_TOL);
        let ok_witness = w.iter().any(|w| w.case.tag == tag);
        let ok_slack = s.slack.abs() <= 1e-8 * scale * scale;
        matched += ok_witness as usize;
        flat += ok_slack as usize;
        worst_slack = worst_slack.max(s.slack.abs() / (scale * scale));
        if !ok_slack && reduced_forms(&g, DEFAULT_TOL).unwrap().r_bold < 0.0 {
            strict_negative_branch += 1;
        }
    }

    let mut rank3_hits = 0;
    for i in 0..1_000u64 {
        let t = draw_triple(Strategy::Factor3x3, ScaleLaw::Normal, 601, i);
        rank3_hits += !classify_equality(&t, DEFAULT_TOL).is_empty() as usize;
    }

    outcome(
        matched == generated && flat == generated && rank3_hits == 0,
        format!(
            "constructed: {matched}/{generated} witnessed, {flat}/{generated} with |slack| <= 1e-8*scale^2 \
             (max {worst_slack:.3e}; {strict_negative_branch} misses have R < 0); rank-3 witnessed: {rank3_hits}/1000"
        ),
    )
}

fn xi_grid_min() -> f64 {
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..13).map(|k| lo + (hi - lo) * k as f64 / 12.0).collect()
    };
    let norms = axis(0.0, 1.0);
    let inner = axis(-1.0, 1.0);
    let mut min = f64::INFINITY;
    for &a2 in &norms {
        for &b2 in &norms {
            for &c2 in &norms {
                for &p in &inner {
                    if p * p > a2 * b2 {
                        continue;
                    }
                    for &q in &inner {
                        if q * q > a2 * c2 {
                            continue;
                        }
                        for &r in &inner {
                            let g = GramParams::new(a2, b2, c2, p, q, r);
                            if r * r > b2 * c2 || !psd_check(&g, DEFAULT_TOL).is_psd {
                                continue;
                            }
                            min = min.min(xi_quartic(&g));
                        }
                    }
                }
            }
        }
    }
    min
}

fn boundary_attainment() -> Outcome {
    let result = minimize_xi(&SearchConfig::default()).unwrap();
    let scale = result.argmin_gram.scale();
    let grid = xi_grid_min();
    let pass = result.min_value >= -1e-9 * scale.powi(4)
        && result.min_value <= 1e-6 * scale.powi(4)
        && result.det_at_argmin.abs() <= 1e-6 * scale.powi(3)
        && grid >= -1e-9;
    outcome(
        pass,
        format!(
            "64 restarts: min xi {:.3e}, det {:.3e}; grid min xi {grid:.3e}",
            result.min_value, result.det_at_argmin
        ),
    )
}

fn gradient_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..1_000u64 {
        let mut rng = stream_rng(800, i);
        let s = 10f64.powf(rng.random_range(0.0..1.0));
        let g = gram_from_vectors(&draw_triple(
            Strategy::AmbientVectors(3),
            ScaleLaw::Normal,
            801,
            i,
        ))
        .scaled(s);
        let scale = g.scale();
        let h = 1e-6 * scale;
        let base = g.to_array();
        let analytic = xi_gradient(&g);
        let norm = analytic
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
            .max(scale.powi(3));
        for k in 0..6 {
            let (mut up, mut down) = (base, base);
            up[k] += h;
            down[k] -= h;
            let fd = (xi_quartic(&GramParams::from_array(up))
                - xi_quartic(&GramParams::from_array(down)))
                / (2.0 * h);
            worst = worst.max((analytic[k] - fd).abs() / norm);
        }
    }
    outcome(
        worst <= 1e-5,
        format!("10^3 points, max relative error {worst:.3e}"),
    )
}

fn cauchy_schwarz() -> Outcome {
    let mut worst = f64::INFINITY;
    for i in 0..100_000u64 {
        let d = DIMS[(i % 4) as usize];
        let law = if (i / 4) % 2 == 0 {
            ScaleLaw::Normal
        } else {
            ScaleLaw::HeavyTail
        };
        let t = draw_triple(Strategy::AmbientVectors(d), law, 900, i);
        let y = t.y();
        // Every other pair is x = y + 1e-6·n.
        let x: Vec<f64> = if i % 2 == 0 {
            t.x().to_vec()
        } else {
            y.iter().zip(t.z()).map(|(a, n)| a + 1e-6 * n).collect()
        };
        let s = cauchy_schwarz_slack(&x, y, DEFAULT_TOL).unwrap();
        let nsq = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>();
        let scale = 1f64.max(nsq(&x)).max(nsq(y));
        worst = worst.min(s.scaled_slack(scale));
    }
    outcome(
        worst >= -1e-9,
        format!("10^5 pairs, min scaled slack {worst:.3e}"),
    )
}

fn p_interval_endpoints() -> Outcome {
    let mut worst_det: f64 = 0.0;
    let mut dominance_failures = 0;
    let mut non_interval = 0;
    for i in 0..1_000u64 {
        let g = gram_from_vectors(&draw_triple(
            Strategy::AmbientVectors(3),
            ScaleLaw::Normal,
            1000,
            i,
        ));
        let iv = p_interval(g.nsq_x, g.nsq_y, g.nsq_z, g.q, g.r).unwrap();
        if iv.kind != IntervalKind::Interval {
            non_interval += 1;
            continue;
        }
        for p in [iv.lo, iv.hi] {
            worst_det = worst_det.max(GramParams { p, ..g }.det().abs() / g.scale().powi(3));
        }
        if !endpoint_dominance_check(g.nsq_x, g.nsq_y, g.nsq_z, g.q, g.r, 101).unwrap() {
            dominance_failures += 1;
        }
    }
    outcome(
        worst_det <= 1e-9 && dominance_failures == 0 && non_interval == 0,
        format!("10^3 draws, max |det|/scale^3 at endpoints {worst_det:.3e}, dominance failures {dominance_failures}"),
    )
}

fn main() -> ExitCode {
    let (strong, implication) = strong_suite();
    let results = [
        ("strong inequality suite", strong),
        ("implication chain", implication),
        ("xi consistency", xi_consistency()),
        ("factorization identities", factorizations()),
        ("sharpness witnesses", sharpness_witnesses()),
        ("equality classifier", classifier()),
        ("boundary attainment", boundary_attainment()),
        ("gradient check", gradient_check()),
        ("cauchy-schwarz", cauchy_schwarz()),
        ("p-interval endpoints", p_interval_endpoints()),
    ];
    let mut failed = 0;
    for (k, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {:>2} {:<26} {}  {}",
            k + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += !o.pass as usize;
    }
    println!(
        "acceptance: {}/{} passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
