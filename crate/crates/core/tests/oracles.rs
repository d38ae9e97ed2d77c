//! Library results checked against independent brute-force or closed-form computations.

use std::sync::Arc;

use nade_core::*;
use nalgebra::DMatrix;
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

/// Counts words by scanning all `N^len` symbol strings.
fn brute_word_count(a: &TransitionMatrix, len: usize) -> u64 {
    let n = a.size();
    let total = n.pow(len as u32);
    (0..total)
        .filter(|&code| {
            let mut w = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                w.push(c % n);
                c /= n;
            }
            w.windows(2).all(|p| a.get(p[0], p[1]))
        })
        .count() as u64
}

/// Largest eigenvalue modulus from a dense eigen-solver.
fn eigen_radius(a: &TransitionMatrix) -> f64 {
    let n = a.size();
    let m = DMatrix::from_fn(n, n, |i, j| if a.get(i, j) { 1.0 } else { 0.0 });
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[test]
fn word_counts_match_brute_force() {
    for size in 1..=3 {
        for a in TransitionMatrix::enumerate_all(size) {
            for len in 1..=6 {
                let count = a.count_allowable_words(len).unwrap();
                assert_eq!(
                    count,
                    BigUint::from(brute_word_count(&a, len)),
                    "{a}len {len}"
                );
            }
        }
    }
}

#[test]
fn spectral_radius_matches_eigen_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for size in 1..=8 {
        for density in [0.2, 0.5, 0.8] {
            for _ in 0..10 {
                let a = TransitionMatrix::random(&mut rng, size, density);
                let rho = a.spectral_radius(1e-13).unwrap();
                let oracle = eigen_radius(&a);
                // Repeated eigenvalues of reducible matrices are ill-conditioned for the solver.
                let tol = if a.is_irreducible() { 1e-9 } else { 1e-3 };
                assert!((rho - oracle).abs() < tol, "{a}rho {rho} vs {oracle}");
            }
        }
    }
}

/// Bowen distance from orbits computed step by step through the public evaluator.
fn orbit_distance(sys: &SystemModel, x: f64, y: f64, n: usize) -> f64 {
    let (mut a, mut b) = (x, y);
    let mut d = (a - b).abs();
    for j in 1..n {
        a = sys.evaluate(j, a).unwrap();
        b = sys.evaluate(j, b).unwrap();
        d = d.max((a - b).abs());
    }
    d
}

/// Greedy separated set comparing each candidate with every chosen point.
fn brute_greedy(sys: &SystemModel, n: usize, eps: f64, order: &[f64]) -> usize {
    let threshold = eps * (1.0 - 1e-9);
    let mut chosen: Vec<f64> = Vec::new();
    for &x in order {
        if chosen
            .iter()
            .all(|&c| orbit_distance(sys, x, c, n) > threshold)
        {
            chosen.push(x);
        }
    }
    chosen.len()
}

fn test_systems() -> Vec<(&'static str, SystemModel)> {
    vec![
        (
            "tent 2",
            SystemModel::tent_family(&[2.0], Extension::ConstantTail).unwrap(),
        ),
        (
            "tent 3",
            SystemModel::tent_family(&[3.0], Extension::ConstantTail).unwrap(),
        ),
        (
            "tent 2.5/3.5",
            SystemModel::tent_family(&[2.5, 3.5], Extension::Periodic).unwrap(),
        ),
        (
            "horseshoe",
            SystemModel::horseshoe_family(&[2.4, 3.0], 0.3, 0.1, Extension::Periodic).unwrap(),
        ),
        (
            "identity",
            SystemModel::autonomous(PiecewiseLinearMap::identity(iv(0.0, 1.0))).unwrap(),
        ),
    ]
}

#[test]
fn separated_counts_match_brute_greedy() {
    for (name, sys) in test_systems() {
        for grid in [10, 64, 300] {
            let cands = Candidates::grid(sys.domain(), grid).unwrap();
            for n in 1..=6 {
                for eps in [0.3, 0.1, 0.05] {
                    let fast = separated_count(&sys, n, eps, &cands).unwrap();
                    let slow = brute_greedy(&sys, n, eps, cands.as_slice());
                    assert_eq!(fast, slow, "{name} grid {grid} n {n} eps {eps}");
                }
            }
        }
    }
}

#[test]
fn separated_counts_on_point_sets_match_brute_greedy() {
    let sys = SystemModel::tent_family(&[3.0], Extension::ConstantTail).unwrap();
    let cover = CoverConfig::new(vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)], None).unwrap();
    let coder = Coder::new(&sys, &cover, Arc::new(TransitionMatrix::full(2))).unwrap();
    let pts = coder.coded_points(7, 1, 1e-12, 1 << 10).unwrap();
    let cands = Candidates::points(pts).unwrap();
    for n in 1..=10 {
        for eps in [0.5, 0.3, 0.1] {
            let fast = separated_count(&sys, n, eps, &cands).unwrap();
            let slow = brute_greedy(&sys, n, eps, cands.as_slice());
            assert_eq!(fast, slow, "n {n} eps {eps}");
        }
    }
}

#[test]
fn identity_separated_count_is_eleven() {
    let sys = SystemModel::autonomous(PiecewiseLinearMap::identity(iv(0.0, 1.0))).unwrap();
    let cands = Candidates::grid(sys.domain(), 10).unwrap();
    assert_eq!(brute_greedy(&sys, 4, 0.1, cands.as_slice()), 11);
    assert_eq!(separated_count(&sys, 4, 0.1, &cands).unwrap(), 11);
}

#[test]
fn tent_separated_count_regression() {
    let sys = SystemModel::tent_family(&[2.0], Extension::ConstantTail).unwrap();
    let cands = Candidates::grid(sys.domain(), 100_000).unwrap();
    let slow = brute_greedy(&sys, 3, 0.25, cands.as_slice());
    let fast = separated_count(&sys, 3, 0.25, &cands).unwrap();
    assert_eq!(fast, slow);
    assert_eq!(fast, TENT_REGRESSION);
}

const TENT_REGRESSION: usize = 12;

/// `π(α)` for periodic `α` on the slope-2 tent with halves: the fixed point of
/// the composed affine branches `x ↦ 2x` and `x ↦ 2 − 2x`.
fn tent_periodic_point(cycle: &[usize]) -> f64 {
    // Compose g = B_{c_{p-1}} ∘ … ∘ B_{c_0} as x ↦ a·x + b.
    let (mut a, mut b) = (1.0f64, 0.0f64);
    for &s in cycle {
        let (sa, sb) = if s == 0 { (2.0, 0.0) } else { (-2.0, 2.0) };
        a *= sa;
        b = sa * b + sb;
    }
    b / (1.0 - a)
}

#[test]
fn periodic_codes_match_branch_fixed_points() {
    let sys = SystemModel::tent_family(&[2.0], Extension::ConstantTail).unwrap();
    let cover = CoverConfig::new(vec![iv(0.0, 0.5), iv(0.5, 1.0)], None).unwrap();
    let a = Arc::new(TransitionMatrix::full(2));
    let coder = Coder::new(&sys, &cover, Arc::clone(&a)).unwrap();
    let cycles: Vec<Vec<usize>> = vec![
        vec![0],
        vec![1],
        vec![0, 1],
        vec![0, 0, 1],
        vec![0, 1, 1],
        vec![1, 0, 1, 1, 0],
    ];
    for cycle in cycles {
        let alpha = SymbolSequence::new(Arc::clone(&a), vec![], cycle.clone()).unwrap();
        let p = coder.code_point(&alpha, 1, 1e-10).unwrap();
        let oracle = tent_periodic_point(&cycle);
        assert!(
            (p.value - oracle).abs() <= p.radius + 1e-14,
            "{cycle:?}: {p:?} vs {oracle}"
        );
    }
    assert!((tent_periodic_point(&[0, 1]) - 0.4).abs() < 1e-15);
}

#[test]
fn image_and_preimage_match_dense_sampling() {
    for (name, sys) in test_systems() {
        let f = sys.map(1);
        for (lo, hi) in [
            (0.1, 0.2),
            (0.0, 1.0),
            (0.3, 0.77),
            (0.49, 0.51),
            (0.6, 0.6),
        ] {
            let j = iv(lo, hi);
            let image = f.image(&j);
            let mut seen = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..=10_000 {
                let x = lo + (hi - lo) * (k as f64 / 10_000.0);
                let y = f.eval(x);
                assert!(image.contains(y), "{name}: f({x}) = {y} outside {image}");
                seen = (seen.0.min(y), seen.1.max(y));
            }
            assert!(
                seen.0 - image.lo() < 1e-3 && image.hi() - seen.1 < 1e-3,
                "{name} image too wide"
            );
            let pre = f.preimage(&j, &sys.domain());
            for k in 0..=10_000 {
                let x = k as f64 / 10_000.0;
                let inside = pre.iter().any(|p| p.contains(x));
                assert_eq!(inside, j.contains(f.eval(x)), "{name}: x = {x}, J = {j}");
            }
        }
    }
}
