use kohmoto::indexing::gap_index;
use kohmoto::ratcf::{gcd, Int, Rational};
use kohmoto::spectrum::{
    compute_spectrum, gap_for_vertex, ids_identity_holds, potential_sequence, verify_nesting,
    LevelSpectra, Spectrum, EDGE_RESIDUAL_TOL,
};
use kohmoto::tree::build_tree;
use nalgebra::{Complex, DMatrix};

fn spectrum(p: Int, q: Int, lambda: f64) -> Spectrum {
    compute_spectrum(&potential_sequence(Rational::new(p, q).unwrap(), lambda).unwrap()).unwrap()
}

fn coprime(q_max: Int) -> impl Iterator<Item = (Int, Int)> {
    (2..=q_max).flat_map(|q| (1..q).filter(move |&p| gcd(p, q) == 1).map(move |p| (p, q)))
}

/// Sorted eigenvalues of the Bloch matrix with corner phase `e^{i theta}`.
fn bloch_eigenvalues(values: &[f64], theta: f64) -> Vec<f64> {
    let q = values.len();
    let mut h = DMatrix::<Complex<f64>>::zeros(q, q);
    for n in 0..q {
        h[(n, n)] += Complex::new(values[n], 0.0);
        let m = (n + 1) % q;
        let hop = if m == 0 {
            Complex::from_polar(1.0, theta)
        } else {
            Complex::new(1.0, 0.0)
        };
        h[(m, n)] += hop;
        h[(n, m)] += hop.conj();
    }
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn bands_contain_every_bloch_eigenvalue() {
    for lambda in [0.5, 1.0, 2.0] {
        for (p, q) in coprime(13) {
            let s = spectrum(p, q, lambda);
            assert_eq!(s.bands.len(), q as usize);
            for i in 1..=15 {
                let theta = std::f64::consts::PI * i as f64 / 16.0;
                for (j, e) in bloch_eigenvalues(&s.potential.values, theta)
                    .into_iter()
                    .enumerate()
                {
                    let b = s.bands[j];
                    assert!(
                        b.contains(e, 1e-9),
                        "{p}/{q} lambda {lambda} theta {theta}: {e} not in {b:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn bands_sorted_with_disjoint_interiors() {
    for lambda in [0.5, 1.0, 2.0] {
        for (p, q) in coprime(25) {
            let s = spectrum(p, q, lambda);
            assert!(s.max_residual <= EDGE_RESIDUAL_TOL);
            for b in &s.bands {
                assert!(b.lo <= b.hi);
            }
            for w in s.bands.windows(2) {
                assert!(w[0].hi <= w[1].lo + 1e-12, "{p}/{q}: {w:?}");
            }
            assert_eq!(s.gaps.len(), q as usize + 1);
            assert_eq!(s.bounded_gaps().count(), q as usize - 1);
        }
    }
}

fn assert_mirrored(a: &Spectrum, b: &Spectrum, shift: f64) {
    let n = a.bands.len();
    assert_eq!(n, b.bands.len());
    for j in 0..n {
        let (x, y) = (a.bands[j], b.bands[n - 1 - j]);
        assert!((x.lo - (shift - y.hi)).abs() < 1e-9, "{x:?} vs {y:?}");
        assert!((x.hi - (shift - y.lo)).abs() < 1e-9, "{x:?} vs {y:?}");
    }
}

#[test]
fn coupling_sign_reflects_energy() {
    for lambda in [0.5, 1.0, 2.0] {
        for (p, q) in coprime(15) {
            assert_mirrored(&spectrum(p, q, lambda), &spectrum(p, q, -lambda), 0.0);
        }
    }
}

#[test]
fn complementary_frequency_reflects_about_lambda() {
    for lambda in [0.5, 1.0, 2.0] {
        for (p, q) in coprime(15) {
            assert_mirrored(&spectrum(p, q, lambda), &spectrum(q - p, q, lambda), lambda);
        }
    }
}

const DIGIT_SETS: [&str; 4] = [
    "0,1,1,1,1,1,1",
    "0,3,2,1,2,1,1",
    "0,2,1,3,1,2,2",
    "0,1,2,3,1,1,2",
];

#[test]
fn tree_gaps_follow_spectral_order_and_ids() {
    for digits in DIGIT_SETS {
        let tree = build_tree(&digits.parse().unwrap(), 6).unwrap();
        let spectra = LevelSpectra::compute(&tree, 1.0).unwrap();
        for k in 0..=6 {
            let c = tree.convergent(k).unwrap();
            let mut last_n = None;
            for v in tree.gaps_at(k).unwrap() {
                let gap = gap_for_vertex(&tree, &spectra, v).unwrap();
                assert!(last_n.is_none_or(|n| gap.gap_number > n));
                last_n = Some(gap.gap_number);
                let index = gap_index(&tree, v).unwrap().value;
                if gap.is_bounded() {
                    assert!(
                        ids_identity_holds(gap.gap_number as Int, index, c.as_rational()).unwrap()
                    );
                } else {
                    assert_eq!(index, 0, "{digits} {v:?}");
                }
            }
        }
    }
}

#[test]
fn nested_bands() {
    for digits in DIGIT_SETS {
        let tree = build_tree(&digits.parse().unwrap(), 6).unwrap();
        let spectra = LevelSpectra::compute(&tree, 1.0).unwrap();
        let r = verify_nesting(&tree, &spectra, 1e-8).unwrap();
        assert!(r.checks > 0);
        assert!(
            r.passed(),
            "{digits}: {:?}",
            &r.violations[..r.violations.len().min(3)]
        );
    }
}
