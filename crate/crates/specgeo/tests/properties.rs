//! Property checks for the module invariants that the acceptance suite does
//! not already pin: invariances of the matrix-level distance, metric
//! ordering, geodesic convexity, scalar reductions, and format round-trips.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specgeo::divergence;
use specgeo::factor;
use specgeo::geometry::{self, GeodesicPath};
use specgeo::hermitian::{spd_distance, spd_geodesic, SpdMatrix};
use specgeo::psd::{
    ar_psd, integrate_scalar, ComplexPolynomial, FrequencyGrid, PerturbationField,
};
use specgeo::random;
use specgeo::{io, symmetrize};

fn grid(n: usize) -> FrequencyGrid {
    FrequencyGrid::new(n).unwrap()
}

#[test]
fn spd_distance_is_congruence_and_inverse_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    for _ in 0..200 {
        let m0 = random::random_spd(3, 1.2, &mut rng);
        let m1 = random::random_spd(3, 1.2, &mut rng);
        let d = spd_distance(&m0, &m1).unwrap();

        let t = random::random_invertible(3, &mut rng);
        let congruent = |m: &SpdMatrix| {
            SpdMatrix::try_new(symmetrize(&(&t * m.matrix() * t.adjoint())).unwrap()).unwrap()
        };
        let d_t = spd_distance(&congruent(&m0), &congruent(&m1)).unwrap();
        assert!((d - d_t).abs() <= 1e-9 * d.max(1.0), "congruence: {d} vs {d_t}");

        let d_inv =
            spd_distance(&m0.inverse().unwrap(), &m1.inverse().unwrap()).unwrap();
        assert!((d - d_inv).abs() <= 1e-9 * d.max(1.0), "inverse: {d} vs {d_inv}");
    }
}

#[test]
fn spd_triangle_inequality_holds_on_a_thousand_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let a = random::random_spd(3, 1.3, &mut rng);
        let b = random::random_spd(3, 1.3, &mut rng);
        let c = random::random_spd(3, 1.3, &mut rng);
        worst = worst.max(
            spd_distance(&a, &c).unwrap()
                - spd_distance(&a, &b).unwrap()
                - spd_distance(&b, &c).unwrap(),
        );
    }
    assert!(worst <= 1e-9, "worst violation {worst}");
}

#[test]
fn spd_geodesic_proportionality_across_the_tau_ladder() {
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for _ in 0..100 {
        let m0 = random::random_spd(3, 1.0, &mut rng);
        let m1 = random::random_spd(3, 1.0, &mut rng);
        let d = spd_distance(&m0, &m1).unwrap();
        for i in 1..=9 {
            let tau = i as f64 / 10.0;
            let part = spd_distance(&m0, &spd_geodesic(&m0, &m1, tau).unwrap()).unwrap();
            assert!(
                (part - tau * d).abs() <= 1e-9 * d.max(1.0),
                "tau={tau}: {part} vs {}",
                tau * d
            );
        }
    }
}

#[test]
fn matrix_function_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    for m in [2usize, 3, 5] {
        for _ in 0..50 {
            let a = random::random_spd(m, 1.5, &mut rng);
            let scale = a.hermitian().frobenius_norm();
            let exp_log = a.log().unwrap().exp().unwrap();
            assert!((exp_log.matrix() - a.matrix()).norm() <= 1e-11 * scale);
            let s = a.sqrt().unwrap();
            let squared = s.matrix() * s.matrix();
            assert!((squared - a.matrix()).norm() <= 1e-11 * scale);
        }
    }
}

#[test]
fn ar_psd_log_integral_matches_the_polynomial() {
    // The mean of log f for f = 1/|a|^2 equals -2 * mean log |a|; through the
    // factorization this is the variance the cepstral route reports.
    let g = grid(512);
    let mut rng = ChaCha8Rng::seed_from_u64(205);
    use rand::Rng;
    for _ in 0..20 {
        let r1 = rng.random_range(0.3..0.9);
        let w1 = rng.random_range(0.2..3.0);
        let r2 = rng.random_range(0.3..0.9);
        let w2 = rng.random_range(0.2..3.0);
        let a = ComplexPolynomial::conjugate_pole_pair(r1, w1)
            .mul(&ComplexPolynomial::conjugate_pole_pair(r2, w2));
        let f = ar_psd(&a, g).unwrap();
        let sf = factor::factorize_scalar(&f).unwrap();
        let mean_log_a: f64 = (0..g.len())
            .map(|k| {
                let z = num_complex::Complex64::new(0.0, g.theta(k)).exp();
                a.eval(z).norm().ln()
            })
            .sum::<f64>()
            / g.len() as f64;
        let omega = sf.omega().matrix()[(0, 0)].re;
        let expected = (-2.0 * mean_log_a).exp();
        assert!(
            (omega - expected).abs() <= 1e-10 * expected.max(1.0),
            "omega {omega} vs szego value {expected}"
        );
    }
}

#[test]
fn metric_ordering_g1_above_g2() {
    let g = grid(128);
    let mut rng = ChaCha8Rng::seed_from_u64(206);
    for _ in 0..20 {
        let (f, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let delta = random::random_perturbation(&f, 0.5, &mut rng);
        let g1 = geometry::metric_g1(&f, &delta).unwrap();
        let g2 = geometry::metric_g2(&f, &delta).unwrap();
        assert!(g1 >= 0.0 && g2 >= 0.0);
        assert!(g2 <= g1 + 1e-9, "ordering broken: g1={g1} g2={g2}");
    }
}

#[test]
fn g1_is_congruence_invariant_under_constant_transforms() {
    let g = grid(128);
    let mut rng = ChaCha8Rng::seed_from_u64(207);
    for _ in 0..20 {
        let (f, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let delta = random::random_perturbation(&f, 0.5, &mut rng);
        let base = geometry::metric_g1(&f, &delta).unwrap();
        let t = random::random_invertible(2, &mut rng);
        let f_t = f.congruence_constant(&t).unwrap();
        let delta_t = PerturbationField::try_new(
            g,
            delta
                .values()
                .iter()
                .map(|d| &t * d.matrix() * t.adjoint())
                .collect(),
        )
        .unwrap();
        let moved = geometry::metric_g1(&f_t, &delta_t).unwrap();
        assert!(
            (base - moved).abs() <= 1e-9 * base.max(1.0),
            "{base} vs {moved}"
        );
    }
}

#[test]
fn geodesic_cross_distance_is_convex_in_tau() {
    // tau -> d(f0 #_tau f1, f0 #_tau f2) has nonnegative second differences.
    let g = grid(128);
    let mut rng = ChaCha8Rng::seed_from_u64(208);
    for _ in 0..10 {
        let (f0, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (f1, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let (f2, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
        let path1 = GeodesicPath::new(&f0, &f1).unwrap();
        let path2 = GeodesicPath::new(&f0, &f2).unwrap();
        let taus: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let values: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                geometry::geodesic_distance(&path1.at(tau).unwrap(), &path2.at(tau).unwrap())
                    .unwrap()
            })
            .collect();
        for w in values.windows(3) {
            let second_difference = w[2] - 2.0 * w[1] + w[0];
            assert!(
                second_difference >= -1e-7,
                "convexity broken: {values:?}"
            );
        }
    }
}

#[test]
fn geodesic_extrapolation_stays_in_the_cone() {
    let g = grid(128);
    let mut rng = ChaCha8Rng::seed_from_u64(209);
    let (f0, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
    let (f1, _) = random::random_smooth_psd(2, g, 0.85, &mut rng).unwrap();
    let path = GeodesicPath::new(&f0, &f1).unwrap();
    for tau in [-1.5, -0.5, 1.5, 2.5] {
        // Construction of MatrixPsd revalidates positive definiteness.
        let f_tau = path.at(tau).unwrap();
        assert_eq!(f_tau.dim(), 2);
    }
}

#[test]
fn scalar_reductions_match_classical_formulas() {
    // For m = 1 every measure collapses to its classical scalar integral.
    let g = grid(256);
    let a0 = ComplexPolynomial::conjugate_pole_pair(0.8, 0.9);
    let a1 = ComplexPolynomial::conjugate_pole_pair(0.65, 2.1);
    let f0 = ar_psd(&a0, g).unwrap();
    let f1 = ar_psd(&a1, g).unwrap();
    let x: Vec<f64> = f0.values().iter().map(|v| v.matrix()[(0, 0)].re).collect();
    let y: Vec<f64> = f1.values().iter().map(|v| v.matrix()[(0, 0)].re).collect();

    let ratios: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a / b).collect();

    let d1 = divergence::d1(&f0, &f1).unwrap().value;
    let d1_classical =
        integrate_scalar(g, &ratios.iter().map(|r| r + 1.0 / r - 2.0).collect::<Vec<_>>())
            .unwrap();
    assert!((d1 - d1_classical).abs() <= 1e-10 * d1_classical.max(1.0));

    let is = divergence::d_itakura_saito(&f0, &f1).unwrap().value;
    let is_classical =
        integrate_scalar(g, &ratios.iter().map(|r| r - r.ln() - 1.0).collect::<Vec<_>>())
            .unwrap();
    assert!((is - is_classical).abs() <= 1e-10 * is_classical.max(1.0));

    let dlog = divergence::d_log_spectral(&f0, &f1).unwrap().value;
    let dlog_classical =
        integrate_scalar(g, &ratios.iter().map(|r| r.ln().powi(2)).collect::<Vec<_>>()).unwrap();
    assert!((dlog - dlog_classical).abs() <= 1e-10 * dlog_classical.max(1.0));

    let hel = divergence::d_hellinger(&f0, &f1).unwrap().value;
    let hel_classical = integrate_scalar(
        g,
        &ratios
            .iter()
            .map(|r| (r.sqrt() - 1.0).powi(2) + ((1.0 / r).sqrt() - 1.0).powi(2))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert!((hel - hel_classical).abs() <= 1e-10 * hel_classical.max(1.0));

    let fro = divergence::d_frobenius(&f0, &f1).unwrap().value;
    let fro_classical = integrate_scalar(
        g,
        &ratios
            .iter()
            .map(|r| 0.5 * ((r - 1.0).powi(2) + (1.0 / r - 1.0).powi(2)))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert!((fro - fro_classical).abs() <= 1e-10 * fro_classical.max(1.0));
}

#[test]
fn completion_distance_is_stable_under_refinement() {
    // Smooth spectra keep their distance under N -> 2N within 1e-4.
    let mut rng = ChaCha8Rng::seed_from_u64(210);
    let coarse = grid(512);
    let fine = coarse.doubled();
    for _ in 0..3 {
        let (_, p0) = random::random_smooth_psd(2, coarse, 0.9, &mut rng).unwrap();
        let (_, p1) = random::random_smooth_psd(2, coarse, 0.9, &mut rng).unwrap();
        let dc = geometry::geodesic_distance(
            &p0.psd(coarse).unwrap(),
            &p1.psd(coarse).unwrap(),
        )
        .unwrap();
        let df =
            geometry::geodesic_distance(&p0.psd(fine).unwrap(), &p1.psd(fine).unwrap()).unwrap();
        assert!((dc - df).abs() <= 1e-4 * df.max(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn psd_file_round_trip_is_exact(seed in any::<u64>(), m in 1usize..4, log_n in 2u32..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(1usize << log_n);
        let (f, _) = random::random_smooth_psd(m, g, 0.9, &mut rng).unwrap();
        let text = io::psd_to_string(&f);
        let back = io::psd_from_str(&text, "proptest").unwrap();
        prop_assert_eq!(io::psd_to_string(&back), text);
    }

    #[test]
    fn symmetrized_matrices_validate_and_roundtrip(seed in any::<u64>(), m in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = random::random_complex_matrix(m, &mut rng);
        let h = symmetrize(&raw).unwrap();
        // Fixed point: symmetrizing again changes nothing.
        let again = symmetrize(h.matrix()).unwrap();
        prop_assert!((h.matrix() - again.matrix()).norm() == 0.0);
        // Spectral mapping with the identity function reconstructs.
        let eig = h.eig().unwrap();
        let recon = eig.apply(|l| l);
        prop_assert!((&recon - h.matrix()).norm() <= 1e-12 * h.frobenius_norm().max(1.0));
    }

    #[test]
    fn linear_combinations_inside_the_unit_interval_are_admissible(
        seed in any::<u64>(),
        tau in 0.0f64..1.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = grid(32);
        let (f0, _) = random::random_smooth_psd(2, g, 0.9, &mut rng).unwrap();
        let (f1, _) = random::random_smooth_psd(2, g, 0.9, &mut rng).unwrap();
        prop_assert!(specgeo::psd::linear_psd_path(&f0, &f1, tau).unwrap().is_admissible());
    }
}
