use std::f64::consts::PI;

use berezin_core::berezin::{
    berezin_number, berezin_transform, sample_range, DiskGrid, Point, SeriesPolicy,
};
use berezin_core::numerics::{
    aluthge, cartesian_parts, hermitian_eigen, operator_norm, psd_sqrt, ComplexMatrix,
};
use berezin_core::operators::{
    onb_coefficients, HarmonicSymbol, OperatorModel, Polynomial, RankOnePair, WeightRule,
};
use berezin_core::ranges::{numerical_radius, numerical_range_boundary, sector_index, SECTOR_TOL};
use berezin_core::rkhs::KernelSpace;
use berezin_core::C64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn square(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(complex(), n * n)
            .prop_map(move |v| ComplexMatrix::from_vec(n, n, v).unwrap())
    })
}

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

fn disk_point() -> impl Strategy<Value = C64> {
    (0.0..0.9f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn disk_space() -> impl Strategy<Value = KernelSpace> {
    prop_oneof![
        Just(KernelSpace::Hardy),
        Just(KernelSpace::Dirichlet),
        (-0.5..3.0f64).prop_map(|a| KernelSpace::bergman(a).unwrap()),
    ]
}

/// Coefficients of `det(xI − A)` for a 3×3 matrix, highest degree omitted.
fn char_poly3(a: &ComplexMatrix) -> [C64; 3] {
    let m = |i: usize, j: usize| a[(i, j)];
    let tr = m(0, 0) + m(1, 1) + m(2, 2);
    let minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)
        + m(1, 1) * m(2, 2)
        - m(1, 2) * m(2, 1);
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    [-tr, minors, -det]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstructs(a in square(6)) {
        let h = &a + &a.adjoint();
        let e = hermitian_eigen(&h).unwrap();
        prop_assert!(max_diff(&e.reconstruct(), &h) <= 1e-8 * (1.0 + h.max_abs()));
    }

    #[test]
    fn psd_sqrt_of_square(a in square(5)) {
        let r = psd_sqrt(&(&a.adjoint() * &a)).unwrap();
        let back = psd_sqrt(&(&r * &r)).unwrap();
        prop_assert!(max_diff(&back, &r) <= 1e-7 * (1.0 + r.max_abs()));
    }

    #[test]
    fn cartesian_squares(a in square(5)) {
        let (re, im) = cartesian_parts(&a);
        let lhs = &(&re * &re) + &(&im * &im);
        let rhs = (&(&a.adjoint() * &a) + &(&a * &a.adjoint())).scale_real(0.5);
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn norm_of_adjoint(a in square(6)) {
        let n = operator_norm(&a).unwrap();
        prop_assert!((n - operator_norm(&a.adjoint()).unwrap()).abs() <= 1e-10 * (1.0 + n));
    }

    #[test]
    fn aluthge_keeps_spectrum(v in prop::collection::vec(complex(), 9)) {
        let a = ComplexMatrix::from_vec(3, 3, v).unwrap();
        let p = char_poly3(&a);
        let q = char_poly3(&aluthge(&a).unwrap());
        for k in 0..3 {
            prop_assert!((p[k] - q[k]).norm() <= 1e-6 * (1.0 + p[k].norm()), "{:?} vs {:?}", p, q);
        }
    }

    #[test]
    fn reproducing_property(space in disk_space(), z in disk_point(), coeffs in prop::collection::vec(complex(), 1..6)) {
        let p = Polynomial::new(coeffs).unwrap();
        let a = onb_coefficients(&space, &p);
        let k = space.truncated_kernel_vector(z, a.len()).unwrap();
        let pairing: C64 = a.iter().zip(&k).map(|(x, y)| x * y.conj()).sum();
        prop_assert!((pairing - p.eval(z)).norm() <= 1e-10 * (1.0 + p.l1()));
    }

    #[test]
    fn kernel_norm_matches_series(space in disk_space(), z in disk_point()) {
        let closed = space.kernel_norm_sq(z).unwrap();
        let n = space.truncation_for(z.norm()).unwrap();
        let series: f64 = space.truncated_kernel_vector(z, n).unwrap().iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((closed - series).abs() <= 1e-8 * closed);
    }

    #[test]
    fn truncated_kernel_mass_grows(space in disk_space(), z in disk_point()) {
        let total = space.kernel_norm_sq(z).unwrap();
        let mut prev = 0.0;
        for n in [1, 2, 4, 8, 16, 32] {
            let m: f64 = space.truncated_kernel_vector(z, n).unwrap().iter().map(|v| v.norm_sqr()).sum();
            prop_assert!(m >= prev && m <= total * (1.0 + 1e-12));
            prev = m;
        }
    }
}

fn toeplitz() -> impl Strategy<Value = OperatorModel> {
    (
        prop::collection::vec(complex(), 1..4),
        prop::collection::vec(complex(), 0..3),
        0.0..2.0f64,
    )
        .prop_map(|(a, b, alpha)| {
            let sym = HarmonicSymbol::new(Polynomial::new(a).unwrap(), Polynomial::new(b).unwrap());
            OperatorModel::toeplitz(sym, alpha).unwrap()
        })
}

fn shift() -> impl Strategy<Value = OperatorModel> {
    prop::collection::vec(complex(), 1..6)
        .prop_map(|w| OperatorModel::dirichlet_shift(WeightRule::List { weights: w }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn truncation_is_nested(op in prop_oneof![toeplitz(), shift(), (0.05..0.95f64).prop_map(|r| OperatorModel::dphi(r).unwrap())], n in 2usize..20) {
        prop_assume!(n >= op.min_truncation());
        let big = op.truncate(2 * n).unwrap();
        prop_assert_eq!(big.crop(n, n), op.truncate(n).unwrap());
        prop_assert_eq!(op.adjoint().truncate(n).unwrap(), op.truncate(n).unwrap().adjoint());
    }

    #[test]
    fn product_truncation_is_padded(a in toeplitz(), b in toeplitz(), n in 2usize..16) {
        let b = OperatorModel::toeplitz(
            match b.kind() {
                berezin_core::operators::OperatorKind::ToeplitzHarmonic { symbol } => symbol.clone(),
                _ => unreachable!(),
            },
            match a.space() {
                KernelSpace::Bergman { alpha } => alpha,
                _ => unreachable!(),
            },
        )
        .unwrap();
        prop_assume!(n >= a.min_truncation().max(b.min_truncation()));
        let band = a.bandwidths().1.max(b.bandwidths().0);
        let pad = n + band;
        let direct = &a.truncate(pad).unwrap() * &b.truncate(pad).unwrap();
        let lazy = a.compose(&b).unwrap().truncate(n).unwrap();
        prop_assert!(max_diff(&direct.crop(n, n), &lazy) <= 1e-12 * (1.0 + lazy.max_abs()));
    }

    #[test]
    fn berezin_below_numerical_radius_below_norm(a in square(5)) {
        let op = OperatorModel::matrix(a.clone()).unwrap();
        let ber = berezin_number(&op, &DiskGrid::default(), 0, SeriesPolicy::Auto).unwrap().value;
        let w = numerical_radius(&a).unwrap();
        let n = operator_norm(&a).unwrap();
        prop_assert!(ber <= w + 1e-9 && w <= n + 1e-9 && n <= 2.0 * w + 1e-9);
        let diag = a.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((ber - diag).abs() <= 1e-15);
    }

    #[test]
    fn berezin_values_lie_in_numerical_range(op in toeplitz()) {
        let g = DiskGrid::full(6, 8).unwrap().with_max_radius(0.8).unwrap();
        let vals = sample_range(&op, &g, SeriesPolicy::Fixed(64)).unwrap().values();
        let m = op.truncate(96).unwrap();
        // W is the intersection of half-planes Re(e^{-iφ} z) ≤ h(φ)
        for phi in (0..48).map(|k| 2.0 * PI * k as f64 / 48.0) {
            let rot = C64::from_polar(1.0, -phi);
            let h = berezin_core::ranges::support(&m, phi).unwrap();
            for v in &vals {
                prop_assert!((rot * v).re <= h + 1e-6);
            }
        }
    }

    #[test]
    fn real_and_imaginary_shift_symmetry(w in prop::collection::vec(-1.5..1.5f64, 1..6), z in disk_point()) {
        let re = OperatorModel::dirichlet_shift(WeightRule::RealList { weights: w.clone() }).unwrap();
        let im = OperatorModel::dirichlet_shift(WeightRule::ImaginaryList { weights: w }).unwrap();
        let t = |op: &OperatorModel, z: C64| berezin_transform(op, Point::Disk(z)).unwrap();
        prop_assert!((t(&re, z.conj()) - t(&re, z).conj()).norm() <= 1e-12);
        prop_assert!((t(&im, z.conj()) + t(&im, z).conj()).norm() <= 1e-12);
    }

    #[test]
    fn real_finite_rank_symmetric(g in prop::collection::vec(-1.0..1.0f64, 1..4), h in prop::collection::vec(-1.0..1.0f64, 1..4), z in disk_point()) {
        let poly = |v: &[f64]| Polynomial::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap();
        let op = OperatorModel::finite_rank(vec![RankOnePair { g: poly(&g), h: poly(&h) }]).unwrap();
        let t = |z: C64| berezin_transform(&op, Point::Disk(z)).unwrap();
        prop_assert!((t(z.conj()) - t(z).conj()).norm() <= 1e-12);
    }

    #[test]
    fn refinement_is_monotone(op in toeplitz()) {
        let g = DiskGrid::full(8, 12).unwrap();
        let mut prev = 0.0;
        for refine in 0..4 {
            let b = berezin_number(&op, &g, refine, SeriesPolicy::Auto).unwrap().value;
            prop_assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn rotation_keeps_numerical_radius(rho in 0.05..0.9f64, phi in 0.0..(2.0 * PI)) {
        let m = OperatorModel::dphi(rho).unwrap().truncate(32).unwrap();
        let w = numerical_radius(&m).unwrap();
        prop_assert!((numerical_radius(&m.scale(C64::from_polar(1.0, phi))).unwrap() - w).abs() <= 1e-8 * (1.0 + w));
    }

    #[test]
    fn sector_index_is_scale_invariant(pts in prop::collection::vec(complex(), 1..20), s in 0.01..100.0f64) {
        let a = sector_index(&pts, SECTOR_TOL).unwrap();
        let scaled: Vec<C64> = pts.iter().map(|z| z * s).collect();
        let b = sector_index(&scaled, SECTOR_TOL).unwrap();
        prop_assert_eq!(a.index.is_some(), b.index.is_some());
        if let (Some(x), Some(y)) = (a.index, b.index) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn berezin_index_below_classical(a in square(4), shift in 1.0..4.0f64) {
        let m = a.shift_diagonal(c(shift * (1.0 + a.max_abs()), 0.0));
        let op = OperatorModel::matrix(m.clone()).unwrap();
        let ber = sector_index(&sample_range(&op, &DiskGrid::default(), SeriesPolicy::Auto).unwrap().values(), SECTOR_TOL).unwrap();
        let cls = sector_index(&numerical_range_boundary(&m, 720).unwrap(), SECTOR_TOL).unwrap();
        if let (Some(b), Some(k)) = (ber.index, cls.index) {
            prop_assert!(b <= k + 1e-9);
        }
    }
}

#[test]
fn dphi_truncation_is_stable() {
    for rho in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        let d = OperatorModel::dphi(rho).unwrap();
        let a = numerical_radius(&d.truncate(64).unwrap()).unwrap();
        let b = numerical_radius(&d.truncate(128).unwrap()).unwrap();
        assert!((a - b).abs() <= 1e-6, "rho {rho}: {a} vs {b}");
    }
}
