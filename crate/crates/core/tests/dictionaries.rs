use dictgreedy::dictionary::{
    brute_force_sigma, build_neural_atoms, certify_constant, cone_norming_constant, membership, sigma_witness,
    verify_norming, Activation, Dictionary, DictionaryKind, FiniteAtomData, Provenance, SubspaceUnionData,
};
use dictgreedy::sampling;
use dictgreedy::vectorspace::Space;
use dictgreedy::Error;

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// `σ_min(W^{1/2} K)` from the eigenvalues of the weighted Gram matrix.
fn sigma_min_oracle(data: &FiniteAtomData) -> f64 {
    let atoms = data.atoms();
    let w = data.space().weights();
    let gram: Vec<Vec<f64>> = atoms
        .iter()
        .map(|a| {
            atoms
                .iter()
                .map(|b| a.coeffs().iter().zip(b.coeffs()).zip(w).map(|((x, y), wi)| wi * x * y).sum())
                .collect()
        })
        .collect();
    jacobi_eigenvalues(gram).into_iter().fold(f64::INFINITY, f64::min).max(0.0).sqrt()
}

#[test]
fn neural_atoms_sigma_min_matches_jacobi_oracle() {
    let s = Space::unit(3, 2.0).unwrap();
    let points = vec![vec![-1.0], vec![0.0], vec![1.0]];
    let params = vec![(vec![1.0], 0.0), (vec![1.0], 1.0), (vec![1.0], -1.0)];
    // tanh is odd: on these points tanh(x+1) + tanh(x-1) = (tanh 2 / tanh 1) tanh(x),
    // so the three tanh atoms are dependent and must be rejected by name.
    match build_neural_atoms(&s, &points, &params, Activation::Tanh) {
        Err(Error::DictionaryDegenerate { atoms, .. }) => assert_eq!(atoms, vec![0, 1, 2]),
        other => panic!("expected degenerate tanh atoms, got {other:?}"),
    }
    let data = build_neural_atoms(&s, &points, &params, Activation::Sigmoid).unwrap();
    assert_eq!(data.m(), 3);
    let oracle = sigma_min_oracle(&data);
    assert!((data.sigma_min() - oracle).abs() <= 1e-10, "{} vs {oracle}", data.sigma_min());

    // Larger, weighted, sigmoid case.
    let n = 10;
    let w: Vec<f64> = (0..n).map(|i| 0.5 + i as f64 / n as f64).collect();
    let s = Space::new(w, 2.0).unwrap();
    let points: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64, (i * i) as f64 / 81.0]).collect();
    let params: Vec<(Vec<f64>, f64)> = (0..7).map(|j| (vec![3.0 + j as f64, -2.0 + 0.5 * j as f64], -(j as f64) / 3.0)).collect();
    let data = build_neural_atoms(&s, &points, &params, Activation::Sigmoid).unwrap();
    assert!((data.sigma_min() - sigma_min_oracle(&data)).abs() <= 1e-10);
}

#[test]
fn finite_constant_is_sqrt_m_over_sigma_min_and_holds() {
    let n = 8;
    let s = Space::unit(n, 2.0).unwrap();
    let points: Vec<Vec<f64>> = (0..n).map(|j| vec![(j as f64 + 0.5) / n as f64]).collect();
    let params: Vec<(Vec<f64>, f64)> = (0..n).map(|j| (vec![10.0], -10.0 * j as f64 / n as f64)).collect();
    let data = build_neural_atoms(&s, &points, &params, Activation::Tanh).unwrap();
    let expected = (data.m() as f64).sqrt() / sigma_min_oracle(&data);
    let d = Dictionary::finite(data).unwrap();
    let c = d.norming_constant();
    assert_eq!(c.provenance, Provenance::Formula);
    assert!((c.value - expected).abs() <= 1e-8 * expected);
    let rep = verify_norming(&d, c.value, 10_000, 3, 4).unwrap();
    assert_eq!(rep.violations, 0);
    assert!(rep.worst_ratio <= c.value);
}

#[test]
fn atoms_sigma_is_max_pairing() {
    let s = Space::unit(2, 2.0).unwrap();
    let d = Dictionary::axes(&s).unwrap();
    let w = sigma_witness(&d, &s.vector(vec![-3.0, -4.0]).unwrap()).unwrap();
    assert_eq!(w.sigma, 4.0);
    assert_eq!(w.w.coeffs()[0], 0.0);
    assert_eq!(w.w.coeffs()[1].abs(), 1.0);
}

#[test]
fn dependent_atoms_error_names_the_atoms() {
    let s = Space::unit(3, 2.0).unwrap();
    let atoms = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]].map(|a| s.vector(a.to_vec()).unwrap()).to_vec();
    match FiniteAtomData::new(atoms) {
        Err(Error::DictionaryDegenerate { atoms, .. }) => assert_eq!(atoms, vec![0, 1, 2]),
        other => panic!("expected degenerate dictionary, got {other:?}"),
    }
}

#[test]
fn cone_witness_agrees_with_brute_force() {
    let mut rng = sampling::rng(11);
    for (c, q) in [(0.3, 1.5), (0.5, 2.0), (0.7, 3.0)] {
        let s = Space::unit(4, q).unwrap();
        let d = Dictionary::cone(&s, c).unwrap();
        for _ in 0..5 {
            let g = sampling::gaussian(&s, &mut rng);
            let wit = sigma_witness(&d, &g).unwrap();
            assert!(membership(&d, &wit.w));
            assert!((wit.w.norm() - 1.0).abs() < 1e-12);
            assert!((g.pair(&wit.w).unwrap() - wit.sigma).abs() <= 1e-12 * wit.sigma.max(1.0));
            let brute = brute_force_sigma(&d, &g, 50_000, &mut rng);
            assert!(brute <= wit.sigma * (1.0 + 1e-12));
            assert!(brute >= 0.99 * wit.sigma, "c={c} q={q}: brute {brute} vs {}", wit.sigma);
        }
    }
}

#[test]
fn cone_constant_frozen_values() {
    // 1 / min{c, (1 - c^q)^{1/q}}
    assert_eq!(cone_norming_constant(0.5, 2.0), 2.0);
    assert!((cone_norming_constant(0.7, 2.0) - 1.0 / 0.7).abs() < 1e-15);
    assert!((cone_norming_constant(0.8, 2.0) - 1.0 / 0.6).abs() < 1e-14);
    assert!((cone_norming_constant(0.3, 3.0) - 1.0 / 0.3).abs() < 1e-14);
    let tail = (1.0f64 - 0.9f64.powf(1.5)).powf(1.0 / 1.5);
    assert!((cone_norming_constant(0.9, 1.5) - 1.0 / tail).abs() < 1e-14);
}

#[test]
fn full_space_ratios_are_one() {
    let s = Space::unit(6, 3.0).unwrap();
    let d = Dictionary::full_space(&s);
    let rep = verify_norming(&d, 1.0, 1000, 1, 4).unwrap();
    assert_eq!(rep.violations, 0);
    assert!((rep.worst_ratio - 1.0).abs() < 1e-12);
    assert!(rep.brute_force.unwrap().pass);
}

#[test]
fn skew_planes_certified_constant_cross_checked() {
    let s = Space::unit(4, 2.0).unwrap();
    let bases = vec![
        vec![vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]],
        vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]],
    ];
    let data = SubspaceUnionData::from_bases(&s, bases).unwrap();
    assert!(data.is_direct_sum() && !data.direct_sum_flag());
    let d = Dictionary::subspace_union(data).unwrap();
    let c = d.norming_constant();
    assert_eq!(c.provenance, Provenance::Certified);
    // An independent Monte Carlo pass with another seed stays below it.
    let worst = certify_constant(&d, 10_000, 99).unwrap();
    assert!(worst <= c.value, "{worst} > {}", c.value);
    let rep = verify_norming(&d, c.value, 10_000, 5, 4).unwrap();
    assert_eq!(rep.violations, 0);
    let bf = rep.brute_force.unwrap();
    assert!(bf.pass, "{bf:?}");
}

#[test]
fn coordinate_blocks_use_subspace_count() {
    let s = Space::unit(4, 2.0).unwrap();
    let d = Dictionary::subspace_union(SubspaceUnionData::coordinate_blocks(&s, vec![vec![0, 1], vec![2, 3]]).unwrap())
        .unwrap();
    assert_eq!(d.norming_constant().value, 2.0);
    let whole = Dictionary::subspace_union(SubspaceUnionData::coordinate_blocks(&s, vec![vec![0, 1, 2, 3]]).unwrap())
        .unwrap();
    assert_eq!(whole.norming_constant().value, 1.0);
    assert!(matches!(d.kind(), DictionaryKind::SubspaceUnion(_)));
}
