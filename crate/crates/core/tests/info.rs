use std::collections::BTreeMap;

use nec_reduction::corpus::*;
use nec_reduction::info::*;
use nec_reduction::*;

fn vars(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn entropy_of_simple_distributions() {
    let fair = JointDistribution::uniform(vars(&["x"]), [vec![0], vec![1]]).unwrap();
    assert!(close(fair.entropy(&["x"]).unwrap(), 1.0));
    let point = JointDistribution::uniform(vars(&["x"]), [vec![5]]).unwrap();
    assert_eq!(point.entropy(&["x"]).unwrap(), 0.0);
    let skew = JointDistribution::new(vars(&["x"]), BTreeMap::from([(vec![0], 0.25), (vec![1], 0.75)])).unwrap();
    let h = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
    assert!(close(skew.entropy(&["x"]).unwrap(), h));
}

#[test]
fn mutual_information_examples() {
    let copy = JointDistribution::uniform(vars(&["x", "z"]), [vec![0, 0], vec![1, 1]]).unwrap();
    assert!(close(copy.mutual_information(&["x"], &["z"]).unwrap(), 1.0));
    let indep =
        JointDistribution::uniform(vars(&["x", "z"]), [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
    assert!(close(indep.mutual_information(&["x"], &["z"]).unwrap(), 0.0));
    assert!(close(indep.entropy(&["x", "z"]).unwrap(), 2.0));
}

#[test]
fn invalid_distributions_are_rejected() {
    assert!(JointDistribution::new(vars(&["x"]), BTreeMap::from([(vec![0], 0.5)])).is_err());
    assert!(JointDistribution::new(vars(&["x"]), BTreeMap::from([(vec![0], -0.5), (vec![1], 1.5)])).is_err());
    assert!(JointDistribution::new(vars(&["x", "x"]), BTreeMap::from([(vec![0, 0], 1.0)])).is_err());
    assert!(JointDistribution::new(vars(&["x"]), BTreeMap::from([(vec![0, 0], 1.0)])).is_err());
    let d = JointDistribution::uniform(vars(&["x"]), [vec![0]]).unwrap();
    assert!(matches!(d.entropy(&["y"]), Err(Error::UnknownVariable(_))));
}

#[test]
fn triangle_examples() {
    // X = Y = Z: 1 >= 1 + 1 - 1
    let same = JointDistribution::uniform(vars(&["x", "y", "z"]), [vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
    let t = triangle_bound_check(&same, &["x"], &["y"], &["z"]).unwrap();
    assert!(t.holds && close(t.lhs, 1.0) && close(t.rhs, 1.0));

    // Z = X xor Y with X, Y fair and independent: 0 >= 0 + 0 - 1
    let xor: Vec<Vec<u64>> = (0..4).map(|i| vec![i >> 1, i & 1, (i >> 1) ^ (i & 1)]).collect();
    let d = JointDistribution::uniform(vars(&["x", "y", "z"]), xor).unwrap();
    let t = triangle_bound_check(&d, &["x"], &["y"], &["z"]).unwrap();
    assert!(t.holds && close(t.lhs, 0.0) && close(t.rhs, -1.0));
}

#[test]
fn lifted_butterfly_signals() {
    let r = reduce(&butterfly()).unwrap();
    let c = lift_code(&butterfly_xor_code(), &r).unwrap();
    for j in 1..=2 {
        let z = format!("z_{j}");
        let zp = format!("zp_{j}");
        let d = edge_joint_distribution(&c, &r.instance, &[&z, &zp], &MessageDistribution::Uniform).unwrap();
        assert!(close(d.mutual_information(&[&z], &[&zp]).unwrap(), 1.0));
    }
    let d = edge_joint_distribution(&c, &r.instance, &["a_1", "a_2"], &MessageDistribution::UniformA).unwrap();
    assert_eq!(d.support_size(), 4);
    assert!(close(d.entropy(&["a_1", "a_2"]).unwrap(), 2.0));
    assert!(close(d.mutual_information(&["a_1"], &["a_2"]).unwrap(), 0.0));

    let over = edge_joint_distribution(&c, &r.instance, &["a_1"], &MessageDistribution::UniformOver(vec![1, 3])).unwrap();
    assert_eq!(over.pmf(), &BTreeMap::from([(vec![1], 1.0)]));
    assert!(edge_joint_distribution(&c, &r.instance, &["a_1"], &MessageDistribution::UniformOver(vec![])).is_err());
    assert!(edge_joint_distribution(&c, &r.instance, &["nope"], &MessageDistribution::Uniform).is_err());
}

#[test]
fn uniform_a_needs_a_reduced_instance() {
    let b = butterfly();
    let err = edge_joint_distribution(&butterfly_xor_code(), &b, &["e3"], &MessageDistribution::UniformA);
    assert!(matches!(err, Err(Error::NotReduced)));
}

fn bound(n: u64, eps: f64, l: u64, k: u64) -> BoundValue {
    information_lower_bound(&BoundParams {
        n,
        eps,
        l,
        k,
        uniform_a: false,
    })
    .unwrap()
}

#[test]
fn bound_values() {
    let v = bound(10, 0.0, 10, 2);
    assert!(close(v.value.unwrap(), 7.0));
    assert!(!v.vacuous);

    let v = bound(10, 0.0, 1, 2);
    assert!(close(v.value.unwrap(), -11.0));
    assert!(v.vacuous);

    let v = bound(20, 0.0025, 5, 2);
    assert!(close(v.eps_prime, 0.01));
    assert!((v.value.unwrap() - 7.978_384_420_631_215).abs() < 1e-9, "{v:?}");

    let v = bound(1000, 0.0, 1000, 2);
    assert!(v.value.unwrap() / 1000.0 > 0.99);

    assert!(bound(10, 0.25, 2, 2).vacuous);
    assert_eq!(bound(10, 0.25, 2, 2).value, None);
    assert_eq!(bound(10, 0.1, 3, 2).value, None);
}

#[test]
fn uniform_a_scales_by_one_minus_eps_prime() {
    let base = bound(100, 0.001, 20, 2).value.unwrap();
    let scaled = information_lower_bound(&BoundParams {
        n: 100,
        eps: 0.001,
        l: 20,
        k: 2,
        uniform_a: true,
    })
    .unwrap()
    .value
    .unwrap();
    assert!(close(scaled, base * (1.0 - 0.004)));
}

#[test]
fn bound_parameters_are_checked() {
    for (n, eps, l, k) in [(0, 0.0, 1, 1), (1, -0.1, 1, 1), (1, f64::NAN, 1, 1), (1, 0.0, 0, 1), (1, 0.0, 1, 0)] {
        assert!(information_lower_bound(&BoundParams {
            n,
            eps,
            l,
            k,
            uniform_a: false
        })
        .is_err());
    }
}

#[test]
fn bound_is_monotone_in_eps() {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 1e-4).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&e| bound(100, e, 20, 2).value.unwrap_or(f64::NEG_INFINITY))
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn error_free_bound_grows_with_l_and_approaches_n() {
    for n in [10u64, 100, 1000] {
        let values: Vec<f64> = (2..=200).map(|l| bound(n, 0.0, l, 2).value.unwrap()).collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    }
    let ratios: Vec<f64> = [10u64, 100, 1000, 10000].iter().map(|&m| bound(m, 0.0, m, 2).value.unwrap() / m as f64).collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
    assert!(ratios[3] > 0.999);
}
