//! Delsarte LP optima against values computed independently with a floating
//! point LP solver (HiGHS) and rounded to the obvious fraction.

use delsarte::exact::{ratio, rational};
use delsarte::lp::{solve_primal, LpStatus};
use delsarte::params::hamming_parameters;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

#[test]
fn hamming_lp_optima() {
    let cases: [(u64, u64, usize, BigRational); 10] = [
        (7, 2, 3, rational(16)),
        (8, 2, 3, ratio(128, 5)),
        (9, 2, 3, ratio(128, 3)),
        (10, 2, 3, ratio(256, 3)),
        (10, 2, 4, ratio(128, 3)),
        (11, 2, 5, rational(24)),
        (12, 2, 5, rational(40)),
        (15, 2, 5, rational(256)),
        (6, 3, 3, ratio(243, 5)),
        (8, 3, 4, ratio(1539, 11)),
    ];
    for (n, q, d, expected) in cases {
        let params = hamming_parameters(n, q).unwrap();
        let solution = solve_primal(&params, d).unwrap();
        assert_eq!(solution.status, LpStatus::Optimal);
        assert_eq!(solution.value, expected, "A_LP({n},{d}) over q={q}");
    }
}

#[test]
fn optimal_point_is_feasible() {
    for (n, q, d) in [(9, 2, 3), (12, 2, 5), (8, 3, 4)] {
        let params = hamming_parameters(n, q).unwrap();
        let solution = solve_primal(&params, d).unwrap();
        let a = solution.u.values();
        assert_eq!(a[0], rational(1));
        assert!(a[1..d].iter().all(Zero::is_zero));
        assert!(a.iter().all(|x| !x.is_negative()));
        assert_eq!(solution.value, a.iter().sum::<BigRational>());
        for i in 0..=params.n() {
            let dual: BigRational = (0..=params.n()).map(|x| params.q(i, x) * &a[x]).sum();
            assert!(!dual.is_negative(), "n={n} q={q} d={d} i={i}");
        }
        assert!(!solution.value.is_zero());
    }
}
