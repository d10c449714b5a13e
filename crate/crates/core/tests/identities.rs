use num_traits::Zero;
use twofold_core::maps::{cluster_grand_sum, ClusterConfig};
use twofold_core::model::{loop_from_potts_exact, PottsParams};
use twofold_core::scalar::ratio;
use twofold_core::series::gasket_fixed_point;

#[test]
fn two_gon_series_count_rooted_potts_maps() {
    let configs = ClusterConfig::enumerate(3).unwrap();
    for (q, t, j) in [(ratio(1, 1), ratio(1, 9), ratio(4, 1)), (ratio(9, 4), ratio(4, 9), ratio(27, 8))] {
        let mut p = PottsParams::new(q, t, j);
        p.mu_v = ratio(2, 3);
        p.mu_f = ratio(5, 4);
        let w = loop_from_potts_exact(&p).unwrap();
        let sol = gasket_fixed_point(&w, 2, 6).unwrap();
        for grade in 1..=6 {
            let lhs = sol.f1[2].coeff(grade) + sol.f2[2].coeff(grade);
            if grade % 2 == 1 {
                assert!(lhs.is_zero(), "odd grade {grade}");
            } else {
                assert_eq!(lhs, cluster_grand_sum(&configs, grade / 2, &p), "grade {grade}");
            }
        }
    }
}
