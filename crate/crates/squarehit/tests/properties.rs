mod common;

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use squarehit::approx::{colour_squares, hit_greedy};
use squarehit::geometry::{contains_point, dist_point_square, squares_intersect};
use squarehit::hitters::HitterKind;
use squarehit::io::{read_instance, write_instance};
use squarehit::solvers::{solve, validate_witness, Param, SolverLimits};
use squarehit::{Point, Square, SquareFamily, Tolerance};

fn square(side: std::ops::Range<f64>) -> impl Strategy<Value = Square> {
    (-3.0..3.0f64, -3.0..3.0f64, side, 0.0..FRAC_PI_2).prop_map(|(x, y, s, r)| Square::new(Point::new(x, y), s, r).unwrap())
}

fn family(max: usize, side: std::ops::Range<f64>) -> impl Strategy<Value = SquareFamily> {
    prop::collection::vec(square(side), 1..=max).prop_map(SquareFamily::new)
}

fn unit_family(max: usize) -> impl Strategy<Value = SquareFamily> {
    prop::collection::vec(
        (-2.5..2.5f64, -2.5..2.5f64, 0.0..FRAC_PI_2).prop_map(|(x, y, r)| Square::new(Point::new(x, y), 1.0, r).unwrap()),
        1..=max,
    )
    .prop_map(SquareFamily::new)
}

proptest! {
    #[test]
    fn intersection_matches_separating_axes(a in square(0.2..3.0), b in square(0.2..3.0)) {
        let tol = Tolerance::default();
        prop_assert_eq!(squares_intersect(&a, &b, tol), squares_intersect(&b, &a, tol));
        prop_assert_eq!(squares_intersect(&a, &b, tol), common::meets(&a, &b));
    }

    #[test]
    fn containment_matches_distance(s in square(0.2..3.0), x in -4.0..4.0f64, y in -4.0..4.0f64) {
        let p = Point::new(x, y);
        let d = dist_point_square(p, &s);
        prop_assume!(d > 1e-7 || d == 0.0);
        prop_assert_eq!(contains_point(&s, p, Tolerance::default()), d == 0.0);
        prop_assert_eq!(common::holds(&s, (x, y)), d == 0.0);
    }

    #[test]
    fn vertices_lie_on_boundary(s in square(0.2..3.0)) {
        for v in s.vertices() {
            prop_assert!(contains_point(&s, v, Tolerance::default()));
            prop_assert!((v.dist(s.centre()) - s.side() / 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
        }
    }

    #[test]
    fn greedy_hits_every_square(fam in family(20, 0.5..2.5)) {
        let run = hit_greedy(&fam, HitterKind::TenPoint).unwrap();
        prop_assert!(fam.is_hit_by(&run.points));
        prop_assert!(run.within_bound());
        let pivots = run.pivots();
        for (i, &p) in pivots.iter().enumerate() {
            for &q in &pivots[i + 1..] {
                prop_assert!(!common::meets(&fam.squares[p], &fam.squares[q]));
            }
        }
    }

    #[test]
    fn six_point_greedy_on_unit_squares(fam in unit_family(20)) {
        let run = hit_greedy(&fam, HitterKind::SixPointLeftmost).unwrap();
        prop_assert!(fam.is_hit_by(&run.points));
        prop_assert!(run.points.len() <= 6 * run.rounds.len());
    }

    #[test]
    fn colouring_is_proper(fam in family(25, 0.5..2.5)) {
        let run = colour_squares(&fam);
        let adj = common::adjacency(&fam);
        for i in 0..fam.len() {
            for j in 0..fam.len() {
                prop_assert!(!adj[i][j] || run.colour_of[i] != run.colour_of[j]);
            }
        }
        prop_assert_eq!(run.k_used, run.colour_of.iter().max().map_or(0, |m| m + 1));
    }

    #[test]
    fn solver_witnesses_validate(fam in family(8, 0.5..2.0)) {
        for p in [Param::Tau, Param::Nu, Param::Chi, Param::Omega, Param::Delta] {
            let r = solve(&fam, p, &SolverLimits::default()).unwrap();
            prop_assert!(r.optimal);
            prop_assert!(validate_witness(&fam, p, &r), "{} witness rejected", p);
        }
    }

    #[test]
    fn ply_matches_oracle(fam in family(8, 0.5..2.0)) {
        let r = solve(&fam, Param::Delta, &SolverLimits::default()).unwrap();
        prop_assert_eq!(r.value, common::naive_ply(&fam));
    }

    #[test]
    fn instance_round_trip(fam in family(12, 0.1..5.0)) {
        let back = read_instance(&write_instance(&fam)).unwrap();
        prop_assert_eq!(back, fam);
    }

    #[test]
    fn packing_bounds_hitting(fam in family(9, 0.5..2.0)) {
        let lim = SolverLimits::default();
        let nu = solve(&fam, Param::Nu, &lim).unwrap().value;
        let tau = solve(&fam, Param::Tau, &lim).unwrap().value;
        let chi = solve(&fam, Param::Chi, &lim).unwrap().value;
        let omega = solve(&fam, Param::Omega, &lim).unwrap().value;
        prop_assert!(nu <= tau);
        prop_assert!(omega <= chi);
    }
}
