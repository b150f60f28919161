mod common;

use common::oracles::{check_matcher, check_role_climb, check_solver};

#[test]
fn matcher_agrees_with_brute_force() {
    check_matcher(1000).unwrap();
}

#[test]
fn role_climb_agrees_with_ancestor_scan() {
    check_role_climb(1000).unwrap();
}

#[test]
fn solver_agrees_with_bottom_up_fixpoint() {
    check_solver(500).unwrap();
}
