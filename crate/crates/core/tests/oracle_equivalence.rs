//! Oracle-equivalence: every closed form against the literal Fock-space
//! simulation on the small-parameter grid.

use catalynet::oracle::{self, ValidationLevel};

#[test]
fn fast_grid_matches_oracle() {
    let report = oracle::validate_grid(ValidationLevel::Fast).expect("grid must evaluate");
    for q in &report.quantities {
        println!(
            "{:<22} worst {:.3e} over {} points ({})",
            q.quantity, q.worst_rel_err, q.points, q.worst_case
        );
        assert!(
            q.worst_rel_err <= report.tolerance,
            "{} exceeded tolerance: {:.3e} at {}",
            q.quantity,
            q.worst_rel_err,
            q.worst_case
        );
    }
    assert!(report.pass);
}
