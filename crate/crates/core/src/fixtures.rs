//! Small reference problems.

use crate::model::DecisionProblem;

/// The lane-change problem: `X` is whether the truck ahead brakes, `Y`
/// whether an occluded car cuts in, `U` whether to change lane.
///
/// Acting on `X` alone (changing lane when the truck brakes) is worse than
/// never changing lane, so the perception value is negative here.
pub fn lane_change() -> DecisionProblem {
    let joint = vec![0.04, 0.06, 0.81, 0.09];
    // (x, y, u) row-major
    let loss = vec![0.0, -1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
    DecisionProblem::from_tables(2, 2, 2, joint, loss).expect("fixture is valid")
}
