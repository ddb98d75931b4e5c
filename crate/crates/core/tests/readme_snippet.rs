use kcore_core::branching::{prob_a, BranchingSpec, FixedPointMode};
use kcore_core::StepKernel64;

#[test]
fn readme_example_runs() -> kcore_core::Result<()> {
    let w = StepKernel64::with_equal_blocks(vec![vec![2.0, 0.0], vec![0.0, 1.0]])?;
    let p = prob_a(&BranchingSpec::new(w, 4.0)?, 3, FixedPointMode::limit())?;
    assert!(p.value > 0.0 && p.value < 0.5 && p.profile.iterations > 0);
    Ok(())
}
