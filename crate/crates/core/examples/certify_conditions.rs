// Null-space conditions: an exact sectional counterexample on a one-column
// basis, and a falsification search on a random Gaussian basis.

use lp_recovery::conditions::{certify, verify_witness, ConditionMode, ConditionTarget, SearchBudget, SupportPattern};
use lp_recovery::linalg::{sample_gaussian_matrix, DenseMatrix, RngSeed};

pub fn run_example() -> lp_recovery::Result<()> {
    let budget = SearchBudget::default();
    let b = DenseMatrix::column(&[16.0, 16.0, 1.0, 36.0])?;
    let t = ConditionTarget::Support(vec![0, 1]);
    for p in [1.0, 0.5] {
        let v = certify(&b, ConditionMode::Sectional, p, &t, &budget)?;
        let sides = v.witness.as_ref().map(|w| (w.lhs, w.rhs));
        println!("sectional p={p}: holds {} (exact {}), violation {sides:?}", v.holds, v.certificate_exact);
    }

    let b = sample_gaussian_matrix(200, 4, RngSeed(3));
    for rho in [0.4, 0.8] {
        let pat = SupportPattern::nonnegative((0..(rho * 200.0) as usize).collect())?;
        let v = certify(&b, ConditionMode::WeakLp, 0.5, &ConditionTarget::Pattern(pat.clone()), &budget)?;
        let verified = v
            .witness
            .as_ref()
            .map(|w| verify_witness(&b, ConditionMode::WeakLp, 0.5, Some(&pat), w));
        println!(
            "weak l0.5 at rho={rho}: holds {}, worst margin {:.4}, witness re-verified {verified:?}",
            v.holds, v.worst_margin
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
