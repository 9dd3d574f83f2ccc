// The 6k-dimensional construction with a one-dimensional kernel, where l1
// recovers every nonnegative vector on a fixed support and l0.5 does not.

use lp_recovery::experiments::run_example1;

pub fn run_example() -> lp_recovery::Result<()> {
    for k in [2, 5, 8] {
        let r = run_example1(k, 0.5)?;
        println!(
            "k={k}: strong max sparsity l1 {} / l0.5 {}, weak l1 holds {}, weak l0.5 holds {}, all claims match {}",
            r.l1_strong_max,
            r.lp_strong_max,
            r.weak_l1_holds,
            r.weak_lp_holds,
            r.all_match()
        );
    }
    let r = run_example1(2, 0.5)?;
    for c in &r.claims {
        println!("  {:<24} expected {:<30} observed {}", c.name, c.expected, c.observed);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
