// Half-normal density, absolute moments and the three moment generating
// functions, each next to a closed form where one exists.

use lp_recovery::gaussian::{
    abs_moment, abs_moment_closed_form, half_normal_cdf, half_normal_pdf, mgf_indicator, mgf_neg,
    mgf_neg_upper_bound, mgf_pos,
};
use lp_recovery::QuadratureConfig;

pub fn run_example() -> lp_recovery::Result<()> {
    let quad = QuadratureConfig::default();
    println!("f(1) = {:.10}, F(1) = {:.10}", half_normal_pdf(1.0), half_normal_cdf(1.0));
    for p in [0.5, 1.0, 2.0] {
        println!(
            "E|X|^{p}: quadrature {:.12}, closed form {:.12}",
            abs_moment(p, &quad)?,
            abs_moment_closed_form(p)
        );
    }
    println!("E exp(|X|)        = {:.10}", mgf_pos(1.0, 1.0, &quad)?);
    println!("E exp(|X|^0.5)    = {:.10}", mgf_pos(1.0, 0.5, &quad)?);
    println!("E exp(-|X|)       = {:.10}", mgf_neg(1.0, 1.0, &quad)?);
    println!(
        "E exp(-4|X|^0.5)  = {:.6} <= bound {:.6}",
        mgf_neg(4.0, 0.5, &quad)?,
        mgf_neg_upper_bound(4.0, 0.5)
    );
    println!("indicator MGF at t=1, p=1: {:.7}", mgf_indicator(1.0, 1.0, &quad)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
