use wavecert::campaign::{self, CriterionResult};
use wavecert::config::RunConfig;

fn run(n: usize) -> CriterionResult {
    let cfg = RunConfig::preset("paper").unwrap();
    let res = campaign::CRITERIA[n - 1](&cfg).unwrap();
    println!("{res}");
    for c in &res.checks {
        println!("    {} {} = {:.6e} (tolerance {:.1e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    println!("    {}", res.note);
    res
}

#[test]
fn criterion_1_unobservability_of_basis() {
    assert!(run(1).pass);
}

#[test]
fn criterion_2_polyharmonic_certification() {
    assert!(run(2).pass);
}

#[test]
fn criterion_3_unitarity() {
    assert!(run(3).pass);
}

#[test]
fn criterion_4_duality() {
    assert!(run(4).pass);
}

#[test]
fn criterion_5_radon_oracle() {
    assert!(run(5).pass);
}

#[test]
fn criterion_6_jump_of_vr() {
    assert!(run(6).pass);
}

#[test]
fn criterion_7_observed_jump() {
    assert!(run(7).pass);
}

#[test]
fn criterion_8_counterexample() {
    assert!(run(8).pass);
}

#[test]
fn criterion_9_limit_definition() {
    assert!(run(9).pass);
}
