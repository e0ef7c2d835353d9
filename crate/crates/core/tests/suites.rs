use frobenius_forge::model::builtin_catalog;
use frobenius_forge::verify::{emit_report, run_suite, Format, SuiteSpec};

#[test]
fn every_suite_passes_on_every_catalog_model() {
    for name in ["P1", "P2", "poly2d"] {
        let m = builtin_catalog(name, 5).unwrap();
        let spec = SuiteSpec::new("all", &m).unwrap();
        let report = run_suite(&m, &spec).unwrap();
        println!("{}", emit_report(std::slice::from_ref(&report), Format::Text));
        assert!(report.pass, "{name}");
    }
}
