//! Locks the certificate report JSON schema: field names, nesting, and the
//! serialized form of a fixture whose witnesses are exactly representable.
//! Downstream tooling parses this format; changes here are breaking.

use orlicz_isotone::certificate::{certify, CertificateReport, CertifyOptions};
use orlicz_isotone::grid::{CellGrid, StepFunction};
use orlicz_isotone::isotone::{fit_isotone, SolverOptions};
use orlicz_isotone::orlicz::OrliczSpec;

const GOLDEN: &str = r#"{
  "tol": 2.5e-8,
  "jump_tol": 1e-9,
  "item1_balance": 0.0,
  "item1_pass": true,
  "item2_min_r": 0.0,
  "item2_pass": true,
  "item3_total": 0.0,
  "item3_pass": true,
  "item4_max_tail": 0.0,
  "item4_pass": true,
  "item5_jump_residuals": [],
  "item5_pass": true,
  "item6_witnesses": [
    {
      "boundary": 1,
      "r": 0.5,
      "locally_constant": true
    }
  ],
  "item6_pass": true,
  "characterization_min": 0.0,
  "characterization_argmin": "const_plus_one",
  "characterization_pass": true,
  "passed": true
}"#;

#[test]
fn certificate_report_json_is_stable() {
    let spec = OrliczSpec::power(2.0).unwrap();
    let grid = CellGrid::uniform(0.0, 2.0, 2).unwrap();
    let f = StepFunction::new(vec![2.0, 1.0]);
    let fit = fit_isotone(&spec, &grid, &f, &SolverOptions::default()).unwrap();
    let report = certify(&spec, &grid, &f, &fit, &CertifyOptions::default()).unwrap();
    let json = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(json, GOLDEN);

    // And the golden parses back to an identical report.
    let parsed: CertificateReport = serde_json::from_str(GOLDEN).unwrap();
    assert_eq!(parsed, report);
}
