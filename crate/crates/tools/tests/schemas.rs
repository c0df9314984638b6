mod common;

use common::{repo_file, write_spec};
use jsonschema::{Resource, Validator};
use mss_core::Config;
use mss_tools::{AnalysisReport, ConfigEcho, ConfigFile, CurveSpec, EventReport};
use proptest::prelude::*;
use serde_json::Value;

fn load(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(repo_file(&format!("schemas/{name}"))).unwrap()).unwrap()
}

fn validator(name: &str) -> Validator {
    let echo = Resource::from_contents(load("config-echo.schema.json")).unwrap();
    jsonschema::options()
        .with_resource("json-schema:///config-echo.schema.json", echo)
        .build(&load(name))
        .unwrap()
}

fn assert_valid(v: &Validator, text: &str) {
    let doc: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn shipped_curves_match_the_spec_schema() {
    let v = validator("curve-spec.schema.json");
    for name in ["unit_circle", "ellipse", "mirror", "translation"] {
        let text = std::fs::read_to_string(repo_file(&format!("curves/{name}.json"))).unwrap();
        assert_valid(&v, &text);
        CurveSpec::parse(&text).unwrap().to_family().unwrap();
    }
    let bad = r#"{"name":"c","x":{"const":0,"cos":[1],"sin":[]},"y":{"const":0,"cos":[],"sin":[1]},"extra":1}"#;
    assert!(!v.is_valid(&serde_json::from_str(bad).unwrap()));
}

#[test]
fn analysis_report_validates_and_round_trips() {
    let spec = CurveSpec::parse(&std::fs::read_to_string(repo_file("curves/mirror.json")).unwrap()).unwrap();
    let cfg = Config { grid_n: 128, ..Config::default() };
    let json = AnalysisReport::build(&spec, 0.0, &cfg).unwrap().to_json();
    assert_valid(&validator("analysis-report.schema.json"), &json);
    let back = AnalysisReport::parse(&json).unwrap();
    assert_eq!(back.to_json(), json);
    assert_eq!(back.config_echo.to_config(), cfg);
}

#[test]
fn event_report_validates_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (planted, _) = mss_testkit::a22_pair()[1].clone();
    let path = write_spec(dir.path(), "a22", &planted.family);
    let spec = CurveSpec::load(&path).unwrap();
    let cfg = Config { scan_steps: 12, ..Config::default() };
    let json = EventReport::build(&spec, -2e-4, 2e-4, &cfg).unwrap().to_json();
    assert_valid(&validator("event-report.schema.json"), &json);
    let back = EventReport::parse(&json).unwrap();
    assert!(!back.events.is_empty());
    assert_eq!(back.to_json(), json);
}

#[test]
fn config_files_and_echo_validate() {
    let echo = serde_json::to_string(&ConfigEcho::from(&Config::default())).unwrap();
    assert_valid(&validator("config-echo.schema.json"), &echo);
    let file = r#"{"grid_n": 256, "solver_tol": 1e-11}"#;
    assert_valid(&validator("config.schema.json"), file);
    ConfigFile::parse(file).unwrap();
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 0..5)
}

proptest! {
    #[test]
    fn curve_spec_round_trips(c0 in -5.0f64..5.0, cx in coeffs(), sx in coeffs(), cy in coeffs(), sy in coeffs(), order in 1u32..4) {
        let text = serde_json::json!({
            "name": "p",
            "x": {"const": c0, "cos": cx, "sin": sx},
            "y": {"const": -c0, "cos": cy, "sin": sy},
            "family": [{"order": order, "x": {"const": c0, "cos": sy, "sin": cx}, "y": {"const": 0.5, "cos": [], "sin": []}}],
        }).to_string();
        let spec = CurveSpec::parse(&text).unwrap();
        let again = CurveSpec::parse(&spec.to_json()).unwrap();
        prop_assert_eq!(&again, &spec);
        // the family and the spec carry the same coefficients
        if let Ok(fam) = spec.to_family() {
            let back = CurveSpec::from_family("p", &fam);
            prop_assert_eq!(back.x, spec.x);
            prop_assert_eq!(back.y, spec.y);
        }
    }
}
