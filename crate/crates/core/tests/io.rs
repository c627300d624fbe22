mod common;

use common::*;
use fpa_core::io::*;
use fpa_core::sim::{series_from_statespace, StateSpaceModel};
use fpa_core::{q, qr, CommSeries, FpaError, Monomial};
use proptest::prelude::*;

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn minimal_file() {
    let c = parse_ncfps("nc alphabet=2 components=1 maxdeg=1\ne 1\nx1 -1").unwrap();
    assert_eq!(c, nc(1, 1, &[("e", q(1)), ("x1", q(-1))]));
    assert_eq!(c.to_string(), "1 - x1");
}

#[test]
fn length_lex_output() {
    let c = parse_ncfps("nc alphabet=2 components=1 maxdeg=2\nx0x1 1/1\nx0 1/1\n").unwrap();
    assert_eq!(write_ncfps(&c), "nc alphabet=2 components=1 maxdeg=2\nx0 1\nx0x1 1\n");
}

#[test]
fn pendulum_file_round_trips_and_matches_model() {
    let text = data("pendulum.ncfps");
    let c = parse_ncfps(&text).unwrap();
    assert_eq!(write_ncfps(&c), text);
    assert_eq!(c, series_from_statespace(&StateSpaceModel::pendulum(), 6).unwrap());
}

#[test]
fn comm_files() {
    let d = parse_cfps(&data("sine.cfps")).unwrap();
    assert!(!d.is_polynomial());
    assert_eq!(d.maxdeg(), 7);
    assert_eq!(d.coeff(&Monomial(vec![3]), 0).unwrap(), qr(-1, 6));
    assert_eq!(d, fpa_core::sim::sine_series(7));
    let p = parse_cfps(&data("identity.cfps")).unwrap();
    assert_eq!(p, CommSeries::identity(1));
    let two = parse_cfps("comm alphabet=2 components=2 maxdeg=2 tail=zero\n0,0 1 0\n1,1 0 -3/4\n").unwrap();
    assert_eq!(two.coeff(&Monomial(vec![1, 1]), 1).unwrap(), qr(-3, 4));
    assert_eq!(parse_cfps(&write_cfps(&two)).unwrap(), two);
}

#[test]
fn errors_carry_positions() {
    let cases = [
        ("nc alphabet=2 components=1 maxdeg=2\nx3 1\n", (2, 1)),
        ("nc alphabet=2 components=1 maxdeg=1\nx0x0 1\n", (2, 1)),
        ("nc alphabet=2 components=1 maxdeg=2\nx0 1\nx0 2\n", (3, 1)),
        ("nc alphabet=2 components=1 maxdeg=2\n\n# note\n  x0   1/0\n", (4, 8)),
        ("nc alphabet=2 components=2 maxdeg=2\nx0 1\n", (2, 1)),
        ("nc alphabet=2 maxdeg=2\n", (1, 1)),
        ("nc alphabet=2 components=1 maxdeg=2 color=red\n", (1, 37)),
        ("nc alphabet=2 components=1 maxdeg=two\n", (1, 28)),
        ("comm alphabet=2 components=1 maxdeg=2\n1 1\n", (2, 1)),
        ("comm alphabet=1 components=1 maxdeg=2\n1 1 # x\n\t2 z\n", (3, 4)),
        ("comm alphabet=1 components=1 maxdeg=2 tail=maybe\n", (1, 39)),
        ("series alphabet=1 components=1 maxdeg=2\n", (1, 1)),
    ];
    for (text, pos) in cases {
        let err = if text.starts_with("comm") { parse_cfps(text).err() } else { parse_ncfps(text).err() };
        match err {
            Some(FpaError::Parse { line, column, .. }) => assert_eq!((line, column), pos, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
    let msg = parse_ncfps("nc alphabet=2 components=1 maxdeg=2\nx0 one\n").unwrap_err().to_string();
    assert!(msg.contains("line 2, column 4"), "{msg}");
    assert!(matches!(parse_ncfps(""), Err(FpaError::Parse { .. })));
    assert!(parse_ncfps("comm alphabet=1 components=1 maxdeg=1\n").is_err());
}

#[test]
fn atomic_write_replaces_file() {
    let dir = std::env::temp_dir().join(format!("fpa-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("out.ncfps");
    write_atomic(&p, "first").unwrap();
    write_atomic(&p, "second").unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn report_schema() {
    let r = Report {
        command: "shuffle".into(),
        inputs: vec!["a".into()],
        maxdeg: Some(3),
        result_path: None,
        checks: vec![Check::new("ok", true, "fine")],
    };
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["checks"][0]["pass"], true);
    assert_eq!(v["result_path"], serde_json::Value::Null);
    assert_eq!(v.as_object().unwrap().len(), 5);
}

proptest! {
    #[test]
    fn nc_round_trip(c in arb_nc(2, 2, 4, false)) {
        let text = write_ncfps(&c);
        let back = parse_ncfps(&text).unwrap();
        prop_assert_eq!(write_ncfps(&back), text);
        prop_assert_eq!(back, c);
    }

    #[test]
    fn comm_round_trip(d in arb_comm(2, 2, 4, false), poly in any::<bool>()) {
        let mut d = d;
        d.set_polynomial(poly);
        let back = parse_cfps(&write_cfps(&d)).unwrap();
        prop_assert_eq!(back, d);
    }
}
