use snewton::io::{report_from_json, report_to_json, state_from_json, state_to_json, StateDocument};
use snewton::stability::{analyze, StabilityOptions};
use snewton::stationary::{shoot, ShootOptions};
use snewton::Error;

#[test]
fn state_and_report_round_trip() {
    let s = shoot(0, &ShootOptions { profile_points: 2001, ..Default::default() }).unwrap();
    let back = state_from_json(&state_to_json(&s)).unwrap();
    assert_eq!(back, s);

    let r = analyze(&s, &StabilityOptions { n_nodes: 24, ..Default::default() }).unwrap().report;
    assert_eq!(report_from_json(&report_to_json(&r)).unwrap(), r);
}

#[test]
fn stale_solver_version_rejected() {
    let s = shoot(0, &ShootOptions { profile_points: 501, ..Default::default() }).unwrap();
    let mut doc = StateDocument::from(&s);
    doc.solver_version = "older".into();
    let text = serde_json::to_string(&doc).unwrap();
    assert!(matches!(state_from_json(&text), Err(Error::StaleDocument { .. })));
    assert!(matches!(state_from_json("{"), Err(Error::Format(_))));
}
