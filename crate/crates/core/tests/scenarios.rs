use chebyshev_auth::harness::{parse_scenarios, run_scenario, Check, Status};
use chebyshev_auth::protocol::Party;

type Expected = (&'static str, Status, Option<(Party, Check)>);

const DEMO: &str = include_str!("../../../scenarios/demo.txt");

#[test]
fn demo_scenarios() {
    let specs = parse_scenarios(DEMO).unwrap();
    let expected: [Expected; 11] = [
        ("honest", Status::Agreed, None),
        ("honest-256", Status::Agreed, None),
        (
            "tamper-login-c2",
            Status::Rejected,
            Some((Party::Agt, Check::C2)),
        ),
        (
            "tamper-response",
            Status::Rejected,
            Some((Party::Ev, Check::AuthS)),
        ),
        (
            "tamper-confirm",
            Status::Rejected,
            Some((Party::Agt, Check::AuthU)),
        ),
        (
            "replay-confirm",
            Status::Rejected,
            Some((Party::Agt, Check::AuthU)),
        ),
        (
            "replay-login",
            Status::Rejected,
            Some((Party::Ev, Check::AuthS)),
        ),
        ("drop-response", Status::Incomplete, None),
        (
            "rogue-aggregator",
            Status::Rejected,
            Some((Party::Ev, Check::AuthS)),
        ),
        (
            "stolen-card",
            Status::Rejected,
            Some((Party::Ev, Check::I0)),
        ),
        (
            "stolen-card-patched-terminal",
            Status::Rejected,
            Some((Party::Agt, Check::C2)),
        ),
    ];
    assert_eq!(specs.len(), expected.len());
    for (spec, (name, status, rejection)) in specs.iter().zip(expected) {
        assert_eq!(spec.name, name);
        let r = run_scenario(spec, 0).unwrap();
        assert_eq!(r.outcome.status(), status, "{name}");
        assert_eq!(
            r.outcome.rejection.map(|x| (x.party, x.check)),
            rejection,
            "{name}"
        );
        assert!(!r.outcome.keys_conflict(), "{name}");
    }
}

#[test]
fn replayed_login_is_answered_but_harmless() {
    // Without timestamps the aggregator still answers a replayed request;
    // the vehicle then refuses the answer.
    let specs = parse_scenarios("scenario r\nseed 6\nreplay 1 600\nend\n").unwrap();
    let r = run_scenario(&specs[0], 0).unwrap();
    assert_eq!(r.outcome.transcript.len(), 2);
    assert!(r.outcome.sk_ev.is_none() && r.outcome.sk_agt.is_none());
}
