use moment_flows::json::{FlowJson, SequenceJson};
use moment_flows::{combined_flow, evaluate_flow, MomentFlow, MomentSequence};
use proptest::prelude::*;

proptest! {
    #[test]
    fn sequences_round_trip_bit_for_bit(vals in prop::collection::vec(prop::num::f64::NORMAL, 10)) {
        let s = MomentSequence::from_values(3, 2, vals).unwrap();
        let text = serde_json::to_string(&SequenceJson::from(&s)).unwrap();
        let back = MomentSequence::try_from(serde_json::from_str::<SequenceJson>(&text).unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn flows_round_trip(vals in prop::collection::vec(-5.0f64..5.0, 5), a in 0.1f64..1.0, t in -1.0f64..1.0) {
        let s = MomentSequence::one_dim(&vals).unwrap();
        let flow = combined_flow(&s, 0.5, &[a]).unwrap();
        let text = serde_json::to_string(&FlowJson::from(&flow)).unwrap();
        let back = MomentFlow::try_from(serde_json::from_str::<FlowJson>(&text).unwrap()).unwrap();
        prop_assert_eq!(evaluate_flow(&back, t), evaluate_flow(&flow, t));
    }
}

#[test]
fn schema_violations_are_rejected() {
    for text in [
        r#"{"n":1,"degree":1,"moments":[{"alpha":[0],"value":1.0}]}"#,
        r#"{"n":1,"degree":1,"moments":[{"alpha":[0],"value":1.0},{"alpha":[0],"value":2.0}]}"#,
        r#"{"n":1,"degree":1,"moments":[{"alpha":[0],"value":1.0},{"alpha":[2],"value":2.0}]}"#,
        r#"{"n":2,"degree":0,"moments":[{"alpha":[0],"value":1.0}]}"#,
    ] {
        let wire: SequenceJson = serde_json::from_str(text).unwrap();
        assert!(MomentSequence::try_from(wire).is_err(), "{text}");
    }
    assert!(
        serde_json::from_str::<SequenceJson>(r#"{"n":1,"degree":0,"moments":[],"extra":1}"#)
            .is_err()
    );
}
