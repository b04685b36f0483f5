use mtbound::cli::SolutionDoc;
use mtbound::feasible::find_feasible;
use mtbound::graph::build;
use mtbound::gtsp::{solve_exact, Effort};
use mtbound::model::{self, generate, ModelError, Violation};
use mtbound::{ClusteredGraph, DiscretizationLevel, EdgeCost, GeneratorConfig, InstanceKind, SamplingParams, Variant};

const ONE_TARGET: &str = r#"{
  "version": 1,
  "units": { "length": "m", "time": "s", "speed": "m/s" },
  "kind": "simple",
  "depot": [0.0, 0.0],
  "v_max": 4.0,
  "horizon": 20.0,
  "targets": [
    {
      "id": 1,
      "speed": 0.5,
      "windows": [[2.0, 12.0]],
      "pieces": [
        { "type": "line", "start": [10.0, 0.0], "end": [20.0, 0.0], "t_start": 0.0, "t_end": 20.0 }
      ]
    }
  ]
}"#;

#[test]
fn hand_written_instance_loads() {
    let inst = model::from_json(ONE_TARGET).unwrap();
    assert_eq!(inst.targets.len(), 1);
    assert_eq!(inst.targets[0].trajectory.position_clamped(10.0).x, 15.0);
    let g = build(&inst, 5.0, Variant::Linear, SamplingParams::default()).unwrap();
    assert_eq!(g.n_nodes(), 4);
    let lb = solve_exact(&g).unwrap();
    // interception at t = 20/7, return from the closest point of [2, 7], x = 11
    assert!((lb.cost - (20.0 / 7.0 + 11.0 / 4.0)).abs() < 1e-9, "{}", lb.cost);
}

#[test]
fn instances_round_trip_byte_identically() {
    for kind in [InstanceKind::Simple, InstanceKind::Complex, InstanceKind::Generic] {
        let inst = generate(&GeneratorConfig::standard(kind, 4, 21)).unwrap();
        let text = model::to_json(&inst);
        let back = model::from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(model::to_json(&back), text);
    }
}

#[test]
fn missing_field_is_named() {
    let text = ONE_TARGET.replace("\"v_max\": 4.0,", "");
    match model::from_json(&text) {
        Err(ModelError::Parse(e)) => {
            assert_eq!(e.field.as_deref(), Some("v_max"));
            assert!(e.line > 0);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn unknown_fields_and_versions_are_rejected() {
    let extra = ONE_TARGET.replace("\"horizon\": 20.0,", "\"horizon\": 20.0, \"colour\": 3,");
    assert!(matches!(model::from_json(&extra), Err(ModelError::Parse(e)) if e.field.as_deref() == Some("colour")));
    let future = ONE_TARGET.replace("\"version\": 1", "\"version\": 2");
    assert!(matches!(model::from_json(&future), Err(ModelError::Parse(_))));
}

#[test]
fn invalid_instances_report_every_violation() {
    let text = ONE_TARGET.replace("[[2.0, 12.0]]", "[[12.0, 2.0]]").replace("\"v_max\": 4.0", "\"v_max\": 0.25");
    match model::from_json(&text) {
        Err(ModelError::Validation(v)) => {
            assert!(v.contains(&Violation::EmptyWindow { id: 1, index: 0 }), "{v:?}");
            assert!(v.contains(&Violation::SpeedExceedsAgent { id: 1 }), "{v:?}");
        }
        other => panic!("expected violations, got {other:?}"),
    }
}

#[test]
fn graph_dump_round_trips_with_null_edges() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Complex, 3, 4)).unwrap();
    let g = build(&inst, DiscretizationLevel::Level(2).delta(), Variant::Linear, SamplingParams::default()).unwrap();
    assert!(g.edges().any(|(_, _, c)| c == EdgeCost::Infeasible));
    let text = g.to_json();
    assert!(text.contains("null"));
    let back = ClusteredGraph::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    for (u, v, c) in g.edges() {
        assert_eq!(back.cost(u, v), c);
    }
    assert_eq!(solve_exact(&back).unwrap().cost, solve_exact(&g).unwrap().cost);
}

#[test]
fn solution_documents_round_trip() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 3, 8)).unwrap();
    let g = build(&inst, 2.5, Variant::Geometric, SamplingParams::default()).unwrap();
    let lb = SolutionDoc::lower_bound(&g, Variant::Geometric, &solve_exact(&g).unwrap());
    assert_eq!(SolutionDoc::from_json(&lb.to_json()).unwrap(), lb);
    let tour = SolutionDoc::feasible(&find_feasible(&inst, 16, Effort::Fast).unwrap());
    let text = tour.to_json();
    assert!(text.contains("\"solution\": \"feasible\""));
    assert_eq!(SolutionDoc::from_json(&text).unwrap(), tour);
}
