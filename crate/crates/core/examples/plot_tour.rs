//! SVG pictures of a lower-bound tour and a feasible tour.

use mtbound::cli::{render_svg, SolutionDoc};
use mtbound::feasible::{find_feasible, DEFAULT_SAMPLES};
use mtbound::graph::build;
use mtbound::gtsp::{solve_exact, Effort};
use mtbound::model::generate;
use mtbound::{GeneratorConfig, InstanceKind, SamplingParams, Variant};

fn main() {
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Generic, 5, 2)).unwrap();
    let graph = build(&inst, 1.25, Variant::Sampling, SamplingParams::default()).unwrap();
    let lb = SolutionDoc::lower_bound(&graph, Variant::Sampling, &solve_exact(&graph).unwrap());
    let ub = SolutionDoc::feasible(&find_feasible(&inst, DEFAULT_SAMPLES, Effort::Fast).unwrap());
    let dir = std::env::temp_dir();
    for (name, doc) in [("lower_bound", &lb), ("feasible", &ub)] {
        let path = dir.join(format!("mtbound_{name}.svg"));
        std::fs::write(&path, render_svg(&inst, Some(doc))).unwrap();
        println!("wrote {}", path.display());
    }
}
