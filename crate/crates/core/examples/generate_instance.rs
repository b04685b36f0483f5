//! Generate an instance of each kind, validate it and print a digest.

use mtbound::model::{self, generate, validate};
use mtbound::{GeneratorConfig, InstanceKind};

fn main() {
    for kind in [InstanceKind::Simple, InstanceKind::Complex, InstanceKind::Generic] {
        let inst = generate(&GeneratorConfig::standard(kind, 5, 42)).unwrap();
        assert!(validate(&inst).is_empty());
        println!("{kind}: {} targets, {} bytes of JSON", inst.targets.len(), model::to_json(&inst).len());
        for t in &inst.targets {
            let windows: Vec<String> = t.windows.iter().map(|w| format!("[{:.3}, {:.3}]", w.lo, w.hi)).collect();
            println!("  target {}: {} pieces, speed {:.3}, windows {}", t.id, t.trajectory.pieces().len(), t.trajectory.speed(), windows.join(" "));
        }
    }
    let path = std::env::temp_dir().join("mtbound_example.json");
    let inst = generate(&GeneratorConfig::standard(InstanceKind::Simple, 3, 1)).unwrap();
    model::save(&inst, &path).unwrap();
    assert_eq!(model::load(&path).unwrap(), inst);
    println!("saved and reloaded {}", path.display());
}
