//! How many samples each corruption fraction marks, and the OOD plan.
//!
//! cargo run --example corruption_plan

use spectool::io::{parse_manifest, Split};
use spectool::shortcuts::{plan_corruption, CorruptionSpec, Shortcut};

fn main() -> spectool::Result<()> {
    let mut text = String::from("path,label,split\n");
    for i in 0..10 {
        text.push_str(&format!("train/pos_{i}.png,pos,train\ntrain/neg_{i}.png,neg,train\n"));
        text.push_str(&format!("ood/neg_{i}.png,neg,test-ood\n"));
    }
    let manifest = parse_manifest(&text)?;

    let mut spec = CorruptionSpec {
        shortcut: Shortcut::Photon { photon_scale: 255.0 },
        fraction: 0.0,
        target_label: "pos".into(),
        seed: 7,
    };
    for p in [0.0, 0.25, 0.5, 1.0] {
        spec.fraction = p;
        let plan = plan_corruption(&manifest, &spec, Split::Train)?;
        let marked: Vec<&str> = plan.marked().map(|e| e.path.as_str()).collect();
        println!("p = {p:<4}: {} marked {marked:?}", marked.len());
    }

    spec.fraction = 1.0;
    spec.target_label = "neg".into();
    let ood = plan_corruption(&manifest, &spec, Split::TestOod)?;
    println!("OOD plan:\n{}", ood.to_csv());
    println!("spec JSON: {}", serde_json::to_string(&spec).expect("spec serializes"));
    Ok(())
}
