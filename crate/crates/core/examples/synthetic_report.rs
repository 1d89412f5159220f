//! Unitizes the bundled fixtures, simulates 20 raters and prints the text report.

use cohesion_core::analysis::{analyze, AnalysisConfig};
use cohesion_core::model::{load_timeline, Questionnaire};
use cohesion_core::simulate::{simulate_ratings, SimulationConfig};
use cohesion_core::unitize::Unitizer;

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");
    let mut units = Vec::new();
    for i in 1..=12 {
        let tl = load_timeline(format!("{dir}/tl_{i:02}.json")).expect("fixture");
        for u in Unitizer::study_set() {
            units.extend(u.apply(&tl).expect("unitize"));
        }
    }
    let q = Questionnaire::default();
    let sim = simulate_ratings(&units, &q, &SimulationConfig::default(), 42).expect("simulate");
    let report = analyze(&units, &sim.ratings, &q, &sim.expert, &AnalysisConfig::default()).expect("analyze");
    print!("{}", report.to_text());
}
