//! ADCS maps for three synthetic classes that differ in spectral slope.
//!
//! cargo run --example class_adcs

use spectool::adcs::{adcs_all, class_mean_spectrum};
use spectool::synthetic::power_law_field;

fn main() -> spectool::Result<()> {
    let mut classes = Vec::new();
    for (label, exponent) in [("smooth", 1.5), ("natural", 1.0), ("rough", 0.5)] {
        let images: Vec<_> = (0..6)
            .map(|s| power_law_field(32, 32, exponent, s + (exponent * 100.0) as u64))
            .collect::<spectool::Result<_>>()?;
        classes.push(class_mean_spectrum(&images, label)?);
    }
    for map in adcs_all(&classes)? {
        let (lo, hi) = map.bounds();
        let mut hist = vec![0usize; (hi - lo + 1) as usize];
        for &v in map.values() {
            hist[(v - lo) as usize] += 1;
        }
        println!("{:>8}: values {lo}..={hi}, counts {hist:?}", map.target_label());
        // row through DC, left half: low frequencies on the right
        let row: Vec<i32> = (0..16).map(|c| map.get(16, c)).collect();
        println!("          centre row {row:?}");
    }
    Ok(())
}
