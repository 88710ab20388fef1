//! Writing and reading `.npy`, PGM and PNG files.
//!
//! cargo run --example npy_io

use spectool::io::{read_array, read_image_file, write_array, write_image_file, Dtype};
use spectool::synthetic::white_noise;

fn main() -> spectool::Result<()> {
    let img = white_noise(6, 4, 1)?;
    for dtype in [Dtype::F64, Dtype::F32, Dtype::U16, Dtype::U8] {
        let bytes = write_array(&img, dtype)?;
        let back = read_array(&bytes)?;
        let err = img
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("{:>3}: {} bytes, max error {err:.2e}", dtype.descr(), bytes.len());
    }
    let header = &write_array(&img, Dtype::F64)?[10..128];
    println!("header: {}", String::from_utf8_lossy(header).trim_end());

    let dir = std::env::temp_dir().join("spectool-npy-io");
    for name in ["a.npy", "a.pgm", "a.png"] {
        let path = dir.join(name);
        write_image_file(&path, &img)?;
        println!("{name}: reads back as {:?}", read_image_file(&path)?.dims());
    }
    Ok(())
}
