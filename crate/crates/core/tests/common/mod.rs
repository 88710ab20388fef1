//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use proptest::prelude::*;
use spectool::shortcuts::rng::CounterRng;
use spectool::ImageBuffer;

/// Direct double-sum DFT, returned DC-centered as `(re, im)` pairs in
/// row-major order: the bin at `(row, col)` has frequency
/// `((row - H/2) mod H, (col - W/2) mod W)`.
pub fn dft_oracle(img: &ImageBuffer) -> Vec<(f64, f64)> {
    let (w, h) = img.dims();
    // twiddles by exponent index, reduced mod N so large products stay exact
    let tw = |n: usize| -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let a = -2.0 * PI * k as f64 / n as f64;
                (a.cos(), a.sin())
            })
            .collect()
    };
    let (tw_w, tw_h) = (tw(w), tw(h));
    let mut out = Vec::with_capacity(w * h);
    for row in 0..h {
        let kv = (row + h - h / 2) % h;
        for col in 0..w {
            let ku = (col + w - w / 2) % w;
            let (mut re, mut im) = (0.0, 0.0);
            for y in 0..h {
                let (cy, sy) = tw_h[(kv * y) % h];
                for x in 0..w {
                    let (cx, sx) = tw_w[(ku * x) % w];
                    let v = img.get(y, x);
                    // e^{ia} e^{ib}
                    re += v * (cy * cx - sy * sx);
                    im += v * (cy * sx + sy * cx);
                }
            }
            out.push((re, im));
        }
    }
    out
}

/// Nearest-integer radius of an integer offset without floating point:
/// band `b` covers `(2b-1)^2 <= 4 d^2 < (2b+1)^2`.
pub fn integer_band(dv: i64, du: i64) -> usize {
    let d4 = 4 * (dv * dv + du * du);
    let mut b: i64 = 0;
    while (2 * b + 1) * (2 * b + 1) <= d4 {
        b += 1;
    }
    b as usize
}

/// Buckets row-major `values` of a centered `w x h` grid by nearest-integer
/// radius, drops bins beyond `min(w, h) / 2`, and averages each bucket.
pub fn bucket_oracle(values: &[f64], w: usize, h: usize) -> Vec<f64> {
    let bands = w.min(h) / 2 + 1;
    let mut sums = vec![0.0; bands];
    let mut counts = vec![0usize; bands];
    for row in 0..h {
        for col in 0..w {
            let dv = row as i64 - (h / 2) as i64;
            let du = col as i64 - (w / 2) as i64;
            let b = integer_band(dv, du);
            if b < bands {
                sums[b] += values[row * w + col];
                counts[b] += 1;
            }
        }
    }
    sums.iter()
        .zip(&counts)
        .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
        .collect()
}

/// `sum_j sign(E_t - E_j)` bin by bin, class by class.
pub fn adcs_oracle(target: &[f64], others: &[&[f64]]) -> Vec<i32> {
    let mut out = vec![0i32; target.len()];
    for other in others {
        for (i, slot) in out.iter_mut().enumerate() {
            let d = target[i] - other[i];
            *slot += if d > 0.0 {
                1
            } else if d < 0.0 {
                -1
            } else {
                0
            };
        }
    }
    out
}

pub fn magnitude((re, im): (f64, f64)) -> f64 {
    (re * re + im * im).sqrt()
}

/// Deterministic random image for fixtures, values in `[0, 1)`.
pub fn random_image(w: usize, h: usize, seed: u64) -> ImageBuffer {
    let mut rng = CounterRng::new(seed, 0x7465_7374, 0);
    ImageBuffer::from_fn(w, h, |_, _| rng.next_f64()).unwrap()
}

pub fn image_strategy(min: usize, max: usize) -> impl Strategy<Value = ImageBuffer> {
    (min..=max, min..=max).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..1.0, w * h)
            .prop_map(move |v| ImageBuffer::new(w, h, v).unwrap())
    })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
