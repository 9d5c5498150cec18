#![allow(dead_code)]

use chiquad::DegreesOfFreedom;

pub fn nu(n: u32) -> DegreesOfFreedom {
    DegreesOfFreedom::new(n).unwrap()
}

/// Composite Simpson's rule with `2 * half` panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, half: usize) -> f64 {
    let n = 2 * half;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}
