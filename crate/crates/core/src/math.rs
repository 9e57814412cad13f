//! Float helpers that work without `std`.

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `ceil(x)` as a usize, clamped at zero.
pub fn ceil_usize(x: f64) -> usize {
    let c = ceil(x);
    if c <= 0.0 {
        0
    } else {
        c as usize
    }
}

pub fn floor_usize(x: f64) -> usize {
    let f = floor(x);
    if f <= 0.0 {
        0
    } else {
        f as usize
    }
}
