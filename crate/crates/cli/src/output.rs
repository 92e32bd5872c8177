//! Numeric display helpers: full precision (17 significant digits) by
//! default, truncated only for display when --digits is given.

use num_complex::Complex64;

pub fn fmt_real(x: f64, digits: Option<usize>) -> String {
    match digits {
        Some(d) => format!("{:.*}", d, x),
        None => format!("{:.16e}", x),
    }
}

pub fn fmt_complex(z: Complex64, digits: Option<usize>) -> String {
    let re = fmt_real(z.re, digits);
    if z.im == 0.0 {
        return re;
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{re} {sign} {}i", fmt_real(z.im.abs(), digits))
}
