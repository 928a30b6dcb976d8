//! Integer-order Bessel functions of the first kind.
//!
//! All orders `0..=n` for one argument come out of a single Miller backward
//! recurrence, normalised with `J_0(x) + 2 * sum_k J_2k(x) = 1`.

use crate::error::{Error, Result};

/// Largest supported `|order|`.
pub const MAX_ORDER: u32 = 64;

const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;

/// `J_order(x)` for `|order| <= MAX_ORDER`.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    let n = order.unsigned_abs();
    if n > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: order as i64,
            max: MAX_ORDER,
        });
    }
    if !x.is_finite() {
        return Err(Error::domain(format!("Bessel argument {x} is not finite")));
    }
    let mut values = [0.0; MAX_ORDER as usize + 1];
    let values = &mut values[..=n as usize];
    bessel_j_orders(x, values);
    let v = values[n as usize];
    Ok(if order < 0 && n % 2 == 1 { -v } else { v })
}

/// Fills `out[k] = J_k(x)` for `k = 0..out.len()`.
///
/// Callers that need many orders at the same argument (every radial Fresnel
/// kernel does) should use this instead of repeated [`bessel_j`] calls.
pub fn bessel_j_orders(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let n_max = out.len() - 1;
    out.fill(0.0);
    if x == 0.0 {
        out[0] = 1.0;
        return;
    }
    let ax = x.abs();
    let top = n_max.max(ax.ceil() as usize);
    let start = 2 * ((top + 20 + (40.0 * top as f64).sqrt() as usize) / 2);

    let mut sum = 0.0;
    let mut j_above = 0.0;
    let mut j_k = 1.0;
    let mut k = start;
    let record = |k: usize, v: f64, sum: &mut f64, out: &mut [f64]| {
        if k <= n_max {
            out[k] = v;
        }
        if k == 0 {
            *sum += v;
        } else if k.is_multiple_of(2) {
            *sum += 2.0 * v;
        }
    };
    record(k, j_k, &mut sum, out);
    while k > 0 {
        let j_below = (2.0 * k as f64 / ax) * j_k - j_above;
        j_above = j_k;
        j_k = j_below;
        k -= 1;
        if j_k.abs() > RESCALE_ABOVE {
            j_k *= RESCALE_BY;
            j_above *= RESCALE_BY;
            sum *= RESCALE_BY;
            out.iter_mut().for_each(|v| *v *= RESCALE_BY);
        }
        record(k, j_k, &mut sum, out);
    }

    let norm = 1.0 / sum;
    for (k, v) in out.iter_mut().enumerate() {
        *v *= norm;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
}

/// `J_order(x)` for a signed order, reading from a table filled by
/// [`bessel_j_orders`].
#[inline]
pub(crate) fn signed_from_table(table: &[f64], order: i32) -> f64 {
    let n = order.unsigned_abs() as usize;
    let v = table[n];
    if order < 0 && n % 2 == 1 {
        -v
    } else {
        v
    }
}
