use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Sinusoidal time features `[t, sin(2^0 π t), cos(2^0 π t), …]`, length `2·n_freq + 1`.
pub fn time_embed(t: f64, n_freq: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("time {t} outside [0, 1]")));
    }
    if n_freq == 0 {
        return Err(Error::invalid("n_freq must be positive"));
    }
    let mut out = Vec::with_capacity(2 * n_freq + 1);
    out.push(t);
    for k in 0..n_freq {
        let arg = f64::from(1u32 << k) * PI * t;
        out.push(arg.sin());
        out.push(arg.cos());
    }
    Ok(out)
}

pub fn embed_dim(n_freq: usize) -> usize {
    2 * n_freq + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-15, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn known_values() {
        close(&time_embed(0.0, 1).unwrap(), &[0.0, 0.0, 1.0]);
        close(&time_embed(1.0, 1).unwrap(), &[1.0, 0.0, -1.0]);
        close(&time_embed(0.5, 2).unwrap(), &[0.5, 1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(time_embed(-0.1, 2).is_err());
        assert!(time_embed(1.5, 2).is_err());
        assert!(time_embed(0.5, 0).is_err());
    }
}
