use crate::error::{AlmError, Result};

pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Central-difference gradient of a scalar oracle.
pub fn fd_grad<F>(mut f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(AlmError::InvalidInput(format!("fd step must be positive, got {h}")));
    }
    let mut xp = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f(&xp)?;
        xp[i] = xi - h;
        let fm = f(&xp)?;
        xp[i] = xi;
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

/// Central-difference directional derivative of a vector map along `d`.
pub fn fd_directional<F>(mut f: F, x: &[f64], d: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let xp: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
    let xm: Vec<f64> = x.iter().zip(d).map(|(a, b)| a - h * b).collect();
    let fp = f(&xp)?;
    let fm = f(&xm)?;
    Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// `‖a − b‖ / max(‖b‖, floor)`, the relative error used by gradient checks.
pub fn rel_err(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let num = super::vecops::dist(a, b);
    num / super::vecops::norm(b).max(floor)
}
