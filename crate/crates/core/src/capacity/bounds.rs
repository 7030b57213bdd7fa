use crate::error::{Error, Result};

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Capacity of the erasure family `{E_{p_s}}` on `C^d`: zero when some
/// `p_s ≥ 1/2`, otherwise `min_s (1 − 2p_s) log d`.
pub fn erasure_capacity(ps: &[f64], d: usize) -> Result<f64> {
    if ps.is_empty() {
        return Err(Error::Domain("empty erasure family".into()));
    }
    if d < 2 {
        return Err(Error::Domain(format!("dimension {d} below 2")));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Domain(format!("erasure probability {p} outside [0, 1]")));
    }
    let pmax = ps.iter().copied().fold(0.0, f64::max);
    if pmax >= 0.5 {
        return Ok(0.0);
    }
    Ok((1.0 - 2.0 * pmax) * (d as f64).log2())
}

/// `ν(x) = x + 8x log(dim_out) + 4h(x)`, bounding the change of the maximin
/// coherent information between families at Hausdorff distance `x/2`.
pub fn continuity_bound(x: f64, dim_out: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("continuity argument {x} outside [0, 1]")));
    }
    if dim_out == 0 {
        return Err(Error::Domain("output dimension must be positive".into()));
    }
    Ok(x + 8.0 * x * (dim_out as f64).log2() + 4.0 * binary_entropy(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erasure_closed_forms() {
        assert!((erasure_capacity(&[0.1, 0.3], 2).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(erasure_capacity(&[0.5], 7).unwrap(), 0.0);
        assert_eq!(erasure_capacity(&[0.0], 4).unwrap(), 2.0);
        assert!(erasure_capacity(&[1.2], 2).is_err());
        assert!(erasure_capacity(&[0.1], 1).is_err());
    }

    #[test]
    fn continuity_values() {
        assert_eq!(continuity_bound(0.0, 2).unwrap(), 0.0);
        assert!((continuity_bound(0.5, 2).unwrap() - 8.5).abs() < 1e-12);
        let mut prev = -1.0;
        for k in 0..50 {
            let v = continuity_bound(0.5 * k as f64 / 49.0, 3).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(continuity_bound(1.5, 2).is_err());
    }
}
