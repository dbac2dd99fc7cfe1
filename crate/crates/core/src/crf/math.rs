//! Log-space helpers for the lattice recursions.

/// log(exp(a) + exp(b)) without overflow.
#[inline]
pub fn logsumexp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log sum of exponentials of a slice, max-shifted.
#[inline]
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_naive_in_safe_range() {
        let naive = (0.5f64.exp() + 2.0f64.exp()).ln();
        assert!((logsumexp2(0.5, 2.0) - naive).abs() < 1e-12);
        assert!((logsumexp(&[0.5, 2.0]) - naive).abs() < 1e-12);
    }

    #[test]
    fn stable_where_naive_overflows() {
        let naive = (1234f64.exp() + 1232f64.exp()).ln();
        assert!(naive.is_infinite());
        let expected = 1234.0 + (1.0 + (-2.0f64).exp()).ln();
        assert!((logsumexp2(1234.0, 1232.0) - expected).abs() < 1e-9);
        assert!((logsumexp(&[1234.0, 1232.0]) - expected).abs() < 1e-9);
    }

    #[test]
    fn neg_infinity_is_identity() {
        assert_eq!(logsumexp2(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((logsumexp2(f64::NEG_INFINITY, 2.0) - 2.0).abs() < 1e-15);
        assert_eq!(logsumexp(&[f64::NEG_INFINITY; 4]), f64::NEG_INFINITY);
    }
}
