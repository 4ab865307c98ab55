//! Floating point comparison policy shared by every module.

/// Absolute floor plus a relative factor scaled by the magnitudes being compared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-12,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Slack allowed when comparing quantities of the given magnitude.
    #[inline]
    pub fn slack(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    /// `a == b` within tolerance. Infinite values compare exactly.
    #[inline]
    pub fn eq(&self, a: f64, b: f64) -> bool {
        if a.is_infinite() || b.is_infinite() {
            return a == b;
        }
        (a - b).abs() <= self.slack(a.abs().max(b.abs()))
    }

    /// `a <= b` within tolerance.
    #[inline]
    pub fn le(&self, a: f64, b: f64) -> bool {
        if a <= b {
            return true;
        }
        if a.is_infinite() || b.is_infinite() {
            return false;
        }
        a - b <= self.slack(a.abs().max(b.abs()))
    }

    /// `a < b` by more than the tolerance.
    #[inline]
    pub fn lt(&self, a: f64, b: f64) -> bool {
        !self.le(b, a)
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`, with infinite values required to match exactly.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_compare_exactly() {
        let t = Tolerance::default();
        assert!(t.eq(f64::INFINITY, f64::INFINITY));
        assert!(!t.eq(f64::INFINITY, 1e300));
        assert!(t.le(f64::NEG_INFINITY, 0.0));
        assert!(!t.le(f64::INFINITY, 1e300));
    }

    #[test]
    fn relative_scaling() {
        let t = Tolerance::default();
        assert!(t.eq(1e6, 1e6 + 1e-4));
        assert!(!t.eq(1.0, 1.0 + 1e-6));
        assert!(t.le(1.0 + 1e-13, 1.0));
        assert!(t.lt(1.0, 1.0 + 1e-6));
        assert!(!t.lt(1.0, 1.0 + 1e-13));
    }

    #[test]
    fn rel_close_has_unit_floor() {
        assert!(rel_close(0.0, 5e-9, 1e-8));
        assert!(!rel_close(0.0, 5e-8, 1e-8));
        assert!(rel_close(1e4, 1e4 + 5e-5, 1e-8));
        assert!(!rel_close(f64::NEG_INFINITY, -1e300, 1e-8));
    }
}
