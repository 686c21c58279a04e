use serde::{Serialize, Serializer};

/// Critical benefit-to-cost ratio kept as an explicit fraction so that
/// sign changes of the denominator (phase transitions) stay visible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRatio {
    pub numerator: f64,
    pub denominator: f64,
    /// `|denominator|` fell below the route's tolerance.
    pub pole: bool,
}

impl CriticalRatio {
    /// Builds a ratio, flagging a pole when `|denominator| < pole_tolerance`.
    pub fn new(numerator: f64, denominator: f64, pole_tolerance: f64) -> Self {
        Self {
            numerator,
            denominator,
            pole: !(denominator.abs() >= pole_tolerance) || !denominator.is_finite(),
        }
    }

    /// `b*`, absent at a pole.
    pub fn value(&self) -> Option<f64> {
        if self.pole {
            None
        } else {
            Some(self.numerator / self.denominator)
        }
    }

    /// `1/b*`, which stays finite through the pole. Absent only when the
    /// numerator vanishes.
    pub fn inverse(&self) -> Option<f64> {
        if self.numerator == 0.0 {
            None
        } else {
            Some(self.denominator / self.numerator)
        }
    }

    /// Denominator positive and `b* > 1`: cooperation is favored once `b/c`
    /// exceeds a finite threshold above one.
    pub fn cooperation_threshold_exists(&self) -> bool {
        self.denominator > 0.0 && self.value().is_some_and(|v| v > 1.0)
    }

    /// Whether a donation game with benefit `b` and cost `c` favors
    /// cooperation: `b * denominator > c * numerator`.
    pub fn favors_cooperation(&self, b: f64, c: f64) -> bool {
        b * self.denominator > c * self.numerator
    }
}

impl Serialize for CriticalRatio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CriticalRatio", 5)?;
        st.serialize_field("numerator", &self.numerator)?;
        st.serialize_field("denominator", &self.denominator)?;
        st.serialize_field("pole", &self.pole)?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("inverse", &self.inverse())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_and_inverse() {
        let r = CriticalRatio::new(2.0, 0.0, 1e-9);
        assert!(r.pole);
        assert_eq!(r.value(), None);
        assert_eq!(r.inverse(), Some(0.0));
        let r = CriticalRatio::new(6.0, 2.0, 1e-9);
        assert_eq!(r.value(), Some(3.0));
        assert!(r.cooperation_threshold_exists());
        assert!(r.favors_cooperation(3.5, 1.0));
        assert!(!r.favors_cooperation(2.5, 1.0));
        let r = CriticalRatio::new(3.0, -1.0, 1e-9);
        assert!(!r.cooperation_threshold_exists());
        assert!(CriticalRatio::new(1.0, f64::NAN, 1e-9).pole);
    }
}
