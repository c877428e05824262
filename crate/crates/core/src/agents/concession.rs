use crate::error::OutcomeError;

/// Polynomial time-dependent aspiration: `u_min + (u_max - u_min)(1 - t^(1/e))`.
/// `e < 1` holds out near `u_max` until late (boulware), `e > 1` concedes early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcessionSchedule {
    u_min: f64,
    u_max: f64,
    exponent: f64,
}

impl Default for ConcessionSchedule {
    fn default() -> Self {
        Self {
            u_min: 0.3,
            u_max: 1.0,
            exponent: 0.2,
        }
    }
}

impl ConcessionSchedule {
    pub fn new(u_min: f64, u_max: f64, exponent: f64) -> Result<Self, OutcomeError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(u_min) || !unit(u_max) || u_min > u_max {
            return Err(OutcomeError::Contract(format!(
                "concession bounds [{u_min}, {u_max}] must satisfy 0 <= u_min <= u_max <= 1"
            )));
        }
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(OutcomeError::Contract(format!("exponent {exponent} must be positive")));
        }
        Ok(Self { u_min, u_max, exponent })
    }

    pub fn u_min(&self) -> f64 {
        self.u_min
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn target(&self, t: f64) -> f64 {
        concession_target(t, self)
    }
}

pub fn concession_target(t: f64, sched: &ConcessionSchedule) -> f64 {
    let t = t.clamp(0.0, 1.0);
    sched.u_min + (sched.u_max - sched.u_min) * (1.0 - t.powf(1.0 / sched.exponent))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundaries() {
        let s = ConcessionSchedule::default();
        assert_eq!(s.target(0.0), s.u_max());
        assert_eq!(s.target(1.0), s.u_min());
    }

    #[test]
    fn linear_midpoint() {
        let s = ConcessionSchedule::new(0.0, 1.0, 1.0).unwrap();
        assert!((s.target(0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ConcessionSchedule::new(0.8, 0.2, 1.0).is_err());
        assert!(ConcessionSchedule::new(0.0, 1.0, 0.0).is_err());
        assert!(ConcessionSchedule::new(-0.1, 1.0, 1.0).is_err());
    }
}
