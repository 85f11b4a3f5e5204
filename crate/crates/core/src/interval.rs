//! Closed intervals with outward widening, used to bound polynomial images
//! of boxes (enumeration windows, translate overlap certificates).

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

const SLACK: f64 = 4.0 * f64::EPSILON;

fn widen(lo: f64, hi: f64) -> Interval {
    Interval {
        lo: lo - lo.abs() * SLACK - f64::MIN_POSITIVE,
        hi: hi + hi.abs() * SLACK + f64::MIN_POSITIVE,
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn add(&self, o: &Interval) -> Interval {
        widen(self.lo + o.lo, self.hi + o.hi)
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi)
    }

    pub fn powi(&self, k: u32) -> Interval {
        match k {
            0 => Interval::point(1.0),
            1 => *self,
            _ if k % 2 == 0 => {
                let a = self.lo.abs().powi(k as i32);
                let b = self.hi.abs().powi(k as i32);
                let lo = if self.lo <= 0.0 && self.hi >= 0.0 { 0.0 } else { a.min(b) };
                widen(lo, a.max(b))
            }
            _ => widen(self.lo.powi(k as i32), self.hi.powi(k as i32)),
        }
    }

    /// Splits at the midpoint.
    pub fn bisect(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_power_straddling_zero() {
        let i = Interval::new(-2.0, 1.0).powi(2);
        assert!(i.lo <= 0.0 && i.hi >= 4.0);
    }

    #[test]
    fn product_encloses_corners() {
        let i = Interval::new(-1.0, 3.0).mul(&Interval::new(2.0, 5.0));
        assert!(i.lo <= -5.0 && i.hi >= 15.0);
    }
}
