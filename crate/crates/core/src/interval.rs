use serde::Serialize;

/// A real interval with independently open or closed ends.
/// A single point is `lo == hi` with both ends closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    pub fn with_ends(mut self, lo_closed: bool, hi_closed: bool) -> Self {
        self.lo_closed = lo_closed;
        self.hi_closed = hi_closed;
        self
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Strict membership, honouring open ends.
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Membership in the closure inflated by `tol`.
    pub fn contains_approx(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

/// A finite union of intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    pub pieces: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(pieces: Vec<Interval>) -> Self {
        Self { pieces }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn contains_approx(&self, x: f64, tol: f64) -> bool {
        self.pieces.iter().any(|p| p.contains_approx(x, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_ends() {
        let i = Interval::open(0.2, 0.8);
        assert!(!i.contains(0.2));
        assert!(i.contains(0.5));
        assert!(i.contains_approx(0.2, 0.0));
        assert!(Interval::point(0.3).contains(0.3));
        assert!(Interval::closed(0.0, 0.5).with_ends(true, false).contains(0.0));
    }
}
