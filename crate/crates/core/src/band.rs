//! Measured bands: the spread `max/min` of a ratio between a measured quantity
//! and an asymptotic model over a range.

/// Extremes of a sampled or piecewise ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandReport {
    pub min: f64,
    pub max: f64,
    pub argmin: f64,
    pub argmax: f64,
}

impl BandReport {
    /// `max / min`.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }

    /// Band of `samples` given as `(location, value)` pairs; `None` when empty.
    pub fn from_samples(samples: impl IntoIterator<Item = (f64, f64)>) -> Option<Self> {
        let mut band: Option<Self> = None;
        for (at, value) in samples {
            band = Some(match band {
                None => Self {
                    min: value,
                    max: value,
                    argmin: at,
                    argmax: at,
                },
                Some(mut b) => {
                    if value < b.min {
                        b.min = value;
                        b.argmin = at;
                    }
                    if value > b.max {
                        b.max = value;
                        b.argmax = at;
                    }
                    b
                }
            });
        }
        band
    }
}

/// A right-continuous piecewise constant function on `[breaks[0], end)`:
/// `values[i]` holds on `[breaks[i], breaks[i + 1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseConstant {
    breaks: Vec<f64>,
    values: Vec<f64>,
    end: f64,
}

impl PiecewiseConstant {
    /// Pieces with equal break points are merged, keeping the last value.
    pub fn new(pieces: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut breaks: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (at, value) in pieces {
            match breaks.last() {
                Some(&last) if at == last => *values.last_mut().unwrap() = value,
                Some(&last) => {
                    assert!(at > last, "break points must increase");
                    breaks.push(at);
                    values.push(value);
                }
                None => {
                    breaks.push(at);
                    values.push(value);
                }
            }
        }
        Self {
            breaks,
            values,
            end: f64::INFINITY,
        }
    }

    /// Restricts the domain to `r < end`.
    pub fn with_end(mut self, end: f64) -> Self {
        self.end = end;
        self
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn piece(&self, r: f64) -> Option<usize> {
        if r >= self.end {
            return None;
        }
        self.breaks.partition_point(|&b| b <= r).checked_sub(1)
    }

    /// Value at `r`; `None` outside the domain.
    pub fn eval(&self, r: f64) -> Option<f64> {
        self.piece(r).map(|i| self.values[i])
    }

    /// Extremes over `r ∈ [r0, r1]` of `shape(value(r), r)`, where `shape` is
    /// monotone in `r` for a fixed value. The extremes are then attained at the
    /// ends of each piece; the right end of a piece is a left limit.
    pub fn band(&self, r0: f64, r1: f64, shape: impl Fn(f64, f64) -> f64) -> Option<BandReport> {
        let first = self.piece(r0)?;
        if r1 < r0 || r1 >= self.end {
            return None;
        }
        let mut samples = Vec::new();
        let mut i = first;
        loop {
            let start = if i == first { r0 } else { self.breaks[i] };
            let end = self
                .breaks
                .get(i + 1)
                .copied()
                .unwrap_or(f64::INFINITY)
                .min(r1);
            samples.push((start, shape(self.values[i], start)));
            samples.push((end, shape(self.values[i], end)));
            if i + 1 >= self.breaks.len() || self.breaks[i + 1] > r1 {
                break;
            }
            i += 1;
        }
        BandReport::from_samples(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_band() {
        let b = BandReport::from_samples([(1.0, 2.0), (2.0, 0.5), (3.0, 4.0)]).unwrap();
        assert_eq!((b.min, b.argmin, b.max, b.argmax), (0.5, 2.0, 4.0, 3.0));
        assert_eq!(b.spread(), 8.0);
        assert!(BandReport::from_samples([]).is_none());
    }

    #[test]
    fn step_ratio_band_matches_dense_scan() {
        // Cumulative mass jumping at 1, 2.5, 4 against the model r².
        let f = PiecewiseConstant::new([(0.0, 1.0), (1.0, 3.0), (2.5, 6.0), (4.0, 10.0)]);
        let band = f.band(0.5, 5.0, |v, r| v / (r * r)).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..=450_000 {
            let r = 0.5 + i as f64 * 1e-5;
            let v = f.eval(r).unwrap() / (r * r);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!((band.max - hi).abs() < 1e-12);
        assert!(band.min <= lo && lo - band.min < 1e-3);
        assert_eq!(band.max, 4.0);
        assert_eq!(band.argmax, 0.5);
    }

    #[test]
    fn eval_and_merge() {
        let f = PiecewiseConstant::new([(0.0, 1.0), (0.0, 2.0), (1.0, 5.0)]);
        assert_eq!(f.breaks(), &[0.0, 1.0]);
        assert_eq!(f.eval(-0.1), None);
        assert_eq!(f.eval(0.0), Some(2.0));
        assert_eq!(f.eval(1.0), Some(5.0));
        let g = f.with_end(2.0);
        assert_eq!(g.eval(2.0), None);
        assert!(g.band(0.0, 2.0, |v, _| v).is_none());
        assert_eq!(g.band(0.0, 1.5, |v, _| v).unwrap().max, 5.0);
    }
}
