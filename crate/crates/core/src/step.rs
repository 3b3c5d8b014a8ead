//! Right-continuous step functions.

use serde::{Deserialize, Serialize};

/// A right-continuous, piecewise-constant function of time.
///
/// The function equals `initial` before the first jump and `values[k]` on
/// `[jump_times[k], jump_times[k + 1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    initial: f64,
    jump_times: Vec<f64>,
    values: Vec<f64>,
}

impl StepCurve {
    /// Builds a curve from strictly increasing jump times and the values taken
    /// at (and after) each jump.
    ///
    /// Panics if the lengths differ or the times are not strictly increasing.
    pub fn new(initial: f64, jump_times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(jump_times.len(), values.len(), "jump/value length mismatch");
        assert!(
            jump_times.windows(2).all(|w| w[0] < w[1]),
            "jump times must be strictly increasing"
        );
        StepCurve {
            initial,
            jump_times,
            values,
        }
    }

    pub fn constant(value: f64) -> Self {
        StepCurve::new(value, Vec::new(), Vec::new())
    }

    /// Builds a curve from `(time, increment)` pairs sorted by time. Equal
    /// times are merged into one jump whose increment is the sum.
    pub fn from_increments<I>(initial: f64, increments: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut times: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut acc = initial;
        for (t, d) in increments {
            acc += d;
            match times.last() {
                Some(&last) if last == t => *values.last_mut().unwrap() = acc,
                Some(&last) => {
                    assert!(t > last, "increments must be sorted by time");
                    times.push(t);
                    values.push(acc);
                }
                None => {
                    times.push(t);
                    values.push(acc);
                }
            }
        }
        StepCurve::new(initial, times, values)
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.jump_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jump_times.is_empty()
    }

    /// Value at `t`: the value of the last jump `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&x| x <= t);
        if idx == 0 {
            self.initial
        } else {
            self.values[idx - 1]
        }
    }

    /// Left limit `f(t-)`: the value of the last jump strictly before `t`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&x| x < t);
        if idx == 0 {
            self.initial
        } else {
            self.values[idx - 1]
        }
    }

    /// Value after the last jump.
    pub fn final_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.initial)
    }

    /// `(time, value)` pairs for every jump.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.jump_times.iter().copied().zip(self.values.iter().copied())
    }

    /// Size of the jump at `t` (zero when `t` is not a jump time).
    pub fn jump_at(&self, t: f64) -> f64 {
        self.eval(t) - self.left_limit(t)
    }

    /// Applies `f` to every value, keeping the jump locations. Jumps whose
    /// value no longer changes are kept.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> StepCurve {
        StepCurve {
            initial: f(self.initial),
            jump_times: self.jump_times.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Drops jumps that do not change the value.
    pub fn compact(&self) -> StepCurve {
        let mut times = Vec::with_capacity(self.len());
        let mut values = Vec::with_capacity(self.len());
        let mut prev = self.initial;
        for (t, v) in self.points() {
            if v != prev {
                times.push(t);
                values.push(v);
                prev = v;
            }
        }
        StepCurve::new(self.initial, times, values)
    }

    /// Rescales the time axis: the returned curve `g` satisfies
    /// `g(c * t) = f(t)`.
    pub fn scale_time(&self, c: f64) -> StepCurve {
        assert!(c > 0.0, "time scale must be positive");
        StepCurve {
            initial: self.initial,
            jump_times: self.jump_times.iter().map(|&t| t * c).collect(),
            values: self.values.clone(),
        }
    }
}
