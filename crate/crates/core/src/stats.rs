//! Step counting and delay statistics.
//!
//! Every enumerator charges elementary steps to its own [`StepCounter`]:
//! trie node visits, counter updates, register writes, Gray flips and
//! literal comparisons. Delays are measured in these steps; wall-clock time
//! is only reported alongside.

use std::time::Instant;

use serde::Serialize;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StepCounter(u64);

impl StepCounter {
    pub fn new() -> StepCounter {
        StepCounter(0)
    }

    #[inline]
    pub fn tick(&mut self) {
        self.0 += 1;
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.0 += n;
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}

/// A resumable model enumerator: each call to [`next_model`] performs the
/// work up to the next output and yields it.
///
/// Successive models are pairwise distinct. Once `None` is returned every
/// later call returns `None` as well.
///
/// [`next_model`]: ModelEnumerator::next_model
pub trait ModelEnumerator {
    /// Length of every yielded model.
    fn num_vars(&self) -> usize;

    fn next_model(&mut self) -> Option<&[bool]>;

    /// Steps charged so far, construction included.
    fn steps(&self) -> u64;

    /// Steps charged during construction, before the first resume.
    fn precompute_steps(&self) -> u64;

    /// Node count of auxiliary structures, where meaningful.
    fn aux_memory_estimate(&self) -> usize {
        0
    }
}

impl<E: ModelEnumerator + ?Sized> ModelEnumerator for Box<E> {
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }
    fn next_model(&mut self) -> Option<&[bool]> {
        (**self).next_model()
    }
    fn steps(&self) -> u64 {
        (**self).steps()
    }
    fn precompute_steps(&self) -> u64 {
        (**self).precompute_steps()
    }
    fn aux_memory_estimate(&self) -> usize {
        (**self).aux_memory_estimate()
    }
}

/// Per-run delay record. Field names are the keys of the `--stats` JSON.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DelayStats {
    pub total_steps: u64,
    pub n_models: u64,
    pub max_delay_steps: u64,
    /// Mean of the per-output delays (precomputation excluded).
    pub avg_delay_steps: f64,
    pub precompute_steps: u64,
    pub wall_ns: u64,
    pub peak_aux_memory_estimate: usize,
}

impl DelayStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize")
    }
}

/// Runs `e` to exhaustion (or `limit` models), passing each model to `sink`.
///
/// One delay is recorded per output, measured from the previous output (or
/// from the end of construction). When the run is not cut by `limit`, the
/// work spent detecting exhaustion is recorded as a final delay.
pub fn drive<E, F>(e: &mut E, limit: Option<u64>, mut sink: F) -> DelayStats
where
    E: ModelEnumerator + ?Sized,
    F: FnMut(&[bool]),
{
    let start = Instant::now();
    let pre = e.precompute_steps();
    let mut last = e.steps();
    let mut n_models = 0u64;
    let mut max_delay = 0u64;
    let mut peak_mem = e.aux_memory_estimate();
    loop {
        if limit.is_some_and(|l| n_models >= l) {
            break;
        }
        let got = e.next_model();
        let done = match got {
            Some(m) => {
                sink(m);
                false
            }
            None => true,
        };
        let now = e.steps();
        max_delay = max_delay.max(now - last);
        last = now;
        peak_mem = peak_mem.max(e.aux_memory_estimate());
        if done {
            break;
        }
        n_models += 1;
    }
    let total = e.steps();
    let avg = if n_models == 0 { 0.0 } else { (total - pre) as f64 / n_models as f64 };
    DelayStats {
        total_steps: total,
        n_models,
        max_delay_steps: max_delay,
        avg_delay_steps: avg,
        precompute_steps: pre,
        wall_ns: start.elapsed().as_nanos() as u64,
        peak_aux_memory_estimate: peak_mem,
    }
}

/// Collects every model of `e` (for tests and the oracle check).
pub fn collect_models<E: ModelEnumerator + ?Sized>(e: &mut E) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    while let Some(m) = e.next_model() {
        out.push(m.to_vec());
    }
    out
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope on a log-log scale.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    ls_slope(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Countdown {
        left: u32,
        steps: StepCounter,
        model: Vec<bool>,
    }

    impl ModelEnumerator for Countdown {
        fn num_vars(&self) -> usize {
            1
        }
        fn next_model(&mut self) -> Option<&[bool]> {
            self.steps.add(self.left as u64);
            if self.left == 0 {
                return None;
            }
            self.left -= 1;
            Some(&self.model)
        }
        fn steps(&self) -> u64 {
            self.steps.get()
        }
        fn precompute_steps(&self) -> u64 {
            5
        }
    }

    #[test]
    fn delays_exclude_precomputation() {
        let mut steps = StepCounter::new();
        steps.add(5);
        let mut e = Countdown { left: 3, steps, model: vec![true] };
        let s = drive(&mut e, None, |_| {});
        // Delays 3, 2, 1 and an exhaustion tail of 0.
        assert_eq!(s.n_models, 3);
        assert_eq!(s.total_steps, 11);
        assert_eq!(s.max_delay_steps, 3);
        assert_eq!(s.avg_delay_steps, 2.0);
        assert_eq!(s.total_steps, s.precompute_steps + 6);
        assert!(s.avg_delay_steps <= s.max_delay_steps as f64);
    }

    #[test]
    fn limit_stops_early() {
        let mut e = Countdown { left: 10, steps: StepCounter::new(), model: vec![false] };
        let s = drive(&mut e, Some(2), |_| {});
        assert_eq!(s.n_models, 2);
    }

    #[test]
    fn json_keys() {
        let json = DelayStats::default().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec![
            "total_steps",
            "n_models",
            "max_delay_steps",
            "avg_delay_steps",
            "precompute_steps",
            "wall_ns",
            "peak_aux_memory_estimate",
        ];
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
    }

    #[test]
    fn slopes() {
        assert!((ls_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-12);
        assert!((log_log_slope(&[1.0, 4.0, 16.0], &[1.0, 2.0, 4.0]) - 0.5).abs() < 1e-12);
    }
}
