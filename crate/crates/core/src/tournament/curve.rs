use serde::{Deserialize, Serialize};

use super::arena::mean_stderr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// 1-based index into the series.
    pub step: usize,
    pub mean: f64,
    /// Sample standard error (n - 1 denominator); 0 for a single series.
    pub stderr: f64,
}

/// Per-step mean and standard error across equal-length series, reported
/// every `window` steps and always at the last step.
pub fn learning_curve<S: AsRef<[f64]>>(series: &[S], window: usize) -> Result<Vec<CurvePoint>> {
    if window == 0 {
        return Err(Error::precondition("window must be >= 1"));
    }
    let len = series.first().map_or(0, |s| s.as_ref().len());
    if let Some(bad) = series.iter().find(|s| s.as_ref().len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: bad.as_ref().len(),
        });
    }
    let mut column = Vec::with_capacity(series.len());
    let mut out = Vec::new();
    for step in 1..=len {
        if step % window != 0 && step != len {
            continue;
        }
        column.clear();
        column.extend(series.iter().map(|s| s.as_ref()[step - 1]));
        let (mean, stderr) = mean_stderr(&column);
        out.push(CurvePoint { step, mean, stderr });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_series_has_zero_stderr() {
        let curve = learning_curve(&[vec![1.0, 2.0, 5.0]], 1).unwrap();
        assert_eq!(curve.len(), 3);
        assert!(curve.iter().all(|p| p.stderr == 0.0));
        assert_eq!(curve[2].mean, 5.0);
    }

    #[test]
    fn two_linear_series() {
        let a: Vec<f64> = (1..=20).map(f64::from).collect();
        let b: Vec<f64> = a.iter().map(|t| 3.0 * t).collect();
        for p in learning_curve(&[a, b], 1).unwrap() {
            let t = p.step as f64;
            assert!((p.mean - 2.0 * t).abs() < 1e-12);
            assert!((p.stderr - t).abs() < 1e-12);
        }
    }

    #[test]
    fn window_subsamples_and_keeps_last() {
        let s = vec![0.0; 10];
        let steps: Vec<usize> = learning_curve(&[s], 4).unwrap().iter().map(|p| p.step).collect();
        assert_eq!(steps, vec![4, 8, 10]);
    }

    #[test]
    fn ragged_input_rejected() {
        assert!(learning_curve(&[vec![1.0, 2.0], vec![1.0]], 1).is_err());
    }
}
