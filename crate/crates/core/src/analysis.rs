//! Post-processing of magnetization series: extrema, fits, periods.

use serde::{Deserialize, Serialize};

/// Prominence (in units of `M/N`) below which an extremum is treated as a
/// transient wiggle rather than a feature of the signal.
pub const DEFAULT_PROMINENCE: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub time: f64,
    pub value: f64,
    /// Index of the discrete sample the refinement started from.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Min,
    Max,
}

/// Vertex of the parabola through samples `i-1, i, i+1`.
pub fn refine_extremum(times: &[f64], values: &[f64], i: usize) -> Extremum {
    if i == 0 || i + 1 >= values.len() {
        return Extremum { time: times[i], value: values[i], index: i };
    }
    let (x0, x1, x2) = (times[i - 1], times[i], times[i + 1]);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a == 0.0 {
        return Extremum { time: x1, value: y1, index: i };
    }
    let b = d01 - a * (x0 + x1);
    let t = -b / (2.0 * a);
    let t = t.clamp(x0, x2);
    let value = y1 + d01 * (t - x1) + a * (t - x0) * (t - x1);
    Extremum { time: t, value, index: i }
}

/// Topographic prominence of the interior extremum at `i`.
pub fn prominence(values: &[f64], i: usize, kind: ExtremumKind) -> f64 {
    // work on maxima; minima are maxima of the negated signal
    let s = match kind {
        ExtremumKind::Max => 1.0,
        ExtremumKind::Min => -1.0,
    };
    let v = |j: usize| s * values[j];
    let peak = v(i);
    let mut left_base = peak;
    for j in (0..i).rev() {
        if v(j) > peak {
            break;
        }
        left_base = left_base.min(v(j));
    }
    let mut right_base = peak;
    for j in i + 1..values.len() {
        if v(j) > peak {
            break;
        }
        right_base = right_base.min(v(j));
    }
    peak - left_base.max(right_base)
}

/// First interior local extremum of the given kind whose prominence is at
/// least `min_prominence`, refined to sub-sample resolution.
pub fn first_extremum(times: &[f64], values: &[f64], kind: ExtremumKind, min_prominence: f64) -> Option<Extremum> {
    assert_eq!(times.len(), values.len());
    (1..values.len().saturating_sub(1))
        .filter(|&i| match kind {
            ExtremumKind::Min => values[i] < values[i - 1] && values[i] <= values[i + 1],
            ExtremumKind::Max => values[i] > values[i - 1] && values[i] >= values[i + 1],
        })
        .find(|&i| prominence(values, i, kind) >= min_prominence)
        .map(|i| refine_extremum(times, values, i))
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    LinearFit { slope, intercept, r_squared }
}

/// `y = prefactor · e^{exponent·x}` fitted on `ln y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub prefactor: f64,
    pub exponent: f64,
}

pub fn exponential_fit(xs: &[f64], ys: &[f64]) -> Option<ExponentialFit> {
    if ys.iter().any(|&y| y <= 0.0) {
        return None;
    }
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let fit = linear_fit(xs, &logs);
    Some(ExponentialFit { prefactor: fit.intercept.exp(), exponent: fit.slope })
}

/// Period (in samples) of the strongest non-zero frequency of `signal`,
/// after removing its mean. The spectrum is scanned on a grid `oversample`
/// times finer than the DFT bins and the peak refined parabolically.
pub fn dominant_period(signal: &[f64], oversample: usize) -> Option<f64> {
    let n = signal.len();
    if n < 4 {
        return None;
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let power = |f: f64| -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, &x) in signal.iter().enumerate() {
            let ph = 2.0 * std::f64::consts::PI * f * j as f64;
            re += (x - mean) * ph.cos();
            im -= (x - mean) * ph.sin();
        }
        re * re + im * im
    };
    let steps = n * oversample.max(1);
    let freqs: Vec<f64> = (1..=steps / 2).map(|i| i as f64 / steps as f64).collect();
    // skip the leakage lobe of the removed mean
    let start = freqs.iter().position(|&f| f >= 1.0 / n as f64)?;
    let p: Vec<f64> = freqs.iter().map(|&f| power(f)).collect();
    let best = (start..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b]))?;
    let ext = refine_extremum(&freqs, &p, best);
    Some(1.0 / ext.time)
}

/// `(-1)^n x_n`: removes the period-two flipping of a kicked series.
pub fn demodulate_period_two(signal: &[f64], first_index: usize) -> Vec<f64> {
    signal.iter().enumerate().map(|(j, &x)| if (first_index + j) % 2 == 0 { x } else { -x }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex_is_exact() {
        let times: Vec<f64> = (0..20).map(|i| 0.1 * i as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 * (t - 1.234) * (t - 1.234) - 0.5).collect();
        let e = first_extremum(&times, &values, ExtremumKind::Min, 0.0).unwrap();
        assert!((e.time - 1.234).abs() < 1e-12);
        assert!((e.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn shallow_dips_are_skipped() {
        let times: Vec<f64> = (0..400).map(|i| 0.05 * i as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| (0.8 * t).cos() * 0.5 + 0.03 * (9.0 * t).sin()).collect();
        let e = first_extremum(&times, &values, ExtremumKind::Min, 0.1).unwrap();
        assert!((e.time - std::f64::consts::PI / 0.8).abs() < 0.3 && e.value < -0.5, "{e:?}");
        let all = first_extremum(&times, &values, ExtremumKind::Min, 0.0).unwrap();
        assert!(all.time < 1.0);
    }

    #[test]
    fn prominence_of_simple_peak() {
        let v = [0.0, 1.0, 3.0, 1.0, 2.0, 0.5];
        assert_eq!(prominence(&v, 2, ExtremumKind::Max), 2.5);
        assert_eq!(prominence(&v, 4, ExtremumKind::Max), 1.0);
        assert_eq!(prominence(&v, 3, ExtremumKind::Min), 1.0);
    }

    #[test]
    fn fits_recover_parameters() {
        let xs = [30.0, 40.0, 50.0, 60.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 0.9744 * (-0.0304 * x).exp()).collect();
        let f = exponential_fit(&xs, &ys).unwrap();
        assert!((f.prefactor - 0.9744).abs() < 1e-12 && (f.exponent + 0.0304).abs() < 1e-14);
        assert!(exponential_fit(&xs, &[1.0, -1.0, 1.0, 1.0]).is_none());
        let l = linear_fit(&xs, &[1.0, 2.0, 3.0, 4.0]);
        assert!((l.slope - 0.1).abs() < 1e-14 && (l.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn period_of_modulated_flip() {
        let x: Vec<f64> = (1..=400).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * (0.6 + 0.1 * (2.0 * std::f64::consts::PI * n as f64 / 37.0).cos())).collect();
        let y = demodulate_period_two(&x, 1);
        assert!(y.iter().all(|&v| v > 0.0));
        let p = dominant_period(&y, 16).unwrap();
        assert!((p - 37.0).abs() < 0.5, "{p}");
    }
}
