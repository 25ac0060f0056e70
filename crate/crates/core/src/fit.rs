//! Small least-squares helpers shared by the diagnostics and analysis code.

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a line fit");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Linear coefficient of the least-squares quadratic `c₀ + c₁ t + c₂ t²`.
///
/// Used to read an instantaneous growth rate at the start of a window while
/// absorbing a slow drift of the rate into the quadratic term.
pub fn quadratic_fit_linear_coef(ts: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(ts.len(), ys.len());
    assert!(ts.len() >= 3, "need at least three points for a quadratic fit");
    // Normal equations for the Vandermonde system, solved by Gaussian
    // elimination on the 3x3 moment matrix.
    let mut m = [[0.0f64; 4]; 3];
    for (&t, &y) in ts.iter().zip(ys) {
        let p = [1.0, t, t * t];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += p[i] * p[j];
            }
            m[i][3] += p[i] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            for j in col..4 {
                m[row][j] -= f * m[col][j];
            }
        }
    }
    m[1][3] / m[1][1]
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (m, b) = linear_fit(&xs, &ys);
        assert_relative_eq!(m, 2.0, epsilon = 1e-12);
        assert_relative_eq!(b, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quadratic_fit_reads_linear_term() {
        let ts: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 0.3 + 2.5 * t - 0.8 * t * t).collect();
        assert_relative_eq!(quadratic_fit_linear_coef(&ts, &ys), 2.5, epsilon = 1e-9);
    }

    #[test]
    fn log_log_slope_of_power_law() {
        let xs = [0.2f64, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|&x| 3.0 * x.powf(1.5)).collect();
        assert_relative_eq!(log_log_slope(&xs, &ys), 1.5, epsilon = 1e-12);
    }
}
