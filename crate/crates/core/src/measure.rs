//! Feature location and width measurement on sampled traces.

/// Index of the largest value.
pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i)
}

/// Full width of the peak at `argmax` where the profile falls to `fraction` of
/// its maximum. Profiles must be positive around the peak.
///
/// Crossings are refined by fitting a parabola to `ln y` through three samples,
/// which is exact for Gaussian peaks wherever the grid falls.
pub fn full_width(xs: &[f64], ys: &[f64], fraction: f64) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let p = argmax(ys);
    if !(ys[p] > 0.0) {
        return None;
    }
    let level = peak_height(ys, p) * fraction;
    let left = (0..p).rev().find(|&i| ys[i] < level)?;
    let right = (p + 1..ys.len()).find(|&i| ys[i] < level)?;
    // crossing between left and left+1, and between right-1 and right
    let xl = crossing(xs, ys, left, left + 1, level, [left, left + 1, left + 2])?;
    let xr = crossing(
        xs,
        ys,
        right - 1,
        right,
        level,
        [right - 2, right - 1, right],
    )?;
    Some(xr - xl)
}

/// Peak value refined by a parabola through `ln y` at the three samples around `p`.
pub fn peak_height(ys: &[f64], p: usize) -> f64 {
    if p == 0 || p + 1 >= ys.len() || ys[p - 1] <= 0.0 || ys[p + 1] <= 0.0 {
        return ys[p];
    }
    let (a, b, c) = (ys[p - 1].ln(), ys[p].ln(), ys[p + 1].ln());
    let curvature = a - 2.0 * b + c;
    if curvature >= 0.0 {
        return ys[p];
    }
    let shift = 0.5 * (a - c) / curvature;
    (b - 0.25 * (a - c) * shift).exp()
}

fn crossing(
    xs: &[f64],
    ys: &[f64],
    a: usize,
    b: usize,
    level: f64,
    fit: [usize; 3],
) -> Option<f64> {
    let fit_ok = fit.iter().all(|&i| i < ys.len() && ys[i] > 0.0);
    if fit_ok {
        let [i, j, k] = fit;
        let (x0, x1, x2) = (xs[i], xs[j], xs[k]);
        let (y0, y1, y2) = (ys[i].ln(), ys[j].ln(), ys[k].ln());
        let target = level.ln();
        let q = |x: f64| {
            y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
                + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
                + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))
                - target
        };
        bisect(q, xs[a], xs[b])
    } else {
        let (ya, yb) = (ys[a], ys[b]);
        Some(xs[a] + (level - ya) * (xs[b] - xs[a]) / (yb - ya))
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() <= f64::EPSILON * mid.abs() {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Local extrema of `values - baseline` whose magnitude is at least `min_size`.
/// Returns indices in ascending order.
pub fn features(values: &[f64], baseline: f64, min_size: f64) -> Vec<usize> {
    let dev: Vec<f64> = values.iter().map(|v| (v - baseline).abs()).collect();
    let n = dev.len();
    (0..n)
        .filter(|&i| {
            dev[i] >= min_size
                && (i == 0 || dev[i] >= dev[i - 1])
                && (i + 1 == n || dev[i] > dev[i + 1])
        })
        .collect()
}

/// Local minima at least `min_depth` below `baseline`.
pub fn dips(values: &[f64], baseline: f64, min_depth: f64) -> Vec<usize> {
    features(values, baseline, min_depth)
        .into_iter()
        .filter(|&i| values[i] < baseline)
        .collect()
}
