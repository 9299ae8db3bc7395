//! Derivative-free minimisers shared by the initial-condition and λ searches
//! (golden section) and the p ∈ {1, ∞} structural fits (downhill simplex).

/// 1/φ, the golden-section shrink factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMin {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    /// Width of the final interval.
    pub width: f64,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops when the interval is narrower than `tol` or after `max_iter`
/// shrinks. The returned point is the best interior point evaluated, so the
/// reported value never increases from one iteration to the next.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> ScalarMin
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let (mut best_x, mut best_f) = if f2 < f1 { (x2, f2) } else { (x1, f1) };
    let mut iterations = 0;
    while hi - lo > tol && iterations < max_iter {
        iterations += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 < best_f {
                best_x = x1;
                best_f = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 < best_f {
                best_x = x2;
                best_f = f2;
            }
        }
    }
    ScalarMin {
        x: best_x,
        fx: best_f,
        iterations,
        width: hi - lo,
    }
}

/// Grow a symmetric interval `[center - Δ, center + Δ]` by doubling Δ until
/// `f` at both ends exceeds `f(center)`. Returns `None` if `f(center)` is not
/// finite or the interval stops growing within `max_doublings`.
pub fn bracket_symmetric<F>(
    mut f: F,
    center: f64,
    initial_half_width: f64,
    max_doublings: usize,
) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let fc = f(center);
    if !fc.is_finite() {
        return None;
    }
    let mut delta = initial_half_width;
    for _ in 0..=max_doublings {
        let (lo, hi) = (center - delta, center + delta);
        if f(lo) > fc && f(hi) > fc {
            return Some((lo, hi));
        }
        delta *= 2.0;
        if !delta.is_finite() {
            break;
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMin {
    pub x: [f64; 2],
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Stop when the simplex diameter drops below `rel_tol * (1 + |x_best|)`.
    pub rel_tol: f64,
    /// Initial axis step as a fraction of the start coordinate.
    pub step_fraction: f64,
    pub min_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 2000,
            rel_tol: 1e-10,
            step_fraction: 0.1,
            min_step: 1e-4,
        }
    }
}

/// Two-dimensional Nelder–Mead downhill simplex.
///
/// After each convergence the simplex is rebuilt around the best vertex and
/// the search restarts while the budget lasts and the restart still improves
/// the objective; this escapes the premature collapse the method is prone to
/// on piecewise-linear objectives.
pub fn nelder_mead<F>(mut f: F, start: [f64; 2], opts: SimplexOptions) -> SimplexMin
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut evaluations = 0usize;
    let mut eval = |x: [f64; 2], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut best_x = start;
    let mut best_f = eval(start, &mut evaluations);
    let converged = loop {
        let (x, fx, done) = simplex_run(&mut eval, best_x, best_f, &opts, &mut evaluations);
        let improved = fx < best_f;
        if fx <= best_f {
            best_x = x;
            best_f = fx;
        }
        if !done || !improved || evaluations >= opts.max_evaluations {
            break done;
        }
    };

    SimplexMin {
        x: best_x,
        fx: best_f,
        evaluations,
        converged,
    }
}

fn simplex_run<E>(
    eval: &mut E,
    start: [f64; 2],
    f_start: f64,
    opts: &SimplexOptions,
    evaluations: &mut usize,
) -> ([f64; 2], f64, bool)
where
    E: FnMut([f64; 2], &mut usize) -> f64,
{
    let mut pts = [start; 3];
    let mut vals = [f_start; 3];
    for axis in 0..2 {
        let step = (opts.step_fraction * start[axis].abs()).max(opts.min_step);
        pts[axis + 1][axis] += step;
        vals[axis + 1] = eval(pts[axis + 1], evaluations);
    }

    loop {
        // order: best, middle, worst; stable so ties keep insertion order
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);

        let scale = 1.0 + pts[0][0].abs().max(pts[0][1].abs());
        let diameter = pts[1..]
            .iter()
            .map(|p| (p[0] - pts[0][0]).abs().max((p[1] - pts[0][1]).abs()))
            .fold(0.0, f64::max);
        if diameter < opts.rel_tol * scale {
            return (pts[0], vals[0], true);
        }
        if *evaluations >= opts.max_evaluations {
            return (pts[0], vals[0], false);
        }

        let centroid = [0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1])];
        let along = |t: f64| {
            [
                centroid[0] + t * (pts[2][0] - centroid[0]),
                centroid[1] + t * (pts[2][1] - centroid[1]),
            ]
        };

        let xr = along(-1.0);
        let fr = eval(xr, evaluations);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(xe, evaluations);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
            continue;
        }
        if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[2] {
            let xc = along(-0.5);
            (xc, eval(xc, evaluations))
        } else {
            let xc = along(0.5);
            (xc, eval(xc, evaluations))
        };
        if fc < vals[2].min(fr) {
            pts[2] = xc;
            vals[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..3 {
            pts[i] = [
                pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
            ];
            vals[i] = eval(pts[i], evaluations);
        }
    }
}
