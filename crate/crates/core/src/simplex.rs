//! Nelder–Mead simplex minimisation with a best-so-far trace.

/// Stopping rules for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_evals: 2000, f_tol: 1e-12, x_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// Best value seen after each evaluation.
    pub trace: Vec<f64>,
}

struct Tracker<F> {
    f: F,
    best_x: Vec<f64>,
    best: f64,
    trace: Vec<f64>,
    max_evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < self.best {
            self.best = v;
            self.best_x = x.to_vec();
        }
        self.trace.push(self.best);
        v
    }

    fn exhausted(&self) -> bool {
        self.trace.len() >= self.max_evals
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimises `f` from `x0` with initial simplex edges `step`.
///
/// NaN values count as `+∞`. The result is the best point ever evaluated, so
/// raising `max_evals` never makes it worse.
pub fn minimize<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], step: &[f64], opts: SimplexOptions) -> SimplexResult {
    let n = x0.len();
    assert_eq!(step.len(), n, "step must match dimension");
    let mut t = Tracker { f, best_x: x0.to_vec(), best: f64::INFINITY, trace: Vec::new(), max_evals: opts.max_evals };
    if n == 0 {
        let v = t.eval(x0);
        return SimplexResult { x: Vec::new(), value: v, evals: 1, trace: t.trace };
    }
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    for p in &pts {
        if t.exhausted() {
            break;
        }
        vals.push(t.eval(p));
    }
    if vals.len() == n + 1 {
        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            pts = order.iter().map(|&i| pts[i].clone()).collect();
            vals = order.iter().map(|&i| vals[i]).collect();
            if t.exhausted() {
                break;
            }
            let spread = (vals[n] - vals[0]).abs();
            let diam = pts[1..]
                .iter()
                .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if (spread <= opts.f_tol && vals[0].is_finite()) || diam <= opts.x_tol {
                break;
            }
            let mut centroid = vec![0.0; n];
            for p in &pts[..n] {
                for (c, x) in centroid.iter_mut().zip(p) {
                    *c += x / n as f64;
                }
            }
            let worst = pts[n].clone();
            let reflected = lerp(&centroid, &worst, -1.0);
            let fr = t.eval(&reflected);
            if fr < vals[0] {
                if t.exhausted() {
                    pts[n] = reflected;
                    vals[n] = fr;
                    continue;
                }
                let expanded = lerp(&centroid, &worst, -2.0);
                let fe = t.eval(&expanded);
                if fe < fr {
                    pts[n] = expanded;
                    vals[n] = fe;
                } else {
                    pts[n] = reflected;
                    vals[n] = fr;
                }
            } else if fr < vals[n - 1] {
                pts[n] = reflected;
                vals[n] = fr;
            } else {
                if t.exhausted() {
                    continue;
                }
                let (contracted, fc) = if fr < vals[n] {
                    let c = lerp(&centroid, &worst, -0.5);
                    let v = t.eval(&c);
                    (c, v)
                } else {
                    let c = lerp(&centroid, &worst, 0.5);
                    let v = t.eval(&c);
                    (c, v)
                };
                if fc < vals[n].min(fr) {
                    pts[n] = contracted;
                    vals[n] = fc;
                } else {
                    for i in 1..=n {
                        if t.exhausted() {
                            break;
                        }
                        pts[i] = lerp(&pts[0], &pts[i], 0.5);
                        vals[i] = t.eval(&pts[i].clone());
                    }
                }
            }
        }
    }
    let evals = t.trace.len();
    SimplexResult { x: t.best_x, value: t.best, evals, trace: t.trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let opts = SimplexOptions { max_evals: 5000, f_tol: 1e-20, x_tol: 1e-12 };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &[0.5, 0.5], opts);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn trace_is_monotone_and_budget_extends_prefix() {
        let short = minimize(rosenbrock, &[0.0, 0.0], &[0.3, 0.3], SimplexOptions { max_evals: 60, ..Default::default() });
        let long = minimize(rosenbrock, &[0.0, 0.0], &[0.3, 0.3], SimplexOptions { max_evals: 400, ..Default::default() });
        assert!(long.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(&long.trace[..short.trace.len()], &short.trace[..]);
        assert!(long.value <= short.value);
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let r = minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) }, &[1.0], &[0.5], SimplexOptions::default());
        assert!((r.x[0] - 2.0).abs() < 1e-4);
    }
}
