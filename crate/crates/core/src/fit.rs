//! Interpolation of the flow across replica number and the von Neumann
//! extrapolation `M → 1`.
//!
//! The model `f(M) = a (M − 1 + b/(M+c) − b/(1+c))` is linear in `a`, so a
//! coarse `(b, c)` grid with `a` eliminated in closed form seeds a handful of
//! Levenberg–Marquardt refinements over all three parameters.

use alloc::vec::Vec;

use faer::{linalg::solvers::Solve, Mat};

use crate::error::{Error, Result};

pub const B_RANGE: (f64, f64) = (-10.0, 10.0);
pub const C_RANGE: (f64, f64) = (-0.9, 10.0);
pub const GRID: usize = 40;
const SEEDS: usize = 10;
const POLE_MARGIN: f64 = 1e-6;
const MAX_ITER: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms_residual: f64,
    /// Extrapolated von Neumann flow `a (1 − b/(1+c)²)`.
    pub s_vn: f64,
    pub points: Vec<(usize, f64)>,
    /// All flows were equal; `a = b = c = 0` was returned without fitting.
    pub degenerate: bool,
}

/// The interpolating model; `model(1, ..) == 0` identically.
pub fn model(m: f64, a: f64, b: f64, c: f64) -> f64 {
    a * shape(m, b, c)
}

fn shape(m: f64, b: f64, c: f64) -> f64 {
    (m - 1.0) + b / (m + c) - b / (1.0 + c)
}

/// `−∂_M` at `M = 1` of the negated model, i.e. `a (1 − b/(1+c)²)`.
pub fn extrapolate_vn(a: f64, b: f64, c: f64) -> Result<f64> {
    let pole = 1.0 + c;
    if pole.is_nan() || pole.abs() <= POLE_MARGIN {
        return Err(Error::PoleGuard(c));
    }
    Ok(a * (1.0 - b / (pole * pole)))
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    p: [f64; 3],
    cost: f64,
}

struct Data<'a> {
    m: &'a [f64],
    f: &'a [f64],
}

impl Data<'_> {
    fn cost(&self, p: &[f64; 3]) -> f64 {
        self.m
            .iter()
            .zip(self.f)
            .map(|(&m, &f)| {
                let r = model(m, p[0], p[1], p[2]) - f;
                r * r
            })
            .sum()
    }

    /// Best `a` for fixed `(b, c)` and the resulting cost.
    fn profile(&self, b: f64, c: f64) -> Option<Candidate> {
        let (mut num, mut den) = (0.0, 0.0);
        for (&m, &f) in self.m.iter().zip(self.f) {
            let phi = shape(m, b, c);
            num += phi * f;
            den += phi * phi;
        }
        if den.is_nan() || den <= 0.0 {
            return None;
        }
        let p = [num / den, b, c];
        Some(Candidate { p, cost: self.cost(&p) })
    }

    fn normal_equations(&self, p: &[f64; 3]) -> (Mat<f64>, [f64; 3]) {
        let [a, b, c] = *p;
        let mut jtj = Mat::<f64>::zeros(3, 3);
        let mut jtr = [0.0; 3];
        let inv1 = 1.0 / (1.0 + c);
        for (&m, &f) in self.m.iter().zip(self.f) {
            let invm = 1.0 / (m + c);
            let row = [shape(m, b, c), a * (invm - inv1), a * b * (inv1 * inv1 - invm * invm)];
            let r = model(m, a, b, c) - f;
            for i in 0..3 {
                jtr[i] += row[i] * r;
                for j in 0..3 {
                    jtj[(i, j)] += row[i] * row[j];
                }
            }
        }
        (jtj, jtr)
    }

    fn refine(&self, start: Candidate) -> Candidate {
        let mut best = start;
        let mut lambda = 1e-3;
        for _ in 0..MAX_ITER {
            let (jtj, jtr) = self.normal_equations(&best.p);
            let mut accepted = false;
            while lambda < 1e16 {
                let mut lhs = jtj.clone();
                for i in 0..3 {
                    lhs[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
                }
                let mut rhs = Mat::<f64>::zeros(3, 1);
                for i in 0..3 {
                    rhs[(i, 0)] = -jtr[i];
                }
                let step = lhs.full_piv_lu().solve(&rhs);
                let p = [best.p[0] + step[(0, 0)], best.p[1] + step[(1, 0)], best.p[2] + step[(2, 0)]];
                let feasible = p.iter().all(|x| x.is_finite()) && p[2] >= C_RANGE.0;
                if feasible {
                    let cost = self.cost(&p);
                    if cost < best.cost {
                        let moved = (0..3).any(|i| (p[i] - best.p[i]).abs() > 1e-15 * (1.0 + best.p[i].abs()));
                        best = Candidate { p, cost };
                        lambda = (lambda / 10.0).max(1e-15);
                        accepted = moved;
                        break;
                    }
                }
                lambda *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        best
    }
}

fn better(x: &Candidate, y: &Candidate) -> core::cmp::Ordering {
    let tie = 1e-14 * x.cost.max(y.cost) + f64::MIN_POSITIVE;
    if (x.cost - y.cost).abs() > tie {
        return x.cost.total_cmp(&y.cost);
    }
    x.p[0]
        .total_cmp(&y.p[0])
        .then(x.p[1].total_cmp(&y.p[1]))
        .then(x.p[2].total_cmp(&y.p[2]))
}

/// Least-squares fit of the model to `(M, flow)` pairs with `M ≥ 2`.
pub fn fit_flow_vs_m(points: &[(usize, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::FitInput("at least 3 points are required"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|&(m, _)| m);
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::FitInput("replica counts must be distinct"));
    }
    if sorted[0].0 < 2 {
        return Err(Error::FitInput("replica counts must be at least 2"));
    }
    if sorted.iter().any(|&(_, f)| !f.is_finite()) {
        return Err(Error::FitInput("flows must be finite"));
    }

    let ms: Vec<f64> = sorted.iter().map(|&(m, _)| m as f64).collect();
    let fs: Vec<f64> = sorted.iter().map(|&(_, f)| f).collect();
    let n = fs.len() as f64;

    if fs.iter().all(|&f| f == fs[0]) {
        let rms = libm::sqrt(fs.iter().map(|f| f * f).sum::<f64>() / n);
        return Ok(FitResult { a: 0.0, b: 0.0, c: 0.0, rms_residual: rms, s_vn: 0.0, points: sorted, degenerate: true });
    }

    let data = Data { m: &ms, f: &fs };
    let step = |range: (f64, f64), k: usize| range.0 + (range.1 - range.0) * k as f64 / (GRID - 1) as f64;
    let mut seeds: Vec<Candidate> = (0..GRID)
        .flat_map(|i| (0..GRID).map(move |j| (i, j)))
        .filter_map(|(i, j)| data.profile(step(B_RANGE, i), step(C_RANGE, j)))
        .collect();
    seeds.sort_by(better);
    seeds.truncate(SEEDS);

    let best = seeds
        .into_iter()
        .map(|s| data.refine(s))
        .min_by(better)
        .ok_or(Error::FitInput("design matrix is singular"))?;

    let [a, b, c] = best.p;
    Ok(FitResult {
        a,
        b,
        c,
        rms_residual: libm::sqrt(best.cost / n),
        s_vn: extrapolate_vn(a, b, c)?,
        points: sorted,
        degenerate: false,
    })
}

/// Least-squares slope of `ln s` against `ln θ`.
pub fn powerlaw_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::FitInput("at least 3 points are required"));
    }
    for &(t, s) in points {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositive(t));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonPositive(s));
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, s)| (libm::log(t), libm::log(s))).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::FitInput("temperatures must not all coincide"));
    }
    Ok(sxy / sxx)
}
