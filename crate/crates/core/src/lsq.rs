//! Damped least squares (Levenberg-Marquardt with Marquardt scaling).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub trait Problem {
    fn n_params(&self) -> usize;
    /// Residual vector, or `None` if `p` lies outside the model's domain.
    fn residuals(&self, p: &[f64]) -> Option<Vec<f64>>;
    /// Jacobian of the residuals, row per residual.
    fn jacobian(&self, p: &[f64]) -> Option<DMatrix<f64>>;
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { rel_tol: 1e-10, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub params: Vec<f64>,
    pub cost: f64,
    pub rms: f64,
    pub iterations: usize,
}

fn cost_of(r: &[f64]) -> f64 {
    0.5 * r.iter().map(|x| x * x).sum::<f64>()
}

pub fn minimize<P: Problem>(problem: &P, p0: &[f64], opts: Options) -> Result<Solution> {
    let n = problem.n_params();
    let mut p = p0.to_vec();
    let mut r = problem.residuals(&p).ok_or_else(|| Error::FitFailure {
        iterations: 0,
        cost: f64::NAN,
        reason: "initial guess outside model domain".into(),
    })?;
    let m = r.len();
    if m < n {
        return Err(Error::InsufficientData(format!("{m} residuals for {n} parameters")));
    }
    let mut cost = cost_of(&r);
    let floor = cost * f64::EPSILON * f64::EPSILON;
    let mut lambda = 1e-3;
    let fail = |it: usize, cost: f64, reason: &str| Error::FitFailure { iterations: it, cost, reason: reason.to_string() };

    for it in 1..=opts.max_iter {
        if cost <= floor || cost == 0.0 {
            return Ok(finish(p, cost, m, it - 1));
        }
        let jac = problem.jacobian(&p).ok_or_else(|| fail(it, cost, "jacobian undefined"))?;
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * rv;
        let diag: Vec<f64> = (0..n).map(|k| jtj[(k, k)].max(1e-300)).collect();

        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * diag[k];
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if let Some(rt) = problem.residuals(&trial) {
                let ct = cost_of(&rt);
                if ct.is_finite() && ct <= cost {
                    let step_norm = step.norm();
                    let p_norm = DVector::from_column_slice(&p).norm();
                    let rel_drop = (cost - ct) / cost.max(1e-300);
                    p = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    if step_norm <= opts.rel_tol * (p_norm + opts.rel_tol) || rel_drop <= opts.rel_tol * 1e-2 {
                        return Ok(finish(p, cost, m, it));
                    }
                    break;
                }
            }
            lambda *= 4.0;
        }
        if !accepted {
            // No downhill step at any damping: at a minimum to working precision.
            let gnorm = g.norm();
            if gnorm <= 1e-8 * (1.0 + cost.sqrt()) || lambda > 1e20 {
                return Ok(finish(p, cost, m, it));
            }
            return Err(fail(it, cost, "no descent step found"));
        }
    }
    Err(fail(opts.max_iter, cost, "iteration cap reached"))
}

fn finish(params: Vec<f64>, cost: f64, m: usize, iterations: usize) -> Solution {
    Solution { params, cost, rms: (2.0 * cost / m as f64).sqrt(), iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Exp {
        t: Vec<f64>,
        y: Vec<f64>,
    }

    impl Problem for Exp {
        fn n_params(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64]) -> Option<Vec<f64>> {
            Some(self.t.iter().zip(&self.y).map(|(t, y)| p[0] * (-p[1] * t).exp() - y).collect())
        }
        fn jacobian(&self, p: &[f64]) -> Option<DMatrix<f64>> {
            let mut j = DMatrix::zeros(self.t.len(), 2);
            for (k, t) in self.t.iter().enumerate() {
                let e = (-p[1] * t).exp();
                j[(k, 0)] = e;
                j[(k, 1)] = -p[0] * t * e;
            }
            Some(j)
        }
    }

    #[test]
    fn recovers_exponential() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.2).collect();
        let y = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let sol = minimize(&Exp { t, y }, &[1.0, 0.1], Options::default()).unwrap();
        assert!((sol.params[0] - 3.0).abs() < 1e-8);
        assert!((sol.params[1] - 0.7).abs() < 1e-8);
        assert!(sol.rms < 1e-8);
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.2).collect();
        let y = t.iter().map(|t| 3.0 * (-0.7 * t).exp()).collect();
        let err = minimize(&Exp { t, y }, &[1.0, 0.1], Options { rel_tol: 1e-10, max_iter: 1 }).unwrap_err();
        assert!(matches!(err, Error::FitFailure { iterations: 1, .. }));
    }

    #[test]
    fn too_few_residuals() {
        let p = Exp { t: vec![1.0], y: vec![1.0] };
        assert!(matches!(minimize(&p, &[1.0, 1.0], Options::default()), Err(Error::InsufficientData(_))));
    }
}
