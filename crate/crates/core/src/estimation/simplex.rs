//! Derivative-free Nelder-Mead simplex minimizer.
//!
//! Constraints are expressed by the caller through the objective (large
//! finite penalties outside the feasible set), which suits likelihoods whose
//! optima sit on the boundary of their parameter region.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead<T> {
    pub max_iterations: usize,
    /// Stop once the spread of objective values over the simplex is below this.
    pub tol_objective: T,
    /// ...and every vertex is within this (max-norm) of the best one.
    pub tol_params: T,
    pub reflection: T,
    pub expansion: T,
    pub contraction: T,
    pub shrink: T,
}

impl<T: Real> Default for NelderMead<T> {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            tol_objective: T::lit(1e-10),
            tol_params: T::lit(1e-9),
            reflection: T::one(),
            expansion: T::lit(2.0),
            contraction: T::lit(0.5),
            shrink: T::lit(0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome<T> {
    pub point: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> NelderMead<T> {
    /// Minimizes `f` from `start`, building the initial simplex by offsetting
    /// each coordinate by the matching entry of `steps`.
    pub fn minimize<F>(&self, f: F, start: &[T], steps: &[T]) -> SimplexOutcome<T>
    where
        F: Fn(&[T]) -> T,
    {
        assert_eq!(start.len(), steps.len(), "one step per coordinate");
        let dim = start.len();
        let eval = |x: &[T]| {
            let v = f(x);
            if v.is_nan() {
                T::infinity()
            } else {
                v
            }
        };

        let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
        simplex.push((start.to_vec(), eval(start)));
        for i in 0..dim {
            let mut v = start.to_vec();
            v[i] = v[i] + steps[i];
            let fv = eval(&v);
            simplex.push((v, fv));
        }

        let mut iterations = 0;
        let mut converged = false;
        while iterations < self.max_iterations {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            if self.has_converged(&simplex) {
                converged = true;
                break;
            }
            iterations += 1;

            let worst = dim;
            let centroid = centroid(&simplex[..worst]);
            let toward = |coeff: T| -> Vec<T> {
                centroid
                    .iter()
                    .zip(&simplex[worst].0)
                    .map(|(&c, &w)| c + coeff * (c - w))
                    .collect()
            };

            let xr = toward(self.reflection);
            let fr = eval(&xr);
            if fr < simplex[0].1 {
                let xe = toward(self.reflection * self.expansion);
                let fe = eval(&xe);
                simplex[worst] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[worst - 1].1 {
                simplex[worst] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < simplex[worst].1 {
                let xc = toward(self.reflection * self.contraction);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = toward(-self.contraction);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[worst].1) {
                simplex[worst] = (xc, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                for (x, &b) in vertex.0.iter_mut().zip(&best) {
                    *x = b + self.shrink * (*x - b);
                }
                vertex.1 = eval(&vertex.0);
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (point, value) = simplex.swap_remove(0);
        SimplexOutcome {
            point,
            value,
            iterations,
            converged,
        }
    }

    fn has_converged(&self, sorted: &[(Vec<T>, T)]) -> bool {
        let best = &sorted[0];
        let spread = sorted[sorted.len() - 1].1 - best.1;
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(spread <= self.tol_objective) {
            return false;
        }
        sorted[1..]
            .iter()
            .all(|(v, _)| v.iter().zip(&best.0).all(|(&a, &b)| (a - b).abs() <= self.tol_params))
    }
}

fn centroid<T: Real>(vertices: &[(Vec<T>, T)]) -> Vec<T> {
    let n = T::lit(vertices.len() as f64);
    let dim = vertices[0].0.len();
    (0..dim)
        .map(|i| vertices.iter().map(|(v, _)| v[i]).sum::<T>() / n)
        .collect()
}
