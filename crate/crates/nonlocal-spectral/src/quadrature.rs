//! Deterministic tensor-product Gauss–Legendre quadrature over box unions,
//! plus minimization of continuous functions over the closure of a domain.

use crate::domain::Domain;
use crate::error::{Error, Result};

/// Kahan-compensated accumulator. Assembly sums accumulate ~10⁶ terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Tensor-product rule over a box union: nodes in ℝⁿ with positive weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Rule with `order` points per axis per panel. When `max_panel` is set,
    /// box sides longer than it are subdivided into equal panels, which keeps
    /// the rule accurate for integrands concentrated on a shorter scale.
    pub fn on_domain(domain: &Domain, order: usize, max_panel: Option<f64>) -> Self {
        let (gl_x, gl_w) = gauss_legendre(order);
        let dim = domain.dim();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for b in domain.boxes() {
            // per-axis node/weight lists over all panels of this box
            let mut axis_nodes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(dim);
            for k in 0..dim {
                let side = b.hi[k] - b.lo[k];
                let panels = match max_panel {
                    Some(h) if h > 0.0 && side > h => (side / h).ceil() as usize,
                    _ => 1,
                };
                let h = side / panels as f64;
                let mut list = Vec::with_capacity(panels * order);
                for p in 0..panels {
                    let a = b.lo[k] + p as f64 * h;
                    for (x, w) in gl_x.iter().zip(&gl_w) {
                        list.push((a + 0.5 * h * (x + 1.0), 0.5 * h * w));
                    }
                }
                axis_nodes.push(list);
            }
            // tensor product
            let mut idx = vec![0usize; dim];
            loop {
                let mut node = Vec::with_capacity(dim);
                let mut w = 1.0;
                for k in 0..dim {
                    let (x, wk) = axis_nodes[k][idx[k]];
                    node.push(x);
                    w *= wk;
                }
                nodes.push(node);
                weights.push(w);
                // advance multi-index
                let mut k = 0;
                loop {
                    idx[k] += 1;
                    if idx[k] < axis_nodes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                    if k == dim {
                        break;
                    }
                }
                if k == dim {
                    break;
                }
            }
        }
        QuadratureRule { nodes, weights }
    }

    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = KahanSum::default();
        for (x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: x.clone() });
            }
            acc.add(w * v);
        }
        Ok(acc.value())
    }
}

/// ∫_Ω f with `order` points per axis per box.
pub fn integrate<F: Fn(&[f64]) -> f64>(domain: &Domain, f: F, order: usize) -> Result<f64> {
    QuadratureRule::on_domain(domain, order, None).integrate(f)
}

/// ∫_Ω f with panel subdivision for short-scale integrands.
pub fn integrate_with<F: Fn(&[f64]) -> f64>(
    domain: &Domain,
    f: F,
    order: usize,
    max_panel: Option<f64>,
) -> Result<f64> {
    QuadratureRule::on_domain(domain, order, max_panel).integrate(f)
}

/// ∬_{Ω_A × Ω_B} g(x, y) on the product of the two tensor rules.
pub fn integrate_product<F: Fn(&[f64], &[f64]) -> f64>(
    domain_a: &Domain,
    domain_b: &Domain,
    g: F,
    order: usize,
    max_panel: Option<f64>,
) -> Result<f64> {
    let ra = QuadratureRule::on_domain(domain_a, order, max_panel);
    let rb = QuadratureRule::on_domain(domain_b, order, max_panel);
    let mut acc = KahanSum::default();
    for (x, &wx) in ra.nodes.iter().zip(&ra.weights) {
        for (y, &wy) in rb.nodes.iter().zip(&rb.weights) {
            let v = g(x, y);
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand { node: x.clone() });
            }
            acc.add(wx * wy * v);
        }
    }
    Ok(acc.value())
}

/// Composite Gauss–Legendre on [a, b] with geometric panel grading toward an
/// endpoint whose integrand has a derivative singularity (kernel cusp).
pub fn integrate_1d_graded<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    order: usize,
    grade_toward_a: bool,
    grade_toward_b: bool,
    levels: usize,
) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (gl_x, gl_w) = gauss_legendre(order);
    let mut breaks = vec![a, b];
    let len = b - a;
    if grade_toward_a && grade_toward_b {
        let mid = 0.5 * (a + b);
        for k in 1..=levels {
            let h = 0.5 * len * 0.5f64.powi(k as i32);
            breaks.push(a + h);
            breaks.push(b - h);
        }
        breaks.push(mid);
    } else if grade_toward_a {
        for k in 1..=levels {
            breaks.push(a + len * 0.5f64.powi(k as i32));
        }
    } else if grade_toward_b {
        for k in 1..=levels {
            breaks.push(b - len * 0.5f64.powi(k as i32));
        }
    }
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup();
    let mut acc = KahanSum::default();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (lo + hi);
        for (x, gw) in gl_x.iter().zip(&gl_w) {
            acc.add(h * gw * f(c + h * x));
        }
    }
    acc.value()
}

/// Minimize a continuous function over the closure of the domain.
///
/// A coarse per-box grid that always includes boundary faces and corners is
/// followed by coordinate-wise refinement around the best cell. The paper's
/// minima occur on ∂Ω, so the boundary must be sampled exactly.
pub fn minimize_on_closure<F: Fn(&[f64]) -> f64>(
    domain: &Domain,
    f: F,
    grid_density: usize,
    refinement_steps: usize,
) -> (Vec<f64>, f64) {
    let dim = domain.dim();
    let n = grid_density.max(2);
    let mut best_x = vec![0.0; dim];
    let mut best_v = f64::INFINITY;
    let mut best_box = 0;
    for (bi, b) in domain.boxes().iter().enumerate() {
        let mut idx = vec![0usize; dim];
        loop {
            let mut x = Vec::with_capacity(dim);
            for k in 0..dim {
                let t = idx[k] as f64 / n as f64;
                x.push(b.lo[k] + t * (b.hi[k] - b.lo[k]));
            }
            let v = f(&x);
            if v < best_v {
                best_v = v;
                best_x = x;
                best_box = bi;
            }
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] <= n {
                    break;
                }
                idx[k] = 0;
                k += 1;
                if k == dim {
                    break;
                }
            }
            if k == dim {
                break;
            }
        }
    }
    // coordinate-wise pattern refinement inside the containing box closure
    let b = &domain.boxes()[best_box];
    let mut steps: Vec<f64> = (0..dim).map(|k| (b.hi[k] - b.lo[k]) / n as f64).collect();
    for _ in 0..refinement_steps {
        for k in 0..dim {
            let mut improved = true;
            while improved {
                improved = false;
                for dir in [-1.0, 1.0] {
                    let mut x = best_x.clone();
                    x[k] = (x[k] + dir * steps[k]).clamp(b.lo[k], b.hi[k]);
                    let v = f(&x);
                    if v < best_v {
                        best_v = v;
                        best_x = x;
                        improved = true;
                    }
                }
            }
        }
        for s in &mut steps {
            *s *= 0.5;
        }
    }
    (best_x, best_v)
}

/// Maximize over the closure; thin wrapper over `minimize_on_closure`.
pub fn maximize_on_closure<F: Fn(&[f64]) -> f64>(
    domain: &Domain,
    f: F,
    grid_density: usize,
    refinement_steps: usize,
) -> (Vec<f64>, f64) {
    let (x, v) = minimize_on_closure(domain, |p| -f(p), grid_density, refinement_steps);
    (x, -v)
}

/// Default per-axis order by dimension, balancing accuracy and assembly cost.
pub fn default_order(dim: usize) -> usize {
    match dim {
        1 => 24,
        2 => 16,
        _ => 8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AxisBox, Domain};

    #[test]
    fn gl_weights_sum_to_two() {
        for order in [1, 2, 5, 24, 48] {
            let (_, w) = gauss_legendre(order);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {order}: sum {s}");
        }
    }

    #[test]
    fn gl_exact_on_polynomials() {
        // order n is exact up to degree 2n-1
        let (x, w) = gauss_legendre(6);
        let int_x10: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(10)).sum();
        assert!((int_x10 - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_x_squared() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let v = integrate(&d, |x| x[0] * x[0], 8).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_constant_gives_measure() {
        let d = Domain::new(
            vec![
                AxisBox::new(vec![0.0], vec![1.0]),
                AxisBox::new(vec![2.0], vec![3.5]),
            ],
            1,
        )
        .unwrap();
        let v = integrate(&d, |_| 1.0, 4).unwrap();
        assert!((v - d.measure()).abs() < 1e-13);
    }

    #[test]
    fn integrate_xy_on_unit_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        let v = integrate(&sq, |x| x[0] * x[1], 8).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rule_weights_sum_to_measure() {
        let d = Domain::new(
            vec![
                AxisBox::new(vec![0.0, 0.0], vec![1.0, 2.0]),
                AxisBox::new(vec![3.0, 0.0], vec![4.5, 1.0]),
            ],
            2,
        )
        .unwrap();
        let r = QuadratureRule::on_domain(&d, 6, Some(0.4));
        let s: f64 = r.weights.iter().sum();
        assert!((s - d.measure()).abs() < 1e-12 * d.measure());
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn product_constant() {
        let a = Domain::interval(-1.0, 0.0).unwrap();
        let b = Domain::interval(0.0, 1.0).unwrap();
        let v = integrate_product(&a, &b, |_, _| 1.0, 8, None).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn product_swap_symmetry() {
        let a = Domain::interval(-1.0, 0.0).unwrap();
        let b = Domain::interval(0.0, 1.0).unwrap();
        let g = |x: &[f64], y: &[f64]| (-(x[0] - y[0]).powi(2)).exp();
        let v1 = integrate_product(&a, &b, g, 16, None).unwrap();
        let v2 = integrate_product(&b, &a, g, 16, None).unwrap();
        assert!((v1 - v2).abs() < 1e-12 * (1.0 + v1.abs()));
    }

    #[test]
    fn doubling_order_plateaus() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let f = |x: &[f64]| (x[0] * 3.0).sin() + (-x[0] * x[0]).exp();
        let v1 = integrate(&d, f, 24).unwrap();
        let v2 = integrate(&d, f, 48).unwrap();
        assert!((v1 - v2).abs() < 1e-10 * (1.0 + v1.abs()));
    }

    #[test]
    fn minimize_parabola() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let (x, v) = minimize_on_closure(&d, |p| p[0] * p[0], 32, 30);
        assert!(x[0].abs() < 1e-8);
        assert!(v < 1e-14);
    }

    #[test]
    fn minimize_linear_hits_corner() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        let (x, v) = minimize_on_closure(&sq, |p| 2.0 * p[0] + p[1], 16, 20);
        assert!(x[0].abs() < 1e-10 && x[1].abs() < 1e-10);
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn minimum_never_exceeds_grid_values() {
        let d = Domain::interval(0.0, 3.0).unwrap();
        let f = |p: &[f64]| (5.0 * p[0]).sin() + 0.3 * p[0];
        let (_, v) = minimize_on_closure(&d, f, 16, 20);
        for i in 0..=16 {
            let x = 3.0 * i as f64 / 16.0;
            assert!(v <= f(&[x]) + 1e-15);
        }
    }

    #[test]
    fn graded_rule_handles_sqrt_cusp() {
        // ∫_0^1 e^{-√z} dz = 2 - 4/e  (by parts)
        let v = integrate_1d_graded(|z| (-z.sqrt()).exp(), 0.0, 1.0, 16, true, false, 40);
        let exact = 2.0 - 4.0 / std::f64::consts::E;
        assert!((v - exact).abs() < 1e-13, "got {v}, want {exact}");
    }
}
