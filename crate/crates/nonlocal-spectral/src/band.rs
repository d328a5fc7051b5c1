//! Retained-mass function b(x), the continuous spectrum band and the
//! large-domain scaling study.

use crate::domain::{AxisBox, Domain};
use crate::error::Result;
use crate::kernel::Kernel;
use crate::quadrature::{self, QuadratureRule};

/// Continuous spectrum interval [−max b, −min b] with the argmin of b.
#[derive(Debug, Clone)]
pub struct SpectralBand {
    pub sup_sigma_c: f64,
    pub inf_sigma_c: f64,
    pub argmin_b: Vec<f64>,
    /// samples (x, b(x)) on a boundary-inclusive grid
    pub b_samples: Vec<(Vec<f64>, f64)>,
}

/// Split every box of `domain` at the given coordinates per axis, so that
/// quadrature panels align with kinks of the integrand.
pub(crate) fn split_at(domain: &Domain, breaks: &[Vec<f64>]) -> Domain {
    let dim = domain.dim();
    let mut boxes = Vec::new();
    for b in domain.boxes() {
        // per-axis cut lists restricted to the box interior
        let cuts: Vec<Vec<f64>> = (0..dim)
            .map(|k| {
                let mut c: Vec<f64> = breaks[k]
                    .iter()
                    .copied()
                    .filter(|&t| t > b.lo[k] && t < b.hi[k])
                    .collect();
                c.push(b.lo[k]);
                c.push(b.hi[k]);
                c.sort_by(|p, q| p.partial_cmp(q).unwrap());
                c.dedup();
                c
            })
            .collect();
        let mut idx = vec![0usize; dim];
        loop {
            let lo: Vec<f64> = (0..dim).map(|k| cuts[k][idx[k]]).collect();
            let hi: Vec<f64> = (0..dim).map(|k| cuts[k][idx[k] + 1]).collect();
            boxes.push(AxisBox::new(lo, hi));
            let mut k = 0;
            loop {
                idx[k] += 1;
                if idx[k] + 1 < cuts[k].len() {
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
    Domain::new(boxes, dim).expect("split preserves validity")
}

/// Quadrature rule over Ω whose panels are aligned with the kinks of
/// y ↦ J(x−y) and sized to the kernel's length scale.
fn rule_for_point(kernel: &Kernel, domain: &Domain, x: &[f64], order: usize) -> QuadratureRule {
    let dim = domain.dim();
    let kinks = kernel.kink_radii();
    let breaks: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut c = Vec::new();
            for &r in &kinks {
                c.push(x[k] - r);
                c.push(x[k] + r);
            }
            c
        })
        .collect();
    QuadratureRule::on_domain(&split_at(domain, &breaks), order, Some(kernel.panel_hint()))
}

/// b(x) = ∫_Ω J(x−y) dy.
pub fn retained_mass(kernel: &Kernel, domain: &Domain, x: &[f64], order: usize) -> Result<f64> {
    rule_for_point(kernel, domain, x, order).integrate(|y| kernel.eval_diff(x, y))
}

/// Band of the multiplication part: σ_c = {−b(x) : x ∈ Ω̄}.
pub fn continuous_spectrum(
    kernel: &Kernel,
    domain: &Domain,
    order: usize,
    grid_density: usize,
    refinement_steps: usize,
) -> Result<SpectralBand> {
    let b = |x: &[f64]| retained_mass(kernel, domain, x, order).unwrap_or(f64::NAN);
    let (argmin, min_b) = quadrature::minimize_on_closure(domain, b, grid_density, refinement_steps);
    let (_, max_b) = quadrature::maximize_on_closure(domain, b, grid_density, refinement_steps);

    let mut samples = Vec::new();
    let n = grid_density.max(2);
    for bx in domain.boxes() {
        let dim = domain.dim();
        let mut idx = vec![0usize; dim];
        loop {
            let x: Vec<f64> = (0..dim)
                .map(|k| bx.lo[k] + (bx.hi[k] - bx.lo[k]) * idx[k] as f64 / n as f64)
                .collect();
            let v = b(&x);
            samples.push((x, v));
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

    Ok(SpectralBand {
        sup_sigma_c: -min_b,
        inf_sigma_c: -max_b,
        argmin_b: argmin,
        b_samples: samples,
    })
}

/// min_{x∈Ω̄_λ} b for each scale λ; the empirical content of the
/// retained-mass liminf ≥ 1/2.
pub fn retained_mass_scaling_study(
    kernel: &Kernel,
    reference_domain: &Domain,
    scales: &[f64],
    order: usize,
    grid_density: usize,
    refinement_steps: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut table = Vec::with_capacity(scales.len());
    for &lambda in scales {
        let scaled = reference_domain.scale(lambda);
        let b = |x: &[f64]| retained_mass(kernel, &scaled, x, order).unwrap_or(f64::NAN);
        let (_, min_b) =
            quadrature::minimize_on_closure(&scaled, b, grid_density, refinement_steps);
        table.push((lambda, min_b));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;

    #[test]
    fn tent_interior_full_mass() {
        // support of J(0−·) ⊂ Ω, so all mass is retained
        let k = Kernel::tent(1.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let b0 = retained_mass(&k, &d, &[0.0], 24).unwrap();
        assert!((b0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tent_boundary_half_mass() {
        let k = Kernel::tent(1.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let b1 = retained_mass(&k, &d, &[1.0], 24).unwrap();
        assert!((b1 - 0.5).abs() < 1e-12, "b(1) = {b1}");
    }

    #[test]
    fn wide_domain_interior_unity() {
        let k = Kernel::gaussian(4.0, 1).unwrap();
        let d = Domain::interval(-30.0, 30.0).unwrap();
        let b = retained_mass(&k, &d, &[0.0], 24).unwrap();
        assert!((b - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tent_band_endpoints() {
        let k = Kernel::tent(1.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let band = continuous_spectrum(&k, &d, 24, 32, 30).unwrap();
        assert!((band.sup_sigma_c + 0.5).abs() < 1e-10, "{}", band.sup_sigma_c);
        assert!((band.inf_sigma_c + 1.0).abs() < 1e-10);
        assert!((band.argmin_b[0].abs() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_band_boundary_half() {
        // b(5) = ∫_0^{10} π^{−1/2} e^{−z²} dz = erf(10)/2 ≈ 1/2
        let k = Kernel::gaussian(1.0, 1).unwrap();
        let d = Domain::interval(-5.0, 5.0).unwrap();
        let band = continuous_spectrum(&k, &d, 24, 32, 30).unwrap();
        assert!((band.sup_sigma_c + 0.5).abs() < 1e-8, "{}", band.sup_sigma_c);
    }

    #[test]
    fn narrow_kernel_inf_is_minus_one() {
        let k = Kernel::tent(0.25, 1).unwrap();
        let d = Domain::interval(-2.0, 2.0).unwrap();
        let band = continuous_spectrum(&k, &d, 24, 32, 30).unwrap();
        assert!((band.inf_sigma_c + 1.0).abs() < 1e-10);
    }

    #[test]
    fn band_values_in_unit_interval() {
        let k = Kernel::generalized_exponential(1.0, 2.0, 1).unwrap();
        let d = Domain::interval(-1.5, 1.5).unwrap();
        let band = continuous_spectrum(&k, &d, 24, 16, 20).unwrap();
        for (_, b) in &band.b_samples {
            assert!(*b > 0.0 && *b <= 1.0 + 1e-12);
        }
        assert!(band.inf_sigma_c <= band.sup_sigma_c && band.sup_sigma_c < 0.0);
    }

    #[test]
    fn monotone_under_domain_inclusion() {
        let k = Kernel::gaussian(2.0, 1).unwrap();
        let small = Domain::interval(-1.0, 1.0).unwrap();
        let big = Domain::interval(-2.0, 2.0).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let bs = retained_mass(&k, &small, &[x], 24).unwrap();
            let bb = retained_mass(&k, &big, &[x], 24).unwrap();
            assert!(bs <= bb + 1e-12);
        }
    }

    #[test]
    fn tent_scaling_reaches_half() {
        let k = Kernel::tent(1.0, 1).unwrap();
        let omega0 = Domain::interval(-0.5, 0.5).unwrap();
        let table =
            retained_mass_scaling_study(&k, &omega0, &[1.0, 2.0, 4.0, 8.0, 16.0], 24, 32, 30)
                .unwrap();
        for w in table.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        // once 2L ≥ a the boundary mass is exactly the half mass 1/2
        let last = table.last().unwrap().1;
        assert!((last - 0.5).abs() < 1e-10);
    }
}
