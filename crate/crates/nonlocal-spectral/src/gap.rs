//! Sufficient spectral-gap conditions: cross-mass, variance and Lipschitz
//! subspace checks, the linear test-function bound, and the generalized
//! exponential kernel analysis with its η-threshold search.

use crate::band;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelFamily};
use crate::quadrature::{integrate_1d_graded, QuadratureRule};

/// Which sufficient condition a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapCondition {
    CrossMass,
    Variance,
    LipschitzK(usize),
}

impl std::fmt::Display for GapCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GapCondition::CrossMass => write!(f, "cross_mass"),
            GapCondition::Variance => write!(f, "variance"),
            GapCondition::LipschitzK(k) => write!(f, "lipschitz_k{k}"),
        }
    }
}

/// Result of one sufficient-condition check: the condition holds when
/// `lhs < rhs` strictly, where rhs = min b over the closed domain.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub condition: GapCondition,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub witness: String,
    /// variational lower bound for β₁ (or β_k) supplied by the test
    /// construction: −lhs
    pub energy_lower_bound: f64,
}

fn min_b(kernel: &Kernel, domain: &Domain, order: usize) -> Result<f64> {
    let band = band::continuous_spectrum(kernel, domain, order, 32, 30)?;
    Ok(-band.sup_sigma_c)
}

/// ∬_{Ω₁×Ω₂} J(x−y) dx dy as an outer integral of the retained mass over
/// Ω₂. The inner rule is kink-aligned per outer node; the outer panels are
/// split where the inner integral loses smoothness (Ω₂ faces offset by the
/// kernel's kink radii).
fn cross_mass_integral(
    kernel: &Kernel,
    part1: &Domain,
    part2: &Domain,
    order: usize,
) -> Result<f64> {
    let dim = part1.dim();
    let kinks = kernel.kink_radii();
    let breaks: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut c = Vec::new();
            for b in part2.boxes() {
                for face in [b.lo[k], b.hi[k]] {
                    c.push(face);
                    for &r in &kinks {
                        c.push(face - r);
                        c.push(face + r);
                    }
                }
            }
            c
        })
        .collect();
    let outer = QuadratureRule::on_domain(
        &band::split_at(part1, &breaks),
        order,
        Some(kernel.panel_hint()),
    );
    let mut acc = crate::quadrature::KahanSum::default();
    for (x, &w) in outer.nodes.iter().zip(&outer.weights) {
        acc.add(w * band::retained_mass(kernel, part2, x, order)?);
    }
    Ok(acc.value())
}

/// Cross-mass condition: (4/|Ω|)·∬_{Ω₁×Ω₂} J(x−y) < min b, with Ω split
/// into equal halves along `axis` (default: the max-inertia axis).
pub fn check_cross_mass(
    kernel: &Kernel,
    domain: &Domain,
    axis: Option<usize>,
    order: usize,
) -> Result<GapReport> {
    let axis = axis.unwrap_or_else(|| domain.inertia_max().0);
    let partition = domain.equal_split(axis)?;
    let cross = cross_mass_integral(kernel, &partition.part1, &partition.part2, order)?;
    let lhs = 4.0 / domain.measure() * cross;
    let rhs = min_b(kernel, domain, order)?;
    Ok(GapReport {
        condition: GapCondition::CrossMass,
        lhs,
        rhs,
        holds: lhs < rhs,
        witness: format!("equal-measure split along axis {axis}"),
        energy_lower_bound: -lhs,
    })
}

/// Variance condition: m₂ / (2·I_max(Ω₀)·|Ω|^{2/n}) < min b, where Ω₀ is
/// the unit-measure rescaling of Ω and I_max its largest axis inertia.
pub fn check_variance(kernel: &Kernel, domain: &Domain, order: usize) -> Result<GapReport> {
    let (omega0, lambda) = domain.rescale_to_unit_measure();
    let (axis, i_max) = omega0.inertia_max();
    let lhs = kernel.moment2() / (2.0 * i_max * lambda * lambda);
    let rhs = min_b(kernel, domain, order)?;
    Ok(GapReport {
        condition: GapCondition::Variance,
        lhs,
        rhs,
        holds: lhs < rhs,
        witness: format!(
            "linear test function along max-inertia axis {axis} (I_max = {i_max:.6e})"
        ),
        energy_lower_bound: -lhs,
    })
}

/// Linear barycentric test function along the max-inertia axis: the
/// analytic energy lower bound −m₂/(2·I_k(Ω₀)·λ²) and the exact quadrature
/// energy of the normalized linear function.
#[derive(Debug, Clone)]
pub struct LinearBound {
    pub axis: usize,
    pub analytic_bound: f64,
    pub exact_energy: f64,
}

pub fn linear_testfunction_bound(
    kernel: &Kernel,
    domain: &Domain,
    order: usize,
) -> Result<LinearBound> {
    let (omega0, lambda) = domain.rescale_to_unit_measure();
    let (axis, i0) = omega0.inertia_max();
    if !(i0 > 0.0) {
        return Err(Error::InvalidDomain(
            "degenerate domain: zero inertia along every axis".into(),
        ));
    }
    let analytic_bound = -kernel.moment2() / (2.0 * i0 * lambda * lambda);

    let center = domain.barycenter()[axis];
    let i_full = domain.inertia(axis)?;
    let c = (1.0 / i_full).sqrt();
    let v = move |x: &[f64]| c * (x[axis] - center);
    let exact_energy = crate::galerkin::energy_symmetrized(kernel, domain, v, order)?;
    Ok(LinearBound {
        axis,
        analytic_bound,
        exact_energy,
    })
}

/// Monomial basis x^α on a reference domain, orthonormalized over the
/// domain by modified Gram–Schmidt with quadrature inner products. These
/// are globally smooth, unlike the per-box Galerkin basis.
struct SmoothSubspace {
    exponents: Vec<Vec<usize>>,
    coeffs: Vec<Vec<f64>>,
}

impl SmoothSubspace {
    fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        let raw: Vec<f64> = self
            .exponents
            .iter()
            .map(|alpha| {
                alpha
                    .iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product()
            })
            .collect();
        self.coeffs
            .iter()
            .map(|c| c.iter().zip(&raw).map(|(a, b)| a * b).sum())
            .collect()
    }
}

fn smooth_subspace(domain: &Domain, count: usize) -> Result<SmoothSubspace> {
    let dim = domain.dim();
    let mut exponents: Vec<Vec<usize>> = Vec::new();
    let mut degree = 0;
    'outer: loop {
        let mut alphas = vec![vec![0usize; 0]];
        // all multi-indices with total degree `degree`, lexicographic
        fn gen(dim: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if dim == 1 {
                prefix.push(total);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for d in (0..=total).rev() {
                prefix.push(d);
                gen(dim - 1, total - d, prefix, out);
                prefix.pop();
            }
        }
        alphas.clear();
        gen(dim, degree, &mut Vec::new(), &mut alphas);
        for a in alphas {
            exponents.push(a);
            if exponents.len() == count {
                break 'outer;
            }
        }
        degree += 1;
    }
    let max_degree: usize = exponents.iter().map(|a| a.iter().sum()).max().unwrap_or(0);

    let mut space = SmoothSubspace {
        exponents,
        coeffs: Vec::new(),
    };
    let rule = QuadratureRule::on_domain(domain, max_degree + 2, None);
    let nq = rule.nodes.len();
    let rawvals: Vec<Vec<f64>> = (0..space.exponents.len())
        .map(|i| {
            rule.nodes
                .iter()
                .map(|x| {
                    space.exponents[i]
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product()
                })
                .collect()
        })
        .collect();
    let dot = |u: &[f64], v: &[f64]| -> f64 {
        (0..nq).map(|q| rule.weights[q] * u[q] * v[q]).sum()
    };
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    for j in 0..count {
        let mut v = rawvals[j].clone();
        let mut c = vec![0.0; count];
        c[j] = 1.0;
        let norm0 = dot(&v, &v).sqrt();
        for _ in 0..2 {
            for (i, phi) in ortho.iter().enumerate() {
                let proj = dot(phi, &v);
                for q in 0..nq {
                    v[q] -= proj * phi[q];
                }
                for (ck, pk) in c.iter_mut().zip(&space.coeffs[i]) {
                    *ck -= proj * pk;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > 1e-8 * norm0.max(f64::MIN_POSITIVE)) {
            return Err(Error::IllConditionedBasis(format!(
                "monomial candidate {j} lost independence during orthogonalization"
            )));
        }
        for q in 0..nq {
            v[q] /= norm;
        }
        for ck in &mut c {
            *ck /= norm;
        }
        ortho.push(v);
        space.coeffs.push(c);
    }
    Ok(space)
}

/// Estimate of the subspace Lipschitz constant L_k: the supremum over the
/// unit sphere of the smooth (k+1)-dimensional subspace of
/// |u(x)−u(y)|²/|x−y|², maximized exactly over coefficients at each point
/// pair (it equals Σ_j (φ_j(x)−φ_j(y))²/|x−y|²) and over a deterministic
/// dense pair sample, inflated by 10%.
fn lipschitz_constant(space: &SmoothSubspace, domain: &Domain) -> f64 {
    let dim = domain.dim();
    // boundary-inclusive grid per box
    let n = match dim {
        1 => 64,
        2 => 16,
        _ => 8,
    };
    let mut points: Vec<Vec<f64>> = Vec::new();
    for b in domain.boxes() {
        let mut idx = vec![0usize; dim];
        loop {
            points.push(
                (0..dim)
                    .map(|k| b.lo[k] + (b.hi[k] - b.lo[k]) * idx[k] as f64 / n as f64)
                    .collect(),
            );
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
    let vals: Vec<Vec<f64>> = points.iter().map(|x| space.eval_all(x)).collect();
    let mut sup = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d2 < 1e-18 {
                continue;
            }
            let num: f64 = vals[i]
                .iter()
                .zip(&vals[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sup = sup.max(num / d2);
        }
    }
    1.10 * sup
}

/// Lipschitz-subspace condition for the k-th mode:
/// (L_k/2)·m₂/|Ω|^{2/n} < min b, with L_k estimated on the smooth
/// (k+1)-dimensional polynomial subspace of the unit-measure reference
/// domain.
pub fn check_lipschitz_k(
    kernel: &Kernel,
    domain: &Domain,
    k: usize,
    order: usize,
) -> Result<GapReport> {
    let (omega0, lambda) = domain.rescale_to_unit_measure();
    let rhs = min_b(kernel, domain, order)?;
    if k == 0 {
        return Ok(GapReport {
            condition: GapCondition::LipschitzK(0),
            lhs: 0.0,
            rhs,
            holds: 0.0 < rhs,
            witness: "constants-only subspace: zero energy".into(),
            energy_lower_bound: 0.0,
        });
    }
    let space = smooth_subspace(&omega0, k + 1)?;
    let l_k = lipschitz_constant(&space, &omega0);
    let c_geo = l_k / 2.0;
    let lhs = c_geo * kernel.moment2() / (lambda * lambda);
    Ok(GapReport {
        condition: GapCondition::LipschitzK(k),
        lhs,
        rhs,
        holds: lhs < rhs,
        witness: format!(
            "smooth polynomial subspace of dimension {} with Lipschitz estimate {:.6e}",
            k + 1,
            l_k
        ),
        energy_lower_bound: -lhs,
    })
}

/// Case label for the generalized exponential kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpCase {
    /// p ≤ 1: the condition holds for every L and λ
    UnconditionalPLe1,
    /// p > 1: the condition requires η = Lλ^{1/p} above a threshold
    ThresholdPGt1,
}

/// Analysis of the cross-mass condition margin Δ(L, λ) for the
/// generalized exponential kernel on (−L, L).
#[derive(Debug, Clone)]
pub struct ExampleExpReport {
    pub p: f64,
    pub lambda: f64,
    pub l: f64,
    /// Δ = min b − cross-mass term; the condition holds iff Δ > 0
    pub delta: f64,
    /// same quantity from the unreduced definition, for cross-validation
    pub delta_primitive: f64,
    pub eta: f64,
    pub case_label: ExpCase,
    pub eta_threshold: Option<f64>,
}

fn exp_delta_with(kernel: &Kernel, l: f64) -> (f64, f64) {
    let j = |z: f64| kernel.evaluate_radial(z);
    // reduced form: ∫₀^{L/2} (2t/L)[F(L/2−t) − F(L/2+t)] dt with
    // F(u) = J(u) + J(2L−u); the cusp of J at 0 sits at t = L/2
    let f_env = move |u: f64| j(u) + j(2.0 * l - u);
    let reduced = integrate_1d_graded(
        |t| 2.0 * t / l * (f_env(l / 2.0 - t) - f_env(l / 2.0 + t)),
        0.0,
        l / 2.0,
        32,
        false,
        true,
        40,
    );
    // primitive: ∫₀^{2L} J − (2/L)∫₀^L zJ − (2/L)∫_L^{2L}(2L−z)J
    let total = integrate_1d_graded(j, 0.0, 2.0 * l, 32, true, false, 40);
    let near = integrate_1d_graded(|z| z * j(z), 0.0, l, 32, true, false, 40);
    let far = integrate_1d_graded(|z| (2.0 * l - z) * j(z), l, 2.0 * l, 32, false, false, 4);
    let primitive = total - 2.0 / l * near - 2.0 / l * far;
    (reduced, primitive)
}

/// Δ(L, λ) for the generalized exponential kernel, via the reduced
/// envelope formula, cross-validated against the primitive definition.
pub fn example_exp_delta(p: f64, lambda: f64, l: f64) -> Result<ExampleExpReport> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidInput("domain half-length must be positive".into()));
    }
    let kernel = Kernel::generalized_exponential(p, lambda, 1)?;
    let (delta, delta_primitive) = exp_delta_with(&kernel, l);
    Ok(ExampleExpReport {
        p,
        lambda,
        l,
        delta,
        delta_primitive,
        eta: l * lambda.powf(1.0 / p),
        case_label: if p <= 1.0 {
            ExpCase::UnconditionalPLe1
        } else {
            ExpCase::ThresholdPGt1
        },
        eta_threshold: None,
    })
}

/// Threshold η₀ for p > 1: the sign change of Δ in η = Lλ^{1/p}, located
/// by bisection on [0.01, 100] to 1e−9, then verified positive at ten
/// sampled η above the threshold.
pub fn example_exp_threshold(p: f64, lambda: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidInput(
            "threshold search requires shape parameter p > 1".into(),
        ));
    }
    let kernel = Kernel::normalize(KernelFamily::GeneralizedExponential { p, lambda }, 1)?;
    let scale = lambda.powf(-1.0 / p);
    let delta_of_eta = |eta: f64| exp_delta_with(&kernel, eta * scale).0;
    let (mut lo, mut hi) = (0.01, 100.0);
    let f_lo = delta_of_eta(lo);
    let f_hi = delta_of_eta(hi);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::BracketError {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if delta_of_eta(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta0 = 0.5 * (lo + hi);
    for i in 1..=10 {
        let eta = (eta0 * (1.0 + 0.4 * i as f64)).min(99.0);
        let d = delta_of_eta(eta);
        if d <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "threshold verification failed: margin {d:.3e} at eta = {eta:.6}"
            )));
        }
    }
    Ok(eta0)
}
