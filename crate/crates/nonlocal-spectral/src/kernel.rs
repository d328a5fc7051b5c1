//! Dispersal kernels: radial families with numerically computed
//! normalization constants and moments, plus runtime validity checks.

use std::path::Path;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_1d_graded, KahanSum};

/// Kernel family. All families are radial; the tabulated profile is
/// symmetrized at load time.
#[derive(Debug, Clone)]
pub enum KernelFamily {
    /// C e^{−λ|z|^p}
    GeneralizedExponential { p: f64, lambda: f64 },
    /// C e^{−λ|z|²}
    Gaussian { lambda: f64 },
    /// C (1 − |z|/a) for |z| ≤ a
    Tent { a: f64 },
    /// Piecewise-linear radial profile, zero beyond the last sample.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

/// A validated dispersal kernel with cached normalization and moments.
#[derive(Debug, Clone)]
pub struct Kernel {
    family: KernelFamily,
    dim: usize,
    normalization_constant: f64,
    moment1: f64,
    moment2: f64,
    truncation_radius: f64,
}

/// Measured defects for the four kernel assumptions.
#[derive(Debug, Clone)]
pub struct ValidityReport {
    pub positivity: bool,
    pub symmetry: bool,
    pub normalization: bool,
    pub finite_second_moment: bool,
    pub most_negative_value: f64,
    pub max_asymmetry: f64,
    pub normalization_defect: f64,
    pub tail_mass: f64,
}

impl ValidityReport {
    pub fn all_hold(&self) -> bool {
        self.positivity && self.symmetry && self.normalization && self.finite_second_moment
    }
}

fn surface_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!("dimension capped at 3"),
    }
}

impl KernelFamily {
    /// Unnormalized radial profile φ(r).
    fn profile(&self, r: f64) -> f64 {
        match self {
            KernelFamily::GeneralizedExponential { p, lambda } => (-lambda * r.powf(*p)).exp(),
            KernelFamily::Gaussian { lambda } => (-lambda * r * r).exp(),
            KernelFamily::Tent { a } => {
                if r < *a {
                    1.0 - r / a
                } else {
                    0.0
                }
            }
            KernelFamily::Tabulated { radii, values } => {
                if radii.is_empty() || r > *radii.last().unwrap() {
                    return 0.0;
                }
                match radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
                    Ok(i) => values[i],
                    Err(0) => values[0],
                    Err(i) => {
                        let t = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
                        values[i - 1] * (1.0 - t) + values[i] * t
                    }
                }
            }
        }
    }

    /// Support radius for compactly supported profiles.
    fn support(&self) -> Option<f64> {
        match self {
            KernelFamily::Tent { a } => Some(*a),
            KernelFamily::Tabulated { radii, .. } => radii.last().copied(),
            _ => None,
        }
    }

    /// Characteristic length over which the profile varies.
    fn length_scale(&self) -> f64 {
        match self {
            KernelFamily::GeneralizedExponential { p, lambda } => lambda.powf(-1.0 / p),
            KernelFamily::Gaussian { lambda } => lambda.powf(-0.5),
            KernelFamily::Tent { a } => *a,
            KernelFamily::Tabulated { radii, .. } => radii.last().copied().unwrap_or(1.0),
        }
    }

    /// Radii where the profile is not smooth (cusp at 0, tent corner at a).
    fn kink_radii(&self) -> Vec<f64> {
        match self {
            KernelFamily::Tent { a } => vec![0.0, *a],
            KernelFamily::Tabulated { radii, .. } => {
                vec![0.0, radii.last().copied().unwrap_or(0.0)]
            }
            _ => vec![0.0],
        }
    }
}

/// Radial integrals ∫_0^R φ(r) r^{n−1+m} dr for m = 0, 1, 2, with R grown
/// until the truncated tail bound of the m = 2 integral is below 1e−12.
fn radial_integrals(family: &KernelFamily, dim: usize) -> Result<([f64; 3], f64)> {
    let order = 32;
    let cusp = true; // grading toward 0 is harmless for smooth profiles
    let integrate_panel = |a: f64, b: f64, m: usize| -> f64 {
        integrate_1d_graded(
            |r| family.profile(r) * r.powi((dim - 1 + m) as i32),
            a,
            b,
            order,
            cusp && a == 0.0,
            false,
            if a == 0.0 { 40 } else { 0 },
        )
    };

    if let Some(support) = family.support() {
        if support <= 0.0 {
            return Err(Error::InvalidInput("empty kernel support".into()));
        }
        let mut vals = [0.0; 3];
        // split panels at profile kinks inside the support
        let mut breaks: Vec<f64> = family
            .kink_radii()
            .into_iter()
            .filter(|&r| r > 0.0 && r < support)
            .collect();
        breaks.push(0.0);
        breaks.push(support);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        for m in 0..3 {
            let mut acc = KahanSum::default();
            for w in breaks.windows(2) {
                acc.add(integrate_panel(w[0], w[1], m));
            }
            vals[m] = acc.value();
        }
        return Ok((vals, support));
    }

    let scale = family.length_scale();
    let mut vals = [KahanSum::default(), KahanSum::default(), KahanSum::default()];
    let mut lo = 0.0;
    let mut hi = scale;
    let mut radius = scale;
    let mut converged = false;
    for _ in 0..200 {
        let contributions: Vec<f64> = (0..3).map(|m| integrate_panel(lo, hi, m)).collect();
        for (m, &c) in contributions.iter().enumerate() {
            vals[m].add(c);
        }
        radius = hi;
        let total2 = vals[2].value().abs();
        if contributions[2].abs() < 1e-16 * (total2 + f64::MIN_POSITIVE) && lo > scale {
            converged = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !converged {
        return Err(Error::MomentDivergence(format!(
            "second-moment integral not converged by radius {radius:e}"
        )));
    }
    Ok(([vals[0].value(), vals[1].value(), vals[2].value()], radius))
}

impl Kernel {
    /// Build a kernel from family parameters: computes the normalization
    /// constant and the first two moments by radial integration.
    pub fn normalize(family: KernelFamily, dim: usize) -> Result<Kernel> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidInput(format!(
                "kernel dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        match &family {
            KernelFamily::GeneralizedExponential { p, lambda } => {
                if *p <= 0.0 || *lambda <= 0.0 {
                    return Err(Error::InvalidInput(
                        "generalized exponential parameters must be positive".into(),
                    ));
                }
            }
            KernelFamily::Gaussian { lambda } => {
                if *lambda <= 0.0 {
                    return Err(Error::InvalidInput("lambda must be positive".into()));
                }
            }
            KernelFamily::Tent { a } => {
                if *a <= 0.0 {
                    return Err(Error::InvalidInput("tent width must be positive".into()));
                }
            }
            KernelFamily::Tabulated { radii, values } => {
                if radii.len() < 2 || radii.len() != values.len() {
                    return Err(Error::InvalidInput(
                        "tabulated kernel needs at least two samples".into(),
                    ));
                }
                if radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidInput(
                        "tabulated radii must be strictly increasing".into(),
                    ));
                }
            }
        }
        let (ints, radius) = radial_integrals(&family, dim)?;
        let sn = surface_area(dim);
        let total = sn * ints[0];
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidInput(format!(
                "kernel mass integral is {total}, cannot normalize"
            )));
        }
        let c = 1.0 / total;
        Ok(Kernel {
            family,
            dim,
            normalization_constant: c,
            moment1: c * sn * ints[1],
            moment2: c * sn * ints[2],
            truncation_radius: radius,
        })
    }

    pub fn generalized_exponential(p: f64, lambda: f64, dim: usize) -> Result<Kernel> {
        Kernel::normalize(KernelFamily::GeneralizedExponential { p, lambda }, dim)
    }

    pub fn gaussian(lambda: f64, dim: usize) -> Result<Kernel> {
        Kernel::normalize(KernelFamily::Gaussian { lambda }, dim)
    }

    pub fn tent(a: f64, dim: usize) -> Result<Kernel> {
        Kernel::normalize(KernelFamily::Tent { a }, dim)
    }

    /// Tabulated kernel from signed samples (z, J(z)). The profile is
    /// symmetrized by averaging J(z) and J(−z) where both are present.
    pub fn tabulated(samples: &[(f64, f64)], dim: usize) -> Result<Kernel> {
        let mut by_radius: Vec<(f64, f64, usize)> = Vec::new();
        for &(z, v) in samples {
            if !z.is_finite() || !v.is_finite() {
                return Err(Error::InvalidInput("non-finite table sample".into()));
            }
            let r = z.abs();
            match by_radius
                .iter_mut()
                .find(|(rr, _, _)| (rr - r).abs() <= 1e-12 * (1.0 + r))
            {
                Some(entry) => {
                    entry.1 += v;
                    entry.2 += 1;
                }
                None => by_radius.push((r, v, 1)),
            }
        }
        by_radius.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let radii: Vec<f64> = by_radius.iter().map(|e| e.0).collect();
        let values: Vec<f64> = by_radius.iter().map(|e| e.1 / e.2 as f64).collect();
        Kernel::normalize(KernelFamily::Tabulated { radii, values }, dim)
    }

    /// Load a tabulated kernel from a CSV of `z,J(z)` rows.
    pub fn tabulated_from_csv(path: &Path, dim: usize) -> Result<Kernel> {
        let text = std::fs::read_to_string(path)?;
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|t| t.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("bad table row {} in {path:?}", i + 1)))
            };
            // skip a header row
            if i == 0 && line.split(',').next().unwrap_or("").trim().parse::<f64>().is_err() {
                continue;
            }
            samples.push((parse(parts.next())?, parse(parts.next())?));
        }
        Kernel::tabulated(&samples, dim)
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization_constant(&self) -> f64 {
        self.normalization_constant
    }

    /// m₁ = ∫ J(z) |z| dz
    pub fn moment1(&self) -> f64 {
        self.moment1
    }

    /// m₂ = ∫ J(z) |z|² dz
    pub fn moment2(&self) -> f64 {
        self.moment2
    }

    /// Radius beyond which the truncated second-moment tail is below 1e−12.
    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// Suggested maximum quadrature panel size for integrands involving J.
    pub fn panel_hint(&self) -> f64 {
        (3.0 * self.family.length_scale()).min(self.truncation_radius)
    }

    /// Kink radii of J, used to align quadrature panels in 1D.
    pub fn kink_radii(&self) -> Vec<f64> {
        self.family.kink_radii()
    }

    pub fn evaluate_radial(&self, r: f64) -> f64 {
        self.normalization_constant * self.family.profile(r)
    }

    /// J(z) for z ∈ ℝⁿ.
    pub fn evaluate(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "point dimension {} does not match kernel dimension {}",
                z.len(),
                self.dim
            )));
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite evaluation point".into()));
        }
        let r = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        Ok(self.evaluate_radial(r))
    }

    /// J(x − y) without allocation; panics on dimension mismatch.
    pub fn eval_diff(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        self.evaluate_radial(r)
    }

    /// Check assumptions J1–J4 on `sample_count` radial samples per sign.
    pub fn check_assumptions(&self, sample_count: usize) -> ValidityReport {
        let n = sample_count.max(2);
        let r_max = self.truncation_radius;
        let mut most_negative = f64::INFINITY;
        let mut max_asym = 0.0f64;
        // sample along each coordinate axis plus the main diagonal
        let mut dirs: Vec<Vec<f64>> = (0..self.dim)
            .map(|k| {
                let mut d = vec![0.0; self.dim];
                d[k] = 1.0;
                d
            })
            .collect();
        dirs.push(vec![1.0 / (self.dim as f64).sqrt(); self.dim]);
        for dir in &dirs {
            for i in 0..=n {
                let r = r_max * i as f64 / n as f64;
                let zp: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let zm: Vec<f64> = dir.iter().map(|d| -d * r).collect();
                let vp = self.evaluate(&zp).unwrap_or(f64::NAN);
                let vm = self.evaluate(&zm).unwrap_or(f64::NAN);
                most_negative = most_negative.min(vp.min(vm));
                max_asym = max_asym.max((vp - vm).abs());
            }
        }
        let at_zero = self.evaluate_radial(0.0);
        let positivity = most_negative >= 0.0 && at_zero > 0.0;
        most_negative = most_negative.min(at_zero);

        // normalization defect from a fresh radial integral
        let (norm_defect, tail_mass, finite_m2) = match radial_integrals(&self.family, self.dim) {
            Ok((ints, radius)) => {
                let total = surface_area(self.dim) * ints[0] * self.normalization_constant;
                // mass in the outermost octave as a tail proxy
                let outer = integrate_1d_graded(
                    |r| self.family.profile(r) * r.powi(self.dim as i32 - 1),
                    radius * 0.5,
                    radius,
                    32,
                    false,
                    false,
                    0,
                ) * surface_area(self.dim)
                    * self.normalization_constant;
                ((total - 1.0).abs(), outer.abs(), true)
            }
            Err(_) => (f64::INFINITY, f64::INFINITY, false),
        };

        ValidityReport {
            positivity,
            symmetry: max_asym <= 1e-12 * (1.0 + at_zero.abs()),
            normalization: norm_defect <= 1e-8,
            finite_second_moment: finite_m2,
            most_negative_value: most_negative,
            max_asymmetry: max_asym,
            normalization_defect: norm_defect,
            tail_mass,
        }
    }
}
