//! Orthonormal basis construction, kernel matrix assembly, the constrained
//! finite-dimensional eigenproblem and convergence sweeps.

use crate::band;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{self, SymMatrix};
use crate::quadrature::{KahanSum, QuadratureRule};

fn legendre(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Raw (pre-orthonormalization) basis candidate.
#[derive(Debug, Clone)]
enum RawFn {
    /// 1 on the whole union
    Constant,
    /// tensor Legendre polynomial supported on one box, zero elsewhere
    BoxPoly { box_idx: usize, degrees: Vec<usize> },
}

/// Orthonormal basis over the box union with φ₀ = |Ω|^{−1/2} constant.
#[derive(Debug, Clone)]
pub struct Basis {
    domain: Domain,
    raw: Vec<RawFn>,
    /// coeffs[j]: φ_j as a combination of the raw candidates
    coeffs: Vec<Vec<f64>>,
    gram_defect: f64,
    max_degree: usize,
}

fn multi_indices(dim: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for d in (0..=total).rev() {
            prefix.push(d);
            rec(dim - 1, total - d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, total, &mut Vec::new(), &mut out);
    out
}

impl Basis {
    /// Number of basis functions (N + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn gram_defect(&self) -> f64 {
        self.gram_defect
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn eval_raw(&self, i: usize, x: &[f64]) -> f64 {
        match &self.raw[i] {
            RawFn::Constant => 1.0,
            RawFn::BoxPoly { box_idx, degrees } => {
                let b = &self.domain.boxes()[*box_idx];
                if !b.contains(x) {
                    return 0.0;
                }
                let mut v = 1.0;
                for (k, &d) in degrees.iter().enumerate() {
                    let t = 2.0 * (x[k] - b.lo[k]) / (b.hi[k] - b.lo[k]) - 1.0;
                    v *= legendre(d, t);
                }
                v
            }
        }
    }

    /// Values of all φ_j at x.
    pub fn eval_all(&self, x: &[f64]) -> Vec<f64> {
        let rawvals: Vec<f64> = (0..self.raw.len()).map(|i| self.eval_raw(i, x)).collect();
        self.coeffs
            .iter()
            .map(|c| c.iter().zip(&rawvals).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn eval(&self, j: usize, x: &[f64]) -> f64 {
        let vals = self.eval_all(x);
        vals[j]
    }

    /// Σ_j coeffs[j] φ_j(x) for a coefficient vector of any prefix length.
    pub fn eval_combo(&self, combo: &[f64], x: &[f64]) -> f64 {
        let vals = self.eval_all(x);
        combo.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }
}

/// Build an orthonormal basis of N+1 functions: per-box tensor Legendre
/// polynomials in graded order, orthonormalized over the union by modified
/// Gram–Schmidt with domain quadrature. φ₀ is the constant mode.
pub fn build_basis(domain: &Domain, n_basis: usize) -> Result<Basis> {
    let dim = domain.dim();
    let n_boxes = domain.boxes().len();
    let want = n_basis + 1;

    let mut raw = vec![RawFn::Constant];
    // remaining degree-0 freedom of the union: per-box constants beyond φ₀
    for b in 1..n_boxes {
        if raw.len() >= want {
            break;
        }
        raw.push(RawFn::BoxPoly {
            box_idx: b,
            degrees: vec![0; dim],
        });
    }
    let mut degree = 1;
    while raw.len() < want {
        for b in 0..n_boxes {
            for alpha in multi_indices(dim, degree) {
                if raw.len() >= want {
                    break;
                }
                raw.push(RawFn::BoxPoly {
                    box_idx: b,
                    degrees: alpha,
                });
            }
        }
        degree += 1;
    }
    let max_degree = raw
        .iter()
        .map(|r| match r {
            RawFn::Constant => 0,
            RawFn::BoxPoly { degrees, .. } => degrees.iter().sum(),
        })
        .max()
        .unwrap_or(0);

    let mut basis = Basis {
        domain: domain.clone(),
        raw,
        coeffs: Vec::new(),
        gram_defect: 0.0,
        max_degree,
    };

    // Gram integrals are polynomial of degree ≤ 2·max_degree per box;
    // order max_degree + 2 integrates them exactly.
    let rule = QuadratureRule::on_domain(domain, max_degree + 2, None);
    let nq = rule.nodes.len();
    let rawvals: Vec<Vec<f64>> = (0..basis.raw.len())
        .map(|i| rule.nodes.iter().map(|x| basis.eval_raw(i, x)).collect())
        .collect();

    let dot = |u: &[f64], v: &[f64]| -> f64 {
        let mut s = KahanSum::default();
        for q in 0..nq {
            s.add(rule.weights[q] * u[q] * v[q]);
        }
        s.value()
    };

    let mut ortho_vals: Vec<Vec<f64>> = Vec::with_capacity(want);
    for j in 0..want {
        let mut v = rawvals[j].clone();
        let mut c = vec![0.0; basis.raw.len()];
        c[j] = 1.0;
        let norm0 = dot(&v, &v).sqrt();
        // two MGS passes for orthogonality to near machine precision
        for _ in 0..2 {
            for (i, phi) in ortho_vals.iter().enumerate() {
                let proj = dot(phi, &v);
                for q in 0..nq {
                    v[q] -= proj * phi[q];
                }
                for (ck, pk) in c.iter_mut().zip(&basis.coeffs[i]) {
                    *ck -= proj * pk;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm > 1e-8 * norm0.max(f64::MIN_POSITIVE)) {
            return Err(Error::IllConditionedBasis(format!(
                "candidate {j} lost {:.1} digits in orthogonalization",
                (norm0 / norm).log10()
            )));
        }
        for q in 0..nq {
            v[q] /= norm;
        }
        for ck in &mut c {
            *ck /= norm;
        }
        ortho_vals.push(v);
        basis.coeffs.push(c);
    }

    let mut defect = 0.0f64;
    for i in 0..want {
        for j in i..want {
            let g = dot(&ortho_vals[i], &ortho_vals[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((g - target).abs());
        }
    }
    basis.gram_defect = defect;
    Ok(basis)
}

/// Assembled Galerkin matrices A (kernel part) and B (multiplication part).
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub a: SymMatrix,
    pub b: SymMatrix,
    pub symmetry_defect: f64,
}

impl GalerkinSystem {
    pub fn size(&self) -> usize {
        self.a.size()
    }

    /// M = A − B.
    pub fn m(&self) -> SymMatrix {
        self.a.sub(&self.b)
    }

    /// Leading principal block: the nested system of a smaller basis order.
    pub fn leading(&self, size: usize) -> GalerkinSystem {
        GalerkinSystem {
            a: SymMatrix::from_fn(size, |i, j| self.a.get(i, j)),
            b: SymMatrix::from_fn(size, |i, j| self.b.get(i, j)),
            symmetry_defect: self.symmetry_defect,
        }
    }
}

/// A_{kl} = ∬ J(x−y) φ_k(x) φ_l(y), B_{ln} = ∫ b(x) φ_l φ_n, with b(x)
/// evaluated by the same rule so the constant row of A − B vanishes to
/// rounding.
pub fn assemble(
    kernel: &Kernel,
    domain: &Domain,
    basis: &Basis,
    order: usize,
) -> Result<GalerkinSystem> {
    let rule = QuadratureRule::on_domain(domain, order, Some(kernel.panel_hint()));
    let nq = rule.nodes.len();
    let nb = basis.len();

    let phi: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|x| basis.eval_all(x))
        .collect(); // phi[q][j]

    // kernel values on the node product
    let kmat: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .map(|x| {
            rule.nodes
                .iter()
                .map(|y| kernel.eval_diff(x, y))
                .collect()
        })
        .collect();

    // retained mass at each node via the same rule
    let bvals: Vec<f64> = (0..nq)
        .map(|q| {
            let mut s = KahanSum::default();
            for q2 in 0..nq {
                s.add(rule.weights[q2] * kmat[q][q2]);
            }
            s.value()
        })
        .collect();

    // T[j][q2] = Σ_q w_q φ_j(x_q) J(x_q − y_{q2})
    let mut t = vec![vec![0.0; nq]; nb];
    for (j, tj) in t.iter_mut().enumerate() {
        for q2 in 0..nq {
            let mut s = KahanSum::default();
            for q in 0..nq {
                s.add(rule.weights[q] * phi[q][j] * kmat[q][q2]);
            }
            tj[q2] = s.value();
        }
    }

    let mut a_raw = vec![vec![0.0; nb]; nb];
    let mut b_raw = vec![vec![0.0; nb]; nb];
    for j in 0..nb {
        for l in 0..nb {
            let mut sa = KahanSum::default();
            let mut sb = KahanSum::default();
            for q2 in 0..nq {
                sa.add(t[j][q2] * rule.weights[q2] * phi[q2][l]);
                if l >= j {
                    sb.add(rule.weights[q2] * bvals[q2] * phi[q2][j] * phi[q2][l]);
                }
            }
            a_raw[j][l] = sa.value();
            if l >= j {
                b_raw[j][l] = sb.value();
                b_raw[l][j] = sb.value();
            }
        }
    }

    let mut defect = 0.0f64;
    for j in 0..nb {
        for l in j..nb {
            defect = defect.max((a_raw[j][l] - a_raw[l][j]).abs());
        }
    }
    let a = SymMatrix::from_fn(nb, |i, j| 0.5 * (a_raw[i][j] + a_raw[j][i]));
    let b = SymMatrix::from_fn(nb, |i, j| b_raw[i][j]);
    Ok(GalerkinSystem {
        a,
        b,
        symmetry_defect: defect,
    })
}

/// One approximate eigenpair of the constrained problem.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub index: usize,
    pub value: f64,
    /// coefficients over φ₀ … φ_N with the leading `index`-independent
    /// constraint c₀ = 0 for index ≥ 1
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

/// Top `k_max` eigenpairs of M under the constraint c₀ = 0, embedded back
/// into the full coefficient space. Pure matrix computation.
pub fn constrained_top_eigenpairs(m: &SymMatrix, k_max: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let sub = m.restrict(1)?;
    let dec = linalg::eigh(&sub)?;
    let k_max = k_max.min(sub.size());
    let mut out = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let mut c = vec![0.0];
        c.extend_from_slice(&dec.eigenvectors[k]);
        out.push((dec.eigenvalues[k], c));
    }
    Ok(out)
}

/// L² residual ‖𝓛v − βv‖ computed against the operator by quadrature,
/// not through the Galerkin matrix.
pub fn residual_l2(
    kernel: &Kernel,
    domain: &Domain,
    basis: &Basis,
    coefficients: &[f64],
    beta: f64,
    order: usize,
) -> Result<f64> {
    let rule = QuadratureRule::on_domain(domain, order, Some(kernel.panel_hint()));
    let nq = rule.nodes.len();
    let vvals: Vec<f64> = rule
        .nodes
        .iter()
        .map(|x| basis.eval_combo(coefficients, x))
        .collect();
    let mut res2 = KahanSum::default();
    for q in 0..nq {
        let x = &rule.nodes[q];
        let mut conv = KahanSum::default();
        let mut bx = KahanSum::default();
        for q2 in 0..nq {
            let j = kernel.eval_diff(x, &rule.nodes[q2]);
            conv.add(rule.weights[q2] * j * vvals[q2]);
            bx.add(rule.weights[q2] * j);
        }
        let lv = conv.value() - bx.value() * vvals[q];
        res2.add(rule.weights[q] * (lv - beta * vvals[q]).powi(2));
    }
    Ok(res2.value().max(0.0).sqrt())
}

/// Solve the constrained eigenproblem: the trivial constant pair plus the
/// top `k_max` non-trivial pairs, each with its operator residual.
pub fn solve(
    kernel: &Kernel,
    domain: &Domain,
    basis: &Basis,
    system: &GalerkinSystem,
    k_max: usize,
    residual_order: usize,
) -> Result<Vec<EigenPair>> {
    let m = system.m();
    let mut e0 = vec![0.0; system.size()];
    e0[0] = 1.0;
    let beta0 = m.get(0, 0);
    let mut pairs = vec![EigenPair {
        index: 0,
        value: beta0,
        residual: residual_l2(kernel, domain, basis, &e0, beta0, residual_order)?,
        coefficients: e0,
    }];
    for (k, (value, coefficients)) in constrained_top_eigenpairs(&m, k_max)?
        .into_iter()
        .enumerate()
    {
        let residual = residual_l2(kernel, domain, basis, &coefficients, value, residual_order)?;
        pairs.push(EigenPair {
            index: k + 1,
            value,
            coefficients,
            residual,
        });
    }
    Ok(pairs)
}

/// 𝓛v as a function handle: x ↦ ∫_Ω J(x−y)v(y)dy − b(x)v(x).
pub fn apply_operator<'a, F>(
    kernel: &'a Kernel,
    domain: &Domain,
    v: F,
    order: usize,
) -> impl Fn(&[f64]) -> f64 + 'a
where
    F: Fn(&[f64]) -> f64 + 'a,
{
    let rule = QuadratureRule::on_domain(domain, order, Some(kernel.panel_hint()));
    let vvals: Vec<f64> = rule.nodes.iter().map(|x| v(x)).collect();
    move |x: &[f64]| {
        let mut conv = KahanSum::default();
        let mut bx = KahanSum::default();
        for (q, y) in rule.nodes.iter().enumerate() {
            let j = kernel.eval_diff(x, y);
            conv.add(rule.weights[q] * j * vvals[q]);
            bx.add(rule.weights[q] * j);
        }
        conv.value() - bx.value() * v(x)
    }
}

/// ⟨𝓛v, v⟩ via the operator decomposition 𝒦 − ℳ.
pub fn energy<F: Fn(&[f64]) -> f64>(
    kernel: &Kernel,
    domain: &Domain,
    v: F,
    order: usize,
) -> Result<f64> {
    let rule = QuadratureRule::on_domain(domain, order, Some(kernel.panel_hint()));
    let nq = rule.nodes.len();
    let vvals: Vec<f64> = rule.nodes.iter().map(|x| v(x)).collect();
    let mut total = KahanSum::default();
    for q in 0..nq {
        let mut conv = KahanSum::default();
        let mut bx = KahanSum::default();
        for q2 in 0..nq {
            let j = kernel.eval_diff(&rule.nodes[q], &rule.nodes[q2]);
            conv.add(rule.weights[q2] * j * vvals[q2]);
            bx.add(rule.weights[q2] * j);
        }
        total.add(rule.weights[q] * vvals[q] * (conv.value() - bx.value() * vvals[q]));
    }
    Ok(total.value())
}

/// −½ ∬ J(x−y)(v(x)−v(y))² dx dy, the symmetrized form of the energy.
pub fn energy_symmetrized<F: Fn(&[f64]) -> f64>(
    kernel: &Kernel,
    domain: &Domain,
    v: F,
    order: usize,
) -> Result<f64> {
    let rule = QuadratureRule::on_domain(domain, order, Some(kernel.panel_hint()));
    let nq = rule.nodes.len();
    let vvals: Vec<f64> = rule.nodes.iter().map(|x| v(x)).collect();
    let mut total = KahanSum::default();
    for q in 0..nq {
        for q2 in 0..nq {
            let j = kernel.eval_diff(&rule.nodes[q], &rule.nodes[q2]);
            total.add(rule.weights[q] * rule.weights[q2] * j * (vvals[q] - vvals[q2]).powi(2));
        }
    }
    Ok(-0.5 * total.value())
}

/// One row of a convergence sweep.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub residual: f64,
    /// βₖᴺ − sup σ_c
    pub gap_margin: f64,
}

/// L² increment between eigenfunctions at successive basis orders.
#[derive(Debug, Clone)]
pub struct IncrementRow {
    pub n_from: usize,
    pub n_to: usize,
    pub k: usize,
    pub l2_increment: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub increments: Vec<IncrementRow>,
    pub sup_sigma_c: f64,
    /// false when βₖᴺ decreased in N beyond the 1e−10 slack
    pub monotone_ok: bool,
    /// eigenpairs at the largest basis order of the sweep
    pub final_pairs: Vec<EigenPair>,
    /// the shared basis (sized for the largest order)
    pub basis: Basis,
}

/// Sweep basis orders. The basis and the quadrature rule are fixed at the
/// largest order and smaller systems are leading blocks, so the discrete
/// problems are exactly nested.
pub fn converge(
    kernel: &Kernel,
    domain: &Domain,
    n_list: &[usize],
    k_max: usize,
    order: usize,
) -> Result<ConvergenceTable> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "N list must be non-empty and strictly increasing".into(),
        ));
    }
    let n_max = *n_list.last().unwrap();
    let basis = build_basis(domain, n_max)?;
    let order = order.max(basis.max_degree() + 8);
    let system = assemble(kernel, domain, &basis, order)?;
    let band = band::continuous_spectrum(kernel, domain, order, 32, 30)?;

    let mut rows = Vec::new();
    let mut increments = Vec::new();
    let mut monotone_ok = true;
    let mut prev: Option<(usize, Vec<EigenPair>)> = None;

    // shared rule for eigenfunction increments
    let inc_rule = QuadratureRule::on_domain(domain, order, None);

    for &n in n_list {
        let sub = system.leading(n + 1);
        let pairs = solve(kernel, domain, &basis, &sub, k_max, order)?;
        for p in &pairs {
            rows.push(ConvergenceRow {
                n,
                k: p.index,
                beta: p.value,
                residual: p.residual,
                gap_margin: p.value - band.sup_sigma_c,
            });
        }
        if let Some((n_prev, prev_pairs)) = &prev {
            for (p_prev, p) in prev_pairs.iter().zip(&pairs) {
                if p.index >= 1 && p.value < p_prev.value - 1e-10 {
                    monotone_ok = false;
                }
                // sign-aligned L² increment
                let mut dot = KahanSum::default();
                let diff2 = |sign: f64| -> f64 {
                    let mut s = KahanSum::default();
                    for (x, &w) in inc_rule.nodes.iter().zip(&inc_rule.weights) {
                        let a = basis.eval_combo(&p.coefficients, x);
                        let b = sign * basis.eval_combo(&p_prev.coefficients, x);
                        s.add(w * (a - b) * (a - b));
                    }
                    s.value().max(0.0).sqrt()
                };
                for (x, &w) in inc_rule.nodes.iter().zip(&inc_rule.weights) {
                    dot.add(
                        w * basis.eval_combo(&p.coefficients, x)
                            * basis.eval_combo(&p_prev.coefficients, x),
                    );
                }
                let sign = if dot.value() >= 0.0 { 1.0 } else { -1.0 };
                increments.push(IncrementRow {
                    n_from: *n_prev,
                    n_to: n,
                    k: p.index,
                    l2_increment: diff2(sign),
                });
            }
        }
        prev = Some((n, pairs));
    }

    let final_pairs = prev.map(|(_, p)| p).unwrap_or_default();
    Ok(ConvergenceTable {
        rows,
        increments,
        sup_sigma_c: band.sup_sigma_c,
        monotone_ok,
        final_pairs,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{AxisBox, Domain};
    use crate::quadrature;

    #[test]
    fn basis_interval_n1() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let b = build_basis(&d, 1).unwrap();
        let c = 1.0 / 2.0f64.sqrt();
        assert!((b.eval(0, &[0.3]) - c).abs() < 1e-12);
        // φ₁(x) = √(3/2)·x up to sign
        let want = (1.5f64).sqrt() * 0.5;
        assert!((b.eval(1, &[0.5]).abs() - want).abs() < 1e-12);
    }

    #[test]
    fn basis_orthogonality_quadrature() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let b = build_basis(&d, 4).unwrap();
        let ip = quadrature::integrate(&d, |x| b.eval(0, x) * b.eval(1, x), 16).unwrap();
        assert!(ip.abs() < 1e-12);
        assert!(b.gram_defect() < 1e-10);
    }

    #[test]
    fn basis_unit_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        let b = build_basis(&sq, 2).unwrap();
        assert_eq!(b.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let ip = quadrature::integrate(&sq, |x| b.eval(i, x) * b.eval(j, x), 12).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-10, "({i},{j}): {ip}");
            }
        }
    }

    #[test]
    fn basis_union_includes_piecewise_constants() {
        let d = Domain::new(
            vec![
                AxisBox::new(vec![0.0], vec![1.0]),
                AxisBox::new(vec![2.0], vec![3.0]),
            ],
            1,
        )
        .unwrap();
        let b = build_basis(&d, 3).unwrap();
        assert!(b.gram_defect() < 1e-10);
        // φ₁ is the orthonormalized indicator difference: constant per box
        let v_left = b.eval(1, &[0.5]);
        let v_right = b.eval(1, &[2.5]);
        assert!((v_left + v_right).abs() < 1e-10);
        assert!((v_left.abs() - 1.0 / 2.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn assemble_constant_row_vanishes() {
        let k = Kernel::tent(0.5, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let basis = build_basis(&d, 4).unwrap();
        let sys = assemble(&k, &d, &basis, 24).unwrap();
        let m = sys.m();
        let e0: Vec<f64> = (0..sys.size()).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let me0 = m.mul_vec(&e0);
        let norm: f64 = me0.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm < 1e-8, "‖M·e₀‖ = {norm:e}");
        assert!(sys.symmetry_defect < 1e-12);
    }

    #[test]
    fn hand_constrained_system() {
        // 2×2 system with M̃ = [−0.6]: β₁ = −0.6, c = (0, 1)
        let m = SymMatrix::from_fn(2, |i, j| {
            if i == 1 && j == 1 {
                -0.6
            } else if i == j {
                0.0
            } else {
                0.1 // coupling to the constrained mode is irrelevant
            }
        });
        let pairs = constrained_top_eigenpairs(&m, 1).unwrap();
        assert!((pairs[0].0 + 0.6).abs() < 1e-14);
        assert_eq!(pairs[0].1[0], 0.0);
        assert!((pairs[0].1[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn solve_trivial_and_principal() {
        let k = Kernel::gaussian(4.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let basis = build_basis(&d, 8).unwrap();
        let sys = assemble(&k, &d, &basis, 24).unwrap();
        let pairs = solve(&k, &d, &basis, &sys, 2, 24).unwrap();
        assert!(pairs[0].value.abs() < 1e-10);
        assert!(pairs[0].residual < 1e-8);
        let band = band::continuous_spectrum(&k, &d, 24, 32, 30).unwrap();
        assert!(pairs[1].value < 0.0);
        assert!(pairs[1].value > band.sup_sigma_c);
    }

    #[test]
    fn apply_operator_annihilates_constants() {
        let k = Kernel::gaussian(2.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let lv = apply_operator(&k, &d, |_| 1.0, 24);
        for x in [-1.0, -0.4, 0.0, 0.9] {
            assert!(lv(&[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_self_adjoint() {
        let k = Kernel::gaussian(2.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let u = |x: &[f64]| x[0].sin() + 0.2;
        let w = |x: &[f64]| x[0] * x[0] - 0.1 * x[0];
        let lu = apply_operator(&k, &d, u, 32);
        let lw = apply_operator(&k, &d, w, 32);
        let a = quadrature::integrate(&d, |x| lu(x) * w(x), 32).unwrap();
        let b = quadrature::integrate(&d, |x| u(x) * lw(x), 32).unwrap();
        assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()));
    }

    #[test]
    fn symmetrization_identity_linear_tent() {
        let k = Kernel::tent(1.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        // normalized linear: c² = 3/(2L³) = 3/2
        let c = (1.5f64).sqrt();
        let v = move |x: &[f64]| c * x[0];
        let e1 = energy(&k, &d, v, 32).unwrap();
        let e2 = energy_symmetrized(&k, &d, v, 32).unwrap();
        assert!((e1 - e2).abs() <= 1e-8 * (1.0 + e1.abs()), "{e1} vs {e2}");
        assert!(e1 < 0.0);
    }

    #[test]
    fn converge_monotone_small_sweep() {
        let k = Kernel::gaussian(8.0, 1).unwrap();
        let d = Domain::interval(-1.0, 1.0).unwrap();
        let table = converge(&k, &d, &[4, 8], 2, 24).unwrap();
        assert!(table.monotone_ok);
        for row in &table.rows {
            if row.k == 0 {
                assert!(row.beta.abs() < 1e-8);
            } else {
                assert!(row.beta < 0.0);
            }
        }
        assert_eq!(table.rows.len(), 2 * 3);
    }
}
