//! Bounded domains as finite disjoint unions of axis-aligned boxes.
//!
//! All geometric functionals (measure, barycenter, moments of inertia) have
//! closed forms on box unions, which keeps every downstream oracle exact.

use crate::error::{Error, Result};

/// Axis-aligned box given by its lower and upper corners.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        AxisBox { lo, hi }
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&xi, (&lo, &hi))| xi >= lo && xi <= hi)
    }
}

/// Open bounded domain: a finite union of axis-aligned boxes with pairwise
/// disjoint interiors.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    boxes: Vec<AxisBox>,
    dim: usize,
}

/// Two disjoint pieces whose union is the parent domain up to measure zero.
#[derive(Debug, Clone)]
pub struct Partition {
    pub part1: Domain,
    pub part2: Domain,
}

impl Domain {
    pub fn new(boxes: Vec<AxisBox>, dim: usize) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidDomain(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if boxes.is_empty() {
            return Err(Error::InvalidDomain("domain has no boxes".into()));
        }
        for (i, b) in boxes.iter().enumerate() {
            if b.lo.len() != dim || b.hi.len() != dim {
                return Err(Error::InvalidDomain(format!(
                    "box {i} has corner dimension != {dim}"
                )));
            }
            for k in 0..dim {
                if !(b.hi[k] - b.lo[k]).is_finite() || b.hi[k] <= b.lo[k] {
                    return Err(Error::InvalidDomain(format!(
                        "box {i} has non-positive side on axis {k}"
                    )));
                }
            }
        }
        for i in 0..boxes.len() {
            for j in (i + 1)..boxes.len() {
                let overlap = (0..dim)
                    .all(|k| boxes[i].lo[k] < boxes[j].hi[k] && boxes[j].lo[k] < boxes[i].hi[k]);
                if overlap {
                    return Err(Error::InvalidDomain(format!(
                        "boxes {i} and {j} have overlapping interiors"
                    )));
                }
            }
        }
        Ok(Domain { boxes, dim })
    }

    /// 1D interval (a, b).
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Domain::new(vec![AxisBox::new(vec![a], vec![b])], 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(|b| b.volume()).sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boxes.iter().any(|b| b.contains(x))
    }

    /// Measure-weighted average of box centroids.
    pub fn barycenter(&self) -> Vec<f64> {
        let total = self.measure();
        let mut c = vec![0.0; self.dim];
        for b in &self.boxes {
            let v = b.volume();
            for k in 0..self.dim {
                c[k] += v * 0.5 * (b.lo[k] + b.hi[k]);
            }
        }
        for ck in &mut c {
            *ck /= total;
        }
        c
    }

    /// Central second moment along one axis: ∫ (x_k − x̄_k)² dx, closed form.
    pub fn inertia(&self, axis: usize) -> Result<f64> {
        if axis >= self.dim {
            return Err(Error::InvalidInput(format!(
                "axis {axis} out of range for dimension {}",
                self.dim
            )));
        }
        let c = self.barycenter()[axis];
        let mut total = 0.0;
        for b in &self.boxes {
            let cross: f64 = (0..self.dim)
                .filter(|&k| k != axis)
                .map(|k| b.hi[k] - b.lo[k])
                .product();
            let a = b.lo[axis] - c;
            let d = b.hi[axis] - c;
            total += cross * (d * d * d - a * a * a) / 3.0;
        }
        Ok(total)
    }

    /// Maximum of `inertia` over all axes, with the attaining axis.
    pub fn inertia_max(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for k in 0..self.dim {
            let v = self.inertia(k).expect("axis in range");
            if v > best.1 {
                best = (k, v);
            }
        }
        best
    }

    /// Uniform scaling x ↦ s·x of every corner.
    pub fn scale(&self, s: f64) -> Domain {
        let boxes = self
            .boxes
            .iter()
            .map(|b| {
                AxisBox::new(
                    b.lo.iter().map(|&x| s * x).collect(),
                    b.hi.iter().map(|&x| s * x).collect(),
                )
            })
            .collect();
        Domain {
            boxes,
            dim: self.dim,
        }
    }

    pub fn translate(&self, t: &[f64]) -> Domain {
        let boxes = self
            .boxes
            .iter()
            .map(|b| {
                AxisBox::new(
                    b.lo.iter().zip(t).map(|(&x, &ti)| x + ti).collect(),
                    b.hi.iter().zip(t).map(|(&x, &ti)| x + ti).collect(),
                )
            })
            .collect();
        Domain {
            boxes,
            dim: self.dim,
        }
    }

    /// Reference domain Ω₀ of unit measure plus the scale factor |Ω|^{1/n}.
    pub fn rescale_to_unit_measure(&self) -> (Domain, f64) {
        let lambda = self.measure().powf(1.0 / self.dim as f64);
        (self.scale(1.0 / lambda), lambda)
    }

    /// Cumulative measure of the part of the domain below `t` on `axis`.
    fn cumulative_measure(&self, axis: usize, t: f64) -> f64 {
        self.boxes
            .iter()
            .map(|b| {
                let cross: f64 = (0..self.dim)
                    .filter(|&k| k != axis)
                    .map(|k| b.hi[k] - b.lo[k])
                    .product();
                cross * (t.min(b.hi[axis]) - b.lo[axis]).max(0.0)
            })
            .sum()
    }

    /// Split by a hyperplane on `axis` into two parts of equal measure.
    ///
    /// The plane position is found by bisection on the cumulative measure.
    /// When the half-measure level is attained on a gap between boxes, the
    /// gap midpoint is chosen.
    pub fn equal_split(&self, axis: usize) -> Result<Partition> {
        if axis >= self.dim {
            return Err(Error::InvalidInput(format!(
                "axis {axis} out of range for dimension {}",
                self.dim
            )));
        }
        let lo = self
            .boxes
            .iter()
            .map(|b| b.lo[axis])
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .boxes
            .iter()
            .map(|b| b.hi[axis])
            .fold(f64::NEG_INFINITY, f64::max);
        if !(hi - lo).is_finite() || hi - lo <= 0.0 {
            return Err(Error::SplitFailure(format!(
                "degenerate extent on axis {axis}"
            )));
        }
        let half = 0.5 * self.measure();
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if self.cumulative_measure(axis, mid) < half {
                a = mid;
            } else {
                b = mid;
            }
        }
        let mut t = 0.5 * (a + b);

        // If t landed inside a gap between boxes, snap to the gap midpoint.
        let in_interior = self
            .boxes
            .iter()
            .any(|bx| bx.lo[axis] < t && t < bx.hi[axis]);
        if !in_interior {
            let gap_lo = self
                .boxes
                .iter()
                .map(|bx| bx.hi[axis])
                .filter(|&e| e <= t + 1e-12 * (hi - lo))
                .fold(lo, f64::max);
            let gap_hi = self
                .boxes
                .iter()
                .map(|bx| bx.lo[axis])
                .filter(|&e| e >= t - 1e-12 * (hi - lo))
                .fold(hi, f64::min);
            if gap_hi > gap_lo {
                t = 0.5 * (gap_lo + gap_hi);
            }
        }

        let mut left = Vec::new();
        let mut right = Vec::new();
        for bx in &self.boxes {
            if bx.hi[axis] <= t {
                left.push(bx.clone());
            } else if bx.lo[axis] >= t {
                right.push(bx.clone());
            } else {
                let mut l = bx.clone();
                let mut r = bx.clone();
                l.hi[axis] = t;
                r.lo[axis] = t;
                left.push(l);
                right.push(r);
            }
        }
        if left.is_empty() || right.is_empty() {
            return Err(Error::SplitFailure(format!(
                "split plane {t} leaves one side empty on axis {axis}"
            )));
        }
        Ok(Partition {
            part1: Domain {
                boxes: left,
                dim: self.dim,
            },
            part2: Domain {
                boxes: right,
                dim: self.dim,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval(a: f64, b: f64) -> Domain {
        Domain::interval(a, b).unwrap()
    }

    fn union_1d(segments: &[(f64, f64)]) -> Domain {
        Domain::new(
            segments
                .iter()
                .map(|&(a, b)| AxisBox::new(vec![a], vec![b]))
                .collect(),
            1,
        )
        .unwrap()
    }

    #[test]
    fn measure_interval() {
        assert_eq!(interval(-1.0, 1.0).measure(), 2.0);
    }

    #[test]
    fn measure_unit_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        assert_eq!(sq.measure(), 1.0);
    }

    #[test]
    fn measure_additive_over_union() {
        assert_eq!(union_1d(&[(0.0, 1.0), (2.0, 3.0)]).measure(), 2.0);
    }

    #[test]
    fn barycenter_symmetric_interval() {
        assert_eq!(interval(-3.0, 3.0).barycenter(), vec![0.0]);
    }

    #[test]
    fn barycenter_union() {
        // ∫ x over (0,1)∪(2,3) = 1/2 + 5/2 = 3, measure 2.
        assert!((union_1d(&[(0.0, 1.0), (2.0, 3.0)]).barycenter()[0] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn barycenter_unit_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        assert_eq!(sq.barycenter(), vec![0.5, 0.5]);
    }

    #[test]
    fn inertia_unit_interval() {
        let d = interval(-0.5, 0.5);
        assert!((d.inertia(0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn inertia_unit_square_both_axes() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        assert!((sq.inertia(0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((sq.inertia(1).unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn inertia_scaled_interval() {
        // ∫_{−L}^{L} x² dx = 2L³/3
        let l = 2.5;
        let d = interval(-l, l);
        assert!((d.inertia(0).unwrap() - 2.0 * l.powi(3) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inertia_axis_out_of_range() {
        assert!(interval(0.0, 1.0).inertia(1).is_err());
    }

    #[test]
    fn rescale_interval() {
        let d = interval(-2.0, 2.0);
        let (d0, lambda) = d.rescale_to_unit_measure();
        assert_eq!(lambda, 4.0);
        assert!((d0.boxes()[0].lo[0] + 0.5).abs() < 1e-15);
        assert!((d0.boxes()[0].hi[0] - 0.5).abs() < 1e-15);
        // round trip
        let back = d0.scale(lambda);
        for (a, b) in back.boxes()[0].lo.iter().zip(&d.boxes()[0].lo) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rescale_identity_for_unit_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        let (d0, lambda) = sq.rescale_to_unit_measure();
        assert_eq!(lambda, 1.0);
        assert_eq!(d0, sq);
    }

    #[test]
    fn rescale_two_by_two_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![2.0, 2.0])], 2).unwrap();
        let (d0, lambda) = sq.rescale_to_unit_measure();
        assert_eq!(lambda, 2.0);
        assert!((d0.boxes()[0].hi[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_split_interval() {
        let p = interval(-2.0, 2.0).equal_split(0).unwrap();
        assert!((p.part1.boxes()[0].hi[0]).abs() < 1e-12);
        assert!((p.part1.measure() - 2.0).abs() < 1e-12);
        assert!((p.part2.measure() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn equal_split_square() {
        let sq = Domain::new(vec![AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0])], 2).unwrap();
        let p = sq.equal_split(0).unwrap();
        assert!((p.part1.measure() - 0.5).abs() < 1e-12);
        assert!((p.part2.measure() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn equal_split_lands_in_gap_midpoint() {
        let p = union_1d(&[(0.0, 1.0), (2.0, 3.0)]).equal_split(0).unwrap();
        // target falls in the gap (1,2): plane at its midpoint, parts whole boxes
        assert_eq!(p.part1.boxes().len(), 1);
        assert_eq!(p.part2.boxes().len(), 1);
        assert!((p.part1.measure() - 1.0).abs() < 1e-12);
        assert!((p.part2.boxes()[0].lo[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_overlapping_boxes() {
        let r = Domain::new(
            vec![
                AxisBox::new(vec![0.0], vec![2.0]),
                AxisBox::new(vec![1.0], vec![3.0]),
            ],
            1,
        );
        assert!(r.is_err());
    }

    #[test]
    fn rejects_empty_box() {
        assert!(Domain::interval(1.0, 1.0).is_err());
    }

    #[test]
    fn inertia_translation_invariant() {
        let d = union_1d(&[(0.0, 1.0), (2.0, 3.5)]);
        let i0 = d.inertia(0).unwrap();
        let i1 = d.translate(&[7.25]).inertia(0).unwrap();
        assert!((i0 - i1).abs() < 1e-12 * (1.0 + i0.abs()));
    }

    #[test]
    fn inertia_scaling_law() {
        // inertia(λΩ₀) = λ^{n+2} inertia(Ω₀)
        let sq = Domain::new(vec![AxisBox::new(vec![-0.5, -0.25], vec![0.5, 0.75])], 2).unwrap();
        let lam = 3.0;
        let scaled = sq.scale(lam);
        let lhs = scaled.inertia(0).unwrap();
        let rhs = lam.powi(4) * sq.inertia(0).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs());
    }
}
