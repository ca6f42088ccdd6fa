use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest box dimension that can be sampled.
pub const MAX_SAMPLE_DIM: usize = 4;
pub const MIN_RESOLUTION: usize = 9;

/// Default per-axis resolution for a box of dimension `dim`.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        0..=2 => 41,
        3 => 17,
        _ => 9,
    }
}

/// Axis-aligned compact box with a per-axis sample resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactBox {
    intervals: Vec<[f64; 2]>,
    resolution: Vec<usize>,
}

impl CompactBox {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<CompactBox> {
        let res = default_resolution(intervals.len());
        CompactBox::with_resolutions(intervals.iter().map(|&(a, b)| [a, b]).collect(), vec![res; intervals.len()])
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<CompactBox> {
        CompactBox::new(vec![(lo, hi); dim])
    }

    pub fn with_resolutions(intervals: Vec<[f64; 2]>, resolution: Vec<usize>) -> Result<CompactBox> {
        if intervals.is_empty() {
            return Err(Error::Config("box needs at least one axis".into()));
        }
        if resolution.len() != intervals.len() {
            return Err(Error::Config("one resolution per axis required".into()));
        }
        for [a, b] in &intervals {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Config("box bounds must be finite".into()));
            }
            if !(a < b) {
                return Err(Error::Config(format!("degenerate box axis [{a}, {b}]")));
            }
        }
        for &r in &resolution {
            if r < MIN_RESOLUTION || r % 2 == 0 {
                return Err(Error::Config(format!(
                    "resolution {r} must be odd and at least {MIN_RESOLUTION}"
                )));
            }
        }
        Ok(CompactBox { intervals, resolution })
    }

    /// Same box, every axis at resolution `res`.
    pub fn with_resolution(&self, res: usize) -> Result<CompactBox> {
        CompactBox::with_resolutions(self.intervals.clone(), vec![res; self.dim()])
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[[f64; 2]] {
        &self.intervals
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.intervals.iter().zip(x).all(|([a, b], v)| *a <= *v && *v <= *b)
    }

    pub fn contains_in_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.intervals.iter().zip(x).all(|([a, b], v)| *a < *v && *v < *b)
    }

    /// Largest Euclidean norm of a point of the box.
    pub fn outer_radius(&self) -> f64 {
        self.intervals
            .iter()
            .map(|[a, b]| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.intervals.iter().map(|[a, b]| 0.5 * (a + b)).collect()
    }

    fn axis_points(&self, axis: usize) -> Vec<f64> {
        let [a, b] = self.intervals[axis];
        let n = self.resolution[axis];
        let mid = n / 2;
        (0..n)
            .map(|i| {
                if i == 0 {
                    a
                } else if i == n - 1 {
                    b
                } else if i == mid {
                    0.5 * (a + b)
                } else {
                    a + (b - a) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    fn check_sampleable(&self) -> Result<()> {
        if self.dim() > MAX_SAMPLE_DIM {
            return Err(Error::Capability(format!(
                "boxes of dimension {} cannot be sampled (at most {MAX_SAMPLE_DIM})",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Full tensor grid of sample points of `K`.
pub fn sample_box(k: &CompactBox) -> Result<Vec<Vec<f64>>> {
    let cloud = tensor_grid(k)?;
    Ok(cloud.iter().map(<[f64]>::to_vec).collect())
}

fn tensor_grid(k: &CompactBox) -> Result<PointCloud> {
    k.check_sampleable()?;
    let axes: Vec<Vec<f64>> = (0..k.dim()).map(|i| k.axis_points(i)).collect();
    let total: usize = axes.iter().map(Vec::len).product();
    let mut coords = Vec::with_capacity(total * k.dim());
    let mut idx = vec![0usize; k.dim()];
    for _ in 0..total {
        for (a, &i) in axes.iter().zip(&idx) {
            coords.push(a[i]);
        }
        for d in (0..k.dim()).rev() {
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
        }
    }
    Ok(PointCloud { dim: k.dim(), coords })
}

/// Flat list of points of a common dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize) -> PointCloud {
        PointCloud { dim, coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coords.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim.max(1))
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }
}

/// Scale-aware sample set for sup norms over a box.
///
/// At scale ε the set is the tensor grid of `K` together with the reference
/// grid `[-ρ, ρ]ⁿ` (same resolution) scaled by ε, restricted to `K`. Features
/// of size ε, such as `φ(x/ε)`, are therefore seen at the same relative
/// positions for every ε; with power-of-two grids the scaled points are exact.
#[derive(Clone, Debug)]
pub struct Sampler {
    region: CompactBox,
    base: PointCloud,
    reference: PointCloud,
}

/// Half-width of the reference grid that is scaled by ε.
pub const REFERENCE_RADIUS: f64 = 1.0;

impl Sampler {
    pub fn new(region: &CompactBox) -> Result<Sampler> {
        let base = tensor_grid(region)?;
        let reference_box = CompactBox::with_resolutions(
            vec![[-REFERENCE_RADIUS, REFERENCE_RADIUS]; region.dim()],
            region.resolution().to_vec(),
        )?;
        let reference = tensor_grid(&reference_box)?;
        Ok(Sampler {
            region: region.clone(),
            base,
            reference,
        })
    }

    pub fn region(&self) -> &CompactBox {
        &self.region
    }

    pub fn base(&self) -> &PointCloud {
        &self.base
    }

    /// Sample points at scale `eps`.
    pub fn points(&self, eps: f64) -> PointCloud {
        let mut out = self.base.clone();
        let mut buf = vec![0.0; self.region.dim()];
        for y in self.reference.iter() {
            for (b, v) in buf.iter_mut().zip(y) {
                *b = eps * v;
            }
            if self.region.contains(&buf) {
                out.push(&buf);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_samples() {
        let k = CompactBox::new(vec![(-1.0, 1.0)]).unwrap().with_resolution(9).unwrap();
        let pts = sample_box(&k).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.contains(&vec![-1.0]));
        assert!(pts.contains(&vec![1.0]));
        assert!(pts.contains(&vec![0.0]));
    }

    #[test]
    fn square_samples() {
        let k = CompactBox::cube(2, -1.0, 1.0).unwrap().with_resolution(9).unwrap();
        assert_eq!(sample_box(&k).unwrap().len(), 81);
    }

    #[test]
    fn five_dimensional_box_is_rejected() {
        let k = CompactBox::cube(5, -1.0, 1.0).unwrap();
        assert!(matches!(sample_box(&k), Err(Error::Capability(_))));
    }

    #[test]
    fn degenerate_boxes_are_rejected() {
        assert!(CompactBox::new(vec![(0.0, 0.0)]).is_err());
        assert!(CompactBox::new(vec![(1.0, -1.0)]).is_err());
        assert!(CompactBox::cube(2, -1.0, 1.0).unwrap().with_resolution(8).is_err());
        assert!(CompactBox::cube(2, -1.0, 1.0).unwrap().with_resolution(7).is_err());
    }

    #[test]
    fn scaled_points_stay_in_region() {
        let k = CompactBox::new(vec![(0.5, 1.0), (-1.0, 1.0)]).unwrap();
        let s = Sampler::new(&k).unwrap();
        let small = s.points(1e-3);
        assert_eq!(small.len(), s.base().len());
        let full = Sampler::new(&CompactBox::cube(2, -1.0, 1.0).unwrap()).unwrap();
        let pts = full.points(0.25);
        assert_eq!(pts.len(), 2 * 41 * 41);
        assert!(pts.iter().any(|p| p == [0.125, 0.0]));
    }
}
