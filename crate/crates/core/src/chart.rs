//! Complex coordinate charts and the finite-difference calculus on them.
//!
//! A chart is a product of complex axes, each sampled on a uniform Re×Im
//! rectangle. Complex derivatives are realized as Wirtinger combinations of
//! real-direction stencils: ∂/∂z = ½(∂/∂Re − i ∂/∂Im) and
//! ∂/∂z* = ½(∂/∂Re + i ∂/∂Im), second-order central in the interior and
//! second-order one-sided at boundaries.

use crate::error::{CoreError, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Uniform Re×Im sampling of one complex coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisGrid {
    pub label: String,
    pub re0: f64,
    pub im0: f64,
    pub d_re: f64,
    pub d_im: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl AxisGrid {
    pub fn new(
        label: impl Into<String>,
        re0: f64,
        d_re: f64,
        n_re: usize,
        im0: f64,
        d_im: f64,
        n_im: usize,
    ) -> Result<Self> {
        if d_re <= 0.0 || d_im <= 0.0 {
            return Err(CoreError::InvalidGrid("spacing must be > 0".into()));
        }
        if n_re < 5 || n_im < 5 {
            return Err(CoreError::InvalidGrid(
                "need ≥ 5 samples per real axis (central stencils need 2-wide margins)"
                    .into(),
            ));
        }
        Ok(Self { label: label.into(), re0, im0, d_re, d_im, n_re, n_im })
    }

    /// Square window centered at `center` with half-width `hw`, n×n samples.
    pub fn centered_square(
        label: impl Into<String>,
        center: C64,
        hw: f64,
        n: usize,
    ) -> Result<Self> {
        let d = 2.0 * hw / (n as f64 - 1.0);
        Self::new(label, center.re - hw, d, n, center.im - hw, d, n)
    }

    pub fn point(&self, i_re: usize, i_im: usize) -> C64 {
        C64::new(
            self.re0 + self.d_re * i_re as f64,
            self.im0 + self.d_im * i_im as f64,
        )
    }
}

/// Which real direction of a complex axis a stencil runs along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealDir {
    Re,
    Im,
}

/// Holomorphic (∂/∂z) or antiholomorphic (∂/∂z*) Wirtinger derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wirtinger {
    Holomorphic,
    Antiholomorphic,
}

/// A product of complex axes with row-major node ordering
/// (axis0.re, axis0.im, axis1.re, axis1.im, ...), last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateChart {
    pub axes: Vec<AxisGrid>,
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl CoordinateChart {
    pub fn new(axes: Vec<AxisGrid>) -> Result<Self> {
        if axes.is_empty() {
            return Err(CoreError::InvalidGrid("chart needs ≥ 1 axis".into()));
        }
        let mut dims = Vec::with_capacity(2 * axes.len());
        for ax in &axes {
            dims.push(ax.n_re);
            dims.push(ax.n_im);
        }
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len() - 1).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Ok(Self { axes, dims, strides })
    }

    pub fn single(axis: AxisGrid) -> Result<Self> {
        Self::new(vec![axis])
    }

    pub fn n_axes(&self) -> usize {
        self.axes.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.dims.iter().product()
    }

    /// Real-direction slot (into dims/strides) for (axis, dir).
    pub(crate) fn slot(&self, axis: usize, dir: RealDir) -> usize {
        2 * axis + if dir == RealDir::Re { 0 } else { 1 }
    }

    pub fn spacing(&self, axis: usize, dir: RealDir) -> f64 {
        match dir {
            RealDir::Re => self.axes[axis].d_re,
            RealDir::Im => self.axes[axis].d_im,
        }
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        let mut rest = node;
        self.strides
            .iter()
            .zip(&self.dims)
            .map(|(&s, &d)| {
                let i = (rest / s) % d;
                rest %= s;
                i
            })
            .collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(&i, &s)| i * s).sum()
    }

    /// Complex coordinates of a node, one per axis.
    pub fn coords(&self, node: usize) -> Vec<C64> {
        let mi = self.multi_index(node);
        self.axes
            .iter()
            .enumerate()
            .map(|(a, ax)| ax.point(mi[2 * a], mi[2 * a + 1]))
            .collect()
    }

    /// Position of a node along one real direction.
    fn pos(&self, node: usize, slot: usize) -> usize {
        (node / self.strides[slot]) % self.dims[slot]
    }

    /// Node shifted by `delta` steps along a real direction.
    pub(crate) fn shifted(&self, node: usize, slot: usize, delta: isize) -> Option<usize> {
        let p = self.pos(node, slot) as isize + delta;
        if p < 0 || p >= self.dims[slot] as isize {
            None
        } else {
            Some((node as isize + delta * self.strides[slot] as isize) as usize)
        }
    }

    /// Distance (in steps) from the nearest boundary over all real
    /// directions; the margin available for central stencils.
    pub fn margin(&self, node: usize) -> usize {
        (0..self.dims.len())
            .map(|slot| {
                let p = self.pos(node, slot);
                p.min(self.dims[slot] - 1 - p)
            })
            .min()
            .unwrap()
    }

    /// True if the node is at least `m` steps from every boundary.
    pub fn is_interior(&self, node: usize, m: usize) -> bool {
        self.margin(node) >= m
    }
}

/// Complex scalar samples on a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub chart: CoordinateChart,
    pub values: Vec<C64>,
}

impl ScalarField {
    pub fn from_fn(chart: &CoordinateChart, f: impl Fn(&[C64]) -> C64) -> Self {
        let values = (0..chart.n_nodes()).map(|n| f(&chart.coords(n))).collect();
        Self { chart: chart.clone(), values }
    }

    pub fn zeros(chart: &CoordinateChart) -> Self {
        Self {
            chart: chart.clone(),
            values: vec![C64::new(0.0, 0.0); chart.n_nodes()],
        }
    }

    /// First derivative along one real direction: central second-order in
    /// the interior, one-sided second-order at boundaries.
    pub fn real_derivative(&self, axis: usize, dir: RealDir) -> Result<ScalarField> {
        let chart = &self.chart;
        if axis >= chart.n_axes() {
            return Err(CoreError::invalid("axis out of range"));
        }
        let slot = chart.slot(axis, dir);
        if chart.dims[slot] < 3 {
            return Err(CoreError::InvalidGrid(
                "grid too small for second-order stencils".into(),
            ));
        }
        let h = chart.spacing(axis, dir);
        let mut out = ScalarField::zeros(chart);
        for node in 0..chart.n_nodes() {
            let v = |d: isize| chart.shifted(node, slot, d).map(|m| self.values[m]);
            let f0 = self.values[node];
            out.values[node] = match (v(-1), v(1)) {
                (Some(a), Some(b)) => (b - a) / (2.0 * h),
                (None, Some(f1)) => (-3.0 * f0 + 4.0 * f1 - v(2).unwrap()) / (2.0 * h),
                (Some(f1), None) => (3.0 * f0 - 4.0 * f1 + v(-2).unwrap()) / (2.0 * h),
                (None, None) => unreachable!("dims ≥ 3"),
            };
        }
        Ok(out)
    }

    /// Wirtinger derivative along a complex axis.
    pub fn wirtinger(&self, axis: usize, kind: Wirtinger) -> Result<ScalarField> {
        let du = self.real_derivative(axis, RealDir::Re)?;
        let dv = self.real_derivative(axis, RealDir::Im)?;
        let i = C64::new(0.0, 1.0);
        let s = match kind {
            Wirtinger::Holomorphic => -i,
            Wirtinger::Antiholomorphic => i,
        };
        let values = du
            .values
            .iter()
            .zip(&dv.values)
            .map(|(&a, &b)| (a + s * b) * 0.5)
            .collect();
        Ok(ScalarField { chart: self.chart.clone(), values })
    }

    /// Pure second derivative along one real direction (central; one-sided
    /// second-order 4-point at boundaries).
    pub fn real_second_derivative(
        &self,
        axis: usize,
        dir: RealDir,
    ) -> Result<ScalarField> {
        let chart = &self.chart;
        let slot = chart.slot(axis, dir);
        if chart.dims[slot] < 4 {
            return Err(CoreError::InvalidGrid(
                "grid too small for second derivatives".into(),
            ));
        }
        let h2 = chart.spacing(axis, dir).powi(2);
        let mut out = ScalarField::zeros(chart);
        for node in 0..chart.n_nodes() {
            let v = |d: isize| chart.shifted(node, slot, d).map(|m| self.values[m]);
            let f0 = self.values[node];
            out.values[node] = match (v(-1), v(1)) {
                (Some(a), Some(b)) => (b - 2.0 * f0 + a) / h2,
                (None, Some(f1)) => {
                    (2.0 * f0 - 5.0 * f1 + 4.0 * v(2).unwrap() - v(3).unwrap()) / h2
                }
                (Some(f1), None) => {
                    (2.0 * f0 - 5.0 * f1 + 4.0 * v(-2).unwrap() - v(-3).unwrap()) / h2
                }
                (None, None) => unreachable!(),
            };
        }
        Ok(out)
    }

    /// Direct ∂²/∂z_a* ∂z_b via second/cross stencils (not nested first
    /// derivatives in the same order); the independent route for two-route
    /// curvature checks.
    pub fn second_wirtinger(&self, a_bar: usize, b: usize) -> Result<ScalarField> {
        if a_bar == b {
            // ¼(∂_u² + ∂_v²)
            let uu = self.real_second_derivative(b, RealDir::Re)?;
            let vv = self.real_second_derivative(b, RealDir::Im)?;
            let values = uu
                .values
                .iter()
                .zip(&vv.values)
                .map(|(&x, &y)| (x + y) * 0.25)
                .collect();
            return Ok(ScalarField { chart: self.chart.clone(), values });
        }
        let dub = self.real_derivative(b, RealDir::Re)?;
        let dvb = self.real_derivative(b, RealDir::Im)?;
        let i = C64::new(0.0, 1.0);
        let holo_b = ScalarField {
            chart: self.chart.clone(),
            values: dub
                .values
                .iter()
                .zip(&dvb.values)
                .map(|(&x, &y)| (x - i * y) * 0.5)
                .collect(),
        };
        holo_b.wirtinger(a_bar, Wirtinger::Antiholomorphic)
    }

    /// Flat Laplace-Beltrami 4·Σ_a ∂²/∂z_a∂z_a* = Σ_a (∂_u² + ∂_v²).
    pub fn laplacian(&self) -> Result<ScalarField> {
        let mut out = ScalarField::zeros(&self.chart);
        for a in 0..self.chart.n_axes() {
            let uu = self.real_second_derivative(a, RealDir::Re)?;
            let vv = self.real_second_derivative(a, RealDir::Im)?;
            for (o, (x, y)) in
                out.values.iter_mut().zip(uu.values.iter().zip(&vv.values))
            {
                *o += x + y;
            }
        }
        Ok(out)
    }

    /// Bilinear interpolation at a complex point of a single-axis chart.
    pub fn interpolate(&self, z: C64) -> Result<C64> {
        if self.chart.n_axes() != 1 {
            return Err(CoreError::invalid(
                "interpolation implemented for single-axis charts",
            ));
        }
        let ax = &self.chart.axes[0];
        let fu = (z.re - ax.re0) / ax.d_re;
        let fv = (z.im - ax.im0) / ax.d_im;
        let eps = 1e-9;
        if fu < -eps
            || fv < -eps
            || fu > (ax.n_re - 1) as f64 + eps
            || fv > (ax.n_im - 1) as f64 + eps
        {
            return Err(CoreError::InvalidPath(format!(
                "point {z} is outside the chart window"
            )));
        }
        let iu = (fu.floor().max(0.0) as usize).min(ax.n_re - 2);
        let iv = (fv.floor().max(0.0) as usize).min(ax.n_im - 2);
        let su = (fu - iu as f64).clamp(0.0, 1.0);
        let sv = (fv - iv as f64).clamp(0.0, 1.0);
        let at = |i: usize, j: usize| self.values[self.chart.flat_index(&[i, j])];
        let f00 = at(iu, iv);
        let f10 = at(iu + 1, iv);
        let f01 = at(iu, iv + 1);
        let f11 = at(iu + 1, iv + 1);
        Ok(f00 * (1.0 - su) * (1.0 - sv)
            + f10 * su * (1.0 - sv)
            + f01 * (1.0 - su) * sv
            + f11 * su * sv)
    }
}

/// Matrix-valued samples on a chart (one dim×dim complex matrix per node).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    pub chart: CoordinateChart,
    pub dim: usize,
    pub values: Vec<ComplexMatrix>,
}

impl MatrixField {
    pub fn from_fn(
        chart: &CoordinateChart,
        dim: usize,
        f: impl Fn(&[C64]) -> ComplexMatrix,
    ) -> Self {
        let values: Vec<ComplexMatrix> = (0..chart.n_nodes())
            .map(|n| {
                let m = f(&chart.coords(n));
                assert_eq!((m.rows, m.cols), (dim, dim), "matrix field dim mismatch");
                m
            })
            .collect();
        Self { chart: chart.clone(), dim, values }
    }

    pub fn entry_field(&self, i: usize, j: usize) -> ScalarField {
        ScalarField {
            chart: self.chart.clone(),
            values: self.values.iter().map(|m| m[(i, j)]).collect(),
        }
    }

    /// Entrywise Wirtinger derivative.
    pub fn wirtinger(&self, axis: usize, kind: Wirtinger) -> Result<MatrixField> {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = self.entry_field(i, j).wirtinger(axis, kind)?;
                for (node, v) in d.values.into_iter().enumerate() {
                    out.values[node][(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn at(&self, node: usize) -> &ComplexMatrix {
        &self.values[node]
    }
}
