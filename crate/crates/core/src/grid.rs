//! Sampled functions on piecewise-uniform grids.
//!
//! A grid is a list of segments between mandatory breakpoints. Each segment is
//! uniformly subdivided, so every breakpoint is a node and no panel straddles
//! one. Quadrature is panel-local: every panel has its own stencil, which makes
//! cumulative integrals available at every node at the same cost as a total.
//!
//! Functions with a jump at a breakpoint keep their left limit in the node value
//! and store the right limit separately; panels of the segment starting at that
//! breakpoint read the right limit.

use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("breakpoint {0} lies outside the domain")]
    BreakpointOutsideDomain(f64),
    #[error("density must be positive and finite, got {0}")]
    InvalidDensity(f64),
    #[error("invalid domain [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error("expected plain samples, got log-amplitude samples")]
    KindMismatch,
    #[error("samples live on different grids")]
    GridMismatch,
    #[error("mirror join needs two half-line grids starting at 0")]
    NotHalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    HalfLine { x_max: f64 },
    FullLine { x_min: f64, x_max: f64 },
}

impl Domain {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::HalfLine { x_max } => (0.0, x_max),
            Domain::FullLine { x_min, x_max } => (x_min, x_max),
        }
    }
}

/// Panel quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Two-point trapezoid on every panel.
    Trapezoid,
    /// Four-point cubic interpolation per panel, one-sided at segment ends.
    Cubic,
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    lo: usize,
    hi: usize,
    h: f64,
}

/// Quadrature stencil of one panel: `weights[k]` multiplies node `first + k`.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub first: usize,
    pub len: usize,
    pub weights: [f64; 4],
    /// First node of the segment that owns the panel.
    pub seg_lo: usize,
}

impl Stencil {
    pub fn nodes(&self) -> std::ops::Range<usize> {
        self.first..self.first + self.len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    breakpoints: Vec<usize>,
    segments: Vec<Segment>,
    panel_segment: Vec<usize>,
    rule: Rule,
}

const MIN_PANELS: usize = 3;

/// Build a grid on `domain` with about `density` panels per unit length.
///
/// The domain edges are always breakpoints.
pub fn make_grid(domain: Domain, density: f64, breakpoints: &[f64]) -> Result<Grid, GridError> {
    make_grid_with_rule(domain, density, breakpoints, Rule::Cubic)
}

pub fn make_grid_with_rule(
    domain: Domain,
    density: f64,
    breakpoints: &[f64],
    rule: Rule,
) -> Result<Grid, GridError> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(GridError::InvalidDensity(density));
    }
    let (a, b) = domain.bounds();
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(GridError::InvalidDomain(a, b));
    }
    let mut cuts = vec![a, b];
    for &bp in breakpoints {
        if !(bp >= a && bp <= b) {
            return Err(GridError::BreakpointOutsideDomain(bp));
        }
        cuts.push(bp);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut nodes = vec![a];
    let mut breakpoint_idx = vec![0];
    let mut segments = Vec::with_capacity(cuts.len() - 1);
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let len = hi - lo;
        let m = ((len * density - 1e-9).ceil() as usize).max(MIN_PANELS);
        let start = nodes.len() - 1;
        for k in 1..m {
            nodes.push(lo + len * (k as f64 / m as f64));
        }
        nodes.push(hi);
        let end = nodes.len() - 1;
        breakpoint_idx.push(end);
        segments.push(Segment { lo: start, hi: end, h: len / m as f64 });
    }
    Ok(Grid::from_parts(nodes, breakpoint_idx, segments, rule))
}

impl Grid {
    fn from_parts(nodes: Vec<f64>, breakpoints: Vec<usize>, segments: Vec<Segment>, rule: Rule) -> Grid {
        let mut panel_segment = Vec::with_capacity(nodes.len().saturating_sub(1));
        for (s, seg) in segments.iter().enumerate() {
            panel_segment.extend(std::iter::repeat_n(s, seg.hi - seg.lo));
        }
        Grid { nodes, breakpoints, segments, panel_segment, rule }
    }

    /// Full-line grid whose negative half is `left` reflected through 0.
    ///
    /// Both inputs must be half-line grids. Node coordinates on the negative
    /// side are exact negations, so values computed on `left` transfer
    /// bit-exactly.
    pub fn mirror_join(left: &Grid, right: &Grid) -> Result<Grid, GridError> {
        if left.nodes[0] != 0.0 || right.nodes[0] != 0.0 {
            return Err(GridError::NotHalfLine);
        }
        let nl = left.nodes.len();
        let mut nodes: Vec<f64> = left.nodes.iter().rev().map(|x| -x).collect();
        nodes[nl - 1] = 0.0;
        nodes.extend_from_slice(&right.nodes[1..]);
        let mirror = |i: usize| nl - 1 - i;
        let mut breakpoints: Vec<usize> = left.breakpoints.iter().rev().map(|&i| mirror(i)).collect();
        breakpoints.extend(right.breakpoints.iter().skip(1).map(|&i| i + nl - 1));
        let mut segments: Vec<Segment> = left
            .segments
            .iter()
            .rev()
            .map(|s| Segment { lo: mirror(s.hi), hi: mirror(s.lo), h: s.h })
            .collect();
        segments.extend(right.segments.iter().map(|s| Segment { lo: s.lo + nl - 1, hi: s.hi + nl - 1, h: s.h }));
        Ok(Grid::from_parts(nodes, breakpoints, segments, right.rule))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_panels(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn x_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Node indices of all breakpoints, including both domain edges.
    pub fn breakpoint_indices(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn breakpoint_values(&self) -> Vec<f64> {
        self.breakpoints.iter().map(|&i| self.nodes[i]).collect()
    }

    /// Index of the node exactly equal to `x`, if any.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.total_cmp(&x)).ok()
    }

    /// Largest node index with `nodes[i] <= x`.
    pub fn locate(&self, x: f64) -> usize {
        match self.nodes.binary_search_by(|n| n.total_cmp(&x)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        }
    }

    pub fn is_breakpoint(&self, i: usize) -> bool {
        self.breakpoints.binary_search(&i).is_ok()
    }

    /// Spacing of the segment owning panel `p`.
    pub fn panel_h(&self, p: usize) -> f64 {
        self.segments[self.panel_segment[p]].h
    }

    pub fn stencil(&self, p: usize) -> Stencil {
        let seg = &self.segments[self.panel_segment[p]];
        let m = seg.hi - seg.lo;
        let k = p - seg.lo;
        let h = seg.h;
        if self.rule == Rule::Trapezoid || m < MIN_PANELS {
            return Stencil { first: p, len: 2, weights: [0.5 * h, 0.5 * h, 0.0, 0.0], seg_lo: seg.lo };
        }
        let c = h / 24.0;
        let (first, weights) = if k == 0 {
            (p, [9.0 * c, 19.0 * c, -5.0 * c, c])
        } else if k == m - 1 {
            (p - 2, [c, -5.0 * c, 19.0 * c, 9.0 * c])
        } else {
            (p - 1, [-c, 13.0 * c, 13.0 * c, -c])
        };
        Stencil { first, len: 4, weights, seg_lo: seg.lo }
    }
}

/// Which side of a breakpoint a sample describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// True when the sample at `x` belongs to the region `x < b`.
    pub fn below(self, x: f64, b: f64) -> bool {
        x < b || (x == b && self == Side::Left)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Plain,
    LogAmplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    LeftEdge,
    RightEdge,
}

/// One real value per node, plus right limits at jump nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    grid: Arc<Grid>,
    values: Vec<f64>,
    right: Vec<(usize, f64)>,
    kind: SampleKind,
}

impl Samples {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>, kind: SampleKind) -> Samples {
        assert_eq!(grid.len(), values.len(), "value count must equal node count");
        Samples { grid, values, right: Vec::new(), kind }
    }

    pub fn plain(grid: Arc<Grid>, values: Vec<f64>) -> Samples {
        Samples::new(grid, values, SampleKind::Plain)
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Samples {
        Samples::plain(grid.clone(), vec![c; grid.len()])
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Samples {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Samples::plain(grid.clone(), values)
    }

    /// Sample a function that may jump at breakpoints.
    ///
    /// Node values take `f(x, Side::Left)`; at interior breakpoints the right
    /// limit `f(x, Side::Right)` is kept when it differs.
    pub fn from_fn_sided(grid: &Arc<Grid>, kind: SampleKind, f: impl Fn(f64, Side) -> f64) -> Samples {
        let nodes = grid.nodes();
        let values: Vec<f64> = nodes.iter().map(|&x| f(x, Side::Left)).collect();
        let last = nodes.len() - 1;
        let mut right = Vec::new();
        for &i in grid.breakpoint_indices() {
            if i == last {
                continue;
            }
            let r = f(nodes[i], Side::Right);
            if r.to_bits() != values[i].to_bits() {
                right.push((i, r));
            }
        }
        Samples { grid: grid.clone(), values, right, kind }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn kind(&self) -> SampleKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Right limits stored at jump nodes.
    pub fn jumps(&self) -> &[(usize, f64)] {
        &self.right
    }

    /// Right limit at node `i` (equal to the node value where continuous).
    pub fn right_value(&self, i: usize) -> f64 {
        match self.right.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(k) => self.right[k].1,
            Err(_) => self.values[i],
        }
    }

    /// Value at stencil node `i` as seen from inside the stencil's segment.
    pub fn stencil_value(&self, st: &Stencil, i: usize) -> f64 {
        if i == st.seg_lo {
            self.right_value(i)
        } else {
            self.values[i]
        }
    }

    pub fn with_kind(mut self, kind: SampleKind) -> Samples {
        self.kind = kind;
        self
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Samples {
        Samples {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            right: self.right.iter().map(|&(i, v)| (i, f(v))).collect(),
            kind: self.kind,
        }
    }

    /// Pointwise combination; jump nodes of either operand are kept.
    pub fn zip(&self, other: &Samples, f: impl Fn(f64, f64) -> f64) -> Result<Samples, GridError> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid != other.grid {
            return Err(GridError::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        let mut keys: Vec<usize> = self.right.iter().chain(&other.right).map(|&(i, _)| i).collect();
        keys.sort_unstable();
        keys.dedup();
        let right = keys.into_iter().map(|i| (i, f(self.right_value(i), other.right_value(i)))).collect();
        Ok(Samples { grid: self.grid.clone(), values, right, kind: SampleKind::Plain })
    }

    /// Copy values from a grid with identical nodes.
    pub fn rebased(&self, grid: &Arc<Grid>) -> Result<Samples, GridError> {
        if grid.nodes() != self.grid.nodes() {
            return Err(GridError::GridMismatch);
        }
        Ok(Samples { grid: grid.clone(), ..self.clone() })
    }

    /// Linear interpolation at `x` (left limits at jump nodes).
    pub fn interpolate(&self, x: f64) -> f64 {
        let nodes = self.grid.nodes();
        let i = self.grid.locate(x).min(nodes.len() - 2);
        let t = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
        let left = if t > 0.0 { self.right_value(i) } else { self.values[i] };
        left + t * (self.values[i + 1] - left)
    }
}

/// Integral of `f` over each panel.
pub fn panel_integrals(f: &Samples) -> Result<Vec<f64>, GridError> {
    if f.kind != SampleKind::Plain {
        return Err(GridError::KindMismatch);
    }
    let grid = f.grid();
    Ok((0..grid.n_panels())
        .map(|p| {
            let st = grid.stencil(p);
            st.nodes().zip(st.weights).map(|(i, w)| w * f.stencil_value(&st, i)).sum()
        })
        .collect())
}

/// Composite quadrature over the whole grid.
pub fn integrate(f: &Samples) -> Result<f64, GridError> {
    Ok(panel_integrals(f)?.iter().sum())
}

/// Running integral from one edge; exactly zero at the origin.
pub fn cumulative_from(f: &Samples, origin: Origin) -> Result<Samples, GridError> {
    let panels = panel_integrals(f)?;
    let n = f.len();
    let mut out = vec![0.0; n];
    match origin {
        Origin::LeftEdge => {
            let mut acc = 0.0;
            for (p, v) in panels.iter().enumerate() {
                acc += v;
                out[p + 1] = acc;
            }
        }
        Origin::RightEdge => {
            let mut acc = 0.0;
            for (p, v) in panels.iter().enumerate().rev() {
                acc += v;
                out[p] = acc;
            }
        }
    }
    Ok(Samples::plain(f.grid().clone(), out))
}

/// The weighted average numerator `[F] = ∫ φ² F dx`.
pub fn bracket(f: &Samples, phi_sq: &Samples) -> Result<f64, GridError> {
    integrate(&f.zip(phi_sq, |a, b| a * b)?)
}
