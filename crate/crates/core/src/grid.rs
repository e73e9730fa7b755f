//! Structured grids: the exact cracked period cell and 1-D intervals for the
//! homogenized models.
//!
//! The cracked cell covers `[-1, 1] x [-eps/2, eps/2]` with uniform cells.
//! The notch `{-1 < x < 0, |y| < alpha*eps/2}` is carved out by deactivating
//! cells, so its walls and bottom must coincide with cell faces.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParamSet;

/// Boundary tags. `Left`/`Right` are the two ends of an interval grid; the
/// remaining tags live on the cracked cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceTag {
    /// `x = 1`.
    Gamma0,
    /// `x = -1`, material part.
    Gamma1,
    /// Crack walls `y = ±alpha*eps/2`, `-1 < x < 0`.
    GammaAlpha,
    /// Crack bottom `x = 0`, `|y| < alpha*eps/2`.
    GammaBeta,
    Left,
    Right,
}

impl fmt::Display for FaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FaceTag::Gamma0 => "gamma0",
            FaceTag::Gamma1 => "gamma1",
            FaceTag::GammaAlpha => "gamma_alpha",
            FaceTag::GammaBeta => "gamma_beta",
            FaceTag::Left => "left",
            FaceTag::Right => "right",
        };
        f.write_str(s)
    }
}

/// A boundary face of the active region.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFace {
    /// Index of the adjacent active cell.
    pub cell: usize,
    pub tag: FaceTag,
    /// Face length (1 for interval ends, per unit transverse width).
    pub measure: f64,
    /// Outward unit normal `(nx, ny)`.
    pub normal: [f64; 2],
    /// Distance from the adjacent cell center to the face.
    pub half_width: f64,
    /// Extent of the face along x (degenerate for vertical faces).
    pub x_range: (f64, f64),
}

/// Two-point flux coupling between active cells `a` and `b`:
/// flux from `b` into `a` is `trans * (u_b - u_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub a: usize,
    pub b: usize,
    pub trans: f64,
}

/// Uniform grid on the cracked period cell with tagged boundary faces.
#[derive(Debug, Clone, PartialEq)]
pub struct CrackedGrid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    epsilon: f64,
    alpha: f64,
    /// Number of notch rows on each side of `y = 0`.
    notch_rows: usize,
    /// `(i, j) -> active index`, stored at `i + nx * j`.
    index: Vec<Option<usize>>,
    /// Active index -> `(i, j)`.
    cells: Vec<(usize, usize)>,
    faces: Vec<BoundaryFace>,
    connections: Vec<Connection>,
    periodic_pairs: usize,
}

impl CrackedGrid {
    /// Builds the grid; requires `nx` even and `alpha*ny/2` an integer with
    /// `ny` even so that the crack walls and bottom fall on cell faces.
    pub fn new(params: &ParamSet, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::EmptyGrid);
        }
        if nx % 2 != 0 {
            return Err(Error::Alignment(format!(
                "nx = {nx} must be even so that x = 0 is a face"
            )));
        }
        if ny % 2 != 0 {
            return Err(Error::Alignment(format!("ny = {ny} must be even")));
        }
        let alpha = params.alpha();
        let half = alpha * ny as f64 / 2.0;
        let notch_rows = half.round();
        if (half - notch_rows).abs() > 1e-9 {
            return Err(Error::Alignment(format!(
                "alpha * ny / 2 = {half} is not an integer (alpha = {alpha}, ny = {ny})"
            )));
        }
        let notch_rows = notch_rows as usize;
        let epsilon = params.epsilon();
        let hx = 2.0 / nx as f64;
        let hy = epsilon / ny as f64;
        let mid = ny / 2;
        let in_notch = |i: usize, j: usize| i < nx / 2 && j + notch_rows >= mid && j < mid + notch_rows;

        let mut index = vec![None; nx * ny];
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                if !in_notch(i, j) {
                    index[i + nx * j] = Some(cells.len());
                    cells.push((i, j));
                }
            }
        }

        let mut faces = Vec::new();
        let mut connections = Vec::new();
        let mut periodic_pairs = 0;
        let x_face = |i: usize| -1.0 + i as f64 * hx;
        for (c, &(i, j)) in cells.iter().enumerate() {
            // west
            if i == 0 {
                faces.push(BoundaryFace {
                    cell: c,
                    tag: FaceTag::Gamma1,
                    measure: hy,
                    normal: [-1.0, 0.0],
                    half_width: 0.5 * hx,
                    x_range: (-1.0, -1.0),
                });
            } else if in_notch(i - 1, j) {
                faces.push(BoundaryFace {
                    cell: c,
                    tag: FaceTag::GammaBeta,
                    measure: hy,
                    normal: [-1.0, 0.0],
                    half_width: 0.5 * hx,
                    x_range: (0.0, 0.0),
                });
            }
            // east
            if i + 1 == nx {
                faces.push(BoundaryFace {
                    cell: c,
                    tag: FaceTag::Gamma0,
                    measure: hy,
                    normal: [1.0, 0.0],
                    half_width: 0.5 * hx,
                    x_range: (1.0, 1.0),
                });
            } else if let Some(e) = index[i + 1 + nx * j] {
                connections.push(Connection {
                    a: c,
                    b: e,
                    trans: hy / hx,
                });
            }
            // south (crack wall above the notch)
            if j > 0 && in_notch(i, j - 1) {
                faces.push(BoundaryFace {
                    cell: c,
                    tag: FaceTag::GammaAlpha,
                    measure: hx,
                    normal: [0.0, -1.0],
                    half_width: 0.5 * hy,
                    x_range: (x_face(i), x_face(i + 1)),
                });
            }
            // north, with periodic wrap
            let jn = (j + 1) % ny;
            if in_notch(i, jn) {
                faces.push(BoundaryFace {
                    cell: c,
                    tag: FaceTag::GammaAlpha,
                    measure: hx,
                    normal: [0.0, 1.0],
                    half_width: 0.5 * hy,
                    x_range: (x_face(i), x_face(i + 1)),
                });
            } else if let Some(n) = index[i + nx * jn] {
                // with ny == 1 the wrap would couple a cell to itself
                if n != c {
                    connections.push(Connection {
                        a: c,
                        b: n,
                        trans: hx / hy,
                    });
                    if jn == 0 {
                        periodic_pairs += 1;
                    }
                }
            }
        }

        Ok(Self {
            nx,
            ny,
            hx,
            hy,
            epsilon,
            alpha,
            notch_rows,
            index,
            cells,
            faces,
            connections,
            periodic_pairs,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn notch_rows(&self) -> usize {
        self.notch_rows
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn active_count(&self) -> usize {
        self.cells.len()
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.index[i + self.nx * j].is_some()
    }

    pub fn active_index(&self, i: usize, j: usize) -> Option<usize> {
        self.index[i + self.nx * j]
    }

    /// `(i, j)` of each active cell, in active order.
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn x_center(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * self.hx
    }

    pub fn y_center(&self, j: usize) -> f64 {
        -0.5 * self.epsilon + (j as f64 + 0.5) * self.hy
    }

    pub fn center(&self, cell: usize) -> (f64, f64) {
        let (i, j) = self.cells[cell];
        (self.x_center(i), self.y_center(j))
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.faces
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn periodic_pairs(&self) -> usize {
        self.periodic_pairs
    }

    pub fn tag_measure(&self, tag: FaceTag) -> f64 {
        self.faces.iter().filter(|f| f.tag == tag).map(|f| f.measure).sum()
    }

    pub fn active_area(&self) -> f64 {
        self.cells.len() as f64 * self.cell_area()
    }

    /// Active cells of column `i`, in increasing `j`.
    pub fn column(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.ny).filter_map(move |j| self.index[i + self.nx * j])
    }

    pub fn summary(&self) -> GridSummary {
        let mut measures = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for f in &self.faces {
            *measures.entry(f.tag).or_insert(0.0) += f.measure;
            *counts.entry(f.tag).or_insert(0usize) += 1;
        }
        GridSummary {
            nx: self.nx,
            ny: self.ny,
            hx: self.hx,
            hy: self.hy,
            epsilon: self.epsilon,
            alpha: self.alpha,
            notch_rows: self.notch_rows,
            active_cells: self.cells.len(),
            active_area: self.active_area(),
            tag_measures: measures,
            tag_counts: counts,
            periodic_pairs: self.periodic_pairs,
        }
    }
}

/// JSON-exportable description of a cracked grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub epsilon: f64,
    pub alpha: f64,
    pub notch_rows: usize,
    pub active_cells: usize,
    pub active_area: f64,
    pub tag_measures: BTreeMap<FaceTag, f64>,
    pub tag_counts: BTreeMap<FaceTag, usize>,
    pub periodic_pairs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    /// Unknowns at cell centers (finite volumes).
    CellCentered,
    /// Unknowns at vertices (P1 finite elements).
    VertexP1,
}

/// Uniform 1-D grid on `(a, b)` with `n` cells/elements.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalGrid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    layout: Layout,
}

impl IntervalGrid {
    /// When `0 ∈ (a, b)` the origin must land on a face/vertex.
    pub fn new(a: f64, b: f64, n: usize, layout: Layout) -> Result<Self> {
        if !(a < b) || n < 2 || !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateInterval { a, b, n });
        }
        let h = (b - a) / n as f64;
        if a < 0.0 && b > 0.0 {
            let k = -a / h;
            if (k - k.round()).abs() > 1e-9 {
                return Err(Error::OddCellCount { a, b, n });
            }
        }
        Ok(Self { a, b, n, h, layout })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Number of unknowns for the layout.
    pub fn dof_count(&self) -> usize {
        match self.layout {
            Layout::CellCentered => self.n,
            Layout::VertexP1 => self.n + 1,
        }
    }

    /// Coordinates of the unknowns.
    pub fn nodes(&self) -> Vec<f64> {
        match self.layout {
            Layout::CellCentered => (0..self.n).map(|i| self.a + (i as f64 + 0.5) * self.h).collect(),
            Layout::VertexP1 => (0..=self.n).map(|i| self.a + i as f64 * self.h).collect(),
        }
    }

    /// Index of the vertex at `x`, if `x` is a vertex.
    pub fn vertex_index(&self, x: f64) -> Option<usize> {
        let k = (x - self.a) / self.h;
        let r = k.round();
        ((k - r).abs() < 1e-9 && r >= 0.0 && r <= self.n as f64).then_some(r as usize)
    }

    /// End face for cell-centered layouts.
    pub fn end_face(&self, tag: FaceTag) -> Result<BoundaryFace> {
        if self.layout != Layout::CellCentered {
            return Err(Error::NotBoundaryFace(format!("{tag} (vertex layout has no faces)")));
        }
        match tag {
            FaceTag::Left => Ok(BoundaryFace {
                cell: 0,
                tag,
                measure: 1.0,
                normal: [-1.0, 0.0],
                half_width: 0.5 * self.h,
                x_range: (self.a, self.a),
            }),
            FaceTag::Right => Ok(BoundaryFace {
                cell: self.n - 1,
                tag,
                measure: 1.0,
                normal: [1.0, 0.0],
                half_width: 0.5 * self.h,
                x_range: (self.b, self.b),
            }),
            other => Err(Error::NotBoundaryFace(other.to_string())),
        }
    }

    pub fn boundary_faces(&self) -> Vec<BoundaryFace> {
        [FaceTag::Left, FaceTag::Right]
            .into_iter()
            .filter_map(|t| self.end_face(t).ok())
            .collect()
    }

    pub fn connections(&self) -> Vec<Connection> {
        (0..self.n.saturating_sub(1))
            .map(|i| Connection {
                a: i,
                b: i + 1,
                trans: 1.0 / self.h,
            })
            .collect()
    }
}
