//! Stationary Stokes channel flow on a marker-and-cell grid.
//!
//! Domain `(0, 10) x (0, 1)` split into `nx x ny` cells. Horizontal velocity
//! lives on vertical faces, vertical velocity on horizontal faces, pressure at
//! cell centers. Boundary conditions: parabolic inflow `u = y (1 - y)` at
//! `x = 0`, no-slip on `y = 0` and `y = 1`, do-nothing outflow at `x = 10`.
//! Dirichlet faces are eliminated; their values move to the right-hand side.
//!
//! Every matrix is scaled by cell measure, so `A` approximates the bilinear
//! form `visc * (grad u, grad v)` and `B` the form `-(q, div u)`. The
//! preconditioner `"P2"` is `blkdiag(A, visc^{-1} M_p)` with `M_p` the lumped
//! pressure mass matrix.

use std::collections::BTreeMap;

use super::{identity_blocks, GeneratedProblem, ProblemInfo};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Vector};
use crate::operator::SaddleOperator;
use crate::partition::BlockPartition;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesParams {
    pub nx: usize,
    pub ny: usize,
    pub viscosity: f64,
    pub length: f64,
    pub height: f64,
}

impl StokesParams {
    pub fn new(nx: usize, ny: usize) -> Self {
        StokesParams {
            nx,
            ny,
            viscosity: 1e-3,
            length: 10.0,
            height: 1.0,
        }
    }
}

struct Grid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid {
    fn num_u(&self) -> usize {
        self.nx * self.ny
    }

    fn num_v(&self) -> usize {
        self.nx * (self.ny - 1)
    }

    /// Horizontal velocity on face `i` (1..=nx; face 0 is the inflow) of row `j`.
    fn u(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.ny + j
    }

    /// Vertical velocity in column `i` on interior face `j` (1..ny).
    fn v(&self, i: usize, j: usize) -> usize {
        self.num_u() + i * (self.ny - 1) + (j - 1)
    }

    fn cell(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }
}

/// Symmetric "graph Laplacian" assembly with Dirichlet ties.
struct Laplacian {
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
}

impl Laplacian {
    fn edge(&mut self, a: usize, b: usize, w: f64) {
        self.triplets.extend([(a, a, w), (b, b, w), (a, b, -w), (b, a, -w)]);
    }

    fn dirichlet(&mut self, a: usize, w: f64, value: f64) {
        self.triplets.push((a, a, w));
        self.rhs[a] += w * value;
    }
}

pub fn stokes_mac(params: StokesParams) -> Result<GeneratedProblem> {
    let StokesParams {
        nx,
        ny,
        viscosity: visc,
        length,
        height,
    } = params;
    if nx < 3 || ny < 3 {
        return Err(Error::InvalidInput(format!("grid too small: need nx, ny >= 3 (got {nx} x {ny})")));
    }
    if !(visc > 0.0 && length > 0.0 && height > 0.0) {
        return Err(Error::InvalidInput("viscosity and domain extents must be positive".into()));
    }
    let g = Grid {
        nx,
        ny,
        hx: length / nx as f64,
        hy: height / ny as f64,
    };
    let (hx, hy) = (g.hx, g.hy);
    let nvel = g.num_u() + g.num_v();
    let np = nx * ny;
    let inflow = |j: usize| {
        let y = (j as f64 + 0.5) * hy;
        y * (height - y)
    };

    let mut lap = Laplacian {
        triplets: Vec::new(),
        rhs: vec![0.0; nvel],
    };

    // horizontal velocity
    for i in 1..=nx {
        // the outflow face owns half a control volume
        let width = if i == nx { 0.5 * hx } else { hx };
        for j in 0..ny {
            let a = g.u(i, j);
            if i == 1 {
                lap.dirichlet(a, visc * hy / hx, inflow(j));
            }
            if i < nx {
                lap.edge(a, g.u(i + 1, j), visc * hy / hx);
            }
            if j + 1 < ny {
                lap.edge(a, g.u(i, j + 1), visc * width / hy);
            }
            if j == 0 || j == ny - 1 {
                lap.dirichlet(a, visc * width / (0.5 * hy), 0.0);
            }
        }
    }
    // vertical velocity
    for i in 0..nx {
        for j in 1..ny {
            let a = g.v(i, j);
            if j + 1 < ny {
                lap.edge(a, g.v(i, j + 1), visc * hx / hy);
            }
            if j == 1 {
                lap.dirichlet(a, visc * hx / hy, 0.0);
            }
            if j == ny - 1 {
                lap.dirichlet(a, visc * hx / hy, 0.0);
            }
            if i + 1 < nx {
                lap.edge(a, g.v(i + 1, j), visc * hy / hx);
            }
            if i == 0 {
                lap.dirichlet(a, visc * hy / (0.5 * hx), 0.0);
            }
        }
    }

    // B = -div, scaled by cell measure
    let mut b_trip = Vec::new();
    let mut f_p = vec![0.0; np];
    for i in 0..nx {
        for j in 0..ny {
            let c = g.cell(i, j);
            b_trip.push((c, g.u(i + 1, j), -hy));
            if i == 0 {
                f_p[c] -= hy * inflow(j);
            } else {
                b_trip.push((c, g.u(i, j), hy));
            }
            if j + 1 < ny {
                b_trip.push((c, g.v(i, j + 1), -hx));
            }
            if j > 0 {
                b_trip.push((c, g.v(i, j), hx));
            }
        }
    }

    let a = CsrMatrix::from_triplets(nvel, nvel, lap.triplets)?;
    let b = CsrMatrix::from_triplets(np, nvel, b_trip)?;
    let mut rhs = lap.rhs;
    rhs.extend_from_slice(&f_p);

    let partition = BlockPartition::contiguous([("u", nvel), ("p", np)])?;
    let pressure_mass = CsrMatrix::from_diagonal(&vec![hx * hy / visc; np]);
    let mut preconditioners = BTreeMap::new();
    preconditioners.insert("P1".to_string(), identity_blocks(&partition));
    preconditioners.insert("P2".to_string(), vec![a.clone(), pressure_mass]);

    Ok(GeneratedProblem {
        info: ProblemInfo {
            generator: "stokes-mac".to_string(),
            params: BTreeMap::from([
                ("nx".to_string(), nx as f64),
                ("ny".to_string(), ny as f64),
                ("viscosity".to_string(), visc),
            ]),
            seed: None,
        },
        operator: SaddleOperator::from_blocks(a, b, None)?,
        rhs: Vector::new(rhs)?,
        partition,
        preconditioners,
    })
}
