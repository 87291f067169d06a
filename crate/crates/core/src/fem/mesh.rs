use super::FemError;

/// Structured triangulation of a rectangle; each grid square is split along
/// its rising diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub nodes: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

/// Per-element constants: area and gradients of the three hat functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub grad: [[f64; 2]; 3],
}

impl Mesh2D {
    pub fn rectangle(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
    ) -> Result<Self, FemError> {
        if nx == 0 || ny == 0 {
            return Err(FemError::InvalidMesh("nx and ny must be positive".into()));
        }
        if !(x_max > x_min && y_max > y_min) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(FemError::InvalidMesh("rectangle bounds must be finite and ordered".into()));
        }
        let hx = (x_max - x_min) / nx as f64;
        let hy = (y_max - y_min) / ny as f64;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([x_min + i as f64 * hx, y_min + j as f64 * hy]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny, nodes, triangles })
    }

    pub fn unit_square(n: usize) -> Result<Self, FemError> {
        Self::rectangle(0.0, 1.0, 0.0, 1.0, n, n)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn dof_count(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn h(&self) -> f64 {
        ((self.x_max - self.x_min) / self.nx as f64).max((self.y_max - self.y_min) / self.ny as f64)
    }

    pub fn geometry(&self, e: usize) -> ElementGeometry {
        let [a, b, c] = self.triangles[e];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
        let area = 0.5 * det;
        let grad = [
            [(pb[1] - pc[1]) / det, (pc[0] - pb[0]) / det],
            [(pc[1] - pa[1]) / det, (pa[0] - pc[0]) / det],
            [(pa[1] - pb[1]) / det, (pb[0] - pa[0]) / det],
        ];
        ElementGeometry { area, grad }
    }

    /// Edge midpoints of element `e`, with the local node pair of each edge.
    pub fn edge_midpoints(&self, e: usize) -> [([f64; 2], usize, usize); 3] {
        let t = self.triangles[e];
        let mid = |p: usize, q: usize| {
            let (a, b) = (self.nodes[t[p]], self.nodes[t[q]]);
            ([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])], p, q)
        };
        [mid(0, 1), mid(1, 2), mid(2, 0)]
    }

    /// Grid coordinates of node `k`.
    pub fn grid_index(&self, k: usize) -> (usize, usize) {
        (k % (self.nx + 1), k / (self.nx + 1))
    }
}

/// Two displacement components per node, interleaved `[u1, u2, u1, u2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarField {
    pub values: Vec<f64>,
}

impl PlanarField {
    pub fn zeros(mesh: &Mesh2D) -> Self {
        Self { values: vec![0.0; mesh.dof_count()] }
    }

    pub fn from_fn(mesh: &Mesh2D, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let mut values = Vec::with_capacity(mesh.dof_count());
        for p in &mesh.nodes {
            let u = f(*p);
            values.extend_from_slice(&u);
        }
        Self { values }
    }

    pub fn node(&self, k: usize) -> [f64; 2] {
        [self.values[2 * k], self.values[2 * k + 1]]
    }

    pub fn check(&self, mesh: &Mesh2D) -> Result<(), FemError> {
        if self.values.len() != mesh.dof_count() {
            return Err(FemError::MeshMismatch { expected: mesh.dof_count(), got: self.values.len() });
        }
        Ok(())
    }
}
