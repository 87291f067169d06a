use super::lattice::PeriodicLaminate;
use super::target::LaminateCase;
use super::tiling::{BoxDomain, Tiling};
use super::MicrostructureError;
use crate::qtensor::{from_director, lift_director, slerp_director, Director, QTensor};

/// Junction blending reaches full strength at `R` and fades out at `JUNCTION_FADE * R`.
pub const JUNCTION_FADE: f64 = 1.5;

/// Smooth, pointwise-uniaxial director field on the periodic laminate at unit
/// frequency. Inside a layer of half-width `delta` around each facet the
/// director follows the geodesic between the two adjacent cell directors;
/// near lattice vertices it is pulled to the director of cell type 1, which
/// every vertex touches.
#[derive(Debug, Clone)]
pub struct LayeredDirector {
    laminate: PeriodicLaminate,
    directors: [Director; 4],
    delta: f64,
    junction: Option<f64>,
}

impl LayeredDirector {
    pub fn new(laminate: PeriodicLaminate, delta: f64) -> Result<Self, MicrostructureError> {
        let limit = Self::max_delta(&laminate);
        if !(delta > 0.0 && delta <= limit) {
            return Err(MicrostructureError::DeltaTooLarge { delta, limit });
        }
        let mut directors = [Director::e1(); 4];
        for (k, d) in directors.iter_mut().enumerate() {
            *d = lift_director(&QTensor::from_deviatoric(*laminate.q(k + 1)))?;
        }
        let junction = match laminate.case() {
            LaminateCase::Generic => Some(delta / (0.5 * laminate.min_angle()).sin()),
            LaminateCase::Degenerate => None,
        };
        Ok(Self { laminate, directors, delta, junction })
    }

    /// Largest admissible layer half-width: half the cell inradius, and small
    /// enough that junction zones of distinct vertices stay disjoint.
    pub fn max_delta(laminate: &PeriodicLaminate) -> f64 {
        let half_in = 0.5 * laminate.inradius();
        match laminate.case() {
            LaminateCase::Generic => {
                let s = (0.5 * laminate.min_angle()).sin();
                half_in.min(laminate.vertex_spacing() * s / (2.0 * JUNCTION_FADE))
            }
            LaminateCase::Degenerate => half_in,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn laminate(&self) -> &PeriodicLaminate {
        &self.laminate
    }

    pub fn director(&self, w1: f64, w3: f64) -> Director {
        let id = self.laminate.locate(w1, w3);
        let own = self.directors[id.kind - 1];
        let p = [w1, w3];
        let facets = self.laminate.facets(id);
        let (fi, d) = facets
            .iter()
            .enumerate()
            .map(|(i, f)| (i, f.depth(p).max(0.0)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("cell has facets");
        let mut n = own;
        if d < self.delta {
            let f = facets[fi];
            let step = 1e-9 * (1.0 + w1.abs().max(w3.abs()));
            let q = [p[0] + f.normal[0] * (d + step), p[1] + f.normal[1] * (d + step)];
            let other = self.directors[self.laminate.locate(q[0], q[1]).kind - 1];
            n = slerp_director(&own, &other, (self.delta - d) / (2.0 * self.delta));
        }
        if let (Some(r_full), Some(verts)) = (self.junction, self.laminate.rhomboid(id)) {
            let r = verts.iter().map(|v| (v[0] - w1).hypot(v[1] - w3)).fold(f64::INFINITY, f64::min);
            let r_end = JUNCTION_FADE * r_full;
            if r < r_end {
                let s = ((r_end - r) / (r_end - r_full)).min(1.0);
                n = slerp_director(&n, &self.directors[0], s);
            }
        }
        n
    }

    pub fn sample(&self, w1: f64, w3: f64) -> QTensor {
        from_director(&self.director(w1, w3))
    }

    /// True when `(w1, w3)` lies outside every layer and junction zone.
    pub fn is_bulk(&self, w1: f64, w3: f64) -> bool {
        let id = self.laminate.locate(w1, w3);
        let d = self.laminate.facets(id).iter().map(|f| f.depth([w1, w3])).fold(f64::INFINITY, f64::min);
        if d < self.delta {
            return false;
        }
        match (self.junction, self.laminate.rhomboid(id)) {
            (Some(r), Some(v)) => v.iter().all(|v| (v[0] - w1).hypot(v[1] - w3) >= JUNCTION_FADE * r),
            _ => true,
        }
    }
}

/// Mollified `Q_n` restricted to the box of a tiling. `delta` is in the
/// same (eigenframe) units as the box.
#[derive(Debug, Clone)]
pub struct MollifiedField {
    inner: LayeredDirector,
    n: f64,
    domain: BoxDomain,
}

impl MollifiedField {
    pub fn sample(&self, x: [f64; 3]) -> Result<QTensor, MicrostructureError> {
        let tol = 1e-12 * self.domain.diameter().max(1.0);
        if !self.domain.contains(x, tol) {
            return Err(MicrostructureError::OutOfDomain { point: x });
        }
        Ok(self.inner.sample(x[0] * self.n, x[2] * self.n))
    }

    pub fn is_bulk(&self, x: [f64; 3]) -> bool {
        self.inner.is_bulk(x[0] * self.n, x[2] * self.n)
    }

    pub fn delta(&self) -> f64 {
        self.inner.delta() / self.n
    }
}

pub fn mollify_field(tiling: &Tiling, delta: f64) -> Result<MollifiedField, MicrostructureError> {
    let n = tiling.n as f64;
    let inner = LayeredDirector::new(tiling.laminate().clone(), delta * n).map_err(|e| match e {
        MicrostructureError::DeltaTooLarge { delta, limit } => {
            MicrostructureError::DeltaTooLarge { delta: delta / n, limit: limit / n }
        }
        other => other,
    })?;
    Ok(MollifiedField { inner, n, domain: tiling.domain })
}
