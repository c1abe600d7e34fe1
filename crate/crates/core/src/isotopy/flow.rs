use super::{DiffeoPath, GeneratorPath, PathSource};
use crate::error::{Error, Result};
use crate::grid::{Displacement, TorusGrid, VectorFieldField};
use crate::interp::{time_weights, Interpolation, Stencil};
use crate::par;

/// Per-substep displacement limit in grid cells.
const CFL_CELLS: f64 = 5.0;

/// A time-dependent velocity field on the torus.
pub trait FlowField: Sync {
    fn velocity(&self, t: f64, x: f64, y: f64) -> (f64, f64);
}

impl<F> FlowField for F
where
    F: Fn(f64, f64, f64) -> (f64, f64) + Sync,
{
    fn velocity(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        self(t, x, y)
    }
}

/// The field `X_t` of a generator path, interpolated in space and in time.
/// Values are stored node-major so that one stencil point touches a
/// single run of memory across the time window.
pub struct GeneratorFlow {
    grid: TorusGrid,
    scheme: Interpolation,
    samples: usize,
    /// `data[(node * (samples + 1) + k) * 2 + c]`
    data: Vec<f64>,
    /// Per-sample velocity when every sample is spatially constant.
    uniform: Option<Vec<(f64, f64)>>,
}

impl GeneratorFlow {
    pub fn new(gen: &GeneratorPath, scheme: Interpolation) -> Self {
        let fields = par::map_range(gen.samples() + 1, |k| gen.velocity(k));
        Self::pack(gen.grid(), scheme, &fields)
    }

    /// Flow of vector fields sampled at `fields.len()` uniform times.
    pub fn from_fields(fields: &[VectorFieldField], scheme: Interpolation) -> Result<Self> {
        if fields.len() < 4 {
            return Err(Error::InvalidArgument(
                "need at least 4 time samples".into(),
            ));
        }
        let grid = fields[0].grid;
        if fields.iter().any(|f| f.grid != grid) {
            return Err(Error::Mismatch("vector fields on different grids".into()));
        }
        Ok(Self::pack(grid, scheme, fields))
    }

    fn pack(grid: TorusGrid, scheme: Interpolation, fields: &[VectorFieldField]) -> Self {
        let stride = fields.len();
        let mut data = vec![0.0; grid.len() * stride * 2];
        for (k, f) in fields.iter().enumerate() {
            for i in 0..grid.len() {
                data[(i * stride + k) * 2] = f.vx[i];
                data[(i * stride + k) * 2 + 1] = f.vy[i];
            }
        }
        let constant = |v: &[f64]| v.iter().all(|x| *x == v[0]);
        let uniform = fields
            .iter()
            .all(|f| constant(&f.vx) && constant(&f.vy))
            .then(|| fields.iter().map(|f| (f.vx[0], f.vy[0])).collect());
        Self {
            grid,
            scheme,
            samples: stride - 1,
            data,
            uniform,
        }
    }
}

impl FlowField for GeneratorFlow {
    fn velocity(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        let (s, w) = time_weights(t, self.samples);
        if let Some(u) = &self.uniform {
            return (0..4).fold((0.0, 0.0), |(a, b), m| {
                (a + w[m] * u[s + m].0, b + w[m] * u[s + m].1)
            });
        }
        let st = Stencil::new(self.grid, self.scheme, x, y);
        let stride = self.samples + 1;
        let mut u = 0.0;
        let mut v = 0.0;
        for (idx, wn) in st.points() {
            let base = (idx * stride + s) * 2;
            let d = &self.data[base..base + 8];
            let a = w[0] * d[0] + w[1] * d[2] + w[2] * d[4] + w[3] * d[6];
            let b = w[0] * d[1] + w[1] * d[3] + w[2] * d[5] + w[3] * d[7];
            u += wn * a;
            v += wn * b;
        }
        (u, v)
    }
}

/// Classical RK4 on every node trajectory, `substeps` steps per sample
/// interval, recording the unreduced displacement at each sample time.
pub fn integrate_flow<F: FlowField>(
    field: &F,
    grid: TorusGrid,
    samples: usize,
    substeps: usize,
) -> Result<DiffeoPath> {
    if substeps == 0 {
        return Err(Error::InvalidArgument("substeps must be >= 1".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let steps = samples * substeps;
    let dt = 1.0 / steps as f64;
    let limit = CFL_CELLS * grid.spacing();
    let traj = par::map_range(
        grid.len(),
        |idx| -> std::result::Result<Vec<(f64, f64)>, f64> {
            let (x0, y0) = grid.coords(idx);
            let (mut x, mut y) = (x0, y0);
            let mut out = Vec::with_capacity(samples + 1);
            out.push((0.0, 0.0));
            for s in 0..steps {
                let t = s as f64 * dt;
                let k1 = field.velocity(t, x, y);
                let k2 = field.velocity(t + 0.5 * dt, x + 0.5 * dt * k1.0, y + 0.5 * dt * k1.1);
                let k3 = field.velocity(t + 0.5 * dt, x + 0.5 * dt * k2.0, y + 0.5 * dt * k2.1);
                let k4 = field.velocity(t + dt, x + dt * k3.0, y + dt * k3.1);
                let ddx = dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                let ddy = dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                let step = ddx.abs().max(ddy.abs());
                if !(step <= limit) {
                    return Err(step);
                }
                x += ddx;
                y += ddy;
                if (s + 1) % substeps == 0 {
                    out.push((x - x0, y - y0));
                }
            }
            Ok(out)
        },
    );
    let mut disp: Vec<Displacement> = (0..=samples)
        .map(|_| Displacement::identity(grid))
        .collect();
    for (idx, tr) in traj.into_iter().enumerate() {
        let tr = tr.map_err(|step| Error::TimeStepTooLarge { step, limit })?;
        for (k, (dx, dy)) in tr.into_iter().enumerate() {
            disp[k].dx[idx] = dx;
            disp[k].dy[idx] = dy;
        }
    }
    DiffeoPath::new(disp, PathSource::Integrated)
}

/// Flow of `X_t = sharp(dU_t + H_t)` with cubic spatial interpolation.
pub fn integrate_generator(gen: &GeneratorPath, substeps: usize) -> Result<DiffeoPath> {
    integrate_generator_with(gen, substeps, Interpolation::Cubic)
}

pub fn integrate_generator_with(
    gen: &GeneratorPath,
    substeps: usize,
    scheme: Interpolation,
) -> Result<DiffeoPath> {
    let flow = GeneratorFlow::new(gen, scheme);
    integrate_flow(&flow, gen.grid(), gen.samples(), substeps)
}
