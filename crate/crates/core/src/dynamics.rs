//! Mean dynamics under vacuum noise: `d⟨x⟩/dt = A₀ + A⟨x⟩` and the mean
//! output integrands `(C₁⟨x⟩; C₂⟨x⟩)`.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg::RVector;
use crate::realization::QsdeSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per grid point.
    pub states: Array2<f64>,
    /// One row per grid point, `2 n_w` columns.
    pub outputs: Array2<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> ArrayView1<'_, f64> {
        self.states.row(self.states.nrows() - 1)
    }

    /// Writes `t,x1..xs,y1..y2nw`, one row per grid point. Floats use the
    /// shortest representation that parses back to the same value.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let s = self.states.ncols();
        let m = self.outputs.ncols();
        let header = std::iter::once("t".to_string())
            .chain((1..=s).map(|i| format!("x{i}")))
            .chain((1..=m).map(|i| format!("y{i}")));
        out.write_record(header).map_err(io_err)?;
        for (i, t) in self.times.iter().enumerate() {
            let row = std::iter::once(t)
                .chain(self.states.row(i))
                .chain(self.outputs.row(i))
                .map(|v| v.to_string());
            out.write_record(row).map_err(io_err)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finite(what: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidIntegration(format!(
            "{what} is not finite ({v})"
        )));
    }
    Ok(())
}

/// Grid `0, h, 2h, …, T` with the last step shortened to land on `T`.
fn time_grid(t_end: f64, h: f64) -> Vec<f64> {
    let ratio = t_end / h;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    };
    let mut times: Vec<f64> = (0..steps).map(|i| i as f64 * h).collect();
    times.push(t_end);
    times
}

/// Integrates the mean dynamics with classical fixed-step RK4.
pub fn mean_trajectory(
    sys: &QsdeSystem,
    x0: ArrayView1<f64>,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    sys.validate()?;
    let s = sys.s();
    if x0.len() != s {
        return Err(Error::dims("initial state", s, x0.len()));
    }
    finite("T", t_end)?;
    finite("h", h)?;
    if h <= 0.0 {
        return Err(Error::InvalidIntegration(format!(
            "step h must be positive, got {h}"
        )));
    }
    if t_end < 0.0 {
        return Err(Error::InvalidIntegration(format!(
            "final time T must be non-negative, got {t_end}"
        )));
    }
    for (i, v) in x0.iter().enumerate() {
        finite(&format!("x0[{}]", i + 1), *v)?;
    }
    for v in sys.a0.iter().chain(sys.a.iter()) {
        finite("drift coefficient", *v)?;
    }

    let times = time_grid(t_end, h);
    let f = |x: &RVector| -> RVector { &sys.a0 + &sys.a.dot(x) };
    let mut states = Array2::zeros((times.len(), s));
    let mut x = x0.to_owned();
    states.row_mut(0).assign(&x);
    for (i, w) in times.windows(2).enumerate() {
        let dt = w[1] - w[0];
        let k1 = f(&x);
        let k2 = f(&(&x + &(&k1 * (dt / 2.0))));
        let k3 = f(&(&x + &(&k2 * (dt / 2.0))));
        let k4 = f(&(&x + &(&k3 * dt)));
        x = &x + &((k1 + &k2 * 2.0 + &k3 * 2.0 + k4) * (dt / 6.0));
        states.row_mut(i + 1).assign(&x);
    }
    let outputs = output_means(sys, states.view())?;
    Ok(Trajectory {
        times,
        states,
        outputs,
    })
}

/// `(C₁⟨x⟩; C₂⟨x⟩)` for each row of `states`.
pub fn output_means(sys: &QsdeSystem, states: ArrayView2<f64>) -> Result<Array2<f64>> {
    sys.validate()?;
    if states.ncols() != sys.s() {
        return Err(Error::dims("state columns", sys.s(), states.ncols()));
    }
    let n_w = sys.n_w();
    let mut out = Array2::zeros((states.nrows(), 2 * n_w));
    for (i, x) in states.rows().into_iter().enumerate() {
        let y1: Array1<f64> = sys.c1.dot(&x);
        let y2: Array1<f64> = sys.c2.dot(&x);
        let mut row = out.row_mut(i);
        row.slice_mut(ndarray::s![..n_w]).assign(&y1);
        row.slice_mut(ndarray::s![n_w..]).assign(&y2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::closed_system;
    use ndarray::array;

    fn rotation() -> QsdeSystem {
        closed_system(
            2,
            array![[0.0, -2.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 0.0]].view(),
        )
    }

    #[test]
    fn zero_drift_is_constant() {
        let sys = closed_system(2, Array2::zeros((3, 3)).view());
        let x0 = array![0.3, -0.4, 0.5];
        let traj = mean_trajectory(&sys, x0.view(), 1.0, 0.1).unwrap();
        assert_eq!(traj.len(), 11);
        for row in traj.states.rows() {
            assert_eq!(row, x0);
        }
        assert_eq!(traj.outputs.ncols(), 0);
    }

    #[test]
    fn grid_lands_on_final_time() {
        let g = time_grid(1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(time_grid(0.0, 0.1), vec![0.0]);
        assert_eq!(time_grid(10.0, 1e-3).len(), 10_001);
    }

    #[test]
    fn rotation_matches_closed_form() {
        let traj = mean_trajectory(&rotation(), array![1.0, 0.0, 0.0].view(), 2.0, 1e-3).unwrap();
        for (t, x) in traj.times.iter().zip(traj.states.rows()) {
            assert!((x[0] - (2.0 * t).cos()).abs() < 1e-10);
            assert!((x[1] - (2.0 * t).sin()).abs() < 1e-10);
            assert_eq!(x[2], 0.0);
        }
    }

    #[test]
    fn halving_step_reduces_error_by_order_four() {
        let err = |h: f64| {
            let traj = mean_trajectory(&rotation(), array![1.0, 0.0, 0.0].view(), 1.0, h).unwrap();
            let x = traj.final_state();
            ((x[0] - 2f64.cos()).powi(2) + (x[1] - 2f64.sin()).powi(2)).sqrt()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio >= 8.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let sys = rotation();
        let x0 = array![1.0, 0.0, 0.0];
        for (t, h) in [
            (1.0, 0.0),
            (1.0, -0.1),
            (-1.0, 0.1),
            (f64::NAN, 0.1),
            (1.0, f64::INFINITY),
        ] {
            assert!(matches!(
                mean_trajectory(&sys, x0.view(), t, h),
                Err(Error::InvalidIntegration(_))
            ));
        }
        let bad = array![f64::NAN, 0.0, 0.0];
        assert!(mean_trajectory(&sys, bad.view(), 1.0, 0.1).is_err());
        assert!(mean_trajectory(&sys, array![1.0, 0.0].view(), 1.0, 0.1).is_err());
    }

    #[test]
    fn outputs_follow_output_matrices() {
        let mut sys = rotation();
        sys.b1 = vec![Array2::zeros((3, 3))];
        sys.b2 = vec![Array2::zeros((3, 3))];
        sys.c1 = array![[1.0, 0.0, 0.0]];
        sys.c2 = array![[0.0, 1.0, 0.0]];
        let traj = mean_trajectory(&sys, array![1.0, 0.0, 0.0].view(), 0.5, 0.01).unwrap();
        for (x, y) in traj.states.rows().into_iter().zip(traj.outputs.rows()) {
            assert_eq!(y[0], x[0]);
            assert_eq!(y[1], x[1]);
        }
        assert!(output_means(&sys, Array2::zeros((2, 8)).view()).is_err());
    }

    #[test]
    fn csv_round_trips() {
        let traj = mean_trajectory(&rotation(), array![1.0, 0.0, 0.0].view(), 0.3, 0.1).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,x2,x3");
        for (i, line) in lines.enumerate() {
            let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(vals[0], traj.times[i]);
            assert_eq!(vals[1..], traj.states.row(i).to_vec()[..]);
        }
    }
}
