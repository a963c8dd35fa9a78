//! Perturbation-space exploration: sample a parameter box on a regular
//! grid, simulate each point, monitor robustness of the resulting
//! trajectory, then adaptively subdivide between points of opposite
//! robustness sign and around points of low absolute robustness, where the
//! satisfaction boundary lies.

mod export;

pub use export::{export, write_csv, write_svg};

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::Formula;
use crate::monitor::monitor;
use crate::odesim::{integrate, OdeModel, SimError};
use crate::rewrite;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("horizon {horizon} is shorter than the formula's necessary input length {required}")]
    HorizonTooShort { required: f64, horizon: f64 },
    #[error("axis `{name}`: invalid range [{lo}, {hi}] (need lo < hi, both finite)")]
    InvalidRange { name: String, lo: f64, hi: f64 },
    #[error("axis `{name}`: grid resolution must be at least 2")]
    BadResolution { name: String },
    #[error("axis `{name}` is not a parameter of model `{model}`")]
    UnknownAxis { name: String, model: String },
    #[error("refinement cap {0} exceeds the supported maximum of 32")]
    CapTooLarge(usize),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One swept parameter: a closed range with an initial grid resolution
/// (number of grid points along the axis, endpoints included).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamAxis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub resolution: usize,
}

/// The box of parameter perturbations to explore, with the refinement
/// budget and trigger threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpace {
    pub axes: Vec<ParamAxis>,
    /// Number of subdivision iterations after the initial grid.
    pub refine_cap: usize,
    /// Points with `|robustness|` below this spawn midpoints towards their
    /// neighbours. `None` picks 10% of the initial grid's median finite
    /// absolute robustness.
    pub threshold: Option<f64>,
}

/// Simulation settings shared by every sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    pub init: Vec<f64>,
    /// Values for parameters that are not swept.
    pub base_params: Vec<f64>,
    pub step: f64,
    pub horizon: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub workers: usize,
    /// Report per-iteration progress on standard error.
    pub progress: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            progress: false,
        }
    }
}

/// One evaluated parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Values of the swept parameters, aligned with [`SweepResult::axes`].
    pub params: Vec<f64>,
    /// NaN when the simulation failed at this point.
    pub robustness: f64,
    /// `robustness > 0`; zero robustness decides nothing and is recorded
    /// unsatisfied with a warning.
    pub satisfied: bool,
    /// Refinement iteration that created the point (0 = initial grid).
    pub depth: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Names of the swept axes, in column order.
    pub axes: Vec<String>,
    /// Points sorted by their coordinates along the axes.
    pub points: Vec<SweepPoint>,
    pub formula: String,
    pub optimized_formula: String,
    pub formula_size: usize,
    /// Samples per simulated trajectory.
    pub points_per_trajectory: usize,
    /// Effective refinement threshold.
    pub threshold: f64,
    pub elapsed: Duration,
    pub warnings: Vec<String>,
}

impl SweepResult {
    pub fn positive_count(&self) -> usize {
        self.points.iter().filter(|p| p.satisfied).count()
    }

    pub fn negative_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.robustness < 0.0)
            .count()
    }
}

/// Integer lattice coordinates of a point; axis `k` uses units of
/// `(hi - lo) / ((resolution - 1) * 2^cap)` so every midpoint stays on the
/// lattice.
type Coords = Vec<u64>;

struct Lattice {
    axes: Vec<ParamAxis>,
    /// Lattice units per axis: (resolution - 1) << cap.
    units: Vec<u64>,
    /// Position of each axis in the model's parameter vector.
    positions: Vec<usize>,
    base_params: Vec<f64>,
}

impl Lattice {
    /// Values of the swept axes at a lattice point.
    fn axis_values(&self, coords: &Coords) -> Vec<f64> {
        self.axes
            .iter()
            .zip(coords)
            .zip(&self.units)
            .map(|((axis, &c), &unit)| axis.lo + (axis.hi - axis.lo) * (c as f64 / unit as f64))
            .collect()
    }

    /// Full model parameter vector: base values with the swept axes
    /// overridden.
    fn params(&self, coords: &Coords) -> Vec<f64> {
        let mut params = self.base_params.clone();
        for (k, value) in self.axis_values(coords).into_iter().enumerate() {
            params[self.positions[k]] = value;
        }
        params
    }
}

/// Runs the sweep: optimizes the formula, evaluates the initial grid, then
/// refines up to the iteration cap. Simulation failures are recorded on the
/// affected points and the sweep continues.
pub fn run_sweep(
    model: &OdeModel,
    space: &PerturbationSpace,
    phi: &Formula,
    sim: &SimSettings,
    options: &SweepOptions,
) -> Result<SweepResult, SweepError> {
    let started = Instant::now();
    let required = phi.necessary_length();
    if sim.horizon < required {
        return Err(SweepError::HorizonTooShort {
            required,
            horizon: sim.horizon,
        });
    }
    if space.refine_cap > 32 {
        return Err(SweepError::CapTooLarge(space.refine_cap));
    }
    let mut positions = Vec::new();
    for axis in &space.axes {
        if !(axis.lo.is_finite() && axis.hi.is_finite() && axis.lo < axis.hi) {
            return Err(SweepError::InvalidRange {
                name: axis.name.clone(),
                lo: axis.lo,
                hi: axis.hi,
            });
        }
        if axis.resolution < 2 {
            return Err(SweepError::BadResolution {
                name: axis.name.clone(),
            });
        }
        let position = model
            .param_names()
            .iter()
            .position(|n| *n == axis.name)
            .ok_or_else(|| SweepError::UnknownAxis {
                name: axis.name.clone(),
                model: model.name().to_string(),
            })?;
        positions.push(position);
    }

    let optimized = rewrite::optimize(phi).output;

    let lattice = Lattice {
        axes: space.axes.clone(),
        units: space
            .axes
            .iter()
            .map(|a| ((a.resolution - 1) as u64) << space.refine_cap)
            .collect(),
        positions,
        base_params: sim.base_params.clone(),
    };
    let spacing: Vec<u64> = space.axes.iter().map(|_| 1u64 << space.refine_cap).collect();

    // Initial grid: every coordinate combination, plus grid-neighbour pairs
    // along each axis.
    let mut grid_coords: Vec<Coords> = vec![Vec::new()];
    for (k, axis) in space.axes.iter().enumerate() {
        let mut extended = Vec::with_capacity(grid_coords.len() * axis.resolution);
        for prefix in &grid_coords {
            for step in 0..axis.resolution {
                let mut coords = prefix.clone();
                coords.push(step as u64 * spacing[k]);
                extended.push(coords);
            }
        }
        grid_coords = extended;
    }
    let mut pairs: BTreeSet<(Coords, Coords)> = BTreeSet::new();
    for coords in &grid_coords {
        for k in 0..space.axes.len() {
            if coords[k] + spacing[k] <= lattice.units[k] {
                let mut other = coords.clone();
                other[k] += spacing[k];
                pairs.insert((coords.clone(), other));
            }
        }
    }

    let evaluate = |coords_batch: &[Coords]| -> Vec<(f64, Option<String>)> {
        let jobs: Vec<Vec<f64>> = coords_batch.iter().map(|c| lattice.params(c)).collect();
        parallel_map(&jobs, options.workers.max(1), |params| {
            let trajectory = integrate(model, &sim.init, params, sim.step, sim.horizon)
                .map_err(|e| e.to_string())?;
            monitor(&optimized, &trajectory).map_err(|e| e.to_string())
        })
        .into_iter()
        .map(|r| match r {
            Ok(value) => (value, None),
            Err(message) => (f64::NAN, Some(message)),
        })
        .collect()
    };

    let mut records: BTreeMap<Coords, (f64, Option<String>, usize)> = BTreeMap::new();
    let initial = evaluate(&grid_coords);
    for (coords, (value, error)) in grid_coords.iter().cloned().zip(initial) {
        records.insert(coords, (value, error, 0));
    }
    if options.progress {
        eprintln!("sweep: initial grid of {} points evaluated", records.len());
    }

    let threshold = space.threshold.unwrap_or_else(|| {
        let mut magnitudes: Vec<f64> = records
            .values()
            .filter(|(v, _, _)| v.is_finite())
            .map(|(v, _, _)| v.abs())
            .collect();
        if magnitudes.is_empty() {
            return 0.0;
        }
        magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = magnitudes.len() / 2;
        let median = if magnitudes.len() % 2 == 1 {
            magnitudes[mid]
        } else {
            0.5 * (magnitudes[mid - 1] + magnitudes[mid])
        };
        0.1 * median
    });

    for depth in 1..=space.refine_cap {
        let mut split: Vec<(Coords, Coords)> = Vec::new();
        for (a, b) in &pairs {
            let (ra, _, _) = records[a];
            let (rb, _, _) = records[b];
            // NaN (failed simulation) triggers nothing
            let sign_change = ra * rb < 0.0;
            let low = ra.abs() < threshold || rb.abs() < threshold;
            if sign_change || low {
                split.push((a.clone(), b.clone()));
            }
        }
        let mut fresh: BTreeSet<Coords> = BTreeSet::new();
        let mut splittable = Vec::new();
        for (a, b) in split {
            let mid: Coords = a.iter().zip(&b).map(|(x, y)| (x + y) / 2).collect();
            if mid == a || mid == b {
                continue; // lattice exhausted along this pair
            }
            if !records.contains_key(&mid) {
                fresh.insert(mid.clone());
            }
            splittable.push((a, b, mid));
        }
        if splittable.is_empty() {
            break;
        }
        for (a, b, mid) in &splittable {
            pairs.remove(&(a.clone(), b.clone()));
            pairs.insert((a.clone(), mid.clone()));
            pairs.insert((mid.clone(), b.clone()));
        }
        let fresh: Vec<Coords> = fresh.into_iter().collect();
        let evaluated = evaluate(&fresh);
        for (coords, (value, error)) in fresh.iter().cloned().zip(evaluated) {
            records.insert(coords, (value, error, depth));
        }
        if options.progress {
            eprintln!(
                "sweep: refinement {depth} added {} points ({} total)",
                fresh.len(),
                records.len()
            );
        }
    }

    let mut warnings = Vec::new();
    let points: Vec<SweepPoint> = records
        .iter()
        .map(|(coords, (value, error, depth))| {
            let params = lattice.axis_values(coords);
            if *value == 0.0 {
                warnings.push(format!(
                    "robustness is exactly zero at {:?}; satisfaction undecided, recorded as unsatisfied",
                    params
                ));
            }
            SweepPoint {
                params,
                robustness: *value,
                satisfied: *value > 0.0,
                depth: *depth,
                error: error.clone(),
            }
        })
        .collect();

    Ok(SweepResult {
        axes: space.axes.iter().map(|a| a.name.clone()).collect(),
        points,
        formula: phi.to_string(),
        optimized_formula: optimized.to_string(),
        formula_size: phi.size(),
        points_per_trajectory: (sim.horizon / sim.step).ceil() as usize + 1,
        threshold,
        elapsed: started.elapsed(),
        warnings,
    })
}

/// Fixed pool of workers consuming a shared job queue; results are placed
/// by job index, so the output order is independent of scheduling.
fn parallel_map<T, F>(jobs: &[Vec<f64>], workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    if workers <= 1 || jobs.len() <= 1 {
        return jobs.iter().map(|j| f(j)).collect();
    }
    let next = AtomicUsize::new(0);
    let mut buckets: Vec<Vec<(usize, T)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers.min(jobs.len()))
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let index = next.fetch_add(1, Ordering::Relaxed);
                        if index >= jobs.len() {
                            break;
                        }
                        local.push((index, f(&jobs[index])));
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut indexed: Vec<(usize, T)> = buckets.drain(..).flatten().collect();
    indexed.sort_by_key(|(index, _)| *index);
    indexed.into_iter().map(|(_, value)| value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::odesim::OdeModel;

    /// dx/dt = p with x(0) = 0: x(t) = p*t.
    fn ramp_model() -> OdeModel {
        OdeModel::from_expressions(
            "ramp",
            vec![("x".into(), "p".into(), 0.0)],
            vec![("p".into(), 0.0)],
        )
        .unwrap()
    }

    fn ramp_space(resolution: usize, cap: usize, threshold: Option<f64>) -> PerturbationSpace {
        PerturbationSpace {
            axes: vec![ParamAxis {
                name: "p".into(),
                lo: 0.0,
                hi: 1.0,
                resolution,
            }],
            refine_cap: cap,
            threshold,
        }
    }

    fn ramp_sim() -> SimSettings {
        SimSettings {
            init: vec![0.0],
            base_params: vec![0.0],
            step: 0.25,
            horizon: 1.0,
        }
    }

    fn serial() -> SweepOptions {
        SweepOptions {
            workers: 1,
            progress: false,
        }
    }

    #[test]
    fn plain_grid_sweep_evaluates_full_grid() {
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0.4)").unwrap();
        let result = run_sweep(
            &model,
            &ramp_space(5, 0, Some(0.0)),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap();
        assert_eq!(result.points.len(), 5);
        assert_eq!(result.points_per_trajectory, 5);
        // rho(p) = p - 0.4 at the sampled maximum t = 1
        for point in &result.points {
            let p = point.params[0];
            assert!((point.robustness - (p - 0.4)).abs() < 1e-12);
            assert_eq!(point.satisfied, p - 0.4 > 0.0);
        }
    }

    #[test]
    fn constant_true_formula_is_satisfied_everywhere() {
        let model = ramp_model();
        let phi = Formula::truth();
        let result = run_sweep(
            &model,
            &ramp_space(3, 0, None),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap();
        assert!(result
            .points
            .iter()
            .all(|p| p.satisfied && p.robustness == f64::INFINITY));
    }

    #[test]
    fn refinement_localizes_the_sign_boundary() {
        let cap = 6;
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0.4)").unwrap();
        let result = run_sweep(
            &model,
            &ramp_space(2, cap, Some(0.0)),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap();
        // all points stay inside the box and previously evaluated points
        // are retained
        assert!(result.points.iter().all(|p| {
            let v = p.params[0];
            (0.0..=1.0).contains(&v)
        }));
        assert!(result.points.len() > 2);
        // the adjacent sign-change pair brackets the true crossing within
        // (hi - lo) / 2^cap
        let mut sorted: Vec<(f64, f64)> = result
            .points
            .iter()
            .map(|p| (p.params[0], p.robustness))
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let bracket = sorted
            .windows(2)
            .find(|w| w[0].1 < 0.0 && w[1].1 > 0.0)
            .expect("sign change bracket");
        assert!(bracket[0].0 <= 0.4 && 0.4 <= bracket[1].0);
        assert!(bracket[1].0 - bracket[0].0 <= 1.0 / f64::powi(2.0, cap as i32) + 1e-12);
    }

    #[test]
    fn deeper_refinement_keeps_earlier_points() {
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0.4)").unwrap();
        let shallow = run_sweep(
            &model,
            &ramp_space(3, 1, Some(0.0)),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap();
        let deep = run_sweep(
            &model,
            &ramp_space(3, 3, Some(0.0)),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap();
        for point in &shallow.points {
            assert!(
                deep.points
                    .iter()
                    .any(|q| q.params == point.params && q.robustness == point.robustness),
                "point {:?} lost",
                point.params
            );
        }
    }

    #[test]
    fn worker_count_does_not_change_the_result() {
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0.4)").unwrap();
        let space = ramp_space(4, 2, None);
        let one = run_sweep(&model, &space, &phi, &ramp_sim(), &serial()).unwrap();
        let four = run_sweep(
            &model,
            &space,
            &phi,
            &ramp_sim(),
            &SweepOptions {
                workers: 4,
                progress: false,
            },
        )
        .unwrap();
        assert_eq!(one.points, four.points);
        assert_eq!(one.threshold, four.threshold);
    }

    #[test]
    fn recorded_robustness_matches_independent_recomputation() {
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0.4)").unwrap();
        let sim = ramp_sim();
        let result = run_sweep(&model, &ramp_space(3, 2, None), &phi, &sim, &serial()).unwrap();
        let optimized = rewrite::optimize(&phi).output;
        for point in &result.points {
            let trajectory =
                integrate(&model, &sim.init, &point.params, sim.step, sim.horizon).unwrap();
            let expected = monitor(&optimized, &trajectory).unwrap();
            assert_eq!(point.robustness, expected);
        }
    }

    #[test]
    fn simulation_blowup_is_recorded_per_point() {
        // dx/dt = p*x*x blows up quickly for large p
        let model = OdeModel::from_expressions(
            "quad",
            vec![("x".into(), "p*x*x".into(), 1.0)],
            vec![("p".into(), 0.0)],
        )
        .unwrap();
        let phi = parse("F[0,1](x >= 0)").unwrap();
        let space = PerturbationSpace {
            axes: vec![ParamAxis {
                name: "p".into(),
                lo: 0.0,
                hi: 100.0,
                resolution: 3,
            }],
            refine_cap: 0,
            threshold: Some(0.0),
        };
        let sim = SimSettings {
            init: vec![1.0],
            base_params: vec![0.0],
            step: 0.01,
            horizon: 1.0,
        };
        let result = run_sweep(&model, &space, &phi, &sim, &serial()).unwrap();
        assert_eq!(result.points.len(), 3);
        let failed: Vec<_> = result.points.iter().filter(|p| p.error.is_some()).collect();
        assert!(!failed.is_empty());
        for point in failed {
            assert!(point.robustness.is_nan());
            assert!(!point.satisfied);
        }
        // the well-behaved point at p = 0 still succeeded
        assert!(result.points.iter().any(|p| p.error.is_none()));
    }

    #[test]
    fn horizon_shorter_than_formula_is_rejected() {
        let model = ramp_model();
        let phi = parse("F[0,5](x >= 0)").unwrap();
        let err = run_sweep(
            &model,
            &ramp_space(2, 0, None),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            SweepError::HorizonTooShort {
                required: 5.0,
                horizon: 1.0
            }
        );
    }

    #[test]
    fn invalid_space_is_rejected() {
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0)").unwrap();
        let mut space = ramp_space(2, 0, None);
        space.axes[0].hi = space.axes[0].lo;
        assert!(matches!(
            run_sweep(&model, &space, &phi, &ramp_sim(), &serial()),
            Err(SweepError::InvalidRange { .. })
        ));
        let mut space = ramp_space(1, 0, None);
        space.axes[0].resolution = 1;
        assert!(matches!(
            run_sweep(&model, &space, &phi, &ramp_sim(), &serial()),
            Err(SweepError::BadResolution { .. })
        ));
        let mut space = ramp_space(2, 0, None);
        space.axes[0].name = "missing".into();
        assert!(matches!(
            run_sweep(&model, &space, &phi, &ramp_sim(), &serial()),
            Err(SweepError::UnknownAxis { .. })
        ));
    }

    #[test]
    fn zero_robustness_recorded_unsatisfied_with_warning() {
        // x(t) = p*t; at p = 0 the trajectory is identically 0 and
        // F[0,1](x >= 0) has robustness exactly 0
        let model = ramp_model();
        let phi = parse("F[0,1](x >= 0)").unwrap();
        let result = run_sweep(
            &model,
            &ramp_space(2, 0, Some(0.0)),
            &phi,
            &ramp_sim(),
            &serial(),
        )
        .unwrap();
        let zero = result
            .points
            .iter()
            .find(|p| p.robustness == 0.0)
            .expect("zero-robustness point");
        assert!(!zero.satisfied);
        assert!(!result.warnings.is_empty());
    }
}
