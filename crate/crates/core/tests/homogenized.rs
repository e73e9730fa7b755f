use crack_homog::analysis::relative_distance;
use crack_homog::fixed_point::{run_fixed_point, FixedPointConfig};
use crack_homog::fv::{BoundaryData, Field, StepSystem};
use crack_homog::grid::{FaceTag, IntervalGrid, Layout};
use crack_homog::params::{ParamSet, WallFlux, WallProfile};
use crack_homog::trajectory::Profile1d;
use crack_homog::weak::{run, WeakModel, WeakRunConfig};

fn fp_profile(alpha: f64, n: usize, t: f64) -> Profile1d {
    let mut c = FixedPointConfig::new(ParamSet::constant(alpha, 0.0, 1.0).unwrap(), n, t);
    c.dt = 1e-3;
    run_fixed_point(&c).unwrap().trajectory.final_profile().unwrap().clone()
}

fn weak_profile(params: ParamSet, n: usize, t: f64, model: WeakModel, delta: Option<f64>) -> Profile1d {
    let mut c = WeakRunConfig::new(params, n, t, model);
    c.dt = 1e-3;
    c.delta = delta;
    run(&c).unwrap().trajectory.final_profile().unwrap().clone()
}

#[test]
fn zero_alpha_fixed_point_equals_single_domain_solve() {
    let n = 40;
    let fp = fp_profile(0.0, n, 0.2);
    let grid = IntervalGrid::new(-1.0, 1.0, 2 * n, Layout::CellCentered).unwrap();
    let bc = BoundaryData::new().flux(FaceTag::Left, 1.0).flux(FaceTag::Right, 0.0);
    let sys = StepSystem::assemble(&grid, 1e-3, &bc).unwrap();
    let mut u = Field::uniform(2 * n, 0.0, 0.0);
    for _ in 0..200 {
        u = sys.step(&u, &bc, None).unwrap();
    }
    for (a, b) in fp.u.iter().zip(&u.values) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn zero_alpha_weak_and_fixed_point_converge_together() {
    // interior vertices only: cell-centered values are clamped beyond the end centers
    let distance = |n: usize| {
        let fp = fp_profile(0.0, n, 0.5);
        let w = weak_profile(
            ParamSet::constant(0.0, 0.0, 1.0).unwrap(),
            2 * n,
            0.5,
            WeakModel::FullWeak,
            None,
        );
        let interior = Profile1d {
            time: w.time,
            x: w.x[1..w.x.len() - 1].to_vec(),
            u: w.u[1..w.u.len() - 1].to_vec(),
        };
        relative_distance(&interior, &fp, -1.0).unwrap()
    };
    let (coarse, fine) = (distance(25), distance(50));
    assert!(fine < 1e-3 && coarse / fine > 1.8, "{coarse} {fine}");
}

#[test]
fn smaller_dirac_window_moves_weak_towards_fixed_point() {
    let alpha = 0.6;
    let n = 400;
    let h = 2.0 / n as f64;
    let fp = fp_profile(alpha, n / 2, 0.5);
    let params = ParamSet::constant(alpha, 0.0, 1.0).unwrap();
    let dist: Vec<f64> = [8.0, 4.0, 2.0]
        .iter()
        .map(|k| {
            let w = weak_profile(params.clone(), n, 0.5, WeakModel::FullWeak, Some(k * h));
            relative_distance(&w, &fp, 0.1).unwrap()
        })
        .collect();
    assert!(dist.windows(2).all(|d| d[1] < d[0]), "{dist:?}");
}

#[test]
fn small_alpha_approximation_degrades_with_alpha() {
    let dist: Vec<f64> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&a| {
            let fp = fp_profile(a, 100, 0.5);
            let ap = weak_profile(
                ParamSet::constant(a, 0.0, 1.0).unwrap(),
                200,
                0.5,
                WeakModel::ApproxSmallAlpha,
                None,
            );
            relative_distance(&ap, &fp, 0.0).unwrap()
        })
        .collect();
    assert!(dist.windows(2).all(|d| d[1] > d[0]), "{dist:?}");
    // halving alpha reduces the deviation
    assert!(dist[0] < dist[1]);
}

#[test]
fn zero_alpha_profile_variant_is_plain_heating() {
    let params = ParamSet::new(
        0.0,
        0.0,
        1.0,
        WallFlux::Profile {
            profile: WallProfile::linear(0.0),
        },
    )
    .unwrap();
    let pv = weak_profile(params, 100, 0.3, WeakModel::ProfileVariant, None);
    let ap = weak_profile(
        ParamSet::constant(0.0, 0.0, 1.0).unwrap(),
        100,
        0.3,
        WeakModel::ApproxSmallAlpha,
        None,
    );
    for (a, b) in pv.u.iter().zip(&ap.u) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn tabulated_profile_variant_conserves_energy() {
    // hat profile with mass alpha/2 = 0.1
    let f = WallProfile::tabulated(vec![-1.0, -0.5, 0.0], vec![0.0, 0.2, 0.0]).unwrap();
    let params = ParamSet::new(0.2, 0.0, 1.0, WallFlux::Profile { profile: f }).unwrap();
    let mut c = WeakRunConfig::new(params, 80, 0.2, WeakModel::ProfileVariant);
    c.dt = 1e-2;
    let t = run(&c).unwrap().trajectory;
    for k in 1..t.times.len() {
        let rate = (t.mass[k] - t.mass[k - 1]) / (t.times[k] - t.times[k - 1]);
        assert!((rate - 1.0).abs() < 1e-10);
    }
}
