use std::f64::consts::{PI, TAU};

use hoferlike::constructions::{
    build_z, fragment, fragment_flux_check, gronwall_check, osc_bound_check, TwoParamFamily,
    WeightKind,
};
use hoferlike::isotopy::{integrate_generator, GeneratorPath};
use hoferlike::{HarmonicForm, TorusGrid, VectorFieldField};

fn full(x: &[VectorFieldField]) -> TwoParamFamily {
    let mut fam = build_z(x).unwrap();
    fam.flow_in_s(2).unwrap();
    fam.extract_v().unwrap();
    fam
}

#[test]
fn mixed_family_meets_both_bounds() {
    let grid = TorusGrid::new(32).unwrap();
    let m = 16;
    // harmonic drift plus sharp d(a sin 2 pi (x + y))
    let x: Vec<VectorFieldField> = (0..=m)
        .map(|k| {
            let t = k as f64 / m as f64;
            let a = 0.04 * (1.0 + t);
            VectorFieldField::from_fn(grid, |x, y| {
                let c = TAU * a * (TAU * (x + y)).cos();
                (0.3 * (PI * t).cos() + c, 0.2 - c)
            })
        })
        .collect();
    let fam = full(&x);
    let g = gronwall_check(&fam).unwrap();
    assert!(g.pass, "{g:?}");
    assert!(g.sup_v <= g.bound + 1e-9);
    let o = osc_bound_check(&fam, 1.0, 1.0, 1e-6 * 32.0).unwrap();
    assert!(o.pass, "{o:?}");
}

#[test]
fn fragments_compose_to_the_whole_flow() {
    let grid = TorusGrid::new(16).unwrap();
    let samples = 16;
    let h: Vec<HarmonicForm> = (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            HarmonicForm::new(0.4 * (PI * t).sin(), 0.3 - 0.2 * t)
        })
        .collect();
    let plan = fragment(&h, WeightKind::InverseSquare, 8, 0.05).unwrap();
    let whole =
        GeneratorPath::harmonic(grid, samples, |t| h[(t * samples as f64).round() as usize])
            .unwrap();
    let target = integrate_generator(&whole, 2).unwrap();
    let composed = plan.compose_pieces(grid, 2).unwrap();
    assert!(composed.endpoint().torus_distance(target.endpoint()) <= 1e-9);

    let pieces = fragment_flux_check(&plan);
    let total = pieces.iter().fold(0.0, |s, p| s + p.flux.norm());
    let whole_flux = hoferlike::isotopy::flux_cohomological(&whole).norm();
    assert!((total - whole_flux).abs() <= 1e-9, "{total} {whole_flux}");
    assert!(pieces
        .windows(2)
        .all(|w| w[0].flux.norm() > w[1].flux.norm()));
}
