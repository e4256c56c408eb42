use ncwig_core::numerics::{ft_axis_scaled, weights, Rule};
use ncwig_core::oracles::{direct_wigner_oracle, direct_wigner_oracle_refined, gaussian_state, relative_error};
use ncwig_core::starprod::{momentum_marginal_canonical, position_marginal_canonical};
use ncwig_core::wigner::*;
use ncwig_core::*;

fn momentum(mut f: ComplexField2D) -> ComplexField2D {
    f.representation = Representation::Momentum;
    f
}

fn unit_label(k1: f64, k2: f64, k3: f64) -> OrbitLabel {
    make_orbit_label(k1, k2, k3, DimensionalConstants::unit()).unwrap()
}

fn state(grid: Grid2D) -> ComplexField2D {
    gaussian_state(grid, [1.0, 0.8], [0.3, -0.2, 0.5, 0.1], [1, 0]).unwrap()
}

fn slice() -> Probes {
    Probes::slice(Grid2D::square_symmetric(12, 2.0).unwrap(), [0, 3], [0.0, 0.25, -0.3, 0.0]).unwrap()
}

#[test]
fn fft_and_direct_agree_for_every_transform() {
    let grid = Grid2D::square_symmetric(64, 9.0).unwrap();
    let hat = RankOneOperator::diagonal(momentum(state(grid)));
    let pos = RankOneOperator::new(state(grid), gaussian_state(grid, [0.9, 1.0], [0.0; 4], [0, 1]).unwrap()).unwrap();
    let pr = slice();
    let p = NCParams::new(1.0, 0.7, -0.4).unwrap();
    for label in [unit_label(1.0, -1.0, 1.0), unit_label(1.0, 0.5, 0.0), unit_label(1.0, 0.0, 0.0)] {
        let run = |m| wigner_orbit(&hat, &pr, &label, m).unwrap();
        assert!(relative_error(run(Method::Fft).values(), run(Method::Direct).values()) < 1e-10);
        let run = |m| wigner_nc(&hat, &pr, &label, m).unwrap();
        assert!(relative_error(run(Method::Fft).values(), run(Method::Direct).values()) < 1e-10);
        let run = |m| wigner_nc_position(&pos, &pr, &label, m).unwrap();
        assert!(relative_error(run(Method::Fft).values(), run(Method::Direct).values()) < 1e-10);
    }
    let run = |m| wigner_nc_params(&pos, &pr, &p, m).unwrap();
    assert!(relative_error(run(Method::Fft).values(), run(Method::Direct).values()) < 1e-10);
    let run = |m| cross_wigner_standard(&pos, &pr, 2.0 * std::f64::consts::PI, m).unwrap();
    assert!(relative_error(run(Method::Fft).values(), run(Method::Direct).values()) < 1e-10);
}

#[test]
fn transforms_match_the_direct_oracle() {
    let grid = Grid2D::square_symmetric(64, 9.0).unwrap();
    let op = RankOneOperator::new(
        momentum(state(grid)),
        momentum(gaussian_state(grid, [0.9, 1.1], [-0.2, 0.1, 0.0, 0.3], [0, 1]).unwrap()),
    )
    .unwrap();
    let pts = vec![[0.3, -0.4, 0.5, 0.2], [-1.2, 0.8, 0.0, -0.6], [0.0, 0.0, 0.0, 0.0]];
    for label in [unit_label(1.5, -1.0, 0.5), unit_label(1.0, 0.5, 0.0), unit_label(0.8, 0.0, 0.0)] {
        let w = wigner_orbit(&op, &Probes::Points(pts.clone()), &label, Method::Fft).unwrap();
        let oracle: Vec<Complex64> =
            pts.iter().map(|&p| direct_wigner_oracle(&op, &CoadjointPoint::from_array(p), &label)).collect();
        assert!(relative_error(w.values(), &oracle) < 1e-8, "{}", label.sector().name());
    }
}

#[test]
fn oracle_is_converged_in_its_quadrature() {
    let grid = Grid2D::square_symmetric(48, 9.0).unwrap();
    let op = RankOneOperator::diagonal(momentum(state(grid)));
    let label = unit_label(1.0, -1.0, 1.0);
    let pt = CoadjointPoint::new(0.4, -0.3, 0.2, 0.1);
    let a = direct_wigner_oracle_refined(&op, &pt, &label, 0);
    let b = direct_wigner_oracle_refined(&op, &pt, &label, 1);
    assert!((a - b).norm() < 1e-9 * a.norm().max(1e-3), "{a} {b}");
}

#[test]
fn native_and_rescaled_generic_forms_agree() {
    let grid = Grid2D::square_symmetric(64, 9.0).unwrap();
    let op = RankOneOperator::diagonal(momentum(state(grid)));
    let label = unit_label(1.0, -1.0, 1.0);
    let pr = Probes::slice(Grid2D::square_symmetric(12, 2.0).unwrap(), [0, 2], [0.0, 0.1, 0.0, -0.2]).unwrap();
    let a = wigner_nc(&op, &pr, &label, Method::Fft).unwrap();
    let b = wigner_nc_via_generic(&op, &pr, &label, Method::Fft).unwrap();
    assert!(relative_error(a.values(), b.values()) < 1e-10);
}

#[test]
fn momentum_and_position_forms_agree() {
    let grid = Grid2D::square_symmetric(128, 9.0).unwrap();
    let psi = state(grid);
    let label = unit_label(1.0, -1.0, 1.0);
    let pr = Probes::slice(Grid2D::square_symmetric(12, 2.0).unwrap(), [0, 2], [0.0, 0.1, 0.0, -0.2]).unwrap();
    let a = wigner_nc(&RankOneOperator::diagonal(to_momentum(&psi, &label).unwrap()), &pr, &label, Method::Fft).unwrap();
    let b = wigner_nc_position(&RankOneOperator::diagonal(psi), &pr, &label, Method::Fft).unwrap();
    assert!(relative_error(a.values(), b.values()) < 1e-9);
}

#[test]
fn tau_zero_form_continues_the_qm_form() {
    let grid = Grid2D::square_symmetric(64, 9.0).unwrap();
    let op = RankOneOperator::diagonal(momentum(state(grid)));
    let pr = slice();
    let qm = wigner_qm_orbit(&op, &pr, &unit_label(1.0, 0.0, 0.0), Method::Fft).unwrap();
    let mut last = f64::INFINITY;
    for k2 in [1e-2, 1e-3, 1e-4] {
        let t = wigner_tau0(&op, &pr, &unit_label(1.0, k2, 0.0), Method::Fft).unwrap();
        let scaled: Vec<Complex64> = t.values().iter().map(|v| v / (2.0 * std::f64::consts::PI).sqrt()).collect();
        let e = relative_error(&scaled, qm.values());
        assert!(e < last && e < 10.0 * k2, "{k2} {e}");
        last = e;
    }
}

#[test]
fn qm_sector_is_the_standard_wigner_function() {
    let grid = Grid2D::square_symmetric(128, 10.0).unwrap();
    let psi = state(grid);
    let label = unit_label(1.0, 0.0, 0.0);
    let pts = slice().points();
    let orbit = wigner_qm_orbit(
        &RankOneOperator::diagonal(to_momentum(&psi, &label).unwrap()),
        &Probes::Points(pts.clone()),
        &label,
        Method::Fft,
    )
    .unwrap();
    let op = RankOneOperator::diagonal(psi);
    let std: Vec<Complex64> = pts
        .iter()
        .map(|&k| {
            let (x, h, s) = qm_convention_map(&label, k).unwrap();
            cross_wigner_standard(&op, &Probes::Points(vec![x]), h, Method::Direct).unwrap().values()[0] * s
        })
        .collect();
    assert!(relative_error(orbit.values(), &std) < 1e-10);
}

#[test]
fn fourier_transform_intertwines_the_two_representations() {
    // self-dual grid: the transform along axis 0 maps it onto itself
    let n = 64;
    let label = unit_label(1.0, -1.0, 0.5);
    let neg = unit_label(-1.0, 1.0, -0.5);
    let kappa = label.k1() * label.consts().alpha;
    let step = (2.0 * std::f64::consts::PI / (n as f64 * kappa.abs())).sqrt();
    let grid = Grid2D::square_symmetric(n, 0.5 * n as f64 * step).unwrap();
    let fhat = momentum(gaussian_state(grid, [1.0, 1.0], [0.3, -0.4, 0.2, 0.1], [1, 1]).unwrap());
    for g in [
        GroupElement::new(0.3, -0.2, 0.7, [0.4, -0.6], [0.25, 0.5]),
        GroupElement::new(-1.0, 0.5, 0.1, [-0.3, 0.2], [-0.7, 0.1]),
    ] {
        let lhs = uir_apply_ft(&g, &fhat, &label, ShiftMode::Fractional).unwrap();
        let f = ft_axis_scaled(&fhat, 0, -kappa).unwrap();
        let rhs = ft_axis_scaled(&uir_apply(&g, &f, &neg, ShiftMode::Fractional).unwrap(), 0, kappa).unwrap();
        assert!(rhs.grid().same_as(lhs.grid()));
        assert!(relative_error(lhs.values(), rhs.values()) < 1e-9);
    }
}

fn trapezoid_sum(values: &[Complex64], a: Grid1D, b: Grid1D) -> Complex64 {
    let (wa, wb) = (weights(a.n, a.step, Rule::Trapezoid), weights(b.n, b.step, Rule::Trapezoid));
    let mut s = Complex64::default();
    for j in 0..b.n {
        for i in 0..a.n {
            s += values[i + a.n * j] * wa[i] * wb[j];
        }
    }
    s
}

#[test]
fn reduced_position_marginal_matches_brute_force_integration() {
    let grid = Grid2D::square_symmetric(128, 9.0).unwrap();
    let psi = gaussian_state(grid, [1.0, 0.9], [0.2, -0.1, 0.4, -0.3], [0, 0]).unwrap();
    let op = RankOneOperator::diagonal(psi.clone());
    let out = Grid2D::new(Grid1D::new(2, -0.5, 0.75).unwrap(), Grid1D::new(2, -0.3, 0.5).unwrap());
    let k3 = Grid1D::symmetric(64, 10.0).unwrap();
    let k4 = Grid1D::symmetric(128, 16.0).unwrap();
    for label in [unit_label(1.0, -1.0, 1.0), unit_label(1.0, -1.0, 2.0)] {
        let p = nc_params_from_label(&label);
        let reduced = position_marginal_canonical(&psi, &p, &out).unwrap();
        for i in 0..out.len() {
            let (k1s, k2s) = out.coord(i % 2, i / 2);
            let pr = Probes::slice(Grid2D::new(k3, k4), [2, 3], [k1s, k2s, 0.0, 0.0]).unwrap();
            let w = wigner_nc_params(&op, &pr, &p, Method::Fft).unwrap();
            let brute = trapezoid_sum(w.values(), k3, k4);
            let r = reduced.values()[i];
            assert!((brute - r).norm() < 1e-8 * r.norm().max(1e-3), "{brute} {r}");
        }
    }
}

#[test]
fn reduced_momentum_marginal_matches_brute_force_integration() {
    let grid = Grid2D::square_symmetric(128, 9.0).unwrap();
    let psi_hat = momentum(gaussian_state(grid, [0.9, 1.0], [-0.1, 0.2, -0.3, 0.5], [0, 0]).unwrap());
    let op = RankOneOperator::diagonal(psi_hat.clone());
    let out = Grid2D::new(Grid1D::new(2, -0.5, 0.75).unwrap(), Grid1D::new(2, -0.3, 0.5).unwrap());
    let k1 = Grid1D::symmetric(128, 16.0).unwrap();
    let k2 = Grid1D::symmetric(64, 10.0).unwrap();
    let label = unit_label(1.0, -1.0, 1.0);
    let p = nc_params_from_label(&label);
    let reduced = momentum_marginal_canonical(&psi_hat, &p, &out).unwrap();
    for i in 0..out.len() {
        let (k3s, k4s) = out.coord(i % 2, i / 2);
        let pr = Probes::slice(Grid2D::new(k1, k2), [0, 1], [0.0, 0.0, k3s, k4s]).unwrap();
        let w = wigner_nc_orbit(&op, &pr, &label, Method::Fft).unwrap();
        let brute = trapezoid_sum(w.values(), k1, k2);
        let r = reduced.values()[i];
        assert!((brute - r).norm() < 1e-8 * r.norm().max(1e-3), "{brute} {r}");
    }
}
