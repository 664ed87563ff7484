//! Worked examples checked against oracles that do not share code with the
//! implementation: hand arithmetic, brute-force enumeration, dense-grid
//! comparison, exact SVD and complex arithmetic.
//!
//! Every check returns `Err(message)` instead of panicking so the same list
//! can drive both ordinary tests and the acceptance report.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rbf_lowrank::cheb1d::{
    auto_ellipse, bound_analytic, bound_finite_smooth, cheb_fit_fn, clenshaw, estimate_ellipse_bound, eval_power,
    monomialize, ChebApprox,
};
use rbf_lowrank::cheb_factor::{build_cheb_plan, eval_separable, factor_matrices, SeparablePlan};
use rbf_lowrank::concentration::{
    bernstein_probability, binomial_slack, empirical_concentration, params_from_samples, prob_bound_analytic,
    prob_bound_finite, rho_delta, uniform_params, ConcentrationParams,
};
use rbf_lowrank::fourier_taylor::{
    build_ft_plan, default_quad_points, fourier_coeffs, ft_error_bound, periodize, FtOptions, PeriodizedProfile,
};
use rbf_lowrank::indexcomb::{
    binomial, enumerate_multiindices, multinomial, rank_chebyshev, rank_fourier_taylor, MultiIndex,
};
use rbf_lowrank::linalg::{DenseMatrix, MemoryCap};
use rbf_lowrank::pointgen::{
    derive_seed, sample_endpoint, sample_halton, sample_uniform, scenario_clouds, PointCloud, Scenario, Scheme,
};
use rbf_lowrank::profile::{ClosureProfile, Family, Gaussian, RadialProfile, Smoothness};
use rbf_lowrank::spectrum::lowrank::{nystrom_leverage, randomized_svd};
use rbf_lowrank::spectrum::rank::{Norm, Spectrum};
use rbf_lowrank::spectrum::sweep::{loglog_slope, rank_sweep, SweepConfig};
use rbf_lowrank::spectrum::{assemble, Bandwidth};

pub type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(got: f64, want: f64, rel: f64, what: &str) -> Result<(), String> {
    ensure((got - want).abs() <= rel * want.abs().max(f64::MIN_POSITIVE), || {
        format!("{what}: got {got:e}, expected {want:e} (relative tolerance {rel:e})")
    })
}

fn lib<T>(r: rbf_lowrank::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn exp_profile() -> ClosureProfile<fn(f64) -> f64, fn(Complex64) -> Complex64> {
    ClosureProfile::analytic("exp", (|u: f64| (-u).exp()) as fn(f64) -> f64, (|w: Complex64| (-w).exp()) as fn(Complex64) -> Complex64)
}

fn gaussian(diameter: f64) -> RadialProfile {
    RadialProfile::new(Arc::new(Gaussian { h: 1.0 }), diameter, Smoothness::AutoAnalytic).unwrap()
}

fn all_tuples(d: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..=max).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

// ---------------------------------------------------------------- indices

pub fn multiindex_enumeration_d3_degree2() -> Result<(), String> {
    let brute: Vec<Vec<u32>> = all_tuples(3, 2).into_iter().filter(|t| t.iter().sum::<u32>() == 2).collect();
    let got: Vec<Vec<u32>> = lib(enumerate_multiindices(3, 2))?.iter().map(|a| a.exponents().to_vec()).collect();
    ensure(got.len() == 6 && brute.len() == 6, || format!("expected 6 indices, got {}", got.len()))?;
    let mut a = got.clone();
    let mut b = brute;
    a.sort();
    b.sort();
    ensure(a == b, || "enumerated set differs from brute force".into())?;
    ensure(got[0] == [2, 0, 0] && got[5] == [0, 0, 2], || format!("first/last are {:?}/{:?}", got[0], got[5]))
}

pub fn multinomial_4_211() -> Result<(), String> {
    let want = factorial(4) / (factorial(2) * factorial(1) * factorial(1));
    let got = lib(multinomial(4, &MultiIndex::new(vec![2, 1, 1])))?;
    ensure(got == 12 && want == 12, || format!("multinomial gave {got}, factorials give {want}"))
}

/// Counts (l, k, j, alpha) with k <= l, j <= k and |alpha| = l - k by
/// nested loops over raw exponent tuples.
fn brute_cheb_count(n: u32, d: usize) -> usize {
    let tuples = all_tuples(d, n);
    let mut count = 0;
    for l in 0..=n {
        for k in 0..=l {
            let alphas = tuples.iter().filter(|t| t.iter().sum::<u32>() == l - k).count();
            count += (k as usize + 1) * alphas;
        }
    }
    count
}

pub fn rank_chebyshev_by_enumeration() -> Result<(), String> {
    for (n, d, want) in [(1u32, 2usize, 5u128), (3, 3, 56)] {
        let brute = brute_cheb_count(n, d) as u128;
        let closed = lib(rank_chebyshev(n as u64, d as u64))?;
        let binom = lib(binomial((n + d as u32 + 2) as u64, d as u64 + 2))?;
        ensure(brute == want && closed == want && binom == want, || {
            format!("n={n}, d={d}: brute {brute}, closed form {closed}, expected {want}")
        })?;
    }
    let plan = lib(build_cheb_plan(&gaussian(1.0), 3, 3))?;
    ensure(plan.terms.len() == 56, || format!("plan for n=3, d=3 has {} terms", plan.terms.len()))
}

pub fn rank_fourier_taylor_by_enumeration() -> Result<(), String> {
    for (mf, mt, d, want) in [(1u64, 9u64, 1usize, 40u128), (2, 18, 2, 1520)] {
        let alphas = all_tuples(d, mt as u32).into_iter().filter(|t| t.iter().sum::<u32>() <= mt as u32).count();
        // Modes -M_f..M_f without 0, each complex term giving two real columns.
        let brute = (2 * mf as usize * alphas * 2) as u128;
        let closed = lib(rank_fourier_taylor(mf, mt, d as u64))?;
        let formula = 4 * mf as u128 * lib(binomial(mt + d as u64, d as u64))?;
        ensure(brute == want && closed == want && formula == want, || {
            format!("M_f={mf}, M_t={mt}, d={d}: brute {brute}, closed form {closed}, expected {want}")
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------- cheb1d

pub fn exp_interpolant_dense_grid() -> Result<(), String> {
    let f = exp_profile();
    let approx = lib(cheb_fit_fn(&f, 0.0, 1.0, 10))?;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let u = i as f64 / 999.0;
        worst = worst.max((lib(approx.eval(u))? - (-u).exp()).abs());
    }
    ensure(worst <= 1e-10, || format!("max interpolation error {worst:e} > 1e-10"))
}

pub fn clenshaw_matches_trig_sum() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let coeffs: Vec<f64> = (0..14).map(|_| rng.random_range(-1.0..1.0)).collect();
    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
    for _ in 0..100 {
        let t: f64 = rng.random_range(-1.0..=1.0);
        let naive: f64 = coeffs.iter().enumerate().map(|(k, c)| c * (k as f64 * t.acos()).cos()).sum();
        let got = clenshaw(&coeffs, t);
        ensure((got - naive).abs() <= 1e-12 * scale, || format!("t={t}: clenshaw {got}, trig sum {naive}"))?;
    }
    Ok(())
}

pub fn monomialize_first_kind_t1() -> Result<(), String> {
    for d2 in [2.0, 4.0, 0.5] {
        // T_1(2u/D^2 - 1) = -1 + (2/D^2) u.
        let b = lib(monomialize(&lib(ChebApprox::new(vec![0.0, 1.0], 0.0, d2))?))?;
        close(b[0], -1.0, 1e-15, "b_0")?;
        close(b[1], 2.0 / d2, 1e-15, "b_1")?;
    }
    Ok(())
}

pub fn monomialized_exp_dense_grid() -> Result<(), String> {
    let f = exp_profile();
    let b = lib(monomialize(&lib(cheb_fit_fn(&f, 0.0, 1.0, 12))?))?;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let u = i as f64 / 999.0;
        worst = worst.max((eval_power(&b, u) - (-u).exp()).abs());
    }
    ensure(worst <= 1e-8, || format!("power-basis error {worst:e} > 1e-8"))
}

pub fn analytic_bound_arithmetic() -> Result<(), String> {
    close(lib(bound_analytic(2.0, 1.0, 3))?, 2.0 * 2f64.powi(-3) / 1.0, 1e-15, "(2,1,3)")?;
    close(lib(bound_analytic(2.0, 1.0, 3))?, 0.25, 1e-15, "(2,1,3)")?;
    close(lib(bound_analytic(4.0, 10.0, 2))?, 20.0 / 48.0, 1e-15, "(4,10,2)")
}

pub fn finite_smooth_bound_arithmetic() -> Result<(), String> {
    close(lib(bound_finite_smooth(PI, 1.0, 1, 2))?, 1.0, 1e-15, "(pi,1,1,2)")?;
    close(lib(bound_finite_smooth(1.0, 1.0, 2, 4))?, 2.0 / (PI * 2.0 * 16.0), 1e-15, "(1,1,2,4)")?;
    close(2.0 / (PI * 32.0), 0.01989, 1e-3, "worked value")
}

pub fn ellipse_bound_of_exponential() -> Result<(), String> {
    let f = exp_profile();
    for rho_sq in [1.2f64, 2.0, 4.0, 10.0] {
        // |e^{-w}| = e^{-Re w}; Re w is smallest at theta = pi, where
        // w = 1/2 - (rho_sq + 1/rho_sq)/4 on [0, 1].
        let want = ((rho_sq + 1.0 / rho_sq) / 4.0 - 0.5).exp();
        let got = lib(estimate_ellipse_bound(&f, (0.0, 1.0), rho_sq, 512))?;
        close(got, want, 1e-12, &format!("C_est at rho_sq={rho_sq}"))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- cheb_factor

pub fn order_one_plan_by_hand() -> Result<(), String> {
    let plan = lib(build_cheb_plan(&gaussian(1.0), 1, 2))?;
    let (b0, b1) = (plan.power_coeffs[0], plan.power_coeffs[1]);
    ensure(plan.terms.len() == 5, || format!("expected 5 terms, got {}", plan.terms.len()))?;
    // |x-y|^2 = |x|^2 + |y|^2 - 2 x1 y1 - 2 x2 y2.
    let mut want: BTreeMap<(u32, u32, u32, Vec<u32>), f64> = BTreeMap::new();
    want.insert((0, 0, 0, vec![0, 0]), b0);
    want.insert((1, 0, 0, vec![1, 0]), -2.0 * b1);
    want.insert((1, 0, 0, vec![0, 1]), -2.0 * b1);
    want.insert((1, 1, 0, vec![0, 0]), b1);
    want.insert((1, 1, 1, vec![0, 0]), b1);
    for t in &plan.terms {
        let key = (t.l, t.k, t.j, t.alpha.exponents().to_vec());
        let w = want.get(&key).ok_or_else(|| format!("unexpected term {key:?}"))?;
        close(t.coeff, *w, 1e-14, &format!("coefficient of {key:?}"))?;
    }
    let sp = SeparablePlan::Chebyshev(plan);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let x = [rng.random::<f64>() * 0.7, rng.random::<f64>() * 0.7];
        let y = [rng.random::<f64>() * 0.7, rng.random::<f64>() * 0.7];
        let z = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
        close(lib(sp.eval(&x, &y))?, b0 + b1 * z, 1e-13, "b0 + b1 |x-y|^2")?;
    }
    Ok(())
}

pub fn plan_bound_recomputed() -> Result<(), String> {
    let plan = lib(build_cheb_plan(&gaussian(1.0), 8, 3))?;
    let rho_sq = match plan.bound {
        rbf_lowrank::cheb_factor::ChebBound::Analytic { rho_sq, .. } => rho_sq,
        other => return Err(format!("expected an analytic bound, got {other:?}")),
    };
    let choice = lib(auto_ellipse(&Gaussian { h: 1.0 }, (0.0, 1.0), 8))?;
    close(rho_sq, choice.rho_sq, 0.0, "selected rho_sq")?;
    // On [0, 1] the Gaussian is e^{-u}, whose ellipse maximum is closed form.
    let c = ((rho_sq + 1.0 / rho_sq) / 4.0 - 0.5).exp();
    let want = 2.0 * c * rho_sq.powi(-8) / (rho_sq - 1.0);
    close(plan.error_bound, want, 1e-12, "plan error bound")
}

pub fn term_evaluation_naive_powers() -> Result<(), String> {
    let plan = lib(build_cheb_plan(&gaussian(2.0), 6, 3))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let t = &plan.terms[rng.random_range(0..plan.terms.len())];
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pow = |v: f64, e: u32| (0..e).fold(1.0, |acc, _| acc * v);
        let nx: f64 = x.iter().map(|v| v * v).sum();
        let ny: f64 = y.iter().map(|v| v * v).sum();
        let mono = |p: &[f64]| p.iter().zip(t.alpha.exponents()).map(|(&v, &e)| pow(v, e)).product::<f64>();
        let g = t.coeff * pow(nx, t.j) * mono(&x);
        let h = pow(ny, t.k - t.j) * mono(&y);
        let (gg, hh) = (lib(t.eval_g(&x))?, lib(t.eval_h(&y))?);
        ensure((gg - g).abs() <= 1e-14 * g.abs().max(f64::MIN_POSITIVE), || format!("g: {gg} vs {g}"))?;
        ensure((hh - h).abs() <= 1e-14 * h.abs().max(f64::MIN_POSITIVE), || format!("h: {hh} vs {h}"))?;
    }
    Ok(())
}

pub fn separable_matches_chebyshev() -> Result<(), String> {
    let x = lib(sample_uniform(200, 3, 0.0, 1.0, 21))?;
    let y = lib(sample_uniform(200, 3, 0.0, 1.0, 22))?;
    let diameter = x.box_diameter().max(y.box_diameter());
    let plan = lib(build_cheb_plan(&gaussian(diameter), 8, 3))?;
    let approx = plan.approx.clone();
    let sp = SeparablePlan::Chebyshev(plan);
    for i in 0..200 {
        let (a, b) = (x.point(i), y.point(i));
        let z: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
        let want = lib(approx.eval(z))?;
        let got = lib(eval_separable(&sp, a, b))?;
        ensure((got - want).abs() <= 1e-9, || format!("pair {i}: separable {got}, Chebyshev {want}"))?;
    }
    Ok(())
}

pub fn factor_matrices_within_bound() -> Result<(), String> {
    let x = lib(sample_uniform(300, 2, 0.0, 1.0, 31))?;
    let y = lib(sample_uniform(300, 2, 0.0, 1.0, 32))?;
    let sp = SeparablePlan::Chebyshev(lib(build_cheb_plan(&gaussian(2f64.sqrt()), 6, 2))?);
    let (g, h) = lib(factor_matrices(&sp, &x, &y, MemoryCap::default()))?;
    let approx = g.mul_transpose(&h);
    let k = DenseMatrix::from_fn(300, 300, |i, j| {
        let z: f64 = x.point(i).iter().zip(y.point(j)).map(|(p, q)| (p - q) * (p - q)).sum();
        (-z).exp()
    });
    let err = k.max_abs_diff(&approx);
    let bound = sp.error_bound().ok_or("plan carries no bound")?;
    ensure(err <= bound, || format!("max |K - G H^T| = {err:e} exceeds the bound {bound:e}"))
}

// ---------------------------------------------------------------- fourier_taylor

fn periodized_gaussian(diameter: f64) -> PeriodizedProfile {
    periodize(&gaussian(diameter), 7).unwrap()
}

pub fn periodized_profile_is_periodic() -> Result<(), String> {
    let pp = periodized_gaussian(1.0);
    let period = 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let z: f64 = rng.random_range(-6.0..6.0);
        let (a, b) = (pp.eval(z), pp.eval(z + period));
        ensure((a - b).abs() <= 1e-12, || format!("f_p({z}) = {a}, f_p({z} + 4D^2) = {b}"))?;
    }
    Ok(())
}

pub fn fourier_coefficients_bounded_by_sup_norm() -> Result<(), String> {
    let pp = periodized_gaussian(1.0);
    let a = lib(fourier_coeffs(&pp, 8, default_quad_points(8)))?;
    ensure(a.len() == 17, || format!("expected 17 coefficients, got {}", a.len()))?;
    // The extension evaluates e^{-z} on [-2D^2, 0) too, so its sup norm
    // exceeds sup |f| = 1 on [0, D^2]; |a_j| is bounded by the former.
    let sup = (0..=40_000).map(|i| pp.eval(-2.0 + 4.0 * i as f64 / 40_000.0).abs()).fold(0.0, f64::max);
    ensure(sup > 1.0 && sup < 2f64.exp(), || format!("sup of the extension is {sup}"))?;
    for (i, c) in a.iter().enumerate() {
        ensure(c.norm() <= sup * (1.0 + 1e-12), || format!("|a_{}| = {} exceeds {sup}", i as i64 - 8, c.norm()))?;
    }
    Ok(())
}

fn ft_options(d: usize, m_f: usize, m_t: usize, gap: f64, radius: f64) -> FtOptions {
    let mut y_center = vec![0.0; d];
    y_center[0] = gap;
    FtOptions {
        m_f,
        m_t,
        x_center: vec![0.0; d],
        y_center,
        d_x: radius,
        d_y: radius,
        enforce_ratio: true,
        quad_points: None,
    }
}

pub fn fourier_taylor_term_count() -> Result<(), String> {
    let plan = lib(build_ft_plan(&periodized_gaussian(1.0), 1, &ft_options(1, 1, 9, 0.0, 0.5)))?;
    let oscillatory = plan.complex_terms.iter().filter(|t| t.j != 0).count();
    ensure(oscillatory == 20, || format!("expected 2*10 complex terms, got {oscillatory}"))?;
    let closed = lib(rank_fourier_taylor(1, 9, 1))?;
    ensure(plan.declared_rank as u128 == closed && closed == 40, || {
        format!("declared rank {} vs closed form {closed}", plan.declared_rank)
    })?;
    ensure(plan.retained_rank() == 1 + oscillatory, || format!("retained rank {}", plan.retained_rank()))
}

fn ball_point(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = center.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|a| a * a).sum::<f64>() <= 1.0 {
            return center.iter().zip(&v).map(|(c, a)| c + radius * a).collect();
        }
    }
}

pub fn realified_equals_complex_real_part() -> Result<(), String> {
    let opts = ft_options(2, 1, 9, 0.3, 0.3);
    let plan = lib(build_ft_plan(&periodized_gaussian(1.0), 2, &opts))?;
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let sp = SeparablePlan::FourierTaylor(plan.clone());
    for _ in 0..100 {
        let x = ball_point(&mut rng, &opts.x_center, opts.d_x);
        let y = ball_point(&mut rng, &opts.y_center, opts.d_y);
        // Independent complex evaluation: sum over all modes of
        // coeff * e^{i w j |x-y|^2}-split factors, using only complex arithmetic.
        let rx: Vec<f64> = x.iter().zip(&opts.x_center).map(|(a, c)| a - c).collect();
        let ry: Vec<f64> = y.iter().zip(&opts.y_center).map(|(a, c)| a - c).collect();
        let z: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        let mut sum = Complex64::new(0.0, 0.0);
        for t in &plan.complex_terms {
            let dot: f64 = rx.iter().zip(&ry).map(|(a, b)| a * b).sum();
            // e^{i w j |x-y|^2} = e^{i w j (|x - y_c|^2 + |rho_y|^2 - 2 rho_y.(x - y_c))},
            // and the Taylor part re-expands e^{-2 i w j rho_x . rho_y}.
            let phase = plan.omega * t.j as f64 * (z + 2.0 * dot);
            let mono: f64 = rx
                .iter()
                .zip(&ry)
                .zip(t.alpha.exponents())
                .map(|((a, b), &e)| (a * b).powi(e as i32))
                .product();
            sum += t.coeff * Complex64::from_polar(1.0, phase) * mono;
        }
        let via_factors = plan.eval_complex(&x, &y);
        let real = lib(sp.eval(&x, &y))?;
        ensure((via_factors - sum).norm() <= 1e-12, || format!("factor sum {via_factors} vs direct {sum}"))?;
        ensure((real - sum.re).abs() <= 1e-12, || format!("realified {real} vs Re(complex) {}", sum.re))?;
    }
    Ok(())
}

pub fn fourier_taylor_within_bound() -> Result<(), String> {
    let opts = ft_options(2, 1, 9, 0.3, 0.3);
    let plan = lib(build_ft_plan(&periodized_gaussian(1.0), 2, &opts))?;
    let bound = plan.bound.ok_or("plan carries no bound")?.total;
    let sp = SeparablePlan::FourierTaylor(plan);
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let x = ball_point(&mut rng, &opts.x_center, 0.3);
        let y = ball_point(&mut rng, &opts.y_center, 0.3);
        let z: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        worst = worst.max((lib(sp.eval(&x, &y))? - (-z).exp()).abs());
    }
    ensure(worst <= bound, || format!("max error {worst:e} exceeds the bound {bound:e}"))
}

pub fn fourier_taylor_bound_parts() -> Result<(), String> {
    let b = lib(ft_error_bound(1.0, 0.5, 0.5, 1.0, 9, 1.0, 2, 1))?;
    close(b.taylor, 0.25f64.powi(10), 1e-14, "Taylor part")?;
    close(b.fourier, (1.0 / (2.0 * PI)) * (2.0 / PI).powi(2), 1e-14, "Fourier part")?;
    close(b.fourier, 0.0645, 2e-3, "Fourier part worked value")
}

// ---------------------------------------------------------------- concentration

pub fn uniform_moment_integrals() -> Result<(), String> {
    for d in [1usize, 5, 50] {
        let side = 1.0 / (d as f64).sqrt();
        // Midpoint rule for E[(x - y)^2] with x, y uniform on [0, side].
        let m = 400;
        let hstep = side / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let (a, b) = ((i as f64 + 0.5) * hstep, (j as f64 + 0.5) * hstep);
                acc += (a - b) * (a - b);
            }
        }
        let per_coord = acc / (m * m) as f64;
        let hand = d as f64 * (2.0 / (3.0 * d as f64) - 2.0 / (4.0 * d as f64));
        let p = uniform_params(d, side);
        close(hand, 1.0 / 6.0, 1e-14, "hand moment")?;
        close(p.e_d_sq, 1.0 / 6.0, 1e-14, "E_d^2")?;
        close(d as f64 * per_coord, p.e_d_sq, 1e-5, "integrated E_d^2")?;
    }
    Ok(())
}

pub fn sample_moments_converge() -> Result<(), String> {
    let (n, d, side) = (100_000usize, 4usize, 0.5);
    let x = lib(sample_uniform(n, d, 0.0, side, 61))?;
    let y = lib(sample_uniform(n, d, 0.0, side, 62))?;
    let analytic = uniform_params(d, side);
    let est = lib(params_from_samples(&x, &y, analytic.diameter))?;
    let mut se_var_sq = 0.0;
    for k in 0..d {
        let w: Vec<f64> = (0..n).map(|i| (x.point(i)[k] - y.point(i)[k]).powi(2)).collect();
        let mean = w.iter().sum::<f64>() / n as f64;
        let m2 = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let m4 = w.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n as f64;
        se_var_sq += (m4 - m2 * m2) / n as f64;
    }
    let se_mean = (analytic.sigma_d_sq / n as f64).sqrt();
    let se_var = se_var_sq.sqrt();
    ensure((est.e_d_sq - analytic.e_d_sq).abs() <= 3.0 * se_mean, || {
        format!("E_d^2 estimate {} vs {} (SE {se_mean:e})", est.e_d_sq, analytic.e_d_sq)
    })?;
    ensure((est.sigma_d_sq - analytic.sigma_d_sq).abs() <= 3.0 * se_var, || {
        format!("sigma_d^2 estimate {} vs {} (SE {se_var:e})", est.sigma_d_sq, analytic.sigma_d_sq)
    })
}

pub fn bernstein_zero_variance() -> Result<(), String> {
    let params = ConcentrationParams { diameter: 1.5, e_d_sq: 0.4, sigma_d_sq: 0.0, d: 12 };
    for delta in [0.1f64, 0.5, 1.2] {
        let want = 1.0 - 2.0 * (-3.0 * delta * delta * 12.0 / (8.0 * 1.5 * 1.5)).exp();
        close(lib(bernstein_probability(delta, &params))?.value, want, 1e-13, "zero-variance probability")?;
    }
    Ok(())
}

pub fn bernstein_worked_example() -> Result<(), String> {
    let params = ConcentrationParams { diameter: 1.0, e_d_sq: 0.5, sigma_d_sq: 0.01, d: 100 };
    let p = lib(bernstein_probability(0.5, &params))?;
    close(p.value, 1.0 - 2.0 * (-2.34375f64).exp(), 1e-13, "exact arithmetic")?;
    ensure((p.value - 0.8079).abs() < 5e-4 && !p.vacuous, || format!("probability {}", p.value))
}

pub fn rho_delta_quadratic_root() -> Result<(), String> {
    // D = 1 and delta^2 = 1/2 make c = 2 (rho~^2 - rho~^-2); pick rho~^2 so c = 3/2.
    let rho_tilde_sq = 0.375 + (0.375f64 * 0.375 + 1.0).sqrt();
    close(2.0 * (rho_tilde_sq - 1.0 / rho_tilde_sq), 1.5, 1e-14, "c")?;
    close(lib(rho_delta(rho_tilde_sq, 1.0, 0.5f64.sqrt()))?, 2.0, 1e-14, "root t")?;
    close(2.0 - 1.0 / 2.0, 1.5, 0.0, "t - 1/t")
}

pub fn analytic_probability_bound_arithmetic() -> Result<(), String> {
    let got = lib(prob_bound_analytic(1.0, 1.0, 0.1f64.sqrt(), 2.0, 1))?;
    close(got, (0.2 / 1.4) / 15.0, 1e-13, "analytic probabilistic bound")?;
    close(got, 0.00952, 1e-3, "worked value")
}

pub fn finite_probability_bound_arithmetic() -> Result<(), String> {
    let got = lib(prob_bound_finite(1.0, 0.5, 1, 3))?;
    close(got, 2.0 * 0.25 / (PI * 4.0), 1e-14, "finite-smoothness probabilistic bound")?;
    close(got, 0.0398, 1e-3, "worked value")
}

pub fn empirical_concentration_d50() -> Result<(), String> {
    let (d, n) = (50usize, 10_000usize);
    let side = 1.0 / (d as f64).sqrt();
    let params = uniform_params(d, side);
    let x = lib(sample_uniform(n, d, 0.0, side, derive_seed(71, 0)))?;
    let y = lib(sample_uniform(n, d, 0.0, side, derive_seed(71, 1)))?;
    let frac = lib(empirical_concentration(&x, &y, 0.3, &params))?;
    let bern = lib(bernstein_probability(0.3, &params))?.value;
    ensure(frac >= bern - binomial_slack(bern, n), || format!("observed {frac} below Bernstein {bern}"))
}

// ---------------------------------------------------------------- pointgen

pub fn endpoint_zero_mass_is_uniform() -> Result<(), String> {
    let c = lib(sample_endpoint(20_000, 5, 0.0, 1.0, 0.0, 81))?;
    let mut v = c.points.as_slice().to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let ks = v
        .iter()
        .enumerate()
        .map(|(i, &u)| (u - i as f64 / n).abs().max(((i + 1) as f64 / n - u).abs()))
        .fold(0.0, f64::max);
    let critical = 1.6276 / n.sqrt();
    ensure(ks < critical, || format!("KS statistic {ks} >= 1% critical value {critical}"))
}

pub fn endpoint_mass_at_zero() -> Result<(), String> {
    let n = 100_000usize;
    let c = lib(sample_endpoint(n, 1, 0.0, 1.0, 0.3, 83))?;
    let frac = c.points.as_slice().iter().filter(|&&v| v == 0.0).count() as f64 / n as f64;
    let sigma = (0.3f64 * 0.7 / n as f64).sqrt();
    ensure((frac - 0.3).abs() <= 3.0 * sigma, || format!("P(X=0) estimate {frac}"))
}

pub fn halton_radical_inverse() -> Result<(), String> {
    let c = lib(sample_halton(4, 1, 0, &[0.0], &[1.0]))?;
    ensure(c.points.as_slice() == [0.5, 0.25, 0.75, 0.125], || format!("{:?}", c.points.as_slice()))?;
    let c2 = lib(sample_halton(1, 2, 0, &[0.0, 0.0], &[1.0, 1.0]))?;
    close(c2.point(0)[0], 0.5, 1e-15, "first coordinate")?;
    close(c2.point(0)[1], 1.0 / 3.0, 1e-15, "second coordinate")
}

// ---------------------------------------------------------------- spectrum

pub fn two_point_gaussian_kernel() -> Result<(), String> {
    let x = PointCloud::from_points(lib(DenseMatrix::from_vec(2, 1, vec![0.0, 1.0]))?);
    let k = lib(assemble(&x, &x, Family::Gaussian, Bandwidth::Fixed { h: 1.0 }, MemoryCap::default()))?;
    let e = (-1.0f64).exp();
    ensure(k.entries.as_slice() == [1.0, e, e, 1.0], || format!("{:?}", k.entries.as_slice()))
}

pub fn hand_ranks() -> Result<(), String> {
    let diag = lib(Spectrum::new(lib(DenseMatrix::from_vec(2, 2, vec![3.0, 0.0, 0.0, 1.0]))?, MemoryCap::default()))?;
    let r = lib(diag.rank(0.5, Norm::Two))?.rank;
    ensure(r == 1, || format!("diag(3,1) two-norm rank {r}"))?;
    let id = lib(Spectrum::new(DenseMatrix::identity(5), MemoryCap::default()))?;
    let want = (0..=5).find(|&r| ((5 - r) as f64).sqrt() / 5f64.sqrt() <= 0.5).unwrap();
    let r = lib(id.rank(0.5, Norm::Fro))?.rank;
    ensure(r == 4 && want == 4, || format!("identity Frobenius rank {r}, hand value {want}"))
}

pub fn nystrom_close_to_truncated_svd() -> Result<(), String> {
    let (x, y) = lib(scenario_clouds(Scenario::Complete, Scheme::Uniform, 1000, 6, 91))?;
    let k = lib(assemble(&x, &y, Family::Gaussian, Bandwidth::SqrtD, MemoryCap::default()))?;
    let spec = lib(Spectrum::new(k.entries, MemoryCap::default()))?;
    let tail = spec.fro_tail();
    for r in [7usize, 28] {
        let mut nys = 0.0;
        for seed in 0..5 {
            nys += lib(nystrom_leverage(&spec, r, 30, true, derive_seed(93, seed)))?.errors(&spec.matrix).0 / 5.0;
        }
        ensure(nys <= 3.0 * tail[r], || format!("r={r}: Nystrom {nys:e} vs SVD {:e}", tail[r]))?;
    }
    Ok(())
}

pub fn randomized_svd_leading_values() -> Result<(), String> {
    let (x, y) = lib(scenario_clouds(Scenario::Complete, Scheme::Uniform, 400, 3, 95))?;
    let k = lib(assemble(&x, &y, Family::Gaussian, Bandwidth::SqrtD, MemoryCap::default()))?;
    let spec = lib(Spectrum::new(k.entries.clone(), MemoryCap::default()))?;
    let r = 20;
    let (_, est) = lib(randomized_svd(&k.entries, r, 2, 10, 97))?;
    let exact = spec.singular_values();
    for i in 0..r / 2 {
        ensure((est[i] - exact[i]).abs() <= 0.01 * exact[i], || format!("sigma_{}: {} vs {}", i + 1, est[i], exact[i]))?;
    }
    Ok(())
}

pub fn factorize_ranks_closed_form() -> Result<(), String> {
    let plan = lib(build_cheb_plan(&gaussian(1.0), 8, 3))?;
    let want = lib(binomial(13, 5))?;
    ensure(plan.declared_rank as u128 == want && plan.terms.len() as u128 == want, || {
        format!("Chebyshev rank {} vs C(13,5) = {want}", plan.declared_rank)
    })?;
    let ft = lib(build_ft_plan(&periodized_gaussian(1.0), 2, &ft_options(2, 1, 9, 0.0, 0.5)))?;
    let want = 4 * lib(binomial(11, 2))?;
    ensure(ft.declared_rank as u128 == want && want == 220, || format!("FT rank {} vs {want}", ft.declared_rank))
}

pub fn rank_growth_is_subexponential() -> Result<(), String> {
    let cfg = SweepConfig {
        dims: (4..=12).collect(),
        schemes: vec![Scheme::Uniform],
        scenario: Scenario::Complete,
        n: 200,
        family: Family::Gaussian,
        bandwidth: Bandwidth::SqrtD,
        tolerances: vec![1e-1],
        norms: vec![Norm::Max],
        seed: 101,
        repeats: 1,
    };
    let rows = lib(rank_sweep(&cfg, MemoryCap::default()))?;
    let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.d, r.mean)).collect();
    let slope = lib(loglog_slope(&pts))?;
    ensure(slope.is_finite() && slope <= 6.0, || format!("log-log slope {slope}"))
}

/// Every oracle check, by name.
pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("multiindex_enumeration_d3_degree2", multiindex_enumeration_d3_degree2),
        ("multinomial_4_211", multinomial_4_211),
        ("rank_chebyshev_by_enumeration", rank_chebyshev_by_enumeration),
        ("rank_fourier_taylor_by_enumeration", rank_fourier_taylor_by_enumeration),
        ("exp_interpolant_dense_grid", exp_interpolant_dense_grid),
        ("clenshaw_matches_trig_sum", clenshaw_matches_trig_sum),
        ("monomialize_first_kind_t1", monomialize_first_kind_t1),
        ("monomialized_exp_dense_grid", monomialized_exp_dense_grid),
        ("analytic_bound_arithmetic", analytic_bound_arithmetic),
        ("finite_smooth_bound_arithmetic", finite_smooth_bound_arithmetic),
        ("ellipse_bound_of_exponential", ellipse_bound_of_exponential),
        ("order_one_plan_by_hand", order_one_plan_by_hand),
        ("plan_bound_recomputed", plan_bound_recomputed),
        ("term_evaluation_naive_powers", term_evaluation_naive_powers),
        ("separable_matches_chebyshev", separable_matches_chebyshev),
        ("factor_matrices_within_bound", factor_matrices_within_bound),
        ("periodized_profile_is_periodic", periodized_profile_is_periodic),
        ("fourier_coefficients_bounded_by_sup_norm", fourier_coefficients_bounded_by_sup_norm),
        ("fourier_taylor_term_count", fourier_taylor_term_count),
        ("realified_equals_complex_real_part", realified_equals_complex_real_part),
        ("fourier_taylor_within_bound", fourier_taylor_within_bound),
        ("fourier_taylor_bound_parts", fourier_taylor_bound_parts),
        ("uniform_moment_integrals", uniform_moment_integrals),
        ("sample_moments_converge", sample_moments_converge),
        ("bernstein_zero_variance", bernstein_zero_variance),
        ("bernstein_worked_example", bernstein_worked_example),
        ("rho_delta_quadratic_root", rho_delta_quadratic_root),
        ("analytic_probability_bound_arithmetic", analytic_probability_bound_arithmetic),
        ("finite_probability_bound_arithmetic", finite_probability_bound_arithmetic),
        ("empirical_concentration_d50", empirical_concentration_d50),
        ("endpoint_zero_mass_is_uniform", endpoint_zero_mass_is_uniform),
        ("endpoint_mass_at_zero", endpoint_mass_at_zero),
        ("halton_radical_inverse", halton_radical_inverse),
        ("two_point_gaussian_kernel", two_point_gaussian_kernel),
        ("hand_ranks", hand_ranks),
        ("nystrom_close_to_truncated_svd", nystrom_close_to_truncated_svd),
        ("randomized_svd_leading_values", randomized_svd_leading_values),
        ("factorize_ranks_closed_form", factorize_ranks_closed_form),
        ("rank_growth_is_subexponential", rank_growth_is_subexponential),
    ]
}
