//! The energy functionals `I`, `J`, `F^0`, `A`, `F` for `n = 1`.
//!
//! With `V` the total mass and `rho_phi = rho + kappa u''`:
//!
//! * `I(phi) = (2 pi / V) int u (rho - rho_phi) dt`
//! * `J(phi) = int_0^1 I(s phi) / s ds = (2 pi / V) (1/2) int kappa (u')^2 dt`
//! * `F^0(phi) = J(phi) - (2 pi / V) int u rho dt`
//! * `A(phi) = log[(2 pi / V) int e^{f - u} rho dt]`, `F = F^0 - A`,
//!
//! where `f` is the Ricci potential: `Ric(omega) - omega = i ddbar f`,
//! normalized by `int e^f omega = V`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::form::{RadialPotential, ReducedForm, ANTICANONICAL_MASS};
use super::{Calculus, KahlerError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JValues {
    /// Gauss-Legendre quadrature of `I(s phi) / s` over `s in (0, 1)`.
    pub quadrature: f64,
    /// `-(2 pi / V) (1/2) int u kappa u''`.
    pub donaldson: f64,
    /// `(2 pi / V) (1/2) int kappa (u')^2`.
    pub parts: f64,
}

impl JValues {
    pub fn spread(&self) -> f64 {
        let values = [self.quadrature, self.donaldson, self.parts];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max(super::relative_difference(values[i], values[j]));
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Values {
    /// `J - (2 pi / V) int u rho`, with `J` by quadrature in `s`.
    pub definition: f64,
    /// `-(2 pi / V) [int u rho + (1/2) int u kappa u'']`.
    pub donaldson: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub i: f64,
    pub j_quadrature: f64,
    pub j_donaldson: f64,
    pub j_parts: f64,
    pub f0_donaldson: f64,
    pub f0_definition: f64,
    pub a: f64,
    pub f: f64,
}

fn check_grid(form: &ReducedForm, phi: &RadialPotential) -> Result<(), KahlerError> {
    if form.grid.compatible(&phi.grid) {
        Ok(())
    } else {
        Err(KahlerError::GridMismatch)
    }
}

impl Calculus {
    fn second_derivative(&self, phi: &RadialPotential) -> Vec<f64> {
        self.stencil.second_derivative(&phi.values, phi.grid.step())
    }

    fn first_derivative(&self, phi: &RadialPotential) -> Vec<f64> {
        self.stencil.first_derivative(&phi.values, phi.grid.step())
    }

    /// Density of `omega + i ddbar phi`.
    pub fn ma_density(&self, form: &ReducedForm, phi: &RadialPotential) -> Result<ReducedForm, KahlerError> {
        check_grid(form, phi)?;
        let d2 = self.second_derivative(phi);
        let density: Vec<f64> = form.density.iter().zip(&d2).map(|(r, v)| r + self.kappa * v).collect();
        ReducedForm::with_tails(form.grid, density, form.tails)
    }

    pub fn is_admissible(&self, form: &ReducedForm, phi: &RadialPotential) -> bool {
        self.ma_density(form, phi)
            .map(|m| m.density.iter().all(|v| *v > 0.0))
            .unwrap_or(false)
    }

    fn require_admissible(&self, form: &ReducedForm, phi: &RadialPotential) -> Result<(), KahlerError> {
        if !self.enforce_positivity {
            return check_grid(form, phi);
        }
        let density = self.ma_density(form, phi)?;
        let min = density.min_density();
        if min > 0.0 {
            Ok(())
        } else {
            Err(KahlerError::NotAdmissible(min))
        }
    }

    fn unchecked_i(&self, form: &ReducedForm, volume: f64, phi: &RadialPotential) -> Result<f64, KahlerError> {
        let moved = self.ma_density(form, phi)?;
        let difference = form.integrate_potential(phi) - moved.integrate_potential(phi);
        Ok(2.0 * PI / volume * difference)
    }

    pub fn functional_i(&self, form: &ReducedForm, phi: &RadialPotential) -> Result<f64, KahlerError> {
        self.require_admissible(form, phi)?;
        self.unchecked_i(form, form.mass(), phi)
    }

    fn j_quadrature(&self, form: &ReducedForm, volume: f64, phi: &RadialPotential) -> Result<f64, KahlerError> {
        let mut total = 0.0;
        for &(s, w) in &self.s_rule {
            total += w * self.unchecked_i(form, volume, &phi.scaled(s))? / s;
        }
        Ok(total)
    }

    fn j_donaldson(&self, form: &ReducedForm, volume: f64, phi: &RadialPotential) -> f64 {
        let d2 = self.second_derivative(phi);
        -2.0 * PI / volume * 0.5 * self.kappa * form.grid.integrate_product(&phi.values, &d2)
    }

    pub fn functional_j(&self, form: &ReducedForm, phi: &RadialPotential) -> Result<JValues, KahlerError> {
        self.require_admissible(form, phi)?;
        let volume = form.mass();
        let d1 = self.first_derivative(phi);
        Ok(JValues {
            quadrature: self.j_quadrature(form, volume, phi)?,
            donaldson: self.j_donaldson(form, volume, phi),
            parts: 2.0 * PI / volume * 0.5 * self.kappa * form.grid.integrate_product(&d1, &d1),
        })
    }

    /// Defined for every smooth potential; no positivity check.
    pub fn functional_f0(&self, form: &ReducedForm, phi: &RadialPotential) -> Result<F0Values, KahlerError> {
        check_grid(form, phi)?;
        let volume = form.mass();
        let mean = 2.0 * PI / volume * form.integrate_potential(phi);
        Ok(F0Values {
            definition: self.j_quadrature(form, volume, phi)? - mean,
            donaldson: self.j_donaldson(form, volume, phi) - mean,
        })
    }

    /// `f` with `Ric(omega) - omega = i ddbar f` and `int e^f omega = V`.
    ///
    /// The Ricci density is `-kappa (log rho)''`, so
    /// `f'(t) = -(log rho)'(t) + (log rho)'(-T) - (1/kappa) int_{-T}^t rho`,
    /// which vanishes at `-T`.
    pub fn ricci_potential(&self, form: &ReducedForm) -> Result<RadialPotential, KahlerError> {
        let min = form.min_density();
        if min.is_nan() || min <= 0.0 {
            return Err(KahlerError::NonPositiveForm(min));
        }
        let volume = form.mass();
        if (volume - ANTICANONICAL_MASS).abs() > 1e-6 * ANTICANONICAL_MASS {
            return Err(KahlerError::ClassMismatch {
                found: volume,
                expected: ANTICANONICAL_MASS,
            });
        }
        let grid = form.grid;
        let logs: Vec<f64> = form.density.iter().map(|v| v.ln()).collect();
        let dlog = self.stencil.first_derivative(&logs, grid.step());
        let mass_below = grid.cumulative(&form.density);
        let slope: Vec<f64> = dlog
            .iter()
            .zip(&mass_below)
            .map(|(d, m)| -d + dlog[0] - m / self.kappa)
            .collect();
        let values = grid.cumulative(&slope);
        let n = grid.intervals;
        let raw = RadialPotential::new(grid, values, [slope[0], slope[n]])?;
        let shift = -(2.0 * PI / volume * form.integrate_exp(&raw)).ln();
        Ok(raw.shifted(shift))
    }

    pub fn functional_a(
        &self,
        form: &ReducedForm,
        phi: &RadialPotential,
        ricci: &RadialPotential,
    ) -> Result<f64, KahlerError> {
        self.require_admissible(form, phi)?;
        let exponent = ricci.combine(phi, 1.0, -1.0)?;
        Ok((2.0 * PI / form.mass() * form.integrate_exp(&exponent)).ln())
    }

    pub fn functional_f(&self, form: &ReducedForm, phi: &RadialPotential) -> Result<FunctionalReport, KahlerError> {
        let ricci = self.ricci_potential(form)?;
        self.functional_f_with(form, phi, &ricci)
    }

    /// As [`Calculus::functional_f`] with a precomputed Ricci potential.
    pub fn functional_f_with(
        &self,
        form: &ReducedForm,
        phi: &RadialPotential,
        ricci: &RadialPotential,
    ) -> Result<FunctionalReport, KahlerError> {
        let i = self.functional_i(form, phi)?;
        let j = self.functional_j(form, phi)?;
        let f0 = self.functional_f0(form, phi)?;
        let a = self.functional_a(form, phi, ricci)?;
        Ok(FunctionalReport {
            i,
            j_quadrature: j.quadrature,
            j_donaldson: j.donaldson,
            j_parts: j.parts,
            f0_donaldson: f0.donaldson,
            f0_definition: f0.definition,
            a,
            f: f0.definition - a,
        })
    }

    /// `|L - R| / (|L| + 1)` for
    /// `F0_{w0}(phi01 + phi12) = F0_{w0}(phi01) + F0_{w1}(phi12)`,
    /// `w1 = w0 + i ddbar phi01`.
    pub fn cocycle_check(
        &self,
        form0: &ReducedForm,
        phi01: &RadialPotential,
        phi12: &RadialPotential,
    ) -> Result<f64, KahlerError> {
        self.require_admissible(form0, phi01)?;
        let form1 = self.ma_density(form0, phi01)?;
        let phi02 = phi01.combine(phi12, 1.0, 1.0)?;
        let lhs = self.functional_f0(form0, &phi02)?.donaldson;
        let rhs = self.functional_f0(form0, phi01)?.donaldson + self.functional_f0(&form1, phi12)?.donaldson;
        Ok((lhs - rhs).abs() / (lhs.abs() + 1.0))
    }

    /// Relative residual of `F0_{lambda w}(lambda phi) = lambda F0_w(phi)`.
    pub fn scaling_check(&self, lambda: f64, form: &ReducedForm, phi: &RadialPotential) -> Result<f64, KahlerError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(KahlerError::InvalidParameter(format!("lambda {lambda}")));
        }
        self.require_admissible(form, phi)?;
        let lhs = self
            .functional_f0(&form.scaled(lambda), &phi.scaled(lambda))?
            .definition;
        let rhs = lambda * self.functional_f0(form, phi)?.definition;
        Ok(super::relative_difference(lhs, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::super::Grid;
    use super::*;

    fn setup() -> (Calculus, ReducedForm) {
        (
            Calculus::default(),
            ReducedForm::fubini_study(Grid::new(12.0, 4096).unwrap()),
        )
    }

    fn bump(grid: Grid, amp: f64) -> RadialPotential {
        RadialPotential::from_fn(grid, |t| amp * (-(t - 0.5) * (t - 0.5) / 4.0).exp())
    }

    #[test]
    fn trivial_potentials() {
        let (calc, form) = setup();
        let zero = RadialPotential::zero(form.grid);
        assert_eq!(calc.ma_density(&form, &zero).unwrap(), form);
        let c = RadialPotential::constant(form.grid, 1.7);
        let moved = calc.ma_density(&form, &c).unwrap();
        assert!(moved
            .density
            .iter()
            .zip(&form.density)
            .all(|(a, b)| (a - b).abs() < 1e-10));
        assert!(calc.functional_i(&form, &c).unwrap().abs() < 1e-10);
        let j = calc.functional_j(&form, &c).unwrap();
        assert!(j.quadrature.abs() < 1e-10 && j.donaldson.abs() < 1e-10 && j.parts.abs() < 1e-10);
        let f0 = calc.functional_f0(&form, &c).unwrap();
        assert!(
            (f0.definition + 1.7).abs() < 1e-10 && (f0.donaldson + 1.7).abs() < 1e-10,
            "{f0:?}"
        );
    }

    #[test]
    fn mass_is_conserved() {
        let (calc, form) = setup();
        let moved = calc.ma_density(&form, &bump(form.grid, 0.3)).unwrap();
        assert!((moved.mass() - form.mass()).abs() < 1e-8 * form.mass());
    }

    #[test]
    fn admissibility_threshold() {
        let (calc, form) = setup();
        assert!(calc.is_admissible(&form, &RadialPotential::zero(form.grid)));
        assert!(calc.is_admissible(&form, &bump(form.grid, 0.01)));
        // u'' of the bump at its centre is -2 amp; the density there is about 0.47
        assert!(!calc.is_admissible(&form, &bump(form.grid, 5.0)));
        let err = calc.functional_i(&form, &bump(form.grid, 5.0)).unwrap_err();
        assert!(matches!(err, KahlerError::NotAdmissible(_)));
        assert!(calc.functional_f0(&form, &bump(form.grid, 5.0)).is_ok());
    }

    #[test]
    fn i_equals_gradient_energy() {
        let (calc, form) = setup();
        let phi = bump(form.grid, 0.2);
        let i = calc.functional_i(&form, &phi).unwrap();
        let d1 = Stencil::Fourth.first_derivative(&phi.values, form.grid.step());
        let oracle = 2.0 * PI / form.mass() * form.grid.integrate_product(&d1, &d1);
        assert!(relative_difference(i, oracle) < 1e-8, "{i} {oracle}");
        let doubled = calc.functional_i(&form, &phi.scaled(2.0)).unwrap();
        assert!(doubled >= i);
    }

    #[test]
    fn j_formulas_agree_and_are_bounded_by_i() {
        let (calc, form) = setup();
        let phi = bump(form.grid, -0.2);
        let j = calc.functional_j(&form, &phi).unwrap();
        assert!(j.spread() < 1e-6, "{j:?}");
        let i = calc.functional_i(&form, &phi).unwrap();
        assert!(0.0 <= j.parts && j.parts <= i);
    }

    #[test]
    fn ricci_potential_of_round_form_vanishes() {
        let (calc, form) = setup();
        let f = calc.ricci_potential(&form).unwrap();
        assert!(f.sup_norm() < 1e-6, "{}", f.sup_norm());
        // Ricci density -(log rho)'' equals rho
        let logs: Vec<f64> = form.density.iter().map(|v| v.ln()).collect();
        let ric = Stencil::Fourth.second_derivative(&logs, form.grid.step());
        for (r, rho) in ric.iter().zip(&form.density) {
            assert!((-r - rho).abs() < 1e-8);
        }
        assert!(matches!(
            calc.ricci_potential(&form.scaled(2.0)),
            Err(KahlerError::ClassMismatch { .. })
        ));
    }

    #[test]
    fn ricci_potential_of_a_moved_round_form() {
        // omega_phi = omega + i ddbar phi with Ric(omega) = omega gives
        // f = -phi - log(rho_phi / rho) up to a constant
        let (calc, form) = setup();
        let mut previous = f64::INFINITY;
        for amp in [0.2, 0.1, 0.05, 0.025] {
            let phi = bump(form.grid, amp);
            let moved = calc.ma_density(&form, &phi).unwrap();
            let f = calc.ricci_potential(&moved).unwrap();
            let oracle: Vec<f64> = (0..form.grid.len())
                .map(|i| -phi.values[i] - (moved.density[i] / form.density[i]).ln())
                .collect();
            let offset = f.values[0] - oracle[0];
            let gap = f
                .values
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b - offset).abs())
                .fold(0.0, f64::max);
            assert!(gap < 1e-6, "{amp}: {gap}");
            let size = f.sup_norm();
            assert!(size < 0.6 * previous && size < 3.0 * amp, "{amp}: {size}");
            previous = size;
        }
    }

    #[test]
    fn a_shifts_with_constants() {
        let (calc, form) = setup();
        let f = calc.ricci_potential(&form).unwrap();
        let zero = RadialPotential::zero(form.grid);
        assert!(calc.functional_a(&form, &zero, &f).unwrap().abs() < 1e-9);
        let c = RadialPotential::constant(form.grid, 0.8);
        assert!((calc.functional_a(&form, &c, &f).unwrap() + 0.8).abs() < 1e-9);
        let phi = bump(form.grid, 0.3);
        let a = calc.functional_a(&form, &phi, &f).unwrap();
        let shifted = calc.functional_a(&form, &phi.shifted(2.5), &f).unwrap();
        assert!((shifted - (a - 2.5)).abs() < 1e-12);
        // Q-normalized potential
        let normalized = phi.shifted(a);
        assert!(calc.functional_a(&form, &normalized, &f).unwrap().abs() < 1e-12);
    }

    #[test]
    fn f_is_invariant_under_constants() {
        let (calc, form) = setup();
        let phi = bump(form.grid, 0.3);
        let base = calc.functional_f(&form, &phi).unwrap();
        for c in [-3.0, 0.7, 10.0] {
            let moved = calc.functional_f(&form, &phi.shifted(c)).unwrap();
            assert!((moved.f - base.f).abs() < 1e-8, "{c}: {} vs {}", moved.f, base.f);
        }
        let c = RadialPotential::constant(form.grid, 4.0);
        assert!(calc.functional_f(&form, &c).unwrap().f.abs() < 1e-9);
    }

    #[test]
    fn cocycle_and_scaling() {
        let (calc, form) = setup();
        let a = bump(form.grid, 0.3);
        let b = RadialPotential::from_fn(form.grid, |t| -0.2 * (-(t + 1.0) * (t + 1.0) / 2.0).exp());
        assert!(calc.cocycle_check(&form, &a, &b).unwrap() < 1e-6);
        let c1 = RadialPotential::constant(form.grid, 1.5);
        let c2 = RadialPotential::constant(form.grid, -0.4);
        assert!(calc.cocycle_check(&form, &c1, &c2).unwrap() < 1e-10);
        // inversion: F0_{w1}(-phi) = -F0_{w0}(phi)
        let w1 = calc.ma_density(&form, &a).unwrap();
        let forward = calc.functional_f0(&form, &a).unwrap().donaldson;
        let backward = calc.functional_f0(&w1, &a.scaled(-1.0)).unwrap().donaldson;
        assert!((forward + backward).abs() < 1e-6 * (forward.abs() + 1.0));
        for lambda in [1.0, 0.5, 3.0, 10.0] {
            assert!(calc.scaling_check(lambda, &form, &a).unwrap() < 1e-8);
        }
        let c = RadialPotential::constant(form.grid, 0.9);
        assert!(calc.scaling_check(2.0, &form, &c).unwrap() < 1e-10);
    }

    use super::super::{relative_difference, Stencil};
}
