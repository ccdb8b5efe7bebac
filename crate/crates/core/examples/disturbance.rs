//! Measuring one half of a state moves it by at most 2√δ + δ, where δ is how
//! badly the other half predicts the outcome.

use nlcert::certify::{measurement_disturbance, CheckOptions};
use nlcert::linalg::{tensor, Complex64, ComplexMatrix, DensityOperator};
use nlcert::strategies::{angle_measurement, phi_plus};

fn main() -> nlcert::Result<()> {
    let opts = CheckOptions::default();
    let z = angle_measurement(0.0);

    let r = measurement_disturbance(&phi_plus(), (2, 2), &z, &opts)?;
    println!("entangled: delta = {:.3e}, disturbance = {:.3e}, bound = {:.3e}", r.delta, r.disturbance, r.bound);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&[Complex64::new(h, 0.0), Complex64::new(h, 0.0)])?;
    let lambda = DensityOperator::from_matrix(tensor(plus.matrix(), &ComplexMatrix::diag_real(&[0.5, 0.5]))?)?;
    let r = measurement_disturbance(&lambda, (2, 2), &z, &opts)?;
    println!("product:   delta = {:.6}, disturbance = {:.6}, bound = {:.6}", r.delta, r.disturbance, r.bound);

    for theta in [0.05, 0.2, 0.5] {
        let psi = [Complex64::new(f64::cos(theta), 0.0), Complex64::new(f64::sin(theta), 0.0)];
        let a = DensityOperator::pure(&psi)?;
        let lambda = DensityOperator::from_matrix(tensor(a.matrix(), &ComplexMatrix::diag_real(&[1.0]))?)?;
        let r = measurement_disturbance(&lambda, (2, 1), &z, &opts)?;
        println!(
            "tilted {theta}: disturbance / bound = {:.4}",
            r.disturbance / r.bound
        );
    }
    Ok(())
}
