//! Optimal discrimination with dual certificates: two pure states (closed
//! form) and the three trine states (iterative solver).

use nlcert::discrimination::{check_dual, dist, DiscriminationInstance};
use nlcert::linalg::{Complex64, DensityOperator};

fn pure(v: [f64; 2], weight: f64) -> nlcert::Result<nlcert::linalg::HermitianOperator> {
    let s = DensityOperator::pure(&[Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)])?;
    Ok(s.op().scale(weight))
}

fn main() -> nlcert::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pair = DiscriminationInstance::new(vec![pure([1.0, 0.0], 0.5)?, pure([h, h], 0.5)?])?;
    let r = dist(&pair, 1e-9)?;
    println!("|0> vs |+>: Dist = {:.10} ({:?}), expected {:.10}", r.value, r.method, 0.5 + 0.5 * h);

    let trine: Vec<_> = (0..3)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            pure([t.cos(), t.sin()], 1.0 / 3.0)
        })
        .collect::<nlcert::Result<_>>()?;
    let inst = DiscriminationInstance::new(trine)?;
    let r = dist(&inst, 1e-9)?;
    let dual = check_dual(&inst, &r.dual_certificate)?;
    println!(
        "trine: Dist in [{:.10}, {:.10}] after {} iterations, dual feasible = {}",
        r.value,
        r.upper_bound(),
        r.iterations,
        dual.feasible
    );
    Ok(())
}
