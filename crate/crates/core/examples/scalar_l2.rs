//! ℓ2 certificate of a scalar system compared against its H∞ norm.
//!
//! For `x⁺ = a x + b w`, `z = c x + d w` the certified γ bounds the squared
//! induced ℓ2 norm, which for one mode is `max_ω |cb/(e^{iω} − a) + d|²`.
//!
//! `cargo run --example scalar_l2`

use conecert::automaton::arbitrary_switching;
use conecert::l2cert::{certify_l2, check_l2_certificate, L2Options, L2Outcome};
use conecert::linalg::DenseMatrix;
use conecert::models::{Dimensions, ModeMatrices, SystemDescription, SystemKind};

fn hinf_squared(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (0..=2000)
        .map(|k| {
            let w = std::f64::consts::PI * k as f64 / 2000.0;
            // cb / (e^{iω} − a) + d
            let (re, im) = (w.cos() - a, w.sin());
            let den = re * re + im * im;
            let (gr, gi) = (c * b * re / den + d, -c * b * im / den);
            gr * gr + gi * gi
        })
        .fold(0.0, f64::max)
}

fn main() -> conecert::Result<()> {
    for (a, b, c, d) in [(0.5, 1.0, 1.0, 0.0), (-0.7, 1.0, 0.5, 0.2), (0.9, 0.3, 1.0, 0.0), (0.0, 1.0, 1.0, 0.0)] {
        let one = |v: f64| DenseMatrix::new(1, 1, vec![v]);
        let system = SystemDescription::new(
            SystemKind::Gss,
            Dimensions { n: 1, q: 1, r: 1 },
            vec![ModeMatrices::new("m1", one(a)?, one(b)?, one(c)?, one(d)?)],
            arbitrary_switching(1)?,
        )?;
        match certify_l2(&system, &L2Options::default())? {
            L2Outcome::Certified(cert) => {
                let ok = check_l2_certificate(&system, &cert, cert.margin / 2.0)?.passed();
                println!(
                    "a={a:5} b={b} c={c} d={d}: gamma = {:.5}, H∞² = {:.5}, P = {:.4}, check {}",
                    cert.gamma,
                    hinf_squared(a, b, c, d),
                    cert.p[0][(0, 0)],
                    if ok { "passed" } else { "FAILED" }
                );
            }
            L2Outcome::Infeasible => println!("a={a}: no certificate"),
        }
    }
    Ok(())
}
