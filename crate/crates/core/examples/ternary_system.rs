//! Side lengths, corridor widths and exact copy areas of the geometric system.

use ternlab::geometry::{e_n_area_exact, normalized_scale, to_f64, EpsilonSpec, PointClass, TernaryParams};
use ternlab::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = TernaryParams::build(EpsilonSpec::Geometric, 5)?;
    println!("{:>2} {:>12} {:>14} {:>12} {:>10}", "n", "epsilon", "a", "d", "a/3^n");
    let scale = normalized_scale(&params);
    for n in 1..=params.depth() {
        println!(
            "{n:>2} {:>12.6} {:>14.6} {:>12.6} {:>10.6}",
            params.epsilon(n),
            params.a(n),
            params.d(n),
            scale[n]
        );
    }
    for n in 1..=3 {
        let area = e_n_area_exact(&params, n).map(|q| to_f64(&q));
        println!("A(E_{n}) = {area:?}, exact a_{n} = {}", params.exact_a(n).unwrap());
    }
    for z in [Complex64::new(0.2, 0.1), Complex64::new(3.0, 0.0), Complex64::new(1.2, 0.0)] {
        match params.classify_point(z, 2)? {
            PointClass::InCopy(idx) => println!("{z} lies in the copy with digits {:?}", idx.digits),
            PointClass::InCorridor(level) => println!("{z} lies in a level-{level} corridor"),
            PointClass::Outside => println!("{z} lies outside S_2"),
        }
    }
    Ok(())
}
