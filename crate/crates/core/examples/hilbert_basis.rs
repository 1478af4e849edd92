//! Hilbert bases, saturation and duals of affine monoids.

use loggw::cone;
use loggw::monoid::ToricMonoid;

fn main() -> loggw::Result<()> {
    // generated by (1,-6), (1,0), (0,3), (0,2): not saturated, (0,1) is missing
    let p = ToricMonoid::new(2, &[vec![1, -6], vec![1, 0], vec![0, 3], vec![0, 2]])?;
    println!("generators:        {:?}", p.generators());
    println!("saturated:         {}", p.is_saturated()?);
    println!("contains (0,1):    {}", p.generated_contains(&[0, 1])?);
    let s = p.saturate()?;
    println!("saturation basis:  {:?}", s.hilbert_basis()?);
    println!("dual basis:        {:?}", p.dual()?.hilbert_basis()?);

    // the cone over (1,0) and (1,3) meets Z^2 in more than its rays
    println!("cone((1,0),(1,3)): {:?}", cone::hilbert_basis(&[vec![1, 0], vec![1, 3]], 2)?);
    Ok(())
}
