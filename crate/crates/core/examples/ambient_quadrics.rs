//! de Sitter and sphere quadrics in flat space, and ambient isometries acting on them.

use dsgeom::ambient::{plane_boost, plane_rotation};
use dsgeom::{flat_inner, AmbientPoint, Quadric};

fn main() -> dsgeom::Result<()> {
    let r = 2.0;
    let ds = Quadric::hyperboloid(5, r)?;
    let s4 = Quadric::sphere(5, r)?;

    // A point on the waist of the hyperboloid, then boosted and rotated.
    let p = AmbientPoint::new(vec![0.0, r, 0.0, 0.0, 0.0]);
    let m = plane_boost(5, 0, 1, 0.8) * plane_rotation(5, 1, 3, 1.1);
    let q = AmbientPoint::new((&m * p.to_vector()).iter().copied().collect());
    println!("moved point       {:?}", q.coords());
    println!("<q,q> - R^2       {:+.3e}", ds.residual(q.coords())?);
    println!("<p,q>             {:+.6}", flat_inner(ds.signature(), p.coords(), q.coords())?);

    // The same point is far off the Euclidean sphere of equal radius.
    println!("sphere residual   {:+.6}", s4.residual(q.coords())?);
    Ok(())
}
