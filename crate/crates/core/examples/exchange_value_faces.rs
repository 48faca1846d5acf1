//! The price response to an excess vector: the face of the simplex that
//! maximizes its value.

use walras::equilibrium::price_adjust;
use walras::geometry::simplex_grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for z in [vec![0.3, -0.1, 0.0], vec![2.0, 2.0, 0.0], vec![-1.0, -1.0, -1.0]] {
        let face = price_adjust(&z, 1e-12);
        let goods: Vec<usize> = face.active.iter().map(|j| j + 1).collect();
        println!("z = {z:?}: active goods {goods:?}, barycenter {}", face.representative);
    }

    // On a coarse lattice the maximizers are exactly the points of the face.
    let z = [2.0, 2.0, 0.0];
    let face = price_adjust(&z, 1e-12);
    let on_face = simplex_grid(3, 4)?.iter().filter(|p| face.contains(p, 1e-12)).count();
    println!("lattice points on the face of {z:?}: {on_face}");
    Ok(())
}
