use spinfluid::*;
use spinfluid::identities::*;
use spinfluid::rng::{CounterRng, band_limited_vector};

fn main() {
    for &(band, strength) in &[(3i64, 1.0f64), (2, 1.0), (2, 0.7), (2, 0.5)] {
        let grid = Grid::line(64, 3.0).unwrap();
        let ops = SpectralOps::new(&grid);
        let params = PhysParams::natural();
        let mut worst: f64 = 0.0;
        let mut worst_name = "";
        for seed in 0..10u64 {
            let rng = CounterRng::new(1000 + seed);
            let psi = SpinorSpec::with_strength(&grid, &rng, band, strength).sample_normalized(&ops);
            let mut b = band_limited_vector(&grid, &rng.stream(77), 2, 0.5);
            b.comps[2].iter_mut().for_each(|v| *v += 1.0);
            let fields = FieldConfig::zeeman(b);
            let report = verify_identities(&ops, &psi, &fields, &params).unwrap();
            for row in &report.rows {
                if row.max_residual > worst { worst = row.max_residual; worst_name = row.name; }
            }
        }
        println!("band={band} strength={strength}: worst {worst_name} = {worst:.3e}");
    }
}
