use nsmo_core::manifold::Manifold;
use nsmo_core::{problems, run, SolverParams, Sphere};
use rand::SeedableRng;

fn main() -> Result<(), nsmo_core::Error> {
    let instance = problems::make_rayleigh(50, 2, 1)?;
    let sphere = Sphere::new(instance.dim_ambient)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let x0 = sphere.random_point(&mut rng);
    let record = run(&sphere, x0, &instance.objectives, &SolverParams::default())?;
    println!("{:?} after {} steps", record.status, record.steps());
    Ok(())
}
