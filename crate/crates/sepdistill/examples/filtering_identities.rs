//! Checks the defining identities of the filtered operator families.
//!
//! Each bipartite family ships two product operators {E1, E2} built so that
//! E1 maps psi1 onto the target ray, E2 maps psi2 onto the same ray, and
//! both annihilate the other state.  This example sweeps every split of
//! every level up to d = 6 and prints the worst deviation seen.

use sepdistill::instruments::{filter_scalar, make_instrument};
use sepdistill::numlin::{vec_norm, C64};
use sepdistill::states::{make_state_pair, Family};
use sepdistill::Policy;

fn main() -> sepdistill::Result<()> {
    let policy = Policy::default();
    let mut worst: f64 = 0.0;

    for (family, d_max) in [
        (Family::Thm1Sep, 6),
        (Family::Thm2I, 5),
        (Family::Thm2II, 5),
    ] {
        let scalar = filter_scalar(family)?;
        println!("family {:9}  filter scalar {:.6}", family.code(), scalar);
        for d in 2..=d_max {
            let specs = match family.splits(d) {
                Ok(specs) => specs,
                Err(_) => continue,
            };
            for spec in specs {
                let (psi1, psi2) = make_state_pair(family, &spec, &policy)?;
                let inst = make_instrument(family, &spec, &policy)?;
                let e1 = inst.kraus()[0].full(&policy)?;
                let e2 = inst.kraus()[1].full(&policy)?;

                // Deviation of E psi from c * target, per identity.
                let dev = |image: &[C64], coeff: f64, target: &[C64]| -> f64 {
                    let diff: Vec<C64> = image
                        .iter()
                        .zip(target.iter())
                        .map(|(a, t)| a - C64::new(coeff, 0.0) * t)
                        .collect();
                    vec_norm(&diff)
                };
                let deviations = [
                    dev(&e1.matvec(psi1.amplitudes()), scalar, psi1.amplitudes()),
                    dev(&e2.matvec(psi2.amplitudes()), scalar, psi1.amplitudes()),
                    vec_norm(&e1.matvec(psi2.amplitudes())),
                    vec_norm(&e2.matvec(psi1.amplitudes())),
                ];
                let max_dev = deviations.iter().cloned().fold(0.0, f64::max);
                worst = worst.max(max_dev);
                println!(
                    "  d={} offsets={:?} dims={:?}  max identity deviation {:.2e}",
                    d, spec.offsets, spec.dims, max_dev
                );
                assert!(max_dev < 1e-12, "identity violated for {family:?} {spec:?}");
            }
        }
    }

    println!("\nworst deviation across all families: {worst:.2e}");
    Ok(())
}
