//! Deterministic distillation with one-sided local measurements.
//!
//! The lifted families (ex-2x4, thm1-locc, thm2-iii) convert their mixture
//! into the target with probability one for every mixing weight: the two
//! outcomes arrive with probabilities (w, 1-w) and both post-states hit the
//! target exactly.  The instrument is a complete (trace-preserving) set.

use sepdistill::channel::{
    completeness_report, distillation_report, CompletenessVerdict, DistillationVerdict,
};
use sepdistill::instruments::make_instrument;
use sepdistill::states::{make_state_pair, mix_pair, Family};
use sepdistill::Policy;

fn main() -> sepdistill::Result<()> {
    let policy = Policy::default();

    for (family, d) in [
        (Family::Ex2x4, 2),
        (Family::Thm1Locc, 3),
        (Family::Thm1Locc, 6),
        (Family::Thm2III, 3),
    ] {
        let spec = family.resolve_spec(d, None, None, None)?;
        let (psi1, psi2) = make_state_pair(family, &spec, &policy)?;
        let inst = make_instrument(family, &spec, &policy)?;

        let completeness = completeness_report(&inst, &policy)?;
        assert_eq!(completeness.verdict, CompletenessVerdict::Complete);
        println!(
            "family {:9} d={} dims={:?}  completeness {}",
            family.code(),
            d,
            spec.dims,
            completeness.verdict.code()
        );

        for tenths in 1..=9 {
            let w = f64::from(tenths) / 10.0;
            let rho = mix_pair(&psi1, &psi2, w, &policy)?;
            let report = distillation_report(&rho, &inst, &psi1, &policy)?;
            assert_eq!(report.verdict, DistillationVerdict::Deterministic);
            let p0 = report.outcomes[0].probability;
            let p1 = report.outcomes[1].probability;
            assert!((p0 - w).abs() < 1e-12 && (p1 - (1.0 - w)).abs() < 1e-12);
            if tenths == 3 {
                println!(
                    "  w={w:.1}  outcomes ({p0:.3}, {p1:.3})  transferred {:.12}  verdict {}",
                    report.transferred,
                    report.verdict.code()
                );
            }
        }
    }

    println!("\nall lifted scenarios convert deterministically at every weight");
    Ok(())
}
