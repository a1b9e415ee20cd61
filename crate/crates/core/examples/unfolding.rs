//! Periodic unfolding: integration identity and the averaged moment projector.

use polylab::experiments::{
    averaged_moment_defect, projector_idempotence_defect, projector_test_field, unfolding_identity_worst,
};

fn main() -> polylab::Result<()> {
    for m in [2, 3] {
        println!("m={m}: worst integration identity residual {:.2e}", unfolding_identity_worst(m, 5)?);
        let (ridges, _) = projector_test_field(9);
        println!(
            "      projector idempotence {:.2e}, averaged moments {:.2e}",
            projector_idempotence_defect(&ridges, m)?,
            averaged_moment_defect(&ridges, m)?
        );
    }
    Ok(())
}
