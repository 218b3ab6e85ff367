//! The `identity-report-v1` document.

use serde::Serialize;

use super::gradient::gradient_singularity_check;
use super::qmatrix::{q_expand, q_mod_f3_check, reduced_equation};
use super::IdentityError;

pub const IDENTITY_REPORT_FORMAT: &str = "identity-report-v1";

#[derive(Debug, Clone, Serialize)]
pub struct IdentityEntry {
    pub identity: String,
    pub k: usize,
    pub pass: bool,
    pub digest: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub remainder: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub format: String,
    pub k: usize,
    pub pass: bool,
    pub entries: Vec<IdentityEntry>,
}

/// Runs every exact identity for `1..=k` and the gradient check for
/// `n = 2..=k+1`.
pub fn identity_report(k: usize, samples: usize, seed: u64) -> Result<IdentityReport, IdentityError> {
    let mut entries = Vec::new();
    for j in 1..=k {
        let q = q_expand(j)?;
        let det = &q.m.det() - &crate::fields::Polynomial::constant_in(&[], crate::scalar::qint(1));
        entries.push(IdentityEntry {
            identity: "det".into(),
            k: j,
            pass: num_traits::Zero::is_zero(&det),
            digest: det.digest(),
            remainder: Vec::new(),
        });
        let even = q.m.a12.coefficient_of("f", 2);
        entries.push(IdentityEntry {
            identity: "Q12_f2_coefficient".into(),
            k: j,
            pass: num_traits::Zero::is_zero(&even),
            digest: even.digest(),
            remainder: Vec::new(),
        });
        for e in q_mod_f3_check(j)?.entries {
            entries.push(IdentityEntry {
                identity: format!("{}_mod_f3", e.entry),
                k: j,
                pass: e.divisible,
                digest: e.digest,
                remainder: e.remainder,
            });
        }
        let n = j + 1;
        let red = reduced_equation(n)?;
        entries.push(IdentityEntry {
            identity: "reduced_equation".into(),
            k: j,
            pass: red.consistent(),
            digest: red.reduced.digest(),
            remainder: Vec::new(),
        });
        let g = gradient_singularity_check(n, samples, seed.wrapping_add(n as u64))?;
        entries.push(IdentityEntry {
            identity: "gradient_singular_set".into(),
            k: j,
            pass: g.passes(),
            digest: g.reduced_digest,
            remainder: Vec::new(),
        });
    }
    Ok(IdentityReport {
        format: IDENTITY_REPORT_FORMAT.into(),
        k,
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}
