//! Exact integer arithmetic on the lattice of eigencurve maxima.
//!
//! Reduced coordinates are the physical ones divided by `π²/4`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Physical units per reduced unit.
pub const UNIT: f64 = PI * PI / 4.0;

/// Default ceiling for [`smallest_with_multiplicity`].
pub const DEFAULT_SEARCH_CEILING: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeSite {
    pub i: u64,
    pub j: u64,
    /// `2(i+j−1)(j−i)`; negative below the diagonal.
    pub lambda_red: i64,
    /// `2i²+2j²−2i−2j+1`, always odd.
    pub e_red: u64,
    /// Sheet index `i+j−1`.
    pub n: u64,
}

impl LatticeSite {
    pub fn lambda(&self) -> f64 {
        self.lambda_red as f64 * UNIT
    }

    pub fn e(&self) -> f64 {
        self.e_red as f64 * UNIT
    }
}

pub fn site(i: u64, j: u64) -> Result<LatticeSite> {
    if i < 1 || j < 1 {
        return Err(Error::Domain(format!("lattice indices must be positive, got ({i}, {j})")));
    }
    let n = i + j - 1;
    Ok(LatticeSite {
        i,
        j,
        lambda_red: 2 * n as i64 * (j as i64 - i as i64),
        e_red: 2 * i * i + 2 * j * j - 2 * i - 2 * j + 1,
        n,
    })
}

/// The `n` maxima of sheet `n`, ascending in `λ`.
pub fn sheet_maxima(n: u64) -> Vec<LatticeSite> {
    // i descending gives λ ascending
    (1..=n)
        .rev()
        .map(|i| site(i, n + 1 - i).expect("positive indices"))
        .collect()
}

/// `(n₁, n₃)`: divisors of `m` congruent to 1 and 3 mod 4.
fn divisor_classes(m: u64) -> (u64, u64) {
    let (mut n1, mut n3) = (0, 0);
    let mut tally = |d: u64| match d % 4 {
        1 => n1 += 1,
        3 => n3 += 1,
        _ => {}
    };
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            tally(d);
            if d * d != m {
                tally(m / d);
            }
        }
        d += 1;
    }
    (n1, n3)
}

fn check_odd(e_red: u64) -> Result<()> {
    if e_red == 0 || e_red.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "reduced energy must be odd and positive, got {e_red}"
        )));
    }
    Ok(())
}

/// Number of lattice maxima sharing the reduced energy `e_red`, from the
/// divisor formula `n₁ − n₃`.
pub fn defective_multiplicity(e_red: u64) -> Result<u64> {
    check_odd(e_red)?;
    let (n1, n3) = divisor_classes(e_red);
    Ok(n1 - n3)
}

/// All sites with the given reduced energy, `(i, j)` and `(j, i)` both listed.
pub fn sites_with_energy(e_red: u64) -> Result<Vec<LatticeSite>> {
    check_odd(e_red)?;
    // 2Ẽ = (2i−1)² + (2j−1)²
    let target = 2 * e_red;
    let mut out = Vec::new();
    let mut a = 1u64;
    while a * a < target {
        let rest = target - a * a;
        let b = rest.isqrt();
        if b * b == rest && b % 2 == 1 {
            out.push(site(a.div_ceil(2), b.div_ceil(2))?);
        }
        a += 2;
    }
    Ok(out)
}

/// Smallest reduced energy whose defective multiplicity equals `target`.
pub fn smallest_with_multiplicity(target: u64, ceiling: u64) -> Result<u64> {
    if target == 0 {
        return Err(Error::Domain("multiplicity must be at least 1".into()));
    }
    (1..=ceiling)
        .step_by(4)
        .find(|&e| defective_multiplicity(e).is_ok_and(|m| m == target))
        .ok_or(Error::SearchExhausted { target, ceiling })
}

/// Number of integer pairs `(a, b)`, signs and zeros included, with
/// `a² + b² = n`.
pub fn classical_representation_count(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let (n1, n3) = divisor_classes(n);
    Ok(4 * (n1 - n3))
}

/// The matrix `Ẽ_ij` for `1 ≤ i, j ≤ size`.
pub fn reduced_energy_matrix(size: u64) -> Vec<Vec<u64>> {
    (1..=size)
        .map(|i| {
            (1..=size)
                .map(|j| site(i, j).expect("positive indices").e_red)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sites_match_closed_form() {
        assert_eq!(
            site(1, 1).unwrap(),
            LatticeSite { i: 1, j: 1, lambda_red: 0, e_red: 1, n: 1 }
        );
        let s = site(1, 2).unwrap();
        assert_eq!((s.lambda_red, s.e_red, s.n), (4, 5, 2));
        let s = site(3, 4).unwrap();
        assert_eq!((s.lambda_red, s.e_red, s.n), (12, 37, 6));
        assert!(site(0, 3).is_err());
    }

    #[test]
    fn sheet_four_outer_maxima() {
        let m = sheet_maxima(4);
        assert_eq!(m.len(), 4);
        assert_eq!(m[0].lambda_red, -24);
        assert_eq!(m[3].lambda_red, 24);
        assert_eq!(m[3].e_red, 25);
        assert!((m[3].lambda() - 6.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn quoted_multiplicities() {
        assert_eq!(defective_multiplicity(25).unwrap(), 3);
        assert_eq!(defective_multiplicity(15).unwrap(), 0);
        assert_eq!(defective_multiplicity(8125).unwrap(), 10);
        assert!(defective_multiplicity(8).is_err());
        assert!(defective_multiplicity(0).is_err());

        let mut pairs: Vec<(u64, u64)> = sites_with_energy(8125)
            .unwrap()
            .iter()
            .filter(|s| s.i < s.j)
            .map(|s| (s.i, s.j))
            .collect();
        pairs.sort();
        // n = 69, 75, 85, 86, 90
        assert_eq!(pairs, vec![(6, 64), (13, 63), (28, 58), (30, 57), (43, 48)]);
    }

    #[test]
    fn smallest_energies() {
        let table = [1, 5, 25, 65, 625, 325, 15625, 1105, 4225, 8125];
        for (k, &expected) in table.iter().enumerate() {
            let got = smallest_with_multiplicity(k as u64 + 1, DEFAULT_SEARCH_CEILING).unwrap();
            assert_eq!(got, expected, "N_d = {}", k + 1);
        }
        assert_eq!(
            smallest_with_multiplicity(7, 1000),
            Err(Error::SearchExhausted { target: 7, ceiling: 1000 })
        );
    }

    #[test]
    fn two_square_counts() {
        // brute-force oracle over all signed pairs
        let brute = |n: i64| {
            let r = (n as f64).sqrt() as i64 + 1;
            let mut c = 0;
            for a in -r..=r {
                for b in -r..=r {
                    if a * a + b * b == n {
                        c += 1;
                    }
                }
            }
            c
        };
        assert_eq!(classical_representation_count(25).unwrap(), 12);
        assert_eq!(classical_representation_count(3).unwrap(), 0);
        assert_eq!(classical_representation_count(1).unwrap(), 4);
        for n in 1..400u64 {
            assert_eq!(classical_representation_count(n).unwrap(), brute(n as i64), "{n}");
        }
    }

    #[test]
    fn matrix_is_symmetric() {
        let m = reduced_energy_matrix(8);
        assert_eq!(&m[0][..4], &[1, 5, 13, 25]);
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(m[i][j], m[j][i]);
                assert_eq!(m[i][j] % 2, 1);
            }
        }
    }

    proptest! {
        #[test]
        fn divisor_formula_counts_sites(k in 0u64..10_000) {
            let e = 2 * k + 1;
            let sites = sites_with_energy(e).unwrap();
            prop_assert_eq!(defective_multiplicity(e).unwrap(), sites.len() as u64);
            let off_diagonal = sites.iter().filter(|s| s.i != s.j).count();
            prop_assert_eq!(off_diagonal % 2, 0);
        }

        #[test]
        fn site_parity(i in 1u64..500, j in 1u64..500) {
            let s = site(i, j).unwrap();
            prop_assert_eq!(s.e_red % 4, 1);
            prop_assert_eq!(s.lambda_red % 2, 0);
            prop_assert_eq!(s.n, i + j - 1);
        }
    }
}
