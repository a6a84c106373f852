//! Multimodular exact linear algebra: run a computation modulo a fixed,
//! deterministic sequence of 31-bit primes, CRT-combine the images, and
//! recover the rational result by rational reconstruction.
//!
//! A reconstructed value is accepted only after it reproduces the images of
//! held-out primes that took no part in the reconstruction; callers that need
//! an unconditional certificate layer their own exact identity checks on top
//! (kernel vectors are re-multiplied through the original matrix, lifted
//! syzygies are re-expanded as polynomial identities, and so on).

use crate::arith::{certification_field, GfPrime, Integer, Rational};
use num_bigint::Sign;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Canonical modular image of a computation: a flat entry vector plus a
/// shape/pivot signature. Images are comparable across primes only when the
/// signatures agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularImage {
    pub signature: Vec<usize>,
    pub entries: Vec<u64>,
}

/// Errors from the reconstruction engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconstructError {
    #[error("modular images never stabilized on a common signature")]
    UnstableSignature,
    #[error("rational reconstruction did not converge within {0} primes")]
    Diverged(usize),
}

/// Wang rational reconstruction of `r` modulo `m`.
pub fn rational_reconstruct(r: &Integer, m: &Integer) -> Option<Rational> {
    let bound = (m / 2u8).sqrt();
    let mut r0 = m.clone();
    let mut r1 = r.clone();
    let mut t0 = Integer::zero();
    let mut t1 = Integer::one();
    while r1.abs() > bound {
        if r1.is_zero() {
            return None;
        }
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if t1.sign() == Sign::Minus {
        r1 = -r1;
        t1 = -t1;
    }
    use num_integer::Integer as _;
    if r1.gcd(&t1) != Integer::one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

struct CrtAccumulator {
    // residues combined so far, in [0, modulus)
    values: Vec<Integer>,
    modulus: Integer,
}

impl CrtAccumulator {
    fn new(len: usize) -> Self {
        Self {
            values: vec![Integer::zero(); len],
            modulus: Integer::one(),
        }
    }

    fn push(&mut self, field: GfPrime, entries: &[u64]) {
        let p = Integer::from(field.modulus());
        let m_mod_p = field.from_bigint(&self.modulus);
        let m_inv = field.inv(m_mod_p).expect("moduli are coprime");
        for (acc, &e) in self.values.iter_mut().zip(entries) {
            // acc' = acc + M * ((e - acc) / M mod p)
            let acc_mod_p = field.from_bigint(acc);
            let delta = field.mul(field.sub(e, acc_mod_p), m_inv);
            *acc += &self.modulus * Integer::from(delta);
        }
        self.modulus *= p;
    }
}

/// Options for [`reconstruct_rationals`].
#[derive(Debug, Clone, Copy)]
pub struct ReconstructOptions {
    /// Primes consumed before the first reconstruction attempt.
    pub initial_primes: usize,
    /// Held-out primes a candidate must reproduce before acceptance.
    pub verify_primes: usize,
    /// Hard cap on primes before giving up.
    pub max_primes: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            initial_primes: 3,
            verify_primes: 2,
            max_primes: 40_000,
        }
    }
}

/// Reconstruct a vector of rationals from per-prime images.
///
/// `imager(field)` runs the whole modular pipeline for one prime and returns
/// its canonical image, or `None` when the prime is unusable (a denominator
/// vanished, an intermediate rank dropped). Images whose signature disagrees
/// with the emerging majority are discarded as unlucky-prime artifacts.
pub fn reconstruct_rationals<F>(
    imager: F,
    opts: ReconstructOptions,
) -> Result<(Vec<usize>, Vec<Rational>), ReconstructError>
where
    F: Fn(GfPrime) -> Option<ModularImage> + Sync,
{
    let mut prime_idx = 0usize;
    let mut signature: Option<Vec<usize>> = None;
    let mut acc: Option<CrtAccumulator> = None;
    let mut accepted = 0usize;
    let mut pending: Vec<(GfPrime, ModularImage)> = Vec::new();
    let mut next_attempt = opts.initial_primes.max(1);

    let batch = |start: usize, len: usize, f: &F| -> Vec<(GfPrime, Option<ModularImage>)> {
        (start..start + len)
            .into_par_iter()
            .map(|i| {
                let fld = certification_field(i);
                (fld, f(fld))
            })
            .collect()
    };

    while prime_idx < opts.max_primes {
        let want = (next_attempt - accepted).max(1).min(64);
        let results = batch(prime_idx, want, &imager);
        prime_idx += want;
        for (fld, img) in results {
            let Some(img) = img else { continue };
            match &signature {
                None => {
                    signature = Some(img.signature.clone());
                    let mut a = CrtAccumulator::new(img.entries.len());
                    a.push(fld, &img.entries);
                    acc = Some(a);
                    accepted = 1;
                }
                Some(sig) if *sig == img.signature => {
                    acc.as_mut().expect("accumulator").push(fld, &img.entries);
                    accepted += 1;
                }
                Some(sig) => {
                    // Signatures can only disagree through an unlucky prime;
                    // prefer the signature of larger total rank (ranks only
                    // drop modulo bad primes). The signature convention puts
                    // ranks first, so lexicographic-by-sum works.
                    let old: usize = sig.iter().sum();
                    let new: usize = img.signature.iter().sum();
                    if new > old {
                        signature = Some(img.signature.clone());
                        let mut a = CrtAccumulator::new(img.entries.len());
                        a.push(fld, &img.entries);
                        acc = Some(a);
                        accepted = 1;
                        pending.clear();
                    }
                    // else: drop the unlucky image
                }
            }
        }

        if accepted >= next_attempt {
            if let (Some(sig), Some(a)) = (&signature, &acc) {
                if let Some(candidate) = try_reconstruct(a) {
                    // hold out fresh primes for verification
                    let mut ok = 0usize;
                    let mut extra = Vec::new();
                    let mut vi = prime_idx;
                    while ok < opts.verify_primes && vi < opts.max_primes {
                        let fld = certification_field(vi);
                        vi += 1;
                        if let Some(img) = imager(fld) {
                            if img.signature != *sig {
                                ok = usize::MAX; // signature flipped: not stable yet
                                break;
                            }
                            let matches = candidate.iter().zip(&img.entries).all(|(c, &e)| {
                                fld.from_rational(c).map(|r| r == e).unwrap_or(false)
                            });
                            if !matches {
                                break;
                            }
                            extra.push((fld, img));
                            ok += 1;
                        }
                    }
                    if ok == opts.verify_primes {
                        return Ok((sig.clone(), candidate));
                    }
                    if ok != usize::MAX {
                        // reuse the verification images as accumulation input
                        for (fld, img) in extra {
                            acc.as_mut().expect("accumulator").push(fld, &img.entries);
                            accepted += 1;
                        }
                        prime_idx = vi;
                    }
                }
            }
            next_attempt = (next_attempt * 2).max(accepted + 1);
        }
    }
    Err(ReconstructError::Diverged(opts.max_primes))
}

fn try_reconstruct(acc: &CrtAccumulator) -> Option<Vec<Rational>> {
    let mut out = Vec::with_capacity(acc.values.len());
    for v in &acc.values {
        out.push(rational_reconstruct(v, &acc.modulus)?);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::linalg::gf::GfMatrix;

    #[test]
    fn reconstruct_simple_fractions() {
        let truth = vec![rat(22, 7), rat(-355, 113), rat(0, 1), rat(1, 1)];
        let t = truth.clone();
        let (sig, got) = reconstruct_rationals(
            |fld| {
                let entries: Option<Vec<u64>> = t.iter().map(|x| fld.from_rational(x)).collect();
                entries.map(|entries| ModularImage {
                    signature: vec![entries.len()],
                    entries,
                })
            },
            ReconstructOptions::default(),
        )
        .unwrap();
        assert_eq!(sig, vec![4]);
        assert_eq!(got, truth);
    }

    #[test]
    fn reconstruct_kernel_of_rational_matrix() {
        // kernel of [1 1 1; 1 2 3] is spanned by (1, -2, 1)
        let rows = vec![
            vec![rat(1, 1), rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
        ];
        let (sig, flat) = reconstruct_rationals(
            |fld| {
                let m = GfMatrix::from_rational_rows(fld, &rows)?;
                let ker = m.kernel();
                let mut sig = vec![ker.len()];
                sig.extend(ker.iter().map(|v| v.iter().position(|&x| x != 0).unwrap()));
                Some(ModularImage {
                    signature: sig,
                    entries: ker.into_iter().flatten().collect(),
                })
            },
            ReconstructOptions::default(),
        )
        .unwrap();
        assert_eq!(sig[0], 1);
        assert_eq!(flat, vec![rat(1, 1), rat(-2, 1), rat(1, 1)]);
    }

    #[test]
    fn wang_reconstruction_roundtrip() {
        let m = Integer::from(1_000_003u64) * Integer::from(999_983u64);
        let x = rat(-1234, 4567);
        let r = {
            // x mod m by hand
            let num = x.numer().clone();
            let den = x.denom().clone();
            use num_integer::Integer as _;
            let inv = den.extended_gcd(&m).x.mod_floor(&m);
            (num * inv).mod_floor(&m)
        };
        assert_eq!(rational_reconstruct(&r, &m), Some(x));
    }
}
