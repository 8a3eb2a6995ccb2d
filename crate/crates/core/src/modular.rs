//! Exact kernels of sparse matrices over Q(√−3) by multi-modular
//! elimination. Rank mod p bounds the rank over Q(√−3) from below; the
//! kernel is lifted by CRT and rational reconstruction and then checked
//! exactly, which bounds it from above. The result is exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::FieldElem;
use crate::linalg::SparseVec;
use crate::rational::Rational;

/// A prime p ≡ 1 mod 3 with a square root s of −3.
#[derive(Clone, Copy, Debug)]
struct Prime {
    p: u64,
    s: u64,
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

fn inv(a: u64, p: u64) -> u64 {
    pow(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes p ≡ 1 mod 3 below 2³¹, descending.
fn primes() -> impl Iterator<Item = Prime> {
    let top = (1u64 << 31) - 1;
    (0..).map(move |k| top - 2 * k).filter(|p| p % 3 == 1 && is_prime(*p)).map(|p| {
        // ω a primitive cube root of unity, √−3 = 2ω + 1
        let w = (2..).map(|g| pow(g, (p - 1) / 3, p)).find(|w| *w != 1).unwrap();
        Prime { p, s: (2 * w + 1) % p }
    })
}

fn rational_mod(r: &Rational, p: u64) -> Option<u64> {
    if let Rational::Small(n, d) = r {
        let (n, d) = (n.rem_euclid(p as i64) as u64, d.rem_euclid(p as i64) as u64);
        return (d != 0).then(|| mul(n, inv(d, p), p));
    }
    let m = BigInt::from(p);
    let n = r.numer().mod_floor(&m).to_u64().unwrap();
    let d = r.denom().mod_floor(&m).to_u64().unwrap();
    (d != 0).then(|| mul(n, inv(d, p), p))
}

/// Image of x under re + im·√−3 ↦ re + im·(±s) mod p.
fn embed(x: &FieldElem, pr: Prime, conj: bool) -> Option<u64> {
    let re = rational_mod(&x.re, pr.p)?;
    let im = rational_mod(&x.im, pr.p)?;
    let s = if conj { pr.p - pr.s } else { pr.s };
    Some((re + mul(im, s, pr.p)) % pr.p)
}

/// Reduced row echelon form mod p of the rows; returns the pivot columns
/// and, for each free column f, the kernel vector with 1 at f.
fn kernel_mod(rows: &[Vec<u64>], ncols: usize, p: u64) -> (Vec<usize>, Vec<usize>, Vec<Vec<u64>>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut pivot_rows = Vec::new();
    let mut order: Vec<usize> = (0..a.len()).collect();
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, i);
        order.swap(r, i);
        let iv = inv(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = mul(*x, iv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if *y != 0 {
                    *x = (*x + mul(f, *y, p)) % p;
                }
            }
        }
        pivots.push(c);
        pivot_rows.push(order[r]);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_set.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = (p - a[i][f]) % p;
            }
            v
        })
        .collect();
    (pivots, free, kernel, pivot_rows)
}

/// x with |num|, den ≤ √(m/2) and x ≡ a mod m.
fn reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    let (n, d) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    Some(Rational::from_big(num_rational::BigRational::new(n, d)))
}

fn crt(acc: &mut BigInt, m: &BigInt, r: u64, p: u64) {
    // acc ≡ old mod m, acc ≡ r mod p
    let old = acc.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let minv = inv(m.mod_floor(&BigInt::from(p)).to_u64().unwrap(), p);
    let t = mul((r + p - old) % p, minv, p);
    *acc += m * BigInt::from(t);
}

/// Exact kernel of the column matrix: `rank` and a basis of the relations
/// Σⱼ vⱼ·colⱼ = 0, each with coefficient 1 at its own free column.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub rank: usize,
    pub relations: Vec<BTreeMap<usize, FieldElem>>,
    /// Primes used before the lifted kernel verified.
    pub primes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("kernel did not stabilize after {0} primes")]
pub struct NoConvergence(pub usize);

fn verify<K: Ord + Clone + Hash>(cols: &[SparseVec<K>], rel: &BTreeMap<usize, FieldElem>) -> bool {
    let mut acc: HashMap<&K, FieldElem> = HashMap::new();
    for (j, c) in rel {
        for (k, x) in &cols[*j] {
            *acc.entry(k).or_default() += &(x * c);
        }
    }
    acc.values().all(|x| x.is_zero())
}

pub fn exact_kernel<K: Ord + Clone + Hash>(cols: &[SparseVec<K>]) -> Result<Kernel, NoConvergence> {
    const MAX_PRIMES: usize = 400;
    let ncols = cols.len();
    let keys: BTreeMap<&K, usize> = cols.iter().flat_map(|c| c.keys()).collect::<BTreeSet<_>>().into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let nrows = keys.len();
    // (pivot columns, kept rows, residues of re and im per free column)
    let mut best: Option<(Vec<usize>, Vec<usize>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>)> = None;
    let mut modulus = BigInt::one();
    let mut rank = 0;
    for (used, pr) in primes().take(MAX_PRIMES).enumerate() {
        let build = |conj: bool, rows_kept: Option<&Vec<usize>>| -> Option<Vec<Vec<u64>>> {
            let mut m = vec![vec![0u64; ncols]; nrows];
            for (j, col) in cols.iter().enumerate() {
                for (k, x) in col {
                    m[keys[k]][j] = embed(x, pr, conj)?;
                }
            }
            Some(match rows_kept {
                Some(rs) => rs.iter().map(|&r| m[r].clone()).collect(),
                None => m,
            })
        };
        // every eighth prime uses all rows, so a lower first rank cannot persist
        let kept = if used % 8 == 0 { None } else { best.as_ref().map(|b| b.1.clone()) };
        let (Some(m1), Some(m2)) = (build(false, kept.as_ref()), build(true, kept.as_ref())) else { continue };
        let (piv1, free, k1, rows1) = kernel_mod(&m1, ncols, pr.p);
        let (piv2, _, k2, _) = kernel_mod(&m2, ncols, pr.p);
        if piv1 != piv2 {
            continue;
        }
        if piv1.len() > rank || best.is_none() {
            if piv1.len() < rank {
                continue;
            }
            // a larger rank means every earlier prime was unlucky
            rank = piv1.len();
            let rows_kept = match &kept {
                Some(k) => rows1.iter().map(|&r| k[r]).collect(),
                None => rows1.clone(),
            };
            modulus = BigInt::one();
            best = Some((piv1.clone(), rows_kept, vec![vec![BigInt::zero(); ncols]; free.len()], vec![vec![BigInt::zero(); ncols]; free.len()]));
        } else if piv1.len() < rank || piv1 != best.as_ref().unwrap().0 {
            continue;
        }
        let (_, _, re, im) = best.as_mut().unwrap();
        let p = pr.p;
        let half = inv(2, p);
        let inv2s = inv(mul(2, pr.s, p), p);
        for (f, (v1, v2)) in k1.iter().zip(&k2).enumerate() {
            for c in 0..ncols {
                let r = mul((v1[c] + v2[c]) % p, half, p);
                let i = mul((v1[c] + p - v2[c]) % p, inv2s, p);
                crt(&mut re[f][c], &modulus, r, p);
                crt(&mut im[f][c], &modulus, i, p);
            }
        }
        modulus *= BigInt::from(p);
        // try to lift
        let lifted: Option<Vec<BTreeMap<usize, FieldElem>>> = re
            .iter()
            .zip(im.iter())
            .map(|(rv, iv)| {
                let mut out = BTreeMap::new();
                for c in 0..ncols {
                    let x = FieldElem::new(reconstruct(&rv[c], &modulus)?, reconstruct(&iv[c], &modulus)?);
                    if !x.is_zero() {
                        out.insert(c, x);
                    }
                }
                Some(out)
            })
            .collect();
        if let Some(rels) = lifted {
            if rels.iter().all(|r| verify(cols, r)) {
                return Ok(Kernel { rank, relations: rels, primes: used + 1 });
            }
        }
    }
    Err(NoConvergence(MAX_PRIMES))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(entries: &[(usize, FieldElem)]) -> SparseVec<usize> {
        entries.iter().cloned().collect()
    }

    #[test]
    fn primes_have_root_of_minus_three() {
        for pr in primes().take(5) {
            assert_eq!(pr.p % 3, 1);
            assert_eq!(mul(pr.s, pr.s, pr.p), pr.p - 3);
        }
    }

    #[test]
    fn reconstructs_rationals() {
        let m = BigInt::from(1_000_000_007u64);
        let x = BigInt::from(mul(22, inv(7, 1_000_000_007), 1_000_000_007));
        assert_eq!(reconstruct(&x, &m), Some(Rational::new(22, 7)));
    }

    #[test]
    fn kernel_over_quadratic_field() {
        let w = FieldElem::sqrt_m3();
        // columns c0, c1 = √−3·c0, c2 independent, c3 = c0/3 + c2
        let c0 = col(&[(0, FieldElem::one()), (1, FieldElem::frac(2, 5))]);
        let c1 = col(&[(0, w.clone()), (1, &FieldElem::frac(2, 5) * &w)]);
        let c2 = col(&[(1, FieldElem::one()), (2, FieldElem::int(7))]);
        let c3 = col(&[(0, FieldElem::frac(1, 3)), (1, FieldElem::frac(17, 15)), (2, FieldElem::int(7))]);
        let k = exact_kernel(&[c0, c1, c2, c3]).unwrap();
        assert_eq!(k.rank, 2);
        assert_eq!(k.relations.len(), 2);
        assert_eq!(k.relations[0][&0], -w.clone());
        assert_eq!(k.relations[1][&0], FieldElem::frac(-1, 3));
    }

    #[test]
    fn agrees_with_exact_elimination() {
        let cols: Vec<SparseVec<usize>> = (0..6)
            .map(|j| (0..4).map(|i| (i, FieldElem::new(Rational::from_int(((i * 7 + j * 3) % 5) as i64 - 2), Rational::from_int((i * j % 3) as i64)))).filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        let k = exact_kernel(&cols).unwrap();
        assert_eq!(k.relations.len(), crate::linalg::relations(cols.clone()).len());
        assert_eq!(6 - k.rank, k.relations.len());
    }
}
