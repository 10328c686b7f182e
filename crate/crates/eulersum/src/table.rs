//! Exact harmonic numbers, finite prefix sums, and the knowledge base of
//! full Euler sums.
//!
//! `P(ℓ,n,m) = Σ_{j=1}^m H_j^ℓ/j^n` is always computable exactly;
//! `E(ℓ,n) = Σ_{j≥1} H_j^ℓ/j^n` (convergent iff `n ≥ 2`) is known in
//! closed form only for some keys:
//!
//! - `E(0,n) = ζ(n)` and `E(1,n)` by Euler's classical formula, both
//!   computed on demand;
//! - a small built-in table for the quadratic, cubic and quartic
//!   diagonal sums, the last carrying the symbolic constant `S(2,6)`
//!   (the linear generalized sum `Σ H_k^{(2)}/k^6`, not known to reduce
//!   to zeta values);
//! - user-supplied extension entries, one `E <ℓ> <n> = <closed form>`
//!   per line.
//!
//! Everything else is reported as unknown, which the engine surfaces as
//! a symbolic constant (or an error in strict mode).

use std::collections::HashMap;
use std::sync::RwLock;

use thiserror::Error;

use crate::closed_form::{ClosedForm, SymbolicSum, ZetaMonomial};
use crate::parse::{parse_closed_form, ParseError};
use crate::scalar::{from_int, from_ratio, pow_u32, Scalar};

/// Key of a full Euler sum `E(ℓ,n) = Σ_j H_j^ℓ/j^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EulerSumKey {
    /// Harmonic exponent ℓ ≥ 0.
    pub hexp: u32,
    /// Denominator power n; the series converges iff n ≥ 2.
    pub npow: u32,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table entries require hexp ≥ 1 and npow ≥ 2 (E({hexp},{npow}) rejected)")]
    InvalidKey { hexp: u32, npow: u32 },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: expected `E <l> <n> = <closed form>`")]
    MalformedEntry { line: usize },
}

/// `H_m` by direct summation (`H_0 = 0`).
pub fn harmonic_number<T: Scalar>(m: u64) -> T {
    let mut h = T::zero();
    for j in 1..=m {
        h = h + T::one() / from_int::<T>(i64::try_from(j).expect("index fits i64"));
    }
    h
}

/// The Euler-sum knowledge base plus memo caches for `H_m` and
/// `P(ℓ,n,m)`. Caches sit behind locks so a shared table can serve
/// concurrent evaluations.
pub struct EulerTable<T> {
    entries: HashMap<EulerSumKey, ClosedForm<T>>,
    harmonic_cache: RwLock<Vec<T>>,
    partial_cache: RwLock<HashMap<(u32, u32), Vec<T>>>,
}

impl<T: Scalar> Default for EulerTable<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> EulerTable<T> {
    /// A table seeded with the built-in diagonal entries.
    pub fn new() -> Self {
        let mut entries = HashMap::new();
        // E(2,2) = (17/4) ζ(4)
        entries.insert(
            EulerSumKey { hexp: 2, npow: 2 },
            ClosedForm::zeta(4).scale(&from_ratio(17, 4)),
        );
        // E(3,3) = (93/16) ζ(6) − (5/2) ζ(3)²
        entries.insert(
            EulerSumKey { hexp: 3, npow: 3 },
            ClosedForm::zeta(6)
                .scale(&from_ratio(93, 16))
                .add(&ClosedForm::from_term(
                    ZetaMonomial::new(vec![3, 3]),
                    from_ratio(-5, 2),
                )),
        );
        // E(4,4) = (13559/144) ζ(8) − 92 ζ(3)ζ(5) − 2 ζ(2)ζ(3)² + 26 S(2,6)
        entries.insert(
            EulerSumKey { hexp: 4, npow: 4 },
            ClosedForm::zeta(8)
                .scale(&from_ratio(13559, 144))
                .add(&ClosedForm::from_term(
                    ZetaMonomial::new(vec![3, 5]),
                    from_int(-92),
                ))
                .add(&ClosedForm::from_term(
                    ZetaMonomial::new(vec![2, 3, 3]),
                    from_int(-2),
                ))
                .add(&ClosedForm::from_symbolic(
                    SymbolicSum::Linear { order: 2, npow: 6 },
                    from_int(26),
                )),
        );
        EulerTable {
            entries,
            harmonic_cache: RwLock::new(vec![T::zero()]),
            partial_cache: RwLock::new(HashMap::new()),
        }
    }

    /// An empty table (no built-in entries); `E(0,n)` and `E(1,n)` stay
    /// available since they are computed, not stored.
    pub fn empty() -> Self {
        EulerTable {
            entries: HashMap::new(),
            harmonic_cache: RwLock::new(vec![T::zero()]),
            partial_cache: RwLock::new(HashMap::new()),
        }
    }

    /// Memoized `H_m`.
    pub fn harmonic(&self, m: u64) -> T {
        let m = usize::try_from(m).expect("index fits usize");
        {
            let cache = self.harmonic_cache.read().expect("cache lock");
            if let Some(v) = cache.get(m) {
                return v.clone();
            }
        }
        let mut cache = self.harmonic_cache.write().expect("cache lock");
        while cache.len() <= m {
            let j = cache.len() as i64;
            let next = cache.last().expect("nonempty").clone() + T::one() / from_int::<T>(j);
            cache.push(next);
        }
        cache[m].clone()
    }

    /// Memoized `P(ℓ,n,m) = Σ_{j=1}^m H_j^ℓ/j^n`; `P(·,·,0) = 0`.
    pub fn partial_euler(&self, hexp: u32, npow: u32, m: u64) -> T {
        assert!(npow >= 1, "denominator power must be at least 1");
        let m = usize::try_from(m).expect("index fits usize");
        let key = (hexp, npow);
        {
            let cache = self.partial_cache.read().expect("cache lock");
            if let Some(v) = cache.get(&key).and_then(|prefix| prefix.get(m)) {
                return v.clone();
            }
        }
        // make sure harmonic cache reaches m before taking the write lock
        self.harmonic(m as u64);
        let mut cache = self.partial_cache.write().expect("cache lock");
        let prefix = cache.entry(key).or_insert_with(|| vec![T::zero()]);
        let harmonics = self.harmonic_cache.read().expect("cache lock");
        while prefix.len() <= m {
            let j = prefix.len();
            let hj = harmonics[j].clone();
            let term = pow_u32(&hj, hexp) / pow_u32(&from_int::<T>(j as i64), npow);
            let next = prefix.last().expect("nonempty").clone() + term;
            prefix.push(next);
        }
        prefix[m].clone()
    }

    /// Euler's closed form for the linear sum `Σ_k H_k/k^n`, `n ≥ 2`:
    /// `(n/2 + 1)ζ(n+1) − ½ Σ_{k=1}^{n-2} ζ(n-k)ζ(k+1)` (empty sum at
    /// `n = 2`), stored in the conventional shape with products of even
    /// zeta values folded into a single zeta.
    pub fn euler_linear(&self, n: u32) -> ClosedForm<T> {
        assert!(n >= 2, "linear Euler sum requires n >= 2");
        let mut cf =
            ClosedForm::zeta(n + 1).scale(&(from_int::<T>(i64::from(n)) / from_int::<T>(2) + T::one()));
        for k in 1..=n.saturating_sub(2) {
            cf = cf.add(&ClosedForm::from_term(
                ZetaMonomial::new(vec![n - k, k + 1]),
                from_ratio(-1, 2),
            ));
        }
        cf.fold_even_zeta_products()
    }

    /// Closed form of `E(ℓ,n)` when known; `None` means "not known to be
    /// reducible", a value the engine turns into a symbolic constant.
    /// Requires `n ≥ 2` (the series diverges otherwise).
    pub fn euler_full(&self, key: EulerSumKey) -> Option<ClosedForm<T>> {
        assert!(key.npow >= 2, "full Euler sum requires n >= 2");
        if key.hexp == 0 {
            return Some(ClosedForm::zeta(key.npow));
        }
        if let Some(cf) = self.entries.get(&key) {
            return Some(cf.clone());
        }
        if key.hexp == 1 {
            return Some(self.euler_linear(key.npow));
        }
        None
    }

    /// Add or replace an entry. Only `ℓ ≥ 1, n ≥ 2` keys are storable:
    /// `ℓ = 0` is ζ itself and `n = 1` diverges.
    pub fn insert(&mut self, key: EulerSumKey, value: ClosedForm<T>) -> Result<(), TableError> {
        if key.hexp < 1 || key.npow < 2 {
            return Err(TableError::InvalidKey {
                hexp: key.hexp,
                npow: key.npow,
            });
        }
        self.entries.insert(key, value);
        Ok(())
    }

    /// Load extension entries, one per line:
    /// `E <ℓ> <n> = <closed-form expression>`.
    /// Blank lines and `#` comments are skipped. Later entries win.
    /// Returns how many entries were loaded.
    pub fn load_extensions(&mut self, text: &str) -> Result<usize, TableError> {
        let mut count = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let rest = line
                .strip_prefix('E')
                .ok_or(TableError::MalformedEntry { line: line_no })?;
            let (head, body) = rest
                .split_once('=')
                .ok_or(TableError::MalformedEntry { line: line_no })?;
            let mut nums = head.split_whitespace();
            let hexp: u32 = nums
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(TableError::MalformedEntry { line: line_no })?;
            let npow: u32 = nums
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or(TableError::MalformedEntry { line: line_no })?;
            if nums.next().is_some() {
                return Err(TableError::MalformedEntry { line: line_no });
            }
            let cf = parse_closed_form::<T>(body.trim())
                .map_err(|source| TableError::Parse { line: line_no, source })?;
            self.insert(EulerSumKey { hexp, npow }, cf)?;
            count += 1;
        }
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn rat(n: i64, d: i64) -> Rational {
        from_ratio(n, d)
    }

    #[test]
    fn harmonic_values() {
        let table = EulerTable::<Rational>::new();
        assert_eq!(table.harmonic(0), rat(0, 1));
        assert_eq!(table.harmonic(1), rat(1, 1));
        assert_eq!(table.harmonic(3), rat(11, 6));
        assert_eq!(harmonic_number::<Rational>(4), rat(25, 12));
    }

    #[test]
    fn partial_euler_values() {
        let table = EulerTable::<Rational>::new();
        // H_1/1 + H_2/2 + H_3/3 = 1 + 3/4 + 11/18 = 85/36
        assert_eq!(table.partial_euler(1, 1, 3), rat(85, 36));
        assert_eq!(table.partial_euler(0, 2, 2), rat(5, 4));
        assert_eq!(table.partial_euler(2, 1, 0), rat(0, 1));
    }

    #[test]
    fn partial_euler_difference_property() {
        let table = EulerTable::<Rational>::new();
        for (l, n) in [(0u32, 1u32), (1, 2), (3, 1), (2, 4)] {
            for m in 1..=12u64 {
                let diff = table.partial_euler(l, n, m) - table.partial_euler(l, n, m - 1);
                let hm: Rational = table.harmonic(m);
                let expect = pow_u32(&hm, l) / pow_u32(&from_int::<Rational>(m as i64), n);
                assert_eq!(diff, expect);
            }
        }
    }

    #[test]
    fn euler_linear_small_values() {
        let table = EulerTable::<Rational>::new();
        assert_eq!(table.euler_linear(2).to_string(), "2*zeta(3)");
        assert_eq!(table.euler_linear(3).to_string(), "5/4*zeta(4)");
        assert_eq!(
            table.euler_linear(4).to_string(),
            "-zeta(2)*zeta(3) + 3*zeta(5)"
        );
        assert_eq!(
            table.euler_linear(5).to_string(),
            "-1/2*zeta(3)^2 + 7/4*zeta(6)"
        );
    }

    #[test]
    fn euler_full_lookup() {
        let table = EulerTable::<Rational>::new();
        assert_eq!(
            table
                .euler_full(EulerSumKey { hexp: 2, npow: 2 })
                .unwrap()
                .to_string(),
            "17/4*zeta(4)"
        );
        assert_eq!(
            table
                .euler_full(EulerSumKey { hexp: 0, npow: 5 })
                .unwrap()
                .to_string(),
            "zeta(5)"
        );
        assert!(table.euler_full(EulerSumKey { hexp: 2, npow: 3 }).is_none());
    }

    #[test]
    fn quartic_entry_carries_linear_symbol() {
        let table = EulerTable::<Rational>::new();
        let e44 = table.euler_full(EulerSumKey { hexp: 4, npow: 4 }).unwrap();
        let symbols: Vec<_> = e44.symbolic_terms().collect();
        assert_eq!(symbols.len(), 1);
        assert_eq!(
            *symbols[0].0,
            SymbolicSum::Linear { order: 2, npow: 6 }
        );
        assert_eq!(symbols[0].1, &from_int::<Rational>(26));
    }

    #[test]
    fn extension_loading() {
        let mut table = EulerTable::<Rational>::new();
        let text = "\n# comment\nE 2 4 = 97/24*zeta(6) - 2*zeta(2)*zeta(4)\n";
        assert_eq!(table.load_extensions(text).unwrap(), 1);
        assert!(table.euler_full(EulerSumKey { hexp: 2, npow: 4 }).is_some());
        assert!(matches!(
            table.load_extensions("E 0 3 = zeta(3)"),
            Err(TableError::InvalidKey { .. })
        ));
        assert!(matches!(
            table.load_extensions("E 1 = zeta(3)"),
            Err(TableError::MalformedEntry { line: 1 })
        ));
    }
}
