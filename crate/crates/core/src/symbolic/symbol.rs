//! Interned variable names.
//!
//! Symbols compare by pointer for equality and by natural name order
//! (`x2 < x10`) for ordering, so canonical forms do not depend on the
//! order in which names were first seen.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

static INTERNER: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();

#[derive(Clone, Copy)]
pub struct Symbol(&'static str);

impl Symbol {
    pub fn new(name: &str) -> Symbol {
        let mut set = INTERNER
            .get_or_init(|| Mutex::new(HashSet::new()))
            .lock()
            .expect("symbol interner poisoned");
        if let Some(s) = set.get(name) {
            return Symbol(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        set.insert(leaked);
        Symbol(leaked)
    }

    pub fn name(&self) -> &'static str {
        self.0
    }

    /// Splits `base[k]` into `("base", k)`; unshifted names have shift 0.
    pub fn base_and_shift(&self) -> (&'static str, u32) {
        let s = self.0;
        if let Some(open) = s.rfind('[') {
            if s.ends_with(']') {
                if let Ok(k) = s[open + 1..s.len() - 1].parse::<u32>() {
                    return (&s[..open], k);
                }
            }
        }
        (s, 0)
    }

    pub fn base(&self) -> Symbol {
        Symbol::new(self.base_and_shift().0)
    }

    pub fn shift(&self) -> u32 {
        self.base_and_shift().1
    }

    /// The symbol for this variable advanced by `by` time steps.
    pub fn shifted(&self, by: u32) -> Symbol {
        let (base, k) = self.base_and_shift();
        Symbol::with_shift(base, k + by)
    }

    pub fn with_shift(base: &str, k: u32) -> Symbol {
        if k == 0 {
            Symbol::new(base)
        } else {
            Symbol::new(&format!("{base}[{k}]"))
        }
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        natural_cmp(self.0, other.0).then_with(|| self.0.cmp(other.0))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Compares strings chunk-wise, treating runs of digits as numbers.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut ai, mut bi) = (a.as_bytes(), b.as_bytes());
    loop {
        match (ai.first(), bi.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(ca), Some(cb)) => {
                if ca.is_ascii_digit() && cb.is_ascii_digit() {
                    let la = ai.iter().take_while(|c| c.is_ascii_digit()).count();
                    let lb = bi.iter().take_while(|c| c.is_ascii_digit()).count();
                    let da = trim_zeros(&ai[..la]);
                    let db = trim_zeros(&bi[..lb]);
                    let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
                    if ord != Ordering::Equal {
                        return ord;
                    }
                    ai = &ai[la..];
                    bi = &bi[lb..];
                } else {
                    if ca != cb {
                        return ca.cmp(cb);
                    }
                    ai = &ai[1..];
                    bi = &bi[1..];
                }
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let n = d.iter().take_while(|&&c| c == b'0').count();
    &d[n..]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        assert!(Symbol::new("x2") < Symbol::new("x10"));
        assert!(Symbol::new("u1") < Symbol::new("x1"));
        assert_eq!(Symbol::new("x1"), Symbol::new("x1"));
    }

    #[test]
    fn shifts() {
        let u = Symbol::new("u1");
        let u2 = u.shifted(2);
        assert_eq!(u2.name(), "u1[2]");
        assert_eq!(u2.shifted(1).name(), "u1[3]");
        assert_eq!(u2.base(), u);
        assert_eq!(u2.shift(), 2);
    }
}
