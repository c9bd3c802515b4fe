use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered finite set of symbol names. Cloning is cheap.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    inner: Arc<Inner>,
}

#[derive(PartialEq, Eq)]
struct Inner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// Largest alphabet accepted at all; profile alphabets need 27·|Σ|.
pub const MAX_SYMBOLS: usize = 27 * 64;

/// Largest alphabet whose subsets fit a [`LabelSet`].
pub const MAX_SET_SYMBOLS: usize = 64;

impl Alphabet {
    /// Fails unless every subset fits a [`LabelSet`].
    pub fn check_set_capacity(&self) -> Result<()> {
        if self.len() > MAX_SET_SYMBOLS {
            return Err(Error::CapExceeded(format!("label sets are limited to {MAX_SET_SYMBOLS} symbols")));
        }
        Ok(())
    }

    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        for s in symbols {
            let s = s.into();
            if index.contains_key(&s) {
                return Err(Error::Invalid(format!("duplicate symbol `{s}`")));
            }
            index.insert(s.clone(), names.len());
            names.push(s);
        }
        if names.is_empty() {
            return Err(Error::Invalid("alphabet must be nonempty".into()));
        }
        if names.len() > MAX_SYMBOLS {
            return Err(Error::CapExceeded(format!("alphabets are limited to {MAX_SYMBOLS} symbols")));
        }
        Ok(Alphabet { inner: Arc::new(Inner { names, index }) })
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.inner.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn index(&self, s: &str) -> Option<usize> {
        self.inner.index.get(s).copied()
    }

    pub fn lookup(&self, s: &str) -> Result<usize> {
        self.index(s).ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }

    pub fn full_set(&self) -> LabelSet {
        LabelSet::full(self.len())
    }

    /// All nonempty subsets in increasing bitmask order.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = LabelSet> {
        let n = self.len();
        assert!(n < 32, "subset enumeration over {n} symbols");
        (1u64..(1u64 << n)).map(LabelSet)
    }

    pub fn set_from_names<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<LabelSet> {
        let mut s = LabelSet::EMPTY;
        for n in names {
            s = s.with(self.lookup(n)?);
        }
        Ok(s)
    }

    pub fn render_set(&self, s: LabelSet) -> String {
        let parts: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", parts.join(","))
    }

    /// Inverse of [`Alphabet::render_set`]; whitespace around names is ignored.
    pub fn parse_set(&self, text: &str) -> Result<LabelSet> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Invalid(format!("`{text}` is not a set written {{a,b}}")))?;
        if inner.trim().is_empty() {
            return Ok(LabelSet::EMPTY);
        }
        self.set_from_names(inner.split(',').map(str::trim))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.inner.names.iter()).finish()
    }
}

/// Subset of an alphabet as a bitmask over symbol indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabelSet(pub u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            LabelSet(u64::MAX)
        } else {
            LabelSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        LabelSet(1u64 << i)
    }

    pub fn with(self, i: usize) -> Self {
        LabelSet(self.0 | (1u64 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, o: LabelSet) -> Self {
        LabelSet(self.0 | o.0)
    }

    pub fn intersect(self, o: LabelSet) -> Self {
        LabelSet(self.0 & o.0)
    }

    pub fn minus(self, o: LabelSet) -> Self {
        LabelSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: LabelSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
