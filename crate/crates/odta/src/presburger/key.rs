use std::fmt;

/// Family of a formula variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// x_a: occurrences of an alphabet symbol.
    Symbol,
    /// x_S: occurrences of a class S ⊆ Γ.
    Class,
    /// z_P: occurrences of a zonal class P ⊆ 2^Γ.
    Zonal,
    /// x_(a,q,α): occurrences of an extended label.
    Extended,
    /// n_(q,a): run-state/label occurrences.
    StateLabel,
    /// Solver or encoding internal.
    Aux,
}

impl Family {
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Symbol => "x",
            Family::Class => "xs",
            Family::Zonal => "z",
            Family::Extended => "xe",
            Family::StateLabel => "n",
            Family::Aux => "aux",
        }
    }

    pub fn from_prefix(p: &str) -> Option<Family> {
        Some(match p {
            "x" => Family::Symbol,
            "xs" => Family::Class,
            "z" => Family::Zonal,
            "xe" => Family::Extended,
            "n" => Family::StateLabel,
            "aux" => Family::Aux,
            _ => return None,
        })
    }
}

/// Tagged variable name; the rendering `family:name` is injective.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub family: Family,
    pub name: String,
}

impl Key {
    pub fn new(family: Family, name: impl Into<String>) -> Self {
        Key { family, name: name.into() }
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Key::new(Family::Symbol, name)
    }

    pub fn class(name: impl Into<String>) -> Self {
        Key::new(Family::Class, name)
    }

    pub fn zonal(name: impl Into<String>) -> Self {
        Key::new(Family::Zonal, name)
    }

    pub fn extended(name: impl Into<String>) -> Self {
        Key::new(Family::Extended, name)
    }

    pub fn state_label(name: impl Into<String>) -> Self {
        Key::new(Family::StateLabel, name)
    }

    pub fn aux(name: impl Into<String>) -> Self {
        Key::new(Family::Aux, name)
    }

    pub fn render(&self) -> String {
        format!("{}:{}", self.family.prefix(), self.name)
    }

    pub fn parse(s: &str) -> Option<Key> {
        let (p, n) = s.split_once(':')?;
        Some(Key::new(Family::from_prefix(p)?, n))
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
