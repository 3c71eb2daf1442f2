//! Interned-by-Arc identifier newtypes shared by every module.

use std::fmt;
use std::sync::Arc;

/// True for `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                $name(Arc::from(s.as_ref()))
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
            /// Machine-generated names start with `_`.
            pub fn is_reserved(&self) -> bool {
                self.0.starts_with('_')
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }
    };
}

name_type!(
    /// Provenance variable.
    Variable
);
name_type!(
    /// Concept name (never `top`/`bot`; those are separate variants).
    ConceptName
);
name_type!(
    /// Role name.
    RoleName
);
name_type!(
    /// Individual name.
    Individual
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers() {
        assert!(is_identifier("x1"));
        assert!(is_identifier("_nf0"));
        assert!(!is_identifier("1x"));
        assert!(!is_identifier(""));
        assert!(!is_identifier("a-b"));
    }

    #[test]
    fn reserved_prefix() {
        assert!(Variable::new("_v3").is_reserved());
        assert!(!ConceptName::new("Deity").is_reserved());
    }
}
