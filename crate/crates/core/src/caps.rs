/// Resource caps threaded through every operation that enumerates field
/// elements or searches field extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Caps {
    /// Largest field size p^m any enumerating operation will walk.
    pub enumeration: u64,
    /// Largest extension degree tried by splitting-degree and root searches.
    pub extension: u32,
}

impl Caps {
    pub const DEFAULT_ENUMERATION: u64 = 1 << 22;
    pub const DEFAULT_EXTENSION: u32 = 24;

    pub fn new(enumeration: u64, extension: u32) -> Self {
        Caps { enumeration, extension }
    }
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: Self::DEFAULT_ENUMERATION,
            extension: Self::DEFAULT_EXTENSION,
        }
    }
}
